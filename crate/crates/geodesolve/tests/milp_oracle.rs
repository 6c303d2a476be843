//! Cross-checks of the mixed-integer cone program against exhaustive
//! assignment enumeration: for every injective assignment, the same LP is
//! solved with the binary block pinned, and the best value must match the
//! branch-and-bound optimum.

use geodesolve::formulations::{build_udgp_milp, Cone, LinearProgram};
use geodesolve::lp_solver::{solve_lp, solve_milp, LpStatus, MilpConfig};
use geodesolve::types::{SolveStatus, UdgpInstance};

/// All ordered selections of `m` distinct pair indices out of `n_pairs`.
fn injective_choices(n_pairs: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut used = vec![false; n_pairs];
    let mut cur = Vec::new();
    fn rec(
        n_pairs: usize,
        m: usize,
        used: &mut Vec<bool>,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for i in 0..n_pairs {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(n_pairs, m, used, cur, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    rec(n_pairs, m, &mut used, &mut cur, &mut out);
    out
}

/// Minimum objective over all assignments, each solved as a continuous LP
/// with the binaries pinned to the assignment's encoding.
fn enumeration_optimum(lp: &LinearProgram) -> Option<f64> {
    let y = lp.y.as_ref().expect("cone program has a y block");
    let choices = injective_choices(y.pairs.len(), y.m);
    let mut best: Option<f64> = None;
    for choice in choices {
        let mut pinned = lp.clone();
        for p in 0..y.pairs.len() {
            for l in 0..y.m {
                pinned.bounds[y.index(p, l)] = (0.0, 0.0);
            }
        }
        for (l, &p) in choice.iter().enumerate() {
            pinned.bounds[y.index(p, l)] = (1.0, 1.0);
        }
        pinned.integral = vec![false; pinned.n_vars];
        let sol = solve_lp(&pinned).expect("pinned LP solves");
        if sol.status == LpStatus::Optimal {
            best = Some(match best {
                None => sol.objective,
                Some(b) => b.min(sol.objective),
            });
        }
    }
    best
}

fn check_instance(inst: &UdgpInstance, cone: Cone) {
    let lp = build_udgp_milp(cone, inst, false).unwrap();
    let milp = solve_milp(&lp, &MilpConfig::default()).unwrap();
    assert_eq!(milp.status, SolveStatus::Optimal);
    let oracle = enumeration_optimum(&lp).expect("some assignment is LP-feasible");
    assert!(
        (milp.objective - oracle).abs() <= 1e-6 * (1.0 + oracle.abs()),
        "branch-and-bound {} vs enumeration {}",
        milp.objective,
        oracle
    );
}

#[test]
fn metric_triangle_reaches_zero_slack() {
    let inst = UdgpInstance::new(2, 3, vec![3.0, 4.0, 5.0]).unwrap();
    let lp = build_udgp_milp(Cone::DualDd, &inst, false).unwrap();
    let milp = solve_milp(&lp, &MilpConfig::default()).unwrap();
    assert_eq!(milp.status, SolveStatus::Optimal);
    assert!(
        milp.objective.abs() <= 1e-6,
        "slack objective {}",
        milp.objective
    );
    // and it matches enumeration
    check_instance(&inst, Cone::DualDd);
}

#[test]
fn violating_triangle_matches_enumeration() {
    // (3,1,1) cannot be realized; the relaxed slack optimum is still defined
    // and must agree with per-assignment enumeration
    let inst = UdgpInstance::new(2, 3, vec![3.0, 1.0, 1.0]).unwrap();
    check_instance(&inst, Cone::DualDd);
}

#[test]
fn partial_lists_match_enumeration() {
    // m < n(n-1)/2 cases with up to 24 assignments
    for (n, distances) in [
        (3usize, vec![2.0]),      // 3 assignments
        (3, vec![1.0, 2.0]),      // 6 assignments
        (4, vec![1.5]),           // 6 assignments
        (3, vec![2.0, 2.0, 2.0]), // 6 assignments, equilateral
    ] {
        let inst = UdgpInstance::new(2, n, distances).unwrap();
        check_instance(&inst, Cone::DualDd);
    }
}

#[test]
fn dd_cone_matches_enumeration() {
    let inst = UdgpInstance::new(2, 3, vec![1.0, 2.0]).unwrap();
    check_instance(&inst, Cone::Dd);
}

#[test]
fn incumbent_pool_improves_monotonically() {
    let inst = UdgpInstance::new(2, 4, vec![2.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
    let lp = build_udgp_milp(Cone::DualDd, &inst, false).unwrap();
    let milp = solve_milp(&lp, &MilpConfig::default()).unwrap();
    assert_eq!(milp.status, SolveStatus::Optimal);
    assert!(!milp.incumbents.is_empty());
    for w in milp.incumbents.windows(2) {
        assert!(w[1].1 < w[0].1, "pool not strictly improving");
    }
    // every incumbent's y block satisfies the assignment rows exactly
    let y = lp.y.as_ref().unwrap();
    for (values, _) in &milp.incumbents {
        for l in 0..y.m {
            let total: f64 = (0..y.pairs.len()).map(|p| values[y.index(p, l)]).sum();
            assert_eq!(total, 1.0);
        }
        for p in 0..y.pairs.len() {
            let total: f64 = (0..y.m).map(|l| values[y.index(p, l)]).sum();
            assert!(total == 0.0 || total == 1.0);
        }
    }
}
