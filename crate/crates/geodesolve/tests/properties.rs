//! Property tests for the cross-module invariants: assignment round trips,
//! realization-error relations, cone membership, and similarity of a graph
//! with itself.

use geodesolve::instances::{gen_graph_type, GraphType, GraphTypeParams, GRAPH_TYPE_NAMES};
use geodesolve::linalg::SymMatrix;
use geodesolve::metrics::{gphsim, lde, mde};
use geodesolve::types::{
    derive_udgp, order_induced_assignment, reconstruct_graph, DgpInstance, Graph, Realization,
};
use proptest::prelude::*;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Strategy: a valid graph on 2..=7 vertices with random positive weights.
fn arb_graph() -> impl Strategy<Value = Graph> {
    (2usize..=7)
        .prop_flat_map(|n| {
            let pairs: Vec<(usize, usize)> = (1..=n)
                .flat_map(|i| ((i + 1)..=n).map(move |j| (i, j)))
                .collect();
            let m = pairs.len();
            (
                Just(n),
                Just(pairs),
                proptest::collection::vec(any::<bool>(), m),
                proptest::collection::vec(0.1f64..10.0, m),
            )
        })
        .prop_map(|(n, pairs, keep, weights)| {
            let edges: Vec<(usize, usize, f64)> = pairs
                .into_iter()
                .zip(keep)
                .zip(weights)
                .filter_map(|(((u, v), k), w)| k.then_some((u, v, w)))
                .collect();
            Graph::new(n, edges).unwrap()
        })
}

proptest! {
    #[test]
    fn round_trip_preserves_graph(g in arb_graph()) {
        let inst = DgpInstance::new(2, g.clone()).unwrap();
        let u = derive_udgp(&inst);
        let a = order_induced_assignment(&g);
        let back = reconstruct_graph(&u, &a).unwrap();
        prop_assert_eq!(back.n_vertices(), g.n_vertices());
        prop_assert_eq!(back.sorted_edges(), g.sorted_edges());
    }

    #[test]
    fn reconstructed_graph_upholds_invariants(g in arb_graph()) {
        // any valid assignment yields a graph that passes construction checks
        let inst = DgpInstance::new(2, g.clone()).unwrap();
        let u = derive_udgp(&inst);
        let a = order_induced_assignment(&g);
        let back = reconstruct_graph(&u, &a).unwrap();
        prop_assert_eq!(back.n_edges(), u.m());
        prop_assert!(back.edges().iter().all(|e| e.u < e.v && e.d > 0.0));
    }

    #[test]
    fn mde_lde_sandwich(g in arb_graph(), seed in 0u64..1000) {
        prop_assume!(g.n_edges() > 0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coords: Vec<Vec<f64>> = (0..g.n_vertices())
            .map(|_| vec![rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)])
            .collect();
        let x = Realization::new(coords).unwrap();
        let m = mde(&x, &g).unwrap();
        let l = lde(&x, &g).unwrap();
        let edges = g.n_edges() as f64;
        prop_assert!(l <= m + 1e-12);
        prop_assert!(m <= edges * l + 1e-12);
    }

    #[test]
    fn gphsim_self_and_relabel(g in arb_graph()) {
        prop_assert_eq!(gphsim(&g, &g), 1.0);
        let n = g.n_vertices();
        let relabeled = Graph::new(
            n,
            g.edges().iter().map(|e| (n + 1 - e.u, n + 1 - e.v, e.d)).collect::<Vec<_>>(),
        )
        .unwrap();
        prop_assert_eq!(gphsim(&g, &relabeled), 1.0);
    }
}

#[test]
fn dd_membership_implies_psd() {
    // matrices built to satisfy the dominance rows have nonnegative spectrum
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for trial in 0..50 {
        let n = rng.random_range(2..=8);
        let mut x = SymMatrix::zeros(n);
        for i in 0..n {
            for j in 0..i {
                x.set(i, j, rng.random_range(-2.0..2.0));
            }
        }
        for i in 0..n {
            let row_sum: f64 = (0..n).filter(|&j| j != i).map(|j| x.get(i, j).abs()).sum();
            x.set(i, i, row_sum + rng.random_range(0.0..1.0));
        }
        let min_eig = x.min_eigenvalue().unwrap();
        assert!(min_eig >= -1e-8, "trial {trial}: min eigenvalue {min_eig}");
    }
}

#[test]
fn gram_matrices_satisfy_dual_dd_rows() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for trial in 0..50 {
        let n = rng.random_range(2..=8);
        let k = rng.random_range(1..=3);
        let pts: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..k).map(|_| rng.random_range(-3.0..3.0)).collect())
            .collect();
        let gram = SymMatrix::from_fn(n, |i, j| {
            pts[i].iter().zip(&pts[j]).map(|(a, b)| a * b).sum()
        });
        // diagonal and X_ii + X_jj +/- 2X_ij rows, nonnegative up to roundoff
        for i in 0..n {
            assert!(gram.get(i, i) >= 0.0, "trial {trial}");
            for j in i + 1..n {
                let base = gram.get(i, i) + gram.get(j, j);
                let scale = 1.0 + base.abs();
                for sign in [2.0, -2.0] {
                    let v = base + sign * gram.get(i, j);
                    assert!(v >= -1e-14 * scale, "trial {trial}: row value {v}");
                }
            }
        }
    }
}

#[test]
fn generated_graphs_are_self_similar() {
    for name in GRAPH_TYPE_NAMES {
        let gt = GraphType::parse(name).unwrap();
        let params = GraphTypeParams {
            n: 5,
            ..GraphTypeParams::default()
        };
        let inst = gen_graph_type(gt, &params, false, 3).unwrap();
        assert_eq!(gphsim(&inst.graph, &inst.graph), 1.0, "type {name}");
    }
}
