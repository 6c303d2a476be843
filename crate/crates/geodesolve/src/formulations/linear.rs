//! Linear program representations and the matrix (cone) builders: the
//! mixed-integer unassigned reconstruction program and the polyhedral
//! relaxations of the assigned matrix formulations.

use super::smooth::{pair_list, YBlock};
use super::{BuildError, Rel, Sense};
use crate::linalg::SymMatrix;
use crate::types::{DgpInstance, UdgpInstance};
use std::collections::BTreeMap;

/// One linear row: sparse coefficients, relation, right-hand side.
#[derive(Debug, Clone)]
pub struct LinRow {
    pub coeffs: Vec<(usize, f64)>,
    pub rel: Rel,
    pub rhs: f64,
}

/// Index map for the packed symmetric matrix variable `X`: entry `(i, j)`
/// with `i <= j` lives at `offset + j(j+1)/2 + i`.
#[derive(Debug, Clone, Copy)]
pub struct SymIndex {
    pub n: usize,
    pub offset: usize,
}

impl SymIndex {
    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        self.offset + j * (j + 1) / 2 + i
    }

    pub fn len(&self) -> usize {
        self.n * (self.n + 1) / 2
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
}

/// Index map for the strictly-upper-triangular `T` matrix used by the
/// diagonally-dominant rows.
#[derive(Debug, Clone, Copy)]
pub struct UpperIndex {
    pub n: usize,
    pub offset: usize,
}

impl UpperIndex {
    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        debug_assert!(i < j);
        // position of (i, j), i < j, in lexicographic pair order
        self.offset + i * self.n - i * (i + 1) / 2 + (j - i - 1)
    }

    pub fn len(&self) -> usize {
        self.n * (self.n - 1) / 2
    }
}

/// Polyhedral approximations of the positive-semidefinite cone.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cone {
    /// Diagonally dominant matrices: an inner approximation.
    Dd,
    /// The dual of the DD cone: an outer approximation.
    DualDd,
}

impl Cone {
    pub fn name(&self) -> &'static str {
        match self {
            Cone::Dd => "dd",
            Cone::DualDd => "dualdd",
        }
    }
}

/// The three assigned matrix formulation kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixLpKind {
    System1,
    PushPull,
    PullPush,
}

impl MatrixLpKind {
    pub fn name(&self) -> &'static str {
        match self {
            MatrixLpKind::System1 => "system1",
            MatrixLpKind::PushPull => "pushpull",
            MatrixLpKind::PullPush => "pullpush",
        }
    }
}

/// A linear program with bounded variables and optional binary marks on the
/// assignment block.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub n_vars: usize,
    pub objective: Vec<(usize, f64)>,
    pub sense: Sense,
    pub bounds: Vec<(f64, f64)>,
    pub integral: Vec<bool>,
    pub rows: Vec<LinRow>,
    pub x_sym: Option<SymIndex>,
    pub t_upper: Option<UpperIndex>,
    pub y: Option<YBlock>,
}

impl LinearProgram {
    pub fn has_integrality(&self) -> bool {
        self.integral.iter().any(|&b| b)
    }
}

/// Appends the rows describing `X` in the chosen cone. For the DD cone a `T`
/// block must have been allocated (`|X_ij| <= T_ij` plus the dominance rows);
/// the dual cone needs only the diagonal and `X_ii + X_jj ± 2X_ij >= 0` rows.
fn append_cone_rows(rows: &mut Vec<LinRow>, cone: Cone, x: SymIndex, t: Option<UpperIndex>) {
    let n = x.n;
    match cone {
        Cone::Dd => {
            let t = t.expect("DD rows need the T block");
            for i in 0..n {
                let mut coeffs: Vec<(usize, f64)> = (0..n)
                    .filter(|&j| j != i)
                    .map(|j| (t.idx(i, j), 1.0))
                    .collect();
                coeffs.push((x.idx(i, i), -1.0));
                rows.push(LinRow {
                    coeffs,
                    rel: Rel::Le,
                    rhs: 0.0,
                });
            }
            for i in 0..n {
                for j in i + 1..n {
                    rows.push(LinRow {
                        coeffs: vec![(x.idx(i, j), 1.0), (t.idx(i, j), -1.0)],
                        rel: Rel::Le,
                        rhs: 0.0,
                    });
                    rows.push(LinRow {
                        coeffs: vec![(x.idx(i, j), -1.0), (t.idx(i, j), -1.0)],
                        rel: Rel::Le,
                        rhs: 0.0,
                    });
                }
            }
        }
        Cone::DualDd => {
            for i in 0..n {
                rows.push(LinRow {
                    coeffs: vec![(x.idx(i, i), 1.0)],
                    rel: Rel::Ge,
                    rhs: 0.0,
                });
            }
            for i in 0..n {
                for j in i + 1..n {
                    for sign in [1.0, -1.0] {
                        rows.push(LinRow {
                            coeffs: vec![
                                (x.idx(i, i), 1.0),
                                (x.idx(j, j), 1.0),
                                (x.idx(i, j), 2.0 * sign),
                            ],
                            rel: Rel::Ge,
                            rhs: 0.0,
                        });
                    }
                }
            }
        }
    }
}

/// The linearized edge expression `X_uu + X_vv - 2 X_uv` (0-based vertices).
fn edge_term(x: SymIndex, u: usize, v: usize) -> Vec<(usize, f64)> {
    vec![(x.idx(u, u), 1.0), (x.idx(v, v), 1.0), (x.idx(u, v), -2.0)]
}

/// Mixed-integer unassigned reconstruction program over a polyhedral cone:
/// binaries `y` pick which pair carries each distance, slack variables absorb
/// the l1 error, and big-M terms deactivate the rows of unassigned pairs.
/// `assignment_literal` swaps the assignment row senses as in the smooth
/// builders.
pub fn build_udgp_milp(
    cone: Cone,
    inst: &UdgpInstance,
    assignment_literal: bool,
) -> Result<LinearProgram, BuildError> {
    let n = inst.n_points;
    let m = inst.m();
    let pairs = pair_list(n);
    if m > pairs.len() {
        return Err(BuildError::TooManyDistances {
            m,
            pairs: pairs.len(),
        });
    }
    let big_m = inst.big_m();

    let x = SymIndex { n, offset: 0 };
    let mut bounds = vec![(f64::NEG_INFINITY, f64::INFINITY); x.len()];
    let t = match cone {
        Cone::Dd => {
            let t = UpperIndex {
                n,
                offset: bounds.len(),
            };
            bounds.extend(vec![(f64::NEG_INFINITY, f64::INFINITY); t.len()]);
            Some(t)
        }
        Cone::DualDd => None,
    };
    let sp_off = bounds.len();
    bounds.extend(vec![(0.0, f64::INFINITY); m]);
    let sm_off = bounds.len();
    bounds.extend(vec![(0.0, f64::INFINITY); m]);
    let y = YBlock {
        offset: bounds.len(),
        m,
        pairs: pairs.clone(),
    };
    bounds.extend(vec![(0.0, 1.0); y.len()]);

    let mut integral = vec![false; bounds.len()];
    integral[y.offset..y.offset + y.len()].fill(true);

    let mut rows = Vec::new();
    for (p, &(i1, j1)) in pairs.iter().enumerate() {
        let (i, j) = (i1 - 1, j1 - 1);
        for (l, &delta) in inst.distances.iter().enumerate() {
            let d2 = delta * delta;
            // X_ii + X_jj - 2X_ij - s+_l + M y <= d2 + M
            let mut up = edge_term(x, i, j);
            up.push((sp_off + l, -1.0));
            up.push((y.index(p, l), big_m));
            rows.push(LinRow {
                coeffs: up,
                rel: Rel::Le,
                rhs: d2 + big_m,
            });
            // -(X_ii + X_jj - 2X_ij) - s-_l + M y <= -d2 + M
            let mut dn: Vec<(usize, f64)> = edge_term(x, i, j)
                .into_iter()
                .map(|(c, v)| (c, -v))
                .collect();
            dn.push((sm_off + l, -1.0));
            dn.push((y.index(p, l), big_m));
            rows.push(LinRow {
                coeffs: dn,
                rel: Rel::Le,
                rhs: -d2 + big_m,
            });
        }
    }

    // assignment rows
    for l in 0..m {
        let coeffs: Vec<(usize, f64)> = (0..pairs.len()).map(|p| (y.index(p, l), 1.0)).collect();
        let rel = if assignment_literal { Rel::Le } else { Rel::Eq };
        rows.push(LinRow {
            coeffs,
            rel,
            rhs: 1.0,
        });
    }
    for p in 0..pairs.len() {
        let coeffs: Vec<(usize, f64)> = (0..m).map(|l| (y.index(p, l), 1.0)).collect();
        let rel = if assignment_literal { Rel::Eq } else { Rel::Le };
        rows.push(LinRow {
            coeffs,
            rel,
            rhs: 1.0,
        });
    }

    append_cone_rows(&mut rows, cone, x, t);

    let objective: Vec<(usize, f64)> = (0..m)
        .map(|l| (sp_off + l, 1.0))
        .chain((0..m).map(|l| (sm_off + l, 1.0)))
        .collect();

    Ok(LinearProgram {
        n_vars: bounds.len(),
        objective,
        sense: Sense::Min,
        bounds,
        integral,
        rows,
        x_sym: Some(x),
        t_upper: t,
        y: Some(y),
    })
}

/// Assigned matrix formulation over a polyhedral cone. With the DD cone the
/// `System1` edge equalities are relaxed to `>=` to keep the inner
/// approximation from going infeasible too often.
pub fn build_matrix_lp(kind: MatrixLpKind, cone: Cone, inst: &DgpInstance) -> LinearProgram {
    let n = inst.graph.n_vertices();
    let m = inst.graph.n_edges();
    let x = SymIndex { n, offset: 0 };
    let mut bounds = vec![(f64::NEG_INFINITY, f64::INFINITY); x.len()];
    let t = match cone {
        Cone::Dd => {
            let t = UpperIndex {
                n,
                offset: bounds.len(),
            };
            bounds.extend(vec![(f64::NEG_INFINITY, f64::INFINITY); t.len()]);
            Some(t)
        }
        Cone::DualDd => None,
    };

    let mut rows = Vec::new();
    let mut objective: Vec<(usize, f64)> = Vec::new();
    let sense;

    match kind {
        MatrixLpKind::System1 => {
            let sp_off = bounds.len();
            bounds.extend(vec![(0.0, f64::INFINITY); m]);
            let sm_off = bounds.len();
            bounds.extend(vec![(0.0, f64::INFINITY); m]);
            for (ei, e) in inst.graph.edges().iter().enumerate() {
                let mut coeffs = edge_term(x, e.u - 1, e.v - 1);
                coeffs.push((sp_off + ei, -1.0));
                coeffs.push((sm_off + ei, 1.0));
                let rel = match cone {
                    Cone::Dd => Rel::Ge,
                    Cone::DualDd => Rel::Eq,
                };
                rows.push(LinRow {
                    coeffs,
                    rel,
                    rhs: e.d * e.d,
                });
            }
            objective = (0..m)
                .map(|i| (sp_off + i, 1.0))
                .chain((0..m).map(|i| (sm_off + i, 1.0)))
                .collect();
            sense = Sense::Min;
        }
        MatrixLpKind::PushPull | MatrixLpKind::PullPush => {
            let mut obj_map: BTreeMap<usize, f64> = BTreeMap::new();
            for e in inst.graph.edges() {
                for (c, v) in edge_term(x, e.u - 1, e.v - 1) {
                    *obj_map.entry(c).or_insert(0.0) += v;
                }
                let rel = if kind == MatrixLpKind::PushPull {
                    Rel::Le
                } else {
                    Rel::Ge
                };
                rows.push(LinRow {
                    coeffs: edge_term(x, e.u - 1, e.v - 1),
                    rel,
                    rhs: e.d * e.d,
                });
            }
            objective.extend(obj_map);
            sense = if kind == MatrixLpKind::PushPull {
                Sense::Max
            } else {
                Sense::Min
            };
        }
    }

    append_cone_rows(&mut rows, cone, x, t);

    let n_vars = bounds.len();
    LinearProgram {
        n_vars,
        objective,
        sense,
        bounds,
        integral: vec![false; n_vars],
        rows,
        x_sym: Some(x),
        t_upper: t,
        y: None,
    }
}

/// Reads the symmetric matrix block out of an LP solution vector.
pub fn lp_solution_to_sym(values: &[f64], x: SymIndex) -> SymMatrix {
    SymMatrix::from_fn(x.n, |i, j| values[x.idx(i, j)])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row_has(rows: &[LinRow], coeffs: &[(usize, f64)], rel: Rel, rhs: f64) -> bool {
        rows.iter().any(|r| {
            if r.rel != rel || (r.rhs - rhs).abs() > 1e-12 || r.coeffs.len() != coeffs.len() {
                return false;
            }
            let mut a = r.coeffs.clone();
            a.sort_by_key(|&(c, _)| c);
            let mut b = coeffs.to_vec();
            b.sort_by_key(|&(c, _)| c);
            a.iter()
                .zip(&b)
                .all(|(&(c1, v1), &(c2, v2))| c1 == c2 && (v1 - v2).abs() < 1e-12)
        })
    }

    #[test]
    fn big_m_values() {
        let inst = UdgpInstance::new(2, 4, vec![2.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert_eq!(inst.big_m(), 256.0);
        let one = UdgpInstance::new(1, 2, vec![1.0]).unwrap();
        assert_eq!(one.big_m(), 1.0);
    }

    #[test]
    fn milp_binary_count() {
        // n = 3, m = 3: 3 pairs x 3 distances
        let inst = UdgpInstance::new(2, 3, vec![3.0, 4.0, 5.0]).unwrap();
        let lp = build_udgp_milp(Cone::DualDd, &inst, false).unwrap();
        assert_eq!(lp.integral.iter().filter(|&&b| b).count(), 9);
    }

    #[test]
    fn milp_rejects_excess_distances() {
        let inst = UdgpInstance::new(2, 3, vec![1.0; 4]).unwrap();
        assert!(matches!(
            build_udgp_milp(Cone::DualDd, &inst, false),
            Err(BuildError::TooManyDistances { m: 4, pairs: 3 })
        ));
    }

    #[test]
    fn dd_rows_for_n2() {
        // T_12 <= X_11, T_12 <= X_22, -T <= X <= T
        let g = crate::types::Graph::new(2, [(1, 2, 1.0)]).unwrap();
        let inst = DgpInstance::new(1, g).unwrap();
        let lp = build_matrix_lp(MatrixLpKind::PushPull, Cone::Dd, &inst);
        let x = lp.x_sym.unwrap();
        let t = lp.t_upper.unwrap();
        let t12 = t.idx(0, 1);
        assert!(row_has(
            &lp.rows,
            &[(t12, 1.0), (x.idx(0, 0), -1.0)],
            Rel::Le,
            0.0
        ));
        assert!(row_has(
            &lp.rows,
            &[(t12, 1.0), (x.idx(1, 1), -1.0)],
            Rel::Le,
            0.0
        ));
        assert!(row_has(
            &lp.rows,
            &[(x.idx(0, 1), 1.0), (t12, -1.0)],
            Rel::Le,
            0.0
        ));
        assert!(row_has(
            &lp.rows,
            &[(x.idx(0, 1), -1.0), (t12, -1.0)],
            Rel::Le,
            0.0
        ));
    }

    #[test]
    fn dual_dd_rows_for_n2() {
        let g = crate::types::Graph::new(2, [(1, 2, 1.0)]).unwrap();
        let inst = DgpInstance::new(1, g).unwrap();
        let lp = build_matrix_lp(MatrixLpKind::PushPull, Cone::DualDd, &inst);
        let x = lp.x_sym.unwrap();
        assert!(row_has(&lp.rows, &[(x.idx(0, 0), 1.0)], Rel::Ge, 0.0));
        assert!(row_has(&lp.rows, &[(x.idx(1, 1), 1.0)], Rel::Ge, 0.0));
        assert!(row_has(
            &lp.rows,
            &[(x.idx(0, 0), 1.0), (x.idx(1, 1), 1.0), (x.idx(0, 1), 2.0)],
            Rel::Ge,
            0.0
        ));
        assert!(row_has(
            &lp.rows,
            &[(x.idx(0, 0), 1.0), (x.idx(1, 1), 1.0), (x.idx(0, 1), -2.0)],
            Rel::Ge,
            0.0
        ));
    }

    #[test]
    fn dd_system1_relaxes_to_ge() {
        let g = crate::types::Graph::new(2, [(1, 2, 2.0)]).unwrap();
        let inst = DgpInstance::new(1, g).unwrap();
        let dd = build_matrix_lp(MatrixLpKind::System1, Cone::Dd, &inst);
        let edge_rows: Vec<&LinRow> = dd
            .rows
            .iter()
            .filter(|r| (r.rhs - 4.0).abs() < 1e-12)
            .collect();
        assert!(!edge_rows.is_empty());
        assert!(edge_rows.iter().all(|r| r.rel == Rel::Ge));

        let dual = build_matrix_lp(MatrixLpKind::System1, Cone::DualDd, &inst);
        let edge_rows: Vec<&LinRow> = dual
            .rows
            .iter()
            .filter(|r| (r.rhs - 4.0).abs() < 1e-12)
            .collect();
        assert!(edge_rows.iter().all(|r| r.rel == Rel::Eq));
    }

    #[test]
    fn dualdd_pushpull_single_edge_optimum() {
        // max X_11 + X_22 - 2X_12 subject to the same term <= 1 and the
        // dual-cone rows: the edge row binds, optimum 1
        let g = crate::types::Graph::new(2, [(1, 2, 1.0)]).unwrap();
        let inst = DgpInstance::new(2, g).unwrap();
        let lp = build_matrix_lp(MatrixLpKind::PushPull, Cone::DualDd, &inst);
        let sol = crate::lp_solver::solve_lp(&lp).unwrap();
        assert!(
            (sol.objective - 1.0).abs() <= 1e-9,
            "objective {}",
            sol.objective
        );
    }

    #[test]
    fn upper_index_enumerates_pairs() {
        let t = UpperIndex { n: 4, offset: 10 };
        let mut seen = std::collections::HashSet::new();
        for i in 0..4 {
            for j in i + 1..4 {
                assert!(seen.insert(t.idx(i, j)));
            }
        }
        assert_eq!(seen.len(), t.len());
        assert!(seen.iter().all(|&i| i >= 10 && i < 10 + t.len()));
    }
}
