//! Semidefinite problem descriptions for the PSD-cone matrix formulations.

use super::Sense;
use crate::types::DgpInstance;

/// One affine row over the symmetric matrix entries (each unordered entry
/// counted once, upper-triangle convention) plus optional nonnegative
/// auxiliary scalars.
#[derive(Debug, Clone)]
pub struct SdpRow {
    /// `(i, j, coeff)` with `i <= j`; the coefficient multiplies `X_ij`.
    pub coeffs: Vec<(usize, usize, f64)>,
    pub aux: Vec<(usize, f64)>,
    pub rhs: f64,
}

/// `min/max <obj, X> (+ obj_aux . s)` subject to affine equality rows and
/// `X` positive semidefinite, `s >= 0`.
#[derive(Debug, Clone)]
pub struct SdpProblem {
    pub n: usize,
    pub rows: Vec<SdpRow>,
    pub obj_x: Vec<(usize, usize, f64)>,
    pub obj_aux: Vec<(usize, f64)>,
    pub n_aux: usize,
    pub sense: Sense,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdpKind {
    /// Maximize `trace(X)` subject to the edge equality rows.
    TraceMax,
    /// Maximize the edge terms plus a small trace regularizer; the weighted
    /// variant observed to behave slightly better on molecular graphs.
    ProteinObj,
    /// Minimize the l1 edge slack, edge rows carry `s+ - s-`.
    System1,
}

impl SdpKind {
    pub fn name(&self) -> &'static str {
        match self {
            SdpKind::TraceMax => "trace_max",
            SdpKind::ProteinObj => "protein_obj",
            SdpKind::System1 => "system1",
        }
    }
}

/// Weight of the trace regularizer in [`SdpKind::ProteinObj`].
pub const DEFAULT_TRACE_WEIGHT: f64 = 0.1;

/// Builds the PSD-cone matrix formulation of an assigned instance.
pub fn build_sdp(kind: SdpKind, inst: &DgpInstance, trace_weight: f64) -> SdpProblem {
    let n = inst.graph.n_vertices();
    let edges = inst.graph.edges();
    let m = edges.len();

    let edge_coeffs = |u: usize, v: usize| -> Vec<(usize, usize, f64)> {
        vec![(u, u, 1.0), (v, v, 1.0), (u.min(v), u.max(v), -2.0)]
    };

    match kind {
        SdpKind::TraceMax | SdpKind::ProteinObj => {
            let rows = edges
                .iter()
                .map(|e| SdpRow {
                    coeffs: edge_coeffs(e.u - 1, e.v - 1),
                    aux: vec![],
                    rhs: e.d * e.d,
                })
                .collect();
            let mut obj: Vec<(usize, usize, f64)> = (0..n).map(|i| (i, i, 1.0)).collect();
            if kind == SdpKind::ProteinObj {
                // edge terms + weight * trace, accumulated entrywise
                let mut map = std::collections::BTreeMap::new();
                for i in 0..n {
                    map.insert((i, i), trace_weight);
                }
                for e in edges {
                    for (i, j, c) in edge_coeffs(e.u - 1, e.v - 1) {
                        *map.entry((i, j)).or_insert(0.0) += c;
                    }
                }
                obj = map.into_iter().map(|((i, j), c)| (i, j, c)).collect();
            }
            SdpProblem {
                n,
                rows,
                obj_x: obj,
                obj_aux: vec![],
                n_aux: 0,
                sense: Sense::Max,
            }
        }
        SdpKind::System1 => {
            // aux block: s+ at l, s- at m + l
            let rows = edges
                .iter()
                .enumerate()
                .map(|(ei, e)| SdpRow {
                    coeffs: edge_coeffs(e.u - 1, e.v - 1),
                    aux: vec![(ei, -1.0), (m + ei, 1.0)],
                    rhs: e.d * e.d,
                })
                .collect();
            let obj_aux = (0..2 * m).map(|i| (i, 1.0)).collect();
            SdpProblem {
                n,
                rows,
                obj_x: vec![],
                obj_aux,
                n_aux: 2 * m,
                sense: Sense::Min,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::Graph;

    #[test]
    fn trace_max_rows_single_edge() {
        let g = Graph::new(2, [(1, 2, 2.0)]).unwrap();
        let p = build_sdp(SdpKind::TraceMax, &DgpInstance::new(1, g).unwrap(), 0.1);
        assert_eq!(p.rows.len(), 1);
        assert_eq!(p.rows[0].rhs, 4.0);
        assert_eq!(p.n_aux, 0);
        assert_eq!(p.sense, Sense::Max);
        // X = [[1,-1],[-1,1]] satisfies the row: 1 + 1 - 2(-1) = 4
        let x = |i: usize, j: usize| if i == j { 1.0 } else { -1.0 };
        let lhs: f64 = p.rows[0].coeffs.iter().map(|&(i, j, c)| c * x(i, j)).sum();
        assert!((lhs - 4.0).abs() < 1e-12);
    }

    #[test]
    fn feasible_right_triangle_gram() {
        // (3,4,5) right triangle: Gram of (0,0), (3,0), (3,4) satisfies every row
        let g = Graph::new(3, [(1, 2, 3.0), (2, 3, 4.0), (1, 3, 5.0)]).unwrap();
        let p = build_sdp(SdpKind::TraceMax, &DgpInstance::new(2, g).unwrap(), 0.1);
        let pts = [[0.0, 0.0], [3.0, 0.0], [3.0, 4.0]];
        let gram = |i: usize, j: usize| -> f64 { pts[i][0] * pts[j][0] + pts[i][1] * pts[j][1] };
        for row in &p.rows {
            let lhs: f64 = row.coeffs.iter().map(|&(i, j, c)| c * gram(i, j)).sum();
            assert!((lhs - row.rhs).abs() < 1e-9);
        }
    }

    #[test]
    fn system1_has_slack_block() {
        let g = Graph::new(2, [(1, 2, 1.0)]).unwrap();
        let p = build_sdp(SdpKind::System1, &DgpInstance::new(1, g).unwrap(), 0.1);
        assert_eq!(p.n_aux, 2);
        assert_eq!(p.rows[0].aux, vec![(0, -1.0), (1, 1.0)]);
        assert_eq!(p.sense, Sense::Min);
    }

    #[test]
    fn protein_objective_includes_trace_weight() {
        let g = Graph::new(2, [(1, 2, 1.0)]).unwrap();
        let p = build_sdp(SdpKind::ProteinObj, &DgpInstance::new(1, g).unwrap(), 0.1);
        // diagonal entries: edge coefficient 1 plus trace weight 0.1
        let diag: Vec<f64> = p
            .obj_x
            .iter()
            .filter(|&&(i, j, _)| i == j)
            .map(|&(_, _, c)| c)
            .collect();
        assert_eq!(diag, vec![1.1, 1.1]);
    }
}
