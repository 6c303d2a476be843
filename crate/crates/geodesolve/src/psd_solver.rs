//! Small-scale semidefinite engine: Dykstra alternating projections between
//! the PSD cone (eigenvalue clipping) and the affine row set (least squares),
//! with the linear objective handled by a small interleaved gradient step.
//!
//! Coordinates are packed so that the Euclidean norm of the variable vector
//! equals the Frobenius norm of the matrix (off-diagonal entries scaled by
//! sqrt(2)); both projections then live in the same geometry.
//!
//! Infeasibility is reported heuristically: when the best affine residual of
//! a cone-feasible iterate stops improving for a full stall window while
//! still above tolerance. No certificate is produced.

// dense kernels index in both dimensions; iterator forms obscure them
#![allow(clippy::needless_range_loop)]

use crate::formulations::{SdpProblem, Sense};
use crate::linalg::{eigen_sym, LinalgError, Mat, SymMatrix};
use crate::types::SolveStatus;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SdpError {
    #[error(
        "matrix dimension {n} exceeds the configured cap {cap}; use a polyhedral cone instead"
    )]
    DimensionCap { n: usize, cap: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone)]
pub struct SdpConfig {
    pub max_iters: usize,
    pub tol: f64,
    pub time_limit_s: f64,
    pub dim_cap: usize,
    /// Iterations without relative improvement before declaring a stall.
    pub stall_window: usize,
    /// Base length of the interleaved objective step; decays over iterations.
    pub objective_step: f64,
    /// Number of leading iterations that take objective steps; the remainder
    /// of the budget runs pure feasibility projections so the residual can
    /// actually reach tolerance.
    pub objective_iters: usize,
}

impl Default for SdpConfig {
    fn default() -> Self {
        SdpConfig {
            max_iters: 20_000,
            tol: 1e-7,
            time_limit_s: f64::INFINITY,
            dim_cap: 300,
            stall_window: 200,
            objective_step: 0.1,
            objective_iters: 500,
        }
    }
}

#[derive(Debug)]
pub struct SdpOutcome {
    pub x: SymMatrix,
    pub aux: Vec<f64>,
    pub status: SolveStatus,
    /// Worst affine row violation of the returned (cone-feasible) point.
    pub residual: f64,
    pub iterations: usize,
    /// Incumbent residual after each iteration; non-increasing.
    pub residual_trace: Vec<f64>,
}

const SQRT2: f64 = std::f64::consts::SQRT_2;

#[inline]
fn pack_index(i: usize, j: usize) -> usize {
    // i <= j
    j * (j + 1) / 2 + i
}

struct Packing {
    n: usize,
    n_x: usize,
    n_aux: usize,
}

impl Packing {
    fn len(&self) -> usize {
        self.n_x + self.n_aux
    }

    fn to_matrix(&self, v: &[f64]) -> SymMatrix {
        SymMatrix::from_fn(self.n, |i, j| {
            let (a, b) = (i.min(j), i.max(j));
            let raw = v[pack_index(a, b)];
            if a == b {
                raw
            } else {
                raw / SQRT2
            }
        })
    }

    fn pack(&self, m: &SymMatrix, out: &mut [f64]) {
        for j in 0..self.n {
            for i in 0..=j {
                out[pack_index(i, j)] = if i == j {
                    m.get(i, i)
                } else {
                    SQRT2 * m.get(i, j)
                };
            }
        }
    }
}

/// Solves an SDP by alternating projections. Returns the best cone-feasible
/// iterate with `Optimal`, `Infeasible` (stalled above tolerance),
/// or `TimeLimit` status.
pub fn solve_sdp(p: &SdpProblem, cfg: &SdpConfig) -> Result<SdpOutcome, SdpError> {
    if p.n > cfg.dim_cap {
        return Err(SdpError::DimensionCap {
            n: p.n,
            cap: cfg.dim_cap,
        });
    }
    let start = Instant::now();
    let pack = Packing {
        n: p.n,
        n_x: p.n * (p.n + 1) / 2,
        n_aux: p.n_aux,
    };
    let nv = pack.len();
    let nr = p.rows.len();

    // affine rows in packed coordinates
    let mut rows: Vec<Vec<f64>> = vec![vec![0.0; nv]; nr];
    let mut rhs = vec![0.0; nr];
    for (r, row) in p.rows.iter().enumerate() {
        for &(i, j, c) in &row.coeffs {
            debug_assert!(i <= j);
            rows[r][pack_index(i, j)] += if i == j { c } else { c / SQRT2 };
        }
        for &(k, c) in &row.aux {
            rows[r][pack.n_x + k] += c;
        }
        rhs[r] = row.rhs;
    }

    // pseudo-inverse of A A^T for the least-squares projection
    let gram = SymMatrix::from_fn(nr, |a, b| dot(&rows[a], &rows[b]));
    let pinv = pseudo_inverse(&gram)?;

    // objective gradient in packed coordinates (minimization orientation
    // flipped so that the step always improves the stated objective)
    let flip = match p.sense {
        Sense::Min => -1.0,
        Sense::Max => 1.0,
    };
    let mut obj_dir = vec![0.0; nv];
    for &(i, j, c) in &p.obj_x {
        obj_dir[pack_index(i, j)] += flip * if i == j { c } else { c / SQRT2 };
    }
    for &(k, c) in &p.obj_aux {
        obj_dir[pack.n_x + k] += flip * c;
    }
    let obj_norm = dot(&obj_dir, &obj_dir).sqrt();
    if obj_norm > 0.0 {
        for v in obj_dir.iter_mut() {
            *v /= obj_norm;
        }
    }
    let step_scale =
        cfg.objective_step * (1.0 + rhs.iter().fold(0.0f64, |m, v| m.max(v.abs()))).sqrt();

    let residual_of = |v: &[f64]| -> f64 {
        rows.iter()
            .zip(&rhs)
            .map(|(row, &b)| (dot(row, v) - b).abs())
            .fold(0.0f64, f64::max)
    };
    let project_affine = |v: &mut Vec<f64>| {
        if nr == 0 {
            return;
        }
        let resid: Vec<f64> = rows
            .iter()
            .zip(&rhs)
            .map(|(row, &b)| dot(row, v) - b)
            .collect();
        let mut w = vec![0.0; nr];
        for a in 0..nr {
            w[a] = (0..nr).map(|b| pinv.get(a, b) * resid[b]).sum();
        }
        for (a, row) in rows.iter().enumerate() {
            if w[a] != 0.0 {
                for (vi, ri) in v.iter_mut().zip(row) {
                    *vi -= w[a] * ri;
                }
            }
        }
    };

    let mut v = vec![0.0; nv];
    let mut corr = vec![0.0; nv]; // Dykstra correction for the cone projection
    let mut best_v = v.clone();
    let mut best_res = f64::INFINITY;
    let mut trace = Vec::new();
    let mut status = SolveStatus::TimeLimit;
    let mut window_anchor = f64::INFINITY;
    let mut iters = 0;

    for t in 0..cfg.max_iters {
        iters = t + 1;
        if start.elapsed().as_secs_f64() > cfg.time_limit_s {
            status = SolveStatus::TimeLimit;
            break;
        }
        // objective nudge during the shaping phase, vanishing over time
        if obj_norm > 0.0 && t < cfg.objective_iters {
            let eta = step_scale / (1.0 + 0.1 * t as f64);
            for (vi, g) in v.iter_mut().zip(&obj_dir) {
                *vi += eta * g;
            }
        }
        // cone projection with Dykstra correction
        let mut y: Vec<f64> = v.iter().zip(&corr).map(|(a, b)| a + b).collect();
        let m = pack.to_matrix(&y[..pack.n_x]);
        let e = eigen_sym(&m)?;
        let mut clipped = SymMatrix::zeros(p.n);
        for (k, &lam) in e.eigenvalues.iter().enumerate() {
            if lam <= 0.0 {
                continue;
            }
            for i in 0..p.n {
                for j in 0..=i {
                    let add = lam * e.eigenvectors.get(i, k) * e.eigenvectors.get(j, k);
                    clipped.set(i, j, clipped.get(i, j) + add);
                }
            }
        }
        pack.pack(&clipped, &mut y[..pack.n_x]);
        for a in y[pack.n_x..].iter_mut() {
            *a = a.max(0.0);
        }
        for ((c, vi), yi) in corr.iter_mut().zip(&v).zip(&y) {
            *c += vi - yi;
        }

        // feasibility bookkeeping on the cone-feasible point
        let res = residual_of(&y);
        if res < best_res {
            best_res = res;
            best_v = y.clone();
        }
        trace.push(best_res);
        if best_res <= cfg.tol {
            status = SolveStatus::Optimal;
            break;
        }
        // stall detection only once the objective phase is over, so slow
        // shaping cannot masquerade as infeasibility
        if t >= cfg.objective_iters && (t + 1) % cfg.stall_window == 0 {
            if window_anchor - best_res <= 1e-10 * (1.0 + best_res) {
                status = SolveStatus::Infeasible;
                break;
            }
            window_anchor = best_res;
        }

        // back onto the affine set
        v = y;
        project_affine(&mut v);
    }

    let x = pack.to_matrix(&best_v[..pack.n_x]);
    let aux = best_v[pack.n_x..].to_vec();
    Ok(SdpOutcome {
        x,
        aux,
        status,
        residual: best_res,
        iterations: iters,
        residual_trace: trace,
    })
}

fn pseudo_inverse(m: &SymMatrix) -> Result<Mat, SdpError> {
    let n = m.n();
    if n == 0 {
        return Ok(Mat::zeros(0, 0));
    }
    let e = eigen_sym(m)?;
    let lam_max = e.eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
    let cut = 1e-12 * lam_max.max(1.0);
    let mut out = Mat::zeros(n, n);
    for k in 0..n {
        let lam = e.eigenvalues[k];
        if lam <= cut {
            continue;
        }
        let inv = 1.0 / lam;
        for i in 0..n {
            for j in 0..n {
                out.set(
                    i,
                    j,
                    out.get(i, j) + inv * e.eigenvectors.get(i, k) * e.eigenvectors.get(j, k),
                );
            }
        }
    }
    Ok(out)
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulations::{build_sdp, SdpKind};
    use crate::types::{DgpInstance, Graph};

    #[test]
    fn single_edge_equality() {
        let g = Graph::new(2, [(1, 2, 2.0)]).unwrap();
        let p = build_sdp(SdpKind::TraceMax, &DgpInstance::new(1, g).unwrap(), 0.1);
        let out = solve_sdp(&p, &SdpConfig::default()).unwrap();
        assert_eq!(out.status, SolveStatus::Optimal);
        let term = out.x.get(0, 0) + out.x.get(1, 1) - 2.0 * out.x.get(0, 1);
        assert!((term - 4.0).abs() <= 1e-6, "edge term {term}");
        assert!(out.x.min_eigenvalue().unwrap() >= -1e-7);
    }

    #[test]
    fn metric_violation_is_infeasible() {
        // triangle with distances (3,1,1) cannot be realized in any dimension
        let g = Graph::new(3, [(1, 2, 3.0), (2, 3, 1.0), (1, 3, 1.0)]).unwrap();
        let p = build_sdp(SdpKind::TraceMax, &DgpInstance::new(2, g).unwrap(), 0.1);
        let out = solve_sdp(&p, &SdpConfig::default()).unwrap();
        assert_eq!(
            out.status,
            SolveStatus::Infeasible,
            "residual {}",
            out.residual
        );
        assert!(out.residual > 1e-3);
    }

    #[test]
    fn right_triangle_feasible() {
        let g = Graph::new(3, [(1, 2, 3.0), (2, 3, 4.0), (1, 3, 5.0)]).unwrap();
        let p = build_sdp(SdpKind::TraceMax, &DgpInstance::new(2, g).unwrap(), 0.1);
        let out = solve_sdp(&p, &SdpConfig::default()).unwrap();
        assert_eq!(out.status, SolveStatus::Optimal);
        assert!(out.x.min_eigenvalue().unwrap() >= -1e-7);
        for row in &p.rows {
            let lhs: f64 = row
                .coeffs
                .iter()
                .map(|&(i, j, c)| c * out.x.get(i, j))
                .sum();
            assert!(
                (lhs - row.rhs).abs() <= 1e-6,
                "row residual {}",
                (lhs - row.rhs).abs()
            );
        }
    }

    #[test]
    fn residual_trace_non_increasing() {
        let g = Graph::new(3, [(1, 2, 3.0), (2, 3, 1.0), (1, 3, 1.0)]).unwrap();
        let p = build_sdp(SdpKind::System1, &DgpInstance::new(2, g).unwrap(), 0.1);
        let out = solve_sdp(&p, &SdpConfig::default()).unwrap();
        for w in out.residual_trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-15);
        }
        // slacks make the l1 system feasible even for the metric violation
        assert_eq!(out.status, SolveStatus::Optimal);
    }

    #[test]
    fn dimension_cap_enforced() {
        let g = Graph::new(2, [(1, 2, 1.0)]).unwrap();
        let p = build_sdp(SdpKind::TraceMax, &DgpInstance::new(1, g).unwrap(), 0.1);
        let cfg = SdpConfig {
            dim_cap: 1,
            ..SdpConfig::default()
        };
        assert!(matches!(
            solve_sdp(&p, &cfg),
            Err(SdpError::DimensionCap { n: 2, cap: 1 })
        ));
    }
}
