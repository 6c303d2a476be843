//! Local nonlinear solver and the multistart matheuristic built on top of it.
//!
//! The engine is an augmented Lagrangian on the equality constraints with a
//! quadratic penalty on the inequalities; inner iterations are a projected
//! limited-memory quasi-Newton method with Armijo backtracking. One mechanism
//! covers every smooth kind in the formulation registry.

use crate::formulations::{extract_assignment, Sense, SmoothProgram};
use crate::metrics::{lde, mde};
use crate::types::{reconstruct_graph, SolveReport, SolveStatus};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error(
        "program carries integrality marks; the local solver handles continuous programs only"
    )]
    UnsupportedProgram,
    #[error("starting point has {got} entries, program has {want} variables")]
    DimensionMismatch { got: usize, want: usize },
    #[error("invalid solver configuration: {0}")]
    BadConfig(&'static str),
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub max_outer: usize,
    pub max_inner: usize,
    pub penalty_init: f64,
    pub penalty_growth: f64,
    pub tol_kkt: f64,
    pub tol_feas: f64,
    pub seed: u64,
    pub restarts: usize,
    pub time_limit_s: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_outer: 30,
            max_inner: 500,
            penalty_init: 10.0,
            penalty_growth: 10.0,
            tol_kkt: 1e-6,
            tol_feas: 1e-8,
            seed: 0,
            restarts: 10,
            time_limit_s: f64::INFINITY,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolveError> {
        if self.penalty_growth <= 1.0 {
            return Err(SolveError::BadConfig("penalty_growth must exceed 1"));
        }
        if self.penalty_init <= 0.0
            || self.tol_kkt <= 0.0
            || self.tol_feas <= 0.0
            || self.time_limit_s <= 0.0
        {
            return Err(SolveError::BadConfig(
                "tolerances and limits must be positive",
            ));
        }
        Ok(())
    }
}

const LBFGS_MEMORY: usize = 8;
const PENALTY_CAP: f64 = 1e12;
const MULTIPLIER_CAP: f64 = 1e10;

struct Incumbent {
    x: Vec<f64>,
    violation: f64,
    objective: f64, // internal (minimization) orientation
}

impl Incumbent {
    fn better_than(&self, other: &Incumbent, tol_feas: f64) -> bool {
        let self_feas = self.violation <= tol_feas;
        let other_feas = other.violation <= tol_feas;
        match (self_feas, other_feas) {
            (true, true) => self.objective < other.objective,
            (true, false) => true,
            (false, true) => false,
            (false, false) => {
                self.violation < other.violation
                    || (self.violation == other.violation && self.objective < other.objective)
            }
        }
    }
}

/// Outcome of [`solve_local_traced`]: the report plus the smallest maximum
/// constraint violation achieved up to the end of each outer iteration
/// (non-increasing by construction), the returned point, and that point's
/// final violation in the solver's own (scaled) measure.
pub struct LocalTrace {
    pub report: SolveReport,
    pub outer_violations: Vec<f64>,
    pub point: Option<Vec<f64>>,
    pub violation: f64,
}

/// Runs the local solver from `x0`. Returns a report whose objective is
/// never worse than at a feasible `x0`, and whose status records whether the
/// KKT/feasibility tolerances were met.
pub fn solve_local(
    p: &SmoothProgram,
    x0: &[f64],
    cfg: &SolverConfig,
) -> Result<SolveReport, SolveError> {
    solve_local_traced(p, x0, cfg).map(|t| t.report)
}

/// [`solve_local`] with the per-outer-iteration violation trace and the raw
/// variable vector of the returned point.
pub fn solve_local_traced(
    p: &SmoothProgram,
    x0: &[f64],
    cfg: &SolverConfig,
) -> Result<LocalTrace, SolveError> {
    cfg.validate()?;
    if p.has_integrality() {
        return Err(SolveError::UnsupportedProgram);
    }
    if x0.len() != p.n_vars {
        return Err(SolveError::DimensionMismatch {
            got: x0.len(),
            want: p.n_vars,
        });
    }
    let start = Instant::now();

    let flip = match p.sense {
        Sense::Min => 1.0,
        Sense::Max => -1.0,
    };
    let internal_obj = |x: &[f64]| flip * p.objective.eval(x);

    let mut x: Vec<f64> = x0
        .iter()
        .zip(&p.bounds)
        .map(|(&v, &(lo, hi))| v.clamp(lo, hi))
        .collect();

    let n_eq = p.eq_constraints.len();
    let mut lambda = vec![0.0; n_eq];
    let mut mu = cfg.penalty_init;

    // constraints are scaled by their magnitude and steepness at the
    // starting point (floored at one), so a row whose natural scale is huge
    // cannot blow up the quadratic penalty; feasibility is then relative for
    // such rows and plain absolute for everything well-scaled
    let row_scale = |f: &crate::formulations::DiffFn, x: &[f64]| -> f64 {
        let grad_inf = f.gradient(x).iter().fold(0.0f64, |m, v| m.max(v.abs()));
        f.eval(x).abs().max(grad_inf).max(1.0)
    };
    let eq_scale: Vec<f64> = p.eq_constraints.iter().map(|h| row_scale(h, &x)).collect();
    let ineq_scale: Vec<f64> = p
        .ineq_constraints
        .iter()
        .map(|g| row_scale(g, &x))
        .collect();
    let scaled_violation = |x: &[f64]| -> f64 {
        let mut v: f64 = 0.0;
        for (h, sc) in p.eq_constraints.iter().zip(&eq_scale) {
            v = v.max(h.eval(x).abs() / sc);
        }
        for (g, sc) in p.ineq_constraints.iter().zip(&ineq_scale) {
            v = v.max(g.eval(x).max(0.0) / sc);
        }
        v
    };

    let mut best = Incumbent {
        x: x.clone(),
        violation: scaled_violation(&x),
        objective: internal_obj(&x),
    };
    let mut outer_violations = Vec::with_capacity(cfg.max_outer);
    let mut achieved_viol = f64::INFINITY;
    let mut status = SolveStatus::NumericFailure;
    let mut grad_buf = vec![0.0; p.n_vars];
    let mut numeric_failure = false;

    // merit value and gradient of the augmented Lagrangian on the scaled
    // constraints h/sc and max(0, g)/sc
    let merit = |x: &[f64], lambda: &[f64], mu: f64| -> f64 {
        let mut val = flip * p.objective.eval(x);
        for (i, h) in p.eq_constraints.iter().enumerate() {
            let hv = h.eval(x) / eq_scale[i];
            val += lambda[i] * hv + 0.5 * mu * hv * hv;
        }
        for (g, sc) in p.ineq_constraints.iter().zip(&ineq_scale) {
            let gv = g.eval(x).max(0.0) / sc;
            val += 0.5 * mu * gv * gv;
        }
        val
    };
    let merit_grad =
        |x: &[f64], lambda: &[f64], mu: f64, out: &mut Vec<f64>, tmp: &mut Vec<f64>| {
            out.iter_mut().for_each(|v| *v = 0.0);
            tmp.iter_mut().for_each(|v| *v = 0.0);
            (p.objective.grad)(x, tmp);
            for (o, t) in out.iter_mut().zip(tmp.iter()) {
                *o += flip * t;
            }
            for (i, h) in p.eq_constraints.iter().enumerate() {
                let hv = h.eval(x) / eq_scale[i];
                let w = (lambda[i] + mu * hv) / eq_scale[i];
                if w != 0.0 {
                    tmp.iter_mut().for_each(|v| *v = 0.0);
                    (h.grad)(x, tmp);
                    for (o, t) in out.iter_mut().zip(tmp.iter()) {
                        *o += w * t;
                    }
                }
            }
            for (g, sc) in p.ineq_constraints.iter().zip(&ineq_scale) {
                let gv = g.eval(x);
                if gv > 0.0 {
                    let w = mu * gv / (sc * sc);
                    tmp.iter_mut().for_each(|v| *v = 0.0);
                    (g.grad)(x, tmp);
                    for (o, t) in out.iter_mut().zip(tmp.iter()) {
                        *o += w * t;
                    }
                }
            }
        };

    let project = |x: &mut [f64]| {
        for (v, &(lo, hi)) in x.iter_mut().zip(&p.bounds) {
            *v = v.clamp(lo, hi);
        }
    };
    let projected_grad_norm = |x: &[f64], g: &[f64]| -> f64 {
        x.iter()
            .zip(g)
            .zip(&p.bounds)
            .map(|((&xi, &gi), &(lo, hi))| ((xi - gi).clamp(lo, hi) - xi).abs())
            .fold(0.0f64, f64::max)
    };

    let mut viol_prev = f64::INFINITY;
    let mut tmp = vec![0.0; p.n_vars];
    let mut x_prev_outer = x.clone();

    'outer: for _outer in 0..cfg.max_outer {
        // ---- inner projected L-BFGS on the merit function
        let mut s_hist: Vec<Vec<f64>> = Vec::new();
        let mut y_hist: Vec<Vec<f64>> = Vec::new();
        let mut rho: Vec<f64> = Vec::new();
        let mut phi = merit(&x, &lambda, mu);
        merit_grad(&x, &lambda, mu, &mut grad_buf, &mut tmp);
        let mut converged_inner = false;

        if !phi.is_finite() {
            numeric_failure = true;
            break 'outer;
        }

        for _inner in 0..cfg.max_inner {
            if start.elapsed().as_secs_f64() > cfg.time_limit_s {
                status = SolveStatus::TimeLimit;
                break 'outer;
            }
            let pg = projected_grad_norm(&x, &grad_buf);
            if pg <= cfg.tol_kkt {
                converged_inner = true;
                break;
            }

            // two-loop recursion
            let mut dir: Vec<f64> = grad_buf.iter().map(|g| -g).collect();
            let k = s_hist.len();
            let mut alpha_hist = vec![0.0; k];
            for i in (0..k).rev() {
                let a = rho[i] * dot(&s_hist[i], &dir);
                alpha_hist[i] = a;
                axpy(-a, &y_hist[i], &mut dir);
            }
            if k > 0 {
                let yy = dot(&y_hist[k - 1], &y_hist[k - 1]);
                let sy = 1.0 / rho[k - 1];
                if yy > 0.0 {
                    let scale = sy / yy;
                    dir.iter_mut().for_each(|d| *d *= scale);
                }
            }
            for i in 0..k {
                let b = rho[i] * dot(&y_hist[i], &dir);
                axpy(alpha_hist[i] - b, &s_hist[i], &mut dir);
            }
            if dot(&dir, &grad_buf) >= 0.0 {
                // not a descent direction, fall back to steepest descent
                dir = grad_buf.iter().map(|g| -g).collect();
                s_hist.clear();
                y_hist.clear();
                rho.clear();
            }

            // Armijo backtracking on the projected step
            let mut step = 1.0;
            let mut moved = false;
            let mut x_new = x.clone();
            let mut phi_new = phi;
            for _ in 0..40 {
                for (i, v) in x_new.iter_mut().enumerate() {
                    *v = x[i] + step * dir[i];
                }
                project(&mut x_new);
                let decrease: f64 = x_new
                    .iter()
                    .zip(&x)
                    .zip(&grad_buf)
                    .map(|((a, b), g)| (a - b) * g)
                    .sum();
                phi_new = merit(&x_new, &lambda, mu);
                if !phi_new.is_finite() {
                    step *= 0.5;
                    continue;
                }
                if decrease >= 0.0 {
                    // projection killed the direction
                    if decrease == 0.0 {
                        break;
                    }
                    step *= 0.5;
                    continue;
                }
                if phi_new <= phi + 1e-4 * decrease {
                    moved = true;
                    break;
                }
                step *= 0.5;
            }
            if !moved || phi - phi_new <= 1e-16 * (1.0 + phi.abs()) {
                converged_inner = true;
                break;
            }

            let mut g_new = vec![0.0; p.n_vars];
            merit_grad(&x_new, &lambda, mu, &mut g_new, &mut tmp);
            if g_new.iter().any(|v| !v.is_finite()) {
                numeric_failure = true;
                break 'outer;
            }
            let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
            let yv: Vec<f64> = g_new.iter().zip(&grad_buf).map(|(a, b)| a - b).collect();
            let sy = dot(&s, &yv);
            if sy > 1e-12 * norm2(&s) * norm2(&yv) {
                if s_hist.len() == LBFGS_MEMORY {
                    s_hist.remove(0);
                    y_hist.remove(0);
                    rho.remove(0);
                }
                rho.push(1.0 / sy);
                s_hist.push(s);
                y_hist.push(yv);
            }
            x = x_new;
            phi = phi_new;
            grad_buf = g_new;
        }

        // ---- outer bookkeeping
        let viol = scaled_violation(&x);
        let cand = Incumbent {
            x: x.clone(),
            violation: viol,
            objective: internal_obj(&x),
        };
        if cand.better_than(&best, cfg.tol_feas) {
            best = cand;
        }
        achieved_viol = achieved_viol.min(viol).min(best.violation);
        outer_violations.push(achieved_viol);

        let pg = projected_grad_norm(&x, &grad_buf);
        if viol <= cfg.tol_feas && pg <= cfg.tol_kkt && converged_inner {
            status = SolveStatus::Optimal;
            break 'outer;
        }

        for (i, h) in p.eq_constraints.iter().enumerate() {
            lambda[i] =
                (lambda[i] + mu * h.eval(&x) / eq_scale[i]).clamp(-MULTIPLIER_CAP, MULTIPLIER_CAP);
        }
        if viol > 0.25 * viol_prev {
            mu = (mu * cfg.penalty_growth).min(PENALTY_CAP);
        }
        viol_prev = viol_prev.min(viol);

        // stuck at an infeasible stationary point of the penalty (e.g.
        // coincident points, where distance gradients vanish): restart the
        // next round from the incumbent so the grown penalty can act
        if viol > cfg.tol_feas && x == x_prev_outer && x != best.x {
            x = best.x.clone();
        }
        x_prev_outer = x.clone();
    }

    if status != SolveStatus::Optimal && status != SolveStatus::TimeLimit {
        status = if numeric_failure {
            SolveStatus::NumericFailure
        } else if best.violation <= cfg.tol_feas {
            SolveStatus::FeasiblePoint
        } else {
            SolveStatus::NumericFailure
        };
    }

    let report = build_report(p, &best.x, status, start.elapsed().as_secs_f64());
    let violation = best.violation;
    Ok(LocalTrace {
        report,
        outer_violations,
        point: Some(best.x),
        violation,
    })
}

/// Samples a starting point: the coordinate block uniformly in the box of
/// half-width [`SmoothProgram::sample_halfwidth`], bounded auxiliaries
/// uniformly within their bounds, free auxiliaries at zero.
pub fn sample_start(p: &SmoothProgram, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let r = p.sample_halfwidth;
    let x_len = p.layout.x_len();
    let mut v: Vec<f64> = (0..p.n_vars)
        .map(|i| {
            let (lo, hi) = p.bounds[i];
            if i < x_len {
                rng.random_range(-r..=r).clamp(lo, hi)
            } else if lo.is_finite() && hi.is_finite() {
                if lo == hi {
                    lo
                } else {
                    rng.random_range(lo..=hi)
                }
            } else {
                0.0f64.clamp(lo, hi)
            }
        })
        .collect();
    p.adjust_start(&mut v);
    v
}

/// Outcome of [`multistart_traced`]: the best report and the incumbent
/// internal objective after each restart (non-increasing by construction).
pub struct MultistartTrace {
    pub report: SolveReport,
    pub best_objective_trace: Vec<f64>,
    pub point: Option<Vec<f64>>,
}

/// Repeated local solves from random starting points; restart `r` uses the
/// derived seed `cfg.seed + r`, so a parallel schedule would produce the
/// same result as this serial one. With zero restarts (or a time limit hit
/// before the first solve completes) the no-solution marker is returned.
pub fn multistart(p: &SmoothProgram, cfg: &SolverConfig) -> Result<SolveReport, SolveError> {
    multistart_traced(p, cfg).map(|t| t.report)
}

pub fn multistart_traced(
    p: &SmoothProgram,
    cfg: &SolverConfig,
) -> Result<MultistartTrace, SolveError> {
    cfg.validate()?;
    if p.has_integrality() {
        return Err(SolveError::UnsupportedProgram);
    }
    let start = Instant::now();
    let mut best: Option<(Incumbent, SolveReport, Vec<f64>)> = None;
    let mut trace = Vec::new();

    for r in 0..cfg.restarts {
        let elapsed = start.elapsed().as_secs_f64();
        if elapsed > cfg.time_limit_s {
            break;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(r as u64));
        let x0 = sample_start(p, &mut rng);
        let mut local_cfg = cfg.clone();
        local_cfg.time_limit_s = cfg.time_limit_s - elapsed;
        let local = solve_local_traced(p, &x0, &local_cfg)?;
        let point = local
            .point
            .clone()
            .expect("local solve always returns a point");
        let flip = if p.sense == Sense::Max { -1.0 } else { 1.0 };
        // feasibility judged in the local solver's own scaled measure, so a
        // solved restart can never lose to a worse one over scaling noise
        let cand = Incumbent {
            x: point.clone(),
            violation: local.violation,
            objective: flip * local.report.objective,
        };
        let improves = match &best {
            None => true,
            Some((inc, _, _)) => cand.better_than(inc, cfg.tol_feas),
        };
        if improves {
            best = Some((cand, local.report, point));
        }
        trace.push(
            best.as_ref()
                .map(|(i, _, _)| i.objective)
                .unwrap_or(f64::NAN),
        );
    }

    let elapsed = start.elapsed().as_secs_f64();
    match best {
        Some((_, mut report, point)) => {
            report.cpu_seconds = elapsed;
            Ok(MultistartTrace {
                report,
                best_objective_trace: trace,
                point: Some(point),
            })
        }
        None => Ok(MultistartTrace {
            report: SolveReport::no_solution(SolveStatus::TimeLimit, elapsed),
            best_objective_trace: trace,
            point: None,
        }),
    }
}

/// Assembles a report from a raw variable vector: extracts the realization,
/// measures `mde`/`lde` against the program's graph when it has one, and for
/// unassigned programs with a near-binary `y` block also reconstructs and
/// measures the graph behind the found assignment.
pub fn build_report(
    p: &SmoothProgram,
    point: &[f64],
    status: SolveStatus,
    cpu_seconds: f64,
) -> SolveReport {
    let realization = p.extract_realization(point);
    let objective = p.objective.eval(point);
    let mut report = SolveReport {
        realization: Some(realization.clone()),
        assignment: None,
        mde: f64::NAN,
        lde: f64::NAN,
        objective,
        status,
        cpu_seconds,
    };
    if let Some(inst) = &p.dgp {
        report.mde = mde(&realization, &inst.graph).unwrap_or(f64::NAN);
        report.lde = lde(&realization, &inst.graph).unwrap_or(f64::NAN);
    } else if let Some(inst) = &p.udgp {
        if let Some(a) = extract_assignment(p, point, 1e-3) {
            if let Ok(g) = reconstruct_graph(inst, &a) {
                report.mde = mde(&realization, &g).unwrap_or(f64::NAN);
                report.lde = lde(&realization, &g).unwrap_or(f64::NAN);
                report.assignment = Some(a);
            }
        }
    }
    report
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}
