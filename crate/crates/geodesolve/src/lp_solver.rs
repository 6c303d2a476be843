//! LP engine (dense two-phase simplex with variable bounds) and MILP engine
//! (best-bound branch-and-bound over the binary assignment block).
//!
//! The tableau is dense and the engine applies no presolve beyond skipping
//! fixed variables, which keeps behavior easy to audit at the scale this
//! crate targets (matrix programs up to a few dozen points).

// dense kernels index in both dimensions; iterator forms obscure them
#![allow(clippy::needless_range_loop)]

use crate::formulations::{LinearProgram, Rel, Sense};
use crate::types::SolveStatus;
use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LpError {
    #[error("program carries integrality marks; use solve_milp")]
    IntegralityMarks,
    #[error("time limit reached inside the simplex")]
    Deadline,
    #[error("program contains a non-finite coefficient")]
    NonFinite,
    #[error("simplex iteration limit reached")]
    IterationLimit,
    #[error("optimal basis failed the row replay check (residual {0:.3e})")]
    ReplayFailed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub values: Vec<f64>,
    pub objective: f64,
    pub status: LpStatus,
}

const PIVOT_TOL: f64 = 1e-9;
const RCOST_TOL: f64 = 1e-9;
const FEAS_TOL: f64 = 1e-7;

/// Solves a continuous linear program. `Optimal` solutions are replay-checked
/// against every row and bound before being returned.
pub fn solve_lp(p: &LinearProgram) -> Result<LpSolution, LpError> {
    if p.has_integrality() {
        return Err(LpError::IntegralityMarks);
    }
    solve_lp_with_bounds(p, &p.bounds, None)
}

/// Core solve with externally supplied bounds (used by branch-and-bound
/// nodes, which tighten the binary block) and an optional wall-clock
/// deadline checked between simplex iterations.
fn solve_lp_with_bounds(
    p: &LinearProgram,
    var_bounds: &[(f64, f64)],
    deadline: Option<Instant>,
) -> Result<LpSolution, LpError> {
    let mut t = Tableau::build(p, var_bounds)?;
    t.deadline = deadline;
    match t.phase1()? {
        Phase1::Infeasible => {
            return Ok(LpSolution {
                values: vec![],
                objective: f64::NAN,
                status: LpStatus::Infeasible,
            })
        }
        Phase1::Feasible => {}
    }
    let status = t.phase2(p)?;
    if status == LpStatus::Unbounded {
        return Ok(LpSolution {
            values: vec![],
            objective: f64::NAN,
            status,
        });
    }
    let values = t.extract(p.n_vars);
    let objective: f64 = p.objective.iter().map(|&(j, c)| c * values[j]).sum();
    replay_check(p, var_bounds, &values)?;
    Ok(LpSolution {
        values,
        objective,
        status: LpStatus::Optimal,
    })
}

fn replay_check(p: &LinearProgram, var_bounds: &[(f64, f64)], x: &[f64]) -> Result<(), LpError> {
    let mut worst = 0.0f64;
    for row in &p.rows {
        let lhs: f64 = row.coeffs.iter().map(|&(j, c)| c * x[j]).sum();
        let scale: f64 = 1.0
            + row.rhs.abs()
            + row
                .coeffs
                .iter()
                .map(|&(j, c)| (c * x[j]).abs())
                .sum::<f64>();
        let viol = match row.rel {
            Rel::Le => lhs - row.rhs,
            Rel::Ge => row.rhs - lhs,
            Rel::Eq => (lhs - row.rhs).abs(),
        };
        worst = worst.max(viol / scale);
    }
    for (&v, &(lo, hi)) in x.iter().zip(var_bounds) {
        let scale = 1.0 + v.abs();
        worst = worst.max((lo - v).max(v - hi).max(0.0) / scale);
    }
    if worst > 1e-8 {
        return Err(LpError::ReplayFailed(worst));
    }
    Ok(())
}

enum Phase1 {
    Feasible,
    Infeasible,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarState {
    Basic(usize),
    Nonbasic, // value held in `nb_value`
}

struct Tableau {
    m: usize,
    ncols: usize,
    n_structural: usize, // structurals + slacks (everything that is not artificial)
    tab: Vec<f64>,       // m x ncols, row-major: B^-1 * A_all
    cost_row: Vec<f64>,  // reduced costs
    beta: Vec<f64>,      // basic variable values
    basis: Vec<usize>,   // var of each row
    state: Vec<VarState>,
    nb_value: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    iterations: usize,
    bland_after: usize,
    iteration_cap: usize,
    deadline: Option<Instant>,
}

impl Tableau {
    fn build(p: &LinearProgram, var_bounds: &[(f64, f64)]) -> Result<Tableau, LpError> {
        let m = p.rows.len();
        let n = p.n_vars;
        if p.objective.iter().any(|&(_, c)| !c.is_finite())
            || p.rows
                .iter()
                .any(|r| !r.rhs.is_finite() || r.coeffs.iter().any(|&(_, c)| !c.is_finite()))
        {
            return Err(LpError::NonFinite);
        }

        let n_structural = n + m; // structurals + one slack per row
        let ncols = n_structural + m; // + artificials
        let mut lo = Vec::with_capacity(ncols);
        let mut hi = Vec::with_capacity(ncols);
        for &(l, h) in var_bounds {
            lo.push(l);
            hi.push(h);
        }
        for row in &p.rows {
            let (l, h) = match row.rel {
                Rel::Le => (0.0, f64::INFINITY),
                Rel::Ge => (f64::NEG_INFINITY, 0.0),
                Rel::Eq => (0.0, 0.0),
            };
            lo.push(l);
            hi.push(h);
        }
        for _ in 0..m {
            lo.push(0.0);
            hi.push(f64::INFINITY);
        }

        // nonbasic start: structurals projected to their box, slacks at zero
        let mut nb_value = vec![0.0; ncols];
        for j in 0..n_structural {
            nb_value[j] = 0.0f64.clamp(lo[j], hi[j].max(lo[j]));
        }

        // residuals decide the artificial column signs
        let mut resid = vec![0.0; m];
        for (i, row) in p.rows.iter().enumerate() {
            let mut r = row.rhs;
            for &(j, c) in &row.coeffs {
                r -= c * nb_value[j];
            }
            // slack starts at zero, contributes nothing
            resid[i] = r;
        }

        let mut tab = vec![0.0; m * ncols];
        let mut beta = vec![0.0; m];
        let mut basis = vec![0usize; m];
        let mut state = vec![VarState::Nonbasic; ncols];
        for (i, row) in p.rows.iter().enumerate() {
            let sigma = if resid[i] >= 0.0 { 1.0 } else { -1.0 };
            for &(j, c) in &row.coeffs {
                tab[i * ncols + j] += sigma * c;
            }
            tab[i * ncols + n + i] = sigma; // slack
            tab[i * ncols + n_structural + i] = 1.0; // artificial, sigma^2
            beta[i] = resid[i].abs();
            basis[i] = n_structural + i;
            state[n_structural + i] = VarState::Basic(i);
        }

        let bland_after = 50 * (m + ncols) + 1000;
        let iteration_cap = 400 * (m + ncols) + 20_000;
        Ok(Tableau {
            m,
            ncols,
            n_structural,
            tab,
            cost_row: vec![0.0; ncols],
            beta,
            basis,
            state,
            nb_value,
            lo,
            hi,
            iterations: 0,
            bland_after,
            iteration_cap,
            deadline: None,
        })
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.tab[i * self.ncols + j]
    }

    fn rebuild_cost_row(&mut self, costs: &[f64]) {
        for j in 0..self.ncols {
            let mut z = costs[j];
            for i in 0..self.m {
                let cb = costs[self.basis[i]];
                if cb != 0.0 {
                    z -= cb * self.at(i, j);
                }
            }
            self.cost_row[j] = z;
        }
    }

    fn phase1(&mut self) -> Result<Phase1, LpError> {
        let mut costs = vec![0.0; self.ncols];
        for j in self.n_structural..self.ncols {
            costs[j] = 1.0;
        }
        self.rebuild_cost_row(&costs);
        let status = self.optimize(&costs, true)?;
        debug_assert!(status != LpStatus::Unbounded, "phase 1 is bounded below");

        let p1_obj: f64 = (0..self.m)
            .filter(|&i| self.basis[i] >= self.n_structural)
            .map(|i| self.beta[i])
            .sum();
        let scale: f64 = 1.0 + self.beta.iter().map(|b| b.abs()).fold(0.0, f64::max);
        if p1_obj > FEAS_TOL * scale {
            return Ok(Phase1::Infeasible);
        }

        // drive zero-valued artificials out of the basis where possible
        for r in 0..self.m {
            if self.basis[r] < self.n_structural {
                continue;
            }
            let pivot_col = (0..self.n_structural).find(|&j| {
                matches!(self.state[j], VarState::Nonbasic)
                    && self.lo[j] < self.hi[j]
                    && self.at(r, j).abs() > PIVOT_TOL
            });
            match pivot_col {
                Some(j) => self.degenerate_pivot(r, j),
                None => {
                    // redundant row: pin the artificial at zero
                    let a = self.basis[r];
                    self.lo[a] = 0.0;
                    self.hi[a] = 0.0;
                }
            }
        }
        // artificials may not re-enter
        for j in self.n_structural..self.ncols {
            self.lo[j] = 0.0;
            self.hi[j] = 0.0;
        }
        Ok(Phase1::Feasible)
    }

    fn phase2(&mut self, p: &LinearProgram) -> Result<LpStatus, LpError> {
        let flip = match p.sense {
            Sense::Min => 1.0,
            Sense::Max => -1.0,
        };
        let mut costs = vec![0.0; self.ncols];
        for &(j, c) in &p.objective {
            costs[j] += flip * c;
        }
        self.rebuild_cost_row(&costs);
        self.optimize(&costs, false)
    }

    /// Bounded-variable simplex iterations on the current cost row.
    fn optimize(&mut self, costs: &[f64], phase1: bool) -> Result<LpStatus, LpError> {
        loop {
            self.iterations += 1;
            if self.iterations > self.iteration_cap {
                return Err(LpError::IterationLimit);
            }
            if self.iterations.is_multiple_of(16) {
                if let Some(deadline) = self.deadline {
                    if Instant::now() > deadline {
                        return Err(LpError::Deadline);
                    }
                }
            }
            let bland = self.iterations > self.bland_after;

            // pricing
            let mut entering: Option<(usize, f64, f64)> = None; // (var, dir, |z|)
            for j in 0..self.ncols {
                if !matches!(self.state[j], VarState::Nonbasic) {
                    continue;
                }
                if self.lo[j] >= self.hi[j] {
                    continue; // fixed (includes locked artificials)
                }
                let z = self.cost_row[j];
                let v = self.nb_value[j];
                let at_lo = v <= self.lo[j] + 1e-12 || self.lo[j].is_infinite();
                let at_hi = v >= self.hi[j] - 1e-12 && self.hi[j].is_finite();
                // free nonbasic sits between infinite bounds: both moves allowed
                let can_increase = !at_hi || self.hi[j].is_infinite();
                let can_decrease = (!at_lo && self.lo[j].is_finite()) || self.lo[j].is_infinite();
                let dir = if z < -RCOST_TOL && can_increase {
                    1.0
                } else if z > RCOST_TOL && can_decrease {
                    -1.0
                } else {
                    continue;
                };
                match (&entering, bland) {
                    (_, true) => {
                        entering = Some((j, dir, z.abs()));
                        break;
                    }
                    (None, _) => entering = Some((j, dir, z.abs())),
                    (Some((_, _, best)), _) if z.abs() > *best => {
                        entering = Some((j, dir, z.abs()))
                    }
                    _ => {}
                }
            }
            let Some((e, dir, _)) = entering else {
                return Ok(LpStatus::Optimal);
            };

            // ratio test: distance to the entering variable's own bound in
            // the move direction, shrunk by whichever basic variable hits a
            // bound first
            let v_e = self.nb_value[e];
            let own_limit = if dir > 0.0 {
                if self.hi[e].is_finite() {
                    self.hi[e] - v_e
                } else {
                    f64::INFINITY
                }
            } else if self.lo[e].is_finite() {
                v_e - self.lo[e]
            } else {
                f64::INFINITY
            };
            let mut best_delta = own_limit.max(0.0);
            let mut leaving: Option<(usize, f64)> = None; // (row, bound the leaver hits)
            for i in 0..self.m {
                let alpha = self.at(i, e);
                if alpha.abs() <= PIVOT_TOL {
                    continue;
                }
                let c = -dir * alpha; // beta_i moves by c * delta
                let b = self.basis[i];
                let (limit, target) = if c > 0.0 {
                    if self.hi[b].is_finite() {
                        (((self.hi[b] - self.beta[i]) / c).max(0.0), self.hi[b])
                    } else {
                        continue;
                    }
                } else if self.lo[b].is_finite() {
                    (((self.lo[b] - self.beta[i]) / c).max(0.0), self.lo[b])
                } else {
                    continue;
                };
                let replace = match leaving {
                    None => limit < best_delta - 1e-12 || limit <= best_delta,
                    Some((r, _)) => {
                        limit < best_delta - 1e-12
                            || (limit <= best_delta + 1e-12
                                && (if bland {
                                    self.basis[i] < self.basis[r]
                                } else {
                                    alpha.abs() > self.at(r, e).abs()
                                }))
                    }
                };
                if replace {
                    leaving = Some((i, target));
                }
                best_delta = best_delta.min(limit);
            }

            if best_delta.is_infinite() {
                return Ok(if phase1 {
                    LpStatus::Optimal
                } else {
                    LpStatus::Unbounded
                });
            }

            match leaving {
                None => {
                    // bound flip: entering moves to its opposite bound
                    let delta = best_delta;
                    for i in 0..self.m {
                        let alpha = self.at(i, e);
                        if alpha != 0.0 {
                            self.beta[i] += -dir * alpha * delta;
                        }
                    }
                    self.nb_value[e] += dir * delta;
                }
                Some((r, target)) => {
                    let enter_value = self.nb_value[e] + dir * best_delta;
                    for i in 0..self.m {
                        if i == r {
                            continue;
                        }
                        let alpha = self.at(i, e);
                        if alpha != 0.0 {
                            self.beta[i] += -dir * alpha * best_delta;
                        }
                    }
                    let leave_var = self.basis[r];
                    self.state[leave_var] = VarState::Nonbasic;
                    self.nb_value[leave_var] = target;
                    self.pivot(r, e);
                    self.beta[r] = enter_value;
                }
            }
            let _ = costs; // costs are folded into the maintained reduced-cost row
        }
    }

    /// Degenerate pivot: entering keeps its current value, leaving sits at a
    /// bound already. Used to drive artificials out after phase 1.
    fn degenerate_pivot(&mut self, r: usize, e: usize) {
        let leave_var = self.basis[r];
        self.state[leave_var] = VarState::Nonbasic;
        self.nb_value[leave_var] = self.beta[r]; // zero for artificials
        let enter_value = self.nb_value[e];
        self.pivot(r, e);
        self.beta[r] = enter_value;
    }

    /// Row reduction around `(r, e)`, updating the cost row alongside.
    fn pivot(&mut self, r: usize, e: usize) {
        let piv = self.at(r, e);
        debug_assert!(piv.abs() > 1e-12);
        let inv = 1.0 / piv;
        for j in 0..self.ncols {
            self.tab[r * self.ncols + j] *= inv;
        }
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.at(i, e);
            if f != 0.0 {
                for j in 0..self.ncols {
                    let v = self.at(r, j);
                    if v != 0.0 {
                        self.tab[i * self.ncols + j] -= f * v;
                    }
                }
            }
        }
        let f = self.cost_row[e];
        if f != 0.0 {
            for j in 0..self.ncols {
                let v = self.at(r, j);
                if v != 0.0 {
                    self.cost_row[j] -= f * v;
                }
            }
        }
        self.basis[r] = e;
        self.state[e] = VarState::Basic(r);
    }

    fn extract(&self, n: usize) -> Vec<f64> {
        let mut x = vec![0.0; n];
        for (j, xv) in x.iter_mut().enumerate() {
            *xv = match self.state[j] {
                VarState::Basic(i) => self.beta[i],
                VarState::Nonbasic => self.nb_value[j],
            };
        }
        x
    }
}

// ---------------------------------------------------------------------------
// branch and bound

#[derive(Debug, Clone)]
pub struct MilpConfig {
    pub time_limit_s: f64,
    pub gap_tol: f64,
    pub node_limit: usize,
    pub int_tol: f64,
}

impl Default for MilpConfig {
    fn default() -> Self {
        MilpConfig {
            time_limit_s: f64::INFINITY,
            gap_tol: 1e-6,
            node_limit: 200_000,
            int_tol: 1e-6,
        }
    }
}

/// Result of a branch-and-bound run: the best incumbent (if any), the proven
/// bound, the pool of improving incumbents in discovery order, and the node
/// count.
#[derive(Debug, Clone)]
pub struct MilpResult {
    pub values: Option<Vec<f64>>,
    pub objective: f64,
    pub best_bound: f64,
    pub status: SolveStatus,
    pub incumbents: Vec<(Vec<f64>, f64)>,
    pub nodes: usize,
}

#[derive(Debug)]
struct Node {
    bounds: Vec<(f64, f64)>,
    score: f64, // relaxation objective in minimization orientation
    values: Vec<f64>,
}

struct HeapEntry(f64, usize, Node);

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0 && self.1 == other.1
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

/// Best-bound branch-and-bound on the binary-marked variables. Branching
/// picks the most fractional variable (ties to the lowest index); node
/// selection pops the best bound (ties to the earliest node).
pub fn solve_milp(p: &LinearProgram, cfg: &MilpConfig) -> Result<MilpResult, LpError> {
    let start = Instant::now();
    let deadline = if cfg.time_limit_s.is_finite() {
        Some(start + std::time::Duration::from_secs_f64(cfg.time_limit_s))
    } else {
        None
    };
    let flip = match p.sense {
        Sense::Min => 1.0,
        Sense::Max => -1.0,
    };
    let marked: Vec<usize> = p
        .integral
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(j, _)| j)
        .collect();

    let mut incumbent: Option<(Vec<f64>, f64)> = None; // (values, score)
    let mut pool: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut heap: BinaryHeap<Reverse<HeapEntry>> = BinaryHeap::new();
    let mut seq = 0usize;
    let mut nodes = 0usize;
    let mut timed_out = false;

    let root = match solve_lp_with_bounds(p, &p.bounds, deadline) {
        Err(LpError::Deadline) => {
            return Ok(MilpResult {
                values: None,
                objective: f64::NAN,
                best_bound: f64::NAN,
                status: SolveStatus::TimeLimit,
                incumbents: vec![],
                nodes: 1,
            })
        }
        other => other?,
    };
    match root.status {
        LpStatus::Infeasible => {
            return Ok(MilpResult {
                values: None,
                objective: f64::NAN,
                best_bound: f64::NAN,
                status: SolveStatus::Infeasible,
                incumbents: vec![],
                nodes: 1,
            })
        }
        LpStatus::Unbounded => {
            return Ok(MilpResult {
                values: None,
                objective: f64::NAN,
                best_bound: f64::NEG_INFINITY,
                status: SolveStatus::Unbounded,
                incumbents: vec![],
                nodes: 1,
            })
        }
        LpStatus::Optimal => {}
    }
    heap.push(Reverse(HeapEntry(
        flip * root.objective,
        seq,
        Node {
            bounds: p.bounds.clone(),
            score: flip * root.objective,
            values: root.values,
        },
    )));

    let mut best_open_bound = f64::INFINITY;
    while let Some(Reverse(HeapEntry(_, _, node))) = heap.pop() {
        best_open_bound = node.score;
        if let Some((_, inc_score)) = &incumbent {
            // natural termination inside the tolerance
            if inc_score - node.score <= cfg.gap_tol * inc_score.abs().max(1.0) {
                best_open_bound = node.score;
                heap.clear();
                break;
            }
        }
        nodes += 1;
        if nodes > cfg.node_limit || start.elapsed().as_secs_f64() > cfg.time_limit_s {
            timed_out = true;
            break;
        }

        // most fractional marked variable
        let frac_var = marked
            .iter()
            .map(|&j| {
                let v = node.values[j];
                let f = v - v.floor();
                (j, f.min(1.0 - f))
            })
            .filter(|&(_, f)| f > cfg.int_tol)
            .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)))
            .map(|(j, _)| j);

        match frac_var {
            None => {
                // integral relaxation: snap and clean up the continuous part
                let cand = polish_incumbent(p, &node, &marked, deadline)?;
                if let Some((values, score)) = cand {
                    let improves = match &incumbent {
                        None => true,
                        Some((_, s)) => score < s - 1e-9,
                    };
                    if improves {
                        pool.push((values.clone(), flip * score));
                        incumbent = Some((values, score));
                    }
                }
            }
            Some(j) => {
                let v = node.values[j];
                for (child_lo, child_hi) in
                    [(node.bounds[j].0, v.floor()), (v.ceil(), node.bounds[j].1)]
                {
                    if child_lo > child_hi {
                        continue;
                    }
                    let mut bounds = node.bounds.clone();
                    bounds[j] = (child_lo, child_hi);
                    let sol = match solve_lp_with_bounds(p, &bounds, deadline) {
                        Err(LpError::Deadline) => {
                            timed_out = true;
                            break;
                        }
                        other => other?,
                    };
                    if sol.status != LpStatus::Optimal {
                        continue; // infeasible child (unbounded cannot appear under tighter bounds)
                    }
                    let score = flip * sol.objective;
                    if let Some((_, inc)) = &incumbent {
                        if score >= inc - 1e-9 {
                            continue;
                        }
                    }
                    seq += 1;
                    heap.push(Reverse(HeapEntry(
                        score,
                        seq,
                        Node {
                            bounds,
                            score,
                            values: sol.values,
                        },
                    )));
                }
            }
        }
        if heap.is_empty() {
            best_open_bound = match &incumbent {
                Some((_, s)) => *s,
                None => f64::INFINITY,
            };
        }
    }

    let status = if timed_out {
        SolveStatus::TimeLimit
    } else if incumbent.is_some() {
        SolveStatus::Optimal
    } else {
        SolveStatus::Infeasible
    };
    let bound = if timed_out {
        heap.iter()
            .map(|Reverse(HeapEntry(b, _, _))| *b)
            .fold(best_open_bound, f64::min)
    } else {
        best_open_bound
    };
    let (values, objective) = match incumbent {
        Some((v, s)) => (Some(v), flip * s),
        None => (None, f64::NAN),
    };
    Ok(MilpResult {
        values,
        objective,
        best_bound: flip * bound,
        status,
        incumbents: pool,
        nodes,
    })
}

/// Fixes the marked block at its rounded values and re-solves the continuous
/// part, so incumbents satisfy the assignment rows exactly.
fn polish_incumbent(
    p: &LinearProgram,
    node: &Node,
    marked: &[usize],
    deadline: Option<Instant>,
) -> Result<Option<(Vec<f64>, f64)>, LpError> {
    let flip = match p.sense {
        Sense::Min => 1.0,
        Sense::Max => -1.0,
    };
    let mut bounds = node.bounds.clone();
    for &j in marked {
        let r = node.values[j].round();
        bounds[j] = (r, r);
    }
    let sol = match solve_lp_with_bounds(p, &bounds, deadline) {
        Err(LpError::Deadline) => return Ok(None),
        other => other?,
    };
    match sol.status {
        LpStatus::Optimal => Ok(Some((sol.values, flip * sol.objective))),
        _ => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulations::{LinRow, LinearProgram};

    fn lp(
        n: usize,
        objective: Vec<(usize, f64)>,
        sense: Sense,
        bounds: Vec<(f64, f64)>,
        rows: Vec<LinRow>,
    ) -> LinearProgram {
        LinearProgram {
            n_vars: n,
            objective,
            sense,
            bounds,
            integral: vec![false; n],
            rows,
            x_sym: None,
            t_upper: None,
            y: None,
        }
    }

    #[test]
    fn min_x_with_lower_row() {
        // min x s.t. x >= 1, x in [0, 10]
        let p = lp(
            1,
            vec![(0, 1.0)],
            Sense::Min,
            vec![(0.0, 10.0)],
            vec![LinRow {
                coeffs: vec![(0, 1.0)],
                rel: Rel::Ge,
                rhs: 1.0,
            }],
        );
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.values[0] - 1.0).abs() < 1e-9);
        assert!((s.objective - 1.0).abs() < 1e-9);
    }

    #[test]
    fn contradictory_rows_infeasible() {
        // x <= 0 and x >= 1
        let p = lp(
            1,
            vec![(0, 1.0)],
            Sense::Min,
            vec![(f64::NEG_INFINITY, f64::INFINITY)],
            vec![
                LinRow {
                    coeffs: vec![(0, 1.0)],
                    rel: Rel::Le,
                    rhs: 0.0,
                },
                LinRow {
                    coeffs: vec![(0, 1.0)],
                    rel: Rel::Ge,
                    rhs: 1.0,
                },
            ],
        );
        assert_eq!(solve_lp(&p).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn max_over_unit_box() {
        let p = lp(
            2,
            vec![(0, 1.0), (1, 1.0)],
            Sense::Max,
            vec![(0.0, 1.0), (0.0, 1.0)],
            vec![],
        );
        let s = solve_lp(&p).unwrap();
        assert!((s.objective - 2.0).abs() < 1e-9);
    }

    #[test]
    fn unbounded_detected() {
        let p = lp(
            1,
            vec![(0, 1.0)],
            Sense::Max,
            vec![(0.0, f64::INFINITY)],
            vec![],
        );
        assert_eq!(solve_lp(&p).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn equality_and_free_vars() {
        // min x + y s.t. x + y = 2, x - y = 0 -> x = y = 1
        let p = lp(
            2,
            vec![(0, 1.0), (1, 1.0)],
            Sense::Min,
            vec![(f64::NEG_INFINITY, f64::INFINITY); 2],
            vec![
                LinRow {
                    coeffs: vec![(0, 1.0), (1, 1.0)],
                    rel: Rel::Eq,
                    rhs: 2.0,
                },
                LinRow {
                    coeffs: vec![(0, 1.0), (1, -1.0)],
                    rel: Rel::Eq,
                    rhs: 0.0,
                },
            ],
        );
        let s = solve_lp(&p).unwrap();
        assert!((s.values[0] - 1.0).abs() < 1e-9);
        assert!((s.values[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn negative_rhs_handled() {
        // min x s.t. x <= -3, x in [-10, 10]
        let p = lp(
            1,
            vec![(0, 1.0)],
            Sense::Min,
            vec![(-10.0, 10.0)],
            vec![LinRow {
                coeffs: vec![(0, 1.0)],
                rel: Rel::Le,
                rhs: -3.0,
            }],
        );
        let s = solve_lp(&p).unwrap();
        assert!((s.values[0] + 10.0).abs() < 1e-9);
    }

    #[test]
    fn integral_relaxation_solved_at_root() {
        // max x + y, x,y binary with x + y <= 1 relaxation already integral at optimum? no:
        // use a case where relaxation is integral: max x s.t. x <= 1
        let mut p = lp(
            1,
            vec![(0, 1.0)],
            Sense::Max,
            vec![(0.0, 1.0)],
            vec![LinRow {
                coeffs: vec![(0, 1.0)],
                rel: Rel::Le,
                rhs: 1.0,
            }],
        );
        p.integral[0] = true;
        let r = solve_milp(&p, &MilpConfig::default()).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!((r.objective - 1.0).abs() < 1e-9);
        assert_eq!(r.nodes, 1);
    }

    #[test]
    fn knapsack_toy() {
        // max 5a + 4b + 3c s.t. 2a + 3b + c <= 3, binaries: optimum a=1, c=1 -> 8
        let mut p = lp(
            3,
            vec![(0, 5.0), (1, 4.0), (2, 3.0)],
            Sense::Max,
            vec![(0.0, 1.0); 3],
            vec![LinRow {
                coeffs: vec![(0, 2.0), (1, 3.0), (2, 1.0)],
                rel: Rel::Le,
                rhs: 3.0,
            }],
        );
        p.integral = vec![true, true, true];
        let r = solve_milp(&p, &MilpConfig::default()).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!(
            (r.objective - 8.0).abs() < 1e-9,
            "objective {}",
            r.objective
        );
        let v = r.values.unwrap();
        assert!((v[0] - 1.0).abs() < 1e-9 && v[1].abs() < 1e-9 && (v[2] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn milp_infeasible() {
        let mut p = lp(
            1,
            vec![(0, 1.0)],
            Sense::Min,
            vec![(0.0, 1.0)],
            vec![LinRow {
                coeffs: vec![(0, 2.0)],
                rel: Rel::Eq,
                rhs: 1.0,
            }],
        );
        p.integral[0] = true;
        // relaxation feasible at x = 0.5 but no integral point exists
        let r = solve_milp(&p, &MilpConfig::default()).unwrap();
        assert_eq!(r.status, SolveStatus::Infeasible);
    }
}
