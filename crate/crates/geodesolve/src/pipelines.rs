//! End-to-end solution processes: the assigned relax / factor / reduce /
//! refine pipeline, the unassigned reconstruct-then-realize pipeline, and
//! the exact brute-force enumeration oracle for small unassigned instances.

use crate::formulations::{
    build_dgp, build_matrix_lp, build_sdp, build_udgp_milp, lp_solution_to_sym, BuildError,
    BuildOpts, Cone, DgpKind, MatrixLpKind, SdpKind, DEFAULT_TRACE_WEIGHT,
};
use crate::linalg::{gram_factor, pca_reduce, LinalgError, Mat};
use crate::lp_solver::{solve_lp, solve_milp, LpError, LpStatus, MilpConfig};
use crate::metrics::{gphsim, lde, mde, MetricError};
use crate::psd_solver::{solve_sdp, SdpConfig, SdpError};
use crate::smooth_solver::{multistart_traced, solve_local_traced, SolveError, SolverConfig};
use crate::types::{
    reconstruct_graph, Assignment, DgpInstance, Graph, ModelError, Realization, SolveReport,
    SolveStatus, UdgpInstance,
};
use rayon::prelude::*;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Sdp(#[from] SdpError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("{count} injective assignments exceed the enumeration cap {cap}")]
    TooManyAssignments { count: u128, cap: usize },
    #[error("mixed-integer incumbent has no readable assignment")]
    NoAssignment,
}

/// Which relaxation backs the matrix stage of the assigned pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixRelax {
    Sdp,
    Dd,
    DualDd,
}

impl MatrixRelax {
    pub fn name(&self) -> &'static str {
        match self {
            MatrixRelax::Sdp => "sdp",
            MatrixRelax::Dd => "dd",
            MatrixRelax::DualDd => "dualdd",
        }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub solver: SolverConfig,
    pub sdp: SdpConfig,
    pub milp: MilpConfig,
    /// Polyhedral matrix formulation used when the relaxation is DD/dual-DD.
    pub matrix_kind: MatrixLpKind,
    /// PSD formulation used when the relaxation is the SDP.
    pub sdp_kind: SdpKind,
    pub trace_weight: f64,
    pub opts: BuildOpts,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            solver: SolverConfig::default(),
            sdp: SdpConfig::default(),
            milp: MilpConfig::default(),
            matrix_kind: MatrixLpKind::PushPull,
            sdp_kind: SdpKind::TraceMax,
            trace_weight: DEFAULT_TRACE_WEIGHT,
            opts: BuildOpts::default(),
        }
    }
}

/// Outcome of [`dgp_pipeline`], carrying the realization errors both before
/// refinement (straight off the rank reduction) and after.
#[derive(Debug, Clone)]
pub struct DgpPipelineOutcome {
    pub report: SolveReport,
    pub matrix_status: SolveStatus,
    /// The relaxation that actually ran (the SDP falls back to DD above the
    /// dimension cap).
    pub relax_used: MatrixRelax,
    pub pre_mde: f64,
    pub pre_lde: f64,
    pub post_mde: f64,
    pub post_lde: f64,
    /// Total magnitude of negative eigenvalues clipped while factoring.
    pub clipped_mass: f64,
}

/// Assigned-problem process: solve a matrix relaxation, factor the solution,
/// reduce its rank to `K` by PCA, then refine with the local solver. The
/// refined point is kept only if it does not worsen the realization error.
pub fn dgp_pipeline(
    inst: &DgpInstance,
    relax: MatrixRelax,
    refine_kind: DgpKind,
    cfg: &PipelineConfig,
) -> Result<DgpPipelineOutcome, PipelineError> {
    let start = Instant::now();

    let mut relax_used = relax;
    let (x_matrix, matrix_status) = match relax {
        MatrixRelax::Sdp => {
            let p = build_sdp(cfg.sdp_kind, inst, cfg.trace_weight);
            match solve_sdp(&p, &cfg.sdp) {
                Ok(out) => (Some(out.x), out.status),
                Err(SdpError::DimensionCap { .. }) => {
                    relax_used = MatrixRelax::Dd;
                    solve_matrix_lp_stage(inst, Cone::Dd, cfg)?
                }
                Err(e) => return Err(e.into()),
            }
        }
        MatrixRelax::Dd => solve_matrix_lp_stage(inst, Cone::Dd, cfg)?,
        MatrixRelax::DualDd => solve_matrix_lp_stage(inst, Cone::DualDd, cfg)?,
    };

    let x_matrix = match (x_matrix, matrix_status) {
        (Some(x), SolveStatus::Optimal | SolveStatus::TimeLimit | SolveStatus::FeasiblePoint) => x,
        (_, status) => {
            return Ok(DgpPipelineOutcome {
                report: SolveReport::no_solution(status, start.elapsed().as_secs_f64()),
                matrix_status: status,
                relax_used,
                pre_mde: f64::NAN,
                pre_lde: f64::NAN,
                post_mde: f64::NAN,
                post_lde: f64::NAN,
                clipped_mass: f64::NAN,
            })
        }
    };

    // factor and reduce
    let (points, clipped_mass) = gram_factor(&x_matrix)?;
    let pre = reduce_to_k(&points, inst.k)?;
    let pre_mde = mde(&pre, &inst.graph)?;
    let pre_lde = lde(&pre, &inst.graph)?;

    // refine from the reduced point
    let program = build_dgp(refine_kind, inst, &cfg.opts);
    let x0 = crate::formulations::assemble_dgp_start(&program, &pre);
    let local = solve_local_traced(&program, &x0, &cfg.solver)?;
    let refined = local
        .report
        .realization
        .clone()
        .expect("local solve returns a point");
    let refined_mde = mde(&refined, &inst.graph)?;

    // never hand back something worse than the matrix stage produced
    let (chosen, post_mde, post_lde, status) = if refined_mde <= pre_mde {
        (
            refined.clone(),
            refined_mde,
            lde(&refined, &inst.graph)?,
            local.report.status,
        )
    } else {
        (pre.clone(), pre_mde, pre_lde, local.report.status)
    };

    let report = SolveReport {
        realization: Some(chosen),
        assignment: None,
        mde: post_mde,
        lde: post_lde,
        objective: local.report.objective,
        status: if matrix_status == SolveStatus::TimeLimit {
            SolveStatus::TimeLimit
        } else {
            status
        },
        cpu_seconds: start.elapsed().as_secs_f64(),
    };
    Ok(DgpPipelineOutcome {
        report,
        matrix_status,
        relax_used,
        pre_mde,
        pre_lde,
        post_mde,
        post_lde,
        clipped_mass,
    })
}

fn solve_matrix_lp_stage(
    inst: &DgpInstance,
    cone: Cone,
    cfg: &PipelineConfig,
) -> Result<(Option<crate::linalg::SymMatrix>, SolveStatus), PipelineError> {
    let lp = build_matrix_lp(cfg.matrix_kind, cone, inst);
    let sol = solve_lp(&lp)?;
    Ok(match sol.status {
        LpStatus::Optimal => {
            let x = lp_solution_to_sym(&sol.values, lp.x_sym.expect("matrix LP has an X block"));
            (Some(x), SolveStatus::Optimal)
        }
        LpStatus::Infeasible => (None, SolveStatus::Infeasible),
        LpStatus::Unbounded => (None, SolveStatus::Unbounded),
    })
}

/// PCA down to `k` columns, zero-padding when the factor has fewer columns
/// than the target dimension.
fn reduce_to_k(points: &Mat, k: usize) -> Result<Realization, LinalgError> {
    let avail = points.cols().min(k);
    let reduced = pca_reduce(points, avail)?;
    if avail == k {
        return Ok(reduced);
    }
    let coords: Vec<Vec<f64>> = reduced
        .coords()
        .iter()
        .map(|row| {
            let mut r = row.clone();
            r.resize(k, 0.0);
            r
        })
        .collect();
    Realization::new(coords).map_err(|_| LinalgError::NonFinite)
}

/// Outcome of [`udgp_pipeline`].
#[derive(Debug, Clone)]
pub struct UdgpPipelineOutcome {
    pub report: SolveReport,
    /// Similarity of the reconstructed graph to a reference graph, when the
    /// instance came from a known one (benchmark mode).
    pub gphsim: Option<f64>,
    pub milp_status: SolveStatus,
    pub milp_objective: f64,
    pub milp_nodes: usize,
}

/// Unassigned-problem process: solve the mixed-integer cone program, read
/// the assignment off the incumbent, reconstruct the assigned graph, then
/// realize it with multistart on the chosen smooth kind. The relaxation's
/// matrix solution is discarded; only the assignment survives.
pub fn udgp_pipeline(
    inst: &UdgpInstance,
    cone: Cone,
    refine_kind: DgpKind,
    cfg: &PipelineConfig,
    reference: Option<&Graph>,
) -> Result<UdgpPipelineOutcome, PipelineError> {
    let start = Instant::now();
    let lp = build_udgp_milp(cone, inst, cfg.opts.assignment_literal)?;
    let milp = solve_milp(&lp, &cfg.milp)?;

    let Some(values) = &milp.values else {
        return Ok(UdgpPipelineOutcome {
            report: SolveReport::no_solution(milp.status, start.elapsed().as_secs_f64()),
            gphsim: None,
            milp_status: milp.status,
            milp_objective: milp.objective,
            milp_nodes: milp.nodes,
        });
    };

    let y = lp.y.as_ref().expect("unassigned program has a y block");
    let mut pairs = Vec::with_capacity(y.m);
    for l in 0..y.m {
        let p = (0..y.pairs.len())
            .find(|&p| values[y.index(p, l)] > 0.5)
            .ok_or(PipelineError::NoAssignment)?;
        pairs.push(y.pairs[p]);
    }
    let assignment = Assignment::new(pairs).map_err(|_| PipelineError::NoAssignment)?;
    let graph = reconstruct_graph(inst, &assignment)?;
    let similarity = reference.map(|r| gphsim(&graph, r));

    let dgp = DgpInstance::new(inst.k, graph)?;
    let program = build_dgp(refine_kind, &dgp, &cfg.opts);
    let ms = multistart_traced(&program, &cfg.solver)?;
    let mut report = ms.report;
    report.assignment = Some(assignment);
    report.cpu_seconds = start.elapsed().as_secs_f64();
    if milp.status == SolveStatus::TimeLimit {
        report.status = SolveStatus::TimeLimit;
    }
    Ok(UdgpPipelineOutcome {
        report,
        gphsim: similarity,
        milp_status: milp.status,
        milp_objective: milp.objective,
        milp_nodes: milp.nodes,
    })
}

#[derive(Debug, Clone)]
pub struct OracleConfig {
    /// Refuse instances with more injective assignments than this.
    pub cap: usize,
    pub refine_kind: DgpKind,
    pub solver: SolverConfig,
    pub opts: BuildOpts,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            cap: 5000,
            refine_kind: DgpKind::Quartic,
            solver: SolverConfig::default(),
            opts: BuildOpts::default(),
        }
    }
}

/// Result for one enumerated assignment.
#[derive(Debug, Clone)]
pub struct AssignmentResult {
    pub assignment: Assignment,
    pub mde: f64,
    pub lde: f64,
    pub realization: Option<Realization>,
}

#[derive(Debug, Clone)]
pub struct OracleOutcome {
    pub results: Vec<AssignmentResult>,
    pub best_index: usize,
    pub cpu_seconds: f64,
}

impl OracleOutcome {
    pub fn best(&self) -> &AssignmentResult {
        &self.results[self.best_index]
    }
}

/// Number of injective assignments of `m` distances to `pairs` unordered
/// point pairs.
pub fn count_assignments(n_pairs: usize, m: usize) -> u128 {
    if m > n_pairs {
        return 0;
    }
    let mut count: u128 = 1;
    for i in 0..m {
        count = count.saturating_mul((n_pairs - i) as u128);
    }
    count
}

/// Exhaustive unassigned solver: enumerates every injective assignment in
/// lexicographic order, realizes each reconstructed graph with multistart,
/// and returns all per-assignment errors plus the minimizer (ties to the
/// lowest assignment index). Exact up to the local solver's ability on each
/// small assigned instance.
pub fn udgp_bruteforce_oracle(
    inst: &UdgpInstance,
    cfg: &OracleConfig,
) -> Result<OracleOutcome, PipelineError> {
    let start = Instant::now();
    let pairs = all_pairs(inst.n_points);
    let m = inst.m();
    let count = count_assignments(pairs.len(), m);
    if count > cfg.cap as u128 {
        return Err(PipelineError::TooManyAssignments {
            count,
            cap: cfg.cap,
        });
    }
    if count == 0 {
        return Err(PipelineError::Build(BuildError::TooManyDistances {
            m,
            pairs: pairs.len(),
        }));
    }

    let assignments = enumerate_injective(&pairs, m);
    let results: Vec<AssignmentResult> = assignments
        .into_par_iter()
        .enumerate()
        .map(
            |(idx, pair_choice)| -> Result<AssignmentResult, PipelineError> {
                let assignment =
                    Assignment::new(pair_choice).expect("enumeration yields distinct pairs");
                let graph = reconstruct_graph(inst, &assignment)?;
                let dgp = DgpInstance::new(inst.k, graph)?;
                let program = build_dgp(cfg.refine_kind, &dgp, &cfg.opts);
                let mut solver = cfg.solver.clone();
                solver.seed = cfg
                    .solver
                    .seed
                    .wrapping_add((idx as u64).wrapping_mul(0x9E3779B97F4A7C15));
                let ms = multistart_traced(&program, &solver)?;
                Ok(AssignmentResult {
                    assignment,
                    mde: ms.report.mde,
                    lde: ms.report.lde,
                    realization: ms.report.realization,
                })
            },
        )
        .collect::<Result<_, _>>()?;

    let best_index = results
        .iter()
        .enumerate()
        .min_by(|(ia, a), (ib, b)| {
            let ka = if a.mde.is_nan() { f64::INFINITY } else { a.mde };
            let kb = if b.mde.is_nan() { f64::INFINITY } else { b.mde };
            ka.total_cmp(&kb).then(ia.cmp(ib))
        })
        .map(|(i, _)| i)
        .expect("at least one assignment");

    Ok(OracleOutcome {
        results,
        best_index,
        cpu_seconds: start.elapsed().as_secs_f64(),
    })
}

fn all_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    for i in 1..=n {
        for j in i + 1..=n {
            pairs.push((i, j));
        }
    }
    pairs
}

/// All ordered selections of `m` distinct pairs, lexicographic in the chosen
/// pair indices.
fn enumerate_injective(pairs: &[(usize, usize)], m: usize) -> Vec<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    let mut used = vec![false; pairs.len()];
    let mut current = Vec::with_capacity(m);
    fn rec(
        pairs: &[(usize, usize)],
        m: usize,
        used: &mut Vec<bool>,
        current: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        if current.len() == m {
            out.push(current.clone());
            return;
        }
        for i in 0..pairs.len() {
            if used[i] {
                continue;
            }
            used[i] = true;
            current.push(pairs[i]);
            rec(pairs, m, used, current, out);
            current.pop();
            used[i] = false;
        }
    }
    rec(pairs, m, &mut used, &mut current, &mut out);
    out
}
