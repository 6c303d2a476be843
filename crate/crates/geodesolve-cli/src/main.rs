//! Command-line interface for building, solving, and benchmarking distance
//! geometry instances with and without edge assignments.

mod bench;
mod formulation;
mod report;

use clap::{Args, Parser, Subcommand, ValueEnum};
use formulation::{run_formulation, FormulationSpec};
use geodesolve::formulations::{parse_dgp_formulation, Cone, DgpKind};
use geodesolve::instances::{
    gen_disk_graph, gen_euclidean, gen_graph_type, load_dgp, load_instance, load_points, save_dgp,
    save_solution, save_udgp, GraphType, GraphTypeParams, Instance, NormKind,
};
use geodesolve::pipelines::{udgp_bruteforce_oracle, MatrixRelax, OracleConfig, PipelineConfig};
use geodesolve::types::{derive_udgp, SolveReport};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "geodesolve",
    about = "Distance geometry solvers and benchmarks, with and without the graph",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate instances: planted Euclidean graphs, topological graph
    /// types, or disk graphs over a coordinate file.
    Generate(GenerateArgs),
    /// Solve an assigned instance with a formulation, optionally through a
    /// matrix relaxation pipeline.
    Solve(SolveArgs),
    /// Solve an unassigned instance via mixed-integer cone reconstruction.
    Usolve(UsolveArgs),
    /// Exhaustively enumerate assignments of a small unassigned instance.
    Oracle(OracleArgs),
    /// Run an (instance x formulation) benchmark grid from a JSON config.
    Bench(BenchArgs),
    /// Aggregate a benchmark CSV and draw an SVG bar plot.
    Report(ReportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Euclid,
    Gtype,
    Disk,
}

#[derive(Clone, Copy, ValueEnum)]
enum RelaxArg {
    Sdp,
    Dd,
    Dualdd,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConeArg {
    Dd,
    Dualdd,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormArg {
    L1,
    Linf,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Vertex count (euclid/gtype; side length for mesh-like types).
    #[arg(long, default_value_t = 8)]
    n: usize,
    /// Edge probability (euclid extra edges, gtype where applicable).
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    /// Topology for --family gtype.
    #[arg(long = "graph-type")]
    graph_type: Option<String>,
    /// Degree / clique size / cluster count / predecessor count.
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Inter-cluster edge probability.
    #[arg(long, default_value_t = 0.1)]
    q: f64,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    tau: f64,
    /// Distance threshold for the local type.
    #[arg(long, default_value_t = 4.0)]
    threshold: f64,
    #[arg(long, value_enum, default_value_t = NormArg::L1)]
    norm: NormArg,
    /// Draw uniform random weights instead of unit weights.
    #[arg(long, default_value_t = false)]
    weighted: bool,
    /// Coordinate file for --family disk.
    #[arg(long)]
    coords: Option<PathBuf>,
    /// Disk radius.
    #[arg(long, default_value_t = 5.5)]
    radius: f64,
    /// Embedding dimension for the disk family.
    #[arg(long, default_value_t = 3)]
    dim: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Instance output path.
    #[arg(long)]
    out: PathBuf,
    /// Also write the planted realization (euclid family).
    #[arg(long = "solution-out")]
    solution_out: Option<PathBuf>,
    /// Also write the derived unassigned instance.
    #[arg(long = "udgp-out")]
    udgp_out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Formulation name, e.g. `quartic`, `cycsys1`, `sdp_pca_system2`.
    #[arg(long)]
    formulation: String,
    /// Route through a matrix relaxation and refine afterwards.
    #[arg(long, value_enum)]
    relax: Option<RelaxArg>,
    /// Refinement kind for the pipeline (defaults to --formulation).
    #[arg(long)]
    refine: Option<String>,
    #[arg(long = "time-limit", default_value_t = 300.0)]
    time_limit: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    restarts: usize,
    /// Solution output path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct UsolveArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_enum, default_value_t = ConeArg::Dualdd)]
    cone: ConeArg,
    /// Refinement formulation for the reconstructed graph.
    #[arg(long, default_value = "quartic")]
    refine: String,
    #[arg(long = "time-limit", default_value_t = 300.0)]
    time_limit: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    restarts: usize,
    /// Assigned instance the distance list was derived from, for the
    /// similarity score.
    #[arg(long)]
    reference: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Maximum number of assignments to enumerate.
    #[arg(long, default_value_t = 5000)]
    cap: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 6)]
    restarts: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    config: PathBuf,
    /// Worker count; defaults to GEODESOLVE_JOBS, then the config, then 1.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    csv: PathBuf,
    #[arg(long = "group-by")]
    group_by: String,
    #[arg(long = "out-csv")]
    out_csv: Option<PathBuf>,
    #[arg(long = "out-svg")]
    out_svg: Option<PathBuf>,
    /// Divide the CPU bars by 300 in the plot.
    #[arg(long = "scale-cpu", default_value_t = false)]
    scale_cpu: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), String> {
    match cli.command {
        Command::Generate(args) => generate(args),
        Command::Solve(args) => solve(args),
        Command::Usolve(args) => usolve(args),
        Command::Oracle(args) => oracle(args),
        Command::Bench(args) => bench::run_bench(&args.config, args.jobs),
        Command::Report(args) => run_report(args),
    }
}

fn generate(args: GenerateArgs) -> Result<(), String> {
    let (inst, witness) = match args.family {
        FamilyArg::Euclid => {
            let (inst, witness) =
                gen_euclidean(args.n, args.p, args.seed).map_err(|e| e.to_string())?;
            (inst, Some(witness))
        }
        FamilyArg::Gtype => {
            let name = args
                .graph_type
                .as_deref()
                .ok_or("--family gtype needs --graph-type")?;
            let gtype =
                GraphType::parse(name).ok_or_else(|| format!("unknown graph type `{name}`"))?;
            let params = GraphTypeParams {
                n: args.n,
                k: args.k,
                p: args.p,
                q: args.q,
                alpha: args.alpha,
                tau: args.tau,
                threshold: args.threshold,
                norm: match args.norm {
                    NormArg::L1 => NormKind::L1,
                    NormArg::Linf => NormKind::LInf,
                },
            };
            let inst = gen_graph_type(gtype, &params, args.weighted, args.seed)
                .map_err(|e| e.to_string())?;
            (inst, None)
        }
        FamilyArg::Disk => {
            let coords = args
                .coords
                .as_deref()
                .ok_or("--family disk needs --coords")?;
            let points = load_points(coords).map_err(|e| e.to_string())?;
            let inst = gen_disk_graph(&points, args.radius, args.dim).map_err(|e| e.to_string())?;
            (inst, None)
        }
    };

    save_dgp(&args.out, &inst).map_err(|e| e.to_string())?;
    println!(
        "generated {} (n={}, m={}, density={:.3})",
        args.out.display(),
        inst.graph.n_vertices(),
        inst.graph.n_edges(),
        inst.graph.density()
    );
    if let Some(path) = &args.solution_out {
        let witness = witness.ok_or("--solution-out is only available for --family euclid")?;
        save_solution(path, &witness, None).map_err(|e| e.to_string())?;
    }
    if let Some(path) = &args.udgp_out {
        save_udgp(path, &derive_udgp(&inst)).map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn pipeline_config(time_limit: f64, seed: u64, restarts: usize) -> PipelineConfig {
    let mut cfg = PipelineConfig::default();
    cfg.solver.time_limit_s = time_limit;
    cfg.solver.seed = seed;
    cfg.solver.restarts = restarts;
    cfg.milp.time_limit_s = time_limit;
    cfg.sdp.time_limit_s = time_limit;
    cfg
}

fn report_line(
    instance: &std::path::Path,
    formulation: &str,
    report: &SolveReport,
    similarity: Option<f64>,
) {
    let num = |x: f64| {
        if x.is_nan() {
            "-".to_string()
        } else {
            format!("{x:.6}")
        }
    };
    let mut line = format!(
        "instance={} formulation={formulation} status={} objective={} mde={} lde={}",
        instance.display(),
        report.status.as_str(),
        num(report.objective),
        num(report.mde),
        num(report.lde),
    );
    if let Some(s) = similarity {
        line.push_str(&format!(" gphsim={s:.6}"));
    }
    line.push_str(&format!(" cpu={:.3}s", report.cpu_seconds));
    println!("{line}");
}

fn solve(args: SolveArgs) -> Result<(), String> {
    let instance = load_instance(&args.instance).map_err(|e| e.to_string())?;
    let formulation_name;
    let spec = match args.relax {
        None => {
            formulation_name = args.formulation.clone();
            FormulationSpec::parse(&args.formulation)?
        }
        Some(relax) => {
            let refine = args.refine.as_deref().unwrap_or(&args.formulation);
            let (kind, cycles) = parse_dgp_formulation(refine).map_err(|e| e.to_string())?;
            let relax = match relax {
                RelaxArg::Sdp => MatrixRelax::Sdp,
                RelaxArg::Dd => MatrixRelax::Dd,
                RelaxArg::Dualdd => MatrixRelax::DualDd,
            };
            formulation_name = format!("{}_pca_{refine}", relax.name());
            FormulationSpec::Pipeline(relax, kind, cycles)
        }
    };
    let cfg = pipeline_config(args.time_limit, args.seed, args.restarts);
    let out = run_formulation(&spec, &instance, &cfg, None)?;
    report_line(&args.instance, &formulation_name, &out.report, out.gphsim);
    if let Some(path) = &args.out {
        let x = out
            .report
            .realization
            .as_ref()
            .ok_or("no realization to write (infeasible or no solve completed)")?;
        save_solution(path, x, out.report.assignment.as_ref()).map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn usolve(args: UsolveArgs) -> Result<(), String> {
    let instance = load_instance(&args.instance).map_err(|e| e.to_string())?;
    let (kind, cycles) = parse_dgp_formulation(&args.refine).map_err(|e| e.to_string())?;
    let cone = match args.cone {
        ConeArg::Dd => Cone::Dd,
        ConeArg::Dualdd => Cone::DualDd,
    };
    let reference = args
        .reference
        .as_deref()
        .map(|p| load_dgp(p).map(|d| d.graph))
        .transpose()
        .map_err(|e| e.to_string())?;
    let spec = FormulationSpec::UdgpMilp(cone, kind, cycles);
    let cfg = pipeline_config(args.time_limit, args.seed, args.restarts);
    let out = run_formulation(&spec, &instance, &cfg, reference.as_ref())?;
    let name = match cone {
        Cone::Dd => format!("umiddp_{}", args.refine),
        Cone::DualDd => format!("umidualddp_{}", args.refine),
    };
    report_line(&args.instance, &name, &out.report, out.gphsim);
    if let Some(path) = &args.out {
        let x = out
            .report
            .realization
            .as_ref()
            .ok_or("no realization to write (infeasible or no solve completed)")?;
        save_solution(path, x, out.report.assignment.as_ref()).map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn oracle(args: OracleArgs) -> Result<(), String> {
    let instance = load_instance(&args.instance).map_err(|e| e.to_string())?;
    let Instance::Udgp(inst) = instance else {
        return Err("the oracle enumerates unassigned instances".into());
    };
    let mut cfg = OracleConfig {
        cap: args.cap,
        ..OracleConfig::default()
    };
    cfg.solver.seed = args.seed;
    cfg.solver.restarts = args.restarts;
    cfg.refine_kind = DgpKind::Quartic;
    let outcome = udgp_bruteforce_oracle(&inst, &cfg).map_err(|e| e.to_string())?;
    let best = outcome.best();
    println!(
        "oracle: {} assignments enumerated in {:.3}s",
        outcome.results.len(),
        outcome.cpu_seconds
    );
    println!(
        "best assignment #{}: mde={:.9} lde={:.9} pairs={:?}",
        outcome.best_index,
        best.mde,
        best.lde,
        best.assignment.pairs()
    );
    if let Some(path) = &args.out {
        let x = best
            .realization
            .as_ref()
            .ok_or("best assignment has no realization")?;
        save_solution(path, x, Some(&best.assignment)).map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn run_report(args: ReportArgs) -> Result<(), String> {
    let by = report::GroupBy::parse(&args.group_by)?;
    let text = std::fs::read_to_string(&args.csv).map_err(|e| e.to_string())?;
    let rows = report::parse_csv(&text)?;
    let unfinished = rows.iter().filter(|r| r.status != "Optimal").count();
    if unfinished > 0 {
        eprintln!(
            "note: {unfinished} of {} rows did not finish with Optimal status",
            rows.len()
        );
    }
    let groups = report::aggregate(&rows, by);
    let agg_csv = report::aggregate_to_csv(&groups);
    print!("{agg_csv}");
    if let Some(path) = &args.out_csv {
        std::fs::write(path, &agg_csv).map_err(|e| e.to_string())?;
    }
    if let Some(path) = &args.out_svg {
        std::fs::write(path, report::render_svg(&groups, args.scale_cpu))
            .map_err(|e| e.to_string())?;
    }
    Ok(())
}
