//! Benchmark harness: runs an (instance x formulation) grid from a JSON
//! config, appending one CSV row per pair. Re-running with the same config
//! skips pairs already present in the output CSV, so interrupted sweeps
//! resume where they stopped.

use crate::formulation::{run_formulation, FormulationSpec};
use geodesolve::instances::{load_dgp, load_instance, Instance};
use geodesolve::pipelines::PipelineConfig;
use geodesolve::types::Graph;
use rayon::prelude::*;
use serde::Deserialize;
use std::collections::HashSet;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

pub const CSV_HEADER: &str =
    "instance,vertices,edges,density,formulation,mde,lde,gphsim,cpu_seconds,status";

#[derive(Debug, Deserialize)]
pub struct BenchConfig {
    /// Instance paths; entries may use a trailing `*` glob on the file name.
    pub instances: Vec<String>,
    pub formulations: Vec<String>,
    #[serde(default = "default_time_limit")]
    pub time_limit_s: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    pub out_csv: PathBuf,
    #[serde(default)]
    pub jobs: Option<usize>,
    /// Optional map from unassigned instance path to the assigned instance
    /// it was derived from, enabling the similarity column.
    #[serde(default)]
    pub references: std::collections::BTreeMap<String, String>,
}

fn default_time_limit() -> f64 {
    300.0
}

fn default_restarts() -> usize {
    10
}

/// Expands instance entries: plain paths pass through, a `*` in the file
/// name matches by prefix/suffix within the parent directory.
fn expand_instances(patterns: &[String]) -> Result<Vec<PathBuf>, String> {
    let mut out = Vec::new();
    for pat in patterns {
        if !pat.contains('*') {
            out.push(PathBuf::from(pat));
            continue;
        }
        let path = Path::new(pat);
        let dir = path
            .parent()
            .filter(|p| !p.as_os_str().is_empty())
            .unwrap_or(Path::new("."));
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("*");
        let (prefix, suffix) = name.split_once('*').ok_or("glob only in the file name")?;
        let mut matched: Vec<PathBuf> = std::fs::read_dir(dir)
            .map_err(|e| format!("{}: {e}", dir.display()))?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| {
                p.file_name()
                    .and_then(|n| n.to_str())
                    .is_some_and(|n| n.starts_with(prefix) && n.ends_with(suffix))
            })
            .collect();
        matched.sort();
        out.extend(matched);
    }
    Ok(out)
}

/// Pairs already recorded in the CSV, keyed by (instance, formulation).
fn completed_pairs(csv: &Path) -> HashSet<(String, String)> {
    let Ok(text) = std::fs::read_to_string(csv) else {
        return HashSet::new();
    };
    text.lines()
        .skip(1)
        .filter_map(|line| {
            let mut fields = line.split(',');
            let inst = fields.next()?.to_string();
            let formulation = fields.nth(3)?.to_string();
            Some((inst, formulation))
        })
        .collect()
}

pub fn format_row(
    instance: &str,
    inst: &Instance,
    formulation: &str,
    report: &geodesolve::types::SolveReport,
    similarity: Option<f64>,
) -> String {
    let (v, e, density) = match inst {
        Instance::Dgp(d) => (d.graph.n_vertices(), d.graph.n_edges(), d.graph.density()),
        Instance::Udgp(u) => {
            let pairs = u.n_pairs().max(1);
            (u.n_points, u.m(), u.m() as f64 / pairs as f64)
        }
    };
    let fmt = |x: f64| {
        if x.is_nan() {
            String::new()
        } else {
            format!("{x:.9}")
        }
    };
    format!(
        "{instance},{v},{e},{density:.6},{formulation},{},{},{},{:.3},{}",
        fmt(report.mde),
        fmt(report.lde),
        similarity.map(|s| format!("{s:.6}")).unwrap_or_default(),
        report.cpu_seconds,
        report.status.as_str(),
    )
}

pub fn run_bench(config_path: &Path, jobs_flag: Option<usize>) -> Result<(), String> {
    let text = std::fs::read_to_string(config_path)
        .map_err(|e| format!("{}: {e}", config_path.display()))?;
    let config: BenchConfig = serde_json::from_str(&text).map_err(|e| e.to_string())?;

    let jobs = jobs_flag
        .or_else(|| {
            std::env::var("GEODESOLVE_JOBS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .or(config.jobs)
        .unwrap_or(1)
        .max(1);

    let instances = expand_instances(&config.instances)?;
    let done = completed_pairs(&config.out_csv);

    // validate formulations upfront so a typo fails before hours of solving
    for f in &config.formulations {
        FormulationSpec::parse(f)?;
    }

    let mut grid: Vec<(PathBuf, String)> = Vec::new();
    for inst in &instances {
        for f in &config.formulations {
            let key = (inst.display().to_string(), f.clone());
            if !done.contains(&key) {
                grid.push((inst.clone(), f.clone()));
            }
        }
    }
    eprintln!(
        "bench: {} pairs to run ({} already in {})",
        grid.len(),
        done.len(),
        config.out_csv.display()
    );

    let need_header = !config.out_csv.exists();
    let file = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(&config.out_csv)
        .map_err(|e| e.to_string())?;
    let writer = Mutex::new(file);
    if need_header {
        writeln!(writer.lock().unwrap(), "{CSV_HEADER}").map_err(|e| e.to_string())?;
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| e.to_string())?;
    let errors: Vec<String> = pool.install(|| {
        grid.par_iter()
            .filter_map(
                |(path, formulation)| match run_one(&config, path, formulation) {
                    Ok(row) => {
                        let mut w = writer.lock().unwrap();
                        if let Err(e) = writeln!(w, "{row}") {
                            return Some(format!("write: {e}"));
                        }
                        None
                    }
                    Err(e) => Some(format!("{} x {formulation}: {e}", path.display())),
                },
            )
            .collect()
    });
    for e in &errors {
        eprintln!("bench error: {e}");
    }
    if errors.is_empty() {
        Ok(())
    } else {
        Err(format!("{} grid pairs failed", errors.len()))
    }
}

fn run_one(config: &BenchConfig, path: &Path, formulation: &str) -> Result<String, String> {
    let spec = FormulationSpec::parse(formulation)?;
    let instance = load_instance(path).map_err(|e| e.to_string())?;
    let reference: Option<Graph> = config
        .references
        .get(&path.display().to_string())
        .map(|ref_path| load_dgp(Path::new(ref_path)).map(|d| d.graph))
        .transpose()
        .map_err(|e| e.to_string())?;

    let mut cfg = PipelineConfig::default();
    cfg.solver.seed = config.seed;
    cfg.solver.restarts = config.restarts;
    cfg.solver.time_limit_s = config.time_limit_s;
    cfg.milp.time_limit_s = config.time_limit_s;
    cfg.sdp.time_limit_s = config.time_limit_s;

    let out = run_formulation(&spec, &instance, &cfg, reference.as_ref())?;
    Ok(format_row(
        &path.display().to_string(),
        &instance,
        formulation,
        &out.report,
        out.gphsim,
    ))
}
