//! JSON instance/solution files and plain-text coordinate input.
//!
//! Formats, chosen to be human-diffable and trivially parseable anywhere:
//!
//! - assigned instance: `{"k": K, "n": N, "edges": [[u, v, d], ...]}`
//! - unassigned instance: `{"k": K, "n": N, "distances": [d, ...]}`
//! - solution: `{"coords": [[...], ...], "assignment": [[i, j], ...]?}`
//! - coordinates: one point per line, whitespace-separated reals, an
//!   optional leading label token, `#` comments.

use crate::types::{Assignment, DgpInstance, Graph, ModelError, Realization, UdgpInstance};
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("coordinate file line {line}: {reason}")]
    BadPoints { line: usize, reason: String },
}

#[derive(Serialize, Deserialize)]
struct DgpJson {
    k: usize,
    n: usize,
    edges: Vec<(usize, usize, f64)>,
}

#[derive(Serialize, Deserialize)]
struct UdgpJson {
    k: usize,
    n: usize,
    distances: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum InstanceJson {
    Dgp(DgpJson),
    Udgp(UdgpJson),
}

#[derive(Serialize, Deserialize)]
struct SolutionJson {
    coords: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    assignment: Option<Vec<(usize, usize)>>,
}

/// Either instance kind, as read from disk.
#[derive(Debug, Clone)]
pub enum Instance {
    Dgp(DgpInstance),
    Udgp(UdgpInstance),
}

pub fn instance_to_string(inst: &Instance) -> String {
    let json = match inst {
        Instance::Dgp(d) => InstanceJson::Dgp(DgpJson {
            k: d.k,
            n: d.graph.n_vertices(),
            edges: d.graph.edges().iter().map(|e| (e.u, e.v, e.d)).collect(),
        }),
        Instance::Udgp(u) => InstanceJson::Udgp(UdgpJson {
            k: u.k,
            n: u.n_points,
            distances: u.distances.clone(),
        }),
    };
    let mut s = serde_json::to_string_pretty(&json).expect("instance serializes");
    s.push('\n');
    s
}

pub fn save_dgp(path: &Path, inst: &DgpInstance) -> Result<(), IoError> {
    std::fs::write(path, instance_to_string(&Instance::Dgp(inst.clone())))?;
    Ok(())
}

pub fn save_udgp(path: &Path, inst: &UdgpInstance) -> Result<(), IoError> {
    std::fs::write(path, instance_to_string(&Instance::Udgp(inst.clone())))?;
    Ok(())
}

pub fn load_instance(path: &Path) -> Result<Instance, IoError> {
    let text = std::fs::read_to_string(path)?;
    let json: InstanceJson = serde_json::from_str(&text)?;
    Ok(match json {
        InstanceJson::Dgp(d) => {
            let graph = Graph::new(d.n, d.edges)?;
            Instance::Dgp(DgpInstance::new(d.k, graph)?)
        }
        InstanceJson::Udgp(u) => Instance::Udgp(UdgpInstance::new(u.k, u.n, u.distances)?),
    })
}

pub fn load_dgp(path: &Path) -> Result<DgpInstance, IoError> {
    match load_instance(path)? {
        Instance::Dgp(d) => Ok(d),
        Instance::Udgp(_) => Err(IoError::BadPoints {
            line: 0,
            reason: "expected an assigned instance with edges".into(),
        }),
    }
}

pub fn load_udgp(path: &Path) -> Result<UdgpInstance, IoError> {
    match load_instance(path)? {
        Instance::Udgp(u) => Ok(u),
        Instance::Dgp(_) => Err(IoError::BadPoints {
            line: 0,
            reason: "expected an unassigned instance with a distance list".into(),
        }),
    }
}

pub fn solution_to_string(x: &Realization, assignment: Option<&Assignment>) -> String {
    let json = SolutionJson {
        coords: x.coords().to_vec(),
        assignment: assignment.map(|a| a.pairs().to_vec()),
    };
    let mut s = serde_json::to_string_pretty(&json).expect("solution serializes");
    s.push('\n');
    s
}

pub fn save_solution(
    path: &Path,
    x: &Realization,
    assignment: Option<&Assignment>,
) -> Result<(), IoError> {
    std::fs::write(path, solution_to_string(x, assignment))?;
    Ok(())
}

pub fn load_solution(path: &Path) -> Result<(Realization, Option<Assignment>), IoError> {
    let text = std::fs::read_to_string(path)?;
    let json: SolutionJson = serde_json::from_str(&text)?;
    let x = Realization::new(json.coords)?;
    let a = json.assignment.map(Assignment::new).transpose()?;
    Ok((x, a))
}

/// Parses coordinate text: one point per line, whitespace-separated reals,
/// optionally led by a non-numeric label token. Blank lines and `#` comments
/// are skipped; every point must have the same dimension.
pub fn parse_points(text: &str) -> Result<Vec<Vec<f64>>, IoError> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace().peekable();
        if let Some(first) = tokens.peek() {
            if first.parse::<f64>().is_err() {
                tokens.next(); // label
            }
        }
        let coords: Result<Vec<f64>, _> = tokens.map(|t| t.parse::<f64>()).collect();
        let coords = coords.map_err(|e| IoError::BadPoints {
            line: i + 1,
            reason: e.to_string(),
        })?;
        if coords.is_empty() {
            return Err(IoError::BadPoints {
                line: i + 1,
                reason: "no coordinates".into(),
            });
        }
        if let Some(prev) = out.first() {
            if coords.len() != prev.len() {
                return Err(IoError::BadPoints {
                    line: i + 1,
                    reason: format!("expected {} coordinates, got {}", prev.len(), coords.len()),
                });
            }
        }
        out.push(coords);
    }
    Ok(out)
}

pub fn load_points(path: &Path) -> Result<Vec<Vec<f64>>, IoError> {
    parse_points(&std::fs::read_to_string(path)?)
}
