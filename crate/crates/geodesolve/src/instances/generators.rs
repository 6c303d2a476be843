//! Seed-deterministic instance generators.

use crate::types::{DgpInstance, Graph, ModelError, Realization};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

/// Side length of the square the planted points are drawn from.
const PLANT_BOX: f64 = 10.0;
/// Random edge weights for the weighted graph-type variants.
const WEIGHT_RANGE: std::ops::Range<f64> = 1.0..10.0;

/// Planted planar instance: points in a box, a Hamiltonian cycle for
/// biconnectivity, extra edges with probability `p`, weights equal to the
/// planted distances. Realizable in the plane by construction; the witness
/// realization is returned alongside.
pub fn gen_euclidean(
    n: usize,
    p: f64,
    seed: u64,
) -> Result<(DgpInstance, Realization), ModelError> {
    assert!(n >= 3, "euclidean family needs at least 3 vertices");
    assert!(p > 0.0 && p <= 1.0, "sparsity must lie in (0, 1]");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            vec![
                rng.random_range(0.0..PLANT_BOX),
                rng.random_range(0.0..PLANT_BOX),
            ]
        })
        .collect();
    let dist = |u: usize, v: usize| -> f64 {
        points[u]
            .iter()
            .zip(&points[v])
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    };
    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    for v in 0..n {
        let w = (v + 1) % n;
        edges.insert((v.min(w) + 1, v.max(w) + 1));
    }
    for u in 1..=n {
        for v in u + 1..=n {
            if !edges.contains(&(u, v)) && rng.random_bool(p) {
                edges.insert((u, v));
            }
        }
    }
    let graph = Graph::new(
        n,
        edges
            .iter()
            .map(|&(u, v)| (u, v, dist(u - 1, v - 1).max(1e-9))),
    )?;
    let inst = DgpInstance::new(2, graph)?;
    let witness = Realization::new(points)?;
    Ok((inst, witness))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    L1,
    LInf,
}

/// The fifteen generator topologies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphType {
    AlmostReg,
    Random,
    Bipartite,
    Tripartite,
    Mesh,
    Torus,
    Triangle,
    Cluster,
    PowerLaw,
    CliqueChain,
    TriChain,
    Dmdgp,
    BeekerGlusa,
    Local,
    Norm,
}

pub const GRAPH_TYPE_NAMES: [&str; 15] = [
    "almostreg",
    "random",
    "bipartite",
    "tripartite",
    "mesh",
    "torus",
    "triangle",
    "cluster",
    "powerlaw",
    "cliquechain",
    "trichain",
    "dmdgp",
    "beeker_glusa",
    "local",
    "norm",
];

impl GraphType {
    pub fn parse(name: &str) -> Option<GraphType> {
        Some(match name {
            "almostreg" => GraphType::AlmostReg,
            "random" => GraphType::Random,
            "bipartite" => GraphType::Bipartite,
            "tripartite" => GraphType::Tripartite,
            "mesh" => GraphType::Mesh,
            "torus" => GraphType::Torus,
            "triangle" => GraphType::Triangle,
            "cluster" => GraphType::Cluster,
            "powerlaw" => GraphType::PowerLaw,
            "cliquechain" => GraphType::CliqueChain,
            "trichain" => GraphType::TriChain,
            "dmdgp" => GraphType::Dmdgp,
            "beeker_glusa" => GraphType::BeekerGlusa,
            "local" => GraphType::Local,
            "norm" => GraphType::Norm,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        GRAPH_TYPE_NAMES[*self as usize]
    }
}

/// Parameters for [`gen_graph_type`]; each topology reads the fields it
/// needs and ignores the rest.
#[derive(Debug, Clone)]
pub struct GraphTypeParams {
    /// Vertex count, mesh side, or vertices per triangle side, depending on
    /// the topology.
    pub n: usize,
    /// Target degree (almost-regular), clique size, cluster count, or number
    /// of contiguous predecessors.
    pub k: usize,
    /// Edge probability.
    pub p: f64,
    /// Inter-cluster edge probability.
    pub q: f64,
    /// Power-law scale.
    pub alpha: f64,
    /// Power-law exponent.
    pub tau: f64,
    /// Distance threshold for the `local` type.
    pub threshold: f64,
    /// Which norm weighs the `norm` type.
    pub norm: NormKind,
}

impl Default for GraphTypeParams {
    fn default() -> Self {
        GraphTypeParams {
            n: 10,
            k: 3,
            p: 0.5,
            q: 0.1,
            alpha: 0.5,
            tau: 1.0,
            threshold: 4.0,
            norm: NormKind::L1,
        }
    }
}

/// Generates one of the topological graph families. `weighted` draws
/// uniform random weights for the purely topological types; the geometric
/// types (`beeker_glusa`, `local`, `norm`) carry weights from their own
/// construction and are weighted regardless.
pub fn gen_graph_type(
    gtype: GraphType,
    params: &GraphTypeParams,
    weighted: bool,
    seed: u64,
) -> Result<DgpInstance, ModelError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (n_vertices, weighted_edges): (usize, Vec<(usize, usize, f64)>) = match gtype {
        GraphType::AlmostReg => {
            let n = params.n;
            let mut edges = BTreeSet::new();
            let mut deg = vec![0usize; n + 1];
            // repeated random pairing passes over the deficit vertices
            for _ in 0..4 * params.k {
                let mut deficit: Vec<usize> = (1..=n).filter(|&v| deg[v] < params.k).collect();
                if deficit.len() < 2 {
                    break;
                }
                // Fisher-Yates
                for i in (1..deficit.len()).rev() {
                    let j = rng.random_range(0..=i);
                    deficit.swap(i, j);
                }
                for pair in deficit.chunks(2) {
                    if let [a, b] = pair {
                        let (u, v) = (*a.min(b), *a.max(b));
                        if u != v && edges.insert((u, v)) {
                            deg[u] += 1;
                            deg[v] += 1;
                        }
                    }
                }
            }
            (n, plain(edges))
        }
        GraphType::Random => {
            let n = params.n;
            let mut edges = Vec::new();
            for u in 1..=n {
                for v in u + 1..=n {
                    if rng.random_bool(params.p) {
                        edges.push((u, v, 1.0));
                    }
                }
            }
            (n, edges)
        }
        GraphType::Bipartite => {
            let n = params.n;
            let mut edges = Vec::new();
            for u in 1..=n {
                for v in n + 1..=2 * n {
                    if rng.random_bool(params.p) {
                        edges.push((u, v, 1.0));
                    }
                }
            }
            (2 * n, edges)
        }
        GraphType::Tripartite => {
            let n = params.n;
            let part = |v: usize| (v - 1) / n;
            let mut edges = Vec::new();
            for u in 1..=3 * n {
                for v in u + 1..=3 * n {
                    if part(u) != part(v) && rng.random_bool(params.p) {
                        edges.push((u, v, 1.0));
                    }
                }
            }
            (3 * n, edges)
        }
        GraphType::Mesh | GraphType::Torus => {
            let side = params.n;
            let id = |r: usize, c: usize| r * side + c + 1;
            let mut edges = BTreeSet::new();
            for r in 0..side {
                for c in 0..side {
                    if c + 1 < side {
                        edges.insert((id(r, c), id(r, c + 1)));
                    }
                    if r + 1 < side {
                        edges.insert((id(r, c), id(r + 1, c)));
                    }
                    if gtype == GraphType::Torus && side > 2 {
                        if c + 1 == side {
                            edges.insert((id(r, 0).min(id(r, c)), id(r, 0).max(id(r, c))));
                        }
                        if r + 1 == side {
                            edges.insert((id(0, c).min(id(r, c)), id(0, c).max(id(r, c))));
                        }
                    }
                }
            }
            (side * side, plain(edges))
        }
        GraphType::Triangle => {
            // triangular patch with params.n vertices per side
            let side = params.n;
            let id = |r: usize, i: usize| r * (r + 1) / 2 + i + 1; // row r has r+1 nodes
            let mut edges = Vec::new();
            for r in 0..side {
                for i in 0..=r {
                    if i < r {
                        edges.push((id(r, i), id(r, i + 1), 1.0));
                    }
                    if r + 1 < side {
                        edges.push((id(r, i), id(r + 1, i), 1.0));
                        edges.push((id(r, i), id(r + 1, i + 1), 1.0));
                    }
                }
            }
            (side * (side + 1) / 2, edges)
        }
        GraphType::Cluster => {
            let n = params.n;
            let clusters = params.k.max(1);
            let of = |v: usize| (v - 1) * clusters / n;
            let mut edges = Vec::new();
            for u in 1..=n {
                for v in u + 1..=n {
                    let prob = if of(u) == of(v) { params.p } else { params.q };
                    if prob > 0.0 && rng.random_bool(prob.min(1.0)) {
                        edges.push((u, v, 1.0));
                    }
                }
            }
            (n, edges)
        }
        GraphType::PowerLaw => {
            let n = params.n;
            let mut edges = BTreeSet::new();
            let mut deg = vec![0usize; n + 1];
            let target = |i: usize| -> usize {
                let t = (n as f64 * params.alpha * (i as f64).powf(-params.tau)).ceil();
                (t as usize).clamp(1, n.saturating_sub(1).max(1))
            };
            for i in 1..=n {
                if n < 2 {
                    break;
                }
                let want = target(i);
                let mut attempts = 0;
                while deg[i] < want && attempts < 50 * n {
                    attempts += 1;
                    let j = rng.random_range(1..=n);
                    if j == i {
                        continue;
                    }
                    let (u, v) = (i.min(j), i.max(j));
                    if edges.insert((u, v)) {
                        deg[u] += 1;
                        deg[v] += 1;
                    }
                }
            }
            (n, plain(edges))
        }
        GraphType::CliqueChain | GraphType::TriChain => {
            let n = params.n;
            let k = if gtype == GraphType::TriChain {
                3
            } else {
                params.k.max(2)
            };
            let mut edges = BTreeSet::new();
            let mut pos = 1;
            while pos < n {
                let end = (pos + k - 1).min(n);
                for u in pos..=end {
                    for v in u + 1..=end {
                        edges.insert((u, v));
                    }
                }
                if end == n {
                    break;
                }
                pos = end; // consecutive cliques share one vertex
            }
            (n, plain(edges))
        }
        GraphType::Dmdgp => {
            let n = params.n;
            let k = params.k.max(1);
            let mut edges = Vec::new();
            for v in 2..=n {
                for u in v.saturating_sub(k).max(1)..v {
                    edges.push((u, v, 1.0));
                }
            }
            (n, edges)
        }
        GraphType::BeekerGlusa => {
            // chain of triangles realized as a strip of unit equilateral
            // triangles: both chain and skip edges have length one
            let n = params.n;
            let mut edges = Vec::new();
            for v in 1..n {
                edges.push((v, v + 1, 1.0));
                if v + 2 <= n {
                    edges.push((v, v + 2, 1.0));
                }
            }
            (n, edges)
        }
        GraphType::Local => {
            let n = params.n;
            let pts = plant_points(n, &mut rng);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    let d = l2(&pts[u], &pts[v]);
                    if d <= params.threshold && d > 0.0 {
                        edges.push((u + 1, v + 1, d));
                    }
                }
            }
            (n, edges)
        }
        GraphType::Norm => {
            let n = params.n;
            let pts = plant_points(n, &mut rng);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.random_bool(params.p) {
                        let d = match params.norm {
                            NormKind::L1 => {
                                pts[u].iter().zip(&pts[v]).map(|(a, b)| (a - b).abs()).sum()
                            }
                            NormKind::LInf => pts[u]
                                .iter()
                                .zip(&pts[v])
                                .map(|(a, b)| (a - b).abs())
                                .fold(0.0, f64::max),
                        };
                        if d > 0.0 {
                            edges.push((u + 1, v + 1, d));
                        }
                    }
                }
            }
            (n, edges)
        }
    };

    let intrinsic = matches!(
        gtype,
        GraphType::BeekerGlusa | GraphType::Local | GraphType::Norm
    );
    let final_edges: Vec<(usize, usize, f64)> = weighted_edges
        .into_iter()
        .map(|(u, v, d)| {
            if intrinsic {
                (u, v, d)
            } else if weighted {
                (u, v, rng.random_range(WEIGHT_RANGE))
            } else {
                (u, v, 1.0)
            }
        })
        .collect();
    DgpInstance::new(2, Graph::new(n_vertices, final_edges)?)
}

fn plain(edges: BTreeSet<(usize, usize)>) -> Vec<(usize, usize, f64)> {
    edges.into_iter().map(|(u, v)| (u, v, 1.0)).collect()
}

fn plant_points(n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| {
            vec![
                rng.random_range(0.0..PLANT_BOX),
                rng.random_range(0.0..PLANT_BOX),
            ]
        })
        .collect()
}

fn l2(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Disk graph over explicit coordinates: the edges are exactly the point
/// pairs within `radius`, weighted by their Euclidean distance. Isolated
/// vertices stay in the vertex set. `k` is the embedding dimension of the
/// produced instance.
pub fn gen_disk_graph(
    points: &[Vec<f64>],
    radius: f64,
    k: usize,
) -> Result<DgpInstance, ModelError> {
    assert!(radius > 0.0, "disk radius must be positive");
    let n = points.len();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let d = l2(&points[u], &points[v]);
            if d <= radius && d > 0.0 {
                edges.push((u + 1, v + 1, d));
            }
        }
    }
    DgpInstance::new(k, Graph::new(n, edges)?)
}
