//! Domain types shared by every module: graphs, instances, realizations,
//! assignments, and solve reports.
//!
//! Vertex ids are 1-based throughout, matching the usual notation for
//! distance geometry. All types are immutable after construction and safe
//! to share across threads.

use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("graph has {n} vertices but edge ({u},{v}) references a vertex outside 1..={n}")]
    VertexOutOfRange { u: usize, v: usize, n: usize },
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0},{1})")]
    DuplicateEdge(usize, usize),
    #[error("edge ({u},{v}) has non-positive or non-finite weight {d}")]
    BadWeight { u: usize, v: usize, d: f64 },
    #[error("embedding dimension must be at least 1")]
    BadDimension,
    #[error("instance must have at least one point")]
    NoPoints,
    #[error("distance list entry {index} is non-positive or non-finite: {value}")]
    BadDistance { index: usize, value: f64 },
    #[error("realization rows have inconsistent lengths")]
    RaggedRealization,
    #[error("realization contains a non-finite coordinate")]
    NonFiniteCoordinate,
    #[error("assignment pair ({0},{1}) is degenerate")]
    DegeneratePair(usize, usize),
    #[error("assignment maps two distance indices to the same pair ({0},{1})")]
    DuplicatePair(usize, usize),
    #[error("assignment has {got} pairs but the instance lists {want} distances")]
    AssignmentLength { got: usize, want: usize },
    #[error("assignment pair ({u},{v}) references a point outside 1..={n}")]
    PairOutOfRange { u: usize, v: usize, n: usize },
}

/// A single weighted edge, stored with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub d: f64,
}

/// Simple undirected edge-weighted graph, the assigned-problem input.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n_vertices: usize,
    edges: Vec<Edge>,
}

impl Graph {
    /// Builds a graph from 1-based `(u, v, d)` triples. Pairs are normalized
    /// to `u < v`; duplicates, self-loops, out-of-range ids and non-positive
    /// weights are rejected.
    pub fn new(
        n_vertices: usize,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self, ModelError> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for (u, v, d) in edges {
            if u == v {
                return Err(ModelError::SelfLoop(u));
            }
            let (u, v) = if u < v { (u, v) } else { (v, u) };
            if u < 1 || v > n_vertices {
                return Err(ModelError::VertexOutOfRange {
                    u,
                    v,
                    n: n_vertices,
                });
            }
            if !d.is_finite() || d <= 0.0 {
                return Err(ModelError::BadWeight { u, v, d });
            }
            if !seen.insert((u, v)) {
                return Err(ModelError::DuplicateEdge(u, v));
            }
            out.push(Edge { u, v, d });
        }
        Ok(Graph {
            n_vertices,
            edges: out,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Edge density `|E| / (n(n-1)/2)`; zero for graphs on fewer than two vertices.
    pub fn density(&self) -> f64 {
        let pairs = self.n_vertices * self.n_vertices.saturating_sub(1) / 2;
        if pairs == 0 {
            0.0
        } else {
            self.edges.len() as f64 / pairs as f64
        }
    }

    /// Sum of edge weights; the square root of the slack big-M constant and
    /// an upper bound on the diameter of any exact realization.
    pub fn weight_sum(&self) -> f64 {
        self.edges.iter().map(|e| e.d).sum()
    }

    /// Unweighted degree of each vertex (0-based slot `v-1`).
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.n_vertices];
        for e in &self.edges {
            deg[e.u - 1] += 1;
            deg[e.v - 1] += 1;
        }
        deg
    }

    /// Edges sorted lexicographically by `(u, v)`; the fixed order used when
    /// deriving an unassigned instance.
    pub fn sorted_edges(&self) -> Vec<Edge> {
        let mut es = self.edges.clone();
        es.sort_by_key(|a| (a.u, a.v));
        es
    }

    /// Number of connected components (isolated vertices count).
    pub fn n_components(&self) -> usize {
        let n = self.n_vertices;
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for e in &self.edges {
            let (a, b) = (find(&mut parent, e.u - 1), find(&mut parent, e.v - 1));
            if a != b {
                parent[a] = b;
            }
        }
        (0..n).filter(|&v| find(&mut parent, v) == v).count()
    }
}

/// Assigned distance geometry instance: an embedding dimension and a graph.
#[derive(Debug, Clone, PartialEq)]
pub struct DgpInstance {
    pub k: usize,
    pub graph: Graph,
}

impl DgpInstance {
    pub fn new(k: usize, graph: Graph) -> Result<Self, ModelError> {
        if k < 1 {
            return Err(ModelError::BadDimension);
        }
        Ok(DgpInstance { k, graph })
    }
}

/// Unassigned instance: dimension, point count, and a multiset of distances.
#[derive(Debug, Clone, PartialEq)]
pub struct UdgpInstance {
    pub k: usize,
    pub n_points: usize,
    pub distances: Vec<f64>,
}

impl UdgpInstance {
    pub fn new(k: usize, n_points: usize, distances: Vec<f64>) -> Result<Self, ModelError> {
        if k < 1 {
            return Err(ModelError::BadDimension);
        }
        if n_points < 1 {
            return Err(ModelError::NoPoints);
        }
        for (i, &d) in distances.iter().enumerate() {
            if !d.is_finite() || d <= 0.0 {
                return Err(ModelError::BadDistance { index: i, value: d });
            }
        }
        Ok(UdgpInstance {
            k,
            n_points,
            distances,
        })
    }

    pub fn m(&self) -> usize {
        self.distances.len()
    }

    /// Number of unordered point pairs `n(n-1)/2`.
    pub fn n_pairs(&self) -> usize {
        self.n_points * (self.n_points - 1) / 2
    }

    /// The slack big-M constant `(sum of distances)^2`, an upper bound on the
    /// squared diameter of any exact realization.
    pub fn big_m(&self) -> f64 {
        let s: f64 = self.distances.iter().sum();
        s * s
    }
}

/// An `n x K` coordinate matrix: one row per point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Realization {
    coords: Vec<Vec<f64>>,
}

impl Realization {
    pub fn new(coords: Vec<Vec<f64>>) -> Result<Self, ModelError> {
        if let Some(first) = coords.first() {
            let k = first.len();
            for row in &coords {
                if row.len() != k {
                    return Err(ModelError::RaggedRealization);
                }
                if row.iter().any(|c| !c.is_finite()) {
                    return Err(ModelError::NonFiniteCoordinate);
                }
            }
        }
        Ok(Realization { coords })
    }

    /// Builds from a flat row-major slice.
    pub fn from_flat(n: usize, k: usize, flat: &[f64]) -> Result<Self, ModelError> {
        assert_eq!(flat.len(), n * k, "flat coordinate buffer has wrong length");
        Self::new((0..n).map(|i| flat[i * k..(i + 1) * k].to_vec()).collect())
    }

    pub fn n_points(&self) -> usize {
        self.coords.len()
    }

    pub fn dim(&self) -> usize {
        self.coords.first().map_or(0, |r| r.len())
    }

    pub fn coords(&self) -> &[Vec<f64>] {
        &self.coords
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.coords[i]
    }

    /// Squared Euclidean distance between rows `i` and `j` (0-based).
    pub fn sq_dist(&self, i: usize, j: usize) -> f64 {
        self.coords[i]
            .iter()
            .zip(&self.coords[j])
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.sq_dist(i, j).sqrt()
    }
}

/// Injective map from distance indices to unordered vertex pairs, stored as
/// 1-based `(i, j)` with `i < j`, one pair per distance index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pairs: Vec<(usize, usize)>,
}

impl Assignment {
    pub fn new(pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, ModelError> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for (i, j) in pairs {
            if i == j {
                return Err(ModelError::DegeneratePair(i, j));
            }
            let (i, j) = if i < j { (i, j) } else { (j, i) };
            if !seen.insert((i, j)) {
                return Err(ModelError::DuplicatePair(i, j));
            }
            out.push((i, j));
        }
        Ok(Assignment { pairs: out })
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Checks the assignment against an instance: length `m` and pair ids
    /// within `1..=n`.
    pub fn validate_for(&self, inst: &UdgpInstance) -> Result<(), ModelError> {
        if self.pairs.len() != inst.m() {
            return Err(ModelError::AssignmentLength {
                got: self.pairs.len(),
                want: inst.m(),
            });
        }
        for &(i, j) in &self.pairs {
            if i < 1 || j > inst.n_points {
                return Err(ModelError::PairOutOfRange {
                    u: i,
                    v: j,
                    n: inst.n_points,
                });
            }
        }
        Ok(())
    }
}

/// Terminal state of a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Optimal,
    FeasiblePoint,
    Infeasible,
    Unbounded,
    TimeLimit,
    NumericFailure,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveStatus::Optimal => "Optimal",
            SolveStatus::FeasiblePoint => "FeasiblePoint",
            SolveStatus::Infeasible => "Infeasible",
            SolveStatus::Unbounded => "Unbounded",
            SolveStatus::TimeLimit => "TimeLimit",
            SolveStatus::NumericFailure => "NumericFailure",
        }
    }
}

/// Outcome of a solve: best realization found (absent when infeasible),
/// optional assignment for unassigned problems, realization errors, raw
/// objective value, status, and wall time. `mde`/`lde` are `NaN` when the
/// solved program has no graph to measure against.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub realization: Option<Realization>,
    pub assignment: Option<Assignment>,
    pub mde: f64,
    pub lde: f64,
    pub objective: f64,
    pub status: SolveStatus,
    pub cpu_seconds: f64,
}

impl SolveReport {
    /// Marker used when no solve completed at all.
    pub fn no_solution(status: SolveStatus, cpu_seconds: f64) -> Self {
        SolveReport {
            realization: None,
            assignment: None,
            mde: f64::NAN,
            lde: f64::NAN,
            objective: f64::NAN,
            status,
            cpu_seconds,
        }
    }
}

/// Builds the graph determined by an unassigned instance and an assignment:
/// vertices `1..=n`, one edge per distance index, weighted by that distance.
pub fn reconstruct_graph(inst: &UdgpInstance, a: &Assignment) -> Result<Graph, ModelError> {
    a.validate_for(inst)?;
    Graph::new(
        inst.n_points,
        a.pairs()
            .iter()
            .zip(&inst.distances)
            .map(|(&(i, j), &d)| (i, j, d)),
    )
}

/// Forgets the graph structure of an assigned instance, keeping only the
/// dimension, the vertex count, and the edge weights in lexicographic edge
/// order.
pub fn derive_udgp(inst: &DgpInstance) -> UdgpInstance {
    let distances = inst.graph.sorted_edges().iter().map(|e| e.d).collect();
    UdgpInstance {
        k: inst.k,
        n_points: inst.graph.n_vertices(),
        distances,
    }
}

/// The assignment induced by the lexicographic edge order, i.e. the inverse
/// of [`derive_udgp`]: distance index `l` maps to the `l`-th sorted edge.
pub fn order_induced_assignment(g: &Graph) -> Assignment {
    Assignment::new(g.sorted_edges().iter().map(|e| (e.u, e.v)))
        .expect("graph edges are distinct pairs")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example3_instance() -> UdgpInstance {
        UdgpInstance::new(2, 4, vec![2.0, 2.0, 3.0, 4.0, 5.0]).unwrap()
    }

    #[test]
    fn reconstruct_example3_alpha_g() {
        // delta = (2,2,3,4,5) assigned to {1,4},{2,4},{1,2},{2,3},{1,3}
        let inst = example3_instance();
        let a = Assignment::new([(1, 4), (2, 4), (1, 2), (2, 3), (1, 3)]).unwrap();
        let g = reconstruct_graph(&inst, &a).unwrap();
        assert_eq!(g.n_vertices(), 4);
        let mut weights: Vec<((usize, usize), f64)> =
            g.edges().iter().map(|e| ((e.u, e.v), e.d)).collect();
        weights.sort_by_key(|a| a.0);
        assert_eq!(
            weights,
            vec![
                ((1, 2), 3.0),
                ((1, 3), 5.0),
                ((1, 4), 2.0),
                ((2, 3), 4.0),
                ((2, 4), 2.0)
            ]
        );
    }

    #[test]
    fn reconstruct_triangle() {
        let inst = UdgpInstance::new(2, 3, vec![3.0, 4.0, 5.0]).unwrap();
        let a = Assignment::new([(1, 2), (2, 3), (1, 3)]).unwrap();
        let g = reconstruct_graph(&inst, &a).unwrap();
        assert_eq!(g.n_edges(), 3);
        assert_eq!(g.density(), 1.0);
    }

    #[test]
    fn reconstruct_single_edge() {
        let inst = UdgpInstance::new(1, 2, vec![7.0]).unwrap();
        let a = Assignment::new([(1, 2)]).unwrap();
        let g = reconstruct_graph(&inst, &a).unwrap();
        assert_eq!(g.n_edges(), 1);
        assert_eq!(g.edges()[0].d, 7.0);
    }

    #[test]
    fn duplicate_pair_rejected() {
        assert!(matches!(
            Assignment::new([(1, 2), (2, 1)]),
            Err(ModelError::DuplicatePair(1, 2))
        ));
    }

    #[test]
    fn assignment_length_checked() {
        let inst = example3_instance();
        let a = Assignment::new([(1, 2)]).unwrap();
        assert!(matches!(
            reconstruct_graph(&inst, &a),
            Err(ModelError::AssignmentLength { got: 1, want: 5 })
        ));
    }

    #[test]
    fn derive_udgp_example3() {
        let g = Graph::new(
            4,
            [
                (1, 2, 3.0),
                (2, 3, 4.0),
                (1, 3, 5.0),
                (1, 4, 2.0),
                (2, 4, 2.0),
            ],
        )
        .unwrap();
        let u = derive_udgp(&DgpInstance::new(2, g).unwrap());
        assert_eq!(u.n_points, 4);
        let mut ds = u.distances.clone();
        ds.sort_by(f64::total_cmp);
        assert_eq!(ds, vec![2.0, 2.0, 3.0, 4.0, 5.0]);
    }

    #[test]
    fn derive_udgp_edgeless_and_single() {
        let g = Graph::new(3, []).unwrap();
        let u = derive_udgp(&DgpInstance::new(2, g).unwrap());
        assert!(u.distances.is_empty());

        let g = Graph::new(2, [(1, 2, 7.0)]).unwrap();
        let u = derive_udgp(&DgpInstance::new(3, g).unwrap());
        assert_eq!(u.distances, vec![7.0]);
    }

    #[test]
    fn round_trip_graph_up_to_edge_order() {
        let g = Graph::new(5, [(1, 2, 1.5), (4, 5, 2.0), (2, 3, 0.5), (1, 5, 3.0)]).unwrap();
        let inst = DgpInstance::new(2, g.clone()).unwrap();
        let u = derive_udgp(&inst);
        let a = order_induced_assignment(&g);
        let back = reconstruct_graph(&u, &a).unwrap();
        assert_eq!(back.n_vertices(), g.n_vertices());
        assert_eq!(back.sorted_edges(), g.sorted_edges());
    }

    #[test]
    fn graph_invariants_enforced() {
        assert!(Graph::new(2, [(1, 1, 1.0)]).is_err());
        assert!(Graph::new(2, [(1, 2, -1.0)]).is_err());
        assert!(Graph::new(2, [(1, 2, 1.0), (2, 1, 2.0)]).is_err());
        assert!(Graph::new(2, [(1, 3, 1.0)]).is_err());
    }

    #[test]
    fn udgp_invariants() {
        assert!(UdgpInstance::new(0, 3, vec![1.0]).is_err());
        assert!(UdgpInstance::new(2, 3, vec![0.0]).is_err());
        let u = UdgpInstance::new(2, 4, vec![2.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert_eq!(u.big_m(), 256.0);
        assert_eq!(u.n_pairs(), 6);
    }

    #[test]
    fn components_counted() {
        let g = Graph::new(5, [(1, 2, 1.0), (2, 3, 1.0)]).unwrap();
        assert_eq!(g.n_components(), 3);
    }

    #[test]
    fn realization_distances() {
        let x = Realization::new(vec![vec![0.0, 0.0], vec![3.0, 4.0]]).unwrap();
        assert!((x.dist(0, 1) - 5.0).abs() < 1e-12);
        assert!(Realization::new(vec![vec![0.0], vec![1.0, 2.0]]).is_err());
        assert!(Realization::new(vec![vec![f64::NAN]]).is_err());
    }
}
