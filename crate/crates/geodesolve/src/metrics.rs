//! Solution-quality metrics: realization errors (`mde`, `lde`) and the
//! label-independent graph similarity score `gphsim`.

use crate::linalg::laplacian_spectrum;
use crate::types::{Graph, Realization};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricError {
    #[error("realization has {got} rows but the graph has {want} vertices")]
    DimensionMismatch { got: usize, want: usize },
}

/// Sum over edges of `| squared realized distance - squared edge weight |`.
/// Zero exactly when the realization satisfies every edge equation.
pub fn mde(x: &Realization, g: &Graph) -> Result<f64, MetricError> {
    per_edge_errors(x, g).map(|errs| errs.iter().sum())
}

/// Largest per-edge error, same summand as [`mde`].
pub fn lde(x: &Realization, g: &Graph) -> Result<f64, MetricError> {
    per_edge_errors(x, g).map(|errs| errs.iter().fold(0.0, |m: f64, &e| m.max(e)))
}

/// The sum form divided by `|E|`, for cross-size comparisons. Zero edges
/// yield zero.
pub fn mde_normalized(x: &Realization, g: &Graph) -> Result<f64, MetricError> {
    let total = mde(x, g)?;
    Ok(if g.n_edges() == 0 {
        0.0
    } else {
        total / g.n_edges() as f64
    })
}

fn per_edge_errors(x: &Realization, g: &Graph) -> Result<Vec<f64>, MetricError> {
    if x.n_points() != g.n_vertices() {
        return Err(MetricError::DimensionMismatch {
            got: x.n_points(),
            want: g.n_vertices(),
        });
    }
    Ok(g.edges()
        .iter()
        .map(|e| (x.sq_dist(e.u - 1, e.v - 1) - e.d * e.d).abs())
        .collect())
}

/// Node budget for the exact isomorphism search; beyond it the staged score
/// stops at the sequence stages already matched.
const ISO_NODE_BUDGET: usize = 1_000_000;
/// Per-vertex maximum-clique sizes are computed exactly up to this order.
const CLIQUE_EXACT_LIMIT: usize = 64;

/// Label-independent graph similarity in `[-1, 1]`; `1` for isomorphic
/// graphs.
///
/// Equal vertex counts are scored in stages (degree, triangle, and clique
/// sequences, then isomorphism, each worth 1/4); a score below 1 is blended
/// half-and-half with the inner product of the Frobenius-normalized
/// adjacency matrices. Different vertex counts are compared through the dot
/// product of their zero-padded, normalized Laplacian spectra.
pub fn gphsim(g: &Graph, h: &Graph) -> f64 {
    if g.n_vertices() == h.n_vertices() {
        staged_similarity(g, h)
    } else {
        spectral_similarity(g, h)
    }
}

fn staged_similarity(g: &Graph, h: &Graph) -> f64 {
    let n = g.n_vertices();
    let mut score = 0.0f64;
    let mut stages_open = true;

    if sorted(g.degrees()) == sorted(h.degrees()) {
        score += 1.0;
    } else {
        stages_open = false;
    }
    if stages_open {
        if sorted(triangle_counts(g)) == sorted(triangle_counts(h)) {
            score += 1.0;
        } else {
            stages_open = false;
        }
    }
    if stages_open && n <= CLIQUE_EXACT_LIMIT {
        if sorted(clique_sizes(g)) == sorted(clique_sizes(h)) {
            score += 1.0;
        } else {
            stages_open = false;
        }
    } else {
        stages_open = false;
    }
    if stages_open && are_isomorphic(g, h) {
        score += 1.0;
    }
    score /= 4.0;
    if score < 1.0 {
        score = 0.5 * score + 0.5 * normalized_adjacency_trace(g, h);
    }
    score
}

fn spectral_similarity(g: &Graph, h: &Graph) -> f64 {
    let n = g.n_vertices().max(h.n_vertices());
    let mut sg = laplacian_spectrum(g);
    let mut sh = laplacian_spectrum(h);
    sg.resize(n, 0.0);
    sh.resize(n, 0.0);
    let ng = sg.iter().map(|v| v * v).sum::<f64>().sqrt();
    let nh = sh.iter().map(|v| v * v).sum::<f64>().sqrt();
    if ng == 0.0 && nh == 0.0 {
        // two edgeless graphs: identical spectra after padding
        return 1.0;
    }
    if ng == 0.0 || nh == 0.0 {
        return 0.0;
    }
    sg.iter().zip(&sh).map(|(a, b)| a * b).sum::<f64>() / (ng * nh)
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v
}

fn adjacency_masks(g: &Graph) -> Vec<Vec<u64>> {
    let n = g.n_vertices();
    let words = n.div_ceil(64);
    let mut adj = vec![vec![0u64; words]; n];
    for e in g.edges() {
        let (u, v) = (e.u - 1, e.v - 1);
        adj[u][v / 64] |= 1 << (v % 64);
        adj[v][u / 64] |= 1 << (u % 64);
    }
    adj
}

/// Number of triangles through each vertex. Each triangle is discovered once
/// per edge and credited to all three corners, hence the division by three.
pub fn triangle_counts(g: &Graph) -> Vec<usize> {
    let n = g.n_vertices();
    let adj = adjacency_masks(g);
    let mut per_vertex = vec![0usize; n];
    for e in g.edges() {
        let (u, v) = (e.u - 1, e.v - 1);
        for w in 0..n {
            if w == u || w == v {
                continue;
            }
            let has_u = adj[w][u / 64] >> (u % 64) & 1 == 1;
            let has_v = adj[w][v / 64] >> (v % 64) & 1 == 1;
            if has_u && has_v {
                per_vertex[w] += 1;
                per_vertex[u] += 1;
                per_vertex[v] += 1;
            }
        }
    }
    for c in per_vertex.iter_mut() {
        debug_assert_eq!(*c % 3, 0);
        *c /= 3;
    }
    per_vertex
}

/// Size of the largest clique containing each vertex; exact branch-and-bound,
/// intended for graphs up to 64 vertices.
pub fn clique_sizes(g: &Graph) -> Vec<usize> {
    let n = g.n_vertices();
    assert!(
        n <= CLIQUE_EXACT_LIMIT,
        "exact clique search limited to 64 vertices"
    );
    let mut adj = vec![0u64; n];
    for e in g.edges() {
        adj[e.u - 1] |= 1 << (e.v - 1);
        adj[e.v - 1] |= 1 << (e.u - 1);
    }
    (0..n)
        .map(|v| {
            let mut best = 0usize;
            grow_clique(&adj, 1, adj[v], &mut best);
            best + 1 // the vertex itself
        })
        .collect()
}

fn grow_clique(adj: &[u64], size: usize, candidates: u64, best: &mut usize) {
    if size - 1 + candidates.count_ones() as usize <= *best {
        return; // cannot beat the incumbent
    }
    if candidates == 0 {
        *best = (*best).max(size - 1);
        return;
    }
    let mut rest = candidates;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        grow_clique(adj, size + 1, rest & adj[v], best);
        if size - 1 + (rest.count_ones() as usize) < *best {
            return;
        }
    }
    *best = (*best).max(size - 1);
}

/// `trace(nadj(G) nadj(H))` where `nadj` is the adjacency matrix scaled by
/// its Frobenius norm: twice the number of shared edges over the geometric
/// mean of edge counts. Zero when either graph is edgeless.
pub fn normalized_adjacency_trace(g: &Graph, h: &Graph) -> f64 {
    let (mg, mh) = (g.n_edges() as f64, h.n_edges() as f64);
    if mg == 0.0 || mh == 0.0 {
        return 0.0;
    }
    let set: std::collections::HashSet<(usize, usize)> =
        g.edges().iter().map(|e| (e.u, e.v)).collect();
    let shared = h
        .edges()
        .iter()
        .filter(|e| set.contains(&(e.u, e.v)))
        .count() as f64;
    // ||A||_F = sqrt(2m) for a simple graph
    2.0 * shared / ((2.0 * mg).sqrt() * (2.0 * mh).sqrt())
}

/// Exact isomorphism test by backtracking with degree and neighbourhood
/// pruning; gives up (returns `false`) past a fixed node budget.
pub fn are_isomorphic(g: &Graph, h: &Graph) -> bool {
    let n = g.n_vertices();
    if n != h.n_vertices() || g.n_edges() != h.n_edges() {
        return false;
    }
    if sorted(g.degrees()) != sorted(h.degrees()) {
        return false;
    }
    let ga = adjacency_masks(g);
    let ha = adjacency_masks(h);
    let gdeg = g.degrees();
    let hdeg = h.degrees();

    // order G's vertices by decreasing degree for earlier pruning
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| gdeg[b].cmp(&gdeg[a]).then(a.cmp(&b)));

    let mut mapping = vec![usize::MAX; n]; // G vertex -> H vertex
    let mut used = vec![false; n];
    let mut budget = ISO_NODE_BUDGET;
    backtrack_iso(
        &order,
        0,
        &ga,
        &ha,
        &gdeg,
        &hdeg,
        &mut mapping,
        &mut used,
        &mut budget,
    )
}

#[allow(clippy::too_many_arguments)]
fn backtrack_iso(
    order: &[usize],
    depth: usize,
    ga: &[Vec<u64>],
    ha: &[Vec<u64>],
    gdeg: &[usize],
    hdeg: &[usize],
    mapping: &mut [usize],
    used: &mut [bool],
    budget: &mut usize,
) -> bool {
    if depth == order.len() {
        return true;
    }
    if *budget == 0 {
        return false;
    }
    let gu = order[depth];
    for hv in 0..used.len() {
        if used[hv] || gdeg[gu] != hdeg[hv] {
            continue;
        }
        // adjacency with already-mapped vertices must match
        let consistent = order[..depth].iter().all(|&gw| {
            let hw = mapping[gw];
            let g_adj = ga[gu][gw / 64] >> (gw % 64) & 1;
            let h_adj = ha[hv][hw / 64] >> (hw % 64) & 1;
            g_adj == h_adj
        });
        if !consistent {
            continue;
        }
        *budget = budget.saturating_sub(1);
        mapping[gu] = hv;
        used[hv] = true;
        if backtrack_iso(order, depth + 1, ga, ha, gdeg, hdeg, mapping, used, budget) {
            return true;
        }
        mapping[gu] = usize::MAX;
        used[hv] = false;
    }
    false
}
