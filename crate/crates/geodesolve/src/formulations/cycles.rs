//! Fundamental cycle bases of the input graph's cycle space.

use crate::types::Graph;

/// A basis of the cycle space: each cycle is the edge set of a closed walk
/// together with orientation signs. Edges are oriented `u < v`; a traversal
/// step against that orientation carries sign `-1`.
#[derive(Debug, Clone)]
pub struct CycleBasis {
    pub cycles: Vec<Vec<(usize, i8)>>,
}

impl CycleBasis {
    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }
}

/// Builds the fundamental basis of a BFS spanning forest: one cycle per
/// non-tree edge, of size `m - n + c` for a graph with `c` components.
pub fn fundamental_cycle_basis(g: &Graph) -> CycleBasis {
    let n = g.n_vertices();
    // adjacency with edge indices, neighbours visited in sorted order for
    // deterministic output
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (idx, e) in g.edges().iter().enumerate() {
        adj[e.u - 1].push((e.v - 1, idx));
        adj[e.v - 1].push((e.u - 1, idx));
    }
    for list in adj.iter_mut() {
        list.sort_unstable();
    }

    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n]; // (parent vertex, edge idx)
    let mut depth = vec![0usize; n];
    let mut visited = vec![false; n];
    let mut tree_edge = vec![false; g.n_edges()];

    for root in 0..n {
        if visited[root] {
            continue;
        }
        visited[root] = true;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &(v, idx) in &adj[u] {
                if !visited[v] {
                    visited[v] = true;
                    parent[v] = Some((u, idx));
                    depth[v] = depth[u] + 1;
                    tree_edge[idx] = true;
                    queue.push_back(v);
                }
            }
        }
    }

    let mut cycles = Vec::new();
    for (idx, e) in g.edges().iter().enumerate() {
        if tree_edge[idx] {
            continue;
        }
        // closed walk: u --(non-tree edge)--> v --(tree path)--> u
        let (u, v) = (e.u - 1, e.v - 1);
        let mut walk: Vec<(usize, usize, usize)> = vec![(u, v, idx)]; // (from, to, edge)
        let (mut a, mut b) = (v, u);
        let mut tail_a = Vec::new(); // steps from v up toward the meeting point
        let mut tail_b = Vec::new(); // steps from u upward, to be reversed
        while depth[a] > depth[b] {
            let (p, eidx) = parent[a].expect("non-root has a parent");
            tail_a.push((a, p, eidx));
            a = p;
        }
        while depth[b] > depth[a] {
            let (p, eidx) = parent[b].expect("non-root has a parent");
            tail_b.push((p, b, eidx)); // downward direction when replayed
            b = p;
        }
        while a != b {
            let (pa, ea) = parent[a].expect("forest paths meet");
            let (pb, eb) = parent[b].expect("forest paths meet");
            tail_a.push((a, pa, ea));
            tail_b.push((pb, b, eb));
            a = pa;
            b = pb;
        }
        walk.extend(tail_a);
        walk.extend(tail_b.into_iter().rev());

        let cycle: Vec<(usize, i8)> = walk
            .into_iter()
            .map(|(from, to, eidx)| (eidx, if from < to { 1 } else { -1 }))
            .collect();
        cycles.push(cycle);
    }
    CycleBasis { cycles }
}
