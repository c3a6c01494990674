//! Hop distances on the communication graph: BFS, the all-pairs matrix,
//! diameter, induced-subgraph distances and shortest-path counts.

use std::collections::BTreeSet;
use std::collections::VecDeque;

use crate::profile::CommGraph;

/// All-pairs hop distances; `None` marks an unreachable pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<Option<u32>>,
}

impl DistanceMatrix {
    pub fn of(g: &CommGraph) -> Self {
        let n = g.n();
        let mut d = vec![None; n * n];
        for src in 0..n {
            let row = bfs_distances(g.adjacency(), src);
            d[src * n..(src + 1) * n].copy_from_slice(&row);
        }
        DistanceMatrix { n, d }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, u: usize, v: usize) -> Option<u32> {
        self.d[u * self.n + v]
    }

    /// `D_G(u)`: the sum of distances from `u` to every other node, or `None`
    /// when some node is unreachable.
    pub fn row_sum(&self, u: usize) -> Option<u64> {
        let mut sum = 0u64;
        for v in 0..self.n {
            if v == u {
                continue;
            }
            sum += u64::from(self.get(u, v)?);
        }
        Some(sum)
    }

    /// Largest distance; `None` when the graph is disconnected.
    pub fn diameter(&self) -> Option<u32> {
        let mut max = 0;
        for u in 0..self.n {
            for v in (u + 1)..self.n {
                max = max.max(self.get(u, v)?);
            }
        }
        Some(max)
    }

    pub fn is_connected(&self) -> bool {
        self.diameter().is_some()
    }
}

/// Single-source BFS over adjacency lists.
pub fn bfs_distances(adj: &[Vec<usize>], src: usize) -> Vec<Option<u32>> {
    let mut dist = vec![None; adj.len()];
    dist[src] = Some(0);
    let mut queue = VecDeque::from([src]);
    while let Some(u) = queue.pop_front() {
        let du = dist[u].unwrap();
        for &v in &adj[u] {
            if dist[v].is_none() {
                dist[v] = Some(du + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

pub fn is_connected(g: &CommGraph) -> bool {
    if g.n() == 0 {
        return true;
    }
    bfs_distances(g.adjacency(), 0).iter().all(Option::is_some)
}

/// Distances from `src` inside the subgraph induced by `allowed`.
/// Nodes outside `allowed` stay `None`; `src` must be allowed.
pub fn induced_distances(g: &CommGraph, allowed: &BTreeSet<usize>, src: usize) -> Vec<Option<u32>> {
    debug_assert!(allowed.contains(&src));
    let mut dist = vec![None; g.n()];
    dist[src] = Some(0);
    let mut queue = VecDeque::from([src]);
    while let Some(u) = queue.pop_front() {
        let du = dist[u].unwrap();
        for &v in g.neighbors(u) {
            if allowed.contains(&v) && dist[v].is_none() {
                dist[v] = Some(du + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Diameter of the subgraph induced by `allowed`; `None` when that subgraph
/// is disconnected or empty.
pub fn induced_diameter(g: &CommGraph, allowed: &BTreeSet<usize>) -> Option<u32> {
    let mut max = 0;
    for &src in allowed {
        let dist = induced_distances(g, allowed, src);
        for &v in allowed {
            max = max.max(dist[v]?);
        }
    }
    Some(max)
}

/// Per-node distance from `src` plus the number of distinct shortest paths
/// from `src`. Counts fit easily in `u128` at the supported graph sizes.
pub fn shortest_path_counts(adj: &[Vec<usize>], src: usize) -> (Vec<Option<u32>>, Vec<u128>) {
    let dist = bfs_distances(adj, src);
    let mut count = vec![0u128; adj.len()];
    count[src] = 1;
    let mut order: Vec<usize> = (0..adj.len()).filter(|&v| dist[v].is_some()).collect();
    order.sort_by_key(|&v| dist[v]);
    // count[v] = sum of counts of neighbors one layer closer to src.
    for &v in &order {
        if v == src {
            continue;
        }
        let dv = dist[v].unwrap();
        let mut c = 0u128;
        for &w in &adj[v] {
            if dist[w] == Some(dv - 1) {
                c += count[w];
            }
        }
        count[v] = c;
    }
    (dist, count)
}
