//! Funnel sets: given an anchor `u` and a seller `v` that bought the two
//! edges `(v, v1)` and `(v, v2)`, the funnel set collects the nodes `z` whose
//! every shortest path to `u` passes through `v`, entering it from `v1` or
//! `v2`. The two branches record which entry point admits a witnessing path.
//!
//! Membership is decided exactly by shortest-path counting: the number of
//! shortest `u -> z` paths that leave `v` toward `v_i` is
//! `count(u -> v) * count(v_i -> z)` whenever the distances compose, and `z`
//! is in the funnel iff those products account for every shortest path.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::graph::{induced_distances, shortest_path_counts, DistanceMatrix};
use crate::profile::CommGraph;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FunnelError {
    #[error("anchor and seller must be distinct nodes")]
    AnchorIsSeller,
    #[error("node {0} out of range")]
    OutOfRange(usize),
    #[error("the two sold edges must be distinct")]
    EdgesNotDistinct,
    #[error("edge ({seller},{target}) was not bought by the seller")]
    NotBought { seller: usize, target: usize },
    #[error("anchor {0} cannot reach the seller")]
    Unreachable(usize),
}

/// The funnel set of a seller and its two sold edges, relative to an anchor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunnelRecord {
    pub anchor: usize,
    pub seller: usize,
    /// Far endpoints of the two sold edges.
    pub exits: [usize; 2],
    /// Branch sets: nodes with a witnessing shortest path entering through
    /// each exit. Their union is `members`.
    pub branches: [BTreeSet<usize>; 2],
    pub members: BTreeSet<usize>,
    /// Edges joining the two branches, `(x, y)` with `x` in the first.
    pub branch_links: Vec<(usize, usize)>,
    /// Edges from `members` to its complement, excluding the two sold edges;
    /// first endpoint inside.
    pub boundary: Vec<(usize, usize)>,
    /// Per-branch edges to the branch's complement, excluding that branch's
    /// sold edge; first endpoint inside the branch.
    pub branch_boundaries: [Vec<(usize, usize)>; 2],
    /// Distance between the two exits inside the subgraph induced by
    /// `members` plus the exits; `None` when they do not connect there.
    pub exit_gap: Option<u32>,
}

impl FunnelRecord {
    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn branch_is_empty(&self, i: usize) -> bool {
        self.branches[i].is_empty()
    }

    /// Boundary edge minimizing the seller-to-inside distance.
    pub fn nearest_boundary(&self, dm: &DistanceMatrix) -> Option<(usize, usize)> {
        self.boundary
            .iter()
            .copied()
            .min_by_key(|&(x, _)| (dm.get(self.seller, x), x))
    }

    pub fn nearest_branch_boundary(&self, dm: &DistanceMatrix, i: usize) -> Option<(usize, usize)> {
        self.branch_boundaries[i]
            .iter()
            .copied()
            .min_by_key(|&(x, _)| (dm.get(self.seller, x), x))
    }
}

/// Computes the funnel record for anchor `u`, seller `v` and the sold edges
/// `(v, exits[0])`, `(v, exits[1])`; both edges must be purchases of `v`.
pub fn funnel_record(
    g: &CommGraph,
    u: usize,
    v: usize,
    exits: [usize; 2],
) -> Result<FunnelRecord, FunnelError> {
    let n = g.n();
    for node in [u, v, exits[0], exits[1]] {
        if node >= n {
            return Err(FunnelError::OutOfRange(node));
        }
    }
    if u == v {
        return Err(FunnelError::AnchorIsSeller);
    }
    if exits[0] == exits[1] {
        return Err(FunnelError::EdgesNotDistinct);
    }
    for &t in &exits {
        if !g.bought_by(v, t) {
            return Err(FunnelError::NotBought {
                seller: v,
                target: t,
            });
        }
    }

    let (dist_u, count_u) = shortest_path_counts(g.adjacency(), u);
    if dist_u[v].is_none() {
        return Err(FunnelError::Unreachable(u));
    }
    let dv = dist_u[v].unwrap();
    let seller_paths = count_u[v];

    // Per exit: counts of shortest paths from the exit, valid only when the
    // exit sits one layer beyond the seller as seen from the anchor.
    type PathCounts = (Vec<Option<u32>>, Vec<u128>);
    let exit_counts: Vec<Option<PathCounts>> = exits
        .iter()
        .map(|&e| (dist_u[e] == Some(dv + 1)).then(|| shortest_path_counts(g.adjacency(), e)))
        .collect();

    let mut branches = [BTreeSet::new(), BTreeSet::new()];
    let mut members = BTreeSet::new();
    for z in 0..n {
        let Some(dz) = dist_u[z] else { continue };
        let mut through = [0u128; 2];
        for i in 0..2 {
            if let Some((dist_e, count_e)) = &exit_counts[i] {
                if let Some(dez) = dist_e[z] {
                    if dv + 1 + dez == dz {
                        through[i] = seller_paths * count_e[z];
                    }
                }
            }
        }
        if count_u[z] > 0 && through[0] + through[1] == count_u[z] {
            members.insert(z);
            for i in 0..2 {
                if through[i] > 0 {
                    branches[i].insert(z);
                }
            }
        }
    }

    let sold: [(usize, usize); 2] = [
        (v.min(exits[0]), v.max(exits[0])),
        (v.min(exits[1]), v.max(exits[1])),
    ];

    let mut branch_links = Vec::new();
    let mut boundary = Vec::new();
    let mut branch_boundaries = [Vec::new(), Vec::new()];
    for &(a, b) in g.edges() {
        let in0 = [branches[0].contains(&a), branches[0].contains(&b)];
        let in1 = [branches[1].contains(&a), branches[1].contains(&b)];
        if (in0[0] && in1[1]) || (in0[1] && in1[0]) {
            let (x, y) = if in0[0] && in1[1] { (a, b) } else { (b, a) };
            branch_links.push((x, y));
        }
        let in_members = [members.contains(&a), members.contains(&b)];
        if in_members[0] != in_members[1] && !sold.contains(&(a, b)) {
            let (x, y) = if in_members[0] { (a, b) } else { (b, a) };
            boundary.push((x, y));
        }
        for i in 0..2 {
            let inside = [branches[i].contains(&a), branches[i].contains(&b)];
            if inside[0] != inside[1] && (a, b) != sold[i] {
                let (x, y) = if inside[0] { (a, b) } else { (b, a) };
                branch_boundaries[i].push((x, y));
            }
        }
    }
    branch_links.sort_unstable();
    branch_links.dedup();
    boundary.sort_unstable();
    for list in &mut branch_boundaries {
        list.sort_unstable();
    }

    // Distance between the exits inside members + exits.
    let mut allowed = members.clone();
    allowed.insert(exits[0]);
    allowed.insert(exits[1]);
    let exit_gap = induced_distances(g, &allowed, exits[0])[exits[1]];

    Ok(FunnelRecord {
        anchor: u,
        seller: v,
        exits,
        branches,
        members,
        branch_links,
        boundary,
        branch_boundaries,
        exit_gap,
    })
}
