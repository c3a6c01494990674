//! Biconnected components, cut vertices, hanging-set weights and
//! neighborhood statistics of the communication graph.
//!
//! For a biconnected component `H` and `u` in `V(H)`, `S(u)` is the connected
//! component containing `u` in the subgraph induced by `(V \ V(H)) + {u}`:
//! everything that reaches the rest of the graph only through `u`. The
//! `S(u)` partition the node set and their sizes are the node weights.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use crate::graph::{induced_diameter, induced_distances, DistanceMatrix};
use crate::profile::CommGraph;

/// Maximal biconnected subgraph. Single-edge components are retained with
/// `is_nontrivial() == false`, so "the graph is a tree iff no nontrivial
/// component exists" is directly testable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiconnectedComponent {
    pub nodes: BTreeSet<usize>,
    pub edges: Vec<(usize, usize)>,
    /// Diameter measured inside the induced subgraph of `nodes`.
    pub diameter: u32,
}

impl BiconnectedComponent {
    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_nontrivial(&self) -> bool {
        self.nodes.len() >= 3
    }

    pub fn contains_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    /// Average degree `2|E(H)| / |V(H)|` as an exact rational.
    pub fn avg_degree(&self) -> BigRational {
        BigRational::new(
            BigInt::from(2 * self.edges.len()),
            BigInt::from(self.nodes.len()),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    /// Sorted by their node sets; every edge of the graph is in exactly one.
    pub components: Vec<BiconnectedComponent>,
    /// Nodes belonging to at least two components.
    pub cut_vertices: BTreeSet<usize>,
}

impl Decomposition {
    pub fn nontrivial(&self) -> impl Iterator<Item = &BiconnectedComponent> {
        self.components.iter().filter(|c| c.is_nontrivial())
    }

    /// A connected graph is a tree iff it has no nontrivial component.
    pub fn has_nontrivial(&self) -> bool {
        self.nontrivial().next().is_some()
    }
}

/// Classic lowpoint decomposition with an explicit edge stack. Disconnected
/// graphs are handled per connected component; isolated nodes yield nothing.
pub fn biconnected_components(g: &CommGraph) -> Decomposition {
    let n = g.n();
    let mut state = Lowpoint {
        g,
        index: vec![None; n],
        low: vec![0; n],
        next_index: 0,
        edge_stack: Vec::new(),
        raw: Vec::new(),
    };
    for root in 0..n {
        if state.index[root].is_none() {
            state.visit(root, None);
        }
    }

    let mut components: Vec<BiconnectedComponent> = state
        .raw
        .into_iter()
        .map(|edges| component_from_edges(g, edges))
        .collect();
    components.sort_by(|a, b| a.nodes.cmp(&b.nodes).then_with(|| a.edges.cmp(&b.edges)));

    let mut seen_in: BTreeMap<usize, usize> = BTreeMap::new();
    for c in &components {
        for &v in &c.nodes {
            *seen_in.entry(v).or_insert(0) += 1;
        }
    }
    let cut_vertices = seen_in
        .into_iter()
        .filter(|&(_, count)| count >= 2)
        .map(|(v, _)| v)
        .collect();

    Decomposition {
        components,
        cut_vertices,
    }
}

struct Lowpoint<'a> {
    g: &'a CommGraph,
    index: Vec<Option<u32>>,
    low: Vec<u32>,
    next_index: u32,
    edge_stack: Vec<(usize, usize)>,
    raw: Vec<Vec<(usize, usize)>>,
}

impl Lowpoint<'_> {
    fn visit(&mut self, u: usize, parent: Option<usize>) {
        let my_index = self.next_index;
        self.index[u] = Some(my_index);
        self.low[u] = my_index;
        self.next_index += 1;
        let mut parent_skipped = false;
        for &v in self.g.neighbors(u) {
            if Some(v) == parent && !parent_skipped {
                // skip one occurrence of the tree edge back to the parent
                parent_skipped = true;
                continue;
            }
            match self.index[v] {
                None => {
                    self.edge_stack.push((u.min(v), u.max(v)));
                    self.visit(v, Some(u));
                    self.low[u] = self.low[u].min(self.low[v]);
                    if self.low[v] >= my_index {
                        // u separates the subtree at v: pop one component
                        let mut edges = Vec::new();
                        while let Some(e) = self.edge_stack.pop() {
                            let done = e == (u.min(v), u.max(v));
                            edges.push(e);
                            if done {
                                break;
                            }
                        }
                        self.raw.push(edges);
                    }
                }
                Some(vi) if vi < my_index => {
                    self.edge_stack.push((u.min(v), u.max(v)));
                    self.low[u] = self.low[u].min(vi);
                }
                Some(_) => {}
            }
        }
    }
}

fn component_from_edges(g: &CommGraph, mut edges: Vec<(usize, usize)>) -> BiconnectedComponent {
    edges.sort_unstable();
    edges.dedup();
    let nodes: BTreeSet<usize> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
    let diameter = induced_diameter(g, &nodes).expect("biconnected component is connected");
    BiconnectedComponent {
        nodes,
        edges,
        diameter,
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WeightError {
    #[error("the graph is disconnected; weights are defined on connected graphs")]
    Disconnected,
    #[error("the given subgraph is not a biconnected component of the graph")]
    NotAComponent,
    #[error("node {0} is not in the component")]
    CenterOutside(usize),
}

/// `S(u)` for every `u` in `V(H)`, plus the weights `|S(u)|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightMap {
    pub sets: BTreeMap<usize, BTreeSet<usize>>,
}

impl WeightMap {
    pub fn weight(&self, u: usize) -> usize {
        self.sets.get(&u).map_or(0, BTreeSet::len)
    }

    pub fn total(&self) -> usize {
        self.sets.values().map(BTreeSet::len).sum()
    }

    /// The component member `w` with `z` in `S(w)`.
    pub fn attachment_of(&self, z: usize) -> Option<usize> {
        self.sets
            .iter()
            .find(|(_, set)| set.contains(&z))
            .map(|(&w, _)| w)
    }
}

/// Computes `S(u)` for every member of `h`. Rejects disconnected graphs and
/// subgraphs that are not components of `g`.
pub fn subtree_weights(g: &CommGraph, h: &BiconnectedComponent) -> Result<WeightMap, WeightError> {
    if !crate::graph::is_connected(g) {
        return Err(WeightError::Disconnected);
    }
    let decomposition = biconnected_components(g);
    if !decomposition.components.contains(h) {
        return Err(WeightError::NotAComponent);
    }
    let all: BTreeSet<usize> = (0..g.n()).collect();
    let outside: BTreeSet<usize> = all.difference(&h.nodes).copied().collect();
    let mut sets = BTreeMap::new();
    for &u in &h.nodes {
        let mut allowed = outside.clone();
        allowed.insert(u);
        let dist = induced_distances(g, &allowed, u);
        let set: BTreeSet<usize> = (0..g.n()).filter(|&v| dist[v].is_some()).collect();
        sets.insert(u, set);
    }
    Ok(WeightMap { sets })
}

/// Ball statistics around a component member: the members within distance
/// `radius`, the union of their hanging sets, and the minimum ball size over
/// all centers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborhoodStats {
    pub center: usize,
    pub radius: u32,
    /// `N_{k,H}(center)`: members of `H` within distance `radius` of the center.
    pub in_component: BTreeSet<usize>,
    /// `S_k(center)`: union of `S(v)` over the ball.
    pub covered: BTreeSet<usize>,
    /// `m_k`: minimum ball cardinality over all centers in `V(H)`.
    pub min_ball: usize,
}

pub fn neighborhood_stats(
    dm: &DistanceMatrix,
    h: &BiconnectedComponent,
    weights: &WeightMap,
    center: usize,
    radius: u32,
) -> Result<NeighborhoodStats, WeightError> {
    if !h.nodes.contains(&center) {
        return Err(WeightError::CenterOutside(center));
    }
    let ball = |u: usize| -> BTreeSet<usize> {
        h.nodes
            .iter()
            .copied()
            .filter(|&v| dm.get(u, v).is_some_and(|d| d <= radius))
            .collect()
    };
    let in_component = ball(center);
    let mut covered = BTreeSet::new();
    for &v in &in_component {
        covered.extend(weights.sets[&v].iter().copied());
    }
    let min_ball = h
        .nodes
        .iter()
        .map(|&u| ball(u).len())
        .min()
        .expect("component is nonempty");
    Ok(NeighborhoodStats {
        center,
        radius,
        in_component,
        covered,
        min_ball,
    })
}
