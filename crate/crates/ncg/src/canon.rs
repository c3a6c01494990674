//! Stable digests and isomorphism keys for profiles and their graphs.
//!
//! The digest hashes the canonical purchase list and identifies a labeled
//! profile exactly. Isomorphism keys canonicalize by relabeling: exact
//! minimum over all permutations up to 8 nodes, and a best-effort iterated
//! neighborhood-refinement signature above that (collisions there are
//! acceptable; exact keys are what the search and tests rely on).

use std::collections::BTreeMap;

use sha2::{Digest, Sha256};

use crate::profile::{CommGraph, StrategyProfile};

/// Exact canonical keys use full permutation search up to this size.
pub const EXACT_CANONICAL_LIMIT: usize = 8;

/// Canonical serialization of a profile: `n` plus sorted purchases.
pub fn profile_canonical_text(profile: &StrategyProfile) -> String {
    let edges: Vec<String> = profile
        .purchases()
        .map(|(o, t)| format!("{o}>{t}"))
        .collect();
    format!("n={};edges={}", profile.n(), edges.join(","))
}

/// SHA-256 of the canonical serialization, hex encoded.
pub fn profile_digest(profile: &StrategyProfile) -> String {
    let hash = Sha256::digest(profile_canonical_text(profile).as_bytes());
    hash.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    heap_permute(&mut current, n, &mut out);
    out
}

fn heap_permute(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(items.clone());
        return;
    }
    for i in 0..k {
        heap_permute(items, k - 1, out);
        if k.is_multiple_of(2) {
            items.swap(i, k - 1);
        } else {
            items.swap(0, k - 1);
        }
    }
}

/// Ownership-aware isomorphism key: minimum canonical text over all node
/// relabelings for small n, refinement signature otherwise.
pub fn profile_iso_key(profile: &StrategyProfile) -> String {
    let n = profile.n();
    if n > EXACT_CANONICAL_LIMIT {
        return refinement_key(profile.graph().adjacency());
    }
    let purchases: Vec<(usize, usize)> = profile.purchases().collect();
    permutations(n)
        .iter()
        .map(|perm| {
            let mut edges: Vec<(usize, usize)> =
                purchases.iter().map(|&(o, t)| (perm[o], perm[t])).collect();
            edges.sort_unstable();
            let text: Vec<String> = edges.iter().map(|(o, t)| format!("{o}>{t}")).collect();
            format!("n={n};edges={}", text.join(","))
        })
        .min()
        .expect("at least the identity permutation")
}

/// Ownership-insensitive isomorphism key of the underlying undirected graph.
pub fn graph_iso_key(g: &CommGraph) -> String {
    let n = g.n();
    if n > EXACT_CANONICAL_LIMIT {
        return refinement_key(g.adjacency());
    }
    let base: Vec<(usize, usize)> = g.edges().to_vec();
    permutations(n)
        .iter()
        .map(|perm| {
            let mut edges: Vec<(usize, usize)> = base
                .iter()
                .map(|&(a, b)| {
                    let (x, y) = (perm[a], perm[b]);
                    (x.min(y), x.max(y))
                })
                .collect();
            edges.sort_unstable();
            let text: Vec<String> = edges.iter().map(|(a, b)| format!("{a}-{b}")).collect();
            format!("n={n};edges={}", text.join(","))
        })
        .min()
        .expect("at least the identity permutation")
}

/// Iterated neighborhood refinement (1-dimensional color refinement): start
/// from degrees, refine each node by the multiset of neighbor colors until
/// stable, and emit the sorted color histogram. Isomorphic graphs always get
/// the same key; rare non-isomorphic collisions are tolerated by callers.
pub fn refinement_key(adj: &[Vec<usize>]) -> String {
    let n = adj.len();
    let mut colors: Vec<u64> = adj.iter().map(|nb| nb.len() as u64).collect();
    for _ in 0..n {
        let mut signatures: Vec<(u64, Vec<u64>)> = (0..n)
            .map(|v| {
                let mut nb: Vec<u64> = adj[v].iter().map(|&w| colors[w]).collect();
                nb.sort_unstable();
                (colors[v], nb)
            })
            .collect();
        let mut palette: BTreeMap<(u64, Vec<u64>), u64> = BTreeMap::new();
        let mut sorted = signatures.clone();
        sorted.sort();
        sorted.dedup();
        for (i, sig) in sorted.into_iter().enumerate() {
            palette.insert(sig, i as u64);
        }
        let next: Vec<u64> = signatures.drain(..).map(|sig| palette[&sig]).collect();
        if next == colors {
            break;
        }
        colors = next;
    }
    let mut histogram = colors;
    histogram.sort_unstable();
    let edge_count: usize = adj.iter().map(Vec::len).sum::<usize>() / 2;
    format!("wl:n={n};m={edge_count};colors={histogram:?}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::StrategyProfile;

    #[test]
    fn digest_is_stable_and_injective_on_labels() {
        let a = StrategyProfile::build(3, &[(0, 1), (1, 2)]).unwrap();
        let b = StrategyProfile::build(3, &[(1, 2), (0, 1)]).unwrap();
        let c = StrategyProfile::build(3, &[(1, 0), (1, 2)]).unwrap();
        assert_eq!(profile_digest(&a), profile_digest(&b));
        assert_ne!(profile_digest(&a), profile_digest(&c));
        assert_eq!(profile_digest(&a).len(), 64);
    }

    #[test]
    fn iso_key_identifies_relabelings() {
        // Path 0-1-2 center-owned vs path 1-0-2 center-owned: isomorphic.
        let a = StrategyProfile::build(3, &[(1, 0), (1, 2)]).unwrap();
        let b = StrategyProfile::build(3, &[(0, 1), (0, 2)]).unwrap();
        assert_eq!(profile_iso_key(&a), profile_iso_key(&b));
        // Same graph, different ownership structure: distinct key.
        let c = StrategyProfile::build(3, &[(0, 1), (2, 1)]).unwrap();
        assert_ne!(profile_iso_key(&a), profile_iso_key(&c));
        // But the underlying undirected graphs agree.
        assert_eq!(graph_iso_key(&a.graph()), graph_iso_key(&c.graph()));
    }

    #[test]
    fn refinement_key_separates_path_from_star() {
        let path = StrategyProfile::build(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let star = StrategyProfile::build(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_ne!(
            refinement_key(path.graph().adjacency()),
            refinement_key(star.graph().adjacency())
        );
    }

    #[test]
    fn permutation_count() {
        assert_eq!(permutations(4).len(), 24);
    }
}
