//! Strategy profiles and the communication graph they induce.
//!
//! A strategy profile assigns every player `u` a set of purchased link
//! targets. The communication graph is undirected: the edge `uv` exists when
//! `u` bought `v` or `v` bought `u` (or both; such reciprocal pairs are legal
//! in arbitrary profiles, merge into one undirected edge, and are paid twice).

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{parse_positive_rational, rational_string};

/// Player counts above this are rejected: every game-theoretic routine in the
/// crate works on bitmask adjacency, and exact verification is hopeless far
/// below this anyway.
pub const MAX_PLAYERS: usize = 64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProfileError {
    #[error("player count must be in 1..={MAX_PLAYERS}, got {0}")]
    BadPlayerCount(usize),
    #[error("purchase ({0},{0}) is a self-loop")]
    SelfLoop(usize),
    #[error("purchase ({owner},{target}) out of range for n={n}")]
    OutOfRange {
        owner: usize,
        target: usize,
        n: usize,
    },
    #[error("duplicate purchase ({0},{1})")]
    Duplicate(usize, usize),
}

/// Per-player purchased link targets.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StrategyProfile {
    n: usize,
    bought: Vec<BTreeSet<usize>>,
}

impl StrategyProfile {
    /// Builds a profile from `(owner, target)` purchases, rejecting
    /// self-loops, out-of-range ids and duplicate purchases.
    pub fn build(n: usize, purchases: &[(usize, usize)]) -> Result<Self, ProfileError> {
        let mut profile = Self::empty(n)?;
        for &(owner, target) in purchases {
            if owner >= n || target >= n {
                return Err(ProfileError::OutOfRange { owner, target, n });
            }
            if owner == target {
                return Err(ProfileError::SelfLoop(owner));
            }
            if !profile.bought[owner].insert(target) {
                return Err(ProfileError::Duplicate(owner, target));
            }
        }
        Ok(profile)
    }

    pub fn empty(n: usize) -> Result<Self, ProfileError> {
        if n == 0 || n > MAX_PLAYERS {
            return Err(ProfileError::BadPlayerCount(n));
        }
        Ok(StrategyProfile {
            n,
            bought: vec![BTreeSet::new(); n],
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn strategy(&self, player: usize) -> &BTreeSet<usize> {
        &self.bought[player]
    }

    /// All purchases as `(owner, target)` pairs in canonical order.
    pub fn purchases(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.bought
            .iter()
            .enumerate()
            .flat_map(|(owner, targets)| targets.iter().map(move |&t| (owner, t)))
    }

    /// Total number of purchases; a reciprocal pair counts twice.
    pub fn purchase_count(&self) -> usize {
        self.bought.iter().map(BTreeSet::len).sum()
    }

    /// Pairs `(u, v)` with `u < v` where both directions were bought.
    pub fn reciprocal_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs = Vec::new();
        for u in 0..self.n {
            for &v in &self.bought[u] {
                if u < v && self.bought[v].contains(&u) {
                    pairs.push((u, v));
                }
            }
        }
        pairs
    }

    pub fn has_reciprocal_pair(&self) -> bool {
        !self.reciprocal_pairs().is_empty()
    }

    /// The profile with player `u`'s strategy replaced wholesale.
    pub fn with_strategy(
        &self,
        player: usize,
        strategy: BTreeSet<usize>,
    ) -> Result<Self, ProfileError> {
        if player >= self.n {
            return Err(ProfileError::OutOfRange {
                owner: player,
                target: player,
                n: self.n,
            });
        }
        for &t in &strategy {
            if t >= self.n {
                return Err(ProfileError::OutOfRange {
                    owner: player,
                    target: t,
                    n: self.n,
                });
            }
            if t == player {
                return Err(ProfileError::SelfLoop(player));
            }
        }
        let mut next = self.clone();
        next.bought[player] = strategy;
        Ok(next)
    }

    pub fn graph(&self) -> CommGraph {
        CommGraph::from_profile(self)
    }
}

/// Which endpoints of an undirected edge paid for it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeOwners {
    pub low_buys: bool,
    pub high_buys: bool,
}

/// Undirected communication graph induced by a profile, with the owner map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommGraph {
    n: usize,
    adj: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    owners: BTreeMap<(usize, usize), EdgeOwners>,
}

impl CommGraph {
    pub fn from_profile(profile: &StrategyProfile) -> Self {
        let n = profile.n();
        let mut owners: BTreeMap<(usize, usize), EdgeOwners> = BTreeMap::new();
        for (owner, target) in profile.purchases() {
            let key = (owner.min(target), owner.max(target));
            let entry = owners.entry(key).or_insert(EdgeOwners {
                low_buys: false,
                high_buys: false,
            });
            if owner < target {
                entry.low_buys = true;
            } else {
                entry.high_buys = true;
            }
        }
        Self::assemble(n, owners)
    }

    /// Graph from plain undirected edges; the lower endpoint is recorded as
    /// the owner. Used for fixtures where ownership is irrelevant.
    pub fn from_undirected(n: usize, edges: &[(usize, usize)]) -> Result<Self, ProfileError> {
        let purchases: Vec<(usize, usize)> =
            edges.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
        let profile = StrategyProfile::build(n, &purchases)?;
        Ok(profile.graph())
    }

    fn assemble(n: usize, owners: BTreeMap<(usize, usize), EdgeOwners>) -> Self {
        let mut adj = vec![Vec::new(); n];
        let mut edges = Vec::with_capacity(owners.len());
        for &(lo, hi) in owners.keys() {
            adj[lo].push(hi);
            adj[hi].push(lo);
            edges.push((lo, hi));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        CommGraph {
            n,
            adj,
            edges,
            owners,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adj[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].len()
    }

    /// Undirected edges as `(lo, hi)` pairs in lexicographic order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.owners.contains_key(&(u.min(v), u.max(v)))
    }

    pub fn owners(&self, u: usize, v: usize) -> Option<EdgeOwners> {
        self.owners.get(&(u.min(v), u.max(v))).copied()
    }

    /// True when `owner` paid for the edge `owner -> target`.
    pub fn bought_by(&self, owner: usize, target: usize) -> bool {
        match self.owners(owner, target) {
            Some(o) if owner < target => o.low_buys,
            Some(o) => o.high_buys,
            None => false,
        }
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adj
    }

    /// Neighbor bitmasks, bit `v` of entry `u` set iff `uv` is an edge.
    pub fn masks(&self) -> Vec<u64> {
        let mut masks = vec![0u64; self.n];
        for &(lo, hi) in &self.edges {
            masks[lo] |= 1 << hi;
            masks[hi] |= 1 << lo;
        }
        masks
    }
}

#[derive(Debug, Error)]
pub enum FileError {
    #[error("document parse error at line {line}, column {column}: {message}")]
    Document {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid alpha: {0}")]
    Alpha(String),
    #[error(transparent)]
    Profile(#[from] ProfileError),
}

#[derive(Serialize, Deserialize)]
struct ProfileDoc {
    n: usize,
    alpha: String,
    edges: Vec<(usize, usize)>,
}

/// A parsed profile file: the profile plus the edge price.
#[derive(Debug, Clone, PartialEq)]
pub struct GameFile {
    pub profile: StrategyProfile,
    pub alpha: BigRational,
}

/// Parses the on-disk profile document:
/// `{ "n": 3, "alpha": "5/2", "edges": [[1,0],[1,2]] }`.
pub fn parse_game_file(text: &str) -> Result<GameFile, FileError> {
    let doc: ProfileDoc = serde_json::from_str(text).map_err(|e| FileError::Document {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let alpha = parse_positive_rational(&doc.alpha).map_err(|e| FileError::Alpha(e.to_string()))?;
    let profile = StrategyProfile::build(doc.n, &doc.edges)?;
    Ok(GameFile { profile, alpha })
}

/// Canonical serialization; `parse_game_file(serialize_game_file(x)) == x`.
pub fn serialize_game_file(profile: &StrategyProfile, alpha: &BigRational) -> String {
    let doc = ProfileDoc {
        n: profile.n(),
        alpha: rational_string(alpha),
        edges: profile.purchases().collect(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("profile document serializes");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn builds_path_with_center_owner() {
        let p = StrategyProfile::build(3, &[(1, 0), (1, 2)]).unwrap();
        let g = p.graph();
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
        assert!(g.bought_by(1, 0));
        assert!(g.bought_by(1, 2));
        assert!(!g.bought_by(0, 1));
        assert!(!p.has_reciprocal_pair());
    }

    #[test]
    fn reciprocal_purchases_merge_into_one_edge() {
        let p = StrategyProfile::build(2, &[(0, 1), (1, 0)]).unwrap();
        let g = p.graph();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(p.purchase_count(), 2);
        assert_eq!(p.reciprocal_pairs(), vec![(0, 1)]);
        let owners = g.owners(0, 1).unwrap();
        assert!(owners.low_buys && owners.high_buys);
    }

    #[test]
    fn rejects_self_loop_out_of_range_duplicate() {
        assert_eq!(
            StrategyProfile::build(3, &[(0, 0)]),
            Err(ProfileError::SelfLoop(0))
        );
        assert_eq!(
            StrategyProfile::build(3, &[(0, 3)]),
            Err(ProfileError::OutOfRange {
                owner: 0,
                target: 3,
                n: 3
            })
        );
        assert_eq!(
            StrategyProfile::build(3, &[(0, 1), (0, 1)]),
            Err(ProfileError::Duplicate(0, 1))
        );
        assert!(StrategyProfile::empty(0).is_err());
        assert!(StrategyProfile::empty(MAX_PLAYERS + 1).is_err());
    }

    #[test]
    fn file_round_trip_is_exact() {
        let p = StrategyProfile::build(4, &[(0, 1), (2, 1), (3, 0)]).unwrap();
        let alpha = ratio(7, 2);
        let text = serialize_game_file(&p, &alpha);
        let parsed = parse_game_file(&text).unwrap();
        assert_eq!(parsed.profile, p);
        assert_eq!(parsed.alpha, alpha);
        // Serialization is canonical, so a second round trip is byte-identical.
        assert_eq!(serialize_game_file(&parsed.profile, &parsed.alpha), text);
    }

    #[test]
    fn file_errors_are_positioned() {
        let err = parse_game_file("{ \"n\": 3, \"alpha\": ").unwrap_err();
        match err {
            FileError::Document { line, .. } => assert!(line >= 1),
            other => panic!("unexpected error {other:?}"),
        }
        assert!(matches!(
            parse_game_file("{\"n\":3,\"alpha\":\"0\",\"edges\":[]}"),
            Err(FileError::Alpha(_))
        ));
        assert!(matches!(
            parse_game_file("{\"n\":3,\"alpha\":\"1\",\"edges\":[[0,0]]}"),
            Err(FileError::Profile(ProfileError::SelfLoop(0)))
        ));
    }
}
