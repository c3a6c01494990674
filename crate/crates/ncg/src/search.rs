//! Systematic equilibrium discovery: exhaustive enumeration of ownership
//! profiles at small player counts, best-response dynamics and random
//! restarts for larger ones, and campaign scans that feed every found
//! equilibrium through the falsification harness.
//!
//! Profile space: each unordered node pair is absent, bought by its lower
//! endpoint, or bought by its higher endpoint, giving `3^(n(n-1)/2)`
//! profiles. Reciprocal purchases are excluded from enumeration (dropping
//! one side of a reciprocal pair saves alpha and changes nothing else, so
//! they are never equilibria); a full-space cross-check at n=3 lives in the
//! tests.
//!
//! Workers share nothing: the index space is split into contiguous ranges,
//! candidates are merged in range order, and the result is independent of
//! the worker count.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::{report_digest, violation_count};
use crate::canon::{graph_iso_key, permutations, profile_digest, profile_iso_key};
use crate::game::{
    exact_best_response, is_exact_ne, social_cost, Cost, GameConfig, GameError,
    DEFAULT_EXACT_BUDGET,
};
use crate::profile::{ProfileError, StrategyProfile};
use crate::rational::{parse_positive_rational, rational_string};

/// Exhaustive mode enumerates `3^(n(n-1)/2)` profiles; n=6 is about 1.4e7.
pub const EXHAUSTIVE_LIMIT: usize = 6;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error(
        "exhaustive search is limited to n <= {EXHAUSTIVE_LIMIT} \
         (3^(n(n-1)/2) profiles), got n={0}; use dynamics or random-restart mode"
    )]
    TooLarge(usize),
    #[error("player count {0} is not searchable")]
    BadPlayerCount(usize),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error("converged profile failed exact re-verification (digest {0})")]
    VerificationFailed(String),
    #[error("catalog line {line}: {message}")]
    BadCatalog { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    Exhaustive,
    Dynamics,
    RandomRestart,
}

impl SearchMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            SearchMode::Exhaustive => "exhaustive",
            SearchMode::Dynamics => "dynamics",
            SearchMode::RandomRestart => "random-restart",
        }
    }
}

impl std::str::FromStr for SearchMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exhaustive" => Ok(SearchMode::Exhaustive),
            "dynamics" => Ok(SearchMode::Dynamics),
            "random-restart" => Ok(SearchMode::RandomRestart),
            other => Err(format!(
                "unknown mode {other:?} (expected exhaustive, dynamics or random-restart)"
            )),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchSpec {
    pub n: usize,
    pub alpha_grid: Vec<BigRational>,
    pub mode: SearchMode,
    pub prune_isomorphic: bool,
    pub workers: usize,
    pub seed: u64,
    pub max_rounds: usize,
    pub restarts: usize,
    pub exact_budget: usize,
}

impl SearchSpec {
    pub fn exhaustive(n: usize, alpha_grid: Vec<BigRational>) -> SearchSpec {
        SearchSpec {
            n,
            alpha_grid,
            mode: SearchMode::Exhaustive,
            prune_isomorphic: false,
            workers: 1,
            seed: 0,
            max_rounds: 200,
            restarts: 16,
            exact_budget: DEFAULT_EXACT_BUDGET,
        }
    }
}

// ---------------------------------------------------------------------------
// Profile enumeration.
// ---------------------------------------------------------------------------

pub(crate) fn pair_list(n: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    for u in 0..n {
        for v in (u + 1)..n {
            pairs.push((u, v));
        }
    }
    pairs
}

/// `3^(n(n-1)/2)`.
pub fn profile_count(n: usize) -> u64 {
    3u64.pow((n * (n - 1) / 2) as u32)
}

/// Decodes a base-3 profile index: digit 0 = pair absent, 1 = bought by the
/// lower endpoint, 2 = bought by the higher endpoint.
pub fn profile_from_index(n: usize, index: u64) -> StrategyProfile {
    let pairs = pair_list(n);
    let mut purchases = Vec::new();
    let mut rest = index;
    for &(u, v) in &pairs {
        match rest % 3 {
            0 => {}
            1 => purchases.push((u, v)),
            _ => purchases.push((v, u)),
        }
        rest /= 3;
    }
    StrategyProfile::build(n, &purchases).expect("decoded purchases are valid")
}

/// Deterministic stream over all non-reciprocal profiles.
pub struct ProfileEnumerator {
    n: usize,
    next: u64,
    total: u64,
}

impl Iterator for ProfileEnumerator {
    type Item = StrategyProfile;
    fn next(&mut self) -> Option<StrategyProfile> {
        if self.next >= self.total {
            return None;
        }
        let profile = profile_from_index(self.n, self.next);
        self.next += 1;
        Some(profile)
    }
}

pub fn enumerate_profiles(n: usize) -> Result<ProfileEnumerator, SearchError> {
    if n == 0 {
        return Err(SearchError::BadPlayerCount(n));
    }
    if n > EXHAUSTIVE_LIMIT {
        return Err(SearchError::TooLarge(n));
    }
    Ok(ProfileEnumerator {
        n,
        next: 0,
        total: profile_count(n),
    })
}

// ---------------------------------------------------------------------------
// Lean equilibrium test used inside the scan loops.
// ---------------------------------------------------------------------------

/// Allocation-light exact NE check over bought-edge masks. Agrees with
/// `game::is_exact_ne` by construction (same cost comparison); every
/// surviving candidate is re-verified through the public path anyway.
struct LeanChecker {
    n: usize,
    full: u64,
    /// alpha = p/q with q > 0; fits i128 for any CLI-scale alpha.
    p: i128,
    q: i128,
    subsets: Vec<Vec<u64>>,
}

impl LeanChecker {
    fn new(n: usize, alpha: &BigRational) -> Option<LeanChecker> {
        let p = i128::try_from(alpha.numer()).ok()?;
        let q = i128::try_from(alpha.denom()).ok()?;
        let subsets = (0..n)
            .map(|player| {
                let targets: Vec<u64> =
                    (0..n).filter(|&v| v != player).map(|v| 1u64 << v).collect();
                let mut masks = Vec::with_capacity(1 << targets.len());
                for bits in 0u64..(1 << targets.len()) {
                    let mut m = 0u64;
                    for (i, t) in targets.iter().enumerate() {
                        if bits & (1 << i) != 0 {
                            m |= t;
                        }
                    }
                    masks.push(m);
                }
                masks
            })
            .collect();
        Some(LeanChecker {
            n,
            full: if n == 64 { u64::MAX } else { (1u64 << n) - 1 },
            p,
            q,
            subsets,
        })
    }

    fn usage(&self, base: &[u64], player: usize, strategy: u64) -> Option<u64> {
        let pbit = 1u64 << player;
        let mut visited = pbit;
        let mut frontier = (base[player] | strategy) & !pbit;
        let mut depth = 0u64;
        let mut sum = 0u64;
        while frontier != 0 {
            depth += 1;
            visited |= frontier;
            sum += depth * u64::from(frontier.count_ones());
            let mut next = 0u64;
            let mut f = frontier;
            while f != 0 {
                let v = f.trailing_zeros() as usize;
                f &= f - 1;
                next |= base[v];
            }
            frontier = next & !visited;
        }
        (visited == self.full).then_some(sum)
    }

    /// `bought[u]` = mask of u's purchases; the profile must be reciprocal-free.
    fn is_ne(&self, bought: &[u64]) -> bool {
        let mut adj = [0u64; 64];
        for u in 0..self.n {
            let mut m = bought[u];
            adj[u] |= m;
            while m != 0 {
                let v = m.trailing_zeros() as usize;
                m &= m - 1;
                adj[v] |= 1 << u;
            }
        }
        let mut base = [0u64; 64];
        for player in 0..self.n {
            // Remove the player's own purchases from the adjacency.
            base[..self.n].copy_from_slice(&adj[..self.n]);
            base[player] &= !bought[player];
            let mut m = bought[player];
            while m != 0 {
                let v = m.trailing_zeros() as usize;
                m &= m - 1;
                base[v] &= !(1u64 << player);
            }
            let current = bought[player];
            let current_usage = self.usage(&base[..self.n], player, current);
            let current_edges = i128::from(current.count_ones());
            for &mask in &self.subsets[player] {
                if mask == current {
                    continue;
                }
                let usage = self.usage(&base[..self.n], player, mask);
                let improving = match (current_usage, usage) {
                    (Some(b), Some(a)) => {
                        let edge_delta = i128::from(mask.count_ones()) - current_edges;
                        self.p * edge_delta + self.q * (i128::from(a) - i128::from(b)) < 0
                    }
                    (Some(_), None) => false,
                    (None, Some(_)) => true,
                    (None, None) => false,
                };
                if improving {
                    return false;
                }
            }
        }
        true
    }
}

fn bought_masks_from_index(n: usize, pairs: &[(usize, usize)], index: u64, out: &mut [u64]) {
    out[..n].fill(0);
    let mut rest = index;
    for &(u, v) in pairs {
        match rest % 3 {
            0 => {}
            1 => out[u] |= 1 << v,
            _ => out[v] |= 1 << u,
        }
        rest /= 3;
    }
}

// ---------------------------------------------------------------------------
// Catalog.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentLine {
    pub size: usize,
    pub diameter: u32,
    pub avg_degree: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub digest: String,
    pub n: usize,
    pub alpha: String,
    pub edges: Vec<(usize, usize)>,
    pub tree: bool,
    pub components: Vec<ComponentLine>,
    pub social_cost: String,
    pub report_digest: String,
    pub violations: usize,
    pub iso_key: String,
}

impl CatalogEntry {
    pub fn profile(&self) -> Result<StrategyProfile, ProfileError> {
        StrategyProfile::build(self.n, &self.edges)
    }

    pub fn alpha_value(&self) -> BigRational {
        parse_positive_rational(&self.alpha).expect("catalog alpha is a positive rational")
    }

    pub fn max_component_size(&self) -> usize {
        self.components.iter().map(|c| c.size).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumCatalog {
    /// True when every equilibrium of the scanned cells is present.
    pub exhaustive: bool,
    pub seed: u64,
    pub mode: SearchMode,
    pub entries: Vec<CatalogEntry>,
}

#[derive(Serialize, Deserialize)]
struct CatalogHeaderDoc {
    kind: String,
    version: u32,
    exhaustive: bool,
    seed: u64,
    mode: String,
}

impl EquilibriumCatalog {
    /// Drops isomorphic duplicates within each (n, alpha) cell, keeping the
    /// smallest digest. Ownership-sensitive keys distinguish orientations of
    /// the same underlying graph; insensitive keys collapse them.
    pub fn dedup_isomorphic(&mut self, ownership_sensitive: bool) {
        let mut seen: BTreeSet<(usize, String, String)> = BTreeSet::new();
        self.entries.retain(|entry| {
            let profile = entry
                .profile()
                .expect("catalog entries hold valid profiles");
            let key = if ownership_sensitive {
                profile_iso_key(&profile)
            } else {
                graph_iso_key(&profile.graph())
            };
            seen.insert((entry.n, entry.alpha.clone(), key))
        });
    }

    /// Line-delimited serialization: one header object, then one entry per
    /// line, already sorted.
    pub fn to_jsonl(&self) -> String {
        let header = CatalogHeaderDoc {
            kind: "equilibrium-catalog".to_string(),
            version: 1,
            exhaustive: self.exhaustive,
            seed: self.seed,
            mode: self.mode.as_str().to_string(),
        };
        let mut out = serde_json::to_string(&header).expect("header serializes");
        out.push('\n');
        for entry in &self.entries {
            out.push_str(&serde_json::to_string(entry).expect("entry serializes"));
            out.push('\n');
        }
        out
    }

    /// Parses a catalog and re-verifies every entry as an exact equilibrium.
    pub fn from_jsonl(text: &str, budget: usize) -> Result<EquilibriumCatalog, SearchError> {
        let mut lines = text.lines().enumerate();
        let (_, header_line) = lines.next().ok_or(SearchError::BadCatalog {
            line: 1,
            message: "empty catalog".to_string(),
        })?;
        let header: CatalogHeaderDoc =
            serde_json::from_str(header_line).map_err(|e| SearchError::BadCatalog {
                line: 1,
                message: e.to_string(),
            })?;
        let mode: SearchMode = header.mode.parse().map_err(|e| SearchError::BadCatalog {
            line: 1,
            message: e,
        })?;
        let mut entries = Vec::new();
        for (idx, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let entry: CatalogEntry =
                serde_json::from_str(line).map_err(|e| SearchError::BadCatalog {
                    line: idx + 1,
                    message: e.to_string(),
                })?;
            let profile = entry.profile().map_err(|e| SearchError::BadCatalog {
                line: idx + 1,
                message: e.to_string(),
            })?;
            let alpha =
                parse_positive_rational(&entry.alpha).map_err(|e| SearchError::BadCatalog {
                    line: idx + 1,
                    message: e.to_string(),
                })?;
            let cfg = GameConfig::new(entry.n, alpha)?;
            let verdict = is_exact_ne(&profile, &cfg, budget)?;
            if !verdict.is_ne {
                return Err(SearchError::BadCatalog {
                    line: idx + 1,
                    message: format!("entry {} is not an equilibrium", entry.digest),
                });
            }
            entries.push(entry);
        }
        Ok(EquilibriumCatalog {
            exhaustive: header.exhaustive,
            seed: header.seed,
            mode,
            entries,
        })
    }
}

/// Builds the catalog entry for a verified equilibrium, including its
/// consistency report digest and violation count.
pub fn catalog_entry(
    profile: &StrategyProfile,
    cfg: &GameConfig,
) -> Result<CatalogEntry, GameError> {
    let analysis = crate::bounds::Analysis::of(profile);
    let reports = crate::bounds::consistency_report_with(profile, cfg, &analysis, true)?;
    let components = analysis
        .nontrivial
        .iter()
        .map(|(h, _)| ComponentLine {
            size: h.size(),
            diameter: h.diameter,
            avg_degree: rational_string(&h.avg_degree()),
        })
        .collect();
    let social = match social_cost(profile, cfg)? {
        Cost::Finite(c) => rational_string(&c),
        Cost::Unreachable => "unreachable".to_string(),
    };
    Ok(CatalogEntry {
        digest: profile_digest(profile),
        n: profile.n(),
        alpha: rational_string(&cfg.alpha),
        edges: profile.purchases().collect(),
        tree: analysis.is_tree(),
        components,
        social_cost: social,
        report_digest: report_digest(&reports),
        violations: violation_count(&reports),
        iso_key: profile_iso_key(profile),
    })
}

// ---------------------------------------------------------------------------
// Exhaustive search.
// ---------------------------------------------------------------------------

/// All exact equilibria for one (n, alpha) cell, as profile indices in
/// ascending order, plus the number of candidates examined.
pub fn exhaustive_cell(
    n: usize,
    alpha: &BigRational,
    workers: usize,
    budget: usize,
) -> Result<(Vec<u64>, u64), SearchError> {
    if n == 0 {
        return Err(SearchError::BadPlayerCount(n));
    }
    if n > EXHAUSTIVE_LIMIT {
        return Err(SearchError::TooLarge(n));
    }
    let total = profile_count(n);
    let checker = LeanChecker::new(n, alpha);
    let pairs = pair_list(n);
    let workers = workers.clamp(1, total.max(1) as usize);

    let found: Vec<u64> = match &checker {
        Some(checker) => {
            let mut shards: Vec<Vec<u64>> = Vec::new();
            std::thread::scope(|scope| {
                let chunk = total.div_ceil(workers as u64);
                let handles: Vec<_> = (0..workers as u64)
                    .map(|w| {
                        let lo = w * chunk;
                        let hi = ((w + 1) * chunk).min(total);
                        let pairs = &pairs;
                        scope.spawn(move || {
                            let mut hits = Vec::new();
                            let mut bought = [0u64; 64];
                            for idx in lo..hi {
                                bought_masks_from_index(n, pairs, idx, &mut bought);
                                if checker.is_ne(&bought[..n]) {
                                    hits.push(idx);
                                }
                            }
                            hits
                        })
                    })
                    .collect();
                for handle in handles {
                    shards.push(handle.join().expect("search worker panicked"));
                }
            });
            shards.into_iter().flatten().collect()
        }
        None => {
            // Alpha too large for the lean path; fall back to the public
            // checker (still exact, just slower).
            let cfg = GameConfig::new(n, alpha.clone())?;
            let mut hits = Vec::new();
            for idx in 0..total {
                let profile = profile_from_index(n, idx);
                if is_exact_ne(&profile, &cfg, budget.max(n))?.is_ne {
                    hits.push(idx);
                }
            }
            hits
        }
    };

    // Re-verify each hit through the public checker.
    let cfg = GameConfig::new(n, alpha.clone())?;
    for &idx in &found {
        let profile = profile_from_index(n, idx);
        let verdict = is_exact_ne(&profile, &cfg, budget.max(n))?;
        if !verdict.is_ne {
            return Err(SearchError::VerificationFailed(profile_digest(&profile)));
        }
    }
    Ok((found, total))
}

/// Exhaustive search restricted to canonical representatives of the
/// underlying undirected graphs: one graph per isomorphism class, all of its
/// orientations. Cannot lose equilibria up to isomorphism. Returns the found
/// profiles and the number of candidates examined.
pub fn exhaustive_cell_pruned(
    n: usize,
    alpha: &BigRational,
    budget: usize,
) -> Result<(Vec<StrategyProfile>, u64), SearchError> {
    if n == 0 {
        return Err(SearchError::BadPlayerCount(n));
    }
    if n > EXHAUSTIVE_LIMIT {
        return Err(SearchError::TooLarge(n));
    }
    let pairs = pair_list(n);
    let m = pairs.len();
    let pair_index: BTreeMap<(usize, usize), usize> =
        pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    // Permutations acting on pair indices.
    let perm_tables: Vec<Vec<usize>> = permutations(n)
        .into_iter()
        .map(|perm| {
            pairs
                .iter()
                .map(|&(u, v)| {
                    let (a, b) = (perm[u], perm[v]);
                    pair_index[&(a.min(b), a.max(b))]
                })
                .collect()
        })
        .collect();
    let apply = |mask: u32, table: &[usize]| -> u32 {
        let mut out = 0u32;
        for (i, &j) in table.iter().enumerate() {
            if mask & (1 << i) != 0 {
                out |= 1 << j;
            }
        }
        out
    };

    let cfg = GameConfig::new(n, alpha.clone())?;
    let checker = LeanChecker::new(n, alpha);
    let mut found = Vec::new();
    let mut examined = 0u64;
    for graph_mask in 0u32..(1u32 << m) {
        if perm_tables
            .iter()
            .any(|table| apply(graph_mask, table) < graph_mask)
        {
            continue; // not the canonical representative
        }
        let edge_positions: Vec<usize> = (0..m).filter(|i| graph_mask & (1 << i) != 0).collect();
        for orientation in 0u32..(1u32 << edge_positions.len()) {
            examined += 1;
            let mut bought = [0u64; 64];
            let mut purchases = Vec::with_capacity(edge_positions.len());
            for (bit, &pos) in edge_positions.iter().enumerate() {
                let (u, v) = pairs[pos];
                if orientation & (1 << bit) == 0 {
                    bought[u] |= 1 << v;
                    purchases.push((u, v));
                } else {
                    bought[v] |= 1 << u;
                    purchases.push((v, u));
                }
            }
            let is_ne = match &checker {
                Some(c) => c.is_ne(&bought[..n]),
                None => {
                    let profile = StrategyProfile::build(n, &purchases)?;
                    is_exact_ne(&profile, &cfg, budget.max(n))?.is_ne
                }
            };
            if is_ne {
                let profile = StrategyProfile::build(n, &purchases)?;
                let verdict = is_exact_ne(&profile, &cfg, budget.max(n))?;
                if !verdict.is_ne {
                    return Err(SearchError::VerificationFailed(profile_digest(&profile)));
                }
                found.push(profile);
            }
        }
    }
    Ok((found, examined))
}

/// Full catalog over the alpha grid according to the search spec.
pub fn find_all_ne(spec: &SearchSpec) -> Result<EquilibriumCatalog, SearchError> {
    let mut entries = Vec::new();
    for alpha in &spec.alpha_grid {
        let cfg = GameConfig::new(spec.n, alpha.clone())?;
        match spec.mode {
            SearchMode::Exhaustive => {
                if spec.prune_isomorphic {
                    let (profiles, _) = exhaustive_cell_pruned(spec.n, alpha, spec.exact_budget)?;
                    for profile in profiles {
                        entries.push(catalog_entry(&profile, &cfg)?);
                    }
                } else {
                    let (indices, _) =
                        exhaustive_cell(spec.n, alpha, spec.workers, spec.exact_budget)?;
                    for idx in indices {
                        let profile = profile_from_index(spec.n, idx);
                        entries.push(catalog_entry(&profile, &cfg)?);
                    }
                }
            }
            SearchMode::Dynamics => {
                let start = StrategyProfile::empty(spec.n)?;
                if let DynamicsOutcome::Converged { profile, .. } = best_response_dynamics(
                    &start,
                    &cfg,
                    Schedule::RoundRobin,
                    spec.max_rounds,
                    spec.exact_budget,
                )? {
                    entries.push(catalog_entry(&profile, &cfg)?);
                }
            }
            SearchMode::RandomRestart => {
                let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
                let mut seen = BTreeSet::new();
                for _ in 0..spec.restarts {
                    let start = random_profile(spec.n, &mut rng)?;
                    let schedule_seed = rng.random::<u64>();
                    if let DynamicsOutcome::Converged { profile, .. } = best_response_dynamics(
                        &start,
                        &cfg,
                        Schedule::Random(schedule_seed),
                        spec.max_rounds,
                        spec.exact_budget,
                    )? {
                        if seen.insert(profile_digest(&profile)) {
                            entries.push(catalog_entry(&profile, &cfg)?);
                        }
                    }
                }
            }
        }
    }
    entries
        .sort_by(|a, b| (a.n, a.alpha_value(), &a.digest).cmp(&(b.n, b.alpha_value(), &b.digest)));
    Ok(EquilibriumCatalog {
        exhaustive: spec.mode == SearchMode::Exhaustive,
        seed: spec.seed,
        mode: spec.mode,
        entries,
    })
}

fn random_profile(n: usize, rng: &mut ChaCha8Rng) -> Result<StrategyProfile, ProfileError> {
    let mut purchases = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            match rng.random_range(0..3) {
                0 => {}
                1 => purchases.push((u, v)),
                _ => purchases.push((v, u)),
            }
        }
    }
    StrategyProfile::build(n, &purchases)
}

// ---------------------------------------------------------------------------
// Best-response dynamics.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schedule {
    RoundRobin,
    Random(u64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum DynamicsOutcome {
    Converged {
        profile: StrategyProfile,
        rounds: usize,
    },
    /// The repeating digest segment, in visit order.
    CycleDetected {
        digests: Vec<String>,
    },
    RoundLimit,
}

/// Iterated exact best responses. A round visits every player once; the
/// dynamics converge when a full round changes nothing, and the converged
/// profile is re-verified as an exact equilibrium before being reported.
/// Cycles are detected through visited-profile digests.
pub fn best_response_dynamics(
    start: &StrategyProfile,
    cfg: &GameConfig,
    schedule: Schedule,
    max_rounds: usize,
    budget: usize,
) -> Result<DynamicsOutcome, SearchError> {
    let n = start.n();
    let mut profile = start.clone();
    let mut rng = match schedule {
        Schedule::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        Schedule::RoundRobin => None,
    };
    let mut trace: Vec<String> = vec![profile_digest(&profile)];
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    seen.insert(trace[0].clone(), 0);

    for round in 0..max_rounds {
        let mut order: Vec<usize> = (0..n).collect();
        if let Some(rng) = rng.as_mut() {
            order.shuffle(rng);
        }
        let mut changed = false;
        for &player in &order {
            let br = exact_best_response(&profile, cfg, player, budget)?;
            if &br.strategy != profile.strategy(player) {
                profile = profile.with_strategy(player, br.strategy)?;
                changed = true;
                let digest = profile_digest(&profile);
                if let Some(&first) = seen.get(&digest) {
                    return Ok(DynamicsOutcome::CycleDetected {
                        digests: trace[first..].to_vec(),
                    });
                }
                seen.insert(digest.clone(), trace.len());
                trace.push(digest);
            }
        }
        if !changed {
            let verdict = is_exact_ne(&profile, cfg, budget)?;
            if !verdict.is_ne {
                return Err(SearchError::VerificationFailed(profile_digest(&profile)));
            }
            return Ok(DynamicsOutcome::Converged {
                profile,
                rounds: round + 1,
            });
        }
    }
    Ok(DynamicsOutcome::RoundLimit)
}

// ---------------------------------------------------------------------------
// Campaign scans.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignCell {
    pub n: usize,
    pub alpha: BigRational,
    pub profiles_checked: u64,
    pub ne_count: usize,
    pub tree_ne_count: usize,
    pub nontree_ne_count: usize,
    pub max_component_size: usize,
    pub violations: usize,
    /// Digests of non-tree equilibria found at alpha > n.
    pub headline: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignReport {
    pub cells: Vec<CampaignCell>,
}

pub const CAMPAIGN_CSV_HEADER: &str =
    "n,alpha,profiles_checked,ne_count,tree_ne_count,nontree_ne_count,max_nH,violations";

impl CampaignReport {
    pub fn csv(&self) -> String {
        let mut out = String::from(CAMPAIGN_CSV_HEADER);
        out.push('\n');
        for c in &self.cells {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                c.n,
                rational_string(&c.alpha),
                c.profiles_checked,
                c.ne_count,
                c.tree_ne_count,
                c.nontree_ne_count,
                c.max_component_size,
                c.violations
            ));
        }
        out
    }

    pub fn total_violations(&self) -> usize {
        self.cells.iter().map(|c| c.violations).sum()
    }

    pub fn headlines(&self) -> Vec<String> {
        self.cells
            .iter()
            .flat_map(|c| {
                c.headline.iter().map(move |d| {
                    format!(
                        "n={} alpha={} non-tree NE {}",
                        c.n,
                        rational_string(&c.alpha),
                        d
                    )
                })
            })
            .collect()
    }
}

/// Exhaustive scan of the given (n, alpha) cells: every equilibrium found is
/// cataloged and run through the consistency harness; an empty grid yields
/// an empty report.
pub fn conjecture_scan(
    cells: &[(usize, BigRational)],
    workers: usize,
    budget: usize,
    seed: u64,
) -> Result<(CampaignReport, EquilibriumCatalog), SearchError> {
    scan_cells(cells, workers, budget, seed, false)
}

/// Like [`conjecture_scan`] but enumerating only canonical representatives
/// of the underlying undirected graphs; complete up to isomorphism, with
/// `profiles_checked` counting the candidates actually examined.
pub fn conjecture_scan_pruned(
    cells: &[(usize, BigRational)],
    budget: usize,
    seed: u64,
) -> Result<(CampaignReport, EquilibriumCatalog), SearchError> {
    scan_cells(cells, 1, budget, seed, true)
}

fn scan_cells(
    cells: &[(usize, BigRational)],
    workers: usize,
    budget: usize,
    seed: u64,
    prune: bool,
) -> Result<(CampaignReport, EquilibriumCatalog), SearchError> {
    let mut report_cells = Vec::new();
    let mut entries = Vec::new();
    for (n, alpha) in cells {
        let cfg = GameConfig::new(*n, alpha.clone())?;
        let (profiles, checked) = if prune {
            exhaustive_cell_pruned(*n, alpha, budget)?
        } else {
            let (indices, checked) = exhaustive_cell(*n, alpha, workers, budget)?;
            let profiles = indices
                .into_iter()
                .map(|idx| profile_from_index(*n, idx))
                .collect();
            (profiles, checked)
        };
        let mut cell = CampaignCell {
            n: *n,
            alpha: alpha.clone(),
            profiles_checked: checked,
            ne_count: profiles.len(),
            tree_ne_count: 0,
            nontree_ne_count: 0,
            max_component_size: 0,
            violations: 0,
            headline: Vec::new(),
        };
        let alpha_gt_n = *alpha > crate::rational::rational_from_usize(*n);
        for profile in profiles {
            let entry = catalog_entry(&profile, &cfg)?;
            if entry.tree {
                cell.tree_ne_count += 1;
            } else {
                cell.nontree_ne_count += 1;
                if alpha_gt_n {
                    cell.headline.push(entry.digest.clone());
                }
            }
            cell.max_component_size = cell.max_component_size.max(entry.max_component_size());
            cell.violations += entry.violations;
            entries.push(entry);
        }
        report_cells.push(cell);
    }
    entries
        .sort_by(|a, b| (a.n, a.alpha_value(), &a.digest).cmp(&(b.n, b.alpha_value(), &b.digest)));
    Ok((
        CampaignReport {
            cells: report_cells,
        },
        EquilibriumCatalog {
            exhaustive: true,
            seed,
            mode: SearchMode::Exhaustive,
            entries,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_profiles(2).unwrap().count(), 3);
        assert_eq!(enumerate_profiles(3).unwrap().count(), 27);
        assert_eq!(enumerate_profiles(4).unwrap().count(), 729);
        assert_eq!(profile_count(5), 59049);
        assert!(matches!(
            enumerate_profiles(7),
            Err(SearchError::TooLarge(7))
        ));
        assert!(enumerate_profiles(0).is_err());
    }

    #[test]
    fn enumeration_has_no_reciprocal_pairs_and_no_duplicates() {
        let mut seen = BTreeSet::new();
        for profile in enumerate_profiles(3).unwrap() {
            assert!(!profile.has_reciprocal_pair());
            assert!(seen.insert(profile_digest(&profile)));
        }
        assert_eq!(seen.len(), 27);
    }

    #[test]
    fn two_player_equilibria_for_any_alpha() {
        for alpha in [ratio(1, 2), ratio(5, 1), ratio(100, 1)] {
            let (found, checked) = exhaustive_cell(2, &alpha, 1, 12).unwrap();
            assert_eq!(checked, 3);
            // Exactly the two single-edge orientations.
            assert_eq!(found.len(), 2);
        }
    }

    #[test]
    fn three_player_high_alpha_equilibria_are_trees() {
        let (found, _) = exhaustive_cell(3, &ratio(5, 1), 2, 12).unwrap();
        assert!(!found.is_empty());
        for idx in found {
            let profile = profile_from_index(3, idx);
            let analysis = crate::bounds::Analysis::of(&profile);
            assert!(analysis.is_tree(), "index {idx}");
        }
    }

    #[test]
    fn k4_appears_at_cheap_alpha() {
        let (found, _) = exhaustive_cell(4, &ratio(1, 2), 2, 12).unwrap();
        let mut has_k4 = false;
        for idx in &found {
            let profile = profile_from_index(4, *idx);
            if profile.graph().edge_count() == 6 {
                has_k4 = true;
            }
        }
        assert!(has_k4, "clique equilibria expected at alpha = 1/2");
    }

    #[test]
    fn sharded_search_is_partition_independent() {
        let (reference, _) = exhaustive_cell(4, &ratio(3, 1), 1, 12).unwrap();
        for workers in [2usize, 3, 7] {
            let (found, checked) = exhaustive_cell(4, &ratio(3, 1), workers, 12).unwrap();
            assert_eq!(found, reference, "workers={workers}");
            assert_eq!(checked, 729);
        }
    }

    #[test]
    fn pruned_and_full_search_agree_up_to_isomorphism() {
        for alpha in [ratio(1, 2), ratio(2, 1), ratio(5, 1)] {
            let (full, _) = exhaustive_cell(4, &alpha, 2, 12).unwrap();
            let full_keys: BTreeSet<String> = full
                .iter()
                .map(|&idx| profile_iso_key(&profile_from_index(4, idx)))
                .collect();
            let (pruned, examined) = exhaustive_cell_pruned(4, &alpha, 12).unwrap();
            let pruned_keys: BTreeSet<String> = pruned.iter().map(profile_iso_key).collect();
            assert_eq!(full_keys, pruned_keys, "alpha={alpha}");
            assert!(examined < 729, "pruning must cut the candidate count");
        }
    }

    #[test]
    fn lean_checker_matches_the_public_checker_on_samples() {
        // The scan's allocation-light path must agree with the public
        // verifier verdict-for-verdict; sample across the n=5 space.
        for alpha in [ratio(3, 2), ratio(5, 1), ratio(9, 1)] {
            let checker = LeanChecker::new(5, &alpha).unwrap();
            let cfg = GameConfig::new(5, alpha.clone()).unwrap();
            let pairs = pair_list(5);
            let total = profile_count(5);
            let mut bought = [0u64; 64];
            for idx in (0..total).step_by(29) {
                bought_masks_from_index(5, &pairs, idx, &mut bought);
                let lean = checker.is_ne(&bought[..5]);
                let public = is_exact_ne(&profile_from_index(5, idx), &cfg, 12)
                    .unwrap()
                    .is_ne;
                assert_eq!(lean, public, "idx={idx} alpha={alpha}");
            }
        }
    }

    #[test]
    fn oversized_alpha_falls_back_to_the_public_checker() {
        // Numerator beyond i128 keeps the search exact through the fallback.
        let huge =
            crate::rational::parse_positive_rational("170141183460469231731687303715884105728/3")
                .unwrap();
        assert!(LeanChecker::new(2, &huge).is_none());
        let (found, checked) = exhaustive_cell(2, &huge, 1, 12).unwrap();
        assert_eq!(checked, 3);
        assert_eq!(found.len(), 2);
    }

    #[test]
    fn dynamics_fixed_point_converges_immediately() {
        let p = StrategyProfile::build(2, &[(0, 1)]).unwrap();
        let cfg = GameConfig::new(2, ratio(3, 1)).unwrap();
        match best_response_dynamics(&p, &cfg, Schedule::RoundRobin, 50, 12).unwrap() {
            DynamicsOutcome::Converged { profile, rounds } => {
                assert_eq!(profile, p);
                assert_eq!(rounds, 1);
            }
            other => panic!("expected convergence, got {other:?}"),
        }
    }

    #[test]
    fn dynamics_from_empty_graph_converges_to_ne() {
        let start = StrategyProfile::empty(4).unwrap();
        let cfg = GameConfig::new(4, ratio(3, 1)).unwrap();
        match best_response_dynamics(&start, &cfg, Schedule::RoundRobin, 100, 12).unwrap() {
            DynamicsOutcome::Converged { profile, .. } => {
                assert!(is_exact_ne(&profile, &cfg, 12).unwrap().is_ne);
                assert!(crate::graph::is_connected(&profile.graph()));
            }
            other => panic!("expected convergence, got {other:?}"),
        }
    }

    #[test]
    fn dynamics_found_equilibrium_at_n8_passes_the_harness() {
        let start = StrategyProfile::empty(8).unwrap();
        let cfg = GameConfig::new(8, ratio(9, 1)).unwrap();
        match best_response_dynamics(&start, &cfg, Schedule::RoundRobin, 200, 12).unwrap() {
            DynamicsOutcome::Converged { profile, .. } => {
                let entry = catalog_entry(&profile, &cfg).unwrap();
                assert_eq!(entry.violations, 0);
            }
            other => panic!("expected convergence, got {other:?}"),
        }
    }

    #[test]
    fn dynamics_is_deterministic_per_seed() {
        let start = StrategyProfile::empty(5).unwrap();
        let cfg = GameConfig::new(5, ratio(2, 1)).unwrap();
        let a = best_response_dynamics(&start, &cfg, Schedule::Random(42), 100, 12).unwrap();
        let b = best_response_dynamics(&start, &cfg, Schedule::Random(42), 100, 12).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn dynamics_reports_the_round_limit() {
        let start = StrategyProfile::empty(4).unwrap();
        let cfg = GameConfig::new(4, ratio(2, 1)).unwrap();
        let outcome = best_response_dynamics(&start, &cfg, Schedule::RoundRobin, 0, 12).unwrap();
        assert_eq!(outcome, DynamicsOutcome::RoundLimit);
    }

    #[test]
    fn catalog_round_trip_reverifies() {
        let spec = SearchSpec::exhaustive(3, vec![ratio(5, 1), ratio(1, 2)]);
        let catalog = find_all_ne(&spec).unwrap();
        assert!(catalog.exhaustive);
        assert!(!catalog.entries.is_empty());
        let text = catalog.to_jsonl();
        let reloaded = EquilibriumCatalog::from_jsonl(&text, 12).unwrap();
        assert_eq!(reloaded, catalog);
        // Tampering with an entry breaks verification.
        let broken = text.replace("\"alpha\":\"5\"", "\"alpha\":\"1/5\"");
        assert_ne!(broken, text);
        assert!(EquilibriumCatalog::from_jsonl(&broken, 12).is_err());
        // A malformed alpha is a load error, not a crash.
        let garbled = text.replace("\"alpha\":\"5\"", "\"alpha\":\"zero\"");
        assert!(matches!(
            EquilibriumCatalog::from_jsonl(&garbled, 12),
            Err(SearchError::BadCatalog { .. })
        ));
    }

    #[test]
    fn dedup_collapses_orientations_only_when_asked() {
        let spec = SearchSpec::exhaustive(3, vec![ratio(5, 1)]);
        let mut catalog = find_all_ne(&spec).unwrap();
        let full = catalog.entries.len();
        let mut ownership = catalog.clone();
        ownership.dedup_isomorphic(true);
        catalog.dedup_isomorphic(false);
        assert!(ownership.entries.len() <= full);
        assert!(catalog.entries.len() <= ownership.entries.len());
        assert!(!catalog.entries.is_empty());
    }

    #[test]
    fn empty_grid_scan_is_empty() {
        let (report, catalog) = conjecture_scan(&[], 1, 12, 0).unwrap();
        assert!(report.cells.is_empty());
        assert!(catalog.entries.is_empty());
        assert_eq!(report.csv(), format!("{CAMPAIGN_CSV_HEADER}\n"));
    }

    #[test]
    fn scan_cell_counts_are_consistent() {
        let cells = vec![(3usize, ratio(1, 2)), (3usize, ratio(5, 1))];
        let (report, catalog) = conjecture_scan(&cells, 2, 12, 7).unwrap();
        assert_eq!(report.cells.len(), 2);
        for cell in &report.cells {
            assert_eq!(cell.ne_count, cell.tree_ne_count + cell.nontree_ne_count);
            assert_eq!(cell.profiles_checked, 27);
        }
        let total: usize = report.cells.iter().map(|c| c.ne_count).sum();
        assert_eq!(total, catalog.entries.len());
        // Cheap alpha yields triangle equilibria.
        assert!(report.cells[0].nontree_ne_count > 0);
        assert_eq!(report.total_violations(), 0);
    }
}
