//! The game itself: player costs, social cost, unilateral deviations, exact
//! and greedy equilibrium verification, social optimum and price of anarchy.
//!
//! Every cost decision is taken in exact rational arithmetic; a disconnected
//! player has unreachable (infinite) cost, ordered above every rational.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::profile::{ProfileError, StrategyProfile};
use crate::rational::{rational_from_u64, rational_from_usize, rational_string};

/// Full strategy enumeration is `2^(n-1)` per player; beyond this it is not
/// worth pretending the check could finish.
pub const EXACT_ENUMERATION_LIMIT: usize = 24;

/// Default player-count budget for exact verification.
pub const DEFAULT_EXACT_BUDGET: usize = 12;

#[derive(Debug, Error, PartialEq)]
pub enum GameError {
    #[error("alpha must be positive, got {0}")]
    BadAlpha(String),
    #[error("config has n={expected} but the profile has n={actual}")]
    PlayerCountMismatch { expected: usize, actual: usize },
    #[error("player {0} out of range")]
    PlayerOutOfRange(usize),
    #[error(
        "exact verification enumerates 2^(n-1) strategies per player and is \
         limited to n <= {budget}; n={n} was given. Use the greedy check for \
         larger instances"
    )]
    BudgetExceeded { n: usize, budget: usize },
    #[error("invalid deviation for player {player}: {reason}")]
    BadDeviation { player: usize, reason: String },
    #[error("price of anarchy needs at least one equilibrium")]
    EmptyEquilibria,
    #[error("supplied profile #{index} is not a Nash equilibrium")]
    NotEquilibrium { index: usize },
    #[error(transparent)]
    Profile(#[from] ProfileError),
}

/// Game instance: player count and the exact rational edge price.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameConfig {
    pub n: usize,
    pub alpha: BigRational,
}

impl GameConfig {
    pub fn new(n: usize, alpha: BigRational) -> Result<Self, GameError> {
        if !alpha.is_positive() {
            return Err(GameError::BadAlpha(rational_string(&alpha)));
        }
        Ok(GameConfig { n, alpha })
    }

    fn check(&self, profile: &StrategyProfile) -> Result<(), GameError> {
        if profile.n() != self.n {
            return Err(GameError::PlayerCountMismatch {
                expected: self.n,
                actual: profile.n(),
            });
        }
        Ok(())
    }
}

/// A player's total cost; `Unreachable` when some node cannot be reached and
/// compares above every finite value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cost {
    Finite(BigRational),
    Unreachable,
}

impl Cost {
    pub fn finite(&self) -> Option<&BigRational> {
        match self {
            Cost::Finite(q) => Some(q),
            Cost::Unreachable => None,
        }
    }

    pub fn is_unreachable(&self) -> bool {
        matches!(self, Cost::Unreachable)
    }
}

impl PartialOrd for Cost {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cost {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use Cost::*;
        match (self, other) {
            (Finite(a), Finite(b)) => a.cmp(b),
            (Finite(_), Unreachable) => std::cmp::Ordering::Less,
            (Unreachable, Finite(_)) => std::cmp::Ordering::Greater,
            (Unreachable, Unreachable) => std::cmp::Ordering::Equal,
        }
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cost::Finite(q) => write!(f, "{}", rational_string(q)),
            Cost::Unreachable => write!(f, "unreachable"),
        }
    }
}

/// Cost difference of a unilateral deviation. A deviation that disconnects
/// the player is `PlusInfinite`; one that reconnects a disconnected player is
/// `MinusInfinite`. When the player is disconnected both before and after,
/// both costs are unbounded and the delta is reported as zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DeltaCost {
    Finite(BigRational),
    PlusInfinite,
    MinusInfinite,
}

impl DeltaCost {
    /// Strictly negative delta, i.e. the deviation improves the player.
    pub fn is_improvement(&self) -> bool {
        match self {
            DeltaCost::Finite(q) => q.is_negative(),
            DeltaCost::PlusInfinite => false,
            DeltaCost::MinusInfinite => true,
        }
    }
}

impl fmt::Display for DeltaCost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeltaCost::Finite(q) => write!(f, "{}", rational_string(q)),
            DeltaCost::PlusInfinite => write!(f, "+inf"),
            DeltaCost::MinusInfinite => write!(f, "-inf"),
        }
    }
}

/// `c_u = alpha * |s_u| + D(u)`, split into its two parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostBreakdown {
    pub edge_cost: BigRational,
    pub usage_cost: Option<u64>,
    pub total: Cost,
}

/// A unilateral replacement of one player's entire strategy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Deviation {
    pub player: usize,
    pub strategy: BTreeSet<usize>,
}

impl Deviation {
    pub fn replace(player: usize, strategy: BTreeSet<usize>) -> Self {
        Deviation { player, strategy }
    }

    pub fn add_edge(
        profile: &StrategyProfile,
        player: usize,
        target: usize,
    ) -> Result<Self, GameError> {
        let mut strategy = current(profile, player)?;
        if target == player || target >= profile.n() {
            return Err(bad(player, format!("cannot buy link to {target}")));
        }
        if !strategy.insert(target) {
            return Err(bad(player, format!("link to {target} already bought")));
        }
        Ok(Deviation { player, strategy })
    }

    pub fn delete_edge(
        profile: &StrategyProfile,
        player: usize,
        target: usize,
    ) -> Result<Self, GameError> {
        let mut strategy = current(profile, player)?;
        if !strategy.remove(&target) {
            return Err(bad(player, format!("link to {target} is not bought")));
        }
        Ok(Deviation { player, strategy })
    }

    pub fn swap_edge(
        profile: &StrategyProfile,
        player: usize,
        sell: usize,
        buy: usize,
    ) -> Result<Self, GameError> {
        let mut strategy = current(profile, player)?;
        if !strategy.remove(&sell) {
            return Err(bad(player, format!("link to {sell} is not bought")));
        }
        if buy == player || buy >= profile.n() {
            return Err(bad(player, format!("cannot buy link to {buy}")));
        }
        if !strategy.insert(buy) {
            return Err(bad(player, format!("link to {buy} already bought")));
        }
        Ok(Deviation { player, strategy })
    }

    /// Sell the links to `sell.0` and `sell.1`, buy a link to `buy`.
    pub fn sell_two_buy_one(
        profile: &StrategyProfile,
        player: usize,
        sell: (usize, usize),
        buy: usize,
    ) -> Result<Self, GameError> {
        let mut strategy = current(profile, player)?;
        for t in [sell.0, sell.1] {
            if !strategy.remove(&t) {
                return Err(bad(player, format!("link to {t} is not bought")));
            }
        }
        if buy == player || buy >= profile.n() {
            return Err(bad(player, format!("cannot buy link to {buy}")));
        }
        strategy.insert(buy);
        Ok(Deviation { player, strategy })
    }

    pub fn buy_set(
        profile: &StrategyProfile,
        player: usize,
        extra: &BTreeSet<usize>,
    ) -> Result<Self, GameError> {
        let mut strategy = current(profile, player)?;
        for &t in extra {
            if t == player || t >= profile.n() {
                return Err(bad(player, format!("cannot buy link to {t}")));
            }
            strategy.insert(t);
        }
        Ok(Deviation { player, strategy })
    }
}

fn current(profile: &StrategyProfile, player: usize) -> Result<BTreeSet<usize>, GameError> {
    if player >= profile.n() {
        return Err(GameError::PlayerOutOfRange(player));
    }
    Ok(profile.strategy(player).clone())
}

fn bad(player: usize, reason: String) -> GameError {
    GameError::BadDeviation { player, reason }
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn mask_of(set: &BTreeSet<usize>) -> u64 {
    set.iter().fold(0u64, |m, &v| m | (1u64 << v))
}

fn set_of(mask: u64) -> BTreeSet<usize> {
    let mut set = BTreeSet::new();
    let mut m = mask;
    while m != 0 {
        set.insert(m.trailing_zeros() as usize);
        m &= m - 1;
    }
    set
}

/// Distance sums for one player under varying strategies. The adjacency
/// contributed by the other players is fixed; only the player's own purchases
/// change, and they are all incident to the player, so BFS expansion beyond
/// the first layer never needs them.
pub(crate) struct DeviationEngine {
    player: usize,
    base: Vec<u64>,
    full: u64,
}

impl DeviationEngine {
    pub fn new(profile: &StrategyProfile, player: usize) -> Self {
        let n = profile.n();
        let mut base = vec![0u64; n];
        for (owner, target) in profile.purchases() {
            if owner == player {
                continue;
            }
            base[owner] |= 1 << target;
            base[target] |= 1 << owner;
        }
        DeviationEngine {
            player,
            base,
            full: full_mask(n),
        }
    }

    /// Distance sum from the player when her strategy is `strategy_mask`
    /// (node-indexed bits); `None` when some node is unreachable.
    pub fn usage_with(&self, strategy_mask: u64) -> Option<u64> {
        let pbit = 1u64 << self.player;
        let mut visited = pbit;
        let mut frontier = (self.base[self.player] | strategy_mask) & !pbit;
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
                next |= self.base[v];
            }
            frontier = next & !visited;
        }
        (visited == self.full).then_some(sum)
    }
}

/// Distance sum from `src` over plain mask adjacency.
pub(crate) fn mask_usage(adj: &[u64], n: usize, src: usize) -> Option<u64> {
    let sbit = 1u64 << src;
    let mut visited = sbit;
    let mut frontier = adj[src] & !sbit;
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
            next |= adj[v];
        }
        frontier = next & !visited;
    }
    (visited == full_mask(n)).then_some(sum)
}

pub(crate) fn profile_masks(profile: &StrategyProfile) -> Vec<u64> {
    let mut adj = vec![0u64; profile.n()];
    for (owner, target) in profile.purchases() {
        adj[owner] |= 1 << target;
        adj[target] |= 1 << owner;
    }
    adj
}

pub(crate) fn masks_connected(adj: &[u64], n: usize) -> bool {
    let mut visited = 1u64;
    let mut frontier = adj[0] & !1;
    while frontier != 0 {
        visited |= frontier;
        let mut next = 0u64;
        let mut f = frontier;
        while f != 0 {
            let v = f.trailing_zeros() as usize;
            f &= f - 1;
            next |= adj[v];
        }
        frontier = next & !visited;
    }
    visited == full_mask(n)
}

/// Exact sign of `alpha * edge_delta + usage_delta` without allocating in the
/// common case of a word-sized alpha.
struct AlphaSign {
    small: Option<(i128, i128)>,
    numer: BigInt,
    denom: BigInt,
}

impl AlphaSign {
    fn new(alpha: &BigRational) -> Self {
        let small = match (i64::try_from(alpha.numer()), i64::try_from(alpha.denom())) {
            (Ok(p), Ok(q)) => Some((i128::from(p), i128::from(q))),
            _ => None,
        };
        AlphaSign {
            small,
            numer: alpha.numer().clone(),
            denom: alpha.denom().clone(),
        }
    }

    /// Sign of `alpha * edge_delta + usage_delta`.
    fn sign(&self, edge_delta: i64, usage_delta: i128) -> std::cmp::Ordering {
        if let Some((p, q)) = self.small {
            // |edge_delta| <= 64 and |usage_delta| <= n^3, so this cannot
            // overflow i128 for word-sized alpha.
            return (p * i128::from(edge_delta) + q * usage_delta).cmp(&0);
        }
        let value =
            &self.numer * BigInt::from(edge_delta) + &self.denom * BigInt::from(usage_delta);
        value.cmp(&BigInt::zero())
    }
}

/// `c_u(s)` with its breakdown.
pub fn player_cost(
    profile: &StrategyProfile,
    cfg: &GameConfig,
    player: usize,
) -> Result<CostBreakdown, GameError> {
    cfg.check(profile)?;
    if player >= profile.n() {
        return Err(GameError::PlayerOutOfRange(player));
    }
    let engine = DeviationEngine::new(profile, player);
    let usage = engine.usage_with(mask_of(profile.strategy(player)));
    let edge_cost = &cfg.alpha * rational_from_usize(profile.strategy(player).len());
    let total = match usage {
        Some(u) => Cost::Finite(&edge_cost + rational_from_u64(u)),
        None => Cost::Unreachable,
    };
    Ok(CostBreakdown {
        edge_cost,
        usage_cost: usage,
        total,
    })
}

/// `C(s) = alpha * (total purchases) + sum of all distance sums`.
pub fn social_cost(profile: &StrategyProfile, cfg: &GameConfig) -> Result<Cost, GameError> {
    cfg.check(profile)?;
    let adj = profile_masks(profile);
    let mut usage_total = 0u64;
    for u in 0..profile.n() {
        match mask_usage(&adj, profile.n(), u) {
            Some(s) => usage_total += s,
            None => return Ok(Cost::Unreachable),
        }
    }
    let cost =
        &cfg.alpha * rational_from_usize(profile.purchase_count()) + rational_from_u64(usage_total);
    Ok(Cost::Finite(cost))
}

/// Exact cost difference `c_player(s') - c_player(s)` for a deviation.
pub fn delta_cost(
    profile: &StrategyProfile,
    cfg: &GameConfig,
    deviation: &Deviation,
) -> Result<DeltaCost, GameError> {
    cfg.check(profile)?;
    if deviation.player >= profile.n() {
        return Err(GameError::PlayerOutOfRange(deviation.player));
    }
    for &t in &deviation.strategy {
        if t == deviation.player || t >= profile.n() {
            return Err(bad(deviation.player, format!("invalid target {t}")));
        }
    }
    let engine = DeviationEngine::new(profile, deviation.player);
    let before = engine.usage_with(mask_of(profile.strategy(deviation.player)));
    let after = engine.usage_with(mask_of(&deviation.strategy));
    let edge_delta = rational_from_usize(deviation.strategy.len())
        - rational_from_usize(profile.strategy(deviation.player).len());
    Ok(match (before, after) {
        (Some(b), Some(a)) => {
            let usage_delta =
                BigRational::from_integer(BigInt::from(i128::from(a) - i128::from(b)));
            DeltaCost::Finite(&cfg.alpha * edge_delta + usage_delta)
        }
        (Some(_), None) => DeltaCost::PlusInfinite,
        (None, Some(_)) => DeltaCost::MinusInfinite,
        (None, None) => DeltaCost::Finite(BigRational::zero()),
    })
}

/// Verdict of an equilibrium check, with the first improving deviation found
/// (in deterministic order) when the profile is not an equilibrium.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeVerdict {
    pub is_ne: bool,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub deviation: Deviation,
    pub delta: DeltaCost,
}

impl NeVerdict {
    fn equilibrium() -> Self {
        NeVerdict {
            is_ne: true,
            witness: None,
        }
    }

    fn violated(deviation: Deviation, delta: DeltaCost) -> Self {
        NeVerdict {
            is_ne: false,
            witness: Some(Witness { deviation, delta }),
        }
    }
}

/// All strategy masks for `player`, ordered lexicographically by the sorted
/// target list: {} < {0} < {0,1} < ... < {0,2} < {1} < ...
pub(crate) fn lex_strategy_masks(n: usize, player: usize) -> Vec<u64> {
    let targets: Vec<usize> = (0..n).filter(|&v| v != player).collect();
    let mut out = Vec::with_capacity(1usize << targets.len());
    fn walk(targets: &[usize], start: usize, mask: u64, out: &mut Vec<u64>) {
        out.push(mask);
        for i in start..targets.len() {
            walk(targets, i + 1, mask | (1u64 << targets[i]), out);
        }
    }
    walk(&targets, 0, 0, &mut out);
    out
}

/// Exact Nash-equilibrium check: every unilateral strategy replacement of
/// every player must have nonnegative cost delta (indifferent deviations do
/// not disqualify). Deviations are scanned by player, then in lexicographic
/// strategy order, so a reported witness is the least violating deviation.
pub fn is_exact_ne(
    profile: &StrategyProfile,
    cfg: &GameConfig,
    budget: usize,
) -> Result<NeVerdict, GameError> {
    cfg.check(profile)?;
    let n = profile.n();
    let budget = budget.min(EXACT_ENUMERATION_LIMIT);
    if n > budget {
        return Err(GameError::BudgetExceeded { n, budget });
    }
    let alpha_sign = AlphaSign::new(&cfg.alpha);
    for player in 0..n {
        let engine = DeviationEngine::new(profile, player);
        let current_mask = mask_of(profile.strategy(player));
        let current_edges = profile.strategy(player).len() as i64;
        let current_usage = engine.usage_with(current_mask);
        for mask in lex_strategy_masks(n, player) {
            if mask == current_mask {
                continue;
            }
            let usage = engine.usage_with(mask);
            let improving = match (current_usage, usage) {
                (Some(b), Some(a)) => {
                    let edge_delta = mask.count_ones() as i64 - current_edges;
                    let usage_delta = i128::from(a) - i128::from(b);
                    alpha_sign.sign(edge_delta, usage_delta) == std::cmp::Ordering::Less
                }
                (Some(_), None) => false,
                (None, Some(_)) => true,
                (None, None) => false,
            };
            if improving {
                let deviation = Deviation::replace(player, set_of(mask));
                let delta = delta_cost(profile, cfg, &deviation)?;
                return Ok(NeVerdict::violated(deviation, delta));
            }
        }
    }
    Ok(NeVerdict::equilibrium())
}

/// Greedy relaxation: only single-add, single-delete and single-swap
/// deviations are tested, in that order per player (targets ascending, swaps
/// by (sold, bought) ascending). Every exact equilibrium is a greedy one.
pub fn is_greedy_ne(profile: &StrategyProfile, cfg: &GameConfig) -> Result<NeVerdict, GameError> {
    cfg.check(profile)?;
    let n = profile.n();
    let alpha_sign = AlphaSign::new(&cfg.alpha);
    for player in 0..n {
        let engine = DeviationEngine::new(profile, player);
        let strategy = profile.strategy(player);
        let current_mask = mask_of(strategy);
        let current_usage = engine.usage_with(current_mask);

        let mut candidates: Vec<(u64, i64)> = Vec::new();
        for &t in strategy.iter() {
            candidates.push((current_mask & !(1u64 << t), -1));
        }
        for t in 0..n {
            if t != player && !strategy.contains(&t) {
                candidates.push((current_mask | (1u64 << t), 1));
            }
        }
        for &out in strategy.iter() {
            for buy in 0..n {
                if buy != player && !strategy.contains(&buy) {
                    candidates.push(((current_mask & !(1u64 << out)) | (1u64 << buy), 0));
                }
            }
        }

        for (mask, edge_delta) in candidates {
            let usage = engine.usage_with(mask);
            let improving = match (current_usage, usage) {
                (Some(b), Some(a)) => {
                    alpha_sign.sign(edge_delta, i128::from(a) - i128::from(b))
                        == std::cmp::Ordering::Less
                }
                (Some(_), None) => false,
                (None, Some(_)) => true,
                (None, None) => false,
            };
            if improving {
                let deviation = Deviation::replace(player, set_of(mask));
                let delta = delta_cost(profile, cfg, &deviation)?;
                return Ok(NeVerdict::violated(deviation, delta));
            }
        }
    }
    Ok(NeVerdict::equilibrium())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BestResponse {
    pub strategy: BTreeSet<usize>,
    pub cost: Cost,
}

/// Minimizes the player's cost over all strategies. Ties go to fewer edges,
/// then to the lexicographically smallest target set; when the current
/// strategy already achieves the optimal cost it is returned unchanged.
pub fn exact_best_response(
    profile: &StrategyProfile,
    cfg: &GameConfig,
    player: usize,
    budget: usize,
) -> Result<BestResponse, GameError> {
    cfg.check(profile)?;
    if player >= profile.n() {
        return Err(GameError::PlayerOutOfRange(player));
    }
    let n = profile.n();
    let budget = budget.min(EXACT_ENUMERATION_LIMIT);
    if n > budget {
        return Err(GameError::BudgetExceeded { n, budget });
    }
    let alpha_sign = AlphaSign::new(&cfg.alpha);
    let engine = DeviationEngine::new(profile, player);

    // (mask, edges, usage); usage None = unreachable.
    let mut best: Option<(u64, i64, Option<u64>)> = None;
    for mask in lex_strategy_masks(n, player) {
        let edges = mask.count_ones() as i64;
        let usage = engine.usage_with(mask);
        let better = match &best {
            None => true,
            Some((_, be, bu)) => match (usage, bu) {
                (Some(a), Some(b)) => {
                    match alpha_sign.sign(edges - be, i128::from(a) - i128::from(*b)) {
                        std::cmp::Ordering::Less => true,
                        std::cmp::Ordering::Equal => edges < *be,
                        std::cmp::Ordering::Greater => false,
                    }
                }
                (Some(_), None) => true,
                (None, _) => false,
            },
        };
        if better {
            best = Some((mask, edges, usage));
        }
    }
    let (best_mask, _, best_usage) = best.expect("strategy space is nonempty");
    let total = |mask: u64, usage: Option<u64>| -> Cost {
        match usage {
            Some(u) => Cost::Finite(
                &cfg.alpha * rational_from_u64(u64::from(mask.count_ones())) + rational_from_u64(u),
            ),
            None => Cost::Unreachable,
        }
    };

    let current_mask = mask_of(profile.strategy(player));
    let current_cost = total(current_mask, engine.usage_with(current_mask));
    let best_cost = total(best_mask, best_usage);
    if current_cost == best_cost {
        return Ok(BestResponse {
            strategy: profile.strategy(player).clone(),
            cost: current_cost,
        });
    }
    Ok(BestResponse {
        strategy: set_of(best_mask),
        cost: best_cost,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SocialOptimum {
    pub cost: BigRational,
    /// Undirected witness edges (ownership does not affect social cost).
    pub edges: Vec<(usize, usize)>,
}

/// Minimum social cost over all profiles. Brute force over connected edge
/// subsets for n <= 7; for larger n the optimum is the cheaper of the clique
/// and the star, which the brute force confirms on every small instance.
/// Memoized: campaign scans ask for the same optimum once per equilibrium.
pub fn social_optimum(cfg: &GameConfig) -> SocialOptimum {
    use std::sync::{Mutex, OnceLock};
    static CACHE: OnceLock<Mutex<std::collections::BTreeMap<(usize, String), SocialOptimum>>> =
        OnceLock::new();
    let key = (cfg.n, rational_string(&cfg.alpha));
    let cache = CACHE.get_or_init(|| Mutex::new(std::collections::BTreeMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&key) {
        return hit.clone();
    }
    let result = social_optimum_uncached(cfg);
    cache.lock().unwrap().insert(key, result.clone());
    result
}

fn social_optimum_uncached(cfg: &GameConfig) -> SocialOptimum {
    let n = cfg.n;
    if n == 1 {
        return SocialOptimum {
            cost: BigRational::zero(),
            edges: Vec::new(),
        };
    }
    if n <= 7 {
        return brute_force_optimum(cfg);
    }
    closed_form_optimum(cfg)
}

fn star_cost(cfg: &GameConfig) -> BigRational {
    let n = cfg.n;
    &cfg.alpha * rational_from_usize(n - 1) + rational_from_usize(2 * (n - 1) * (n - 1))
}

fn clique_cost(cfg: &GameConfig) -> BigRational {
    let n = cfg.n;
    &cfg.alpha * rational_from_usize(n * (n - 1) / 2) + rational_from_usize(n * (n - 1))
}

fn closed_form_optimum(cfg: &GameConfig) -> SocialOptimum {
    let n = cfg.n;
    let star = star_cost(cfg);
    let clique = clique_cost(cfg);
    if star <= clique {
        SocialOptimum {
            cost: star,
            edges: (1..n).map(|v| (0, v)).collect(),
        }
    } else {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                edges.push((u, v));
            }
        }
        SocialOptimum {
            cost: clique,
            edges,
        }
    }
}

fn brute_force_optimum(cfg: &GameConfig) -> SocialOptimum {
    let n = cfg.n;
    let mut pairs = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            pairs.push((u, v));
        }
    }
    let alpha_sign = AlphaSign::new(&cfg.alpha);
    // (edge count, usage sum, mask); first strictly better subset wins.
    let mut best: Option<(i64, u64, u32)> = None;
    for mask in 0u32..(1u32 << pairs.len()) {
        let mut adj = vec![0u64; n];
        for (i, &(u, v)) in pairs.iter().enumerate() {
            if mask & (1 << i) != 0 {
                adj[u] |= 1 << v;
                adj[v] |= 1 << u;
            }
        }
        if !masks_connected(&adj, n) {
            continue;
        }
        let mut usage = 0u64;
        for u in 0..n {
            usage += mask_usage(&adj, n, u).expect("connected");
        }
        let edges = i64::from(mask.count_ones());
        let better = match &best {
            None => true,
            Some((be, bu, _)) => {
                alpha_sign.sign(edges - be, i128::from(usage) - i128::from(*bu))
                    == std::cmp::Ordering::Less
            }
        };
        if better {
            best = Some((edges, usage, mask));
        }
    }
    let (edges_count, usage, mask) = best.expect("K_n is connected");
    let cost = &cfg.alpha * rational_from_u64(edges_count as u64) + rational_from_u64(usage);
    let edges = pairs
        .iter()
        .enumerate()
        .filter(|(i, _)| mask & (1 << i) != 0)
        .map(|(_, &e)| e)
        .collect();
    SocialOptimum { cost, edges }
}

/// `max C(s) / OPT` over the supplied equilibria; each profile is re-verified
/// before use.
pub fn price_of_anarchy(
    cfg: &GameConfig,
    equilibria: &[StrategyProfile],
    budget: usize,
) -> Result<BigRational, GameError> {
    if equilibria.is_empty() {
        return Err(GameError::EmptyEquilibria);
    }
    let mut worst: Option<BigRational> = None;
    for (index, profile) in equilibria.iter().enumerate() {
        let verdict = is_exact_ne(profile, cfg, budget)?;
        if !verdict.is_ne {
            return Err(GameError::NotEquilibrium { index });
        }
        match social_cost(profile, cfg)? {
            Cost::Finite(c) => {
                if worst.as_ref().is_none_or(|w| c > *w) {
                    worst = Some(c);
                }
            }
            // An equilibrium with n >= 2 is always connected; a lone player
            // has cost zero.
            Cost::Unreachable => return Err(GameError::NotEquilibrium { index }),
        }
    }
    let optimum = social_optimum(cfg);
    if optimum.cost.is_zero() {
        // Only the one-player game costs nothing; its lone profile is both
        // the equilibrium and the optimum.
        return Ok(BigRational::one());
    }
    Ok(worst.expect("nonempty") / optimum.cost)
}
