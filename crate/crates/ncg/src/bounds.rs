//! Executable structural bounds over equilibria, each as an evaluator plus a
//! holds/violated/vacuous checker. Run together over a verified equilibrium
//! they form a falsification harness: a single violated entry would expose
//! either a broken inequality or an implementation bug.
//!
//! Exact-rational checks and floating-point checks are kept apart: the two
//! evaluators built on `5^sqrt(...)` expressions run in `f64` (good to ~15
//! significant digits, documented for at least 12) and their comparisons only
//! count as decided outside a 1e-6 relative margin; every other check is
//! exact with zero tolerance.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use sha2::{Digest, Sha256};

use crate::biconnected::{
    biconnected_components, neighborhood_stats, subtree_weights, BiconnectedComponent,
    Decomposition, WeightMap,
};
use crate::funnel::{funnel_record, FunnelRecord};
use crate::game::{
    delta_cost, social_cost, social_optimum, Cost, DeltaCost, Deviation, GameConfig, GameError,
};
use crate::graph::DistanceMatrix;
use crate::profile::{CommGraph, StrategyProfile};
use crate::rational::{rational_f64, rational_from_u64, rational_from_usize, rational_string};

/// Identifiers of the structural checks, in report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CheckId {
    /// Sell-two-buy-one delta is bounded when the two branches are linked.
    DeviationBoundLinked,
    /// Sell-two-buy-one delta is bounded when the branches are separate.
    DeviationBoundSplit,
    /// The funnel boundary required by the case split actually exists.
    FunnelCrossingExists,
    /// At equilibrium with alpha > n the funnel has at least
    /// (alpha - n) / (4 d_H) members.
    FunnelSizeLower,
    /// deg(H) <= 2 + 16 d_H (d_H + 1) n / (n_H (alpha - n)).
    DegreeUpperDiameter,
    /// deg(H) < 2 + (16 n / (alpha - n)) 5^(2 sqrt(2 log5 n_H) + 10) / n_H.
    DegreeUpperSize,
    /// deg(H) >= 2 + 1/16 for every nontrivial component at alpha > n.
    /// (Small cycles are equilibria with average degree 2 at alpha <= n,
    /// e.g. the triangle at alpha <= 1 and the 5-cycle at alpha = 4, so the
    /// bound genuinely needs the price range it is used in.)
    DegreeLower,
    /// d_H < 5^(sqrt(2 log5 n_H) + 5).
    ComponentDiameterSize,
    /// Either some member covers more than half the nodes within radius
    /// 4k+1, or m_{5k+1} >= m_k * k / 4.
    BallGrowth,
    /// If r < d_H/4 - 4 then every radius-r cover holds at most half the nodes.
    HalfMassRadius,
    /// Every hanging node sits at distance < 125 from its attachment.
    AttachmentDistance,
    /// d_G < d_H + 250.
    DiameterGap,
    /// C(s)/OPT <= d_G + 1.
    PoaDiameter,
    /// C(s)/OPT <= 5 when the equilibrium is a tree.
    PoaTree,
}

impl CheckId {
    pub const ALL: [CheckId; 14] = [
        CheckId::DeviationBoundLinked,
        CheckId::DeviationBoundSplit,
        CheckId::FunnelCrossingExists,
        CheckId::FunnelSizeLower,
        CheckId::DegreeUpperDiameter,
        CheckId::DegreeUpperSize,
        CheckId::DegreeLower,
        CheckId::ComponentDiameterSize,
        CheckId::BallGrowth,
        CheckId::HalfMassRadius,
        CheckId::AttachmentDistance,
        CheckId::DiameterGap,
        CheckId::PoaDiameter,
        CheckId::PoaTree,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CheckId::DeviationBoundLinked => "deviation-bound-linked",
            CheckId::DeviationBoundSplit => "deviation-bound-split",
            CheckId::FunnelCrossingExists => "funnel-crossing-exists",
            CheckId::FunnelSizeLower => "funnel-size-lower",
            CheckId::DegreeUpperDiameter => "degree-upper-diameter",
            CheckId::DegreeUpperSize => "degree-upper-size",
            CheckId::DegreeLower => "degree-lower",
            CheckId::ComponentDiameterSize => "component-diameter-size",
            CheckId::BallGrowth => "ball-growth",
            CheckId::HalfMassRadius => "half-mass-radius",
            CheckId::AttachmentDistance => "attachment-distance",
            CheckId::DiameterGap => "diameter-gap",
            CheckId::PoaDiameter => "poa-diameter",
            CheckId::PoaTree => "poa-tree",
        }
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Violated,
    /// Preconditions unmet (out of alpha range, empty domain, ...).
    Vacuous,
    /// Values computed on a graph not verified to be an equilibrium.
    Unverified,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Violated => "violated",
            Verdict::Vacuous => "vacuous",
            Verdict::Unverified => "unverified",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoundValue {
    Exact(BigRational),
    Real(f64),
    PlusInfinite,
    MinusInfinite,
}

impl fmt::Display for BoundValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundValue::Exact(q) => write!(f, "{}", rational_string(q)),
            BoundValue::Real(x) => write!(f, "{x}"),
            BoundValue::PlusInfinite => write!(f, "+inf"),
            BoundValue::MinusInfinite => write!(f, "-inf"),
        }
    }
}

impl From<&DeltaCost> for BoundValue {
    fn from(delta: &DeltaCost) -> Self {
        match delta {
            DeltaCost::Finite(q) => BoundValue::Exact(q.clone()),
            DeltaCost::PlusInfinite => BoundValue::PlusInfinite,
            DeltaCost::MinusInfinite => BoundValue::MinusInfinite,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComponentSummary {
    pub size: usize,
    pub diameter: u32,
}

/// One evaluated inequality with its verdict and a re-checkable witness.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub check: CheckId,
    pub n: usize,
    pub alpha: BigRational,
    pub component: Option<ComponentSummary>,
    pub lhs: Option<BoundValue>,
    pub rhs: Option<BoundValue>,
    pub verdict: Verdict,
    pub witness: String,
}

pub const CSV_HEADER: &str = "check_id,n,alpha,n_H,d_H,lhs,rhs,verdict";

impl BoundReport {
    pub fn csv_row(&self) -> String {
        let (nh, dh) = match self.component {
            Some(c) => (c.size.to_string(), c.diameter.to_string()),
            None => (String::new(), String::new()),
        };
        let fmt_val = |v: &Option<BoundValue>| v.as_ref().map_or(String::new(), |x| x.to_string());
        format!(
            "{},{},{},{},{},{},{},{}",
            self.check,
            self.n,
            rational_string(&self.alpha),
            nh,
            dh,
            fmt_val(&self.lhs),
            fmt_val(&self.rhs),
            self.verdict
        )
    }

    pub fn human_line(&self) -> String {
        let values = match (&self.lhs, &self.rhs) {
            (Some(l), Some(r)) => format!(" lhs={l} rhs={r}"),
            _ => String::new(),
        };
        let comp = match self.component {
            Some(c) => format!(" [n_H={} d_H={}]", c.size, c.diameter),
            None => String::new(),
        };
        format!(
            "{:<24} {:<10}{}{} {}",
            self.check.to_string(),
            self.verdict.to_string(),
            comp,
            values,
            self.witness
        )
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "check": self.check.as_str(),
            "n": self.n,
            "alpha": rational_string(&self.alpha),
            "n_H": self.component.map(|c| c.size),
            "d_H": self.component.map(|c| c.diameter),
            "lhs": self.lhs.as_ref().map(|v| v.to_string()),
            "rhs": self.rhs.as_ref().map(|v| v.to_string()),
            "verdict": self.verdict.as_str(),
            "witness": self.witness,
        })
    }
}

/// Stable digest of a report list.
pub fn report_digest(reports: &[BoundReport]) -> String {
    let mut hasher = Sha256::new();
    for r in reports {
        hasher.update(r.csv_row().as_bytes());
        hasher.update(b"\n");
        hasher.update(r.witness.as_bytes());
        hasher.update(b"\n");
    }
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Relative margin for the two floating-point checks. A float inequality
/// only counts as holding when the left side clears the bound by more than
/// this margin, and as violated only when it exceeds the bound by more; at
/// the supported graph sizes the gaps are many orders of magnitude wider.
pub const FLOAT_MARGIN: f64 = 1e-6;

fn float_holds(lhs: f64, rhs: f64) -> bool {
    lhs < rhs * (1.0 - FLOAT_MARGIN)
}

// ---------------------------------------------------------------------------
// Raw evaluators.
// ---------------------------------------------------------------------------

/// `2 + 16 d_H (d_H + 1) n / (n_H (alpha - n))`; `None` outside `alpha > n`,
/// `n_H >= 3`, `d_H >= 1`.
pub fn degree_upper_diameter_bound(
    n: usize,
    alpha: &BigRational,
    n_h: usize,
    d_h: u32,
) -> Option<BigRational> {
    if *alpha <= rational_from_usize(n) || n_h < 3 || d_h < 1 {
        return None;
    }
    let d = rational_from_u64(u64::from(d_h));
    let numer =
        rational_from_usize(16) * &d * (&d + rational_from_usize(1)) * rational_from_usize(n);
    let denom = rational_from_usize(n_h) * (alpha - rational_from_usize(n));
    Some(rational_from_usize(2) + numer / denom)
}

/// `5^(sqrt(2 log5 n_H) + 5)` in `f64` (at least 12 significant digits).
pub fn component_diameter_size_bound(n_h: usize) -> f64 {
    let log5 = (n_h as f64).ln() / 5f64.ln();
    5f64.powf((2.0 * log5).sqrt() + 5.0)
}

/// `2 + (16 n / (alpha - n)) * 5^(2 sqrt(2 log5 n_H) + 10) / n_H` in `f64`;
/// `None` when `alpha <= n` or `n_H < 3`.
pub fn degree_upper_size_bound(n: usize, alpha: &BigRational, n_h: usize) -> Option<f64> {
    if *alpha <= rational_from_usize(n) || n_h < 3 {
        return None;
    }
    let scale = rational_f64(&(rational_from_usize(16 * n) / (alpha - rational_from_usize(n))));
    let log5 = (n_h as f64).ln() / 5f64.ln();
    let tower = 5f64.powf(2.0 * (2.0 * log5).sqrt() + 10.0);
    Some(2.0 + scale * tower / n_h as f64)
}

/// Universal average-degree lower bound `2 + 1/16 = 33/16`.
pub fn degree_lower_bound() -> BigRational {
    BigRational::new(BigInt::from(33), BigInt::from(16))
}

/// Upper bound on the sell-two-buy-one delta when the two branches are
/// linked: `-alpha + n + D(u) - D(v) + (2 d(v,x) + l) |A|`, for any boundary
/// edge `(x, y)` distinct from the sold edges with `x` inside. `None` when
/// the exit gap `l` is undefined or the graph is disconnected.
pub fn linked_deviation_bound(
    cfg: &GameConfig,
    dm: &DistanceMatrix,
    rec: &FunnelRecord,
    crossing: (usize, usize),
) -> Option<BigRational> {
    let l = rec.exit_gap?;
    let d_u = dm.row_sum(rec.anchor)?;
    let d_v = dm.row_sum(rec.seller)?;
    let d_vx = dm.get(rec.seller, crossing.0)?;
    let factor = rational_from_u64(2 * u64::from(d_vx) + u64::from(l));
    Some(
        -&cfg.alpha + rational_from_usize(cfg.n) + rational_from_u64(d_u) - rational_from_u64(d_v)
            + factor * rational_from_usize(rec.size()),
    )
}

/// Upper bound on the sell-two-buy-one delta when the branches are separate:
/// `-alpha + n + D(u) - D(v) + max(0, 2 max_i d(v, x_i)) |A|`, where `x_i`
/// ranges over the chosen per-branch boundary edges of the populated
/// branches. `None` when a populated branch has no chosen boundary edge.
pub fn split_deviation_bound(
    cfg: &GameConfig,
    dm: &DistanceMatrix,
    rec: &FunnelRecord,
    chosen: [Option<(usize, usize)>; 2],
) -> Option<BigRational> {
    let d_u = dm.row_sum(rec.anchor)?;
    let d_v = dm.row_sum(rec.seller)?;
    let mut max_dist: u64 = 0;
    for (i, entry) in chosen.iter().enumerate() {
        if !rec.branch_is_empty(i) {
            let (x, _) = (*entry)?;
            max_dist = max_dist.max(u64::from(dm.get(rec.seller, x)?));
        }
    }
    Some(
        -&cfg.alpha + rational_from_usize(cfg.n) + rational_from_u64(d_u) - rational_from_u64(d_v)
            + rational_from_u64(2 * max_dist) * rational_from_usize(rec.size()),
    )
}

/// Exact delta of the deviation the funnel bounds speak about: the seller
/// sells both sold edges and buys a link to the anchor.
pub fn funnel_deviation_delta(
    profile: &StrategyProfile,
    cfg: &GameConfig,
    rec: &FunnelRecord,
) -> Result<DeltaCost, GameError> {
    let deviation = Deviation::sell_two_buy_one(
        profile,
        rec.seller,
        (rec.exits[0], rec.exits[1]),
        rec.anchor,
    )?;
    delta_cost(profile, cfg, &deviation)
}

// ---------------------------------------------------------------------------
// Structural analysis bundle.
// ---------------------------------------------------------------------------

/// Everything the checks need, computed once per graph.
pub struct Analysis {
    pub graph: CommGraph,
    pub dm: DistanceMatrix,
    pub decomposition: Decomposition,
    pub connected: bool,
    /// Nontrivial components with their weight maps (connected graphs only).
    pub nontrivial: Vec<(BiconnectedComponent, WeightMap)>,
}

impl Analysis {
    pub fn of(profile: &StrategyProfile) -> Analysis {
        let graph = profile.graph();
        let dm = DistanceMatrix::of(&graph);
        let decomposition = biconnected_components(&graph);
        let connected = dm.is_connected();
        let nontrivial = if connected {
            decomposition
                .nontrivial()
                .map(|h| {
                    let w = subtree_weights(&graph, h)
                        .expect("component of a connected graph has weights");
                    (h.clone(), w)
                })
                .collect()
        } else {
            Vec::new()
        };
        Analysis {
            graph,
            dm,
            decomposition,
            connected,
            nontrivial,
        }
    }

    /// The graph is a tree (connected, no nontrivial component).
    pub fn is_tree(&self) -> bool {
        self.connected && !self.decomposition.has_nontrivial()
    }

    /// Member of `h` minimizing the global distance sum, smallest id first.
    pub fn distance_minimizer(&self, h: &BiconnectedComponent) -> usize {
        *h.nodes
            .iter()
            .min_by_key(|&&u| (self.dm.row_sum(u), u))
            .expect("component is nonempty")
    }
}

// ---------------------------------------------------------------------------
// The consistency report.
// ---------------------------------------------------------------------------

struct Reporter {
    n: usize,
    alpha: BigRational,
    verified: bool,
    out: Vec<BoundReport>,
}

impl Reporter {
    fn verdict(&self, ok: bool) -> Verdict {
        if !self.verified {
            Verdict::Unverified
        } else if ok {
            Verdict::Holds
        } else {
            Verdict::Violated
        }
    }

    fn push(
        &mut self,
        check: CheckId,
        component: Option<ComponentSummary>,
        lhs: Option<BoundValue>,
        rhs: Option<BoundValue>,
        ok: bool,
        witness: String,
    ) {
        let verdict = self.verdict(ok);
        self.out.push(BoundReport {
            check,
            n: self.n,
            alpha: self.alpha.clone(),
            component,
            lhs,
            rhs,
            verdict,
            witness,
        });
    }

    fn vacuous(&mut self, check: CheckId, component: Option<ComponentSummary>, witness: &str) {
        self.out.push(BoundReport {
            check,
            n: self.n,
            alpha: self.alpha.clone(),
            component,
            lhs: None,
            rhs: None,
            verdict: Verdict::Vacuous,
            witness: witness.to_string(),
        });
    }
}

fn summary(h: &BiconnectedComponent) -> ComponentSummary {
    ComponentSummary {
        size: h.size(),
        diameter: h.diameter,
    }
}

/// Runs every applicable check on the profile. With `verified = true` the
/// caller asserts the profile is an exact equilibrium and verdicts are
/// holds/violated/vacuous; otherwise values are computed but every decided
/// entry is labeled unverified.
pub fn consistency_report(
    profile: &StrategyProfile,
    cfg: &GameConfig,
    verified: bool,
) -> Result<Vec<BoundReport>, GameError> {
    let analysis = Analysis::of(profile);
    consistency_report_with(profile, cfg, &analysis, verified)
}

pub fn consistency_report_with(
    profile: &StrategyProfile,
    cfg: &GameConfig,
    analysis: &Analysis,
    verified: bool,
) -> Result<Vec<BoundReport>, GameError> {
    let n = cfg.n;
    let mut rep = Reporter {
        n,
        alpha: cfg.alpha.clone(),
        verified,
        out: Vec::new(),
    };

    if !analysis.connected {
        for check in CheckId::ALL {
            rep.vacuous(check, None, "graph disconnected");
        }
        let mut out = rep.out;
        sort_reports(&mut out);
        return Ok(out);
    }

    let alpha_gt_n = cfg.alpha > rational_from_usize(n);
    let alpha_lt_4n = cfg.alpha < rational_from_usize(4 * n);
    let in_mid_range = alpha_gt_n && alpha_lt_4n;
    let d_g = analysis.dm.diameter().expect("connected");

    if analysis.nontrivial.is_empty() {
        for check in [
            CheckId::DeviationBoundLinked,
            CheckId::DeviationBoundSplit,
            CheckId::FunnelCrossingExists,
            CheckId::FunnelSizeLower,
            CheckId::DegreeUpperDiameter,
            CheckId::DegreeUpperSize,
            CheckId::DegreeLower,
            CheckId::ComponentDiameterSize,
            CheckId::BallGrowth,
            CheckId::HalfMassRadius,
            CheckId::AttachmentDistance,
            CheckId::DiameterGap,
        ] {
            rep.vacuous(check, None, "no nontrivial biconnected component");
        }
    }

    for (index, (h, weights)) in analysis.nontrivial.iter().enumerate() {
        let tag = format!("H{index}");
        let comp = Some(summary(h));
        let n_h = h.size();
        let d_h = h.diameter;

        funnel_checks(profile, cfg, analysis, &mut rep, h, &tag, alpha_gt_n)?;

        // Average-degree bounds.
        let deg = h.avg_degree();
        match degree_upper_diameter_bound(n, &cfg.alpha, n_h, d_h) {
            Some(bound) => {
                let ok = deg <= bound;
                rep.push(
                    CheckId::DegreeUpperDiameter,
                    comp,
                    Some(BoundValue::Exact(deg.clone())),
                    Some(BoundValue::Exact(bound)),
                    ok,
                    format!("{tag} avg degree vs diameter bound"),
                );
            }
            None => rep.vacuous(CheckId::DegreeUpperDiameter, comp, "alpha <= n"),
        }
        match degree_upper_size_bound(n, &cfg.alpha, n_h) {
            Some(bound) => {
                let ok = float_holds(rational_f64(&deg), bound);
                rep.push(
                    CheckId::DegreeUpperSize,
                    comp,
                    Some(BoundValue::Real(rational_f64(&deg))),
                    Some(BoundValue::Real(bound)),
                    ok,
                    format!("{tag} avg degree vs size bound"),
                );
            }
            None => rep.vacuous(CheckId::DegreeUpperSize, comp, "alpha <= n"),
        }
        if alpha_gt_n {
            let lower = degree_lower_bound();
            let ok = deg >= lower;
            rep.push(
                CheckId::DegreeLower,
                comp,
                Some(BoundValue::Exact(deg.clone())),
                Some(BoundValue::Exact(lower)),
                ok,
                format!("{tag} avg degree vs 2+1/16"),
            );
        } else {
            rep.vacuous(CheckId::DegreeLower, comp, "alpha <= n");
        }

        if in_mid_range {
            let bound = component_diameter_size_bound(n_h);
            let ok = float_holds(f64::from(d_h), bound);
            rep.push(
                CheckId::ComponentDiameterSize,
                comp,
                Some(BoundValue::Real(f64::from(d_h))),
                Some(BoundValue::Real(bound)),
                ok,
                format!("{tag} diameter vs size"),
            );
        } else {
            rep.vacuous(
                CheckId::ComponentDiameterSize,
                comp,
                "alpha outside (n, 4n)",
            );
        }

        // Ball growth and half-mass, small radii.
        if alpha_lt_4n {
            for k in [0u32, 1] {
                let data = ball_growth_data(analysis, h, weights, k);
                let first = 2 * data.max_cover > n;
                let second = 4 * data.min_ball_grown >= data.min_ball_base * k as usize;
                let ok = first || second;
                rep.push(
                    CheckId::BallGrowth,
                    comp,
                    Some(BoundValue::Exact(rational_from_usize(data.max_cover))),
                    Some(BoundValue::Exact(
                        rational_from_usize(n) / rational_from_usize(2),
                    )),
                    ok,
                    format!(
                        "{tag} k={k} max|S_{{4k+1}}|={} at u={} m_{}={} m_{}={}",
                        data.max_cover,
                        data.argmax,
                        k,
                        data.min_ball_base,
                        5 * k + 1,
                        data.min_ball_grown
                    ),
                );
            }
            for r in [0u32, 1] {
                if 4 * r + 16 < d_h {
                    let (max_cover, argmax) = max_cover_at(analysis, h, weights, r);
                    let ok = 2 * max_cover <= n;
                    rep.push(
                        CheckId::HalfMassRadius,
                        comp,
                        Some(BoundValue::Exact(rational_from_usize(max_cover))),
                        Some(BoundValue::Exact(
                            rational_from_usize(n) / rational_from_usize(2),
                        )),
                        ok,
                        format!("{tag} r={r} max|S_r|={max_cover} at u={argmax}"),
                    );
                } else {
                    rep.vacuous(
                        CheckId::HalfMassRadius,
                        comp,
                        &format!("{tag} r={r} >= d_H/4 - 4"),
                    );
                }
            }
        } else {
            rep.vacuous(CheckId::BallGrowth, comp, "alpha >= 4n");
            rep.vacuous(CheckId::HalfMassRadius, comp, "alpha >= 4n");
        }

        if in_mid_range {
            let (max_dist, far_z, far_w) = attachment_extent(analysis, weights);
            let ok = max_dist < 125;
            rep.push(
                CheckId::AttachmentDistance,
                comp,
                Some(BoundValue::Exact(rational_from_u64(u64::from(max_dist)))),
                Some(BoundValue::Exact(rational_from_usize(125))),
                ok,
                format!("{tag} farthest hanging node z={far_z} from w={far_w}"),
            );
            let ok = u64::from(d_g) < u64::from(d_h) + 250;
            rep.push(
                CheckId::DiameterGap,
                comp,
                Some(BoundValue::Exact(rational_from_u64(u64::from(d_g)))),
                Some(BoundValue::Exact(rational_from_u64(u64::from(d_h) + 250))),
                ok,
                format!("{tag} graph diameter vs component diameter + 250"),
            );
        } else {
            rep.vacuous(CheckId::AttachmentDistance, comp, "alpha outside (n, 4n)");
            rep.vacuous(CheckId::DiameterGap, comp, "alpha outside (n, 4n)");
        }
    }

    // Price-of-anarchy consistency (per equilibrium).
    if n == 1 {
        rep.vacuous(CheckId::PoaDiameter, None, "single player");
        rep.vacuous(CheckId::PoaTree, None, "single player");
    } else {
        let cost = match social_cost(profile, cfg)? {
            Cost::Finite(c) => c,
            Cost::Unreachable => unreachable!("connected graph has finite social cost"),
        };
        let optimum = social_optimum(cfg).cost;
        let ratio = &cost / &optimum;
        let diam_bound = rational_from_u64(u64::from(d_g) + 1);
        let ok = ratio <= diam_bound;
        rep.push(
            CheckId::PoaDiameter,
            None,
            Some(BoundValue::Exact(ratio.clone())),
            Some(BoundValue::Exact(diam_bound)),
            ok,
            format!(
                "C(s)={} OPT={}",
                rational_string(&cost),
                rational_string(&optimum)
            ),
        );
        if analysis.is_tree() {
            let five = rational_from_usize(5);
            let ok = ratio <= five;
            rep.push(
                CheckId::PoaTree,
                None,
                Some(BoundValue::Exact(ratio)),
                Some(BoundValue::Exact(five)),
                ok,
                format!(
                    "C(s)={} OPT={}",
                    rational_string(&cost),
                    rational_string(&optimum)
                ),
            );
        } else {
            rep.vacuous(CheckId::PoaTree, None, "not a tree");
        }
    }

    let mut out = rep.out;
    sort_reports(&mut out);
    Ok(out)
}

fn sort_reports(reports: &mut [BoundReport]) {
    reports.sort_by(|a, b| {
        a.check
            .cmp(&b.check)
            .then_with(|| a.witness.cmp(&b.witness))
    });
}

/// Per-instance funnel checks: the sell-two-buy-one delta bounds, boundary
/// existence and the funnel cardinality lower bound, at the distance
/// minimizer of the component.
fn funnel_checks(
    profile: &StrategyProfile,
    cfg: &GameConfig,
    analysis: &Analysis,
    rep: &mut Reporter,
    h: &BiconnectedComponent,
    tag: &str,
    alpha_gt_n: bool,
) -> Result<(), GameError> {
    let comp = Some(summary(h));
    let u_star = analysis.distance_minimizer(h);
    let mut any_instance = false;

    for &v in &h.nodes {
        if v == u_star {
            continue;
        }
        let sold_candidates: Vec<usize> = profile
            .strategy(v)
            .iter()
            .copied()
            .filter(|&t| h.contains_edge(v, t))
            .collect();
        for (i, &t1) in sold_candidates.iter().enumerate() {
            for &t2 in &sold_candidates[i + 1..] {
                any_instance = true;
                let rec = funnel_record(&analysis.graph, u_star, v, [t1, t2])
                    .expect("owned component edges in a connected graph");
                let inst = format!("{tag} v={v} sold=({v},{t1}),({v},{t2}) u={u_star}");
                let exact = funnel_deviation_delta(profile, cfg, &rec)?;

                if !rec.branch_links.is_empty() {
                    match rec.nearest_boundary(&analysis.dm) {
                        Some((x, y)) => {
                            rep.push(
                                CheckId::FunnelCrossingExists,
                                comp,
                                None,
                                None,
                                true,
                                format!("{inst} linked boundary=({x},{y})"),
                            );
                            match linked_deviation_bound(cfg, &analysis.dm, &rec, (x, y)) {
                                Some(bound) => {
                                    let ok = delta_le(&exact, &bound);
                                    rep.push(
                                        CheckId::DeviationBoundLinked,
                                        comp,
                                        Some(BoundValue::from(&exact)),
                                        Some(BoundValue::Exact(bound)),
                                        ok,
                                        format!(
                                            "{inst} x={x} l={} |A|={}",
                                            rec.exit_gap.unwrap(),
                                            rec.size()
                                        ),
                                    );
                                }
                                None => rep.vacuous(
                                    CheckId::DeviationBoundLinked,
                                    comp,
                                    &format!("{inst} exit gap undefined"),
                                ),
                            }
                        }
                        None => {
                            // The case split guarantees a boundary edge; its
                            // absence would falsify the structural argument.
                            rep.push(
                                CheckId::FunnelCrossingExists,
                                comp,
                                None,
                                None,
                                false,
                                format!("{inst} linked case has no boundary edge"),
                            );
                            rep.vacuous(
                                CheckId::DeviationBoundLinked,
                                comp,
                                &format!("{inst} no boundary edge"),
                            );
                        }
                    }
                } else {
                    let chosen = [
                        rec.nearest_branch_boundary(&analysis.dm, 0),
                        rec.nearest_branch_boundary(&analysis.dm, 1),
                    ];
                    let missing: Vec<usize> = (0..2)
                        .filter(|&i| !rec.branch_is_empty(i) && chosen[i].is_none())
                        .collect();
                    if missing.is_empty() {
                        let populated = !rec.members.is_empty();
                        rep.push(
                            CheckId::FunnelCrossingExists,
                            comp,
                            None,
                            None,
                            true,
                            if populated {
                                format!("{inst} split boundaries present")
                            } else {
                                format!("{inst} empty funnel, no boundary needed")
                            },
                        );
                        match split_deviation_bound(cfg, &analysis.dm, &rec, chosen) {
                            Some(bound) => {
                                let ok = delta_le(&exact, &bound);
                                rep.push(
                                    CheckId::DeviationBoundSplit,
                                    comp,
                                    Some(BoundValue::from(&exact)),
                                    Some(BoundValue::Exact(bound)),
                                    ok,
                                    format!("{inst} |A|={}", rec.size()),
                                );
                            }
                            None => rep.vacuous(
                                CheckId::DeviationBoundSplit,
                                comp,
                                &format!("{inst} boundary distances undefined"),
                            ),
                        }
                    } else {
                        rep.push(
                            CheckId::FunnelCrossingExists,
                            comp,
                            None,
                            None,
                            false,
                            format!("{inst} branch(es) {missing:?} lack a boundary edge"),
                        );
                        rep.vacuous(
                            CheckId::DeviationBoundSplit,
                            comp,
                            &format!("{inst} missing branch boundary"),
                        );
                    }
                }

                if alpha_gt_n {
                    let rhs = (&cfg.alpha - rational_from_usize(cfg.n))
                        / rational_from_u64(4 * u64::from(h.diameter).max(1));
                    let lhs = rational_from_usize(rec.size());
                    let ok = lhs >= rhs;
                    rep.push(
                        CheckId::FunnelSizeLower,
                        comp,
                        Some(BoundValue::Exact(lhs)),
                        Some(BoundValue::Exact(rhs)),
                        ok,
                        format!("{inst} |A|={}", rec.size()),
                    );
                }
            }
        }
    }

    if !any_instance {
        let reason = format!("{tag} no member buys two component edges");
        rep.vacuous(CheckId::DeviationBoundLinked, comp, &reason);
        rep.vacuous(CheckId::DeviationBoundSplit, comp, &reason);
        rep.vacuous(CheckId::FunnelCrossingExists, comp, &reason);
        rep.vacuous(CheckId::FunnelSizeLower, comp, &reason);
    } else if !alpha_gt_n {
        rep.vacuous(CheckId::FunnelSizeLower, comp, "alpha <= n");
    }
    Ok(())
}

fn delta_le(delta: &DeltaCost, bound: &BigRational) -> bool {
    match delta {
        DeltaCost::Finite(q) => q <= bound,
        DeltaCost::MinusInfinite => true,
        DeltaCost::PlusInfinite => false,
    }
}

struct BallGrowthData {
    max_cover: usize,
    argmax: usize,
    min_ball_base: usize,
    min_ball_grown: usize,
}

fn ball_growth_data(
    analysis: &Analysis,
    h: &BiconnectedComponent,
    weights: &WeightMap,
    k: u32,
) -> BallGrowthData {
    let (max_cover, argmax) = max_cover_at(analysis, h, weights, 4 * k + 1);
    let any = *h.nodes.iter().next().expect("nonempty");
    let base = neighborhood_stats(&analysis.dm, h, weights, any, k)
        .expect("center from the component")
        .min_ball;
    let grown = neighborhood_stats(&analysis.dm, h, weights, any, 5 * k + 1)
        .expect("center from the component")
        .min_ball;
    BallGrowthData {
        max_cover,
        argmax,
        min_ball_base: base,
        min_ball_grown: grown,
    }
}

/// Largest `|S_r(u)|` over the component members, with its argmax.
fn max_cover_at(
    analysis: &Analysis,
    h: &BiconnectedComponent,
    weights: &WeightMap,
    radius: u32,
) -> (usize, usize) {
    h.nodes
        .iter()
        .map(|&u| {
            let stats = neighborhood_stats(&analysis.dm, h, weights, u, radius)
                .expect("center from the component");
            (stats.covered.len(), u)
        })
        .max_by(|a, b| a.0.cmp(&b.0).then_with(|| b.1.cmp(&a.1)))
        .expect("component is nonempty")
}

/// Farthest hanging node over all members: `max d(z, w)` for `z` in `S(w)`,
/// as `(distance, z, w)`.
fn attachment_extent(analysis: &Analysis, weights: &WeightMap) -> (u32, usize, usize) {
    let mut best = (0u32, usize::MAX, usize::MAX);
    for (&w, set) in &weights.sets {
        for &z in set {
            let d = analysis.dm.get(z, w).expect("connected");
            if d > best.0 || (best.1 == usize::MAX) {
                best = (d, z, w);
            }
        }
    }
    best
}

/// True when every funnel boundary endpoint lies inside the component; holds
/// whenever the sold edges are component edges and is asserted by the tests.
pub fn boundary_in_component(rec: &FunnelRecord, h: &BiconnectedComponent) -> bool {
    rec.boundary
        .iter()
        .chain(rec.branch_boundaries[0].iter())
        .chain(rec.branch_boundaries[1].iter())
        .all(|&(x, y)| h.nodes.contains(&x) && h.nodes.contains(&y))
}

/// Number of violated entries in a report list.
pub fn violation_count(reports: &[BoundReport]) -> usize {
    reports
        .iter()
        .filter(|r| r.verdict == Verdict::Violated)
        .count()
}

/// True when the membership invariants of a funnel record hold: the seller
/// and anchor stay outside, populated branches imply the exit sits one layer
/// farther from the anchor, and populated branches induce connected
/// subgraphs.
pub fn funnel_invariants_hold(g: &CommGraph, dm: &DistanceMatrix, rec: &FunnelRecord) -> bool {
    if rec.members.contains(&rec.seller) || rec.members.contains(&rec.anchor) {
        return false;
    }
    let dv = match dm.get(rec.anchor, rec.seller) {
        Some(d) => d,
        None => return false,
    };
    for i in 0..2 {
        if !rec.branch_is_empty(i) {
            if dm.get(rec.anchor, rec.exits[i]) != Some(dv + 1) {
                return false;
            }
            let branch: BTreeSet<usize> = rec.branches[i].clone();
            let start = *branch.iter().next().unwrap();
            let dist = crate::graph::induced_distances(g, &branch, start);
            if branch.iter().any(|&z| dist[z].is_none()) {
                return false;
            }
        }
    }
    true
}
