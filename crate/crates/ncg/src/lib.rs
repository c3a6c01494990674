//! Engine for the sum classic network creation game.
//!
//! Players are nodes of a graph; each player buys links to other players at a
//! fixed rational price `alpha` and pays, on top of that, the sum of her hop
//! distances to every other node. The crate provides:
//!
//! - strategy profiles as edge-owned graphs and the induced communication
//!   graph ([`profile`]),
//! - exact distance / biconnectivity / weight machinery ([`graph`],
//!   [`biconnected`]),
//! - exact player costs, deviations and Nash-equilibrium verification over
//!   exact rational arithmetic ([`game`]),
//! - funnel sets and executable deviation-cost bounds together with a
//!   falsification harness that re-checks every structural inequality on
//!   verified equilibria ([`funnel`], [`bounds`], [`precise`]),
//! - exhaustive and dynamic equilibrium search with a persistent catalog
//!   ([`search`], [`canon`]).
//!
//! All game-theoretic verdicts are computed with exact rational arithmetic;
//! floating point is confined to two explicitly approximate bound evaluators
//! whose comparisons carry a documented safety margin.

pub mod biconnected;
pub mod bounds;
pub mod canon;
pub mod funnel;
pub mod game;
pub mod graph;
pub mod precise;
pub mod profile;
pub mod rational;
pub mod search;

pub use biconnected::{biconnected_components, BiconnectedComponent, Decomposition, WeightMap};
pub use game::{Cost, CostBreakdown, DeltaCost, Deviation, GameConfig, NeVerdict};
pub use graph::DistanceMatrix;
pub use profile::{CommGraph, StrategyProfile};
