//! Property tests for the structural invariants: distance-matrix laws,
//! cut-vertex semantics, weight partitions, neighborhood monotonicity,
//! deviation-class containment and cost-delta consistency.

use std::collections::BTreeSet;

use proptest::prelude::*;

use ncg::biconnected::{biconnected_components, neighborhood_stats, subtree_weights};
use ncg::bounds::funnel_invariants_hold;
use ncg::canon::profile_digest;
use ncg::funnel::funnel_record;
use ncg::game::{
    delta_cost, is_exact_ne, is_greedy_ne, player_cost, Cost, DeltaCost, Deviation, GameConfig,
};
use ncg::graph::{bfs_distances, induced_distances, DistanceMatrix};
use ncg::profile::StrategyProfile;
use ncg::rational::ratio;

/// Random profile from three-state pair digits; edge-biased so larger graphs
/// are usually connected.
fn arb_profile(n_range: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = StrategyProfile> {
    n_range.prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        prop::collection::vec(0u8..3, pairs).prop_map(move |digits| {
            let mut purchases = Vec::new();
            let mut k = 0;
            for u in 0..n {
                for v in (u + 1)..n {
                    match digits[k] {
                        0 => {}
                        1 => purchases.push((u, v)),
                        _ => purchases.push((v, u)),
                    }
                    k += 1;
                }
            }
            StrategyProfile::build(n, &purchases).unwrap()
        })
    })
}

fn connected(profile: &StrategyProfile) -> bool {
    ncg::graph::is_connected(&profile.graph())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    /// Zero diagonal, symmetry, triangle inequality, and d = 1 iff edge,
    /// on random connected graphs up to 20 nodes.
    #[test]
    fn distance_matrix_laws(profile in arb_profile(2..=20)) {
        prop_assume!(connected(&profile));
        let g = profile.graph();
        let dm = DistanceMatrix::of(&g);
        let n = g.n();
        for u in 0..n {
            prop_assert_eq!(dm.get(u, u), Some(0));
            for v in 0..n {
                prop_assert_eq!(dm.get(u, v), dm.get(v, u));
                if u != v {
                    prop_assert_eq!(dm.get(u, v) == Some(1), g.has_edge(u, v));
                }
                for w in 0..n {
                    let (duv, dvw, duw) =
                        (dm.get(u, v).unwrap(), dm.get(v, w).unwrap(), dm.get(u, w).unwrap());
                    prop_assert!(duw <= duv + dvw);
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    /// Removing a cut vertex disconnects the graph; removing any other
    /// vertex keeps it connected (checked for every vertex).
    #[test]
    fn cut_vertices_are_exactly_the_disconnecting_ones(profile in arb_profile(3..=12)) {
        prop_assume!(connected(&profile));
        let g = profile.graph();
        let n = g.n();
        let decomposition = biconnected_components(&g);
        for removed in 0..n {
            let keep: Vec<usize> = (0..n).filter(|&v| v != removed).collect();
            let mut adj = vec![Vec::new(); n];
            for &(a, b) in g.edges() {
                if a != removed && b != removed {
                    adj[a].push(b);
                    adj[b].push(a);
                }
            }
            let dist = bfs_distances(&adj, keep[0]);
            let still_connected = keep.iter().all(|&v| dist[v].is_some());
            prop_assert_eq!(
                !still_connected,
                decomposition.cut_vertices.contains(&removed),
                "vertex {}", removed
            );
        }
    }

    /// Distances measured inside a nontrivial component equal the global
    /// distances between its members.
    #[test]
    fn component_distances_equal_global_distances(profile in arb_profile(3..=12)) {
        prop_assume!(connected(&profile));
        let g = profile.graph();
        let dm = DistanceMatrix::of(&g);
        for h in biconnected_components(&g).nontrivial() {
            for &a in &h.nodes {
                let inner = induced_distances(&g, &h.nodes, a);
                for &b in &h.nodes {
                    prop_assert_eq!(inner[b], dm.get(a, b), "pair ({}, {})", a, b);
                }
            }
        }
    }

    /// Hanging sets partition the node set and contain their anchors.
    #[test]
    fn weights_partition_the_nodes(profile in arb_profile(3..=12)) {
        prop_assume!(connected(&profile));
        let g = profile.graph();
        for h in biconnected_components(&g).nontrivial() {
            let weights = subtree_weights(&g, h).unwrap();
            prop_assert_eq!(weights.total(), g.n());
            let mut seen = BTreeSet::new();
            for (&anchor, set) in &weights.sets {
                prop_assert!(set.contains(&anchor));
                for &z in set {
                    prop_assert!(seen.insert(z));
                }
            }
            prop_assert_eq!(seen.len(), g.n());
        }
    }

    /// Ball statistics: the minimum is over all centers, every ball is at
    /// least the minimum, and balls grow with the radius.
    #[test]
    fn neighborhood_minimum_and_monotonicity(profile in arb_profile(3..=12)) {
        prop_assume!(connected(&profile));
        let g = profile.graph();
        let dm = DistanceMatrix::of(&g);
        for h in biconnected_components(&g).nontrivial() {
            let weights = subtree_weights(&g, h).unwrap();
            for radius in 0..=3u32 {
                let sizes: Vec<usize> = h
                    .nodes
                    .iter()
                    .map(|&u| {
                        neighborhood_stats(&dm, h, &weights, u, radius)
                            .unwrap()
                            .in_component
                            .len()
                    })
                    .collect();
                let min = *sizes.iter().min().unwrap();
                for (&u, &size) in h.nodes.iter().zip(&sizes) {
                    let stats = neighborhood_stats(&dm, h, &weights, u, radius).unwrap();
                    prop_assert_eq!(stats.min_ball, min);
                    prop_assert!(size >= min);
                    if radius > 0 {
                        let smaller =
                            neighborhood_stats(&dm, h, &weights, u, radius - 1).unwrap();
                        prop_assert!(smaller.in_component.is_subset(&stats.in_component));
                        prop_assert!(smaller.covered.is_subset(&stats.covered));
                    }
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// A greedy violation is always an exact violation (deviation-class
    /// containment), for random profiles up to 10 players.
    #[test]
    fn greedy_violations_imply_exact_violations(
        profile in arb_profile(2..=10),
        num in 1i64..8,
        den in 1i64..4,
    ) {
        let cfg = GameConfig::new(profile.n(), ratio(num, den)).unwrap();
        let greedy = is_greedy_ne(&profile, &cfg).unwrap();
        let exact = is_exact_ne(&profile, &cfg, 10).unwrap();
        if exact.is_ne {
            prop_assert!(greedy.is_ne, "exact NE must be greedy NE");
        }
        if !greedy.is_ne {
            prop_assert!(!exact.is_ne, "greedy violation must refute exact NE");
        }
    }

    /// The empty deviation has zero delta, and every delta agrees with the
    /// two player costs recomputed from scratch.
    #[test]
    fn delta_cost_is_consistent_with_recomputation(
        profile in arb_profile(2..=10),
        player_pick in 0usize..10,
        mask in 0u32..1024,
        num in 1i64..8,
        den in 1i64..4,
    ) {
        let n = profile.n();
        let player = player_pick % n;
        let cfg = GameConfig::new(n, ratio(num, den)).unwrap();

        let stay = Deviation::replace(player, profile.strategy(player).clone());
        prop_assert_eq!(
            delta_cost(&profile, &cfg, &stay).unwrap(),
            DeltaCost::Finite(ratio(0, 1))
        );

        let strategy: BTreeSet<usize> = (0..n)
            .filter(|&v| v != player)
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, v)| v)
            .collect();
        let deviation = Deviation::replace(player, strategy.clone());
        let delta = delta_cost(&profile, &cfg, &deviation).unwrap();
        let before = player_cost(&profile, &cfg, player).unwrap().total;
        let after_profile = profile.with_strategy(player, strategy).unwrap();
        let after = player_cost(&after_profile, &cfg, player).unwrap().total;
        let expected = match (before, after) {
            (Cost::Finite(b), Cost::Finite(a)) => DeltaCost::Finite(a - b),
            (Cost::Finite(_), Cost::Unreachable) => DeltaCost::PlusInfinite,
            (Cost::Unreachable, Cost::Finite(_)) => DeltaCost::MinusInfinite,
            (Cost::Unreachable, Cost::Unreachable) => DeltaCost::Finite(ratio(0, 1)),
        };
        prop_assert_eq!(delta, expected);
    }

    /// Funnel records on random graphs satisfy their structural invariants.
    #[test]
    fn funnel_records_satisfy_invariants(profile in arb_profile(4..=9)) {
        prop_assume!(connected(&profile));
        let g = profile.graph();
        let dm = DistanceMatrix::of(&g);
        for v in 0..g.n() {
            let owned: Vec<usize> = profile.strategy(v).iter().copied().collect();
            if owned.len() < 2 {
                continue;
            }
            for u in 0..g.n() {
                if u == v {
                    continue;
                }
                let rec = funnel_record(&g, u, v, [owned[0], owned[1]]).unwrap();
                prop_assert!(funnel_invariants_hold(&g, &dm, &rec));
                prop_assert_eq!(
                    &rec.members,
                    &rec.branches[0].union(&rec.branches[1]).copied().collect()
                );
            }
        }
    }
}

/// Exhaustive deviation-class containment at small n: every exact
/// equilibrium is a greedy one on the full profile space.
#[test]
fn exact_equilibria_are_greedy_equilibria_exhaustively() {
    for n in 2..=4usize {
        for alpha in [ratio(1, 2), ratio(1, 1), ratio(2, 1), ratio(5, 1)] {
            let cfg = GameConfig::new(n, alpha).unwrap();
            let mut exact_count = 0;
            for profile in ncg::search::enumerate_profiles(n).unwrap() {
                let exact = is_exact_ne(&profile, &cfg, 12).unwrap();
                if exact.is_ne {
                    exact_count += 1;
                    assert!(is_greedy_ne(&profile, &cfg).unwrap().is_ne);
                }
            }
            assert!(exact_count > 0, "n={n}");
        }
    }
}

/// Full four-state space at n=3 (including reciprocal purchases): no
/// equilibrium contains a reciprocal pair, so excluding them from
/// enumeration loses nothing.
#[test]
fn reciprocal_profiles_are_never_equilibria_at_n3() {
    let pairs = [(0usize, 1usize), (0, 2), (1, 2)];
    for alpha in [ratio(1, 2), ratio(1, 1), ratio(2, 1), ratio(5, 1)] {
        let cfg = GameConfig::new(3, alpha.clone()).unwrap();
        let mut full_space_ne: BTreeSet<String> = BTreeSet::new();
        for state in 0..4u32.pow(3) {
            let mut purchases = Vec::new();
            let mut rest = state;
            for &(u, v) in &pairs {
                match rest % 4 {
                    0 => {}
                    1 => purchases.push((u, v)),
                    2 => purchases.push((v, u)),
                    _ => {
                        purchases.push((u, v));
                        purchases.push((v, u));
                    }
                }
                rest /= 4;
            }
            let profile = StrategyProfile::build(3, &purchases).unwrap();
            if is_exact_ne(&profile, &cfg, 12).unwrap().is_ne {
                assert!(
                    !profile.has_reciprocal_pair(),
                    "reciprocal equilibrium at alpha={alpha}"
                );
                full_space_ne.insert(profile_digest(&profile));
            }
        }
        let (found, _) = ncg::search::exhaustive_cell(3, &alpha, 1, 12).unwrap();
        let enumerated: BTreeSet<String> = found
            .iter()
            .map(|&idx| profile_digest(&ncg::search::profile_from_index(3, idx)))
            .collect();
        assert_eq!(full_space_ne, enumerated, "alpha={alpha}");
    }
}
