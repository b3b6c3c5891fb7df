//! Randomized invariants tying the closed forms, the demand model, and the
//! built graphs together.

use hypernet::{
    build_graph, exact_metrics, rank_specs, Bottleneck, DemandProfile, OracleCaps, ServiceTimes,
    TopologySpec,
};
use proptest::prelude::*;

fn caps() -> OracleCaps {
    OracleCaps::default()
}

fn unit() -> ServiceTimes {
    ServiceTimes::default()
}

/// Specs small enough to build and walk exhaustively.
fn small_spec() -> impl Strategy<Value = TopologySpec> {
    prop_oneof![
        (2u64..=4, 1u64..=4).prop_map(|(v, r)| TopologySpec::rooted_tree(v, r).unwrap()),
        (3u64..=5, 1u64..=4).prop_map(|(v, r)| TopologySpec::cayley_tree(v, r).unwrap()),
        (1u32..=7).prop_map(|d| TopologySpec::hypercube(d).unwrap()),
        (1u32..=2, 2u64..=6)
            .prop_map(|(d, k)| TopologySpec::hypertorus(d, k as f64).unwrap()),
    ]
}

/// Specs for closed-form checks, wide but safely inside u64 arithmetic.
fn analytic_spec() -> impl Strategy<Value = TopologySpec> {
    prop_oneof![
        (2u64..=20, 0u64..=12).prop_map(|(v, r)| TopologySpec::rooted_tree(v, r).unwrap()),
        (3u64..=20, 0u64..=12).prop_map(|(v, r)| TopologySpec::cayley_tree(v, r).unwrap()),
        (1u32..=50).prop_map(|d| TopologySpec::hypercube(d).unwrap()),
        (1u32..=8, 2u64..=64)
            .prop_map(|(d, k)| TopologySpec::hypertorus(d, k as f64).unwrap()),
        (1u32..=8, 2.0f64..40.0).prop_map(|(d, k)| TopologySpec::hypertorus(d, k).unwrap()),
    ]
}

proptest! {
    #[test]
    fn rooted_tree_counts_match_the_geometric_closed_form(
        v in 2u64..=20, r in 0u64..=12,
    ) {
        let spec = TopologySpec::rooted_tree(v, r).unwrap();
        let n = u128::from(spec.node_count_exact().unwrap());
        let power = u128::from(v).pow(r as u32 + 1);
        prop_assert_eq!(n * u128::from(v - 1), power - 1);
    }

    #[test]
    fn cayley_tree_counts_match_the_shell_closed_form(
        v in 3u64..=20, r in 0u64..=12,
    ) {
        let spec = TopologySpec::cayley_tree(v, r).unwrap();
        let mut expect = 1u128;
        for j in 1..=r {
            expect += u128::from(v) * u128::from(v - 1).pow(j as u32 - 1);
        }
        prop_assert_eq!(u128::from(spec.node_count_exact().unwrap()), expect);
    }

    #[test]
    fn binary_rooted_trees_fill_like_complete_binary_trees(r in 0u64..=40) {
        let spec = TopologySpec::rooted_tree(2, r).unwrap();
        prop_assert_eq!(spec.node_count_exact().unwrap(), (1u64 << (r + 1)) - 1);
    }

    #[test]
    fn populations_grow_with_every_parameter(
        v in 2u64..=19, r in 1u64..=11, d in 1u32..=7, k in 2u64..=63,
    ) {
        let n = |s: TopologySpec| s.node_count_exact().unwrap();
        prop_assert!(n(TopologySpec::rooted_tree(v, r).unwrap())
            < n(TopologySpec::rooted_tree(v, r + 1).unwrap()));
        prop_assert!(n(TopologySpec::rooted_tree(v, r).unwrap())
            < n(TopologySpec::rooted_tree(v + 1, r).unwrap()));
        prop_assert!(n(TopologySpec::cayley_tree(v + 1, r).unwrap())
            < n(TopologySpec::cayley_tree(v + 1, r + 1).unwrap()));
        prop_assert!(n(TopologySpec::cayley_tree(v + 1, r).unwrap())
            < n(TopologySpec::cayley_tree(v + 2, r).unwrap()));
        prop_assert!(n(TopologySpec::hypercube(d).unwrap())
            < n(TopologySpec::hypercube(d + 1).unwrap()));
        let torus = |d, k: u64| TopologySpec::hypertorus(d, k as f64).unwrap();
        prop_assert!(n(torus(d, k)) < n(torus(d, k + 1)));
        prop_assert!(n(torus(d, k)) < n(torus(d + 1, k)));
    }

    #[test]
    fn mean_hops_never_exceed_the_diameter(spec in analytic_spec()) {
        let h = spec.avg_hops().unwrap();
        let delta = spec.diameter().unwrap();
        prop_assert!(h <= delta, "avg {h} > diameter {delta} for {spec:?}");
    }

    #[test]
    fn throughput_saturates_the_binding_stage(spec in analytic_spec()) {
        let p = DemandProfile::compute(&spec, unit()).unwrap();
        let d_max = p.d_link.max(p.d_peer);
        prop_assert!((p.x_max * d_max - 1.0).abs() <= 4.0 * f64::EPSILON);
        prop_assert!(p.x_relative <= 1.0 + 4.0 * f64::EPSILON);
    }

    #[test]
    fn uniform_service_scaling_divides_throughput_evenly(
        spec in analytic_spec(), c in 1.1f64..10.0,
    ) {
        let base = DemandProfile::compute(&spec, unit()).unwrap();
        let scaled =
            DemandProfile::compute(&spec, ServiceTimes::new(c, c).unwrap()).unwrap();
        prop_assert_eq!(base.bottleneck, scaled.bottleneck);
        prop_assert!((scaled.x_max * c / base.x_max - 1.0).abs() < 1e-12);
        prop_assert!((scaled.x_relative * c / base.x_relative - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tree_bottlenecks_sit_at_links_once_depth_two_exists(
        v in 2u64..=20, r in 2u64..=12,
    ) {
        let rooted = TopologySpec::rooted_tree(v, r).unwrap();
        let p = DemandProfile::compute(&rooted, unit()).unwrap();
        prop_assert_eq!(p.bottleneck, Bottleneck::Link);
        let cayley = TopologySpec::cayley_tree(v + 1, r).unwrap();
        let p = DemandProfile::compute(&cayley, unit()).unwrap();
        prop_assert_eq!(p.bottleneck, Bottleneck::Link);
    }

    #[test]
    fn shallow_trees_stay_peer_bound(v in 2u64..=20, r in 0u64..=1) {
        let spec = TopologySpec::rooted_tree(v, r).unwrap();
        let p = DemandProfile::compute(&spec, unit()).unwrap();
        prop_assert_eq!(p.bottleneck, Bottleneck::Peer);
        prop_assert_eq!(p.x_relative, 1.0);
    }

    #[test]
    fn cube_demand_is_balanced_at_every_dimension(d in 1u32..=50) {
        let spec = TopologySpec::hypercube(d).unwrap();
        let p = DemandProfile::compute(&spec, unit()).unwrap();
        prop_assert_eq!(p.bottleneck, Bottleneck::Balanced);
    }

    #[test]
    fn torus_bottleneck_follows_the_ring_size(d in 1u32..=8, k in 2.0f64..40.0) {
        let spec = TopologySpec::hypertorus(d, k).unwrap();
        let p = DemandProfile::compute(&spec, unit()).unwrap();
        // Links carry H/L = k/4 messages per peer-message, so rings wider
        // than four are link-bound and narrower ones peer-bound. Two
        // wrinkles: a ring of two has half the links (its two arcs
        // coincide), which doubles the load back to the balance point, and
        // an odd integer ring shaves the mean below d*k/4, never above it.
        let analytic_k = if k == 2.0 {
            4.0
        } else if k.fract() == 0.0 && (k as u64) % 2 == 1 {
            (k * k - 1.0) / k
        } else {
            k
        };
        if analytic_k < 4.0 - 1e-9 {
            prop_assert_eq!(p.bottleneck, Bottleneck::Peer);
            prop_assert_eq!(p.x_relative, 1.0);
        } else if analytic_k > 4.0 + 1e-9 {
            prop_assert_eq!(p.bottleneck, Bottleneck::Link);
        } else {
            prop_assert_eq!(p.bottleneck, Bottleneck::Balanced);
        }
    }

    #[test]
    fn ranking_is_stable_under_uniform_scaling(c in 1.5f64..8.0) {
        let specs = [
            TopologySpec::hypercube(10).unwrap(),
            TopologySpec::hypertorus(3, 7.0).unwrap(),
            TopologySpec::cayley_tree(5, 6).unwrap(),
            TopologySpec::rooted_tree(3, 8).unwrap(),
        ];
        let base = rank_specs(&specs, unit()).unwrap();
        let scaled = rank_specs(&specs, ServiceTimes::new(c, c).unwrap()).unwrap();
        let labels = |rows: &[hypernet::RankingRow]| -> Vec<String> {
            rows.iter().map(|r| r.label.clone()).collect()
        };
        prop_assert_eq!(labels(&base), labels(&scaled));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hypercube_distance_is_hamming_weight(
        d in 1u32..=7, seed in any::<u64>(),
    ) {
        let g = build_graph(&TopologySpec::hypercube(d).unwrap(), &caps()).unwrap();
        let n = g.node_count() as u64;
        let u = (seed % n) as u32;
        let m = exact_metrics(&g, &caps()).unwrap();
        prop_assert_eq!(m.true_diameter, u64::from(d));
        for (w, neighbors) in g.adjacency.iter().enumerate() {
            for &x in neighbors {
                prop_assert_eq!((w as u32 ^ x).count_ones(), 1);
            }
        }
        prop_assert_eq!(g.adjacency[u as usize].len(), d as usize);
    }

    #[test]
    fn degree_sums_obey_the_handshake_law(spec in small_spec()) {
        let g = build_graph(&spec, &caps()).unwrap();
        let degree_sum: u64 = g.adjacency.iter().map(|a| a.len() as u64).sum();
        prop_assert_eq!(degree_sum, 2 * g.edge_count());
        let max_degree = g.adjacency.iter().map(Vec::len).max().unwrap() as u64;
        match spec {
            TopologySpec::RootedTree { branching, .. } => {
                prop_assert_eq!(g.adjacency[0].len() as u64, branching);
                prop_assert!(max_degree <= branching + 1);
            }
            TopologySpec::CayleyTree { valence, .. } => {
                prop_assert!(max_degree <= valence);
            }
            TopologySpec::Hypercube { dim } => {
                prop_assert_eq!(max_degree, u64::from(dim));
            }
            TopologySpec::Hypertorus { dim, ring } => {
                let expect = if ring == 2.0 { dim } else { 2 * dim };
                prop_assert_eq!(max_degree, u64::from(expect));
            }
        }
    }

    #[test]
    fn routing_conserves_hops(spec in small_spec()) {
        let g = build_graph(&spec, &caps()).unwrap();
        let m = exact_metrics(&g, &caps()).unwrap();
        let implied = m.mean_edge_transit_frequency * m.edge_count as f64;
        prop_assert!((implied - m.mean_hops_excl_self).abs() <= 1e-12 * m.mean_hops_excl_self);
        prop_assert!(m.max_edge_transit_frequency >= m.mean_edge_transit_frequency);
        prop_assert!(m.exact_x_max_hotspot <= m.exact_x_max_uniform);
    }

    #[test]
    fn ring_two_tori_build_identically_to_hypercubes(d in 1u32..=10) {
        let torus = build_graph(&TopologySpec::hypertorus(d, 2.0).unwrap(), &caps()).unwrap();
        let cube = build_graph(&TopologySpec::hypercube(d).unwrap(), &caps()).unwrap();
        prop_assert_eq!(torus.adjacency, cube.adjacency);
    }
}
