//! End-to-end acceptance checks. Each test prints one
//! `acceptance: <criterion> ... pass|FAIL` line and fails loudly on any
//! regression.

use std::io::Write;
use std::panic::{catch_unwind, resume_unwind, UnwindSafe};

use hypernet::{
    build_graph, exact_metrics, rank_specs, rank_table3, run_sim, verify_spec, Bottleneck,
    ComparisonStatus, DemandProfile, OracleCaps, RankingRow, ServiceTimes, SimConfig,
    TopologySpec,
};

fn criterion<F>(name: &str, body: F)
where
    F: FnOnce() + UnwindSafe,
{
    // Writing to the stdout handle directly keeps these lines visible in a
    // plain `cargo test` run, where the print macros are captured.
    let mut out = std::io::stdout();
    match catch_unwind(body) {
        Ok(()) => drop(writeln!(out, "acceptance: {name} ... pass")),
        Err(cause) => {
            drop(writeln!(out, "acceptance: {name} ... FAIL"));
            resume_unwind(cause);
        }
    }
}

fn unit() -> ServiceTimes {
    ServiceTimes::default()
}

fn tree(v: u64, r: u64) -> TopologySpec {
    TopologySpec::rooted_tree(v, r).unwrap()
}

fn cayley(v: u64, r: u64) -> TopologySpec {
    TopologySpec::cayley_tree(v, r).unwrap()
}

fn cube(d: u32) -> TopologySpec {
    TopologySpec::hypercube(d).unwrap()
}

fn torus(d: u32, k: f64) -> TopologySpec {
    TopologySpec::hypertorus(d, k).unwrap()
}

#[test]
fn criterion_1_closed_forms_match_published_anchors() {
    criterion("closed forms match published anchors", || {
        // Populations of the families at their published horizons.
        assert_eq!(tree(4, 10).node_count_exact().unwrap(), 1_398_101);
        assert_eq!(cayley(4, 12).node_count_exact().unwrap(), 1_062_881);
        assert_eq!(cayley(8, 7).node_count_exact().unwrap(), 1_098_057);
        assert_eq!(cayley(20, 5).node_count_exact().unwrap(), 2_751_221);
        assert_eq!(cayley(20, 4).node_count_exact().unwrap(), 144_801);
        assert_eq!(cayley(6, 9).node_count_exact().unwrap(), 2_929_687);
        assert_eq!(cayley(8, 8).node_count_exact().unwrap(), 7_686_401);
        assert_eq!(cube(20).node_count_exact().unwrap(), 1_048_576);
        assert_eq!(torus(3, 128.0).node_count_exact().unwrap(), 2_097_152);

        // Diameters, link counts, mean hops, and connection counts.
        assert_eq!(cube(20).diameter().unwrap(), 20.0);
        assert_eq!(torus(3, 128.0).diameter().unwrap(), 96.0);
        assert_eq!(tree(4, 10).diameter().unwrap(), 20.0);
        assert_eq!(cube(20).link_count().unwrap().exact(), Some(10_485_760));
        assert_eq!(torus(10, 4.0).link_count().unwrap().exact(), Some(10_485_760));
        assert_eq!(cube(20).avg_hops().unwrap(), 10.0);
        assert_eq!(torus(10, 4.0).avg_hops().unwrap(), 10.0);
        assert_eq!(cayley(4, 12).avg_hops().unwrap(), 12_223_144.0 / 1_062_881.0);
        assert_eq!(tree(4, 10).connections_per_peer(), 4);
        assert_eq!(cayley(20, 5).connections_per_peer(), 20);
        assert_eq!(cube(20).connections_per_peer(), 20);
        assert_eq!(torus(3, 128.0).connections_per_peer(), 6);
    });
}

/// The published ranked comparison: label, population at the horizon, hops
/// to the horizon, connections per peer, and percent of peak bandwidth.
const PUBLISHED_RANKING: [(&str, f64, u64, u64, f64); 8] = [
    ("20-Cube", 2.1e6, 10, 20, 100.0),
    ("10-Torus", 2.1e6, 11, 20, 93.0),
    ("5-Torus", 2.1e6, 23, 10, 22.0),
    ("20-Cayley", 2.8e6, 6, 20, 16.0),
    ("8-Cayley", 1.1e6, 8, 8, 13.0),
    ("4-Tree", 1.4e6, 11, 4, 12.0),
    ("3-Torus", 2.1e6, 96, 6, 10.0),
    ("4-Cayley", 1.1e6, 13, 4, 8.0),
];

fn row<'a>(rows: &'a [RankingRow], label: &str) -> &'a RankingRow {
    rows.iter()
        .find(|r| r.label == label)
        .unwrap_or_else(|| panic!("missing row {label}"))
}

#[test]
fn criterion_2_ranked_comparison_reproduces_the_published_table() {
    criterion("ranked comparison reproduces the published table", || {
        let rows = rank_table3(unit()).unwrap();
        assert_eq!(rows.len(), 8);

        // Every row except the 3-Torus ranks exactly where it was
        // published; the 3-Torus departure is annotated on the row.
        let computed_order: Vec<&str> = rows
            .iter()
            .map(|r| r.label.as_str())
            .filter(|l| *l != "3-Torus")
            .collect();
        let published_order: Vec<&str> = PUBLISHED_RANKING
            .iter()
            .map(|&(l, ..)| l)
            .filter(|l| *l != "3-Torus")
            .collect();
        assert_eq!(computed_order, published_order);

        for &(label, peers, hops, connections, pct) in &PUBLISHED_RANKING {
            let r = row(&rows, label);
            assert_eq!(r.hops_to_horizon, hops, "{label} hops");
            assert_eq!(r.connections, connections, "{label} connections");
            let tolerance = match label {
                "20-Cube" => 0.0,
                "10-Torus" | "5-Torus" => 1.0,
                "3-Torus" => continue,
                _ => 5.0,
            };
            assert!(
                (r.relative_bandwidth_pct - pct).abs() <= tolerance,
                "{label}: computed {} vs published {pct}",
                r.relative_bandwidth_pct
            );
            if label == "20-Cube" {
                // Its published population is the target horizon, half
                // again the actual 2^20; the row says so.
                assert!(r.note.as_deref().unwrap_or("").contains("1048576"));
            } else {
                let rounded = r.peers_in_horizon.rounded() as f64;
                assert!(
                    (rounded - peers).abs() <= 0.1 * peers,
                    "{label}: population {rounded} vs published {peers}"
                );
            }
        }

        // The 3-Torus is the one published row the model does not
        // reproduce: it computes 1/32 of peak, not 10%.
        let odd_one = row(&rows, "3-Torus");
        assert_eq!(odd_one.relative_bandwidth_pct, 3.125);
        let note = odd_one.note.as_deref().unwrap_or("");
        assert!(
            note.contains("3.1") && note.contains("10"),
            "note should quote both values: {note}"
        );
    });
}

#[test]
fn criterion_3_balanced_families_keep_full_relative_throughput() {
    criterion("balanced families keep full relative throughput", || {
        for d in 1..=30 {
            let p = DemandProfile::compute(&cube(d), unit()).unwrap();
            assert_eq!(p.x_relative, 1.0, "hypercube dimension {d}");
            assert_eq!(p.bottleneck, Bottleneck::Balanced);
        }
        for k in [2.0, 3.0, 4.0] {
            let p = DemandProfile::compute(&torus(10, k), unit()).unwrap();
            assert_eq!(p.x_relative, 1.0, "ring {k}");
        }
        let p = DemandProfile::compute(&torus(10, 5.0), unit()).unwrap();
        assert!(p.x_relative < 1.0);
        assert_eq!(p.bottleneck, Bottleneck::Link);
    });
}

#[test]
fn criterion_4_closed_forms_agree_with_explicit_graphs() {
    criterion("closed forms agree with explicit graphs", || {
        let caps = OracleCaps::default();
        let mut specs = Vec::new();
        for v in [2u64, 3, 4, 8, 20] {
            for r in 0..=5 {
                specs.push(tree(v, r));
            }
        }
        for v in [3u64, 4, 8, 20] {
            for r in 1..=5 {
                specs.push(cayley(v, r));
            }
        }
        for d in 1..=10 {
            specs.push(cube(d));
        }
        for d in 1..=3 {
            for k in 2..=8 {
                specs.push(torus(d, k as f64));
            }
        }

        let mut walked = 0;
        let mut built_only = 0;
        for spec in specs {
            let n = spec.node_count_exact().unwrap();
            if n > caps.max_build_nodes {
                continue;
            }
            let g = build_graph(&spec, &caps).unwrap();
            assert_eq!(g.node_count() as u64, n, "{spec:?} population");
            let links = spec.link_count().unwrap().exact().unwrap();
            let is_tree = matches!(
                spec,
                TopologySpec::RootedTree { .. } | TopologySpec::CayleyTree { .. }
            );
            if is_tree {
                assert_eq!(links, g.edge_count() + 1, "{spec:?} links");
            } else {
                assert_eq!(links, g.edge_count(), "{spec:?} links");
            }
            if n > caps.max_all_pairs_nodes {
                built_only += 1;
                continue;
            }
            let report = verify_spec(&spec, &caps).unwrap();
            assert!(report.passed(), "{spec:?}: {report:?}");
            for c in &report.comparisons {
                match (c.metric, &spec) {
                    // Hop means must agree to the last bit everywhere,
                    // population always, and tree and cube diameters too.
                    ("avg_hops" | "node_count", _) => {
                        assert_eq!(
                            c.status,
                            ComparisonStatus::Pass,
                            "{spec:?} {}: {}",
                            c.metric,
                            c.detail
                        );
                    }
                    ("diameter", TopologySpec::Hypertorus { .. }) => {
                        assert_eq!(c.status, ComparisonStatus::DocumentedDiscrepancy);
                    }
                    ("diameter", _) => {
                        assert_eq!(c.status, ComparisonStatus::Pass, "{spec:?} diameter");
                    }
                    _ => {}
                }
            }
            walked += 1;
        }
        assert!(walked >= 40, "only {walked} topologies walked exhaustively");
        assert!(built_only >= 4, "only {built_only} build-only checks");
    });
}

#[test]
fn criterion_5_simulator_converges_on_every_seed() {
    criterion("simulator converges on every seed", || {
        let caps = OracleCaps::default();
        let spec = cube(6);
        let g = build_graph(&spec, &caps).unwrap();
        let exact = exact_metrics(&g, &caps).unwrap();
        for seed in 1..=10 {
            let config = SimConfig {
                spec,
                pairs: 1_000_000,
                seed,
                times: unit(),
            };
            let result = run_sim(&config, &caps).unwrap();
            let rel = |estimate: f64, target: f64| (estimate - target).abs() / target;
            assert!(
                rel(result.mean_hops_estimate, exact.mean_hops_excl_self) < 0.02,
                "seed {seed} hop mean {}",
                result.mean_hops_estimate
            );
            assert!(
                rel(
                    result.f_link_mean_estimate,
                    exact.mean_edge_transit_frequency
                ) < 0.02,
                "seed {seed} link frequency {}",
                result.f_link_mean_estimate
            );
            let again = run_sim(&config, &caps).unwrap();
            assert_eq!(result, again, "seed {seed} must reproduce bit for bit");
        }
    });
}

#[test]
fn criterion_6_structural_invariants_hold() {
    criterion("structural invariants hold", || {
        let caps = OracleCaps::default();
        let battery = [
            tree(2, 1),
            tree(3, 7),
            cayley(4, 6),
            cayley(20, 3),
            cube(16),
            torus(2, 9.0),
            torus(4, 3.5),
            torus(5, 2.0),
        ];

        // Whatever stage binds, the feasible rate saturates it.
        for spec in &battery {
            let p = DemandProfile::compute(spec, unit()).unwrap();
            let d_max = p.d_link.max(p.d_peer);
            assert!(
                (p.x_max * d_max - 1.0).abs() <= 4.0 * f64::EPSILON,
                "{spec:?}"
            );
            assert!(p.x_relative <= 1.0 + 4.0 * f64::EPSILON);
        }

        // Slowing both stages together reorders nothing.
        let base = rank_specs(&battery, unit()).unwrap();
        let scaled = rank_specs(&battery, ServiceTimes::new(3.0, 3.0).unwrap()).unwrap();
        let labels =
            |rows: &[RankingRow]| rows.iter().map(|r| r.label.clone()).collect::<Vec<_>>();
        assert_eq!(labels(&base), labels(&scaled));

        // Graphs balance their books: degree sums are twice the edges.
        for spec in [tree(3, 4), cayley(5, 3), cube(8), torus(2, 7.0)] {
            let g = build_graph(&spec, &caps).unwrap();
            let degree_sum: u64 = g.adjacency.iter().map(|a| a.len() as u64).sum();
            assert_eq!(degree_sum, 2 * g.edge_count(), "{spec:?}");
        }

        // A ring of two folds onto the hypercube, link for link.
        for d in 1..=10 {
            let t = build_graph(&torus(d, 2.0), &caps).unwrap();
            let c = build_graph(&cube(d), &caps).unwrap();
            assert_eq!(t.adjacency, c.adjacency, "dimension {d}");
        }
    });
}
