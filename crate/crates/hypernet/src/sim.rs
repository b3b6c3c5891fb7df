//! Seeded Monte Carlo routing over explicitly built graphs.
//!
//! The simulator draws ordered source/destination pairs uniformly (never a
//! self-pair), walks the same smallest-identifier shortest-path route the
//! exact pass uses, and reports hop-count and link-load estimates with
//! standard errors. Runs are reproducible: the stream cipher generator and
//! the bounded-draw rejection step are fixed here, so one seed yields one
//! byte-identical result on any platform.

use std::io::{self, Write};

use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};
use serde::Serialize;

use crate::demand::ServiceTimes;
use crate::error::{Error, Result};
use crate::oracle::{bfs_distances, build_graph, EdgeIndex, ExactMetrics, OracleCaps};
use crate::topology::TopologySpec;

/// Name of the generator behind every run, recorded in results.
pub const RNG_IDENTITY: &str = "chacha12";

/// Relative error allowed by convergence checks.
pub const DEFAULT_TOLERANCE: f64 = 0.02;

/// Fewest pairs a run can draw before its estimates are flagged as
/// undersampled.
pub const SAMPLE_FLOOR: u64 = 100_000;

/// Uniform draw from [0, bound) by widening multiplication with rejection,
/// so results do not depend on a library's bounded-sampling internals.
fn bounded(rng: &mut ChaCha12Rng, bound: u64) -> u64 {
    debug_assert!(bound > 0);
    let mut m = u128::from(rng.next_u64()) * u128::from(bound);
    let mut low = m as u64;
    if low < bound {
        let threshold = bound.wrapping_neg() % bound;
        while low < threshold {
            m = u128::from(rng.next_u64()) * u128::from(bound);
            low = m as u64;
        }
    }
    (m >> 64) as u64
}

/// One simulation request.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimConfig {
    pub spec: TopologySpec,
    /// Ordered source/destination pairs to draw.
    pub pairs: u64,
    pub seed: u64,
    pub times: ServiceTimes,
}

/// Estimates from one seeded run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimResult {
    pub spec: TopologySpec,
    pub pairs: u64,
    pub seed: u64,
    pub rng: &'static str,
    /// Sample mean of per-pair hop counts.
    pub mean_hops_estimate: f64,
    /// Standard error of the hop-count mean.
    pub standard_error: f64,
    /// Mean link transit frequency implied by the hop-count mean.
    pub f_link_mean_estimate: f64,
    /// Busiest link's observed transit frequency.
    pub f_link_max_estimate: f64,
    /// Throughput bound from the estimated mean link load.
    pub x_max_uniform_estimate: f64,
    /// Traversals per edge as (low, high, count), ascending by endpoints.
    pub edge_transit_counts: Vec<(u32, u32, u64)>,
}

/// Draw `config.pairs` routed messages over the built graph and estimate
/// hop and load statistics.
pub fn run(config: &SimConfig, caps: &OracleCaps) -> Result<SimResult> {
    if config.pairs == 0 {
        return Err(Error::NoPairs);
    }
    let g = build_graph(&config.spec, caps)?;
    let n = g.node_count() as u64;
    if n < 2 {
        return Err(Error::InvalidSpec(
            "simulation needs at least two peers".into(),
        ));
    }
    if n > caps.max_all_pairs_nodes {
        return Err(Error::SizeCap {
            nodes: n,
            cap: caps.max_all_pairs_nodes,
            what: "distance matrix",
        });
    }
    if n > u64::from(u16::MAX) {
        return Err(Error::SizeCap {
            nodes: n,
            cap: u64::from(u16::MAX),
            what: "distance matrix",
        });
    }

    let n_usize = n as usize;
    let mut dist_to = vec![0u16; n_usize * n_usize];
    let mut scratch = Vec::new();
    for t in 0..n_usize {
        bfs_distances(&g, t as u32, &mut scratch);
        let row = &mut dist_to[t * n_usize..(t + 1) * n_usize];
        for (u, &d) in scratch.iter().enumerate() {
            row[u] = d as u16;
        }
    }

    let index = EdgeIndex::build(&g);
    let mut edge_counts = vec![0u64; index.edges.len()];
    let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
    let mut hop_sum = 0u64;
    let mut hop_sum_sq = 0u128;
    for _ in 0..config.pairs {
        let p = bounded(&mut rng, n * (n - 1));
        let src = p / (n - 1);
        let r = p % (n - 1);
        let dst = r + u64::from(r >= src);
        let row = &dist_to[dst as usize * n_usize..(dst as usize + 1) * n_usize];
        let mut u = src as usize;
        let mut hops = 0u64;
        while u as u64 != dst {
            let below = row[u] - 1;
            let pos = g.adjacency[u]
                .iter()
                .position(|&w| row[w as usize] == below)
                .expect("a shortest path neighbor exists");
            edge_counts[index.edge_at(u, pos) as usize] += 1;
            hops += 1;
            u = g.adjacency[u][pos] as usize;
        }
        hop_sum += hops;
        hop_sum_sq += u128::from(hops) * u128::from(hops);
    }

    let pairs = config.pairs as f64;
    let mean = hop_sum as f64 / pairs;
    let standard_error = if config.pairs < 2 {
        0.0
    } else {
        let variance = (hop_sum_sq as f64 - pairs * mean * mean) / (pairs - 1.0);
        (variance.max(0.0) / pairs).sqrt()
    };
    let edge_count = index.edges.len() as f64;
    let f_mean = mean / edge_count;
    let f_max = edge_counts.iter().copied().max().unwrap_or(0) as f64 / pairs;
    let d_peer = config.times.s_peer / n as f64;
    let x_uniform = 1.0 / d_peer.max(f_mean * config.times.s_link);
    let edge_transit_counts = index
        .edges
        .iter()
        .zip(&edge_counts)
        .map(|(&(a, b), &c)| (a, b, c))
        .collect();
    Ok(SimResult {
        spec: config.spec,
        pairs: config.pairs,
        seed: config.seed,
        rng: RNG_IDENTITY,
        mean_hops_estimate: mean,
        standard_error,
        f_link_mean_estimate: f_mean,
        f_link_max_estimate: f_max,
        x_max_uniform_estimate: x_uniform,
        edge_transit_counts,
    })
}

/// One estimate held against its exact target.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceCheck {
    pub metric: &'static str,
    pub estimate: f64,
    pub target: f64,
    pub relative_error: f64,
    pub within_tolerance: bool,
}

/// A simulation compared point by point with the exact all-pairs metrics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub sim: SimResult,
    pub tolerance: f64,
    pub checks: Vec<ConvergenceCheck>,
    /// True when the run drew fewer pairs than the sample floor.
    pub insufficient_samples: bool,
}

impl ConvergenceReport {
    /// True when any estimate missed tolerance or the run was undersampled.
    pub fn flagged(&self) -> bool {
        self.insufficient_samples || self.checks.iter().any(|c| !c.within_tolerance)
    }
}

fn check(metric: &'static str, estimate: f64, target: f64, tolerance: f64) -> ConvergenceCheck {
    let relative_error = if target == 0.0 {
        if estimate == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (estimate - target).abs() / target
    };
    ConvergenceCheck {
        metric,
        estimate,
        target,
        relative_error,
        within_tolerance: relative_error <= tolerance,
    }
}

/// Run `config` and compare its estimates with `exact`, which must describe
/// the same topology.
pub fn convergence_report(
    config: &SimConfig,
    exact: &ExactMetrics,
    caps: &OracleCaps,
) -> Result<ConvergenceReport> {
    if config.spec != exact.spec {
        return Err(Error::SpecMismatch);
    }
    let sim = run(config, caps)?;
    let checks = vec![
        check(
            "mean_hops",
            sim.mean_hops_estimate,
            exact.mean_hops_excl_self,
            DEFAULT_TOLERANCE,
        ),
        check(
            "mean_edge_transit_frequency",
            sim.f_link_mean_estimate,
            exact.mean_edge_transit_frequency,
            DEFAULT_TOLERANCE,
        ),
        check(
            "max_edge_transit_frequency",
            sim.f_link_max_estimate,
            exact.max_edge_transit_frequency,
            DEFAULT_TOLERANCE,
        ),
    ];
    Ok(ConvergenceReport {
        sim,
        tolerance: DEFAULT_TOLERANCE,
        checks,
        insufficient_samples: config.pairs < SAMPLE_FLOOR,
    })
}

/// Write per-edge traversal counts as "u v count" lines.
pub fn write_edge_counts<W: Write>(result: &SimResult, mut out: W) -> io::Result<()> {
    for &(u, w, c) in &result.edge_transit_counts {
        writeln!(out, "{u} {w} {c}")?;
    }
    Ok(())
}
