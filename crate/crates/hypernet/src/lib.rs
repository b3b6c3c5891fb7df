//! Analytic scalability model for virtual peer-to-peer interconnects.
//!
//! Four regular topology families — rooted trees, Cayley trees, hypercubes,
//! and hypertori — are described by closed forms for population, diameter,
//! link count, and mean hop distance ([`topology`]); those feed an
//! operational-law demand model that locates each family's throughput
//! bottleneck and its usable fraction of peak bandwidth ([`demand`]). Every
//! closed form can be held against an explicitly built graph measured by
//! breadth-first search ([`oracle`]) and against seeded Monte Carlo routing
//! ([`sim`]), so the model's conventions and their known departures from
//! graph-theoretic values stay visible and tested.

pub mod demand;
pub mod error;
pub mod oracle;
pub mod sim;
pub mod topology;

pub use demand::{
    rank_specs, rank_table3, solve_horizon, sweep, Bottleneck, DemandProfile, FamilyShape,
    RankingRow, ServiceTimes, SweepPoint, SweepSeries, BALANCE_TOLERANCE,
};
pub use error::{Error, Result};
pub use oracle::{
    build_graph, exact_metrics, verify_spec, write_edge_list, Comparison, ComparisonStatus,
    ExactMetrics, GraphInstance, OracleCaps, VerificationReport,
};
pub use sim::{
    convergence_report, run as run_sim, write_edge_counts, ConvergenceCheck, ConvergenceReport,
    SimConfig, SimResult, DEFAULT_TOLERANCE, RNG_IDENTITY, SAMPLE_FLOOR,
};
pub use topology::{Count, Family, SpecParams, StructuralMetrics, TopologySpec};
