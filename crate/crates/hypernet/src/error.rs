use crate::topology::Family;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Topology parameters violate a family constraint.
    #[error("invalid topology: {0}")]
    InvalidSpec(String),

    /// A count left the unsigned 64-bit range.
    #[error("{0} exceeds the unsigned 64-bit range")]
    Overflow(&'static str),

    /// The operation is not defined for this family.
    #[error("{op} is not defined for the {family} family")]
    UnsupportedFamily { family: Family, op: &'static str },

    /// A tree level index beyond the configured radius.
    #[error("level {level} exceeds radius {radius}")]
    LevelOutOfRange { level: u64, radius: u64 },

    /// Graph construction needs an integer ring size.
    #[error("graph construction requires an integer ring size, got k = {0}")]
    FractionalRing(f64),

    /// The topology is too large for the requested graph operation.
    #[error("{nodes} nodes exceeds the {what} cap of {cap}")]
    SizeCap {
        nodes: u64,
        cap: u64,
        what: &'static str,
    },

    /// Service times must be strictly positive and finite.
    #[error("service times must be positive, got s_link = {s_link}, s_peer = {s_peer}")]
    InvalidServiceTimes { s_link: f64, s_peer: f64 },

    /// A simulation needs at least one sampled pair.
    #[error("pair count must be at least 1")]
    NoPairs,

    /// Simulation and oracle results describe different topologies.
    #[error("convergence report requires matching topologies")]
    SpecMismatch,
}

pub type Result<T> = std::result::Result<T, Error>;
