//! Topology families and their closed-form structural metrics.
//!
//! Four virtual interconnect families are modeled: rooted trees, Cayley
//! trees, binary hypercubes, and hypertori. Every metric here comes from a
//! closed form or a finite summation over levels; nothing in this module
//! builds an explicit graph. Counts use checked 64-bit arithmetic, and the
//! hypertorus additionally admits a fractional ring size for analytic work,
//! in which case counts degrade to floating point.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Interconnect family identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// Tree in which every node has `v` children down to the radius.
    #[serde(rename = "tree")]
    RootedTree,
    /// Tree in which every interior node has degree `v`.
    #[serde(rename = "cayley")]
    CayleyTree,
    /// Binary hypercube of dimension `d`.
    #[serde(rename = "hypercube")]
    Hypercube,
    /// Torus with `d` dimensions of `k` peers each.
    #[serde(rename = "torus")]
    Hypertorus,
}

impl Family {
    /// Canonical lowercase token, as used in CSV and JSON output.
    pub fn token(self) -> &'static str {
        match self {
            Family::RootedTree => "tree",
            Family::CayleyTree => "cayley",
            Family::Hypercube => "hypercube",
            Family::Hypertorus => "torus",
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.token())
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tree" => Ok(Family::RootedTree),
            "cayley" => Ok(Family::CayleyTree),
            "hypercube" => Ok(Family::Hypercube),
            "torus" => Ok(Family::Hypertorus),
            other => Err(Error::InvalidSpec(format!("unknown family {other:?}"))),
        }
    }
}

/// A peer or link count: exact when the generating parameters are integral,
/// floating point when a fractional ring size makes the count a real.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Count {
    Exact(u64),
    Real(f64),
}

impl Count {
    /// The count as a float, lossy above 2^53 for exact values.
    pub fn get(self) -> f64 {
        match self {
            Count::Exact(n) => n as f64,
            Count::Real(x) => x,
        }
    }

    /// The exact integer value, if this count has one.
    pub fn exact(self) -> Option<u64> {
        match self {
            Count::Exact(n) => Some(n),
            Count::Real(_) => None,
        }
    }

    /// Nearest integer, for presentation of analytic counts.
    pub fn rounded(self) -> u64 {
        match self {
            Count::Exact(n) => n,
            Count::Real(x) => x.round() as u64,
        }
    }
}

impl Serialize for Count {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            Count::Exact(n) => s.serialize_u64(n),
            Count::Real(x) => s.serialize_f64(x),
        }
    }
}

/// Flat parameter form shared by the CLI flags, CSV columns, and the JSON
/// spec-file schema. `v` is the branching factor (rooted tree) or interior
/// valence (Cayley tree), `radius` the tree horizon, `d` the dimension
/// count, and `k` the ring size per dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecParams {
    pub family: Family,
    #[serde(default)]
    pub v: Option<u64>,
    #[serde(default)]
    pub radius: Option<u64>,
    #[serde(default)]
    pub d: Option<u32>,
    #[serde(default)]
    pub k: Option<f64>,
}

/// A fully specified topology.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpecParams", into = "SpecParams")]
pub enum TopologySpec {
    RootedTree { branching: u64, radius: u64 },
    CayleyTree { valence: u64, radius: u64 },
    Hypercube { dim: u32 },
    Hypertorus { dim: u32, ring: f64 },
}

impl TryFrom<SpecParams> for TopologySpec {
    type Error = Error;

    fn try_from(p: SpecParams) -> Result<Self> {
        let reject = |allowed: &str| {
            Err(Error::InvalidSpec(format!(
                "family {} takes exactly the parameters {allowed}",
                p.family
            )))
        };
        match p.family {
            Family::RootedTree => match (p.v, p.radius, p.d, p.k) {
                (Some(v), Some(r), None, None) => TopologySpec::rooted_tree(v, r),
                _ => reject("v and radius"),
            },
            Family::CayleyTree => match (p.v, p.radius, p.d, p.k) {
                (Some(v), Some(r), None, None) => TopologySpec::cayley_tree(v, r),
                _ => reject("v and radius"),
            },
            Family::Hypercube => match (p.v, p.radius, p.d, p.k) {
                (None, None, Some(d), None) => TopologySpec::hypercube(d),
                _ => reject("d"),
            },
            Family::Hypertorus => match (p.v, p.radius, p.d, p.k) {
                (None, None, Some(d), Some(k)) => TopologySpec::hypertorus(d, k),
                _ => reject("d and k"),
            },
        }
    }
}

impl From<TopologySpec> for SpecParams {
    fn from(spec: TopologySpec) -> Self {
        let mut p = SpecParams {
            family: spec.family(),
            v: None,
            radius: None,
            d: None,
            k: None,
        };
        match spec {
            TopologySpec::RootedTree { branching, radius } => {
                p.v = Some(branching);
                p.radius = Some(radius);
            }
            TopologySpec::CayleyTree { valence, radius } => {
                p.v = Some(valence);
                p.radius = Some(radius);
            }
            TopologySpec::Hypercube { dim } => p.d = Some(dim),
            TopologySpec::Hypertorus { dim, ring } => {
                p.d = Some(dim);
                p.k = Some(ring);
            }
        }
        p
    }
}

fn mul(a: u64, b: u64, what: &'static str) -> Result<u64> {
    a.checked_mul(b).ok_or(Error::Overflow(what))
}

fn add(a: u64, b: u64, what: &'static str) -> Result<u64> {
    a.checked_add(b).ok_or(Error::Overflow(what))
}

impl TopologySpec {
    /// Tree in which every node down to `radius` has `branching` children.
    pub fn rooted_tree(branching: u64, radius: u64) -> Result<Self> {
        if branching < 2 {
            return Err(Error::InvalidSpec(format!(
                "rooted tree branching factor must be at least 2, got {branching}"
            )));
        }
        Ok(TopologySpec::RootedTree { branching, radius })
    }

    /// Tree in which every interior node has `valence` links.
    pub fn cayley_tree(valence: u64, radius: u64) -> Result<Self> {
        if valence < 3 {
            return Err(Error::InvalidSpec(format!(
                "Cayley tree valence must be at least 3, got {valence}"
            )));
        }
        Ok(TopologySpec::CayleyTree { valence, radius })
    }

    /// Binary hypercube of dimension `dim`.
    pub fn hypercube(dim: u32) -> Result<Self> {
        if dim < 1 {
            return Err(Error::InvalidSpec(
                "hypercube dimension must be at least 1".into(),
            ));
        }
        Ok(TopologySpec::Hypercube { dim })
    }

    /// Torus with `dim` dimensions of `ring` peers each; `ring` may be
    /// fractional for analytic work.
    pub fn hypertorus(dim: u32, ring: f64) -> Result<Self> {
        if dim < 1 {
            return Err(Error::InvalidSpec(
                "hypertorus dimension must be at least 1".into(),
            ));
        }
        if !ring.is_finite() || ring < 2.0 {
            return Err(Error::InvalidSpec(format!(
                "hypertorus ring size must be a finite value of at least 2, got {ring}"
            )));
        }
        Ok(TopologySpec::Hypertorus { dim, ring })
    }

    /// The family this spec belongs to.
    pub fn family(&self) -> Family {
        match self {
            TopologySpec::RootedTree { .. } => Family::RootedTree,
            TopologySpec::CayleyTree { .. } => Family::CayleyTree,
            TopologySpec::Hypercube { .. } => Family::Hypercube,
            TopologySpec::Hypertorus { .. } => Family::Hypertorus,
        }
    }

    /// Flat parameter form of this spec.
    pub fn params(&self) -> SpecParams {
        SpecParams::from(*self)
    }

    /// Integer ring size of a hypertorus, or an error if it is fractional.
    pub fn integer_ring(&self) -> Result<Option<u64>> {
        match *self {
            TopologySpec::Hypertorus { ring, .. } => {
                if ring.fract() == 0.0 && ring <= u64::MAX as f64 {
                    Ok(Some(ring as u64))
                } else {
                    Err(Error::FractionalRing(ring))
                }
            }
            _ => Ok(None),
        }
    }

    fn is_tree(&self) -> bool {
        matches!(
            self,
            TopologySpec::RootedTree { .. } | TopologySpec::CayleyTree { .. }
        )
    }

    fn tree_radius(&self) -> Option<u64> {
        match *self {
            TopologySpec::RootedTree { radius, .. } | TopologySpec::CayleyTree { radius, .. } => {
                Some(radius)
            }
            _ => None,
        }
    }

    /// Number of peers within the `level`-th hop ring of a tree; the root
    /// alone occupies level 0.
    pub fn level_population(&self, level: u64) -> Result<u64> {
        let radius = self.tree_radius().ok_or(Error::UnsupportedFamily {
            family: self.family(),
            op: "level_population",
        })?;
        if level > radius {
            return Err(Error::LevelOutOfRange { level, radius });
        }
        if level == 0 {
            return Ok(1);
        }
        match *self {
            TopologySpec::RootedTree { branching, .. } => {
                let mut pop = 1u64;
                for _ in 0..level {
                    pop = mul(pop, branching, "level population")?;
                }
                Ok(pop)
            }
            TopologySpec::CayleyTree { valence, .. } => {
                let mut pop = valence;
                for _ in 1..level {
                    pop = mul(pop, valence - 1, "level population")?;
                }
                Ok(pop)
            }
            _ => unreachable!(),
        }
    }

    /// Total peer count N.
    pub fn node_count(&self) -> Result<Count> {
        match *self {
            TopologySpec::RootedTree { radius, .. } | TopologySpec::CayleyTree { radius, .. } => {
                let mut total = 0u64;
                for level in 0..=radius {
                    total = add(total, self.level_population(level)?, "node count")?;
                }
                Ok(Count::Exact(total))
            }
            TopologySpec::Hypercube { dim } => {
                if dim >= 64 {
                    return Err(Error::Overflow("node count"));
                }
                Ok(Count::Exact(1u64 << dim))
            }
            TopologySpec::Hypertorus { dim, ring } => match self.integer_ring() {
                Ok(Some(k)) => {
                    let mut total = 1u64;
                    for _ in 0..dim {
                        total = mul(total, k, "node count")?;
                    }
                    Ok(Count::Exact(total))
                }
                _ => Ok(Count::Real(ring.powi(dim as i32))),
            },
        }
    }

    /// Peer count as an exact integer; fractional ring sizes are rejected.
    pub fn node_count_exact(&self) -> Result<u64> {
        match self.node_count()? {
            Count::Exact(n) => Ok(n),
            Count::Real(ring) => Err(Error::FractionalRing(ring)),
        }
    }

    /// Network diameter under the analytic model. Trees span 2R between
    /// opposite leaves; the hypertorus value d·k/4 is an average-case figure
    /// that understates the true graph diameter by a factor of two at even k.
    pub fn diameter(&self) -> Result<f64> {
        Ok(match *self {
            TopologySpec::RootedTree { radius, .. } | TopologySpec::CayleyTree { radius, .. } => {
                2.0 * radius as f64
            }
            TopologySpec::Hypercube { dim } => dim as f64,
            TopologySpec::Hypertorus { dim, ring } => dim as f64 * ring / 4.0,
        })
    }

    /// Link count L under the analytic model's bookkeeping: one link per
    /// peer for trees (one more than the built tree's edge count), d·N/2 for
    /// the hypercube, and d·N for the hypertorus. A torus with k = 2 is the
    /// binary hypercube, so its two ring directions collapse to d·N/2.
    pub fn link_count(&self) -> Result<Count> {
        match *self {
            TopologySpec::RootedTree { .. } | TopologySpec::CayleyTree { .. } => self.node_count(),
            TopologySpec::Hypercube { dim } => match self.node_count()? {
                Count::Exact(n) => Ok(Count::Exact(mul(n / 2, dim as u64, "link count")?)),
                Count::Real(_) => unreachable!(),
            },
            TopologySpec::Hypertorus { dim, ring } => match self.node_count()? {
                Count::Exact(n) if ring == 2.0 => {
                    Ok(Count::Exact(mul(n / 2, dim as u64, "link count")?))
                }
                Count::Exact(n) => Ok(Count::Exact(mul(n, dim as u64, "link count")?)),
                Count::Real(n) => Ok(Count::Real(n * dim as f64)),
            },
        }
    }

    /// Internal path length P: the sum over all peers of their hop distance
    /// from the root, in hop·node units. Defined for trees only.
    pub fn internal_path_length(&self) -> Result<u64> {
        let radius = self.tree_radius().ok_or(Error::UnsupportedFamily {
            family: self.family(),
            op: "internal_path_length",
        })?;
        let mut total = 0u64;
        for level in 0..=radius {
            let hops = mul(level, self.level_population(level)?, "internal path length")?;
            total = add(total, hops, "internal path length")?;
        }
        Ok(total)
    }

    /// Mean hop count H between peers, self-pairs included. Trees use the
    /// mean depth from the root, P/N; the hypercube mean Hamming distance is
    /// d/2; the hypertorus is d·k/4, with the exact mean d·(k²−1)/(4k) when
    /// k is an odd integer.
    pub fn avg_hops(&self) -> Result<f64> {
        Ok(match *self {
            TopologySpec::RootedTree { .. } | TopologySpec::CayleyTree { .. } => {
                let p = self.internal_path_length()? as f64;
                let n = self.node_count()?.get();
                p / n
            }
            TopologySpec::Hypercube { dim } => dim as f64 / 2.0,
            TopologySpec::Hypertorus { dim, ring } => {
                let d = dim as f64;
                if ring.fract() == 0.0 && (ring as u64) % 2 == 1 {
                    d * (ring * ring - 1.0) / (4.0 * ring)
                } else {
                    d * ring / 4.0
                }
            }
        })
    }

    /// Links maintained per peer, as counted in the bandwidth comparison:
    /// v for both tree families, d for the hypercube, 2d for the hypertorus.
    pub fn connections_per_peer(&self) -> u64 {
        match *self {
            TopologySpec::RootedTree { branching, .. } => branching,
            TopologySpec::CayleyTree { valence, .. } => valence,
            TopologySpec::Hypercube { dim } => dim as u64,
            TopologySpec::Hypertorus { dim, .. } => 2 * dim as u64,
        }
    }
}

/// The closed-form structural metrics of a topology.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StructuralMetrics {
    /// Peer count N.
    pub n_total: Count,
    /// Analytic network diameter.
    pub diameter: f64,
    /// Analytic link count L.
    pub links: Count,
    /// Sum of root distances P, defined for trees only.
    pub internal_path_length: Option<u64>,
    /// Mean hop count H, self-pairs included.
    pub avg_hops: f64,
}

impl StructuralMetrics {
    /// Evaluate every structural metric of `spec`.
    pub fn compute(spec: &TopologySpec) -> Result<Self> {
        Ok(StructuralMetrics {
            n_total: spec.node_count()?,
            diameter: spec.diameter()?,
            links: spec.link_count()?,
            internal_path_length: if spec.is_tree() {
                Some(spec.internal_path_length()?)
            } else {
                None
            },
            avg_hops: spec.avg_hops()?,
        })
    }
}
