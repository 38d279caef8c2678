//! Finite descriptions of σ-finite measure spaces carrying an exponent
//! function, and the predicates decided from them.
//!
//! A space is a disjoint union of single [`Region`]s and closed-form
//! [`RegionFamily`]s. Each region is either an atom or a nonatomic cell on
//! which `p(·)` is constant, so everything downstream is an exact finite sum.

mod classify;
mod scalars;
mod sequence;

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ext::Cardinality;

pub use classify::{classify, classify_scalars, ClassificationFlags, ClassificationReport};
pub use scalars::{derive_scalars, DerivedScalars, OneInftyStructure};
pub(crate) use sequence::Piece;
pub use sequence::{ExponentSeq, WeightSeq};

/// A value of the exponent function, in `[1, +∞]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "ExponentRepr", into = "ExponentRepr")]
pub struct Exponent(f64);

#[derive(Serialize, Deserialize)]
#[serde(transparent)]
struct ExponentRepr(#[serde(with = "crate::ext::real")] f64);

impl TryFrom<ExponentRepr> for Exponent {
    type Error = Error;

    fn try_from(r: ExponentRepr) -> Result<Self> {
        Exponent::new(r.0)
    }
}

impl From<Exponent> for ExponentRepr {
    fn from(e: Exponent) -> Self {
        ExponentRepr(e.0)
    }
}

impl Exponent {
    pub const ONE: Exponent = Exponent(1.0);
    pub const INFINITY: Exponent = Exponent(f64::INFINITY);

    pub fn new(p: f64) -> Result<Self> {
        if p >= 1.0 {
            Ok(Exponent(p))
        } else {
            Err(Error::Validation(format!("exponent must be >= 1, got {p}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionKind {
    Atom,
    Nonatomic,
}

/// A measurable set of positive measure on which `p` is constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Region {
    pub id: String,
    pub kind: RegionKind,
    pub weight: f64,
    pub exponent: Exponent,
}

impl Region {
    pub fn atom(id: impl Into<String>, weight: f64, exponent: f64) -> Result<Self> {
        Ok(Region {
            id: id.into(),
            kind: RegionKind::Atom,
            weight,
            exponent: Exponent::new(exponent)?,
        })
    }

    pub fn cell(id: impl Into<String>, weight: f64, exponent: f64) -> Result<Self> {
        Ok(Region {
            id: id.into(),
            kind: RegionKind::Nonatomic,
            weight,
            exponent: Exponent::new(exponent)?,
        })
    }
}

/// A finite or countable family of pairwise disjoint regions of one kind,
/// with closed-form weights and exponents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionFamily {
    pub id: String,
    pub kind: RegionKind,
    pub weights: WeightSeq,
    pub exponents: ExponentSeq,
    pub count: Cardinality,
}

impl RegionFamily {
    pub(crate) fn pieces(&self) -> Vec<Piece> {
        self.exponents.pieces(self.count)
    }

    pub fn contains_index(&self, n: u64) -> bool {
        n >= 1
            && match self.count {
                Cardinality::Finite(c) => n <= c,
                Cardinality::Infinite => true,
            }
    }
}

/// Reference to a single region, or to member `index` of a family.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionRef {
    pub region_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<u64>,
}

impl RegionRef {
    pub fn region(id: impl Into<String>) -> Self {
        RegionRef {
            region_id: id.into(),
            index: None,
        }
    }

    pub fn member(id: impl Into<String>, index: u64) -> Self {
        RegionRef {
            region_id: id.into(),
            index: Some(index),
        }
    }
}

impl fmt::Display for RegionRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.index {
            Some(i) => write!(f, "{}[{}]", self.region_id, i),
            None => f.write_str(&self.region_id),
        }
    }
}

/// Measure-theoretic data of a resolved region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolvedRegion {
    pub kind: RegionKind,
    pub weight: f64,
    pub exponent: f64,
}

/// A validated description of `(Ω, Σ, μ, p)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpecRepr", into = "SpecRepr")]
pub struct ExponentSpec {
    regions: Vec<Region>,
    families: Vec<RegionFamily>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecRepr {
    #[serde(default)]
    regions: Vec<Region>,
    #[serde(default)]
    families: Vec<RegionFamily>,
}

impl TryFrom<SpecRepr> for ExponentSpec {
    type Error = Error;

    fn try_from(r: SpecRepr) -> Result<Self> {
        ExponentSpec::new(r.regions, r.families)
    }
}

impl From<ExponentSpec> for SpecRepr {
    fn from(s: ExponentSpec) -> Self {
        SpecRepr {
            regions: s.regions,
            families: s.families,
        }
    }
}

impl ExponentSpec {
    pub fn new(regions: Vec<Region>, families: Vec<RegionFamily>) -> Result<Self> {
        let spec = ExponentSpec { regions, families };
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_regions(regions: Vec<Region>) -> Result<Self> {
        Self::new(regions, Vec::new())
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serialization is infallible")
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn families(&self) -> &[RegionFamily] {
        &self.families
    }

    pub fn family(&self, id: &str) -> Option<&RegionFamily> {
        self.families.iter().find(|f| f.id == id)
    }

    /// A copy of this spec with extra regions appended.
    pub fn with_regions(&self, extra: impl IntoIterator<Item = Region>) -> Result<Self> {
        let mut regions = self.regions.clone();
        regions.extend(extra);
        Self::new(regions, self.families.clone())
    }

    fn validate(&self) -> Result<()> {
        if self.regions.is_empty() && self.families.is_empty() {
            return Err(Error::Validation("spec describes an empty space".into()));
        }
        let mut ids = HashSet::new();
        for id in self
            .regions
            .iter()
            .map(|r| &r.id)
            .chain(self.families.iter().map(|f| &f.id))
        {
            if id.is_empty() {
                return Err(Error::Validation("region ids must be non-empty".into()));
            }
            if !ids.insert(id.as_str()) {
                return Err(Error::Validation(format!("duplicate region id '{id}'")));
            }
        }
        for r in &self.regions {
            if !(r.weight.is_finite() && r.weight > 0.0) {
                return Err(Error::Validation(format!(
                    "region '{}' must have positive finite weight, got {}",
                    r.id, r.weight
                )));
            }
        }
        for f in &self.families {
            if f.count.is_zero() {
                return Err(Error::Validation(format!("family '{}' is empty", f.id)));
            }
            f.weights
                .validate(f.count)
                .and_then(|_| f.exponents.validate(f.count))
                .map_err(|e| match e {
                    Error::Validation(m) => Error::Validation(format!("family '{}': {m}", f.id)),
                    other => other,
                })?;
        }
        Ok(())
    }

    /// Look up the kind, weight and exponent of a referenced region.
    pub fn resolve(&self, r: &RegionRef) -> Result<ResolvedRegion> {
        if let Some(region) = self.regions.iter().find(|x| x.id == r.region_id) {
            if r.index.is_some() {
                return Err(Error::Reference(format!(
                    "'{}' is a single region and takes no index",
                    r.region_id
                )));
            }
            return Ok(ResolvedRegion {
                kind: region.kind,
                weight: region.weight,
                exponent: region.exponent.value(),
            });
        }
        let fam = self
            .family(&r.region_id)
            .ok_or_else(|| Error::Reference(format!("no region or family '{}'", r.region_id)))?;
        let n = r.index.ok_or_else(|| {
            Error::Reference(format!("family '{}' requires a member index", r.region_id))
        })?;
        if !fam.contains_index(n) {
            return Err(Error::Reference(format!(
                "member {n} out of range for family '{}' (count {})",
                fam.id, fam.count
            )));
        }
        let weight = fam.weights.weight(n);
        if !(weight > 0.0 && weight.is_finite()) {
            return Err(Error::Reference(format!(
                "weight of {r} is not representable ({weight})"
            )));
        }
        Ok(ResolvedRegion {
            kind: fam.kind,
            weight,
            exponent: fam.exponents.value(n),
        })
    }
}
