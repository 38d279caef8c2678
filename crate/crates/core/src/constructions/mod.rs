//! Finite truncations of the extremal constructions and sampled certificate
//! checks on them.
//!
//! Certificates quantify over infinitely many inputs in their mathematical
//! form; here every universal statement is checked on seeded samples and the
//! report says so.

mod aic;
mod fpp;
mod linfty;
mod nic;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::exponent::{ExponentSpec, RegionRef};
use crate::ext;
use crate::modular::{Profile, SimpleFunction};
use crate::norm::{profile_norm, DEFAULT_TOL};

pub use aic::{aic_refutation, aic_test, h, h_inverse, EpsLadder};
pub use fpp::{build_fpp_basis, nakano_basis, Gamma};
pub use linfty::{build_linfty_copy, verify_linfty_isometry, LINFTY_EXPONENT_FLOOR};
pub use nic::{
    check_fk_bound, check_premonotone, check_sequential_separation, fk_ladder, separation_ladder,
    separation_threshold, FkLadder, SeparationLadder,
};

/// Tolerance used for certificate margins unless overridden.
pub const CERT_TOL: f64 = 1e-9;
pub const DEFAULT_SAMPLES: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstructionTag {
    LinftyCopy,
    FppBasis,
    Nakano,
    User,
}

/// Where one basis vector lives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportMeta {
    pub regions: Vec<RegionRef>,
    #[serde(with = "ext::real")]
    pub p_minus: f64,
    #[serde(with = "ext::real")]
    pub p_plus: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

/// A finite sequence `f₁,…,f_N` of pairwise disjoint simple functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisFamily {
    pub spec: ExponentSpec,
    pub vectors: Vec<SimpleFunction>,
    pub support_meta: Vec<SupportMeta>,
    pub construction_tag: ConstructionTag,
    /// `γ₀ > γ₁ > … > γ_N` for the FPP and Nakano bases.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub gamma: Vec<f64>,
}

impl BasisFamily {
    /// Wrap user-supplied disjoint vectors.
    pub fn user(spec: ExponentSpec, vectors: Vec<SimpleFunction>) -> Result<Self> {
        let metas = vectors
            .iter()
            .map(|v| support_meta(&spec, v, None))
            .collect::<Result<_>>()?;
        let fam = BasisFamily {
            spec,
            vectors,
            support_meta: metas,
            construction_tag: ConstructionTag::User,
            gamma: Vec::new(),
        };
        fam.check_disjoint()?;
        Ok(fam)
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Vector `i` (1-based).
    pub fn vector(&self, i: usize) -> &SimpleFunction {
        &self.vectors[i - 1]
    }

    /// `Σ c_i f_i` over `(index, coefficient)` pairs with 1-based indices.
    pub fn combination(&self, coeffs: &[(usize, f64)]) -> SimpleFunction {
        coeffs.iter().fold(SimpleFunction::zero(), |acc, &(i, c)| {
            acc.lincomb(1.0, self.vector(i), c)
        })
    }

    pub(crate) fn check_disjoint(&self) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        for (i, v) in self.vectors.iter().enumerate() {
            for r in v.support() {
                if !seen.insert(r) {
                    return Err(Error::Construction(format!(
                        "vector {} overlaps an earlier vector on {r}",
                        i + 1
                    )));
                }
            }
        }
        Ok(())
    }

    pub(crate) fn require_tag(&self, allowed: &[ConstructionTag], what: &str) -> Result<()> {
        if allowed.contains(&self.construction_tag) {
            Ok(())
        } else {
            Err(Error::Precondition(format!(
                "{what} applies to {allowed:?} families, got {:?}",
                self.construction_tag
            )))
        }
    }

    pub(crate) fn coords(&self) -> Result<Coords> {
        Ok(Coords {
            per: self
                .vectors
                .iter()
                .map(|v| Profile::new(&self.spec, v))
                .collect::<Result<_>>()?,
        })
    }
}

pub(crate) fn support_meta(
    spec: &ExponentSpec,
    v: &SimpleFunction,
    label: Option<String>,
) -> Result<SupportMeta> {
    let (mut lo, mut hi) = (f64::INFINITY, 1.0f64);
    for r in v.support() {
        let p = spec.resolve(r)?.exponent;
        lo = lo.min(p);
        hi = hi.max(p);
    }
    if v.is_zero() {
        lo = 1.0;
    }
    Ok(SupportMeta {
        regions: v.support().cloned().collect(),
        p_minus: lo,
        p_plus: hi,
        label,
    })
}

/// Resolved basis vectors for fast norms of disjoint combinations.
pub(crate) struct Coords {
    per: Vec<Profile>,
}

impl Coords {
    /// `‖Σ c_i f_i‖` with 1-based indices.
    pub fn norm(&self, coeffs: &[(usize, f64)]) -> f64 {
        let mut prof = Profile::default();
        for &(i, c) in coeffs {
            let p = &self.per[i - 1];
            let a = c.abs();
            prof.finite
                .extend(p.finite.iter().map(|&(w, e, v)| (w, e, a * v)));
            prof.finite.retain(|t| t.2 != 0.0);
            prof.sup = prof.sup.max(a * p.sup);
        }
        profile_norm(&prof, DEFAULT_TOL)
            .expect("bracketing a finite simple function cannot fail")
            .norm
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    SequentialSeparation,
    Premonotone,
    FkBound,
    AicTest,
    AicRefutation,
    LinftyIsometry,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Evidence {
    /// Checked on seeded samples of an infinite family of inputs.
    Sampled,
    /// Checked on every input the statement quantifies over.
    Exhaustive,
}

/// Result of a certificate check. `pass ⇔ worst_margin ≥ −tol`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub property: Property,
    pub evidence: Evidence,
    pub pass: bool,
    pub samples: usize,
    #[serde(with = "ext::real")]
    pub worst_margin: f64,
    pub tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub parameters: Map<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

impl CertificateReport {
    pub(crate) fn new(property: Property, evidence: Evidence, tol: f64) -> Self {
        CertificateReport {
            property,
            evidence,
            pass: true,
            samples: 0,
            worst_margin: f64::INFINITY,
            tol,
            seed: None,
            parameters: Map::new(),
            witness: None,
        }
    }

    pub(crate) fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub(crate) fn param(&mut self, key: &str, v: impl Serialize) {
        self.parameters.insert(
            key.to_string(),
            serde_json::to_value(v).expect("parameters are plain data"),
        );
    }

    /// Record one checked instance; the first failing instance becomes the
    /// witness.
    pub(crate) fn record(&mut self, margin: f64, witness: impl FnOnce() -> Value) {
        self.samples += 1;
        if margin < self.worst_margin || margin.is_nan() {
            self.worst_margin = if margin.is_nan() { f64::MIN } else { margin };
        }
        if (margin.is_nan() || margin < -self.tol) && self.witness.is_none() {
            self.witness = Some(witness());
        }
        self.pass = self.worst_margin >= -self.tol;
    }
}

/// Sampling controls shared by every certificate check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sampling {
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling {
            samples: DEFAULT_SAMPLES,
            seed: 0,
            tol: CERT_TOL,
        }
    }
}

/// `(index, coefficient)` pairs as JSON for witnesses.
pub(crate) fn coeffs_json(c: &[(usize, f64)]) -> Value {
    Value::Array(
        c.iter()
            .map(|&(i, v)| serde_json::json!({ "index": i, "coeff": v }))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponent::Region;

    #[test]
    fn user_family_rejects_overlap() {
        let spec = ExponentSpec::from_regions(vec![
            Region::atom("a", 1.0, 2.0).unwrap(),
            Region::atom("b", 1.0, 3.0).unwrap(),
        ])
        .unwrap();
        let a = SimpleFunction::indicator(RegionRef::region("a"), 1.0);
        let b = SimpleFunction::indicator(RegionRef::region("b"), 1.0);
        let fam = BasisFamily::user(spec.clone(), vec![a.clone(), b]).unwrap();
        assert_eq!(fam.support_meta[1].p_minus, 3.0);
        assert!(BasisFamily::user(spec, vec![a.clone(), a]).is_err());
    }

    #[test]
    fn report_pass_tracks_margin() {
        let mut r = CertificateReport::new(Property::Premonotone, Evidence::Sampled, 1e-9);
        r.record(0.5, || Value::Null);
        r.record(-1e-10, || Value::Null);
        assert!(r.pass && r.witness.is_none());
        r.record(-1e-3, || Value::String("bad".into()));
        assert!(!r.pass);
        assert_eq!(r.witness, Some(Value::String("bad".into())));
        assert_eq!(r.samples, 3);
    }
}
