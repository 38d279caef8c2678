//! Unit vectors supported on the exponent bands `Aₖ = {γₖ < p ≤ γₖ₋₁}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::{
    derive_scalars, ExponentSeq, ExponentSpec, RegionFamily, RegionKind, RegionRef, WeightSeq,
};
use crate::ext::Cardinality;
use crate::modular::SimpleFunction;
use crate::norm::norm;

use super::{support_meta, BasisFamily, ConstructionTag};

/// Unit norms of constructed vectors are asserted to this tolerance.
const UNIT_TOL: f64 = 1e-9;

/// A finite strictly decreasing sequence `γ₀ > γ₁ > … > γ_N > 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Gamma(Vec<f64>);

impl TryFrom<Vec<f64>> for Gamma {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Gamma::new(v)
    }
}

impl From<Gamma> for Vec<f64> {
    fn from(g: Gamma) -> Self {
        g.0
    }
}

impl Gamma {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::Parameter("gamma needs at least γ0 and γ1".into()));
        }
        if let Some(bad) = values.iter().find(|g| !(g.is_finite() && **g > 1.0)) {
            return Err(Error::Parameter(format!(
                "gamma values must lie in (1, inf), got {bad}"
            )));
        }
        if let Some(w) = values.windows(2).find(|w| w[1] >= w[0]) {
            return Err(Error::Parameter(format!(
                "gamma must be strictly decreasing, got {} then {}",
                w[0], w[1]
            )));
        }
        Ok(Gamma(values))
    }

    /// `γₖ = 1 + a·rᵏ` for `k = 0..=n`.
    pub fn geometric(a: f64, r: f64, n: usize) -> Result<Self> {
        if !(a > 0.0 && r > 0.0 && r < 1.0) {
            return Err(Error::Parameter(format!(
                "geometric gamma needs a > 0 and r in (0, 1), got a = {a}, r = {r}"
            )));
        }
        Self::new((0..=n).map(|k| 1.0 + a * r.powi(k as i32)).collect())
    }

    /// `γₖ = 1 + a/(k+1)^b` for `k = 0..=n`.
    pub fn harmonic(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::Parameter(format!(
                "harmonic gamma needs a, b > 0, got a = {a}, b = {b}"
            )));
        }
        Self::new(
            (0..=n)
                .map(|k| 1.0 + a / ((k + 1) as f64).powf(b))
                .collect(),
        )
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// Number of bands, `N`.
    pub fn bands(&self) -> usize {
        self.0.len() - 1
    }
}

fn find_in_band(spec: &ExponentSpec, lo: f64, hi: f64) -> Option<RegionRef> {
    let in_band = |p: f64| p > lo && p <= hi;
    if let Some(r) = spec.regions().iter().find(|r| in_band(r.exponent.value())) {
        return Some(RegionRef::region(r.id.clone()));
    }
    spec.families().iter().find_map(|f| {
        f.exponents
            .first_index_in_band(lo, hi, f.count)
            .map(|i| RegionRef::member(f.id.clone(), i))
    })
}

fn assert_unit(fam: &BasisFamily) -> Result<()> {
    for (i, v) in fam.vectors.iter().enumerate() {
        let n = norm(&fam.spec, v)?;
        if (n - 1.0).abs() > UNIT_TOL {
            return Err(Error::Construction(format!(
                "vector {} has norm {n}, expected 1",
                i + 1
            )));
        }
    }
    fam.check_disjoint()
}

/// One unit indicator-shaped vector on a region of each band
/// `(γₖ, γₖ₋₁]`, `k = 1..=N`.
pub fn build_fpp_basis(spec: &ExponentSpec, gamma: &Gamma, n: usize) -> Result<BasisFamily> {
    if n == 0 || n > gamma.bands() {
        return Err(Error::Parameter(format!(
            "need 1 <= N <= {} (bands in gamma), got {n}",
            gamma.bands()
        )));
    }
    let g = gamma.values();
    let mut vectors = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for k in 1..=n {
        let (lo, hi) = (g[k], g[k - 1]);
        let at = find_in_band(spec, lo, hi).ok_or_else(|| {
            Error::Construction(format!("band (γ{k}, γ{}] = ({lo}, {hi}] empty", k - 1))
        })?;
        let reg = spec.resolve(&at)?;
        labels.push(format!("band {k}: ({lo}, {hi}] via {at}"));
        vectors.push(SimpleFunction::indicator(
            at,
            reg.weight.powf(-1.0 / reg.exponent),
        ));
    }
    if derive_scalars(spec).p_minus_off_one != Some(1.0) {
        return Err(Error::Precondition(
            "FPP basis needs p-(Omega \\ p^-1({1})) = 1".into(),
        ));
    }
    let support_meta = vectors
        .iter()
        .zip(labels)
        .map(|(v, l)| support_meta(spec, v, Some(l)))
        .collect::<Result<_>>()?;
    let fam = BasisFamily {
        spec: spec.clone(),
        vectors,
        support_meta,
        construction_tag: ConstructionTag::FppBasis,
        gamma: g[..=n].to_vec(),
    };
    assert_unit(&fam)?;
    Ok(fam)
}

/// Id of the atom family in specs built by [`nakano_basis`].
pub const NAKANO_FAMILY: &str = "p";

/// Standard basis `e₁,…,e_N` of `ℓ^{pₙ}` (unit atoms), with
/// `γ₀ = p₁` and `γₖ = p_{k+1}`.
pub fn nakano_basis(p_seq: &ExponentSeq, n: usize) -> Result<BasisFamily> {
    if n == 0 {
        return Err(Error::Parameter("need N >= 1".into()));
    }
    p_seq.validate(Cardinality::Infinite)?;
    if p_seq.limit() != 1.0 {
        return Err(Error::Precondition(format!(
            "Nakano exponents must tend to 1, limit is {}",
            p_seq.limit()
        )));
    }
    let ps: Vec<f64> = (1..=n as u64 + 1).map(|i| p_seq.value(i)).collect();
    if let Some((i, p)) = ps.iter().enumerate().find(|(_, p)| **p <= 1.0) {
        return Err(Error::Precondition(format!(
            "exponent p{} = {p} is not > 1",
            i + 1
        )));
    }
    if ps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Precondition(
            "Nakano exponents must be strictly decreasing on the truncation".into(),
        ));
    }
    let spec = ExponentSpec::new(
        Vec::new(),
        vec![RegionFamily {
            id: NAKANO_FAMILY.into(),
            kind: RegionKind::Atom,
            weights: WeightSeq::Constant { w: 1.0 },
            exponents: p_seq.clone(),
            count: Cardinality::Infinite,
        }],
    )?;
    let vectors: Vec<SimpleFunction> = (1..=n as u64)
        .map(|i| SimpleFunction::indicator(RegionRef::member(NAKANO_FAMILY, i), 1.0))
        .collect();
    let support_meta = vectors
        .iter()
        .map(|v| support_meta(&spec, v, None))
        .collect::<Result<_>>()?;
    let fam = BasisFamily {
        spec,
        vectors,
        support_meta,
        construction_tag: ConstructionTag::Nakano,
        gamma: ps,
    };
    assert_unit(&fam)?;
    Ok(fam)
}
