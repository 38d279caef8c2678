//! Simple functions and the modular
//! `ρ(g) = ∫_{Ω_f} |g|^{p} dμ + esssup_{p⁻¹(∞)} |g|`.
//!
//! A simple function is constant on each referenced region, so every
//! integral here is a finite sum and the only error source is rounding.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::{derive_scalars, ExponentSpec, RegionRef};
use crate::ext;

/// Relative tolerance for floating-point comparisons of modular values.
pub const REL_TOL: f64 = 1e-12;
/// Absolute floor added to every tolerance comparison.
pub const ABS_FLOOR: f64 = 1e-300;

/// `lhs ≤ rhs` up to relative tolerance `rel` with an absolute floor.
pub fn le_tol(lhs: f64, rhs: f64, rel: f64) -> bool {
    lhs <= rhs || lhs - rhs <= rel * lhs.abs().max(rhs.abs()) + ABS_FLOOR
}

/// One `(region, value)` pair of a simple function, as written in JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub region_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<u64>,
    pub value: f64,
}

impl Term {
    pub fn new(at: RegionRef, value: f64) -> Self {
        Term {
            region_id: at.region_id,
            index: at.index,
            value,
        }
    }

    pub fn region(&self) -> RegionRef {
        RegionRef {
            region_id: self.region_id.clone(),
            index: self.index,
        }
    }
}

/// A finitely supported function, constant on each referenced region.
///
/// Terms are kept sorted by region reference with zero values removed, so
/// the empty function is the zero function and equality is structural.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Term>", into = "Vec<Term>")]
pub struct SimpleFunction {
    terms: BTreeMap<RegionRef, f64>,
}

impl TryFrom<Vec<Term>> for SimpleFunction {
    type Error = Error;

    fn try_from(terms: Vec<Term>) -> Result<Self> {
        SimpleFunction::new(terms.into_iter().map(|t| (t.region(), t.value)))
    }
}

impl From<SimpleFunction> for Vec<Term> {
    fn from(f: SimpleFunction) -> Self {
        f.terms.into_iter().map(|(r, v)| Term::new(r, v)).collect()
    }
}

impl SimpleFunction {
    /// Build from `(region, value)` pairs; region references must be distinct
    /// and values finite.
    pub fn new(terms: impl IntoIterator<Item = (RegionRef, f64)>) -> Result<Self> {
        let mut out = BTreeMap::new();
        for (r, v) in terms {
            if !v.is_finite() {
                return Err(Error::Validation(format!(
                    "value on {r} is not finite: {v}"
                )));
            }
            if out.contains_key(&r) {
                return Err(Error::Validation(format!("region {r} referenced twice")));
            }
            out.insert(r, v);
        }
        out.retain(|_, v| *v != 0.0);
        Ok(SimpleFunction { terms: out })
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// `value · χ_region`.
    pub fn indicator(at: RegionRef, value: f64) -> Self {
        Self::new([(at, value)]).expect("a single finite term is valid")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in region order.
    pub fn iter(&self) -> impl Iterator<Item = (&RegionRef, f64)> {
        self.terms.iter().map(|(r, v)| (r, *v))
    }

    pub fn support(&self) -> impl Iterator<Item = &RegionRef> {
        self.terms.keys()
    }

    pub fn value_at(&self, r: &RegionRef) -> f64 {
        self.terms.get(r).copied().unwrap_or(0.0)
    }

    pub fn is_disjoint_from(&self, other: &SimpleFunction) -> bool {
        self.terms.keys().all(|r| !other.terms.contains_key(r))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> SimpleFunction {
        let mut terms: BTreeMap<_, _> =
            self.terms.iter().map(|(r, v)| (r.clone(), f(*v))).collect();
        terms.retain(|_, v| *v != 0.0);
        SimpleFunction { terms }
    }

    pub fn scale(&self, a: f64) -> SimpleFunction {
        self.map(|v| a * v)
    }

    pub fn abs(&self) -> SimpleFunction {
        self.map(f64::abs)
    }

    /// `a·self + b·other`.
    pub fn lincomb(&self, a: f64, other: &SimpleFunction, b: f64) -> SimpleFunction {
        let mut terms: BTreeMap<RegionRef, f64> =
            self.terms.iter().map(|(r, v)| (r.clone(), a * v)).collect();
        for (r, v) in &other.terms {
            *terms.entry(r.clone()).or_insert(0.0) += b * v;
        }
        terms.retain(|_, v| *v != 0.0);
        SimpleFunction { terms }
    }

    pub fn add(&self, other: &SimpleFunction) -> SimpleFunction {
        self.lincomb(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &SimpleFunction) -> SimpleFunction {
        self.lincomb(1.0, other, -1.0)
    }

    /// Keep only the terms whose region satisfies `keep`.
    pub fn restrict(&self, keep: impl Fn(&RegionRef) -> bool) -> SimpleFunction {
        SimpleFunction {
            terms: self
                .terms
                .iter()
                .filter(|(r, _)| keep(r))
                .map(|(r, v)| (r.clone(), *v))
                .collect(),
        }
    }
}

impl fmt::Display for SimpleFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (r, v)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{r}: {v}")?;
        }
        f.write_str("}")
    }
}

/// A value in `[0, +∞]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExtendedNonneg(#[serde(with = "ext::real")] f64);

impl ExtendedNonneg {
    pub const ZERO: ExtendedNonneg = ExtendedNonneg(0.0);
    pub const INFINITY: ExtendedNonneg = ExtendedNonneg(f64::INFINITY);

    pub fn new(v: f64) -> Result<Self> {
        if v >= 0.0 {
            Ok(ExtendedNonneg(v))
        } else {
            Err(Error::Validation(format!(
                "expected a value in [0, inf], got {v}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }
}

impl fmt::Display for ExtendedNonneg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// `w · |v|^p` with `0^p = 0` and no power call at `p = 1`.
pub(crate) fn power_term(weight: f64, abs_value: f64, p: f64) -> f64 {
    if abs_value == 0.0 {
        0.0
    } else if p == 1.0 {
        weight * abs_value
    } else {
        weight * abs_value.powf(p)
    }
}

/// A simple function resolved against a spec: `(weight, exponent, |value|)`
/// for the finite-exponent terms and the largest `|value|` on `p = ∞`.
#[derive(Debug, Clone, Default)]
pub(crate) struct Profile {
    pub finite: Vec<(f64, f64, f64)>,
    pub sup: f64,
}

impl Profile {
    pub fn new(spec: &ExponentSpec, f: &SimpleFunction) -> Result<Self> {
        let mut out = Profile::default();
        for (r, v) in f.iter() {
            let reg = spec.resolve(r)?;
            if reg.exponent.is_infinite() {
                out.sup = out.sup.max(v.abs());
            } else {
                out.finite.push((reg.weight, reg.exponent, v.abs()));
            }
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.finite.is_empty() && self.sup == 0.0
    }

    /// `ρ(f / α)`.
    pub fn rho_over(&self, alpha: f64) -> f64 {
        let integral: f64 = self
            .finite
            .iter()
            .map(|&(w, p, a)| power_term(w, a / alpha, p))
            .sum();
        integral + self.sup / alpha
    }

    pub fn rho(&self) -> f64 {
        self.rho_over(1.0)
    }
}

/// The modular of `f`.
pub fn rho(spec: &ExponentSpec, f: &SimpleFunction) -> Result<ExtendedNonneg> {
    Ok(ExtendedNonneg(Profile::new(spec, f)?.rho()))
}

/// Both sides of the scaling chain for `ρ(a f)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingCheck {
    pub a: f64,
    /// `p₊(Ω_f)` used as the upper exponent.
    pub p_plus_finite_part: f64,
    /// `a·ρ(f)` for `a ≥ 1`, `a^{p₊}·ρ(f)` for `a < 1`.
    #[serde(with = "ext::real")]
    pub lower: f64,
    #[serde(with = "ext::real")]
    pub middle: f64,
    /// `a^{p₊}·ρ(f)` for `a ≥ 1`, `a·ρ(f)` for `a < 1`.
    #[serde(with = "ext::real")]
    pub upper: f64,
    pub lower_ok: bool,
    pub upper_ok: bool,
}

/// Evaluate `aρ(f) ≤ ρ(af) ≤ a^{p₊(Ω_f)}ρ(f)` (for `a ≥ 1`) or the reversed
/// chain (for `0 < a < 1`).
pub fn scaling_bounds_check(
    spec: &ExponentSpec,
    f: &SimpleFunction,
    a: f64,
) -> Result<ScalingCheck> {
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::Parameter(format!(
            "scaling factor must be positive, got {a}"
        )));
    }
    // with no finite-exponent part only the homogeneous sup term remains
    let pp = derive_scalars(spec).p_plus_finite_part.unwrap_or(1.0);
    if pp.is_infinite() {
        return Err(Error::Precondition(
            "scaling bounds need p+(Omega_f) < inf".into(),
        ));
    }
    let prof = Profile::new(spec, f)?;
    let base = prof.rho();
    let middle = prof.rho_over(1.0 / a);
    let (small, large) = (a * base, a.powf(pp) * base);
    let (lower, upper) = if a >= 1.0 {
        (small, large)
    } else {
        (large, small)
    };
    Ok(ScalingCheck {
        a,
        p_plus_finite_part: pp,
        lower,
        middle,
        upper,
        lower_ok: le_tol(lower, middle, REL_TOL),
        upper_ok: le_tol(middle, upper, REL_TOL),
    })
}

/// `∫ |x−u|^p + |x−v|^p − 2|x−(u+v)/2|^p dμ`, each region's contribution
/// clamped at zero against rounding.
pub fn convexity_defect(
    spec: &ExponentSpec,
    u: &SimpleFunction,
    v: &SimpleFunction,
    x: &SimpleFunction,
) -> Result<f64> {
    let mut support: Vec<&RegionRef> = u.support().chain(v.support()).chain(x.support()).collect();
    support.sort();
    support.dedup();
    let mut total = 0.0;
    for r in support {
        let reg = spec.resolve(r)?;
        if reg.exponent.is_infinite() {
            return Err(Error::UnsupportedDomain(format!(
                "region {r} has p = inf; the defect needs finite exponents"
            )));
        }
        let (xu, xv) = (x.value_at(r) - u.value_at(r), x.value_at(r) - v.value_at(r));
        let mid = x.value_at(r) - 0.5 * (u.value_at(r) + v.value_at(r));
        let p = reg.exponent;
        let d = power_term(reg.weight, xu.abs(), p) + power_term(reg.weight, xv.abs(), p)
            - 2.0 * power_term(reg.weight, mid.abs(), p);
        total += d.max(0.0);
    }
    Ok(total)
}
