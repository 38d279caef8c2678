//! The Luxemburg norm `‖f‖ = inf{α > 0 : ρ(f/α) ≤ 1}`.
//!
//! `α ↦ ρ(f/α)` is continuous and nonincreasing, so bisection on a bracket
//! `ρ(f/lo) > 1 ≥ ρ(f/hi)` converges, and returning `hi` certifies
//! `ρ(f/‖f‖) ≤ 1`.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::{derive_scalars, ExponentSpec};
use crate::modular::{le_tol, Profile, SimpleFunction};

pub const DEFAULT_TOL: f64 = 1e-12;
/// Largest accepted relative tolerance.
pub const MAX_TOL: f64 = 1e-3;
/// Bracket expansions allowed before giving up.
pub const MAX_EXPANSIONS: usize = 2048;

/// Why the norm was decided without an interior crossing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    ZeroFunction,
    /// Support lies in `p⁻¹(∞)`: the norm is `sup |f|`.
    SupDominated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormResult {
    pub norm: f64,
    pub iterations: usize,
    pub bracket: (f64, f64),
    /// `|ρ(f/norm) − 1|`.
    pub residual: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<Boundary>,
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol <= MAX_TOL {
        Ok(())
    } else {
        Err(Error::Parameter(format!(
            "tolerance must lie in (0, {MAX_TOL}], got {tol}"
        )))
    }
}

/// Bisection on a resolved profile; `tol` is assumed already checked.
pub(crate) fn profile_norm(prof: &Profile, tol: f64) -> Result<NormResult> {
    if prof.is_zero() {
        return Ok(NormResult {
            norm: 0.0,
            iterations: 0,
            bracket: (0.0, 0.0),
            residual: 0.0,
            boundary: Some(Boundary::ZeroFunction),
        });
    }
    if prof.finite.is_empty() {
        return Ok(NormResult {
            norm: prof.sup,
            iterations: 0,
            bracket: (prof.sup, prof.sup),
            residual: 0.0,
            boundary: Some(Boundary::SupDominated),
        });
    }

    // ‖f‖ lies between the largest single-term norm and the sum of all
    // single-term norms (lattice monotonicity and the triangle inequality).
    let singles = prof
        .finite
        .iter()
        .map(|&(w, p, a)| if p == 1.0 { w * a } else { w.powf(1.0 / p) * a })
        .chain(std::iter::once(prof.sup));
    let (mut max, mut sum) = (0.0f64, 0.0);
    for s in singles {
        max = max.max(s);
        sum += s;
    }
    let (mut lo, mut hi) = (max / 2.0, sum.max(max));
    let mut expansions = 0;
    // NaN counts as "not yet bracketed" in both loops
    while prof.rho_over(lo).partial_cmp(&1.0) != Some(Ordering::Greater) {
        lo /= 2.0;
        expansions += 1;
        if expansions > MAX_EXPANSIONS || lo == 0.0 {
            return Err(Error::Bracketing {
                iterations: expansions,
            });
        }
    }
    while !matches!(
        prof.rho_over(hi).partial_cmp(&1.0),
        Some(Ordering::Less | Ordering::Equal)
    ) {
        hi *= 2.0;
        expansions += 1;
        if expansions > MAX_EXPANSIONS || hi.is_infinite() {
            return Err(Error::Bracketing {
                iterations: expansions,
            });
        }
    }

    let mut iterations = expansions;
    while hi / lo - 1.0 > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if prof.rho_over(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    Ok(NormResult {
        norm: hi,
        iterations,
        bracket: (lo, hi),
        residual: (prof.rho_over(hi) - 1.0).abs(),
        boundary: None,
    })
}

/// Luxemburg norm of `f` to relative tolerance `tol ∈ (0, 1e-3]`.
pub fn luxemburg_norm(spec: &ExponentSpec, f: &SimpleFunction, tol: f64) -> Result<NormResult> {
    check_tol(tol)?;
    profile_norm(&Profile::new(spec, f)?, tol)
}

/// `‖f‖` at [`DEFAULT_TOL`].
pub fn norm(spec: &ExponentSpec, f: &SimpleFunction) -> Result<f64> {
    Ok(luxemburg_norm(spec, f, DEFAULT_TOL)?.norm)
}

/// `f / ‖f‖`.
pub fn normalize(spec: &ExponentSpec, f: &SimpleFunction) -> Result<SimpleFunction> {
    let n = norm(spec, f)?;
    if n == 0.0 {
        return Err(Error::Precondition(
            "cannot normalize the zero function".into(),
        ));
    }
    Ok(f.scale(1.0 / n))
}

/// Evidence for the norm–modular relations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BridgeReport {
    pub norm: f64,
    pub rho: f64,
    pub rho_at_norm: f64,
    pub tol: f64,
    /// `ρ(f/‖f‖) ≤ 1 + tol`.
    pub unit_modular_ok: bool,
    /// `‖f‖ ≤ ρ(f)(1 + tol)`, present when `‖f‖ ≥ 1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm_below_modular_ok: Option<bool>,
    /// Tolerance on `|ρ(f) − 1|` implied by `|‖f‖ − 1| ≤ tol`, present
    /// when `p₊(Ω_f) < ∞`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit_sphere_tol: Option<f64>,
    /// Both directions of the unit-sphere equivalence, when applicable.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit_sphere_ok: Option<bool>,
}

impl BridgeReport {
    pub fn ok(&self) -> bool {
        self.unit_modular_ok
            && self.norm_below_modular_ok.unwrap_or(true)
            && self.unit_sphere_ok.unwrap_or(true)
    }
}

/// Check `ρ(f/‖f‖) ≤ 1`, `‖f‖ ≤ ρ(f)` when `‖f‖ ≥ 1`, and (for bounded
/// finite exponents) `|‖f‖ − 1| ≤ tol ⇔ |ρ(f) − 1| ≤ tol′`.
pub fn norm_modular_bridge_check(
    spec: &ExponentSpec,
    f: &SimpleFunction,
    tol: f64,
) -> Result<BridgeReport> {
    if f.is_zero() {
        return Err(Error::Precondition("bridge check needs f != 0".into()));
    }
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::Parameter(format!(
            "tolerance must lie in (0, 1), got {tol}"
        )));
    }
    let prof = Profile::new(spec, f)?;
    let n = profile_norm(&prof, DEFAULT_TOL)?.norm;
    let r = prof.rho();
    let at_norm = prof.rho_over(n);
    let slack = 4.0 * DEFAULT_TOL;

    let pp = derive_scalars(spec).p_plus_finite_part.unwrap_or(1.0);
    let (unit_sphere_tol, unit_sphere_ok) = if pp.is_finite() {
        // ρ(f) lies between ‖f‖ and ‖f‖^{p₊} on either side of the sphere
        let tp = ((1.0 + tol).powf(pp) - 1.0).max(1.0 - (1.0 - tol).powf(pp));
        let near_norm = (n - 1.0).abs() <= tol;
        let forward = !near_norm || (r - 1.0).abs() <= tp * (1.0 + slack) + slack;
        let backward = (r - 1.0).abs() > tol || (n - 1.0).abs() <= tol + slack;
        (Some(tp), Some(forward && backward))
    } else {
        (None, None)
    };

    Ok(BridgeReport {
        norm: n,
        rho: r,
        rho_at_norm: at_norm,
        tol,
        unit_modular_ok: at_norm <= 1.0 + tol,
        norm_below_modular_ok: (n >= 1.0).then(|| le_tol(n, r * (1.0 + tol), DEFAULT_TOL)),
        unit_sphere_tol,
        unit_sphere_ok,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisjointSumBound {
    pub n: usize,
    /// `P₊ = p₊(Ω_f)`.
    pub p_plus: f64,
    /// `n^{1/P₊}`.
    pub bound: f64,
    /// `‖Σ gᵢ‖`.
    pub actual: f64,
    pub ok: bool,
}

/// For disjoint unit vectors `g₁,…,gₙ` on finite exponents, compare
/// `‖Σ gᵢ‖` with `n^{1/p₊(Ω_f)}`.
pub fn disjoint_sum_lower_bound(
    spec: &ExponentSpec,
    gs: &[SimpleFunction],
    tol: f64,
) -> Result<DisjointSumBound> {
    if gs.is_empty() {
        return Err(Error::Parameter("need at least one function".into()));
    }
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::Parameter(format!(
            "tolerance must lie in (0, 1), got {tol}"
        )));
    }
    let pp = derive_scalars(spec)
        .p_plus_finite_part
        .ok_or_else(|| Error::Precondition("spec has no finite-exponent part".into()))?;
    if pp.is_infinite() {
        return Err(Error::Precondition(
            "disjoint-sum bound needs p+(Omega_f) < inf".into(),
        ));
    }
    let mut sum = SimpleFunction::zero();
    for (i, g) in gs.iter().enumerate() {
        if !sum.is_disjoint_from(g) {
            return Err(Error::Precondition(format!(
                "function {i} overlaps an earlier one"
            )));
        }
        for r in g.support() {
            if spec.resolve(r)?.exponent.is_infinite() {
                return Err(Error::Precondition(format!(
                    "function {i} is supported on {r} where p = inf"
                )));
            }
        }
        let n = norm(spec, g)?;
        if (n - 1.0).abs() > tol {
            return Err(Error::Precondition(format!(
                "function {i} is not normalized: norm {n}"
            )));
        }
        sum = sum.add(g);
    }
    let bound = (gs.len() as f64).powf(1.0 / pp);
    let actual = norm(spec, &sum)?;
    Ok(DisjointSumBound {
        n: gs.len(),
        p_plus: pp,
        bound,
        actual,
        ok: actual >= bound * (1.0 - tol),
    })
}
