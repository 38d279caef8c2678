//! Asymptotically isometric copies of ℓ₁: a sampled tester of
//! `Σ(1−εₙ)|tₙ| ≤ ‖Σ tₙ zₙ‖ ≤ Σ|tₙ|`, and the refutation for disjoint unit
//! vectors with `p₋(supp f₁) > 1` through `h(t) = t^{p₁−1}(t − 1)`.

use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::exponent::ExponentSpec;
use crate::modular::{Profile, SimpleFunction};
use crate::norm::{profile_norm, DEFAULT_TOL};
use crate::rng::{self, Pattern};

use super::{coeffs_json, BasisFamily, CertificateReport, Evidence, Property, Sampling};

/// `εₙ = c·n^{−q}` with `c ∈ [0, 1)` and `q > 1`, so `n·εₙ → 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EpsLadder {
    Power { c: f64, q: f64 },
}

impl EpsLadder {
    pub fn power(c: f64, q: f64) -> Result<Self> {
        let l = EpsLadder::Power { c, q };
        l.validate()?;
        Ok(l)
    }

    pub fn validate(&self) -> Result<()> {
        let EpsLadder::Power { c, q } = *self;
        if !(0.0..1.0).contains(&c) || !(q > 1.0 && q.is_finite()) {
            return Err(Error::Parameter(format!(
                "eps ladder needs c in [0, 1) and q > 1, got c = {c}, q = {q}"
            )));
        }
        Ok(())
    }

    pub fn eps(&self, n: usize) -> f64 {
        let EpsLadder::Power { c, q } = *self;
        c * (n as f64).powf(-q)
    }
}

/// `h(t) = t^{p₁−1}(t − 1)`, strictly increasing on `[1, ∞)`.
pub fn h(p1: f64, t: f64) -> f64 {
    t.powf(p1 - 1.0) * (t - 1.0)
}

/// The smallest representable `t ≥ 1` with `h(t) ≥ y`, by bisection on
/// `[1, 1 + y]`.
pub fn h_inverse(p1: f64, y: f64) -> f64 {
    assert!(p1 >= 1.0 && y >= 0.0 && y.is_finite());
    let (mut lo, mut hi) = (1.0f64, 1.0 + y);
    if h(p1, hi) < y {
        // rounding in 1 + y for tiny y
        hi = f64::from_bits(hi.to_bits() + 1);
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return hi;
        }
        if h(p1, mid) >= y {
            hi = mid;
        } else {
            lo = mid;
        }
    }
}

/// Sample coefficient vectors `t` and check both a.i.c. inequalities for
/// `z₁,…,z_N` and `ε₁,…,ε_N`. Margins are relative to `Σ|tₙ|`.
pub fn aic_test(
    spec: &ExponentSpec,
    vectors: &[SimpleFunction],
    eps: &[f64],
    opts: &Sampling,
) -> Result<CertificateReport> {
    let n = vectors.len();
    if n == 0 || eps.len() != n {
        return Err(Error::Parameter(format!(
            "need one eps per vector: {} vectors, {} eps",
            n,
            eps.len()
        )));
    }
    if let Some(e) = eps.iter().find(|e| !(0.0..1.0).contains(*e)) {
        return Err(Error::Parameter(format!(
            "eps values must lie in [0, 1), got {e}"
        )));
    }
    let mut rep =
        CertificateReport::new(Property::AicTest, Evidence::Sampled, opts.tol).seed(opts.seed);
    rep.param("n", n);
    rep.param("eps", eps);

    let mut rng = rng::stream(opts.seed, rng::AIC);
    for s in 0..opts.samples {
        let t: Vec<(usize, f64)> = if s % 6 == 5 && n > 1 {
            // (1/m) e₁ + e_m
            let m = 2 + (s / 6) % (n - 1);
            vec![(1, 1.0 / m as f64), (m, 1.0)]
        } else {
            rng::coefficients(&mut rng, n, Pattern::cycle(s))
                .into_iter()
                .enumerate()
                .map(|(i, c)| (i + 1, c * rng.gen_range(0.5..2.0)))
                .collect()
        };
        let g = t.iter().fold(SimpleFunction::zero(), |acc, &(i, c)| {
            acc.lincomb(1.0, &vectors[i - 1], c)
        });
        let nv = profile_norm(&Profile::new(spec, &g)?, DEFAULT_TOL)?.norm;
        let l1: f64 = t.iter().map(|(_, c)| c.abs()).sum();
        let lower: f64 = t.iter().map(|&(i, c)| (1.0 - eps[i - 1]) * c.abs()).sum();
        let margin = ((nv - lower) / l1).min((l1 - nv) / l1);
        rep.record(
            margin,
            || json!({ "t": coeffs_json(&t), "norm": nv, "lower": lower, "upper": l1 }),
        );
    }
    Ok(rep)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct RefutationRow {
    n: usize,
    eps_n: f64,
    /// `s = h⁻¹(1/n^{p₁})`.
    s: f64,
    /// `ρ((f₁/n + fₙ)/s)`, at most 1 with no tolerance.
    rho_certificate: f64,
    norm: f64,
    /// `(1 − ε₁)/n + (1 − εₙ)`.
    lower_requirement: f64,
    /// `s < 1 + n^{−(p₁+1)/2}`.
    below_midpoint_rate: bool,
}

/// For each `n`, certify `‖f₁/n + fₙ‖ ≤ h⁻¹(1/n^{p₁})` through the exact
/// modular bound and find the first `n` where the a.i.c. lower requirement
/// `(1 − ε₁)/n + (1 − εₙ)` exceeds the norm.
///
/// A missing crossing is charged `2·tol` below the best observed gap, so the
/// report fails.
pub fn aic_refutation(
    family: &BasisFamily,
    n_values: &[usize],
    eps: &EpsLadder,
    tol: f64,
) -> Result<CertificateReport> {
    eps.validate()?;
    let len = family.len();
    if len < 2 {
        return Err(Error::Parameter(
            "refutation needs at least two vectors".into(),
        ));
    }
    if let Some(bad) = n_values.iter().find(|&&n| n < 2 || n > len) {
        return Err(Error::Parameter(format!("n = {bad} outside 2..={len}")));
    }
    family.check_disjoint()?;
    let p1 = family.support_meta[0].p_minus;
    if p1.is_nan() || p1 <= 1.0 {
        return Err(Error::Precondition(format!(
            "refutation needs p-(supp f1) > 1, got {p1}"
        )));
    }
    if family.support_meta.iter().any(|m| m.p_plus.is_infinite()) {
        return Err(Error::Precondition(
            "refutation needs finite support exponents".into(),
        ));
    }

    let mut rep = CertificateReport::new(Property::AicRefutation, Evidence::Sampled, tol);
    rep.param("p1", p1);
    rep.param("eps", eps);
    let coords = family.coords()?;
    let eps1 = eps.eps(1);
    let mut rows = Vec::with_capacity(n_values.len());
    let mut crossing = None;
    let mut best_gap = f64::NEG_INFINITY;
    let mut prev_s = f64::INFINITY;
    let mut s_decreasing = true;
    for &n in n_values {
        let nf = n as f64;
        let s = h_inverse(p1, nf.powf(-p1));
        s_decreasing &= s < prev_s;
        prev_s = s;
        let g = family.vector(1).lincomb(1.0 / nf, family.vector(n), 1.0);
        let prof = Profile::new(&family.spec, &g)?;
        let cert = prof.rho_over(s);
        let nv = coords.norm(&[(1, 1.0 / nf), (n, 1.0)]);
        let lower = (1.0 - eps1) / nf + (1.0 - eps.eps(n));
        let row = RefutationRow {
            n,
            eps_n: eps.eps(n),
            s,
            rho_certificate: cert,
            norm: nv,
            lower_requirement: lower,
            below_midpoint_rate: s < 1.0 + nf.powf(-(p1 + 1.0) / 2.0),
        };
        // exact: no tolerance on the modular certificate
        let cert_margin = if cert <= 1.0 {
            0.0
        } else {
            -(cert - 1.0).max(f64::MIN_POSITIVE) - tol
        };
        rep.record(
            cert_margin,
            || json!({ "row": &row, "failed": "rho_certificate" }),
        );
        rep.record(
            s * (1.0 + tol) - nv,
            || json!({ "row": &row, "failed": "norm_bound" }),
        );
        best_gap = best_gap.max(lower - nv);
        if crossing.is_none() && lower > nv {
            crossing = Some(n);
        }
        rows.push(row);
    }
    if crossing.is_none() {
        let charge = best_gap.min(0.0) - 2.0 * tol;
        rep.record(
            charge,
            || json!({ "failed": "no a.i.c. crossing in range", "best_gap": best_gap }),
        );
    }
    rep.param("crossing_n", crossing);
    rep.param("h_inverse_decreasing", s_decreasing);
    rep.param("rows", &rows);
    Ok(rep)
}
