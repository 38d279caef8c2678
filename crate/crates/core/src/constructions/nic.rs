//! Sampled checks of the near-infinity concentration conditions on an FPP or
//! Nakano basis: sequential separation, premonotonicity and the `F_k`
//! perturbation bound.

use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::rng::{self, Pattern};

use super::{
    coeffs_json, BasisFamily, CertificateReport, ConstructionTag, Evidence, Property, Sampling,
};

const BASES: [ConstructionTag; 2] = [ConstructionTag::FppBasis, ConstructionTag::Nakano];

/// `2^{1/γ_{k−1}}`.
pub fn separation_threshold(gamma_prev: f64) -> f64 {
    2f64.powf(1.0 / gamma_prev)
}

fn check_k(family: &BasisFamily, k: usize) -> Result<()> {
    let n = family.len();
    if k == 0 || k >= n || family.gamma.len() <= k {
        return Err(Error::Parameter(format!(
            "need 1 <= k < N = {n} with γ_k available, got k = {k}"
        )));
    }
    Ok(())
}

/// Coefficients of `pattern` over indices `from..=to`.
fn block(rng: &mut impl Rng, from: usize, to: usize, pattern: Pattern) -> Vec<(usize, f64)> {
    rng::coefficients(rng, to - from + 1, pattern)
        .into_iter()
        .enumerate()
        .map(|(i, c)| (from + i, c))
        .collect()
}

fn scaled(c: &[(usize, f64)], s: f64) -> Vec<(usize, f64)> {
    c.iter().map(|&(i, v)| (i, v * s)).collect()
}

/// For unit `x` on indices `≥ k` and unit blocks `xₙ` after `x`, check
/// `‖x + xₙ‖ ≥ 2^{1/γ_{k−1}}`.
pub fn check_sequential_separation(
    family: &BasisFamily,
    k: usize,
    opts: &Sampling,
) -> Result<CertificateReport> {
    family.require_tag(&BASES, "sequential separation")?;
    check_k(family, k)?;
    let n = family.len();
    let coords = family.coords()?;
    let threshold = separation_threshold(family.gamma[k - 1]);
    let mut rep =
        CertificateReport::new(Property::SequentialSeparation, Evidence::Sampled, opts.tol)
            .seed(opts.seed);
    rep.param("k", k);
    rep.param("n", n);
    rep.param("gamma_k_minus_1", family.gamma[k - 1]);
    rep.param("threshold", threshold);

    let mut rng = rng::stream(opts.seed, rng::SEPARATION);
    let mut min_norm = f64::INFINITY;
    for s in 0..opts.samples {
        let (x, y) = match s {
            0 => (vec![(k, 1.0)], vec![(k + 1, 1.0)]),
            1 => (vec![(k, 1.0)], vec![(n, 1.0)]),
            _ => {
                let end = rng.gen_range(k..n);
                let x = block(&mut rng, k, end, Pattern::cycle(s));
                let b0 = rng.gen_range(end + 1..=n);
                let b1 = rng.gen_range(b0..=n);
                let y = block(&mut rng, b0, b1, Pattern::cycle(s + 1));
                (x, y)
            }
        };
        let x = scaled(&x, 1.0 / coords.norm(&x));
        let y = scaled(&y, 1.0 / coords.norm(&y));
        let both: Vec<_> = x.iter().chain(&y).copied().collect();
        let v = coords.norm(&both);
        min_norm = min_norm.min(v);
        rep.record(v - threshold, || {
            json!({ "x": coeffs_json(&x), "block": coeffs_json(&y), "norm": v, "threshold": threshold })
        });
    }
    rep.param("min_norm", min_norm);
    Ok(rep)
}

/// Separation certificates over several `k`, with the threshold trend.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationLadder {
    pub ks: Vec<usize>,
    pub thresholds: Vec<f64>,
    /// Smallest sampled `‖x + xₙ‖` per `k`.
    pub min_norms: Vec<f64>,
    /// Thresholds strictly increase with `k` and stay below 2.
    pub thresholds_increase_to_two: bool,
    pub reports: Vec<CertificateReport>,
}

impl SeparationLadder {
    pub fn pass(&self) -> bool {
        self.thresholds_increase_to_two && self.reports.iter().all(|r| r.pass)
    }
}

pub fn separation_ladder(
    family: &BasisFamily,
    ks: &[usize],
    opts: &Sampling,
) -> Result<SeparationLadder> {
    let reports = ks
        .iter()
        .map(|&k| check_sequential_separation(family, k, opts))
        .collect::<Result<Vec<_>>>()?;
    let thresholds: Vec<f64> = ks
        .iter()
        .map(|&k| separation_threshold(family.gamma[k - 1]))
        .collect();
    let min_norms = reports
        .iter()
        .map(|r| r.parameters["min_norm"].as_f64().unwrap_or(f64::NAN))
        .collect();
    Ok(SeparationLadder {
        ks: ks.to_vec(),
        thresholds_increase_to_two: thresholds.windows(2).all(|w| w[1] > w[0])
            && thresholds.iter().all(|&t| t < 2.0),
        thresholds,
        min_norms,
        reports,
    })
}

/// Check `‖Q_k x‖ ≤ ‖x‖` for every tail projection `Q_k`.
pub fn check_premonotone(family: &BasisFamily, opts: &Sampling) -> Result<CertificateReport> {
    let n = family.len();
    let mut rep =
        CertificateReport::new(Property::Premonotone, Evidence::Sampled, opts.tol).seed(opts.seed);
    rep.param("n", n);
    if n == 0 {
        rep.record(0.0, || json!(null));
        return Ok(rep);
    }
    let coords = family.coords()?;
    let mut rng = rng::stream(opts.seed, rng::PREMONOTONE);
    for s in 0..opts.samples {
        let x = block(&mut rng, 1, n, Pattern::cycle(s));
        let full = coords.norm(&x);
        for k in 2..=n {
            let tail: Vec<_> = x.iter().filter(|(i, _)| *i >= k).copied().collect();
            let t = coords.norm(&tail);
            rep.record(
                full - t,
                || json!({ "x": coeffs_json(&x), "k": k, "norm": full, "tail_norm": t }),
            );
        }
    }
    Ok(rep)
}

/// `F_k(λ)/λ` on the ladder `λ = 10⁻¹, …, 10⁻⁶`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FkLadder {
    pub gamma_k: f64,
    pub r0: f64,
    pub lambdas: Vec<f64>,
    pub ratios: Vec<f64>,
    pub strictly_decreasing: bool,
    /// `F_k(10⁻⁴)/10⁻⁴ < 0.1`.
    pub below_tenth_at_1e_4: bool,
}

/// `F_k(λ) = λ` for `λ > 1/R₀` and `λ^{γ_k} R₀^{γ_k − 1}` otherwise.
pub fn fk(lambda: f64, gamma_k: f64, r0: f64) -> f64 {
    if lambda > 1.0 / r0 {
        lambda
    } else {
        lambda.powf(gamma_k) * r0.powf(gamma_k - 1.0)
    }
}

pub fn fk_ladder(gamma_k: f64, r0: f64) -> FkLadder {
    let lambdas: Vec<f64> = (1..=6).map(|m| 10f64.powi(-m)).collect();
    let ratios: Vec<f64> = lambdas.iter().map(|&l| fk(l, gamma_k, r0) / l).collect();
    FkLadder {
        gamma_k,
        r0,
        strictly_decreasing: ratios.windows(2).all(|w| w[1] < w[0]),
        below_tenth_at_1e_4: ratios[3] < 0.1,
        lambdas,
        ratios,
    }
}

/// For `z` on the first `k` vectors with `‖z‖ ≤ R₀`, blocks `xₙ` after `k`
/// with `‖xₙ‖ ≥ 1` and `λ ≤ 1/R₀`, check
/// `‖xₙ + λz‖ ≤ ‖xₙ‖ + λ^{γ_k}‖z‖^{γ_k}`; also require the ratio ladder
/// `F_k(λ)/λ` to decrease.
pub fn check_fk_bound(
    family: &BasisFamily,
    k: usize,
    r0: f64,
    opts: &Sampling,
) -> Result<CertificateReport> {
    family.require_tag(&BASES, "F_k bound")?;
    check_k(family, k)?;
    if !(r0.is_finite() && r0 > 5.0) {
        return Err(Error::Parameter(format!(
            "R0 must be finite and > 5, got {r0}"
        )));
    }
    let n = family.len();
    let gk = family.gamma[k];
    let coords = family.coords()?;
    let mut rep =
        CertificateReport::new(Property::FkBound, Evidence::Sampled, opts.tol).seed(opts.seed);
    rep.param("k", k);
    rep.param("r0", r0);
    rep.param("gamma_k", gk);
    rep.param("m", 0);

    let mut rng = rng::stream(opts.seed, rng::FK_BOUND);
    let lmin = (1e-6f64 / r0).ln();
    let lmax = (1.0 / r0).ln();
    for s in 0..opts.samples {
        let z0 = block(&mut rng, 1, k, Pattern::cycle(s));
        let z_target = if s % 4 == 0 {
            r0
        } else {
            r0 * rng.gen_range(0.01..1.0)
        };
        let z = scaled(&z0, z_target / coords.norm(&z0));
        let b0 = rng.gen_range(k + 1..=n);
        let b1 = rng.gen_range(b0..=n);
        let x0 = block(&mut rng, b0, b1, Pattern::cycle(s + 2));
        let x_target = if s % 3 == 0 {
            1.0
        } else {
            1.0 + 2.0 * rng.gen::<f64>()
        };
        let x = scaled(&x0, x_target / coords.norm(&x0));
        let lambda = if s % 7 == 0 {
            1.0 / r0
        } else {
            rng.gen_range(lmin..lmax).exp()
        };
        let nz = coords.norm(&z);
        let nx = coords.norm(&x);
        let both: Vec<_> = x.iter().copied().chain(scaled(&z, lambda)).collect();
        let lhs = coords.norm(&both);
        let rhs = nx + (lambda * nz).powf(gk);
        rep.record(rhs - lhs, || {
            json!({ "z": coeffs_json(&z), "x": coeffs_json(&x), "lambda": lambda,
                    "lhs": lhs, "rhs": rhs })
        });
    }
    let ladder = fk_ladder(gk, r0);
    let decreasing = ladder.strictly_decreasing;
    rep.param("ladder", &ladder);
    if !decreasing {
        rep.record(-f64::MAX, || json!({ "ladder": ladder }));
    }
    Ok(rep)
}
