//! An isometric copy of ℓ∞ when `p₊(Ω_f) = ∞`.
//!
//! Vector `n` is `fₙ = Σ_{j≤J} xₙⱼ^{1/p} χ_{Sₙⱼ}` with `xₙⱼ = 1/(2^{n+1+j} μ(Sₙⱼ))`.
//! Taking `μ(Sₙⱼ) = 2^{−(n+1+j)}` makes every value exactly 1, so
//! `ρ(fₙ) = 2^{−(n+1)}(1 − 2^{−J})` holds in exact binary arithmetic. The
//! sets are fresh nonatomic regions labelled by the prime power `rₙʲ`,
//! carrying the exponent of a member of the unbounded family.

use serde_json::json;

use crate::error::{Error, Result};
use crate::exponent::{derive_scalars, ExponentSpec, Piece, Region, RegionFamily, RegionRef};
use crate::modular::{Profile, SimpleFunction};
use crate::norm::{profile_norm, DEFAULT_TOL};

use super::{support_meta, BasisFamily, CertificateReport, ConstructionTag, Evidence, Property};

/// Smallest exponent used for the carved sets. Large exponents push every
/// `‖fₙ‖` towards 1 already at small `J`.
pub const LINFTY_EXPONENT_FLOOR: f64 = 800.0;

fn nth_prime(n: usize) -> u64 {
    let mut found = 0;
    let mut c = 1u64;
    while found < n {
        c += 1;
        if (2..)
            .take_while(|d| d * d <= c)
            .all(|d| !c.is_multiple_of(d))
        {
            found += 1;
        }
    }
    c
}

fn unbounded_family(spec: &ExponentSpec) -> Option<&RegionFamily> {
    spec.families().iter().find(|f| {
        f.pieces().iter().any(|p| {
            matches!(
                p,
                Piece::Monotone {
                    increasing: true,
                    to: None,
                    ..
                }
            )
        })
    })
}

/// Smallest exponent with `(1 + 1/n)^p > 2^n`.
fn growth_threshold(n: usize) -> f64 {
    let n = n as f64;
    n * std::f64::consts::LN_2 / (1.0 / n).ln_1p()
}

/// Build `f₁,…,f_N`, each truncated to `J` carved sets.
pub fn build_linfty_copy(spec: &ExponentSpec, n: usize, j: usize) -> Result<BasisFamily> {
    if n == 0 || j == 0 {
        return Err(Error::Parameter(format!(
            "need N, J >= 1, got N = {n}, J = {j}"
        )));
    }
    if j > 64 {
        return Err(Error::Parameter(format!(
            "J = {j} exceeds the dyadic range (64)"
        )));
    }
    let fam = match (
        derive_scalars(spec).p_plus_finite_part,
        unbounded_family(spec),
    ) {
        (Some(pp), Some(f)) if pp.is_infinite() => f,
        _ => {
            return Err(Error::Precondition(
                "spec lacks unbounded finite exponents (p+(Omega_f) < inf)".into(),
            ))
        }
    };

    let mut regions = Vec::new();
    let mut vectors = Vec::new();
    let mut labels = Vec::new();
    for m in 1..=n {
        let threshold = growth_threshold(m).max(LINFTY_EXPONENT_FLOOR);
        let start = fam
            .exponents
            .first_index_at_least(threshold, fam.count)
            .and_then(|i| {
                if fam.exponents.value(i) > threshold {
                    Some(i)
                } else {
                    i.checked_add(1)
                }
            })
            .ok_or_else(|| {
                Error::Construction(format!(
                    "no member of '{}' has (1 + 1/{m})^p > 2^{m}",
                    fam.id
                ))
            })?;
        let prime = nth_prime(m);
        let mut terms = Vec::new();
        for jj in 1..=j {
            // superlinear spacing in j makes ρ(λ fₙ) diverge for every λ > 1
            let idx = (jj as u64)
                .checked_mul(jj as u64)
                .and_then(|sq| start.checked_add(sq - 1))
                .filter(|&i| fam.contains_index(i))
                .ok_or_else(|| {
                    Error::Construction(format!("family '{}' too short for J = {j}", fam.id))
                })?;
            let p = fam.exponents.value(idx);
            let id = format!("{}.S[{prime}^{jj}]", fam.id);
            let weight = 0.5f64.powi((m + 1 + jj) as i32);
            regions.push(Region::cell(id.clone(), weight, p)?);
            terms.push((RegionRef::region(id), 1.0));
        }
        vectors.push(SimpleFunction::new(terms)?);
        labels.push(format!(
            "r = {prime}^j, j = 1..{j}; exponents from {}[{start}..]",
            fam.id
        ));
    }

    let spec = spec.with_regions(regions)?;
    let support_meta = vectors
        .iter()
        .zip(labels)
        .map(|(v, l)| support_meta(&spec, v, Some(l)))
        .collect::<Result<_>>()?;
    let out = BasisFamily {
        spec,
        vectors,
        support_meta,
        construction_tag: ConstructionTag::LinftyCopy,
        gamma: Vec::new(),
    };
    out.check_disjoint()?;
    Ok(out)
}

fn norm_of(spec: &ExponentSpec, f: &SimpleFunction) -> Result<f64> {
    Ok(profile_norm(&Profile::new(spec, f)?, DEFAULT_TOL)?.norm)
}

/// Check `‖fₙ‖ ≤ 1`, the growth of `‖fₙ‖` along the truncation ladder,
/// `‖Σ fₙ‖ ≤ 1`, and `max|tₙ|·minₙ‖fₙ‖ ≤ ‖Σ tₙ fₙ‖ ≤ max|tₙ|` on fixed
/// coefficient patterns.
pub fn verify_linfty_isometry(family: &BasisFamily, tol: f64) -> Result<CertificateReport> {
    family.require_tag(&[ConstructionTag::LinftyCopy], "verify_linfty_isometry")?;
    let spec = &family.spec;
    let mut rep = CertificateReport::new(Property::LinftyIsometry, Evidence::Sampled, tol);
    let n = family.len();
    let j = family.support_meta.first().map_or(0, |m| m.regions.len());
    rep.param("n", n);
    rep.param("j", j);

    let mut norms = Vec::with_capacity(n);
    let mut ladders = Vec::with_capacity(n);
    for (i, f) in family.vectors.iter().enumerate() {
        let nf = norm_of(spec, f)?;
        rep.record(1.0 - nf, || json!({ "vector": i + 1, "norm": nf }));
        norms.push(nf);

        // truncations to the first 1, 2, 4, … carved sets; set j has
        // measure 2^{-(n+1+j)}, so j order is decreasing weight
        let mut order: Vec<(f64, &RegionRef)> = family.support_meta[i]
            .regions
            .iter()
            .map(|r| Ok((spec.resolve(r)?.weight, r)))
            .collect::<Result<_>>()?;
        order.sort_by(|a, b| b.0.total_cmp(&a.0));
        let order: Vec<&RegionRef> = order.into_iter().map(|x| x.1).collect();
        let mut cuts: Vec<usize> = std::iter::successors(Some(1usize), |c| Some(c * 2))
            .take_while(|&c| c < order.len())
            .collect();
        cuts.push(order.len());
        let mut ladder = Vec::new();
        for &c in &cuts {
            let keep = &order[..c];
            let t = f.restrict(|r| keep.contains(&r));
            ladder.push((c, norm_of(spec, &t)?));
        }
        for w in ladder.windows(2) {
            let (a, b) = (w[0].1, w[1].1);
            rep.record(
                b - a,
                || json!({ "vector": i + 1, "truncations": [w[0], w[1]] }),
            );
        }
        ladders.push(ladder);
    }
    rep.param("norms", &norms);
    rep.param("truncation_ladders", &ladders);

    let ones: Vec<(usize, f64)> = (1..=n).map(|i| (i, 1.0)).collect();
    let sum = family.combination(&ones);
    let sum_rho = Profile::new(spec, &sum)?.rho();
    let sum_norm = norm_of(spec, &sum)?;
    rep.record(1.0 - sum_norm, || json!({ "sum_norm": sum_norm }));
    rep.param("sum_rho", sum_rho);
    rep.param("sum_norm", sum_norm);

    let min_norm = norms.iter().copied().fold(f64::INFINITY, f64::min);
    let mut patterns: Vec<Vec<f64>> = (0..n)
        .map(|k| (0..n).map(|i| if i == k { 1.0 } else { 0.0 }).collect())
        .collect();
    patterns.push(vec![1.0; n]);
    patterns.push(
        (0..n)
            .map(|i| if i % 2 == 0 { 1.0 } else { -1.0 })
            .collect(),
    );
    patterns.push((0..n).map(|i| 0.5f64.powi(i as i32)).collect());
    patterns.push((0..n).map(|i| 3.0 - i as f64 / n as f64).collect());
    for t in &patterns {
        let coeffs: Vec<(usize, f64)> = t.iter().enumerate().map(|(i, &c)| (i + 1, c)).collect();
        let g = norm_of(spec, &family.combination(&coeffs))?;
        let sup = t.iter().fold(0.0f64, |a, c| a.max(c.abs()));
        rep.record(sup - g, || json!({ "coeffs": t, "norm": g, "sup": sup }));
        rep.record(
            g - sup * min_norm,
            || json!({ "coeffs": t, "norm": g, "lower": sup * min_norm }),
        );
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponent::{ExponentSeq, RegionKind, WeightSeq};
    use crate::ext::Cardinality;

    fn growing() -> ExponentSpec {
        ExponentSpec::new(
            vec![Region::atom("a", 1.0, 2.0).unwrap()],
            vec![RegionFamily {
                id: "g".into(),
                kind: RegionKind::Nonatomic,
                weights: WeightSeq::Geometric { w: 0.5, r: 0.5 },
                exponents: ExponentSeq::LinearGrowth {
                    start: 1.0,
                    slope: 1.0,
                },
                count: Cardinality::Infinite,
            }],
        )
        .unwrap()
    }

    #[test]
    fn primes() {
        let p: Vec<u64> = (1..=6).map(nth_prime).collect();
        assert_eq!(p, [2, 3, 5, 7, 11, 13]);
    }

    #[test]
    fn exact_modular_identity() {
        let fam = build_linfty_copy(&growing(), 4, 32).unwrap();
        for (i, f) in fam.vectors.iter().enumerate() {
            let n = i as i32 + 1;
            let r = Profile::new(&fam.spec, f).unwrap().rho();
            let expect = 0.5f64.powi(n + 1) * (1.0 - 0.5f64.powi(32));
            assert_eq!(r, expect);
        }
        let fam = build_linfty_copy(&growing(), 1, 4).unwrap();
        let r = Profile::new(&fam.spec, &fam.vectors[0]).unwrap().rho();
        assert_eq!(r, 15.0 / 64.0);
    }

    #[test]
    fn supports_are_labelled_by_prime_powers() {
        let fam = build_linfty_copy(&growing(), 2, 3).unwrap();
        let ids: Vec<String> = fam.support_meta[1]
            .regions
            .iter()
            .map(|r| r.region_id.clone())
            .collect();
        assert_eq!(ids, ["g.S[3^1]", "g.S[3^2]", "g.S[3^3]"]);
        assert!(fam.support_meta[0].p_minus >= LINFTY_EXPONENT_FLOOR);
    }

    #[test]
    fn needs_unbounded_exponents() {
        let bounded =
            ExponentSpec::from_regions(vec![Region::atom("a", 1.0, 5.0).unwrap()]).unwrap();
        assert!(matches!(
            build_linfty_copy(&bounded, 2, 4),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            build_linfty_copy(&growing(), 0, 4),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn isometry_certificate() {
        let fam = build_linfty_copy(&growing(), 3, 20).unwrap();
        let rep = verify_linfty_isometry(&fam, 1e-9).unwrap();
        assert!(rep.pass, "{rep:?}");
        let norms: Vec<f64> = serde_json::from_value(rep.parameters["norms"].clone()).unwrap();
        assert!(norms.iter().all(|&x| (0.99..=1.0).contains(&x)));

        let short = build_linfty_copy(&growing(), 1, 1).unwrap();
        let n = norm_of(&short.spec, &short.vectors[0]).unwrap();
        assert!(n < 1.0);
    }
}
