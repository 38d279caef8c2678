//! Krasnoselskii–Mann iteration `x_{k+1} = (1−t)x_k + t·T x_k` and empirical
//! Lipschitz constants for built-in operators under the Luxemburg norm.
//!
//! The traces are regression anchors for this crate; they do not reproduce
//! any published experiment.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::{ExponentSpec, RegionRef};
use crate::ext::Cardinality;
use crate::modular::SimpleFunction;
use crate::norm::norm;
use crate::rng;

/// Family members sampled when an operator does not name a truncation.
pub const DEFAULT_MEMBERS: u64 = 8;
/// Slack for the nonexpansive flag and the monotone-residual check.
pub const LAB_TOL: f64 = 1e-9;

/// Built-in operators and the combinators they are made of. Nothing here
/// runs user code.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Operator {
    Identity,
    /// `x ↦ factor·x`.
    Scale {
        factor: f64,
    },
    /// `x ↦ x + by`.
    Translate {
        by: SimpleFunction,
    },
    /// Multiply the value on listed regions by their factor and every other
    /// value by `default`.
    Diagonal {
        factors: SimpleFunction,
        default: f64,
    },
    /// Move the value of member `i` of `family` to member `i + 1` for
    /// `i < n`; the value on member `n` is dropped.
    Shift {
        family: String,
        n: u64,
    },
    /// `x ↦ x · min(1, radius/‖x‖)`. Not nonexpansive in general.
    Retract {
        radius: f64,
    },
    /// Apply `ops` left to right.
    Compose {
        ops: Vec<Operator>,
    },
    /// `x ↦ center + factor·(x − center)` with `factor ∈ [0, 1)`.
    AffineContraction {
        factor: f64,
        center: SimpleFunction,
    },
    /// `x ↦ retract_radius(D x + translation)` where `D` flips the sign on
    /// the listed regions.
    IsometryBall {
        flip: Vec<RegionRef>,
        translation: SimpleFunction,
        radius: f64,
    },
    /// `x ↦ retract_1(shift(x))` on the first `n` members of `family`.
    ShiftRetract {
        family: String,
        n: u64,
    },
}

fn shift(x: &SimpleFunction, family: &str, n: u64) -> Result<SimpleFunction> {
    SimpleFunction::new(x.iter().filter_map(|(r, v)| match r.index {
        Some(i) if r.region_id == family && i < n => Some((RegionRef::member(family, i + 1), v)),
        Some(i) if r.region_id == family && i == n => None,
        _ => Some((r.clone(), v)),
    }))
}

fn retract(spec: &ExponentSpec, x: &SimpleFunction, radius: f64) -> Result<SimpleFunction> {
    let n = norm(spec, x)?;
    Ok(if n > radius {
        x.scale(radius / n)
    } else {
        x.clone()
    })
}

impl Operator {
    pub fn label(&self) -> &'static str {
        match self {
            Operator::Identity => "identity",
            Operator::Scale { .. } => "scale",
            Operator::Translate { .. } => "translate",
            Operator::Diagonal { .. } => "diagonal",
            Operator::Shift { .. } => "shift",
            Operator::Retract { .. } => "retract",
            Operator::Compose { .. } => "compose",
            Operator::AffineContraction { .. } => "affine_contraction",
            Operator::IsometryBall { .. } => "isometry_ball",
            Operator::ShiftRetract { .. } => "shift_retract",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Parameter(format!(
                    "{name} must be positive, got {v}"
                )))
            }
        };
        match self {
            Operator::Scale { factor }
            | Operator::Diagonal {
                default: factor, ..
            } => {
                if factor.is_finite() {
                    Ok(())
                } else {
                    Err(Error::Parameter(format!(
                        "factor must be finite, got {factor}"
                    )))
                }
            }
            Operator::Retract { radius } | Operator::IsometryBall { radius, .. } => {
                positive("radius", *radius)
            }
            Operator::Shift { n, .. } | Operator::ShiftRetract { n, .. } => {
                positive("shift length", *n as f64)
            }
            Operator::AffineContraction { factor, .. } => {
                if (0.0..1.0).contains(factor) {
                    Ok(())
                } else {
                    Err(Error::Parameter(format!(
                        "contraction factor must lie in [0, 1), got {factor}"
                    )))
                }
            }
            Operator::Compose { ops } => ops.iter().try_for_each(Operator::validate),
            Operator::Identity | Operator::Translate { .. } => Ok(()),
        }
    }

    pub fn apply(&self, spec: &ExponentSpec, x: &SimpleFunction) -> Result<SimpleFunction> {
        match self {
            Operator::Identity => Ok(x.clone()),
            Operator::Scale { factor } => Ok(x.scale(*factor)),
            Operator::Translate { by } => Ok(x.add(by)),
            Operator::Diagonal { factors, default } => {
                SimpleFunction::new(x.iter().map(|(r, v)| {
                    let f = factors
                        .iter()
                        .find(|(q, _)| *q == r)
                        .map_or(*default, |(_, f)| f);
                    (r.clone(), f * v)
                }))
            }
            Operator::Shift { family, n } => shift(x, family, *n),
            Operator::Retract { radius } => retract(spec, x, *radius),
            Operator::Compose { ops } => ops
                .iter()
                .try_fold(x.clone(), |acc, op| op.apply(spec, &acc)),
            Operator::AffineContraction { factor, center } => {
                Ok(center.lincomb(1.0, &x.sub(center), *factor))
            }
            Operator::IsometryBall {
                flip,
                translation,
                radius,
            } => {
                let flipped = SimpleFunction::new(
                    x.iter()
                        .map(|(r, v)| (r.clone(), if flip.contains(r) { -v } else { v })),
                )?;
                retract(spec, &flipped.add(translation), *radius)
            }
            Operator::ShiftRetract { family, n } => retract(spec, &shift(x, family, *n)?, 1.0),
        }
    }

    /// Family truncations this operator acts on, as `(family, n)`.
    fn truncations(&self) -> Vec<(&str, u64)> {
        match self {
            Operator::Shift { family, n } | Operator::ShiftRetract { family, n } => {
                vec![(family.as_str(), *n)]
            }
            Operator::Compose { ops } => ops.iter().flat_map(|o| o.truncations()).collect(),
            _ => Vec::new(),
        }
    }
}

/// Coordinates sampled for `op`: every single region, plus the truncation
/// named by the operator (or the first [`DEFAULT_MEMBERS`]) of each family.
pub fn sample_domain(spec: &ExponentSpec, op: &Operator) -> Vec<RegionRef> {
    let named = op.truncations();
    let mut out: Vec<RegionRef> = spec
        .regions()
        .iter()
        .map(|r| RegionRef::region(r.id.clone()))
        .collect();
    for f in spec.families() {
        let m = named
            .iter()
            .find(|(id, _)| *id == f.id)
            .map_or(DEFAULT_MEMBERS, |(_, n)| *n);
        let m = match f.count {
            Cardinality::Finite(c) => m.min(c),
            Cardinality::Infinite => m,
        };
        out.extend((1..=m).map(|i| RegionRef::member(f.id.clone(), i)));
    }
    out
}

/// A point with norm `radius·u`, `u` uniform in `(0, 1]`, on `domain`.
pub fn random_point(
    spec: &ExponentSpec,
    domain: &[RegionRef],
    radius: f64,
    rng: &mut impl Rng,
) -> Result<SimpleFunction> {
    if domain.is_empty() {
        return Err(Error::Parameter("sampling domain is empty".into()));
    }
    let raw = SimpleFunction::new(domain.iter().map(|r| (r.clone(), rng.gen_range(-1.0..1.0))))?;
    let n = norm(spec, &raw)?;
    if n == 0.0 {
        return Ok(raw);
    }
    let u: f64 = 1.0 - rng.gen::<f64>();
    Ok(raw.scale(radius * u / n))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub operator_id: String,
    pub step_size: f64,
    /// `r_k = ‖x_k − T x_k‖`.
    pub residuals: Vec<f64>,
    pub final_point: SimpleFunction,
    pub steps: usize,
    pub converged: bool,
    /// `r_{k+1} ≤ r_k + tol` throughout.
    pub residuals_nonincreasing: bool,
}

/// Run Krasnoselskii–Mann from `x0` until `r_k ≤ tol` or `max_steps`
/// residuals have been recorded.
pub fn km_iterate(
    spec: &ExponentSpec,
    op: &Operator,
    x0: &SimpleFunction,
    t: f64,
    max_steps: usize,
    tol: f64,
) -> Result<IterationTrace> {
    op.validate()?;
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::Parameter(format!(
            "step size must lie in (0, 1), got {t}"
        )));
    }
    if max_steps == 0 {
        return Err(Error::Parameter("max_steps must be at least 1".into()));
    }
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::Parameter(format!(
            "tolerance must be >= 0, got {tol}"
        )));
    }
    let mut x = x0.clone();
    let mut residuals = Vec::new();
    let converged = loop {
        let tx = op.apply(spec, &x)?;
        let r = norm(spec, &x.sub(&tx))?;
        residuals.push(r);
        if r <= tol {
            break true;
        }
        if residuals.len() == max_steps {
            break false;
        }
        x = x.lincomb(1.0 - t, &tx, t);
    };
    Ok(IterationTrace {
        operator_id: op.label().to_string(),
        step_size: t,
        residuals_nonincreasing: residuals.windows(2).all(|w| w[1] <= w[0] + LAB_TOL),
        steps: residuals.len(),
        residuals,
        final_point: x,
        converged,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzEstimate {
    pub operator_id: String,
    pub samples: usize,
    pub radius: f64,
    /// `max ‖Tx − Ty‖/‖x − y‖` over the sampled pairs.
    pub max_ratio: f64,
    pub seed: u64,
    pub nonexpansive: bool,
}

/// Empirical Lipschitz constant of `op` on the ball of `radius`.
pub fn lipschitz_sample(
    spec: &ExponentSpec,
    op: &Operator,
    samples: usize,
    radius: f64,
    seed: u64,
) -> Result<LipschitzEstimate> {
    op.validate()?;
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::Parameter(format!(
            "radius must be positive, got {radius}"
        )));
    }
    let domain = sample_domain(spec, op);
    let mut rng = rng::stream(seed, rng::LIPSCHITZ);
    let mut max_ratio = 0.0f64;
    for _ in 0..samples {
        let x = random_point(spec, &domain, radius, &mut rng)?;
        let y = random_point(spec, &domain, radius, &mut rng)?;
        let d = norm(spec, &x.sub(&y))?;
        if d == 0.0 {
            continue;
        }
        let image = norm(spec, &op.apply(spec, &x)?.sub(&op.apply(spec, &y)?))?;
        max_ratio = max_ratio.max(image / d);
    }
    Ok(LipschitzEstimate {
        operator_id: op.label().to_string(),
        samples,
        radius,
        max_ratio,
        seed,
        nonexpansive: max_ratio <= 1.0 + LAB_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponent::Region;

    fn three_atoms() -> ExponentSpec {
        ExponentSpec::from_regions(vec![
            Region::atom("a", 1.0, 1.5).unwrap(),
            Region::atom("b", 2.0, 3.0).unwrap(),
            Region::atom("c", 0.5, f64::INFINITY).unwrap(),
        ])
        .unwrap()
    }

    fn point(a: f64, b: f64, c: f64) -> SimpleFunction {
        SimpleFunction::new([
            (RegionRef::region("a"), a),
            (RegionRef::region("b"), b),
            (RegionRef::region("c"), c),
        ])
        .unwrap()
    }

    #[test]
    fn contraction_converges_to_center() {
        let spec = three_atoms();
        let z = point(0.3, -0.2, 0.1);
        let op = Operator::AffineContraction {
            factor: 0.5,
            center: z.clone(),
        };
        let tr = km_iterate(&spec, &op, &point(1.0, 1.0, 1.0), 0.5, 500, 1e-12).unwrap();
        assert!(tr.converged && tr.residuals_nonincreasing);
        assert!(norm(&spec, &tr.final_point.sub(&z)).unwrap() < 1e-11);
    }

    #[test]
    fn identity_stops_immediately() {
        let tr = km_iterate(
            &three_atoms(),
            &Operator::Identity,
            &point(1.0, 2.0, 3.0),
            0.5,
            10,
            0.0,
        )
        .unwrap();
        assert_eq!((tr.steps, tr.residuals[0]), (1, 0.0));
    }

    #[test]
    fn rejects_bad_parameters() {
        let spec = three_atoms();
        let x = point(1.0, 0.0, 0.0);
        for t in [0.0, 1.0, -0.5] {
            assert!(km_iterate(&spec, &Operator::Identity, &x, t, 10, 0.0).is_err());
        }
        let bad = Operator::AffineContraction {
            factor: 1.0,
            center: x.clone(),
        };
        assert!(km_iterate(&spec, &bad, &x, 0.5, 10, 0.0).is_err());
        let unknown = r#"{"kind":"teleport"}"#;
        assert!(serde_json::from_str::<Operator>(unknown).is_err());
    }

    #[test]
    fn lipschitz_triple() {
        let spec = three_atoms();
        let c = Operator::AffineContraction {
            factor: 0.5,
            center: point(0.1, 0.0, 0.0),
        };
        let est = lipschitz_sample(&spec, &c, 100, 2.0, 5).unwrap();
        assert!((est.max_ratio - 0.5).abs() < 1e-9 && est.nonexpansive);
        let est = lipschitz_sample(&spec, &Operator::Identity, 100, 2.0, 5).unwrap();
        assert!((est.max_ratio - 1.0).abs() < 1e-9 && est.nonexpansive);
        let est = lipschitz_sample(&spec, &Operator::Scale { factor: 2.0 }, 100, 2.0, 5).unwrap();
        assert!((est.max_ratio - 2.0).abs() < 1e-9 && !est.nonexpansive);
    }

    #[test]
    fn shift_moves_members() {
        let x = SimpleFunction::new([
            (RegionRef::member("p", 1), 1.0),
            (RegionRef::member("p", 3), 2.0),
            (RegionRef::region("q"), 5.0),
        ])
        .unwrap();
        let y = shift(&x, "p", 3).unwrap();
        assert_eq!(y.value_at(&RegionRef::member("p", 2)), 1.0);
        assert_eq!(y.value_at(&RegionRef::member("p", 4)), 0.0);
        assert_eq!(y.value_at(&RegionRef::region("q")), 5.0);
    }
}
