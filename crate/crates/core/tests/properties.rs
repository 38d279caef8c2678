mod common;

use common::*;
use proptest::prelude::*;
use varlp::constructions::{fk_ladder, nakano_basis, Gamma};
use varlp::exponent::classify_scalars;
use varlp::{
    classify, derive_scalars, luxemburg_norm, rho, Cardinality, ExponentSeq, ExponentSpec,
    SimpleFunction, DEFAULT_TOL,
};

fn nrm(s: &ExponentSpec, f: &SimpleFunction) -> f64 {
    luxemburg_norm(s, f, DEFAULT_TOL).unwrap().norm
}

fn rh(s: &ExponentSpec, f: &SimpleFunction) -> f64 {
    rho(s, f).unwrap().value()
}

proptest! {
    #[test]
    fn modular_is_even((s, f) in arb_spec_and_fn()) {
        let r = rh(&s, &f);
        prop_assert_eq!(r, rh(&s, &f.scale(-1.0)));
        prop_assert_eq!(r, rh(&s, &f.abs()));
    }

    #[test]
    fn modular_vanishes_only_at_zero((s, f) in arb_spec_and_fn()) {
        prop_assert_eq!(rh(&s, &f) == 0.0, f.is_zero());
    }

    #[test]
    fn modular_is_convex((s, f, g) in arb_spec_and_two(), lam in 0.0f64..=1.0) {
        let mid = rh(&s, &f.lincomb(lam, &g, 1.0 - lam));
        let chord = lam * rh(&s, &f) + (1.0 - lam) * rh(&s, &g);
        prop_assert!(mid <= chord * (1.0 + 1e-12) + 1e-300, "{mid} > {chord}");
    }

    #[test]
    fn modular_is_additive_on_finite_parts((s, f) in arb_spec_and_fn()) {
        let finite = |r: &varlp::RegionRef| !s.resolve(r).unwrap().exponent.is_infinite();
        let f = f.restrict(finite);
        let left = f.restrict(|r| r.index.is_none());
        let right = f.restrict(|r| r.index.is_some());
        let sum = rh(&s, &left) + rh(&s, &right);
        prop_assert!(rel_close(rh(&s, &f), sum, 1e-12));
    }

    #[test]
    fn norm_is_homogeneous((s, f) in arb_spec_and_fn(), lam in -50.0f64..50.0) {
        let lhs = nrm(&s, &f.scale(lam));
        let rhs = lam.abs() * nrm(&s, &f);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.max(1e-300), "{lhs} vs {rhs}");
    }

    #[test]
    fn norm_satisfies_triangle((s, f, g) in arb_spec_and_two()) {
        let lhs = nrm(&s, &f.add(&g));
        prop_assert!(lhs <= (nrm(&s, &f) + nrm(&s, &g)) * (1.0 + 1e-10));
    }

    #[test]
    fn norm_is_a_lattice_norm((s, f) in arb_spec_and_fn(), grow in 1.0f64..3.0) {
        let g = f.map(|v| v * grow);
        prop_assert!(nrm(&s, &f) <= nrm(&s, &g) * (1.0 + 1e-10));
        prop_assert_eq!(nrm(&s, &f), nrm(&s, &f.abs()));
    }

    #[test]
    fn unit_ball_matches_modular_ball((s, f) in arb_spec_and_fn()) {
        prop_assume!(!f.is_zero());
        let n = nrm(&s, &f);
        prop_assert!(rh(&s, &f.scale(1.0 / n)) <= 1.0 + 1e-9);
        // just outside the unit sphere the modular exceeds 1
        prop_assert!(rh(&s, &f.scale((1.0 + 1e-6) / n)) > 1.0);
    }

    #[test]
    fn classification_is_consistent(s in arb_spec()) {
        let rep = classify(&s);
        prop_assert!(rep.flags.consistency_violations().is_empty(), "{:?}", rep.flags.consistency_violations());
        prop_assert_eq!(rep.flags, classify_scalars(&derive_scalars(&s)));
    }

    #[test]
    fn classification_depends_only_on_scalars(s in arb_spec()) {
        // renaming every region leaves the scalars and therefore the flags alone
        let mut v: serde_json::Value = serde_json::from_str(&s.to_json()).unwrap();
        for key in ["regions", "families"] {
            if let Some(items) = v.get_mut(key).and_then(|x| x.as_array_mut()) {
                for item in items {
                    let id = item["id"].as_str().unwrap().to_string();
                    item["id"] = format!("renamed_{id}").into();
                }
            }
        }
        let t = ExponentSpec::from_json(&v.to_string()).unwrap();
        prop_assert_eq!(derive_scalars(&s), derive_scalars(&t));
        prop_assert_eq!(classify(&s).flags, classify(&t).flags);
    }

    #[test]
    fn spec_json_round_trips(s in arb_spec()) {
        let back = ExponentSpec::from_json(&s.to_json()).unwrap();
        prop_assert_eq!(&back, &s);
    }

    #[test]
    fn function_json_round_trips((_s, f) in arb_spec_and_fn()) {
        let json = serde_json::to_string(&f).unwrap();
        prop_assert_eq!(SimpleFunction::from_json(&json).unwrap(), f);
    }

    #[test]
    fn scalars_are_ordered(s in arb_spec()) {
        let d = derive_scalars(&s);
        prop_assert!(1.0 <= d.p_minus && d.p_minus <= d.p_plus);
        if let (Some(lo), Some(hi)) = (d.p_minus_star, d.p_plus_star) {
            prop_assert!(1.0 <= lo && lo <= hi);
        }
        if let Some(pp) = d.p_plus_finite_part {
            prop_assert!(pp <= d.p_plus || d.p_plus.is_infinite());
        }
    }

    #[test]
    fn nakano_vectors_are_unit(a in 0.05f64..2.0, b in 0.5f64..2.0, n in 2usize..40) {
        let fam = nakano_basis(&ExponentSeq::HarmonicApproach { a, b }, n).unwrap();
        for v in &fam.vectors {
            let u = nrm(&fam.spec, v);
            prop_assert!((u - 1.0).abs() <= 1e-9, "{u}");
        }
    }

    #[test]
    fn fk_ladder_decreases_and_crosses_a_tenth_past_the_critical_gamma(
        gamma in 1.001f64..3.0,
        r0 in 5.001f64..10.0,
    ) {
        let l = fk_ladder(gamma, r0);
        prop_assert!(l.strictly_decreasing);
        let critical = 1.0 + 0.1f64.ln() / (1e-4 * r0).ln();
        if (gamma - critical).abs() > 1e-9 {
            prop_assert_eq!(l.below_tenth_at_1e_4, gamma > critical);
        }
    }

    #[test]
    fn gamma_must_decrease_strictly(vals in prop::collection::vec(1.0f64..10.0, 2..8)) {
        let ok = vals.windows(2).all(|w| w[1] < w[0]);
        prop_assert_eq!(Gamma::new(vals).is_ok(), ok);
    }

    #[test]
    fn cardinality_round_trips(n in any::<u64>(), inf in any::<bool>()) {
        let c = if inf { Cardinality::Infinite } else { Cardinality::Finite(n) };
        let back: Cardinality = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        prop_assert_eq!(back, c);
    }
}

#[test]
fn ell2_norm_oracle() {
    let s = atoms(&[2.0, 2.0]);
    assert!(rel_close(nrm(&s, &on_atoms(&[3.0, 4.0])), 5.0, 1e-12));
}

#[test]
fn sup_atom_dominates_small_finite_part() {
    let s = atoms(&[f64::INFINITY, 2.0]);
    // ρ(f/λ) = max(2/λ, ...) + (0.1/λ)^2 so the norm is just above 2
    let n = nrm(&s, &on_atoms(&[2.0, 0.1]));
    assert!(n > 2.0 && n < 2.01, "{n}");
}
