#![allow(dead_code)]

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use varlp::{
    Cardinality, Exponent, ExponentSeq, ExponentSpec, Region, RegionFamily, RegionKind, RegionRef,
    SimpleFunction, WeightSeq,
};

/// Every single region plus the first `members` members of each family.
pub fn coordinates(spec: &ExponentSpec, members: u64) -> Vec<RegionRef> {
    let mut out: Vec<RegionRef> = spec
        .regions()
        .iter()
        .map(|r| RegionRef::region(r.id.clone()))
        .collect();
    for f in spec.families() {
        let m = match f.count {
            Cardinality::Finite(c) => c.min(members),
            Cardinality::Infinite => members,
        };
        out.extend((1..=m).map(|i| RegionRef::member(f.id.clone(), i)));
    }
    out
}

pub fn atoms(ps: &[f64]) -> ExponentSpec {
    ExponentSpec::from_regions(
        ps.iter()
            .enumerate()
            .map(|(i, &p)| Region::atom(format!("a{i}"), 1.0, p).unwrap())
            .collect(),
    )
    .unwrap()
}

pub fn on_atoms(vals: &[f64]) -> SimpleFunction {
    SimpleFunction::new(
        vals.iter()
            .enumerate()
            .map(|(i, &v)| (RegionRef::region(format!("a{i}")), v)),
    )
    .unwrap()
}

pub fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs())
}

fn random_exponent(rng: &mut impl Rng, allow_infinite: bool) -> f64 {
    match rng.gen_range(0..10) {
        0 => 1.0,
        1 if allow_infinite => f64::INFINITY,
        2 => rng.gen_range(1.0..1.1),
        3 => rng.gen_range(4.0..12.0),
        _ => rng.gen_range(1.0..4.0),
    }
}

/// Random spec with 1–6 regions and up to one family with bounded finite
/// exponents. `allow_infinite` adds `p = ∞` regions.
pub fn random_spec(rng: &mut impl Rng, allow_infinite: bool) -> ExponentSpec {
    let m = rng.gen_range(1..=6);
    let regions = (0..m)
        .map(|i| {
            let w = 10f64.powf(rng.gen_range(-1.0..1.0));
            let p = random_exponent(rng, allow_infinite);
            if rng.gen_bool(0.5) {
                Region::atom(format!("r{i}"), w, p).unwrap()
            } else {
                Region::cell(format!("r{i}"), w, p).unwrap()
            }
        })
        .collect();
    let families = if rng.gen_bool(0.5) {
        let exponents = match rng.gen_range(0..3) {
            0 => ExponentSeq::HarmonicApproach {
                a: rng.gen_range(0.1..3.0),
                b: rng.gen_range(0.5..2.0),
            },
            1 => ExponentSeq::GeometricApproach {
                a: rng.gen_range(0.1..3.0),
                r: rng.gen_range(0.2..0.9),
            },
            _ => ExponentSeq::Constant {
                c: Exponent::new(rng.gen_range(1.0..5.0)).unwrap(),
            },
        };
        vec![RegionFamily {
            id: "fam".into(),
            kind: if rng.gen_bool(0.5) {
                RegionKind::Atom
            } else {
                RegionKind::Nonatomic
            },
            weights: WeightSeq::Geometric {
                w: rng.gen_range(0.2..2.0),
                r: rng.gen_range(0.5..1.0),
            },
            exponents,
            count: if rng.gen_bool(0.5) {
                Cardinality::Infinite
            } else {
                Cardinality::Finite(rng.gen_range(1..10))
            },
        }]
    } else {
        Vec::new()
    };
    ExponentSpec::new(regions, families).unwrap()
}

/// Random nonzero function on a random subset of the spec's coordinates.
pub fn random_function(rng: &mut impl Rng, spec: &ExponentSpec) -> SimpleFunction {
    let mut coords = coordinates(spec, 6);
    coords.shuffle(rng);
    let k = rng.gen_range(1..=coords.len());
    let scale = 10f64.powf(rng.gen_range(-2.0..2.0));
    SimpleFunction::new(
        coords
            .into_iter()
            .take(k)
            .map(|r| (r, scale * rng.gen_range(-1.0..1.0)))
            .map(|(r, v): (RegionRef, f64)| (r, if v == 0.0 { scale } else { v })),
    )
    .unwrap()
}

// proptest strategies

fn arb_exponent() -> impl Strategy<Value = f64> {
    prop_oneof![
        1 => Just(1.0),
        1 => Just(f64::INFINITY),
        6 => 1.0f64..6.0,
    ]
}

fn arb_region(i: usize) -> impl Strategy<Value = Region> {
    (any::<bool>(), 0.05f64..8.0, arb_exponent()).prop_map(move |(atom, w, p)| {
        if atom {
            Region::atom(format!("r{i}"), w, p).unwrap()
        } else {
            Region::cell(format!("r{i}"), w, p).unwrap()
        }
    })
}

fn arb_family() -> impl Strategy<Value = RegionFamily> {
    let exps = prop_oneof![
        (0.05f64..3.0, 0.3f64..2.0).prop_map(|(a, b)| ExponentSeq::HarmonicApproach { a, b }),
        (0.05f64..3.0, 0.1f64..0.95).prop_map(|(a, r)| ExponentSeq::GeometricApproach { a, r }),
        (1.0f64..4.0, 0.1f64..3.0)
            .prop_map(|(start, slope)| ExponentSeq::LinearGrowth { start, slope }),
        arb_exponent().prop_map(|c| ExponentSeq::Constant {
            c: Exponent::new(c).unwrap()
        }),
        (prop::collection::vec(arb_exponent(), 0..3), arb_exponent()).prop_map(|(v, t)| {
            ExponentSeq::Prefix {
                values: v.into_iter().map(|p| Exponent::new(p).unwrap()).collect(),
                then: Exponent::new(t).unwrap(),
            }
        }),
    ];
    (
        any::<bool>(),
        exps,
        prop_oneof![Just(None), (3u64..12).prop_map(Some)],
    )
        .prop_map(|(atom, exponents, count)| RegionFamily {
            id: "fam".into(),
            kind: if atom {
                RegionKind::Atom
            } else {
                RegionKind::Nonatomic
            },
            weights: WeightSeq::Geometric { w: 1.0, r: 0.7 },
            exponents,
            count: count.map_or(Cardinality::Infinite, Cardinality::Finite),
        })
}

/// Any valid spec: 0–4 regions and 0–1 families, at least one of them.
pub fn arb_spec() -> impl Strategy<Value = ExponentSpec> {
    (0usize..5, prop::option::of(arb_family()))
        .prop_flat_map(|(n, fam)| {
            let n = if n == 0 && fam.is_none() { 1 } else { n };
            let regions: Vec<_> = (0..n).map(arb_region).collect();
            (regions, Just(fam))
        })
        .prop_map(|(regions, fam)| ExponentSpec::new(regions, fam.into_iter().collect()).unwrap())
}

/// Spec with only finite exponents and bounded families.
pub fn arb_finite_spec() -> impl Strategy<Value = ExponentSpec> {
    prop::collection::vec((any::<bool>(), 0.05f64..8.0, 1.0f64..6.0), 1..6).prop_map(|rs| {
        ExponentSpec::from_regions(
            rs.into_iter()
                .enumerate()
                .map(|(i, (atom, w, p))| {
                    if atom {
                        Region::atom(format!("r{i}"), w, p).unwrap()
                    } else {
                        Region::cell(format!("r{i}"), w, p).unwrap()
                    }
                })
                .collect(),
        )
        .unwrap()
    })
}

/// Values for every coordinate of the spec (zeros allowed).
pub fn arb_values(spec: &ExponentSpec) -> impl Strategy<Value = SimpleFunction> {
    let coords = coordinates(spec, 4);
    prop::collection::vec(
        prop_oneof![1 => Just(0.0), 4 => -20.0f64..20.0],
        coords.len(),
    )
    .prop_map(move |vals| SimpleFunction::new(coords.iter().cloned().zip(vals)).unwrap())
}

pub fn arb_spec_and_fn() -> impl Strategy<Value = (ExponentSpec, SimpleFunction)> {
    arb_spec().prop_flat_map(|s| {
        let f = arb_values(&s);
        (Just(s), f)
    })
}

pub fn arb_spec_and_two() -> impl Strategy<Value = (ExponentSpec, SimpleFunction, SimpleFunction)> {
    arb_spec().prop_flat_map(|s| {
        let (f, g) = (arb_values(&s), arb_values(&s));
        (Just(s), f, g)
    })
}
