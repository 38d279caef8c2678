use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::ext::Cardinality;

use super::{derive_scalars, DerivedScalars, ExponentSpec, Piece, RegionKind};

/// Truth values of every structural predicate decided from a spec.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationFlags {
    pub delta2: bool,
    pub order_continuous: bool,
    pub uniformly_convex_component: bool,
    pub reflexive: bool,
    pub w_fpp: bool,
    pub isometric_linfty: bool,
    pub isometric_l1: bool,
    pub aic_l1: bool,
    pub hereditary_l1_fpp_subspace: bool,
    pub reflexive_subspaces_have_fpp: bool,
    /// Some closed nonreflexive subspace has the FPP (subspace dichotomy).
    pub nonreflexive_fpp_subspace: bool,
    /// Purely atomic with exponents in (1, ∞) converging to 1: the whole
    /// sequence space carries an n.i.c. Luxemburg norm.
    pub nic_eligible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    #[serde(flatten)]
    pub flags: ClassificationFlags,
    pub scalars: DerivedScalars,
    /// Predicate name → explanation naming the regions and families involved.
    pub witnesses: BTreeMap<String, String>,
}

impl ClassificationFlags {
    /// The implications every report must satisfy.
    pub fn consistency_violations(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        let mut need = |ok: bool, what: &'static str| {
            if !ok {
                out.push(what);
            }
        };
        need(!self.reflexive || self.w_fpp, "reflexive => w_fpp");
        need(!self.reflexive || self.delta2, "reflexive => delta2");
        need(
            !self.reflexive || self.order_continuous,
            "reflexive => order_continuous",
        );
        need(
            !self.isometric_linfty || self.isometric_l1,
            "isometric_linfty => isometric_l1",
        );
        need(
            !self.isometric_linfty || !self.reflexive,
            "isometric_linfty => not reflexive",
        );
        need(
            !self.reflexive || !self.isometric_l1,
            "reflexive => not isometric_l1",
        );
        need(self.aic_l1 == self.isometric_l1, "aic_l1 == isometric_l1");
        need(
            !self.uniformly_convex_component || self.reflexive,
            "uniformly convex => reflexive",
        );
        need(
            !self.hereditary_l1_fpp_subspace || !self.reflexive,
            "hereditary l1 => not reflexive",
        );
        need(
            !self.nic_eligible || !self.reflexive,
            "nic_eligible => not reflexive",
        );
        out
    }
}

/// Decide every predicate from the derived scalars alone.
pub fn classify_scalars(d: &DerivedScalars) -> ClassificationFlags {
    let st = &d.one_infty_structure;
    let p_plus_f_bounded = d.p_plus_finite_part.is_none_or(|p| p < f64::INFINITY);
    let star_ok = match (d.p_minus_star, d.p_plus_star) {
        (Some(lo), Some(hi)) => lo > 1.0 && hi < f64::INFINITY,
        _ => true,
    };
    let infty_atoms_finite = st.infty_atoms.is_finite();

    let delta2 = p_plus_f_bounded;
    let order_continuous = delta2 && infty_atoms_finite && st.infty_nonatomic_measure == 0.0;
    let isometric_linfty =
        !p_plus_f_bounded || !infty_atoms_finite || st.infty_nonatomic_measure > 0.0;
    let isometric_l1 =
        !st.one_atoms.is_finite() || st.one_nonatomic_measure > 0.0 || isometric_linfty;
    let reflexive = star_ok && st.finitely_many_atoms();
    let hereditary = d.p_minus_off_one == Some(1.0);

    ClassificationFlags {
        delta2,
        order_continuous,
        uniformly_convex_component: d.p_minus > 1.0 && d.p_plus < f64::INFINITY,
        reflexive,
        w_fpp: p_plus_f_bounded
            && infty_atoms_finite
            && st.one_nonatomic_measure == 0.0
            && st.infty_nonatomic_measure == 0.0,
        isometric_linfty,
        isometric_l1,
        aic_l1: isometric_l1,
        hereditary_l1_fpp_subspace: hereditary,
        reflexive_subspaces_have_fpp: d.p_plus < f64::INFINITY,
        nonreflexive_fpp_subspace: hereditary || isometric_linfty,
        nic_eligible: d.purely_atomic
            && st.one_atoms == Cardinality::Finite(0)
            && st.infty_atoms == Cardinality::Finite(0)
            && d.infinite_families_tend_to_one,
    }
}

#[derive(Default)]
struct Sources {
    ones_atomic: Vec<String>,
    ones_nonatomic: Vec<String>,
    infty_atomic: Vec<String>,
    infty_nonatomic: Vec<String>,
    unbounded: Vec<String>,
    towards_one: Vec<String>,
}

fn sources(spec: &ExponentSpec) -> Sources {
    let mut s = Sources::default();
    let mut note = |id: &str, kind: RegionKind, p: f64, what: Cardinality| {
        let label = match what {
            Cardinality::Finite(1) => id.to_string(),
            c => format!("{id} ({c} members)"),
        };
        let atomic = kind == RegionKind::Atom;
        if p == 1.0 {
            if atomic {
                &mut s.ones_atomic
            } else {
                &mut s.ones_nonatomic
            }
            .push(label);
        } else if p.is_infinite() {
            if atomic {
                &mut s.infty_atomic
            } else {
                &mut s.infty_nonatomic
            }
            .push(label);
        }
    };
    for r in spec.regions() {
        note(&r.id, r.kind, r.exponent.value(), Cardinality::Finite(1));
    }
    for f in spec.families() {
        for piece in f.pieces() {
            match piece {
                Piece::Run { exponent, .. } => note(&f.id, f.kind, exponent, piece.len()),
                Piece::Monotone { inf, sup, .. } => {
                    if sup.is_infinite() {
                        s.unbounded.push(f.id.clone());
                    }
                    if inf == 1.0 {
                        s.towards_one.push(f.id.clone());
                    }
                }
            }
        }
    }
    s
}

fn list(ids: &[String]) -> String {
    if ids.is_empty() {
        "none".into()
    } else {
        ids.join(", ")
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a (empty set)".into(), |x| format!("{x}"))
}

/// Decide every predicate for `spec` and explain each verdict.
pub fn classify(spec: &ExponentSpec) -> ClassificationReport {
    let d = derive_scalars(spec);
    let flags = classify_scalars(&d);
    let src = sources(spec);
    let st = &d.one_infty_structure;
    let mut w = BTreeMap::new();
    let mut put = |k: &str, v: String| {
        w.insert(k.to_string(), v);
    };

    let pf = fmt_opt(d.p_plus_finite_part);
    put(
        "delta2",
        format!(
            "p+(Omega_f) = {pf}; unbounded finite exponents from: {}",
            list(&src.unbounded)
        ),
    );
    put(
        "order_continuous",
        format!(
            "p+(Omega_f) = {pf}; p=inf atoms: {} [{}]; nonatomic p=inf measure {} [{}]",
            st.infty_atoms,
            list(&src.infty_atomic),
            st.infty_nonatomic_measure,
            list(&src.infty_nonatomic)
        ),
    );
    put(
        "uniformly_convex_component",
        format!("p- = {}, p+ = {}", d.p_minus, d.p_plus),
    );
    put(
        "reflexive",
        format!(
            "p-(Omega*) = {}, p+(Omega*) = {}; p^-1({{1,inf}}) atoms: {} + {}, nonatomic measure {}; approaching 1: {}; unbounded: {}",
            fmt_opt(d.p_minus_star),
            fmt_opt(d.p_plus_star),
            st.one_atoms,
            st.infty_atoms,
            st.one_nonatomic_measure + st.infty_nonatomic_measure,
            list(&src.towards_one),
            list(&src.unbounded)
        ),
    );
    put(
        "w_fpp",
        format!(
            "p+(Omega_f) = {pf}; p=inf atoms {}; atomless part of p^-1({{1,inf}}): [{}] [{}]",
            st.infty_atoms,
            list(&src.ones_nonatomic),
            list(&src.infty_nonatomic)
        ),
    );
    put(
        "isometric_linfty",
        format!(
            "unbounded finite exponents: [{}]; p=inf atoms {} [{}]; nonatomic p=inf measure {}",
            list(&src.unbounded),
            st.infty_atoms,
            list(&src.infty_atomic),
            st.infty_nonatomic_measure
        ),
    );
    let l1 = format!(
        "p=1 atoms {} [{}]; nonatomic p=1 measure {} [{}]; isometric_linfty = {}",
        st.one_atoms,
        list(&src.ones_atomic),
        st.one_nonatomic_measure,
        list(&src.ones_nonatomic),
        flags.isometric_linfty
    );
    put("isometric_l1", l1.clone());
    put("aic_l1", format!("equivalent to isometric_l1: {l1}"));
    put(
        "hereditary_l1_fpp_subspace",
        format!(
            "p-(Omega \\ p^-1({{1}})) = {}; exponents approaching 1 from above: [{}]",
            fmt_opt(d.p_minus_off_one),
            list(&src.towards_one)
        ),
    );
    put("reflexive_subspaces_have_fpp", format!("p+ = {}", d.p_plus));
    put(
        "nonreflexive_fpp_subspace",
        format!(
            "hereditary_l1_fpp_subspace = {}, isometric_linfty = {}",
            flags.hereditary_l1_fpp_subspace, flags.isometric_linfty
        ),
    );
    put(
        "nic_eligible",
        format!(
            "purely atomic = {}; p=1 atoms {}; p=inf atoms {}; infinite families tend to 1 = {}",
            d.purely_atomic, st.one_atoms, st.infty_atoms, d.infinite_families_tend_to_one
        ),
    );

    ClassificationReport {
        flags,
        scalars: d,
        witnesses: w,
    }
}
