use serde::{Deserialize, Serialize};

use crate::ext::{self, Cardinality};

use super::{ExponentSpec, Piece, RegionKind};

/// Atoms and nonatomic measure carried by `p⁻¹({1})` and `p⁻¹({+∞})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OneInftyStructure {
    pub one_atoms: Cardinality,
    pub infty_atoms: Cardinality,
    #[serde(with = "ext::real")]
    pub one_nonatomic_measure: f64,
    #[serde(with = "ext::real")]
    pub infty_nonatomic_measure: f64,
}

impl OneInftyStructure {
    /// `p⁻¹({1, +∞})` consists of finitely many atoms at most.
    pub fn finitely_many_atoms(&self) -> bool {
        self.one_atoms.is_finite()
            && self.infty_atoms.is_finite()
            && self.one_nonatomic_measure == 0.0
            && self.infty_nonatomic_measure == 0.0
    }
}

/// Essential infima and suprema of `p` over the distinguished subsets of Ω.
///
/// `None` marks an empty (null) subset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedScalars {
    #[serde(with = "ext::real")]
    pub p_minus: f64,
    #[serde(with = "ext::real")]
    pub p_plus: f64,
    /// `p₊(Ω_f)`, with `Ω_f = {p < ∞}`.
    #[serde(with = "ext::opt_real")]
    pub p_plus_finite_part: Option<f64>,
    /// `p₋(Ω \ p⁻¹({1}))`.
    #[serde(with = "ext::opt_real")]
    pub p_minus_off_one: Option<f64>,
    /// `p₋(Ω*)` with `Ω* = Ω \ p⁻¹({1, +∞})`.
    #[serde(with = "ext::opt_real")]
    pub p_minus_star: Option<f64>,
    /// `p₊(Ω*)`.
    #[serde(with = "ext::opt_real")]
    pub p_plus_star: Option<f64>,
    pub one_infty_structure: OneInftyStructure,
    pub purely_atomic: bool,
    /// At least one countably infinite family, and every such family has
    /// exponents converging to 1.
    pub infinite_families_tend_to_one: bool,
}

#[derive(Default)]
struct Extremes(Option<(f64, f64)>);

impl Extremes {
    fn push(&mut self, inf: f64, sup: f64) {
        self.0 = Some(match self.0 {
            Some((a, b)) => (a.min(inf), b.max(sup)),
            None => (inf, sup),
        });
    }

    fn inf(&self) -> Option<f64> {
        self.0.map(|x| x.0)
    }

    fn sup(&self) -> Option<f64> {
        self.0.map(|x| x.1)
    }
}

/// Compute every derived scalar of `spec` in closed form.
pub fn derive_scalars(spec: &ExponentSpec) -> DerivedScalars {
    let mut all = Extremes::default();
    let mut finite = Extremes::default();
    let mut off_one = Extremes::default();
    let mut star = Extremes::default();
    let mut st = OneInftyStructure {
        one_atoms: Cardinality::Finite(0),
        infty_atoms: Cardinality::Finite(0),
        one_nonatomic_measure: 0.0,
        infty_nonatomic_measure: 0.0,
    };

    // (kind, exponent, member count, total weight) for each constant run
    let mut runs: Vec<(RegionKind, f64, Cardinality, f64)> = spec
        .regions()
        .iter()
        .map(|r| (r.kind, r.exponent.value(), Cardinality::Finite(1), r.weight))
        .collect();

    for fam in spec.families() {
        for piece in fam.pieces() {
            match piece {
                Piece::Run { from, to, exponent } => {
                    runs.push((fam.kind, exponent, piece.len(), fam.weights.sum(from, to)))
                }
                Piece::Monotone { inf, sup, .. } => {
                    all.push(inf, sup);
                    finite.push(inf, sup);
                    off_one.push(inf, sup);
                    star.push(inf, sup);
                }
            }
        }
    }

    for (kind, p, count, weight) in runs {
        all.push(p, p);
        if p.is_finite() {
            finite.push(p, p);
        }
        if p != 1.0 {
            off_one.push(p, p);
        }
        if p > 1.0 && p.is_finite() {
            star.push(p, p);
        }
        let (atoms, measure) = if p == 1.0 {
            (&mut st.one_atoms, &mut st.one_nonatomic_measure)
        } else if p.is_infinite() {
            (&mut st.infty_atoms, &mut st.infty_nonatomic_measure)
        } else {
            continue;
        };
        match kind {
            RegionKind::Atom => *atoms = atoms.saturating_add(count),
            RegionKind::Nonatomic => *measure += weight,
        }
    }

    let infinite: Vec<_> = spec
        .families()
        .iter()
        .filter(|f| !f.count.is_finite())
        .collect();

    DerivedScalars {
        p_minus: all.inf().expect("validated specs are nonempty"),
        p_plus: all.sup().expect("validated specs are nonempty"),
        p_plus_finite_part: finite.sup(),
        p_minus_off_one: off_one.inf(),
        p_minus_star: star.inf(),
        p_plus_star: star.sup(),
        one_infty_structure: st,
        purely_atomic: spec.regions().iter().all(|r| r.kind == RegionKind::Atom)
            && spec.families().iter().all(|f| f.kind == RegionKind::Atom),
        infinite_families_tend_to_one: !infinite.is_empty()
            && infinite.iter().all(|f| f.exponents.limit() == 1.0),
    }
}
