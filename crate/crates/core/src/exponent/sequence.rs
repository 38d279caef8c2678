//! Closed-form weight and exponent sequences for region families.
//!
//! Members are indexed from 1. Every sequence kind decomposes into a short
//! list of [`Piece`]s over index ranges, which is what the scalar
//! derivation and band searches work on, so no infinite enumeration is ever
//! needed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ext::Cardinality;

use super::Exponent;

/// Upper index used when binary-searching an unbounded monotone range.
/// Beyond 2^53 member indices are no longer exactly representable as `f64`.
const SEARCH_CAP: u64 = 1 << 53;

/// Positive member weights `μ(A_n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightSeq {
    /// `w` for every member.
    Constant { w: f64 },
    /// `w · r^(n-1)`.
    Geometric { w: f64, r: f64 },
    /// Explicit leading weights, then `then` forever.
    Prefix { values: Vec<f64>, then: f64 },
}

/// Member exponents `p_n ∈ [1, +∞]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExponentSeq {
    /// `c` for every member.
    Constant { c: Exponent },
    /// `1 + a / n^b`, strictly decreasing towards 1.
    HarmonicApproach { a: f64, b: f64 },
    /// `1 + a · r^n`, strictly decreasing towards 1.
    GeometricApproach { a: f64, r: f64 },
    /// `start + slope · (n - 1)`, strictly increasing towards +∞.
    LinearGrowth { start: f64, slope: f64 },
    /// Explicit leading exponents, then `then` forever.
    Prefix {
        values: Vec<Exponent>,
        then: Exponent,
    },
}

/// A run of consecutive members `[from, to)` (`to = None` means unbounded)
/// whose exponents share a closed-form description.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Piece {
    /// Every member in the range has the same exponent.
    Run {
        from: u64,
        to: Option<u64>,
        exponent: f64,
    },
    /// Strictly monotone, finite exponents in `(1, ∞)`. `inf`/`sup` are the
    /// exact infimum and supremum over the range (possibly unattained).
    Monotone {
        from: u64,
        to: Option<u64>,
        increasing: bool,
        inf: f64,
        sup: f64,
    },
}

impl Piece {
    pub(crate) fn range(&self) -> (u64, Option<u64>) {
        match *self {
            Piece::Run { from, to, .. } | Piece::Monotone { from, to, .. } => (from, to),
        }
    }

    pub(crate) fn len(&self) -> Cardinality {
        match self.range() {
            (from, Some(to)) => Cardinality::Finite(to - from),
            (_, None) => Cardinality::Infinite,
        }
    }
}

fn end_of(count: Cardinality) -> Option<u64> {
    match count {
        Cardinality::Finite(n) => Some(n + 1),
        Cardinality::Infinite => None,
    }
}

fn positive_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Validation(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

fn prefix_fits(len: usize, count: Cardinality) -> Result<()> {
    match count {
        Cardinality::Finite(n) if (n as usize) < len => Err(Error::Validation(format!(
            "prefix of length {len} exceeds family count {n}"
        ))),
        _ => Ok(()),
    }
}

impl WeightSeq {
    pub(crate) fn validate(&self, count: Cardinality) -> Result<()> {
        match self {
            WeightSeq::Constant { w } => positive_finite("weight w", *w),
            WeightSeq::Geometric { w, r } => {
                positive_finite("weight w", *w)?;
                positive_finite("weight ratio r", *r)
            }
            WeightSeq::Prefix { values, then } => {
                for v in values {
                    positive_finite("prefix weight", *v)?;
                }
                positive_finite("tail weight", *then)?;
                prefix_fits(values.len(), count)
            }
        }
    }

    /// Weight of member `n` (1-based).
    pub fn weight(&self, n: u64) -> f64 {
        match self {
            WeightSeq::Constant { w } => *w,
            WeightSeq::Geometric { w, r } => w * r.powf((n - 1) as f64),
            WeightSeq::Prefix { values, then } => {
                values.get((n - 1) as usize).copied().unwrap_or(*then)
            }
        }
    }

    /// `Σ_{n = from}^{to - 1} weight(n)`; `to = None` sums the whole tail and
    /// may return `+∞`.
    pub fn sum(&self, from: u64, to: Option<u64>) -> f64 {
        if let Some(t) = to {
            if t <= from {
                return 0.0;
            }
        }
        match self {
            WeightSeq::Constant { w } => match to {
                Some(t) => w * (t - from) as f64,
                None => f64::INFINITY,
            },
            WeightSeq::Geometric { w, r } => {
                let first = w * r.powf((from - 1) as f64);
                match to {
                    Some(t) if *r == 1.0 => first * (t - from) as f64,
                    Some(t) => first * (1.0 - r.powf((t - from) as f64)) / (1.0 - r),
                    None if *r < 1.0 => first / (1.0 - r),
                    None => f64::INFINITY,
                }
            }
            WeightSeq::Prefix { values, then } => {
                let plen = values.len() as u64;
                let explicit: f64 = (from..to.unwrap_or(u64::MAX).min(plen + 1))
                    .map(|n| values[(n - 1) as usize])
                    .sum();
                let tail_from = from.max(plen + 1);
                let tail = match to {
                    Some(t) if t <= tail_from => 0.0,
                    Some(t) => then * (t - tail_from) as f64,
                    None => f64::INFINITY,
                };
                explicit + tail
            }
        }
    }
}

impl ExponentSeq {
    pub(crate) fn validate(&self, count: Cardinality) -> Result<()> {
        match self {
            ExponentSeq::Constant { .. } => Ok(()),
            ExponentSeq::HarmonicApproach { a, b } => {
                positive_finite("harmonic-approach a", *a)?;
                positive_finite("harmonic-approach b", *b)
            }
            ExponentSeq::GeometricApproach { a, r } => {
                positive_finite("geometric-approach a", *a)?;
                if *r > 0.0 && *r < 1.0 {
                    Ok(())
                } else {
                    Err(Error::Validation(format!(
                        "geometric-approach ratio r must lie in (0, 1), got {r}"
                    )))
                }
            }
            ExponentSeq::LinearGrowth { start, slope } => {
                if !(start.is_finite() && *start >= 1.0) {
                    return Err(Error::Validation(format!(
                        "linear-growth start must be finite and >= 1, got {start}"
                    )));
                }
                positive_finite("linear-growth slope", *slope)
            }
            ExponentSeq::Prefix { values, .. } => prefix_fits(values.len(), count),
        }
    }

    /// Exponent of member `n` (1-based); `+∞` is returned as `f64::INFINITY`.
    pub fn value(&self, n: u64) -> f64 {
        let x = n as f64;
        match self {
            ExponentSeq::Constant { c } => c.value(),
            ExponentSeq::HarmonicApproach { a, b } => 1.0 + a / x.powf(*b),
            ExponentSeq::GeometricApproach { a, r } => 1.0 + a * r.powf(x),
            ExponentSeq::LinearGrowth { start, slope } => start + slope * (x - 1.0),
            ExponentSeq::Prefix { values, then } => values
                .get((n - 1) as usize)
                .map_or(then.value(), |e| e.value()),
        }
    }

    /// Limit of the exponent sequence as `n → ∞`.
    pub fn limit(&self) -> f64 {
        match self {
            ExponentSeq::Constant { c } => c.value(),
            ExponentSeq::HarmonicApproach { .. } | ExponentSeq::GeometricApproach { .. } => 1.0,
            ExponentSeq::LinearGrowth { .. } => f64::INFINITY,
            ExponentSeq::Prefix { then, .. } => then.value(),
        }
    }

    /// Whether the exponents are strictly decreasing in `n`.
    pub fn is_strictly_decreasing(&self) -> bool {
        matches!(
            self,
            ExponentSeq::HarmonicApproach { .. } | ExponentSeq::GeometricApproach { .. }
        )
    }

    pub(crate) fn pieces(&self, count: Cardinality) -> Vec<Piece> {
        let end = end_of(count);
        let monotone = |from: u64, increasing: bool| {
            let first = self.value(from);
            let last = end.map(|e| self.value(e - 1));
            let (inf, sup) = if increasing {
                (first, last.unwrap_or(f64::INFINITY))
            } else {
                (last.unwrap_or(1.0), first)
            };
            Piece::Monotone {
                from,
                to: end,
                increasing,
                inf,
                sup,
            }
        };
        match self {
            ExponentSeq::Constant { c } => vec![Piece::Run {
                from: 1,
                to: end,
                exponent: c.value(),
            }],
            ExponentSeq::HarmonicApproach { .. } | ExponentSeq::GeometricApproach { .. } => {
                vec![monotone(1, false)]
            }
            ExponentSeq::LinearGrowth { start, .. } => {
                if *start > 1.0 {
                    return vec![monotone(1, true)];
                }
                // the first member sits exactly at p = 1
                let mut out = vec![Piece::Run {
                    from: 1,
                    to: Some(2),
                    exponent: 1.0,
                }];
                if end != Some(2) {
                    out.push(monotone(2, true));
                }
                out
            }
            ExponentSeq::Prefix { values, then } => {
                let mut out: Vec<Piece> = values
                    .iter()
                    .enumerate()
                    .map(|(i, e)| Piece::Run {
                        from: i as u64 + 1,
                        to: Some(i as u64 + 2),
                        exponent: e.value(),
                    })
                    .collect();
                let tail_from = values.len() as u64 + 1;
                if end.is_none_or(|e| e > tail_from) {
                    out.push(Piece::Run {
                        from: tail_from,
                        to: end,
                        exponent: then.value(),
                    });
                }
                out
            }
        }
    }

    /// Smallest member index in `1..=count` whose exponent satisfies `pred`,
    /// where `pred` must be monotone along each monotone piece in the
    /// direction given by `accepts_from_above` (see callers).
    fn search(
        &self,
        count: Cardinality,
        pred: impl Fn(f64) -> bool,
        // For a decreasing piece: the predicate `value <= bound`, whose
        // satisfying set is a suffix. For an increasing piece: `value >= bound`.
        suffix_dec: impl Fn(f64) -> bool,
        suffix_inc: impl Fn(f64) -> bool,
    ) -> Option<u64> {
        for piece in self.pieces(count) {
            match piece {
                Piece::Run { from, exponent, .. } => {
                    if pred(exponent) {
                        return Some(from);
                    }
                }
                Piece::Monotone {
                    from,
                    to,
                    increasing,
                    ..
                } => {
                    let last = to.map_or(SEARCH_CAP, |t| t - 1);
                    let suffix: &dyn Fn(f64) -> bool =
                        if increasing { &suffix_inc } else { &suffix_dec };
                    if !suffix(self.value(last)) {
                        continue;
                    }
                    let (mut lo, mut hi) = (from, last);
                    while lo < hi {
                        let mid = lo + (hi - lo) / 2;
                        if suffix(self.value(mid)) {
                            hi = mid;
                        } else {
                            lo = mid + 1;
                        }
                    }
                    if pred(self.value(lo)) {
                        return Some(lo);
                    }
                }
            }
        }
        None
    }

    /// Smallest member index whose exponent lies in the band `(lo, hi]`.
    pub fn first_index_in_band(&self, lo: f64, hi: f64, count: Cardinality) -> Option<u64> {
        self.search(count, |p| p > lo && p <= hi, |p| p <= hi, |p| p > lo)
    }

    /// Smallest member index whose exponent is finite and at least `threshold`.
    pub fn first_index_at_least(&self, threshold: f64, count: Cardinality) -> Option<u64> {
        self.search(
            count,
            |p| p.is_finite() && p >= threshold,
            // decreasing pieces: the first member is the largest
            |_| true,
            |p| p >= threshold,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(v: f64) -> Exponent {
        Exponent::new(v).unwrap()
    }

    #[test]
    fn geometric_weight_sums() {
        let w = WeightSeq::Geometric { w: 0.5, r: 0.5 };
        assert_eq!(w.sum(1, None), 1.0);
        assert_eq!(w.sum(1, Some(3)), 0.75);
        assert_eq!(w.sum(2, None), 0.5);
        assert_eq!(
            WeightSeq::Geometric { w: 1.0, r: 1.5 }.sum(1, None),
            f64::INFINITY
        );
    }

    #[test]
    fn prefix_weight_sums() {
        let w = WeightSeq::Prefix {
            values: vec![1.0, 2.0, 3.0],
            then: 0.5,
        };
        assert_eq!(w.sum(1, Some(6)), 7.0);
        assert_eq!(w.sum(3, Some(5)), 3.5);
        assert_eq!(w.sum(4, Some(6)), 1.0);
        assert_eq!(w.sum(2, None), f64::INFINITY);
        assert_eq!(w.weight(2), 2.0);
        assert_eq!(w.weight(9), 0.5);
    }

    #[test]
    fn harmonic_pieces_finite_and_infinite() {
        let s = ExponentSeq::HarmonicApproach { a: 1.0, b: 1.0 };
        match &s.pieces(Cardinality::Infinite)[0] {
            Piece::Monotone { inf, sup, .. } => assert_eq!((*inf, *sup), (1.0, 2.0)),
            p => panic!("unexpected {p:?}"),
        }
        match &s.pieces(Cardinality::Finite(4))[0] {
            Piece::Monotone { inf, sup, .. } => assert_eq!((*inf, *sup), (1.25, 2.0)),
            p => panic!("unexpected {p:?}"),
        }
    }

    #[test]
    fn linear_growth_from_one_splits_first_member() {
        let s = ExponentSeq::LinearGrowth {
            start: 1.0,
            slope: 2.0,
        };
        let pieces = s.pieces(Cardinality::Infinite);
        assert_eq!(pieces.len(), 2);
        assert_eq!(
            pieces[0],
            Piece::Run {
                from: 1,
                to: Some(2),
                exponent: 1.0
            }
        );
        assert_eq!(s.pieces(Cardinality::Finite(1)).len(), 1);
    }

    #[test]
    fn band_search_on_decreasing_sequence() {
        // 1 + 1/n: band (1 + 1/8, 1 + 1/4] holds n = 4..7
        let s = ExponentSeq::HarmonicApproach { a: 1.0, b: 1.0 };
        assert_eq!(
            s.first_index_in_band(1.125, 1.25, Cardinality::Infinite),
            Some(4)
        );
        assert_eq!(
            s.first_index_in_band(1.125, 1.25, Cardinality::Finite(3)),
            None
        );
        assert_eq!(s.first_index_in_band(2.0, 3.0, Cardinality::Infinite), None);
    }

    #[test]
    fn band_search_on_increasing_and_prefix() {
        let s = ExponentSeq::LinearGrowth {
            start: 2.0,
            slope: 1.0,
        };
        assert_eq!(
            s.first_index_in_band(5.5, 7.0, Cardinality::Infinite),
            Some(5)
        );
        assert_eq!(
            s.first_index_at_least(720.5, Cardinality::Infinite),
            Some(720)
        );
        let p = ExponentSeq::Prefix {
            values: vec![e(3.0), e(1.2)],
            then: e(1.7),
        };
        assert_eq!(
            p.first_index_in_band(1.1, 1.5, Cardinality::Infinite),
            Some(2)
        );
        assert_eq!(
            p.first_index_in_band(1.5, 2.0, Cardinality::Infinite),
            Some(3)
        );
        assert_eq!(p.first_index_at_least(2.5, Cardinality::Infinite), Some(1));
    }

    #[test]
    fn validation_rejects_bad_parameters() {
        let inf = Cardinality::Infinite;
        assert!(ExponentSeq::GeometricApproach { a: 1.0, r: 1.0 }
            .validate(inf)
            .is_err());
        assert!(ExponentSeq::GeometricApproach { a: 0.0, r: 0.5 }
            .validate(inf)
            .is_err());
        assert!(ExponentSeq::HarmonicApproach { a: -1.0, b: 1.0 }
            .validate(inf)
            .is_err());
        assert!(ExponentSeq::LinearGrowth {
            start: 0.5,
            slope: 1.0
        }
        .validate(inf)
        .is_err());
        assert!(WeightSeq::Constant { w: 0.0 }.validate(inf).is_err());
        let p = WeightSeq::Prefix {
            values: vec![1.0, 1.0, 1.0],
            then: 1.0,
        };
        assert!(p.validate(Cardinality::Finite(2)).is_err());
    }
}
