//! Variable-exponent Lebesgue spaces `L^{p(·)}(Ω)` over finitely described
//! σ-finite measure spaces.
//!
//! * [`exponent`]: measure-space descriptions, derived scalars and the
//!   structural classification.
//! * [`modular`]: simple functions and exact modular evaluation.
//! * [`norm`]: the Luxemburg norm by certified bisection.
//! * [`constructions`]: finite truncations of the ℓ∞ copy, the FPP basis and
//!   the Nakano basis, with sampled certificate checks.
//! * [`lab`]: Krasnoselskii–Mann iteration and Lipschitz sampling for
//!   built-in operators.

pub mod cli;
pub mod constructions;
pub mod error;
pub mod exponent;
pub mod ext;
pub mod lab;
pub mod modular;
pub mod norm;
pub mod rng;

pub use error::{Error, Result};
pub use exponent::{
    classify, derive_scalars, ClassificationFlags, ClassificationReport, DerivedScalars, Exponent,
    ExponentSeq, ExponentSpec, Region, RegionFamily, RegionKind, RegionRef, WeightSeq,
};
pub use ext::Cardinality;
pub use modular::{rho, ExtendedNonneg, SimpleFunction, Term};
pub use norm::{luxemburg_norm, NormResult, DEFAULT_TOL};
