//! Numerical toolkit for the tetrablock
//!
//! E = {(a11, a22, det A) : A in M2(C), ||A|| < 1} and its distinguished boundary,
//! tetrablock contractions, their fundamental operators and the block Toeplitz
//! isometric dilation built from them.
//!
//! Modules, bottom-up:
//! - [`matrix`]: dense complex matrices, operator norm, defect operators, pseudo-inverses,
//!   Haar-random unitaries.
//! - [`domain`]: membership in E, its closure and the distinguished boundary; inscribed
//!   polydisk radius.
//! - [`calculus`]: trivariate polynomials, evaluation on points and commuting triples,
//!   sup-norm estimates, Blaschke factors, Knese and Schwarz inequalities.
//! - [`structure`]: commuting triples, joint spectrum, certification, fundamental operators.
//! - [`dilation`]: truncated dilation tuples and their residual checks.
//! - [`counterexample`]: the end-to-end pipeline for the nilpotent family.

pub mod calculus;
pub mod counterexample;
pub mod dilation;
pub mod domain;
mod error;
pub mod matrix;
mod optim;
pub mod seed;
pub mod structure;

pub use num_complex::Complex64 as C64;

pub use calculus::{KneseReport, Poly3, SchwarzBound};
pub use counterexample::{CounterexampleRecord, LambdaSource, Pipeline, PipelineConfig};
pub use dilation::{ResidualReport, ToeplitzSymbol, TruncatedDilation};
pub use domain::{MembershipStatus, MembershipVerdict, TetraPoint};
pub use error::{Result, TetraError};
pub use matrix::ComplexMatrix;
pub use structure::{
    CertMethod, CertificationReport, CommutingTriple, FundamentalPair, Metric, Verdict,
};

/// Shorthand for building a complex scalar.
#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
