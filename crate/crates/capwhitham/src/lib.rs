//! Rigorous existence and spectral stability proofs for solitary waves of
//! the capillary-gravity Whitham equation
//!
//! ```text
//! M_T u - c u + u² = 0,    m_T(ξ) = √(tanh(ξ)(1 + Tξ²)/ξ),
//! ```
//!
//! built on outward-rounded interval arithmetic.
//!
//! The pipeline is split into modules that mirror its stages:
//!
//! * [`rigor`]: intervals, complex boxes, interval matrices and norm bounds.
//! * [`symbols`]: enclosures of the Fourier symbols `m_T`, `l_ν` and `l`.
//! * [`fourier`]: cosine and exponential coefficient sequences.
//! * [`approx`]: floating-point construction of the approximate solution,
//!   approximate inverses and approximate eigenpairs.
//! * [`strip`]: the verified analyticity strip and the kernel decay constants.
//! * [`inverse`]: rigorous assembly of the approximate inverse and its norm.
//! * [`bounds`]: the residual and contraction bounds `Y0`, `Z1`, `Z2`.
//! * [`certify`]: the radii polynomial, regularity check and certificates.
//! * [`spectral`]: eigenvalue enclosures, the injectivity sweep and the
//!   stability verdict.
//! * [`cli`]: the command-line front end.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod approx;
pub mod bounds;
pub mod certify;
pub mod cli;
pub mod error;
pub mod fourier;
pub mod inverse;
pub mod rigor;
pub mod spectral;
pub mod strip;
pub mod symbols;

pub use error::{Error, Result};
