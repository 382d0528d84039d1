//! Spectral computations for finite-rank real linear operators.
//!
//! An operator `R = C + Bτ` acts on ℂⁿ as `z ↦ Cz + B·conj(z)`. Its spectrum is
//! the zero set of the real analytic characteristic polynomial
//! `p(λ, λ̄) = det[[C − λ, B], [conj(B), conj(C) − λ̄]]`, a plane curve rather
//! than a finite point set. The modules here cover:
//!
//! - [`oplib`]: operator algebra, complexification, realification and norms.
//! - [`charpoly`]: the Hermitian coefficient matrix of `p`, sum-of-squares
//!   forms and spectrum emptiness certificates.
//! - [`spectrum`]: the spectrum as a point cloud from ray sweeps, eigenvectors
//!   and invariant-subspace tests.
//! - [`numfun`]: the numerical function `F = p / Σ|λ|^{2j}` and its coverage
//!   of the field of values of the coefficient matrix.
//! - [`traceclass`]: Hankel and Bergman-space Friedrichs truncations and the
//!   limit of normalized characteristic polynomials.

pub mod charpoly;
pub mod error;
pub mod format;
pub mod linalg;
pub mod numfun;
pub mod oplib;
pub mod spectrum;
pub mod traceclass;

pub use error::{Error, Result};
pub use linalg::{CMat, CVec};
pub use oplib::RealLinearOperator;
