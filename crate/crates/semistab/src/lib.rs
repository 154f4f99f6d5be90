//! Numerical toolkit for the asymptotics of matrix semigroups `t -> e^{tA}`.
//!
//! The crate computes spectral bounds, growth bounds, spectral resolutions of
//! diagonalizable matrices, exponential stability constants, and certified
//! suprema of resolvent norms along the imaginary axis, for dense complex
//! matrices and truncated diagonal operators.
//!
//! Sign convention: the resolvent is `R(lambda, A) = (A - lambda I)^{-1}`
//! throughout, including the minus sign in the Laplace representation
//! `R(lambda, A) f = -\int_0^\infty e^{-lambda t} e^{tA} f dt`.

// `!(x > 0.0)` guards are deliberate: they reject NaN along with the
// out-of-range values, which `x <= 0.0` would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod demo;
pub mod error;
pub mod io;
pub mod linalg;
pub mod semigroup;
pub mod spectral;
pub mod stability;

pub use error::{Error, Result};

/// Seed governing every randomized internal (power-iteration starts,
/// random subset sampling, half-plane sampling) unless overridden.
pub const DEFAULT_SEED: u64 = 42;
