//! # mdlt — multidimensional Laplace transform toolkit
//!
//! Numerics for the vector-valued Laplace transform in n ≥ 1 time
//! variables (the interesting cases being n = 2, 3):
//!
//! - forward transforms in absolute, iterated-improper and bounded-partial
//!   modes, with convergence-region estimation and point classification
//!   ([`transform`]);
//! - the operational calculus: shift, delay, damping, derivative-of-transform,
//!   fractional integrals and the Faltung convolution with its product
//!   theorem ([`operational`]);
//! - two inversion routes — the multidimensional Post-Widder formula and
//!   Bromwich-type contour quadrature — plus Tauberian initial/final value
//!   extrapolation and a uniqueness oracle ([`inversion`]);
//! - transform-domain solvers for 2D fractional Cauchy problems
//!   (Riemann-Liouville and Caputo), degenerate Volterra problems with
//!   matrix coefficients, and the complete second-order problem, along with
//!   the initial-condition scheduling procedure ([`solvers`]);
//! - the special functions the pairs are built from: the Gamma kernel g_ζ,
//!   Mittag-Leffler E_{α,β} and the Wright function Φ_γ ([`special`]).
//!
//! The `mdlt` binary drives all of this from JSON configs; see the crate
//! examples for library usage, one per capability.

pub mod cli;
pub mod dd;
pub mod error;
pub mod function;
pub mod gamma;
pub mod inversion;
pub mod operational;
pub mod quad;
pub mod registry;
pub mod solvers;
pub mod special;
pub mod transform;

pub use error::{Error, Result};
pub use function::{Envelope, VectorFunction};
pub use transform::{LaplacePoint, QuadratureConfig, TransformResult};

/// Complex scalar used throughout.
pub type Cx = num_complex::Complex64;
