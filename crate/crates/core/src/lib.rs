//! Numerical laboratory for weighted Bergman projections near totally real
//! zero sets in the complex plane.
//!
//! The pipeline discretizes the weighted Bergman space A²(Ω, e^{-kφ}) on a
//! midpoint tensor grid, orthonormalizes a polynomial basis against the
//! weighted measure, and measures how fast the projection residual
//! v = u − P_k u collapses on the zero set E = {φ = 0} as k grows. On top
//! of the projection sit estimate checks (L² ratios, weighted sup ratios,
//! Agmon-decay ratios, a Cauchy–Pompeiu reconstruction of v from ∂̄-data)
//! and a Gaussian-convolution comparator for the model case E = ℝ.
//!
//! Everything is deterministic: quadrature sums are folded in a fixed row
//! order, so reports are byte-identical across runs and across the
//! `parallel` feature flag.

mod error;
mod exec;

pub mod bergman;
pub mod comparators;
pub mod estimates;
pub mod experiment;
pub mod geometry;
pub mod weights;

pub use error::Error;
pub use exec::PARALLEL;
pub use num_complex::Complex64;

pub type Result<T> = std::result::Result<T, Error>;
