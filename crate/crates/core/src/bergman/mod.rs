//! Weighted Bergman projection onto polynomial spans.
//!
//! The chain is: sample a weight and grid, build the Gram matrix of a
//! monomial basis, orthonormalize it, then project test functions by
//! taking moments. `tensor2` extends the machinery to product weights
//! in two variables.

pub mod basis;
pub mod gram;
pub mod measure;
pub mod ortho;
pub mod project;
pub mod tensor2;
pub mod testfn;

pub use basis::{Basis, BasisKind};
pub use gram::{gram_matrix, gram_matrix_with};
pub use measure::{inner_product, inner_product_with, WeightedMeasure};
pub use ortho::{orthonormalize, OrthoFactor};
pub use project::{
    bergman_kernel, project, project_samples, project_with, residual, sample_function, Projection,
    Residual,
};
pub use testfn::{bump, narrow_bump, standard_bump, TestFunction};
