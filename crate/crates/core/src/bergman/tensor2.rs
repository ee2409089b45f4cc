//! Two-variable extension for product weights φ(z₁, z₂) = φ₁(z₁) + φ₂(z₂).
//!
//! On a product domain the projection factorizes, P(u₁⊗u₂) = P₁u₁ ⊗ P₂u₂,
//! so the 2d computation reduces to two planar projections on the same
//! grid. Degrees are capped hard: the product Gram problem squares the
//! conditioning, and past degree 12 per factor nothing is gained.

use num_complex::Complex64;

use crate::bergman::basis::Basis;
use crate::bergman::gram::gram_matrix;
use crate::bergman::measure::WeightedMeasure;
use crate::bergman::ortho::orthonormalize;
use crate::bergman::project::{project_with, Projection};
use crate::bergman::testfn::TestFunction;
use crate::geometry::Quadrature;
use crate::weights::Weight;
use crate::Result;

pub const MAX_FACTOR_DEGREE: usize = 12;

#[derive(Debug, Clone)]
pub struct ProductProjection {
    pub p1: Projection,
    pub p2: Projection,
}

impl ProductProjection {
    pub fn eval(&self, z1: Complex64, z2: Complex64) -> Complex64 {
        self.p1.eval(z1) * self.p2.eval(z2)
    }

    pub fn degree(&self) -> usize {
        self.p1.basis.degree
    }
}

pub fn project_product(
    u1: &TestFunction,
    u2: &TestFunction,
    w1: &Weight,
    w2: &Weight,
    q: &Quadrature,
    k: f64,
    degree: usize,
) -> Result<ProductProjection> {
    let d = degree.min(MAX_FACTOR_DEGREE);
    let basis = Basis::monomials(&q.rect, d);
    let eigen_floor = 1e-12;

    let g1 = gram_matrix(&basis, q, w1, k);
    let f1 = orthonormalize(&g1, eigen_floor)?;
    let m1 = WeightedMeasure::new(q, w1, k);
    let p1 = project_with(u1, &basis, &f1, q, &m1)?;

    let g2 = gram_matrix(&basis, q, w2, k);
    let f2 = orthonormalize(&g2, eigen_floor)?;
    let m2 = WeightedMeasure::new(q, w2, k);
    let p2 = project_with(u2, &basis, &f2, q, &m2)?;

    Ok(ProductProjection { p1, p2 })
}
