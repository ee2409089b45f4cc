//! Scaled holomorphic polynomial bases b_j(z) = ((z − c)/s)^j.

use num_complex::Complex64;

use crate::geometry::Rect;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    /// Adaptive-degree monomial family; the degree is chosen by the caller.
    Monomials,
    /// Degree tied to k (polynomials of degree k, capped).
    PolynomialsDegK,
}

/// Monomials in w = (z − center)/scale up to `degree`. The scale (the
/// domain's larger half-width) keeps |w| = O(1) on the domain, which is the
/// only thing standing between the Gram matrix and a 2^degree condition
/// number blowup.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Basis {
    pub kind: BasisKind,
    pub center: Complex64,
    pub scale: f64,
    pub degree: usize,
}

impl Basis {
    pub fn monomials(domain: &Rect, degree: usize) -> Basis {
        Basis {
            kind: BasisKind::Monomials,
            center: domain.center,
            scale: domain.half_width_x.max(domain.half_width_y),
            degree,
        }
    }

    /// Degree floor(k), capped at `max_degree`.
    pub fn polynomials_deg_k(domain: &Rect, k: f64, max_degree: usize) -> Basis {
        let degree = (k.max(0.0).floor() as usize).min(max_degree);
        Basis { kind: BasisKind::PolynomialsDegK, degree, ..Basis::monomials(domain, 0) }
    }

    pub fn len(&self) -> usize {
        self.degree + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn rescale(&self, z: Complex64) -> Complex64 {
        (z - self.center) / self.scale
    }

    /// b_j(z).
    pub fn eval(&self, j: usize, z: Complex64) -> Complex64 {
        self.rescale(z).powu(j as u32)
    }

    /// Fills out[j] = b_j(z) for all j by incremental multiplication.
    pub fn fill_row(&self, z: Complex64, out: &mut [Complex64]) {
        let w = self.rescale(z);
        let mut p = Complex64::new(1.0, 0.0);
        for slot in out.iter_mut() {
            *slot = p;
            p *= w;
        }
    }

    /// Σ_j coeffs[j]·b_j(z) by Horner's rule in w.
    pub fn eval_poly(&self, coeffs: &[Complex64], z: Complex64) -> Complex64 {
        let w = self.rescale(z);
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in coeffs.iter().rev() {
            acc = acc * w + c;
        }
        acc
    }
}

#[cfg(test)]
pub(crate) fn dbar_residual<F>(f: F, z: Complex64) -> Complex64
where
    F: Fn(Complex64) -> Complex64,
{
    // 4th-order 5-point stencil; at h = 1e-3 the truncation error for a
    // degree-40 polynomial on the unit box sits near 1e-13
    let h = 1e-3;
    let d = |dir: Complex64| {
        (-f(z + 2.0 * h * dir) + 8.0 * f(z + h * dir) - 8.0 * f(z - h * dir) + f(z - 2.0 * h * dir))
            / (12.0 * h)
    };
    0.5 * (d(Complex64::new(1.0, 0.0)) + Complex64::i() * d(Complex64::i()))
}
