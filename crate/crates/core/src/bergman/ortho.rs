//! Orthonormalization of a polynomial basis against a Gram matrix.
//!
//! Eigendecompose the Hermitian G, drop directions below a relative
//! eigenvalue floor, and map raw coefficients through T = Q·Λ^{-1/2}.
//! One symmetric refinement pass T ← T·(T†GT)^{-1/2} scrubs the
//! first-order error of the eigensolver; further passes only churn the
//! evaluation noise of T†GT itself.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::Error;
use crate::Result;

#[derive(Debug, Clone)]
pub struct OrthoFactor {
    /// n×r map from orthonormal coordinates to raw basis coefficients.
    pub transform: DMatrix<Complex64>,
    pub effective_rank: usize,
    /// λ_max/λ_min over the retained spectrum.
    pub condition: f64,
    pub eigen_floor: f64,
    /// Retained Gram eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
}

impl OrthoFactor {
    /// Raw coefficients of the orthonormal element with coordinates c.
    pub fn to_raw(&self, c: &[Complex64]) -> Vec<Complex64> {
        let n = self.transform.nrows();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (j, &cj) in c.iter().enumerate() {
            for (i, o) in out.iter_mut().enumerate() {
                *o += self.transform[(i, j)] * cj;
            }
        }
        out
    }
}

fn hermitian_sqrt_inv(m: &DMatrix<Complex64>) -> Option<DMatrix<Complex64>> {
    let sym = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    let mut d = DMatrix::zeros(m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        let l = eig.eigenvalues[i];
        if l <= 0.0 {
            return None;
        }
        d[(i, i)] = Complex64::new(1.0 / l.sqrt(), 0.0);
    }
    Some(&eig.eigenvectors * d * eig.eigenvectors.adjoint())
}

pub fn orthonormalize(g: &DMatrix<Complex64>, eigen_floor: f64) -> Result<OrthoFactor> {
    let n = g.nrows();
    if n == 0 || g.ncols() != n {
        return Err(Error::DegenerateBasis);
    }
    let sym = (g + g.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(sym.clone());

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let lambda_max = eig.eigenvalues[order[0]];
    if !(lambda_max > 0.0) {
        return Err(Error::DegenerateBasis);
    }

    let keep: Vec<usize> = order
        .into_iter()
        .filter(|&i| {
            let l = eig.eigenvalues[i];
            l > 0.0 && l >= eigen_floor * lambda_max
        })
        .collect();
    if keep.is_empty() {
        return Err(Error::DegenerateBasis);
    }

    let r = keep.len();
    let mut transform = DMatrix::zeros(n, r);
    let mut eigenvalues = Vec::with_capacity(r);
    for (j, &i) in keep.iter().enumerate() {
        let l = eig.eigenvalues[i];
        eigenvalues.push(l);
        let s = 1.0 / l.sqrt();
        for row in 0..n {
            transform[(row, j)] = eig.eigenvectors[(row, i)] * s;
        }
    }

    let m = transform.adjoint() * &sym * &transform;
    if let Some(half) = hermitian_sqrt_inv(&m) {
        transform *= half;
    }

    let condition = eigenvalues[0] / eigenvalues[r - 1];
    Ok(OrthoFactor { transform, effective_rank: r, condition, eigen_floor, eigenvalues })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;

    fn cm(v: &[(f64, f64)], n: usize) -> DMatrix<Complex64> {
        DMatrix::from_iterator(n, n, v.iter().map(|&(re, im)| Complex64::new(re, im)))
    }

    #[test]
    fn identity_passes_through() {
        let g = DMatrix::identity(3, 3);
        let f = orthonormalize(&g, 1e-12).unwrap();
        assert_eq!(f.effective_rank, 3);
        assert!((f.condition - 1.0).abs() < 1e-12);
        let check = f.transform.adjoint() * &g * &f.transform;
        assert!((check - DMatrix::<Complex64>::identity(3, 3)).norm() < 1e-12);
    }

    #[test]
    fn diagonal_scales_by_inverse_root() {
        let g = cm(&[(4.0, 0.0), (0.0, 0.0), (0.0, 0.0), (1.0, 0.0)], 2);
        let f = orthonormalize(&g, 1e-12).unwrap();
        assert_eq!(f.effective_rank, 2);
        assert!((f.condition - 4.0).abs() < 1e-12);
        // columns descend in eigenvalue: first maps to the λ=4 direction
        assert!((f.transform[(0, 0)].norm() - 0.5).abs() < 1e-12);
        assert!((f.transform[(1, 1)].norm() - 1.0).abs() < 1e-12);
        assert!(f.transform[(1, 0)].norm() < 1e-12);
        assert!(f.transform[(0, 1)].norm() < 1e-12);
    }

    #[test]
    fn random_hermitian_spd_whitens_to_identity() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let n = 10;
        let a = DMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        // A·A† + I is Hermitian positive definite with modest conditioning
        let g = &a * a.adjoint() + DMatrix::<Complex64>::identity(n, n);
        let f = orthonormalize(&g, 1e-14).unwrap();
        assert_eq!(f.effective_rank, n);
        let check = f.transform.adjoint() * &g * &f.transform;
        let err = (check - DMatrix::<Complex64>::identity(n, n)).norm();
        assert!(err < 1e-10, "‖T†GT − I‖ = {err}");
    }

    #[test]
    fn zero_matrix_is_degenerate() {
        let g = DMatrix::<Complex64>::zeros(4, 4);
        assert!(matches!(orthonormalize(&g, 1e-12), Err(Error::DegenerateBasis)));
    }

    #[test]
    fn floor_discards_tiny_directions() {
        let g = cm(
            &[
                (1.0, 0.0),
                (0.0, 0.0),
                (0.0, 0.0),
                (0.0, 0.0),
                (1e-3, 0.0),
                (0.0, 0.0),
                (0.0, 0.0),
                (0.0, 0.0),
                (1e-20, 0.0),
            ],
            3,
        );
        let f = orthonormalize(&g, 1e-12).unwrap();
        assert_eq!(f.effective_rank, 2);
        assert!((f.condition - 1e3).abs() / 1e3 < 1e-10);
        assert_eq!(f.eigenvalues.len(), 2);
        assert!(f.eigenvalues[0] > f.eigenvalues[1]);
    }

    #[test]
    fn eigenvalues_are_descending_and_positive() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        let n = 6;
        let a = DMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let g = &a * a.adjoint() + DMatrix::<Complex64>::identity(n, n) * Complex64::new(0.1, 0.0);
        let f = orthonormalize(&g, 1e-14).unwrap();
        for w in f.eigenvalues.windows(2) {
            assert!(w[0] >= w[1]);
        }
        assert!(f.eigenvalues[f.effective_rank - 1] > 0.0);
    }
}
