//! Gram matrices G_ij = ⟨e_i, e_j⟩ of a polynomial basis in the weighted
//! measure. Only the upper triangle is accumulated; the lower is its
//! conjugate mirror. Row partials fold in grid order for determinism.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::bergman::basis::Basis;
use crate::bergman::measure::WeightedMeasure;
use crate::geometry::Quadrature;
use crate::weights::Weight;

pub fn gram_matrix(basis: &Basis, q: &Quadrature, w: &Weight, k: f64) -> DMatrix<Complex64> {
    gram_matrix_with(basis, q, &WeightedMeasure::new(q, w, k))
}

pub fn gram_matrix_with(basis: &Basis, q: &Quadrature, m: &WeightedMeasure) -> DMatrix<Complex64> {
    let n = basis.len();
    let tri = n * (n + 1) / 2;
    let nx = q.nx;
    let factors = m.factors();

    // each grid row contributes factor·e_i·conj(e_j) to every pair i ≤ j
    let rows = crate::exec::map_indexed(q.ny, |iy| {
        let mut acc = vec![Complex64::new(0.0, 0.0); tri];
        let mut powers = vec![Complex64::new(0.0, 0.0); n];
        for (i, &z) in q.row(iy).iter().enumerate() {
            let f = factors[iy * nx + i];
            if f == 0.0 {
                continue;
            }
            basis.fill_row(z, &mut powers);
            let mut t = 0;
            for jj in 0..n {
                let pj = powers[jj].conj() * f;
                for item in powers.iter().take(jj + 1) {
                    acc[t] += item * pj;
                    t += 1;
                }
            }
        }
        acc
    });

    let mut upper = vec![Complex64::new(0.0, 0.0); tri];
    for row in rows {
        for (u, v) in upper.iter_mut().zip(row) {
            *u += v;
        }
    }

    let mut g = DMatrix::zeros(n, n);
    let mut t = 0;
    for jj in 0..n {
        for ii in 0..=jj {
            g[(ii, jj)] = upper[t];
            g[(jj, ii)] = upper[t].conj();
            t += 1;
        }
    }
    g
}
