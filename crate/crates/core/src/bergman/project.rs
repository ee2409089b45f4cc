//! Discrete Bergman projection.
//!
//! Coefficients come from raw moments: c = T†·(⟨u, e_i⟩)_i puts u into
//! orthonormal coordinates, and raw = T·c gives the polynomial that
//! evaluates the projection. One grid pass per projection.

use num_complex::Complex64;

use crate::bergman::basis::Basis;
use crate::bergman::measure::WeightedMeasure;
use crate::bergman::ortho::OrthoFactor;
use crate::bergman::testfn::TestFunction;
use crate::error::Error;
use crate::geometry::Quadrature;
use crate::weights::Weight;
use crate::Result;

#[derive(Debug, Clone)]
pub struct Projection {
    pub k: f64,
    /// Coordinates in the orthonormalized basis.
    pub coeffs: Vec<Complex64>,
    pub basis: Basis,
    pub factor: OrthoFactor,
    raw: Vec<Complex64>,
}

impl Projection {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.basis.eval_poly(&self.raw, z)
    }

    pub fn sample(&self, q: &Quadrature) -> Vec<Complex64> {
        let rows = crate::exec::map_indexed(q.ny, |iy| {
            q.row(iy).iter().map(|&z| self.eval(z)).collect::<Vec<_>>()
        });
        let mut out = Vec::with_capacity(q.len());
        for row in rows {
            out.extend_from_slice(&row);
        }
        out
    }

    /// Coefficients against the raw monomial basis.
    pub fn raw_coeffs(&self) -> &[Complex64] {
        &self.raw
    }

    /// ‖P_k u‖² by Parseval in the orthonormal coordinates.
    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }
}

pub fn project(
    u: &TestFunction,
    basis: &Basis,
    factor: &OrthoFactor,
    q: &Quadrature,
    w: &Weight,
    k: f64,
) -> Result<Projection> {
    project_with(u, basis, factor, q, &WeightedMeasure::new(q, w, k))
}

pub fn project_with(
    u: &TestFunction,
    basis: &Basis,
    factor: &OrthoFactor,
    q: &Quadrature,
    m: &WeightedMeasure,
) -> Result<Projection> {
    let g = sample_function(u, q);
    project_samples(&g, basis, factor, q, m)
}

pub fn project_samples(
    g: &[Complex64],
    basis: &Basis,
    factor: &OrthoFactor,
    q: &Quadrature,
    m: &WeightedMeasure,
) -> Result<Projection> {
    if g.len() != q.len() {
        return Err(Error::LengthMismatch { got: g.len(), expected: q.len() });
    }
    if m.len() != q.len() {
        return Err(Error::LengthMismatch { got: m.len(), expected: q.len() });
    }
    let n = basis.len();
    if factor.transform.nrows() != n {
        return Err(Error::LengthMismatch { got: factor.transform.nrows(), expected: n });
    }

    let nx = q.nx;
    let factors = m.factors();
    let rows = crate::exec::map_indexed(q.ny, |iy| {
        let mut acc = vec![Complex64::new(0.0, 0.0); n];
        let mut powers = vec![Complex64::new(0.0, 0.0); n];
        for (i, &z) in q.row(iy).iter().enumerate() {
            let f = factors[iy * nx + i];
            if f == 0.0 {
                continue;
            }
            let uz = g[iy * nx + i];
            if uz.re == 0.0 && uz.im == 0.0 {
                continue;
            }
            basis.fill_row(z, &mut powers);
            let fu = f * uz;
            for (a, p) in acc.iter_mut().zip(&powers) {
                *a += fu * p.conj();
            }
        }
        acc
    });
    let mut moments = vec![Complex64::new(0.0, 0.0); n];
    for row in rows {
        for (m_i, v) in moments.iter_mut().zip(row) {
            *m_i += v;
        }
    }

    let r = factor.effective_rank;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); r];
    for (j, c) in coeffs.iter_mut().enumerate() {
        for (i, m_i) in moments.iter().enumerate() {
            *c += factor.transform[(i, j)].conj() * m_i;
        }
    }
    let mut raw = vec![Complex64::new(0.0, 0.0); n];
    for (j, &cj) in coeffs.iter().enumerate() {
        for (i, r_i) in raw.iter_mut().enumerate() {
            *r_i += factor.transform[(i, j)] * cj;
        }
    }

    Ok(Projection { k: m.k(), coeffs, basis: *basis, factor: factor.clone(), raw })
}

pub fn sample_function(u: &TestFunction, q: &Quadrature) -> Vec<Complex64> {
    let rows = crate::exec::map_indexed(q.ny, |iy| {
        q.row(iy).iter().map(|&z| u.eval(z)).collect::<Vec<_>>()
    });
    let mut out = Vec::with_capacity(q.len());
    for row in rows {
        out.extend_from_slice(&row);
    }
    out
}

/// v = u − P_k u, the minimal solution of ∂̄v = ∂̄u.
#[derive(Debug, Clone)]
pub struct Residual {
    u: TestFunction,
    p: Projection,
}

pub fn residual(u: &TestFunction, p: &Projection) -> Residual {
    Residual { u: u.clone(), p: p.clone() }
}

impl Residual {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.u.eval(z) - self.p.eval(z)
    }

    pub fn sample(&self, q: &Quadrature) -> Vec<Complex64> {
        let rows = crate::exec::map_indexed(q.ny, |iy| {
            q.row(iy).iter().map(|&z| self.eval(z)).collect::<Vec<_>>()
        });
        let mut out = Vec::with_capacity(q.len());
        for row in rows {
            out.extend_from_slice(&row);
        }
        out
    }

    /// ∂̄v = ∂̄u: the projection is holomorphic and drops out.
    pub fn dbar(&self, z: Complex64) -> Complex64 {
        self.u.dbar(z)
    }

    pub fn projection(&self) -> &Projection {
        &self.p
    }
}

/// K(z, w) = Σ_j φ_j(z)·conj(φ_j(w)) over the orthonormalized span.
pub fn bergman_kernel(
    basis: &Basis,
    factor: &OrthoFactor,
    z: Complex64,
    w_pt: Complex64,
) -> Complex64 {
    let n = basis.len();
    let mut pz = vec![Complex64::new(0.0, 0.0); n];
    let mut pw = vec![Complex64::new(0.0, 0.0); n];
    basis.fill_row(z, &mut pz);
    basis.fill_row(w_pt, &mut pw);
    let mut out = Complex64::new(0.0, 0.0);
    for j in 0..factor.effective_rank {
        let mut fz = Complex64::new(0.0, 0.0);
        let mut fw = Complex64::new(0.0, 0.0);
        for i in 0..n {
            fz += factor.transform[(i, j)] * pz[i];
            fw += factor.transform[(i, j)] * pw[i];
        }
        out += fz * fw.conj();
    }
    out
}
