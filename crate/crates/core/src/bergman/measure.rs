//! The discrete measure of L²(Ω, e^{-kφ}): per-node factors
//! weight_i·e^{-kφ(z_i)}, optionally damped by an Agmon factor.
//!
//! All reductions fold per-row partial sums in grid-row order, so results
//! are identical bit for bit between the rayon and sequential builds.

use num_complex::Complex64;

use crate::error::Error;
use crate::geometry::Quadrature;
use crate::weights::{AgmonVariant, AgmonWeight, Weight};
use crate::Result;

#[derive(Debug, Clone)]
pub struct WeightedMeasure {
    k: f64,
    nx: usize,
    factors: Vec<f64>,
}

impl WeightedMeasure {
    pub fn new(q: &Quadrature, w: &Weight, k: f64) -> WeightedMeasure {
        Self::build(q, |z, wt| wt * (-k * w.eval(z)).exp(), k)
    }

    /// Measure with the extra Agmon damping e^{-√k|z−a|} or e^{-χ_k}.
    pub fn with_agmon(
        q: &Quadrature,
        w: &Weight,
        k: f64,
        aw: &AgmonWeight,
        variant: AgmonVariant,
    ) -> WeightedMeasure {
        Self::build(q, |z, wt| wt * (-k * w.eval(z)).exp() * aw.damping(z, variant), k)
    }

    fn build<F>(q: &Quadrature, f: F, k: f64) -> WeightedMeasure
    where
        F: Fn(Complex64, f64) -> f64 + Send + Sync,
    {
        let nx = q.nx;
        let rows = crate::exec::map_indexed(q.ny, |iy| {
            let mut row = Vec::with_capacity(nx);
            for (i, &z) in q.row(iy).iter().enumerate() {
                row.push(f(z, q.weights[iy * nx + i]));
            }
            row
        });
        let mut factors = Vec::with_capacity(q.len());
        for row in rows {
            factors.extend_from_slice(&row);
        }
        WeightedMeasure { k, nx, factors }
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn factors(&self) -> &[f64] {
        &self.factors
    }

    fn check_len(&self, got: usize) -> Result<()> {
        if got != self.factors.len() {
            return Err(Error::LengthMismatch { got, expected: self.factors.len() });
        }
        Ok(())
    }

    /// ⟨g1, g2⟩ = Σ factors·g1·conj(g2).
    pub fn dot(&self, g1: &[Complex64], g2: &[Complex64]) -> Result<Complex64> {
        self.check_len(g1.len())?;
        self.check_len(g2.len())?;
        let nrows = self.factors.len() / self.nx;
        let rows = crate::exec::map_indexed(nrows, |iy| {
            let lo = iy * self.nx;
            let mut acc = Complex64::new(0.0, 0.0);
            for i in lo..lo + self.nx {
                acc += self.factors[i] * g1[i] * g2[i].conj();
            }
            acc
        });
        Ok(rows.into_iter().sum())
    }

    /// ‖g‖² = Σ factors·|g|².
    pub fn norm_sq(&self, g: &[Complex64]) -> Result<f64> {
        self.check_len(g.len())?;
        let nrows = self.factors.len() / self.nx;
        let rows = crate::exec::map_indexed(nrows, |iy| {
            let lo = iy * self.nx;
            let mut acc = 0.0;
            for (f, gi) in self.factors[lo..lo + self.nx].iter().zip(&g[lo..lo + self.nx]) {
                acc += f * gi.norm_sqr();
            }
            acc
        });
        Ok(rows.into_iter().sum())
    }
}

/// Weighted inner product of two node-aligned sample vectors.
pub fn inner_product(
    g1: &[Complex64],
    g2: &[Complex64],
    q: &Quadrature,
    w: &Weight,
    k: f64,
) -> Result<Complex64> {
    WeightedMeasure::new(q, w, k).dot(g1, g2)
}

pub fn inner_product_with(
    m: &WeightedMeasure,
    g1: &[Complex64],
    g2: &[Complex64],
) -> Result<Complex64> {
    m.dot(g1, g2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_grid, Rect};
    use crate::weights::{make_model_weight, ModelWeight};

    fn ones(n: usize) -> Vec<Complex64> {
        vec![Complex64::new(1.0, 0.0); n]
    }

    #[test]
    fn constant_inner_product_is_the_area() {
        let q = build_grid(&Rect::centered_square(1.0).unwrap(), 64, 64).unwrap();
        let w = make_model_weight(ModelWeight::FlatLine, &q.rect).unwrap();
        let v = ones(q.len());
        let ip = inner_product(&v, &v, &q, &w, 0.0).unwrap();
        assert!((ip.re - 4.0).abs() < 1e-12);
        assert_eq!(ip.im, 0.0);
    }

    #[test]
    fn odd_moment_vanishes_on_symmetric_grid() {
        let q = build_grid(&Rect::centered_square(1.0).unwrap(), 64, 64).unwrap();
        let w = make_model_weight(ModelWeight::FlatLine, &q.rect).unwrap();
        let g1 = ones(q.len());
        let g2: Vec<Complex64> = q.nodes.clone();
        let ip = inner_product(&g1, &g2, &q, &w, 0.0).unwrap();
        assert!(ip.norm() < 1e-13, "⟨1, z⟩ = {ip}");
    }

    #[test]
    fn gaussian_in_y_matches_the_1d_closed_form() {
        // flat_line, k = 100: ⟨1,1⟩ = 2·∫_{−1}^{1} e^{−100 y²} dy
        //                           = 2·√(π/100)·erf(10) = 0.35449077018110318
        let q = build_grid(&Rect::centered_square(1.0).unwrap(), 512, 512).unwrap();
        let w = make_model_weight(ModelWeight::FlatLine, &q.rect).unwrap();
        let v = ones(q.len());
        let ip = inner_product(&v, &v, &q, &w, 100.0).unwrap();
        let exact = 0.354_490_770_181_103_18;
        assert!((ip.re - exact).abs() <= 1e-6 * exact, "got {}", ip.re);
    }

    #[test]
    fn dot_is_conjugate_symmetric() {
        let q = build_grid(&Rect::centered_square(1.0).unwrap(), 32, 48).unwrap();
        let w = make_model_weight(ModelWeight::FlatLine, &q.rect).unwrap();
        let m = WeightedMeasure::new(&q, &w, 3.0);
        let g1: Vec<Complex64> = q.nodes.iter().map(|z| z * z + Complex64::i()).collect();
        let g2: Vec<Complex64> = q.nodes.iter().map(|z| (z - Complex64::new(0.2, 0.0)).conj()).collect();
        let a = m.dot(&g1, &g2).unwrap();
        let b = m.dot(&g2, &g1).unwrap();
        assert!((a - b.conj()).norm() < 1e-14);
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let q = build_grid(&Rect::centered_square(1.0).unwrap(), 8, 8).unwrap();
        let w = make_model_weight(ModelWeight::FlatLine, &q.rect).unwrap();
        let m = WeightedMeasure::new(&q, &w, 1.0);
        let short = ones(q.len() - 1);
        assert!(matches!(m.dot(&short, &short), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn agmon_damping_shrinks_the_measure() {
        let q = build_grid(&Rect::centered_square(1.0).unwrap(), 64, 64).unwrap();
        let w = make_model_weight(ModelWeight::FlatLine, &q.rect).unwrap();
        let a = AgmonWeight::new(Complex64::new(0.0, 0.0), 64.0).unwrap();
        let plain = WeightedMeasure::new(&q, &w, 64.0);
        let damped = WeightedMeasure::with_agmon(&q, &w, 64.0, &a, AgmonVariant::Distance);
        let chi = WeightedMeasure::with_agmon(&q, &w, 64.0, &a, AgmonVariant::Chi);
        for i in 0..plain.len() {
            assert!(damped.factors()[i] <= plain.factors()[i]);
            // e^{-χ_k} and e^{-√k|z-a|} differ by at most e^{1/2} pointwise
            let ratio = damped.factors()[i] / chi.factors()[i];
            assert!(ratio <= 0.5_f64.exp() + 1e-12 && ratio >= (-0.5_f64).exp() - 1e-12);
        }
    }
}
