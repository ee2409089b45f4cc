//! Gaussian-convolution approximant on the flat model, and the
//! side-by-side comparison against the Bergman pipeline.
//!
//! The approximant is G_k u(z) = √(k/π)·∫ u(t)·e^{-k(z−t)²} dt with u
//! restricted to the real line; the kernel has unit mass and width
//! 1/√k, matching the weight's localization scale. Coordinates are
//! reflected so that E = ℝ carries the flat weight (Im z)².

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bergman::{
    gram_matrix, orthonormalize, project_with, Basis, TestFunction,
    WeightedMeasure,
};
use crate::error::Error;
use crate::estimates::{fit_rate, sup_error_on_e, RateFit};
use crate::geometry::{CompactK, Quadrature, ZeroSetSample};
use crate::weights::Weight;
use crate::Result;

/// Midpoint nodes for the 1-D convolution; k-independent.
pub const CONVOLUTION_POINTS: usize = 4096;

type LineFn = dyn Fn(f64) -> Complex64 + Send + Sync;

#[derive(Clone)]
pub struct GaussianApproximant {
    k: f64,
    u_line: Arc<LineFn>,
    window: (f64, f64),
}

impl std::fmt::Debug for GaussianApproximant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GaussianApproximant")
            .field("k", &self.k)
            .field("window", &self.window)
            .finish_non_exhaustive()
    }
}

impl GaussianApproximant {
    pub fn new<U>(k: f64, u_line: U, window: (f64, f64)) -> Result<GaussianApproximant>
    where
        U: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::BadArgument(format!("gaussian approximant needs k > 0, got {k}")));
        }
        if !(window.0 < window.1) {
            return Err(Error::BadArgument(format!(
                "empty convolution window [{}, {}]",
                window.0, window.1
            )));
        }
        Ok(GaussianApproximant { k, u_line: Arc::new(u_line), window })
    }

    /// Restriction of u to ℝ, windowed to the support's x-range.
    pub fn from_test_function(u: &TestFunction, k: f64) -> Result<GaussianApproximant> {
        let lo = u.support().x_min();
        let hi = u.support().x_max();
        let uc = u.clone();
        Self::new(k, move |t| uc.eval(Complex64::new(t, 0.0)), (lo, hi))
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// G_k u(z); entire in z since the kernel is.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let (lo, hi) = self.window;
        let n = CONVOLUTION_POINTS;
        let h = (hi - lo) / n as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            let t = lo + (i as f64 + 0.5) * h;
            let d = z - t;
            acc += (self.u_line)(t) * (-self.k * d * d).exp();
        }
        (self.k / std::f64::consts::PI).sqrt() * h * acc
    }

    /// √(k/π)·∫e^{-ks²}ds over the kernel's own ±6/√k window; the
    /// invariant is that this returns 1 to quadrature accuracy.
    pub fn kernel_mass(&self) -> f64 {
        let half = 6.0 / self.k.sqrt();
        let n = CONVOLUTION_POINTS;
        let h = 2.0 * half / n as f64;
        let mut acc = 0.0;
        for i in 0..n {
            let s = -half + (i as f64 + 0.5) * h;
            acc += (-self.k * s * s).exp();
        }
        (self.k / std::f64::consts::PI).sqrt() * h * acc
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelCasePoint {
    pub k: f64,
    pub bergman_err: f64,
    pub gaussian_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub per_k: Vec<ModelCasePoint>,
    /// None when the Bergman errors are degenerate (in-span input).
    pub bergman_fit: Option<RateFit>,
    pub gaussian_fit: Option<RateFit>,
    pub degenerate: bool,
}

impl ComparisonReport {
    /// Assembles a report from already-measured error tables; the fits
    /// are exactly `fit_rate` of each table.
    pub fn from_error_tables(
        k_values: &[f64],
        bergman_errs: &[f64],
        gaussian_errs: &[f64],
        degenerate: bool,
    ) -> Result<ComparisonReport> {
        if k_values.len() != bergman_errs.len() {
            return Err(Error::LengthMismatch {
                got: bergman_errs.len(),
                expected: k_values.len(),
            });
        }
        if k_values.len() != gaussian_errs.len() {
            return Err(Error::LengthMismatch {
                got: gaussian_errs.len(),
                expected: k_values.len(),
            });
        }
        let per_k = k_values
            .iter()
            .zip(bergman_errs.iter().zip(gaussian_errs))
            .map(|(&k, (&b, &g))| ModelCasePoint { k, bergman_err: b, gaussian_err: g })
            .collect();
        let bergman_fit =
            if degenerate { None } else { Some(fit_rate(k_values, bergman_errs)?) };
        let gaussian_fit = Some(fit_rate(k_values, gaussian_errs)?);
        Ok(ComparisonReport { per_k, bergman_fit, gaussian_fit, degenerate })
    }
}

/// Runs both approximants of u over the k grid on the flat-line model
/// and reports sup errors on E∩K plus fitted rates. `degrees[i]` is the
/// basis degree used at `k_values[i]`.
pub fn compare_model_case(
    u: &TestFunction,
    k_values: &[f64],
    degrees: &[usize],
    q: &Quadrature,
    w: &Weight,
    e: &ZeroSetSample,
    region: &CompactK,
    eigen_floor: f64,
) -> Result<ComparisonReport> {
    if w.name() != "flat_line" {
        return Err(Error::BadWeight {
            name: w.name().to_string(),
            reason: "the model-case comparison is defined for the flat_line weight".to_string(),
        });
    }
    if k_values.len() != degrees.len() {
        return Err(Error::LengthMismatch { got: degrees.len(), expected: k_values.len() });
    }
    let pts = e.restrict(region)?;
    let sup_u = q.nodes.iter().map(|&z| u.eval(z).norm()).fold(0.0, f64::max);

    let mut bergman_errs = Vec::with_capacity(k_values.len());
    let mut gaussian_errs = Vec::with_capacity(k_values.len());
    for (&k, &degree) in k_values.iter().zip(degrees) {
        let basis = Basis::monomials(&q.rect, degree);
        let g = gram_matrix(&basis, q, w, k);
        let factor = orthonormalize(&g, eigen_floor)?;
        let m = WeightedMeasure::new(q, w, k);
        let p = project_with(u, &basis, &factor, q, &m)?;
        bergman_errs.push(sup_error_on_e(u, &p, e, region)?);

        let ga = GaussianApproximant::from_test_function(u, k)?;
        let gerr = pts
            .iter()
            .map(|&z| (ga.eval(z) - u.eval(z)).norm())
            .fold(0.0, f64::max);
        gaussian_errs.push(gerr);
    }

    let degenerate = bergman_errs.iter().all(|&e| e <= 1e-8 * sup_u);
    ComparisonReport::from_error_tables(k_values, &bergman_errs, &gaussian_errs, degenerate)
}
