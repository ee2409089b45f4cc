//! Strictly plurisubharmonic weights φ ≥ 0 with certified curvature bounds
//! δ, their zero sets E = {φ = 0}, and the Agmon weight machinery ψ, χ, χ_k.
//!
//! Convention (n = 1): i∂∂̄φ ≥ δβ means φ_{zz̄} = Δφ/4 ≥ δ. All evaluators
//! are pure and the structs immutable, so weights are freely shared across
//! threads.

mod agmon;
mod models;

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::geometry::{Quadrature, Rect};

pub use agmon::{chi, chi_k, psi, AgmonVariant, AgmonWeight};
pub use models::{make_model_weight, ModelWeight};
pub(crate) use models::{smoothstep, smoothstep_d1};

type RealFn = dyn Fn(Complex64) -> f64 + Send + Sync;
type GradFn = dyn Fn(Complex64) -> (f64, f64) + Send + Sync;
type CurveFn = dyn Fn(&Rect, usize) -> Vec<Complex64> + Send + Sync;

/// Parametric description of the zero set: asked for up to `n` points of
/// E inside a rect, returns them exactly on E (possibly fewer when the
/// curve barely meets the rect, possibly none).
#[derive(Clone)]
pub struct ZeroCurve {
    sampler: Arc<CurveFn>,
}

impl ZeroCurve {
    pub fn new<F>(sampler: F) -> Self
    where
        F: Fn(&Rect, usize) -> Vec<Complex64> + Send + Sync + 'static,
    {
        ZeroCurve { sampler: Arc::new(sampler) }
    }

    pub fn sample(&self, rect: &Rect, n: usize) -> Vec<Complex64> {
        (self.sampler)(rect, n)
    }
}

impl fmt::Debug for ZeroCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ZeroCurve")
    }
}

/// A weight φ with closed-form derivatives and a certified curvature bound.
#[derive(Clone)]
pub struct Weight {
    name: String,
    delta: f64,
    eval: Arc<RealFn>,
    grad: Arc<GradFn>,
    hessian: Arc<RealFn>,
    zero_set_param: Option<ZeroCurve>,
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Weight")
            .field("name", &self.name)
            .field("delta", &self.delta)
            .field("has_zero_set_param", &self.zero_set_param.is_some())
            .finish()
    }
}

impl Weight {
    pub fn from_parts<E, G, H>(
        name: &str,
        delta: f64,
        eval: E,
        grad: G,
        complex_hessian: H,
        zero_set_param: Option<ZeroCurve>,
    ) -> Weight
    where
        E: Fn(Complex64) -> f64 + Send + Sync + 'static,
        G: Fn(Complex64) -> (f64, f64) + Send + Sync + 'static,
        H: Fn(Complex64) -> f64 + Send + Sync + 'static,
    {
        Weight {
            name: name.to_string(),
            delta,
            eval: Arc::new(eval),
            grad: Arc::new(grad),
            hessian: Arc::new(complex_hessian),
            zero_set_param,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Certified lower bound for φ_{zz̄} on the domain the weight was built for.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn eval(&self, z: Complex64) -> f64 {
        (self.eval)(z)
    }

    pub fn grad(&self, z: Complex64) -> (f64, f64) {
        (self.grad)(z)
    }

    pub fn complex_hessian(&self, z: Complex64) -> f64 {
        (self.hessian)(z)
    }

    pub fn zero_curve(&self) -> Option<&ZeroCurve> {
        self.zero_set_param.as_ref()
    }
}

/// Curvature verification report. `ok` is the analytic verdict
/// (min φ_{zz̄} over nodes ≥ required δ); the fd_* fields cross-check the
/// closed-form Hessian against a centered 5-point Laplacian at step
/// h = grid spacing, which resolves quadratic weights to rounding and
/// curved ones to O(h²).
#[derive(Debug, Clone, Copy)]
pub struct PshReport {
    pub min_eig: f64,
    pub worst_node: Complex64,
    pub ok: bool,
    pub fd_min_eig: f64,
    pub fd_max_rel_dev: f64,
    pub fd_agrees: bool,
}

pub fn verify_plurisubharmonic(w: &Weight, q: &Quadrature, required_delta: f64) -> PshReport {
    let h = q.spacing();
    let per_row = crate::exec::map_indexed(q.ny, |iy| {
        let mut min_eig = f64::INFINITY;
        let mut worst = Complex64::new(0.0, 0.0);
        let mut fd_min = f64::INFINITY;
        let mut fd_dev = 0.0_f64;
        for &z in q.row(iy) {
            let an = w.complex_hessian(z);
            if an < min_eig {
                min_eig = an;
                worst = z;
            }
            let lap = (w.eval(z + Complex64::new(h, 0.0))
                + w.eval(z - Complex64::new(h, 0.0))
                + w.eval(z + Complex64::new(0.0, h))
                + w.eval(z - Complex64::new(0.0, h))
                - 4.0 * w.eval(z))
                / (h * h);
            let fd = 0.25 * lap;
            fd_min = fd_min.min(fd);
            fd_dev = fd_dev.max((fd - an).abs() / an.abs().max(1e-8));
        }
        (min_eig, worst, fd_min, fd_dev)
    });
    let mut min_eig = f64::INFINITY;
    let mut worst = Complex64::new(0.0, 0.0);
    let mut fd_min_eig = f64::INFINITY;
    let mut fd_max_rel_dev = 0.0_f64;
    for (me, wn, fm, fd) in per_row {
        if me < min_eig {
            min_eig = me;
            worst = wn;
        }
        fd_min_eig = fd_min_eig.min(fm);
        fd_max_rel_dev = fd_max_rel_dev.max(fd);
    }
    PshReport {
        min_eig,
        worst_node: worst,
        ok: min_eig >= required_delta,
        fd_min_eig,
        fd_max_rel_dev,
        fd_agrees: fd_max_rel_dev <= 1e-4,
    }
}

/// Rescales φ to φ' = (5/δ)·φ so the curvature bound becomes exactly 5,
/// the normalization under which the Agmon-decay estimate is stated. The
/// zero set is unchanged. Returns the rescaled weight and the factor 5/δ.
pub fn rescale_for_agmon(w: &Weight) -> (Weight, f64) {
    let scale = 5.0 / w.delta;
    let (e, g, h) = (w.eval.clone(), w.grad.clone(), w.hessian.clone());
    let rescaled = Weight {
        name: format!("{}_delta5", w.name),
        delta: 5.0,
        eval: Arc::new(move |z| scale * e(z)),
        grad: Arc::new(move |z| {
            let (gx, gy) = g(z);
            (scale * gx, scale * gy)
        }),
        hessian: Arc::new(move |z| scale * h(z)),
        zero_set_param: w.zero_set_param.clone(),
    };
    (rescaled, scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_grid, sample_zero_set, Rect};

    fn unit_square() -> Rect {
        Rect::centered_square(1.0).unwrap()
    }

    fn abs_sq_weight() -> Weight {
        Weight::from_parts("abs_sq", 1.0, |z| z.norm_sqr(), |z| (2.0 * z.re, 2.0 * z.im), |_| 1.0, None)
    }

    #[test]
    fn verify_reports_min_and_verdict() {
        let q = build_grid(&unit_square(), 64, 64).unwrap();
        let r = verify_plurisubharmonic(&abs_sq_weight(), &q, 1.0);
        assert_eq!(r.min_eig, 1.0);
        assert!(r.ok);
        assert!(r.fd_agrees, "quadratic weight should be FD-exact, dev {}", r.fd_max_rel_dev);

        let flat = make_model_weight(ModelWeight::FlatLine, &unit_square()).unwrap();
        let r = verify_plurisubharmonic(&flat, &q, 0.5);
        assert_eq!(r.min_eig, 0.5);
        assert!(r.ok);
        let r = verify_plurisubharmonic(&flat, &q, 0.6);
        assert!(!r.ok);
    }

    #[test]
    fn rescale_normalizes_delta_to_five() {
        let flat = make_model_weight(ModelWeight::FlatLine, &unit_square()).unwrap();
        let (w5, scale) = rescale_for_agmon(&flat);
        assert_eq!(scale, 10.0);
        assert_eq!(w5.delta(), 5.0);
        let z = Complex64::new(0.3, -0.4);
        assert_eq!(w5.eval(z), 10.0 * flat.eval(z));
        assert_eq!(w5.complex_hessian(z), 5.0);

        let q = build_grid(&unit_square(), 128, 128).unwrap();
        let r = verify_plurisubharmonic(&w5, &q, 5.0 - 1e-9);
        assert!(r.ok);
    }

    #[test]
    fn rescale_of_delta_five_weight_is_identity() {
        let w = Weight::from_parts(
            "already_five",
            5.0,
            |z| 5.0 * z.norm_sqr(),
            |z| (10.0 * z.re, 10.0 * z.im),
            |_| 5.0,
            None,
        );
        let (w5, scale) = rescale_for_agmon(&w);
        assert_eq!(scale, 1.0);
        let z = Complex64::new(-0.7, 0.2);
        assert_eq!(w5.eval(z), w.eval(z));
        assert_eq!(w5.grad(z), w.grad(z));
    }

    #[test]
    fn rescale_preserves_zero_set() {
        let flat = make_model_weight(ModelWeight::FlatLine, &unit_square()).unwrap();
        let (w5, _) = rescale_for_agmon(&flat);
        let e = sample_zero_set(&w5, &unit_square(), 33, 1e-12).unwrap();
        let e0 = sample_zero_set(&flat, &unit_square(), 33, 1e-12).unwrap();
        assert_eq!(e.points, e0.points);
        for p in &e.points {
            assert_eq!(w5.eval(*p), 0.0);
        }
    }
}
