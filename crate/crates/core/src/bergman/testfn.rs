//! Compactly supported test functions with closed-form ∂̄ data.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::Error;
use crate::geometry::Rect;
use crate::Result;

type CplxFn = dyn Fn(Complex64) -> Complex64 + Send + Sync;

/// A smooth u with u ≡ 0 outside `support` and exact ∂̄u = ½(∂_x + i∂_y)u.
/// The closed-form dbar removes one discretization error source from every
/// downstream ratio.
#[derive(Clone)]
pub struct TestFunction {
    name: String,
    eval: Arc<CplxFn>,
    dbar: Arc<CplxFn>,
    support: Rect,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("name", &self.name)
            .field("support", &self.support)
            .finish()
    }
}

impl TestFunction {
    pub fn from_parts<E, D>(name: &str, eval: E, dbar: D, support: Rect) -> TestFunction
    where
        E: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
        D: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        TestFunction { name: name.to_string(), eval: Arc::new(eval), dbar: Arc::new(dbar), support }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        (self.eval)(z)
    }

    pub fn dbar(&self, z: Complex64) -> Complex64 {
        (self.dbar)(z)
    }

    pub fn support(&self) -> &Rect {
        &self.support
    }

    /// λ·u with the same support; used by the scaling-covariance checks.
    pub fn scaled(&self, lambda: Complex64) -> TestFunction {
        let (e, d) = (self.eval.clone(), self.dbar.clone());
        TestFunction {
            name: format!("{}_scaled", self.name),
            eval: Arc::new(move |z| lambda * e(z)),
            dbar: Arc::new(move |z| lambda * d(z)),
            support: self.support,
        }
    }

    pub fn by_name(name: &str) -> Option<TestFunction> {
        match name {
            "standard_bump" => Some(standard_bump()),
            "narrow_bump" => Some(narrow_bump()),
            _ => None,
        }
    }

    pub fn names() -> &'static [&'static str] {
        &["standard_bump", "narrow_bump"]
    }
}

fn bump_g(t: f64, rho: f64) -> f64 {
    let s = t / rho;
    let d = 1.0 - s * s;
    if d <= 0.0 {
        0.0
    } else {
        (1.0 - 1.0 / d).exp()
    }
}

fn bump_g1(t: f64, rho: f64) -> f64 {
    let s = t / rho;
    let d = 1.0 - s * s;
    if d <= 0.0 {
        0.0
    } else {
        -bump_g(t, rho) * (2.0 * t / (rho * rho)) / (d * d)
    }
}

fn make_bump(name: &str, rho: f64) -> TestFunction {
    let support = Rect::new(Complex64::new(0.0, 0.0), rho, rho).expect("positive rho");
    let r = rho;
    TestFunction::from_parts(
        name,
        move |z| Complex64::new(bump_g(z.re, r) * bump_g(z.im, r), 0.0),
        move |z| {
            Complex64::new(
                0.5 * bump_g1(z.re, r) * bump_g(z.im, r),
                0.5 * bump_g(z.re, r) * bump_g1(z.im, r),
            )
        },
        support,
    )
}

/// Product bump g(x)g(y), g(t) = exp(1 − 1/(1 − (t/ρ)²)), ρ = 0.7.
pub fn standard_bump() -> TestFunction {
    make_bump("standard_bump", 0.7)
}

/// Same profile with ρ = 0.45, for support-sensitivity cross-checks.
pub fn narrow_bump() -> TestFunction {
    make_bump("narrow_bump", 0.45)
}

/// Arbitrary-width product bump.
pub fn bump(rho: f64) -> Result<TestFunction> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::BadArgument(format!("bump width must be positive (got {rho})")));
    }
    Ok(make_bump("bump", rho))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_vanishes_outside_support() {
        let u = standard_bump();
        let s = u.support();
        assert_eq!(s.half_width_x, 0.7);
        for &z in &[
            Complex64::new(0.7, 0.0),
            Complex64::new(0.71, 0.3),
            Complex64::new(-0.9, -0.9),
            Complex64::new(0.2, 0.7),
            Complex64::new(5.0, 0.0),
        ] {
            assert_eq!(u.eval(z), Complex64::new(0.0, 0.0), "at {z}");
            assert_eq!(u.dbar(z), Complex64::new(0.0, 0.0), "at {z}");
        }
        assert!(u.eval(Complex64::new(0.0, 0.0)).re > 0.99);
    }

    #[test]
    fn dbar_matches_centered_differences() {
        let u = standard_bump();
        let h = 1e-5;
        for &z in &[
            Complex64::new(0.1, 0.2),
            Complex64::new(-0.33, 0.41),
            Complex64::new(0.5, -0.55),
            Complex64::new(0.0, 0.0),
        ] {
            let dx = (u.eval(z + Complex64::new(h, 0.0)) - u.eval(z - Complex64::new(h, 0.0)))
                / (2.0 * h);
            let dy = (u.eval(z + Complex64::new(0.0, h)) - u.eval(z - Complex64::new(0.0, h)))
                / (2.0 * h);
            let fd = 0.5 * (dx + Complex64::i() * dy);
            assert!((fd - u.dbar(z)).norm() < 1e-6, "at {z}: fd {fd} vs {}", u.dbar(z));
        }
    }

    #[test]
    fn bump_decays_smoothly_to_the_edge() {
        let u = standard_bump();
        // g has all derivatives 0 at |t| = ρ; values collapse fast near it
        let near = u.eval(Complex64::new(0.699, 0.0)).re;
        assert!(near > 0.0 && near < 1e-100, "near-edge value {near}");
    }

    #[test]
    fn scaling_is_pointwise() {
        let u = standard_bump();
        let lam = Complex64::new(17.0, 0.0);
        let v = u.scaled(lam);
        let z = Complex64::new(0.21, -0.13);
        assert_eq!(v.eval(z), lam * u.eval(z));
        assert_eq!(v.dbar(z), lam * u.dbar(z));
    }

    #[test]
    fn lookup_by_name() {
        assert_eq!(TestFunction::by_name("standard_bump").unwrap().name(), "standard_bump");
        assert_eq!(TestFunction::by_name("narrow_bump").unwrap().support().half_width_x, 0.45);
        assert!(TestFunction::by_name("sombrero").is_none());
        assert!(bump(0.0).is_err());
    }
}
