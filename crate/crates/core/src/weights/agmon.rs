//! The auxiliary convex weight behind the Agmon-decay estimate:
//! ψ(t) = t for t ≥ 1 and t²/2 + 1/2 below, χ(z) = ψ(|z|), and the scaled,
//! recentered χ_k(z) = ψ(√k·|z − a|). χ_k tracks √k|z − a| within 1/2 but
//! is C¹ with bounded gradient and one-sided curvature, which is what the
//! twisting argument needs.

use num_complex::Complex64;

use crate::error::Error;
use crate::Result;

/// Convex C¹ envelope of max(t, (t²+1)/2); linear for t ≥ 1.
pub fn psi(t: f64) -> f64 {
    if t >= 1.0 {
        t
    } else {
        0.5 * t * t + 0.5
    }
}

/// χ(z) = ψ(|z|).
pub fn chi(z: Complex64) -> f64 {
    psi(z.norm())
}

/// χ_k centered at a: ψ(√k·|z − a|).
pub fn chi_k(z: Complex64, a: Complex64, k: f64) -> f64 {
    psi(k.sqrt() * (z - a).norm())
}

/// Which exponential damping enters an Agmon-type ratio: the raw distance
/// e^{−√k|z−a|} or the smoothed e^{−χ_k}. The two differ by at most e^{1/2}
/// pointwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AgmonVariant {
    Distance,
    Chi,
}

/// The centered Agmon weight (a, k). A value object: evaluation only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgmonWeight {
    pub center: Complex64,
    pub k: f64,
}

impl AgmonWeight {
    pub fn new(center: Complex64, k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::BadArgument(format!("agmon weight needs k > 0 (got {k})")));
        }
        Ok(AgmonWeight { center, k })
    }

    pub fn eval(&self, z: Complex64) -> f64 {
        chi_k(z, self.center, self.k)
    }

    /// e^{−χ_k(z)} (resp. e^{−√k|z−a|}).
    pub fn damping(&self, z: Complex64, variant: AgmonVariant) -> f64 {
        match variant {
            AgmonVariant::Chi => (-self.eval(z)).exp(),
            AgmonVariant::Distance => (-(self.k.sqrt() * (z - self.center).norm())).exp(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn psi_branch_values() {
        assert_eq!(psi(2.0), 2.0);
        assert_eq!(psi(0.0), 0.5);
        assert!((psi(0.3) - 0.545).abs() < 1e-15);
        assert_eq!(psi(1.0), 1.0);
        // both one-sided slopes at the seam are 1
        let h = 1e-6;
        let left = (psi(1.0) - psi(1.0 - h)) / h;
        let right = (psi(1.0 + h) - psi(1.0)) / h;
        assert!((left - 1.0).abs() <= h);
        assert!((right - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn psi_dominates_identity_with_equality_on_the_ray() {
        for i in 0..=500 {
            let t = i as f64 * 0.01;
            let d = psi(t) - t;
            if t >= 1.0 {
                assert_eq!(d, 0.0, "t={t}");
            } else {
                assert!(d > 0.0, "t={t}");
            }
        }
    }

    #[test]
    fn psi_is_convex_on_a_grid() {
        let h = 1e-3;
        let mut min_second = f64::INFINITY;
        for i in 1..5000 {
            let t = i as f64 * h;
            let second = (psi(t + h) - 2.0 * psi(t) + psi(t - h)) / (h * h);
            min_second = min_second.min(second);
        }
        assert!(min_second >= -1e-9, "min FD second derivative {min_second}");
    }

    #[test]
    fn chi_k_center_and_linear_branch() {
        let a = Complex64::new(0.4, 0.3);
        assert_eq!(chi_k(a, a, 64.0), 0.5);
        // √k|z−a| = 3 lands on the linear branch
        let z = a + Complex64::new(3.0 / 8.0, 0.0);
        assert_eq!(chi_k(z, a, 64.0), 3.0);
    }

    #[test]
    fn damping_variants_stay_within_sqrt_e() {
        let a = Complex64::new(-0.2, 0.1);
        let w = AgmonWeight::new(a, 37.0).unwrap();
        let gap_bound = (0.5_f64).exp();
        for i in 0..400 {
            let z = Complex64::new(-2.0 + 0.01 * i as f64, 0.37);
            let d = w.damping(z, AgmonVariant::Distance);
            let c = w.damping(z, AgmonVariant::Chi);
            let gap = (d / c).max(c / d);
            assert!(gap <= gap_bound * (1.0 + 1e-12), "gap {gap} at {z}");
        }
    }

    #[test]
    fn agmon_weight_rejects_bad_k() {
        assert!(AgmonWeight::new(Complex64::new(0.0, 0.0), 0.0).is_err());
        assert!(AgmonWeight::new(Complex64::new(0.0, 0.0), f64::NAN).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]
        #[test]
        fn chi_k_tracks_the_scaled_distance(
            zx in -5.0..5.0f64, zy in -5.0..5.0f64,
            ax in -2.0..2.0f64, ay in -2.0..2.0f64,
            k in 0.5..400.0f64,
        ) {
            let z = Complex64::new(zx, zy);
            let a = Complex64::new(ax, ay);
            let dev = chi_k(z, a, k) - k.sqrt() * (z - a).norm();
            prop_assert!(dev.abs() <= 0.5 + 1e-12);
            prop_assert!(dev >= -1e-12); // ψ(t) ≥ t, so the gap is one-sided
        }
    }
}
