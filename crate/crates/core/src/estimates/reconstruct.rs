//! Cauchy-Pompeiu reconstruction through a shrinking cutoff.
//!
//! With η(z) = ξ(k|z−a|²) equal to 1 near a and 0 outside the radius-k^{-1/2}
//! ball, v(a) = −(1/π)∫ ∂̄(vη)/(z−a) dA. Expanding ∂̄(vη) splits the integrand
//! into η·∂̄v/(z−a), whose singularity sits at a, and v·k·ξ', where the
//! 1/(z−a) has cancelled against ∂̄η.
//!
//! The center is moved to the nearest cell corner so no quadrature node
//! collides with the pole, and the one cell containing the corner is
//! dropped. Both steps cost O(h), which sets the observed first-order
//! convergence.

use num_complex::Complex64;

use crate::error::Error;
use crate::geometry::Quadrature;
use crate::weights::{smoothstep, smoothstep_d1};
use crate::Result;

/// ξ(t): 1 for t ≤ 1/2, 0 for t ≥ 1, quintic-smoothstep bridge between.
pub fn cutoff_xi(t: f64) -> f64 {
    if t <= 0.5 {
        1.0
    } else if t >= 1.0 {
        0.0
    } else {
        1.0 - smoothstep(2.0 * (t - 0.5))
    }
}

pub fn cutoff_xi_prime(t: f64) -> f64 {
    if t <= 0.5 || t >= 1.0 {
        0.0
    } else {
        -2.0 * smoothstep_d1(2.0 * (t - 0.5))
    }
}

/// Nearest cell-center-plus-half-cell point: a corner of the grid.
/// Idempotent, moves a by at most half a cell diagonal.
pub fn snap_center(a: Complex64, q: &Quadrature) -> Complex64 {
    let hx = q.hx();
    let hy = q.hy();
    let jx = ((a.re - q.rect.x_min()) / hx).round();
    let jy = ((a.im - q.rect.y_min()) / hy).round();
    Complex64::new(q.rect.x_min() + jx * hx, q.rect.y_min() + jy * hy)
}

/// Reconstructs v at the snapped center with ∂̄v supplied exactly.
pub fn bm_reconstruct_with_dbar(
    v: &[Complex64],
    f: &[Complex64],
    k: f64,
    a: Complex64,
    q: &Quadrature,
) -> Result<Complex64> {
    check_lengths(v.len(), q)?;
    check_lengths(f.len(), q)?;
    bm_core(v, |i| f[i], k, a, q)
}

/// Reconstructs v at the snapped center; ∂̄v comes from central
/// differences of the samples.
pub fn bm_reconstruct(v: &[Complex64], k: f64, a: Complex64, q: &Quadrature) -> Result<Complex64> {
    check_lengths(v.len(), q)?;
    let nx = q.nx;
    let (tx, ty) = (2.0 * q.hx(), 2.0 * q.hy());
    let fd = move |i: usize| {
        // ball interior keeps all four neighbors on the grid
        let dx = (v[i + 1] - v[i - 1]) / tx;
        let dy = (v[i + nx] - v[i - nx]) / ty;
        0.5 * (dx + Complex64::i() * dy)
    };
    bm_core(v, fd, k, a, q)
}

fn check_lengths(got: usize, q: &Quadrature) -> Result<()> {
    if got != q.len() {
        return Err(Error::LengthMismatch { got, expected: q.len() });
    }
    Ok(())
}

fn bm_core<F>(v: &[Complex64], f: F, k: f64, a: Complex64, q: &Quadrature) -> Result<Complex64>
where
    F: Fn(usize) -> Complex64 + Send + Sync,
{
    let ap = snap_center(a, q);
    let radius = k.sqrt().recip();
    let inside = ap.re - radius >= q.rect.x_min()
        && ap.re + radius <= q.rect.x_max()
        && ap.im - radius >= q.rect.y_min()
        && ap.im + radius <= q.rect.y_max();
    if !inside {
        return Err(Error::BallOutsideDomain { center: ap, radius });
    }

    // the half-open cell holding the corner is its up-right neighbor;
    // the 1e-9 nudge absorbs round-off in the index arithmetic
    let hx = q.hx();
    let hy = q.hy();
    let ex = ((ap.re - q.rect.x_min()) / hx + 1e-9).floor() as usize;
    let ey = ((ap.im - q.rect.y_min()) / hy + 1e-9).floor() as usize;
    let excluded = ey * q.nx + ex;

    let nx = q.nx;
    let rows = crate::exec::map_indexed(q.ny, |iy| {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, &z) in q.row(iy).iter().enumerate() {
            let idx = iy * nx + i;
            if idx == excluded {
                continue;
            }
            let d = z - ap;
            let t = k * d.norm_sqr();
            if t >= 1.0 {
                continue;
            }
            let eta = cutoff_xi(t);
            let etap = cutoff_xi_prime(t);
            let mut term = v[idx] * (k * etap);
            if eta != 0.0 {
                term += eta * f(idx) / d;
            }
            acc += q.weights[idx] * term;
        }
        acc
    });
    let total: Complex64 = rows.into_iter().sum();
    Ok(-total / std::f64::consts::PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_grid, Rect};

    fn grid(n: usize) -> Quadrature {
        build_grid(&Rect::centered_square(1.0).unwrap(), n, n).unwrap()
    }

    #[test]
    fn xi_matches_its_pinned_values() {
        assert_eq!(cutoff_xi(0.25), 1.0);
        assert_eq!(cutoff_xi(0.5), 1.0);
        assert_eq!(cutoff_xi(2.0), 0.0);
        assert_eq!(cutoff_xi(1.0), 0.0);
        assert!((cutoff_xi(0.75) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn xi_prime_matches_finite_differences() {
        let h = 1e-6;
        for t in [0.55, 0.6, 0.75, 0.9, 0.95] {
            let fd = (cutoff_xi(t + h) - cutoff_xi(t - h)) / (2.0 * h);
            assert!((fd - cutoff_xi_prime(t)).abs() < 1e-8, "at t = {t}");
        }
        // flat outside the bridge
        assert_eq!(cutoff_xi_prime(0.3), 0.0);
        assert_eq!(cutoff_xi_prime(1.2), 0.0);
        assert!((cutoff_xi_prime(0.75) + 3.75).abs() < 1e-12);
    }

    #[test]
    fn snap_is_idempotent_and_close() {
        let q = grid(64);
        let a = Complex64::new(0.123, -0.456);
        let s = snap_center(a, &q);
        let half_diag = 0.5 * (q.hx().hypot(q.hy()));
        assert!((s - a).norm() <= half_diag + 1e-12);
        let s2 = snap_center(s, &q);
        assert!((s2 - s).norm() < 1e-12);
    }

    #[test]
    fn constant_reconstructs_through_the_cutoff_term() {
        let q = grid(256);
        let v = vec![Complex64::new(1.0, 0.0); q.len()];
        let f = vec![Complex64::new(0.0, 0.0); q.len()];
        let r = bm_reconstruct_with_dbar(&v, &f, 16.0, Complex64::new(0.1, 0.05), &q).unwrap();
        assert!((r - Complex64::new(1.0, 0.0)).norm() <= 1e-3, "got {r}");
    }

    #[test]
    fn holomorphic_vanishing_at_center_gives_zero() {
        let q = grid(256);
        let a = snap_center(Complex64::new(0.1, 0.05), &q);
        let v: Vec<Complex64> = q.nodes.iter().map(|&z| z - a).collect();
        let f = vec![Complex64::new(0.0, 0.0); q.len()];
        let r = bm_reconstruct_with_dbar(&v, &f, 16.0, a, &q).unwrap();
        assert!(r.norm() <= 1e-3, "got {r}");
        // the grid is symmetric about the corner, so this is machine zero
        assert!(r.norm() <= 1e-12);
    }

    #[test]
    fn smooth_error_decays_at_first_order() {
        let vf = |z: Complex64| z.conj() * z.re.exp();
        let ff = |z: Complex64| z.re.exp() * (Complex64::new(1.0, 0.0) + 0.5 * z.conj());
        let a = Complex64::new(0.3, 0.1);
        let mut errs = Vec::new();
        for n in [128usize, 256, 512] {
            let q = grid(n);
            let v: Vec<Complex64> = q.nodes.iter().map(|&z| vf(z)).collect();
            let f: Vec<Complex64> = q.nodes.iter().map(|&z| ff(z)).collect();
            let ap = snap_center(a, &q);
            let r = bm_reconstruct_with_dbar(&v, &f, 16.0, a, &q).unwrap();
            errs.push((r - vf(ap)).norm());
        }
        for pair in errs.windows(2) {
            assert!(pair[1] < pair[0], "errors not decreasing: {errs:?}");
            let order = (pair[0] / pair[1]).log2();
            assert!(order >= 0.9, "observed order {order} from {errs:?}");
        }
    }

    #[test]
    fn finite_difference_dbar_agrees_with_exact() {
        let q = grid(256);
        let vf = |z: Complex64| z.conj() * z.re.exp();
        let ff = |z: Complex64| z.re.exp() * (Complex64::new(1.0, 0.0) + 0.5 * z.conj());
        let v: Vec<Complex64> = q.nodes.iter().map(|&z| vf(z)).collect();
        let f: Vec<Complex64> = q.nodes.iter().map(|&z| ff(z)).collect();
        let a = Complex64::new(-0.2, 0.15);
        let exact = bm_reconstruct_with_dbar(&v, &f, 16.0, a, &q).unwrap();
        let fd = bm_reconstruct(&v, 16.0, a, &q).unwrap();
        assert!((exact - fd).norm() <= 1e-3, "exact {exact} vs fd {fd}");
    }

    #[test]
    fn ball_must_fit_inside_the_domain() {
        let q = grid(64);
        let v = vec![Complex64::new(1.0, 0.0); q.len()];
        let err = bm_reconstruct(&v, 1.0, Complex64::new(0.9, 0.0), &q);
        assert!(matches!(err, Err(Error::BallOutsideDomain { .. })));
    }
}
