//! The four model weights. Closed forms keep δ and E exact except for
//! log_growth, whose δ is certified numerically at construction.

use num_complex::Complex64;

use super::{Weight, ZeroCurve};
use crate::error::Error;
use crate::geometry::Rect;
use crate::Result;

/// Model selector with parameters. Radii and masses must be positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelWeight {
    /// φ = (Im z)², E = ℝ, δ = 1/2.
    FlatLine,
    /// φ = c·(Im z)², δ = c/2.
    ScaledLine { c: f64 },
    /// φ = (|z| − r)², E = circle of radius r; needs the domain to stay
    /// outside the disk |z| ≤ r/2 where the Hessian loses positivity.
    Circle { radius: f64 },
    /// (Im z)² blended into m·log(1 + |z|²) outside |z| = 1.5, fully
    /// logarithmic from |z| = 2.5 on; E = the real segment [−1.5, 1.5].
    LogGrowth { m: f64 },
}

/// Quintic smoothstep: 0 for s ≤ 0, 1 for s ≥ 1, C² across both ends.
pub(crate) fn smoothstep(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else if s >= 1.0 {
        1.0
    } else {
        s * s * s * (10.0 + s * (-15.0 + 6.0 * s))
    }
}

pub(crate) fn smoothstep_d1(s: f64) -> f64 {
    if s <= 0.0 || s >= 1.0 {
        0.0
    } else {
        30.0 * s * s * (1.0 - s) * (1.0 - s)
    }
}

pub(crate) fn smoothstep_d2(s: f64) -> f64 {
    if s <= 0.0 || s >= 1.0 {
        0.0
    } else {
        60.0 * s * (1.0 - s) * (1.0 - 2.0 * s)
    }
}

/// Points of a horizontal segment {y = 0, x ∈ [x_lo, x_hi]} ∩ rect, spread
/// at n midpoints of the clipped range.
fn real_segment(rect: &Rect, n: usize, x_lo: f64, x_hi: f64) -> Vec<Complex64> {
    if rect.y_min() > 0.0 || rect.y_max() < 0.0 {
        return Vec::new();
    }
    let lo = x_lo.max(rect.x_min());
    let hi = x_hi.min(rect.x_max());
    if lo >= hi {
        return Vec::new();
    }
    let step = (hi - lo) / n as f64;
    (0..n).map(|i| Complex64::new(lo + (i as f64 + 0.5) * step, 0.0)).collect()
}

pub fn make_model_weight(model: ModelWeight, domain: &Rect) -> Result<Weight> {
    match model {
        ModelWeight::FlatLine => Ok(line_weight("flat_line", 1.0)),
        ModelWeight::ScaledLine { c } => {
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::BadWeight {
                    name: "scaled_line".into(),
                    reason: format!("scale c must be positive and finite (got {c})"),
                });
            }
            Ok(line_weight("scaled_line", c))
        }
        ModelWeight::Circle { radius } => circle_weight(radius, domain),
        ModelWeight::LogGrowth { m } => log_growth_weight(m, domain),
    }
}

fn line_weight(name: &str, c: f64) -> Weight {
    let curve = ZeroCurve::new(|rect: &Rect, n| {
        real_segment(rect, n, f64::NEG_INFINITY, f64::INFINITY)
    });
    Weight::from_parts(
        name,
        c / 2.0,
        move |z| c * z.im * z.im,
        move |z| (0.0, 2.0 * c * z.im),
        move |_| c / 2.0,
        Some(curve),
    )
}

fn circle_weight(radius: f64, domain: &Rect) -> Result<Weight> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::BadWeight {
            name: "circle".into(),
            reason: format!("radius must be positive and finite (got {radius})"),
        });
    }
    // φ_{zz̄} = 1 − r/(2|z|) is positive only for |z| > r/2; demand the
    // whole domain stays clear of that disk (in particular z = 0).
    let d_min = domain.distance_to_origin();
    if d_min <= radius / 2.0 {
        return Err(Error::BadWeight {
            name: "circle".into(),
            reason: format!(
                "domain reaches |z| = {d_min} but the Hessian 1 - r/(2|z|) needs |z| > r/2 = {}",
                radius / 2.0
            ),
        });
    }
    let delta = 1.0 - radius / (2.0 * d_min);
    let r = radius;
    let curve = ZeroCurve::new(move |rect: &Rect, n| {
        let step = std::f64::consts::TAU / n as f64;
        (0..n)
            .map(|j| Complex64::from_polar(r, (j as f64 + 0.5) * step))
            .filter(|z| rect.contains(*z))
            .collect()
    });
    Ok(Weight::from_parts(
        "circle",
        delta,
        move |z| {
            let d = z.norm() - r;
            d * d
        },
        move |z| {
            let rho = z.norm();
            if rho == 0.0 {
                return (0.0, 0.0);
            }
            let f = 2.0 * (rho - r) / rho;
            (f * z.re, f * z.im)
        },
        move |z| 1.0 - r / (2.0 * z.norm()),
        Some(curve),
    ))
}

/// Blend radii for log_growth: quadratic inside R0, logarithmic outside R1.
const BLEND_R0: f64 = 1.5;
const BLEND_R1: f64 = 2.5;

/// σ(ρ) with its first two ρ-derivatives.
fn log_blend_sigma(rho: f64) -> (f64, f64, f64) {
    let w = BLEND_R1 - BLEND_R0;
    let s = (rho - BLEND_R0) / w;
    (1.0 - smoothstep(s), -smoothstep_d1(s) / w, -smoothstep_d2(s) / (w * w))
}

fn log_growth_eval(m: f64, z: Complex64) -> f64 {
    let rho = z.norm();
    let (sig, _, _) = log_blend_sigma(rho);
    z.im * z.im * sig + m * (1.0 + rho * rho).ln() * (1.0 - sig)
}

fn log_growth_grad(m: f64, z: Complex64) -> (f64, f64) {
    let rho = z.norm();
    let (sig, sig1, _) = log_blend_sigma(rho);
    let lg = (1.0 + rho * rho).ln();
    let lg1 = 2.0 * rho / (1.0 + rho * rho);
    // radial coefficient of the chain rule through ρ = |z|
    let cr = z.im * z.im * sig1 + m * (lg1 * (1.0 - sig) - lg * sig1);
    let (ux, uy) = if rho < 1e-300 { (0.0, 0.0) } else { (z.re / rho, z.im / rho) };
    (cr * ux, 2.0 * z.im * sig + cr * uy)
}

fn log_growth_hessian(m: f64, z: Complex64) -> f64 {
    let rho = z.norm();
    let (sig, sig1, sig2) = log_blend_sigma(rho);
    let y2 = z.im * z.im;
    let lg = (1.0 + rho * rho).ln();
    let lg1 = 2.0 * rho / (1.0 + rho * rho);
    let lap_lg = 4.0 / ((1.0 + rho * rho) * (1.0 + rho * rho));
    let s1_over_rho = if sig1 == 0.0 { 0.0 } else { sig1 / rho };
    let lap_sig = sig2 + s1_over_rho;
    let lap = 2.0 * sig
        + 4.0 * y2 * s1_over_rho
        + y2 * lap_sig
        + m * ((1.0 - sig) * lap_lg - lg * lap_sig - 2.0 * lg1 * sig1);
    0.25 * lap
}

fn log_growth_weight(m: f64, domain: &Rect) -> Result<Weight> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::BadWeight {
            name: "log_growth".into(),
            reason: format!("log mass m must be positive and finite (got {m})"),
        });
    }
    // Certify δ on a boundary-inclusive dense grid; the transition band can
    // push the Hessian negative on large domains, which we reject outright.
    const CERT_N: usize = 1025;
    let mut min_eig = f64::INFINITY;
    let mut worst = Complex64::new(0.0, 0.0);
    for iy in 0..CERT_N {
        let y = domain.y_min()
            + iy as f64 * (2.0 * domain.half_width_y) / (CERT_N - 1) as f64;
        for ix in 0..CERT_N {
            let x = domain.x_min()
                + ix as f64 * (2.0 * domain.half_width_x) / (CERT_N - 1) as f64;
            let h = log_growth_hessian(m, Complex64::new(x, y));
            if h < min_eig {
                min_eig = h;
                worst = Complex64::new(x, y);
            }
        }
    }
    if min_eig <= 0.0 {
        return Err(Error::BadWeight {
            name: "log_growth".into(),
            reason: format!(
                "not strictly plurisubharmonic on this domain: complex Hessian reaches {min_eig:.6} near {worst} (shrink the domain or raise m)"
            ),
        });
    }
    let delta = min_eig * (1.0 - 1e-4);
    let curve = ZeroCurve::new(|rect: &Rect, n| real_segment(rect, n, -BLEND_R0, BLEND_R0));
    Ok(Weight::from_parts(
        "log_growth",
        delta,
        move |z| log_growth_eval(m, z),
        move |z| log_growth_grad(m, z),
        move |z| log_growth_hessian(m, z),
        Some(curve),
    ))
}
