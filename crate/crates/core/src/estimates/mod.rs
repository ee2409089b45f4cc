//! Functionals that turn a projection run into checkable numbers: sup
//! error on the zero set, weighted L² and sup ratios, Agmon-damped
//! ratios, the pointwise local estimate, and log-log rate fits.
//!
//! Constants in the inequalities are never pinned; everything here
//! reports ratios whose boundedness across k is the testable content.

mod reconstruct;

pub use reconstruct::{
    bm_reconstruct, bm_reconstruct_with_dbar, cutoff_xi, cutoff_xi_prime, snap_center,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bergman::{Projection, TestFunction, WeightedMeasure};
use crate::error::Error;
use crate::geometry::{CompactK, Quadrature, ZeroSetSample};
use crate::weights::{AgmonVariant, AgmonWeight, Weight};
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgmonRatioEntry {
    pub center: Complex64,
    /// e^{-√k|z−a|} damping.
    pub ratio: f64,
    /// e^{-χ_k} damping; differs from `ratio` by at most a factor e.
    pub chi_ratio: f64,
}

/// One k-step of the pipeline, all inequality sides in one place.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub k: f64,
    pub basis_degree: usize,
    pub gram_condition: f64,
    #[serde(rename = "sup_err_E")]
    pub sup_err_e: f64,
    pub l2_ratio: f64,
    pub sup_ratio: f64,
    pub agmon_ratios: Vec<AgmonRatioEntry>,
    pub bm_lhs: f64,
    pub bm_rhs_l2_term: f64,
    pub bm_rhs_f_term: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub k_values: Vec<f64>,
    pub errors: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalEstimate {
    /// |v(a)|².
    pub lhs: f64,
    /// k·∫_{|z−a|²<1/k} |v|².
    pub rhs_l2: f64,
    /// (1/k)·sup_{|z−a|²<1/k} |f|².
    pub rhs_f: f64,
}

/// max over zero-set points inside the compact of |u − P_k u|.
pub fn sup_error_on_e(
    u: &TestFunction,
    p: &Projection,
    e: &ZeroSetSample,
    region: &CompactK,
) -> Result<f64> {
    let pts = e.restrict(region)?;
    Ok(pts.iter().map(|&z| (u.eval(z) - p.eval(z)).norm()).fold(0.0, f64::max))
}

/// ∫|v|²e^{-kφ} / ∫|f|²e^{-kφ}.
pub fn l2_ratio(v: &[Complex64], f: &[Complex64], q: &Quadrature, w: &Weight, k: f64) -> Result<f64> {
    let m = WeightedMeasure::new(q, w, k);
    ratio_from_measure(&m, v, f)
}

fn ratio_from_measure(m: &WeightedMeasure, v: &[Complex64], f: &[Complex64]) -> Result<f64> {
    let den = m.norm_sq(f)?;
    if den <= 0.0 {
        return Err(Error::ZeroDenominator { what: "weighted norm of f" });
    }
    Ok(m.norm_sq(v)? / den)
}

/// sup over nodes of the compact of |v|²e^{-kφ}, divided by the sup of
/// |f|²e^{-kφ} over the whole grid.
pub fn weighted_sup_on_k(
    v: &[Complex64],
    f: &[Complex64],
    region: &CompactK,
    q: &Quadrature,
    w: &Weight,
    k: f64,
) -> Result<f64> {
    if v.len() != q.len() {
        return Err(Error::LengthMismatch { got: v.len(), expected: q.len() });
    }
    if f.len() != q.len() {
        return Err(Error::LengthMismatch { got: f.len(), expected: q.len() });
    }
    let mut num = 0.0f64;
    let mut den = 0.0f64;
    for (i, &z) in q.nodes.iter().enumerate() {
        let damp = (-k * w.eval(z)).exp();
        den = den.max(f[i].norm_sqr() * damp);
        if region.contains(z) {
            num = num.max(v[i].norm_sqr() * damp);
        }
    }
    if den <= 0.0 {
        return Err(Error::ZeroDenominator { what: "weighted sup of f" });
    }
    Ok(num / den)
}

/// Ratio of the two integrals with the extra damping e^{-√k|z−a|}.
/// The weight must come out of `rescale_for_agmon` (δ = 5).
pub fn agmon_ratio(
    v: &[Complex64],
    f: &[Complex64],
    q: &Quadrature,
    w: &Weight,
    k: f64,
    a: Complex64,
) -> Result<f64> {
    agmon_ratio_variant(v, f, q, w, k, a, AgmonVariant::Distance)
}

pub fn agmon_ratio_variant(
    v: &[Complex64],
    f: &[Complex64],
    q: &Quadrature,
    w: &Weight,
    k: f64,
    a: Complex64,
    variant: AgmonVariant,
) -> Result<f64> {
    if (w.delta() - 5.0).abs() > 1e-9 {
        return Err(Error::BadWeight {
            name: w.name().to_string(),
            reason: "agmon ratios need a weight rescaled to delta = 5".to_string(),
        });
    }
    let aw = AgmonWeight::new(a, k)?;
    let m = WeightedMeasure::with_agmon(q, w, k, &aw, variant);
    ratio_from_measure(&m, v, f)
}

/// Both Agmon variants at one center, bundled for reporting.
pub fn agmon_entry(
    v: &[Complex64],
    f: &[Complex64],
    q: &Quadrature,
    w: &Weight,
    k: f64,
    a: Complex64,
) -> Result<AgmonRatioEntry> {
    let ratio = agmon_ratio_variant(v, f, q, w, k, a, AgmonVariant::Distance)?;
    let chi_ratio = agmon_ratio_variant(v, f, q, w, k, a, AgmonVariant::Chi)?;
    Ok(AgmonRatioEntry { center: a, ratio, chi_ratio })
}

/// Pointwise estimate at a: |v(a)|² against k·∫_ball|v|² and
/// (1/k)·sup_ball|f|². The center snaps to the nearest node since v
/// lives on the grid.
pub fn local_estimate_check(
    v: &[Complex64],
    f: &[Complex64],
    k: f64,
    a: Complex64,
    q: &Quadrature,
) -> Result<LocalEstimate> {
    if v.len() != q.len() {
        return Err(Error::LengthMismatch { got: v.len(), expected: q.len() });
    }
    if f.len() != q.len() {
        return Err(Error::LengthMismatch { got: f.len(), expected: q.len() });
    }
    let idx = q.nearest_node(a);
    let an = q.nodes[idx];
    let radius = k.sqrt().recip();
    let inside = an.re - radius >= q.rect.x_min()
        && an.re + radius <= q.rect.x_max()
        && an.im - radius >= q.rect.y_min()
        && an.im + radius <= q.rect.y_max();
    if !inside {
        return Err(Error::BallOutsideDomain { center: an, radius });
    }

    let r2 = 1.0 / k;
    let mut int_v = 0.0;
    let mut sup_f = 0.0f64;
    for (i, &z) in q.nodes.iter().enumerate() {
        if (z - an).norm_sqr() < r2 {
            int_v += q.weights[i] * v[i].norm_sqr();
            sup_f = sup_f.max(f[i].norm_sqr());
        }
    }
    Ok(LocalEstimate { lhs: v[idx].norm_sqr(), rhs_l2: k * int_v, rhs_f: sup_f / k })
}

/// Least-squares line through (log k, log error).
pub fn fit_rate(k_values: &[f64], errors: &[f64]) -> Result<RateFit> {
    if k_values.len() != errors.len() {
        return Err(Error::LengthMismatch { got: errors.len(), expected: k_values.len() });
    }
    if k_values.len() < 3 {
        return Err(Error::TooFewPoints { got: k_values.len() });
    }
    for pair in k_values.windows(2) {
        if pair[1] <= pair[0] {
            return Err(Error::BadArgument("k values must be strictly increasing".to_string()));
        }
    }
    if k_values[0] <= 0.0 {
        return Err(Error::NonpositiveData { what: "k values" });
    }
    if errors.iter().any(|&e| e <= 0.0) {
        return Err(Error::NonpositiveData { what: "error values" });
    }

    let xs: Vec<f64> = k_values.iter().map(|k| k.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let p = slope * x + intercept;
            (y - p) * (y - p)
        })
        .sum();
    let r_squared = if ss_tot < 1e-30 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok(RateFit {
        slope,
        intercept,
        r_squared,
        k_values: k_values.to_vec(),
        errors: errors.to_vec(),
    })
}
