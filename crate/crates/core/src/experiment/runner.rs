//! Executes a config: one projection sweep over the k grid feeds every
//! enabled scenario, then each scenario turns its slice of the data into
//! a fit and a verdict.
//!
//! Determinism contract: per-k rows are produced in ascending k, all
//! reductions run in a fixed order, and nothing here reads clocks or
//! random state. Identical configs give byte-identical reports.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bergman::{
    gram_matrix, orthonormalize, project, sample_function, Basis, Projection, TestFunction,
};
use crate::comparators::{ComparisonReport, GaussianApproximant};
use crate::error::Error;
use crate::estimates::{
    agmon_entry, bm_reconstruct_with_dbar, fit_rate, l2_ratio, local_estimate_check, snap_center,
    sup_error_on_e, weighted_sup_on_k, RateFit, RatioReport,
};
use crate::experiment::config::ExperimentConfig;
use crate::geometry::{
    build_grid, sample_zero_set, shrink_to_compact, CompactK, Quadrature, ZeroSetSample,
};
use crate::weights::{make_model_weight, rescale_for_agmon, ModelWeight, Weight};
use crate::Result;

pub const ZERO_SET_SAMPLES: usize = 64;
pub const ZERO_SET_TOLERANCE: f64 = 1e-9;
/// polynomial_mode restricts the zero set to |Re z| ≤ this band.
pub const POLYNOMIAL_E_HALF_WIDTH: f64 = 0.7;
/// The reconstruction identity is spot-checked at this k when present.
pub const RECONSTRUCTION_K: f64 = 64.0;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub k: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub per_k: Vec<RatioReport>,
    pub fits: BTreeMap<String, RateFit>,
    pub verdicts: BTreeMap<String, Verdict>,
    /// Plot-ready columns per scenario, key matches the scenario name
    /// (plus `_a1`/`_a2` suffixes for the two Agmon centers and `_bm`
    /// for the reconstruction spot check).
    pub series: BTreeMap<String, Vec<SeriesPoint>>,
}

fn scenario_err(scenario: &str, k: f64) -> impl Fn(Error) -> Error + '_ {
    move |e| Error::Scenario { scenario: scenario.to_string(), k, source: Box::new(e) }
}

fn sample_dbar(u: &TestFunction, q: &Quadrature) -> Vec<Complex64> {
    let rows = crate::exec::map_indexed(q.ny, |iy| {
        q.row(iy).iter().map(|&z| u.dbar(z)).collect::<Vec<_>>()
    });
    let mut out = Vec::with_capacity(q.len());
    for row in rows {
        out.extend_from_slice(&row);
    }
    out
}

/// max/min over the table; None when a value is non-finite or ≤ 0.
fn spread(values: &[f64]) -> Option<f64> {
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for &v in values {
        if !v.is_finite() || v <= 0.0 {
            return None;
        }
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if lo.is_finite() {
        Some(hi / lo)
    } else {
        None
    }
}

fn series_of(k_values: &[f64], values: &[f64]) -> Vec<SeriesPoint> {
    k_values
        .iter()
        .zip(values)
        .map(|(&k, &value)| SeriesPoint { k, value })
        .collect()
}

pub fn run(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let model = config.weight.resolve()?;
    let w = make_model_weight(model, &config.domain)?;
    let q = build_grid(&config.domain, config.resolution.nx, config.resolution.ny)?;
    let region = shrink_to_compact(&config.domain, config.margin)?;
    let u = TestFunction::by_name(&config.test_function)
        .expect("validate() checked the test function name");

    let mut report = ExperimentReport {
        config: config.clone(),
        per_k: Vec::new(),
        fits: BTreeMap::new(),
        verdicts: BTreeMap::new(),
        series: BTreeMap::new(),
    };

    if config.k_values.is_empty() {
        for name in crate::experiment::config::Scenarios::NAMES {
            if config.scenarios.enabled(name) {
                report.verdicts.insert(
                    name.to_string(),
                    Verdict { pass: false, detail: "no k values in config".to_string() },
                );
            }
        }
        return Ok(report);
    }

    if config.scenarios.needs_pipeline() {
        run_pipeline(config, &w, &q, &region, &u, &mut report)?;
    }
    if config.scenarios.polynomial_mode {
        run_polynomial_mode(config, model, &q, &region, &u, &mut report)?;
    }
    Ok(report)
}

/// The center used for the pointwise estimate: the first configured
/// center that lies on E, else the zero-set sample nearest to the first.
fn zero_set_center(centers: &[Complex64], w: &Weight, e: &ZeroSetSample) -> Complex64 {
    centers
        .iter()
        .copied()
        .find(|&a| w.eval(a) <= ZERO_SET_TOLERANCE)
        .unwrap_or_else(|| {
            let a0 = centers[0];
            e.points
                .iter()
                .copied()
                .min_by(|x, y| (x - a0).norm_sqr().total_cmp(&(y - a0).norm_sqr()))
                .unwrap_or(a0)
        })
}

struct KStep {
    degree: usize,
    condition: f64,
    projection: Projection,
    sup_err: f64,
}

/// Doubles the basis degree from the rule's starting point until the sup
/// error on E∩K moves less than the stabilization threshold, capped at
/// max_degree. Records the last degree evaluated.
fn stabilized_projection(
    u: &TestFunction,
    q: &Quadrature,
    w: &Weight,
    k: f64,
    e: &ZeroSetSample,
    region: &CompactK,
    config: &ExperimentConfig,
) -> Result<KStep> {
    let policy = &config.basis_policy;
    let project_at = |degree: usize| -> Result<(Projection, f64, f64)> {
        let basis = Basis::monomials(&config.domain, degree);
        let g = gram_matrix(&basis, q, w, k);
        let factor = orthonormalize(&g, config.eigen_floor)?;
        let p = project(u, &basis, &factor, q, w, k)?;
        let err = sup_error_on_e(u, &p, e, region)?;
        Ok((p, err, factor.condition))
    };

    let mut degree = policy.initial_degree(k).min(policy.max_degree);
    let (mut p, mut err, mut cond) = project_at(degree)?;
    while degree < policy.max_degree {
        let next = (degree * 2).min(policy.max_degree);
        let (p2, err2, cond2) = project_at(next)?;
        let change = (err - err2).abs() / err.max(f64::MIN_POSITIVE);
        degree = next;
        p = p2;
        err = err2;
        cond = cond2;
        if change < policy.stabilization_threshold {
            break;
        }
    }
    Ok(KStep { degree, condition: cond, projection: p, sup_err: err })
}

fn reconstruction_error(
    vs: &[Complex64],
    fs: &[Complex64],
    k: f64,
    a: Complex64,
    q: &Quadrature,
    u: &TestFunction,
    p: &Projection,
) -> Result<f64> {
    let ac = snap_center(a, q);
    let bm = bm_reconstruct_with_dbar(vs, fs, k, a, q)?;
    let v_at = u.eval(ac) - p.eval(ac);
    let r2 = 1.0 / k;
    let mut sup_ball = 0.0f64;
    for (i, &z) in q.nodes.iter().enumerate() {
        if (z - ac).norm_sqr() < r2 {
            sup_ball = sup_ball.max(vs[i].norm());
        }
    }
    if sup_ball <= 0.0 {
        return Err(Error::ZeroDenominator { what: "sup of v on the reconstruction ball" });
    }
    Ok((bm - v_at).norm() / sup_ball)
}

fn run_pipeline(
    config: &ExperimentConfig,
    w: &Weight,
    q: &Quadrature,
    region: &CompactK,
    u: &TestFunction,
    report: &mut ExperimentReport,
) -> Result<()> {
    let scen = &config.scenarios;
    let t = &config.verdicts;
    let ks = &config.k_values;

    let e = sample_zero_set(w, &config.domain, ZERO_SET_SAMPLES, ZERO_SET_TOLERANCE)?;
    let (w5, scale) = rescale_for_agmon(w);
    let us = sample_function(u, q);
    let sup_u = us.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let a_e = zero_set_center(&config.agmon_centers, w, &e);
    let gaussian_wanted = scen.gaussian_compare && w.name() == "flat_line";

    let mut gaussian_errs: Vec<f64> = Vec::new();
    let mut bm_check: Option<SeriesPoint> = None;

    for &k in ks {
        let step = stabilized_projection(u, q, w, k, &e, region, config)
            .map_err(scenario_err("pipeline", k))?;

        let ps = step.projection.sample(q);
        let vs: Vec<Complex64> = us.iter().zip(&ps).map(|(a, b)| a - b).collect();
        let fs = sample_dbar(u, q);

        let l2 = l2_ratio(&vs, &fs, q, w, k).map_err(scenario_err("theorem_1_2", k))?;
        let sup = weighted_sup_on_k(&vs, &fs, region, q, w, k)
            .map_err(scenario_err("theorem_1_3", k))?;

        // e^{-k_eff·(5/δ)φ} = e^{-kφ}: same measure, stated at δ = 5
        let k_eff = k / scale;
        let mut agmon = Vec::with_capacity(config.agmon_centers.len());
        for &a in &config.agmon_centers {
            agmon.push(
                agmon_entry(&vs, &fs, q, &w5, k_eff, a)
                    .map_err(scenario_err("theorem_2_1", k))?,
            );
        }

        let loc = local_estimate_check(&vs, &fs, k, a_e, q)
            .map_err(scenario_err("eq_2_3", k))?;

        if scen.eq_2_3 && (k - RECONSTRUCTION_K).abs() < 1e-9 {
            let rel = reconstruction_error(&vs, &fs, k, a_e, q, u, &step.projection)
                .map_err(scenario_err("eq_2_3", k))?;
            bm_check = Some(SeriesPoint { k, value: rel });
        }

        if gaussian_wanted {
            let g = GaussianApproximant::from_test_function(u, k)
                .map_err(scenario_err("gaussian_compare", k))?;
            let pts = e.restrict(region).map_err(scenario_err("gaussian_compare", k))?;
            let err = pts.iter().map(|&z| (u.eval(z) - g.eval(z)).norm()).fold(0.0, f64::max);
            gaussian_errs.push(err);
        }

        report.per_k.push(RatioReport {
            k,
            basis_degree: step.degree,
            gram_condition: step.condition,
            sup_err_e: step.sup_err,
            l2_ratio: l2,
            sup_ratio: sup,
            agmon_ratios: agmon,
            bm_lhs: loc.lhs,
            bm_rhs_l2_term: loc.rhs_l2,
            bm_rhs_f_term: loc.rhs_f,
        });
    }

    if scen.theorem_1_1 {
        let errs: Vec<f64> = report.per_k.iter().map(|r| r.sup_err_e).collect();
        report.series.insert("theorem_1_1".to_string(), series_of(ks, &errs));
        let decreasing = errs.windows(2).all(|p| p[1] < p[0]);
        let verdict = match fit_rate(ks, &errs) {
            Ok(fit) => {
                let pass =
                    decreasing && fit.slope <= t.max_slope && fit.r_squared >= t.min_r_squared;
                let detail = format!(
                    "slope {:.3} (max {:.2}), r2 {:.4} (min {:.2}), strictly decreasing: {}",
                    fit.slope, t.max_slope, fit.r_squared, t.min_r_squared, decreasing
                );
                report.fits.insert("theorem_1_1".to_string(), fit);
                Verdict { pass, detail }
            }
            Err(err) => Verdict { pass: false, detail: err.to_string() },
        };
        report.verdicts.insert("theorem_1_1".to_string(), verdict);
    }

    if scen.theorem_1_2 {
        let vals: Vec<f64> = report.per_k.iter().map(|r| r.k * r.l2_ratio).collect();
        report.series.insert("theorem_1_2".to_string(), series_of(ks, &vals));
        report.verdicts.insert(
            "theorem_1_2".to_string(),
            spread_verdict("k*l2_ratio", &vals, t.max_ratio_spread),
        );
    }

    if scen.theorem_1_3 {
        let vals: Vec<f64> = report.per_k.iter().map(|r| r.k * r.sup_ratio).collect();
        report.series.insert("theorem_1_3".to_string(), series_of(ks, &vals));
        report.verdicts.insert(
            "theorem_1_3".to_string(),
            spread_verdict("k*sup_ratio", &vals, t.max_ratio_spread),
        );
    }

    if scen.theorem_2_1 {
        let mut pass = true;
        let mut parts = Vec::new();
        for idx in 0..config.agmon_centers.len() {
            let vals: Vec<f64> = report
                .per_k
                .iter()
                .map(|r| r.k * r.agmon_ratios[idx].ratio)
                .collect();
            report
                .series
                .insert(format!("theorem_2_1_a{}", idx + 1), series_of(ks, &vals));
            match spread(&vals) {
                Some(s) => {
                    if s > t.max_ratio_spread {
                        pass = false;
                    }
                    parts.push(format!("center {} spread {:.3}", idx + 1, s));
                }
                None => {
                    pass = false;
                    parts.push(format!("center {} ratios not positive finite", idx + 1));
                }
            }
        }
        let mut worst_gap = 0.0f64;
        for r in &report.per_k {
            for en in &r.agmon_ratios {
                if en.ratio > 0.0 && en.chi_ratio > 0.0 {
                    worst_gap = worst_gap.max((en.ratio / en.chi_ratio).max(en.chi_ratio / en.ratio));
                } else {
                    pass = false;
                }
            }
        }
        if worst_gap > t.max_variant_gap {
            pass = false;
        }
        parts.push(format!("variant gap {:.4} (max {:.4})", worst_gap, t.max_variant_gap));
        report
            .verdicts
            .insert("theorem_2_1".to_string(), Verdict { pass, detail: parts.join("; ") });
    }

    if scen.eq_2_3 {
        let vals: Vec<f64> = report
            .per_k
            .iter()
            .map(|r| r.bm_lhs / (r.bm_rhs_l2_term + r.bm_rhs_f_term))
            .collect();
        report.series.insert("eq_2_3".to_string(), series_of(ks, &vals));
        let mut verdict = spread_verdict("lhs/(l2 + f) ratio", &vals, t.max_ratio_spread);
        match bm_check {
            Some(pt) => {
                report.series.insert("eq_2_3_bm".to_string(), vec![pt]);
                if pt.value > t.bm_rel_tolerance {
                    verdict.pass = false;
                }
                verdict.detail.push_str(&format!(
                    "; reconstruction at k = {} rel err {:.3e} (max {:.1e})",
                    pt.k, pt.value, t.bm_rel_tolerance
                ));
            }
            None => {
                verdict.detail.push_str(&format!(
                    "; reconstruction skipped (k = {RECONSTRUCTION_K} not in grid)"
                ));
            }
        }
        report.verdicts.insert("eq_2_3".to_string(), verdict);
    }

    if scen.gaussian_compare {
        let verdict = if !gaussian_wanted {
            Verdict {
                pass: false,
                detail: format!(
                    "model comparison needs the flat_line weight, config uses '{}'",
                    w.name()
                ),
            }
        } else {
            let bergman: Vec<f64> = report.per_k.iter().map(|r| r.sup_err_e).collect();
            let degenerate = bergman.iter().all(|&e| e <= 1e-8 * sup_u);
            match ComparisonReport::from_error_tables(ks, &bergman, &gaussian_errs, degenerate) {
                Ok(cr) => {
                    report
                        .series
                        .insert("gaussian_compare".to_string(), series_of(ks, &gaussian_errs));
                    if let Some(fit) = &cr.gaussian_fit {
                        report
                            .fits
                            .insert("gaussian_compare_gaussian".to_string(), fit.clone());
                    }
                    if let Some(fit) = &cr.bergman_fit {
                        report
                            .fits
                            .insert("gaussian_compare_bergman".to_string(), fit.clone());
                    }
                    comparison_verdict(&cr, t)
                }
                Err(err) => Verdict { pass: false, detail: err.to_string() },
            }
        };
        report.verdicts.insert("gaussian_compare".to_string(), verdict);
    }

    Ok(())
}

fn spread_verdict(what: &str, values: &[f64], max_spread: f64) -> Verdict {
    match spread(values) {
        Some(s) => Verdict {
            pass: s <= max_spread,
            detail: format!("{what} spread {s:.3} (max {max_spread})"),
        },
        None => Verdict {
            pass: false,
            detail: format!("{what} contains non-finite or non-positive values"),
        },
    }
}

fn comparison_verdict(cr: &ComparisonReport, t: &crate::experiment::config::VerdictThresholds) -> Verdict {
    if cr.degenerate {
        return Verdict {
            pass: false,
            detail: "input lies in the projection span; no Bergman rate to compare".to_string(),
        };
    }
    match (&cr.bergman_fit, &cr.gaussian_fit) {
        (Some(b), Some(g)) => {
            let gap = (b.slope - g.slope).abs();
            let pass =
                b.slope <= t.max_slope && g.slope <= t.max_slope && gap <= t.max_slope_gap;
            Verdict {
                pass,
                detail: format!(
                    "bergman slope {:.3}, gaussian slope {:.3} (max {:.2}), gap {:.3} (max {:.2})",
                    b.slope, g.slope, t.max_slope, gap, t.max_slope_gap
                ),
            }
        }
        _ => Verdict { pass: false, detail: "missing rate fit".to_string() },
    }
}

fn run_polynomial_mode(
    config: &ExperimentConfig,
    model: ModelWeight,
    q: &Quadrature,
    region: &CompactK,
    u: &TestFunction,
    report: &mut ExperimentReport,
) -> Result<()> {
    let ks = &config.k_values;
    let model_poly = match model {
        ModelWeight::LogGrowth { .. } => model,
        _ => ModelWeight::LogGrowth { m: 4.0 },
    };
    let w = make_model_weight(model_poly, &config.domain)?;
    let e = sample_zero_set(&w, &config.domain, ZERO_SET_SAMPLES, ZERO_SET_TOLERANCE)?;
    let pts: Vec<Complex64> = e
        .restrict(region)?
        .into_iter()
        .filter(|z| z.re.abs() <= POLYNOMIAL_E_HALF_WIDTH)
        .collect();
    if pts.is_empty() {
        return Err(Error::EmptySupSample);
    }

    let mut errs = Vec::new();
    let mut capped = Vec::new();
    for &k in ks {
        let basis = Basis::polynomials_deg_k(&config.domain, k, config.basis_policy.max_degree);
        let g = gram_matrix(&basis, q, &w, k);
        let factor =
            orthonormalize(&g, config.eigen_floor).map_err(scenario_err("polynomial_mode", k))?;
        let p = project(u, &basis, &factor, q, &w, k)
            .map_err(scenario_err("polynomial_mode", k))?;
        let err = pts.iter().map(|&z| (u.eval(z) - p.eval(z)).norm()).fold(0.0, f64::max);
        errs.push(err);
        capped.push(basis.degree < k.floor() as usize);
    }
    report
        .series
        .insert("polynomial_mode".to_string(), series_of(ks, &errs));

    // the degree cap breaks the degree-equals-k coupling, so capped k
    // values are left out of the fit when enough uncapped ones remain
    let mut fit_ks = Vec::new();
    let mut fit_errs = Vec::new();
    for i in 0..ks.len() {
        if !capped[i] {
            fit_ks.push(ks[i]);
            fit_errs.push(errs[i]);
        }
    }
    let (fit_ks, fit_errs, note) = if fit_ks.len() >= 3 {
        let note = if fit_ks.len() < ks.len() {
            format!(" (fit over {} uncapped k values)", fit_ks.len())
        } else {
            String::new()
        };
        (fit_ks, fit_errs, note)
    } else {
        (ks.clone(), errs.clone(), " (fit includes degree-capped k values)".to_string())
    };

    let verdict = match fit_rate(&fit_ks, &fit_errs) {
        Ok(fit) => {
            let pass = fit.slope < 0.0;
            let detail = format!(
                "slope {:.3} vs the -0.5 reference, r2 {:.4}{note}",
                fit.slope, fit.r_squared
            );
            report.fits.insert("polynomial_mode".to_string(), fit);
            Verdict { pass, detail }
        }
        Err(err) => Verdict { pass: false, detail: err.to_string() },
    };
    report.verdicts.insert("polynomial_mode".to_string(), verdict);
    Ok(())
}
