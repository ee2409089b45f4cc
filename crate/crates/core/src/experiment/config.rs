//! Experiment configuration: JSON in, validated config out.
//!
//! Every field except the weight has a default, so a minimal file like
//! {"weight": "flat_line", "k_values": [16, 64, 256]} runs the full
//! sweep at the reference operating point.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::geometry::Rect;
use crate::weights::ModelWeight;
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightSpec {
    /// Bare name, e.g. "flat_line".
    Name(String),
    /// Name plus numeric parameters, e.g. {"name": "circle", "params": {"radius": 0.8}}.
    Full {
        name: String,
        #[serde(default)]
        params: BTreeMap<String, f64>,
    },
}

impl WeightSpec {
    pub fn name(&self) -> &str {
        match self {
            WeightSpec::Name(n) => n,
            WeightSpec::Full { name, .. } => name,
        }
    }

    fn param(&self, key: &str) -> Option<f64> {
        match self {
            WeightSpec::Name(_) => None,
            WeightSpec::Full { params, .. } => params.get(key).copied(),
        }
    }

    fn reject_unknown_params(&self, allowed: &[&str]) -> Result<()> {
        if let WeightSpec::Full { name, params } = self {
            for key in params.keys() {
                if !allowed.contains(&key.as_str()) {
                    return Err(Error::Config(format!(
                        "weight.params.{key}: unknown parameter for weight '{name}'"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Maps the spec onto a model weight, applying parameter defaults.
    pub fn resolve(&self) -> Result<ModelWeight> {
        match self.name() {
            "flat_line" => {
                self.reject_unknown_params(&[])?;
                Ok(ModelWeight::FlatLine)
            }
            "scaled_line" => {
                self.reject_unknown_params(&["c"])?;
                let c = self.param("c").unwrap_or(2.0);
                Ok(ModelWeight::ScaledLine { c })
            }
            "circle" => {
                self.reject_unknown_params(&["radius"])?;
                let radius = self.param("radius").unwrap_or(1.0);
                Ok(ModelWeight::Circle { radius })
            }
            "log_growth" => {
                self.reject_unknown_params(&["m"])?;
                let m = self.param("m").unwrap_or(4.0);
                Ok(ModelWeight::LogGrowth { m })
            }
            other => Err(Error::Config(format!(
                "weight.name: unknown weight '{other}' (expected one of {})",
                WEIGHT_NAMES.join(", ")
            ))),
        }
    }
}

pub const WEIGHT_NAMES: [&str; 4] = ["flat_line", "scaled_line", "circle", "log_growth"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resolution {
    pub nx: usize,
    pub ny: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegreeRule {
    /// Initial degree is ceil(coeff·√k) + offset.
    pub coeff: f64,
    pub offset: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BasisPolicy {
    pub initial_degree_rule: DegreeRule,
    /// Stop doubling the degree once the sup error moves less than this
    /// relative amount.
    pub stabilization_threshold: f64,
    pub max_degree: usize,
}

impl Default for BasisPolicy {
    fn default() -> Self {
        BasisPolicy {
            initial_degree_rule: DegreeRule { coeff: 2.0, offset: 4 },
            stabilization_threshold: 0.02,
            max_degree: 80,
        }
    }
}

impl BasisPolicy {
    pub fn initial_degree(&self, k: f64) -> usize {
        (self.initial_degree_rule.coeff * k.sqrt()).ceil() as usize
            + self.initial_degree_rule.offset
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Scenarios {
    pub theorem_1_1: bool,
    pub theorem_1_2: bool,
    pub theorem_1_3: bool,
    pub theorem_2_1: bool,
    pub eq_2_3: bool,
    pub gaussian_compare: bool,
    pub polynomial_mode: bool,
}

impl Default for Scenarios {
    fn default() -> Self {
        Scenarios {
            theorem_1_1: true,
            theorem_1_2: true,
            theorem_1_3: true,
            theorem_2_1: true,
            eq_2_3: true,
            gaussian_compare: true,
            polynomial_mode: true,
        }
    }
}

impl Scenarios {
    pub const NAMES: [&'static str; 7] = [
        "theorem_1_1",
        "theorem_1_2",
        "theorem_1_3",
        "theorem_2_1",
        "eq_2_3",
        "gaussian_compare",
        "polynomial_mode",
    ];

    pub fn none() -> Self {
        Scenarios {
            theorem_1_1: false,
            theorem_1_2: false,
            theorem_1_3: false,
            theorem_2_1: false,
            eq_2_3: false,
            gaussian_compare: false,
            polynomial_mode: false,
        }
    }

    pub fn enabled(&self, name: &str) -> bool {
        match name {
            "theorem_1_1" => self.theorem_1_1,
            "theorem_1_2" => self.theorem_1_2,
            "theorem_1_3" => self.theorem_1_3,
            "theorem_2_1" => self.theorem_2_1,
            "eq_2_3" => self.eq_2_3,
            "gaussian_compare" => self.gaussian_compare,
            "polynomial_mode" => self.polynomial_mode,
            _ => false,
        }
    }

    pub fn enable(&mut self, name: &str) -> Result<()> {
        match name {
            "theorem_1_1" => self.theorem_1_1 = true,
            "theorem_1_2" => self.theorem_1_2 = true,
            "theorem_1_3" => self.theorem_1_3 = true,
            "theorem_2_1" => self.theorem_2_1 = true,
            "eq_2_3" => self.eq_2_3 = true,
            "gaussian_compare" => self.gaussian_compare = true,
            "polynomial_mode" => self.polynomial_mode = true,
            other => {
                return Err(Error::Config(format!(
                    "unknown scenario '{other}' (expected one of {})",
                    Self::NAMES.join(", ")
                )))
            }
        }
        Ok(())
    }

    /// Any scenario that needs the main projection sweep.
    pub fn needs_pipeline(&self) -> bool {
        self.theorem_1_1
            || self.theorem_1_2
            || self.theorem_1_3
            || self.theorem_2_1
            || self.eq_2_3
            || self.gaussian_compare
    }

    pub fn any(&self) -> bool {
        self.needs_pipeline() || self.polynomial_mode
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VerdictThresholds {
    /// Fitted log-log slope must be at or below this.
    pub max_slope: f64,
    pub min_r_squared: f64,
    /// max/min of k·ratio across the k grid.
    pub max_ratio_spread: f64,
    /// Pointwise bound between the two Agmon damping variants.
    pub max_variant_gap: f64,
    /// Allowed gap between Bergman and Gaussian fitted slopes.
    pub max_slope_gap: f64,
    /// Reconstruction error relative to sup_ball|v|.
    pub bm_rel_tolerance: f64,
}

impl Default for VerdictThresholds {
    fn default() -> Self {
        VerdictThresholds {
            max_slope: -0.45,
            min_r_squared: 0.9,
            max_ratio_spread: 5.0,
            max_variant_gap: std::f64::consts::E,
            max_slope_gap: 0.3,
            bm_rel_tolerance: 5e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OutputConfig {
    pub csv_path: PathBuf,
    pub json_path: PathBuf,
    /// Per-scenario plot files are written as <prefix>_<scenario>.csv.
    pub plot_prefix: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            csv_path: PathBuf::from("report.csv"),
            json_path: PathBuf::from("report.json"),
            plot_prefix: "plot".to_string(),
        }
    }
}

fn default_domain() -> Rect {
    Rect::centered_square(1.0).expect("unit square is valid")
}

fn default_resolution() -> Resolution {
    Resolution { nx: 256, ny: 256 }
}

fn default_k_values() -> Vec<f64> {
    vec![16.0, 32.0, 64.0, 128.0, 256.0]
}

fn default_margin() -> f64 {
    0.25
}

fn default_test_function() -> String {
    "standard_bump".to_string()
}

fn default_agmon_centers() -> Vec<Complex64> {
    vec![Complex64::new(0.0, 0.0), Complex64::new(0.4, 0.3)]
}

fn default_eigen_floor() -> f64 {
    1e-12
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub weight: WeightSpec,
    #[serde(default = "default_domain")]
    pub domain: Rect,
    #[serde(default = "default_resolution")]
    pub resolution: Resolution,
    #[serde(default = "default_k_values")]
    pub k_values: Vec<f64>,
    #[serde(default = "default_margin")]
    pub margin: f64,
    #[serde(default)]
    pub basis_policy: BasisPolicy,
    #[serde(default = "default_test_function")]
    pub test_function: String,
    #[serde(default = "default_agmon_centers")]
    pub agmon_centers: Vec<Complex64>,
    #[serde(default)]
    pub scenarios: Scenarios,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default = "default_eigen_floor")]
    pub eigen_floor: f64,
    #[serde(default)]
    pub verdicts: VerdictThresholds,
}

impl ExperimentConfig {
    /// Reference configuration over the given weight name.
    pub fn default_for(weight: &str) -> ExperimentConfig {
        ExperimentConfig {
            weight: WeightSpec::Name(weight.to_string()),
            domain: default_domain(),
            resolution: default_resolution(),
            k_values: default_k_values(),
            margin: default_margin(),
            basis_policy: BasisPolicy::default(),
            test_function: default_test_function(),
            agmon_centers: default_agmon_centers(),
            scenarios: Scenarios::default(),
            output: OutputConfig::default(),
            eigen_floor: default_eigen_floor(),
            verdicts: VerdictThresholds::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.weight.resolve()?;

        if self.resolution.nx < 2 || self.resolution.ny < 2 {
            return Err(Error::Config(format!(
                "resolution: needs at least 2 cells per axis, got {}x{}",
                self.resolution.nx, self.resolution.ny
            )));
        }

        for pair in self.k_values.windows(2) {
            if pair[1] <= pair[0] {
                return Err(Error::Config(format!(
                    "k_values: must be strictly increasing, got {} after {}",
                    pair[1], pair[0]
                )));
            }
        }
        if let Some(&first) = self.k_values.first() {
            if first <= 0.0 {
                return Err(Error::Config(format!(
                    "k_values: must all be positive, got {first}"
                )));
            }
        }

        // h ≤ 1/(4√k_max) keeps the weight's localization scale resolved
        if let Some(&k_max) = self.k_values.last() {
            let need = 4.0 * k_max.sqrt();
            let nx_req = (2.0 * self.domain.half_width_x * need).ceil() as usize;
            let ny_req = (2.0 * self.domain.half_width_y * need).ceil() as usize;
            if self.resolution.nx < nx_req || self.resolution.ny < ny_req {
                return Err(Error::Config(format!(
                    "resolution: k_max = {k_max} needs h <= 1/(4*sqrt(k_max)), \
                     i.e. nx >= {nx_req} and ny >= {ny_req}, got {}x{}",
                    self.resolution.nx, self.resolution.ny
                )));
            }
        }

        let min_hw = self.domain.half_width_x.min(self.domain.half_width_y);
        if !(0.0..min_hw).contains(&self.margin) {
            return Err(Error::Config(format!(
                "margin: must lie in [0, {min_hw}), got {}",
                self.margin
            )));
        }

        if self.agmon_centers.len() != 2 {
            return Err(Error::Config(format!(
                "agmon_centers: exactly 2 centers expected, got {}",
                self.agmon_centers.len()
            )));
        }

        if !(self.eigen_floor > 0.0 && self.eigen_floor < 1.0) {
            return Err(Error::Config(format!(
                "eigen_floor: must lie in (0, 1), got {}",
                self.eigen_floor
            )));
        }

        if self.basis_policy.max_degree == 0 {
            return Err(Error::Config("basis_policy.max_degree: must be positive".into()));
        }
        if !(self.basis_policy.stabilization_threshold > 0.0) {
            return Err(Error::Config(
                "basis_policy.stabilization_threshold: must be positive".into(),
            ));
        }

        crate::bergman::testfn::TestFunction::by_name(&self.test_function).ok_or_else(|| {
            Error::Config(format!(
                "test_function: unknown '{}' (expected one of {})",
                self.test_function,
                crate::bergman::testfn::TestFunction::names().join(", ")
            ))
        })?;

        Ok(())
    }
}

/// Reads, parses, and validates a config file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)?;
    let config: ExperimentConfig = serde_json::from_str(&text)?;
    config.validate()?;
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let c: ExperimentConfig =
            serde_json::from_str(r#"{"weight": "flat_line", "k_values": [16, 64, 256]}"#).unwrap();
        c.validate().unwrap();
        assert_eq!(c.weight.resolve().unwrap(), ModelWeight::FlatLine);
        assert_eq!(c.resolution, Resolution { nx: 256, ny: 256 });
        assert_eq!(c.margin, 0.25);
        assert_eq!(c.k_values, vec![16.0, 64.0, 256.0]);
        assert_eq!(c.agmon_centers.len(), 2);
        assert!(c.scenarios.theorem_1_1 && c.scenarios.polynomial_mode);
        assert_eq!(c.eigen_floor, 1e-12);
        assert_eq!(c.verdicts.max_slope, -0.45);
    }

    #[test]
    fn weight_params_resolve_and_reject_unknowns() {
        let c: ExperimentConfig = serde_json::from_str(
            r#"{"weight": {"name": "circle", "params": {"radius": 0.8}}}"#,
        )
        .unwrap();
        assert_eq!(c.weight.resolve().unwrap(), ModelWeight::Circle { radius: 0.8 });

        let c: ExperimentConfig = serde_json::from_str(
            r#"{"weight": {"name": "circle", "params": {"r": 0.8}}}"#,
        )
        .unwrap();
        let err = c.validate().unwrap_err().to_string();
        assert!(err.contains("weight.params.r"), "{err}");

        let c: ExperimentConfig = serde_json::from_str(r#"{"weight": "no_such"}"#).unwrap();
        let err = c.validate().unwrap_err().to_string();
        assert!(err.contains("weight.name"), "{err}");
    }

    #[test]
    fn decreasing_k_values_are_rejected() {
        let c: ExperimentConfig =
            serde_json::from_str(r#"{"weight": "flat_line", "k_values": [64, 16]}"#).unwrap();
        let err = c.validate().unwrap_err().to_string();
        assert!(err.contains("strictly increasing"), "{err}");
    }

    #[test]
    fn resolution_rule_names_the_required_grid() {
        let c: ExperimentConfig = serde_json::from_str(
            r#"{"weight": "flat_line", "k_values": [10000], "resolution": {"nx": 64, "ny": 64}}"#,
        )
        .unwrap();
        let err = c.validate().unwrap_err().to_string();
        assert!(err.contains("nx >= 800"), "{err}");
    }

    #[test]
    fn empty_k_values_are_allowed() {
        let c: ExperimentConfig =
            serde_json::from_str(r#"{"weight": "flat_line", "k_values": []}"#).unwrap();
        c.validate().unwrap();
    }

    #[test]
    fn complex_centers_are_re_im_pairs() {
        let c: ExperimentConfig = serde_json::from_str(
            r#"{"weight": "flat_line", "agmon_centers": [[0.1, -0.2], [0, 0]]}"#,
        )
        .unwrap();
        assert_eq!(c.agmon_centers[0], Complex64::new(0.1, -0.2));
        let round = serde_json::to_string(&c).unwrap();
        assert!(round.contains(r#""agmon_centers":[[0.1,-0.2],[0.0,0.0]]"#), "{round}");
        let c2: ExperimentConfig = serde_json::from_str(&round).unwrap();
        assert_eq!(c, c2);
    }

    #[test]
    fn scenario_toggles_by_name() {
        let mut s = Scenarios::none();
        assert!(!s.any());
        s.enable("theorem_1_2").unwrap();
        assert!(s.enabled("theorem_1_2"));
        assert!(s.needs_pipeline());
        assert!(s.enable("bogus").is_err());
    }

    #[test]
    fn load_reports_missing_files_and_bad_json() {
        assert!(load_config(Path::new("/nonexistent/config.json")).is_err());
        let dir = std::env::temp_dir().join("bergman-lab-config-test");
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("bad.json");
        std::fs::write(&p, "{not json").unwrap();
        assert!(matches!(load_config(&p), Err(Error::Json(_))));
        let good = dir.join("good.json");
        std::fs::write(&good, r#"{"weight": "flat_line", "k_values": [16, 64]}"#).unwrap();
        let c = load_config(&good).unwrap();
        assert_eq!(c.k_values, vec![16.0, 64.0]);
    }
}
