//! Config-driven experiment orchestration: parse and validate a JSON
//! config, sweep the k grid, and emit CSV/JSON reports.

pub mod config;
pub mod report;
pub mod runner;

pub use config::{
    load_config, BasisPolicy, DegreeRule, ExperimentConfig, OutputConfig, Resolution, Scenarios,
    VerdictThresholds, WeightSpec, WEIGHT_NAMES,
};
pub use report::{emit, render_csv, render_json, render_series_csv, CSV_HEADER};
pub use runner::{run, ExperimentReport, SeriesPoint, Verdict};
