use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid resolution must be positive in both directions (got {nx}x{ny})")]
    DegenerateGrid { nx: usize, ny: usize },

    #[error("rect half-widths must be positive and finite")]
    BadRect,

    #[error("margin {margin} must lie in [0, {limit}) for this rect")]
    BadMargin { margin: f64, limit: f64 },

    #[error("zero set {{phi = 0}} does not meet the rect")]
    EmptyZeroSet,

    #[error("no zero-set samples inside the compact subset")]
    EmptySupSample,

    #[error("weight '{name}' rejected: {reason}")]
    BadWeight { name: String, reason: String },

    #[error("every Gram eigenvalue falls below the truncation floor")]
    DegenerateBasis,

    #[error("sample length {got} does not match the grid ({expected} nodes)")]
    LengthMismatch { got: usize, expected: usize },

    #[error("denominator vanishes in {what}")]
    ZeroDenominator { what: &'static str },

    #[error("ball of radius {radius} around {center} leaves the grid rect")]
    BallOutsideDomain { center: Complex64, radius: f64 },

    #[error("rate fit needs at least 3 samples (got {got})")]
    TooFewPoints { got: usize },

    #[error("rate fit requires strictly positive {what}")]
    NonpositiveData { what: &'static str },

    #[error("{0}")]
    BadArgument(String),

    #[error("config invalid: {0}")]
    Config(String),

    #[error("scenario {scenario} failed at k = {k}: {source}")]
    Scenario {
        scenario: String,
        k: f64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
