use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("rod needs at least {min} points, got {got}")]
    TooFewPoints { min: usize, got: usize },

    #[error("edge {index} has zero length")]
    DegenerateEdge { index: usize },

    #[error("edges {index} and {} reverse direction", index + 1)]
    ReversingEdges { index: usize },

    #[error("expected {expected} twist angles (one per edge), got {got}")]
    AngleCountMismatch { expected: usize, got: usize },

    #[error("parameter {t} outside domain [{lo}, {hi}]")]
    OutOfDomain { t: f64, lo: f64, hi: f64 },

    #[error("initial frame is invalid: {0}")]
    InvalidFrame(String),

    #[error("frame fields are sampled on different grids")]
    GridMismatch,

    #[error("chord radius {r} outside the small-radius regime (r * |u''|_inf = {product} >= 1)")]
    OutsideSmallRadius { r: f64, product: f64 },

    #[error("could not bracket the equal-chord radius for N = {n}: {reason}")]
    BracketFailure { n: usize, reason: String },

    #[error("curve speed {speed:e} at t = {t} is below the degenerate-speed threshold")]
    DegenerateSpeed { t: f64, speed: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// True for failures of a numerical procedure on otherwise valid input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::BracketFailure { .. } | Error::DegenerateSpeed { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
