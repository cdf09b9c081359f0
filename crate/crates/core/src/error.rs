use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("gamma function pole at x = {x}")]
    Pole { x: f64 },

    #[error("result not representable in double precision (x = {x})")]
    Overflow { x: f64 },

    #[error("accuracy budget not met in {what}: {detail}")]
    AccuracyNotMet { what: &'static str, detail: String },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("time mesh is not uniform (node {index})")]
    NonuniformMesh { index: usize },

    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("negative-order operator requires the `zero` zero-mode policy")]
    ZeroModePolicy,

    #[error("symbol evaluation failed at frequency {freq:?}: {message}")]
    Symbol { freq: Vec<f64>, message: String },

    #[error("shape error: {0}")]
    Shape(String),

    #[error("time must be positive, got {0}")]
    NonPositiveTime(f64),

    #[error("only {shells} Littlewood-Paley shells fit the grid (need at least 3)")]
    BandTooNarrow { shells: usize },

    #[error("shell index {k} outside the bank range [{min}, {max}]")]
    ShellOutOfRange { k: i32, min: i32, max: i32 },

    #[error("radius {radius} exceeds the torus limit {limit}")]
    RadiusTooLarge { radius: f64, limit: f64 },

    #[error("parameter constraint violated: {0}")]
    Constraint(String),

    #[error("history incomplete: need {needed} nodes, have {have}")]
    MissingHistory { needed: usize, have: usize },

    #[error("non-finite value in {what} at time index {t_index}")]
    NonFinite { what: &'static str, t_index: usize },

    #[error("invalid time window: {0}")]
    Window(String),

    #[error("regression ill-conditioned: {0}")]
    Regression(String),

    #[error("mismatched configurations: {0}")]
    Mismatch(String),

    #[error("smallness gate failed: {0}")]
    Gate(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
