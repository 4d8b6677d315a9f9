//! Error types shared across the crate.

use thiserror::Error;

/// Errors raised while loading or parsing a parameter or scenario file.
#[derive(Debug, Error)]
pub enum ParamsError {
    #[error("missing key `{0}`")]
    MissingKey(String),
    #[error("vector `{key}` has length {got}, expected t_max = {expected}")]
    LengthMismatch {
        key: String,
        expected: usize,
        got: usize,
    },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("io error reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Errors raised by the forward simulation.
#[derive(Debug, Error)]
pub enum SimError {
    #[error("simulation left its domain at period {period}: {quantity} = {value}")]
    Domain {
        period: usize,
        quantity: &'static str,
        value: f64,
    },
    #[error("control `{name}` out of bounds at period {period}: {value}")]
    ControlsOutOfBounds {
        name: &'static str,
        period: usize,
        value: f64,
    },
    #[error("perturbation period {period} outside horizon 1..={t_max}")]
    PerturbationOutOfHorizon { period: usize, t_max: usize },
    #[error("perturbation amount is not finite")]
    NonFinitePerturbation,
}

/// Errors raised by derivative computations.
#[derive(Debug, Error)]
pub enum DiffError {
    #[error("finite-difference step must be positive, got {0}")]
    InvalidStep(f64),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Errors raised while running a scenario end to end.
#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Marginals(#[from] MarginalsError),
    #[error("scenario config: {0}")]
    Config(String),
    #[error("io error writing {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Errors raised by marginal-value extraction and the re-optimization oracle.
#[derive(Debug, Error)]
pub enum MarginalsError {
    #[error("optimizer result did not converge; marginal values are undefined")]
    NotConverged,
    #[error("degenerate consumption dual |cc_m({period})| = {value:e}")]
    DegenerateDual { period: usize, value: f64 },
    #[error("bisection could not bracket the compensating consumption in [0, {x_max}]")]
    BisectionBracket { x_max: f64 },
    #[error(transparent)]
    Sim(#[from] SimError),
}
