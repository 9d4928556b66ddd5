use thiserror::Error;

/// Errors produced by the toolkit.
///
/// Domain errors carry the name of the offending quantity so that front ends
/// can point at the input that caused them.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} = {value} is out of range: {requirement}")]
    Domain {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },

    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },

    #[error("integrator exceeded {max_steps} steps at t = {t}")]
    TooManySteps { max_steps: usize, t: f64 },

    #[error("invalid drive protocol: {0}")]
    Protocol(String),

    #[error(
        "stroke adiabaticity parameters disagree: compression {compression}, expansion {expansion}"
    )]
    StrokeMismatch { compression: f64, expansion: f64 },

    #[error("efficiency {eta} is not reachable at these reservoir settings")]
    EfficiencyOutOfRange { eta: f64 },

    #[error("invalid interval [{lo}, {hi}]")]
    Interval { lo: f64, hi: f64 },

    #[error("invalid ensemble configuration: {0}")]
    Config(String),

    #[error("table: {0}")]
    Table(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Rejects values outside `lo < value < hi`. Non-finite values always fail.
pub(crate) fn open_range(
    name: &'static str,
    value: f64,
    lo: f64,
    hi: f64,
    requirement: &'static str,
) -> Result<f64> {
    if value.is_finite() && value > lo && value < hi {
        Ok(value)
    } else {
        Err(Error::Domain {
            name,
            value,
            requirement,
        })
    }
}

pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64> {
    open_range(
        name,
        value,
        0.0,
        f64::INFINITY,
        "must be positive and finite",
    )
}
