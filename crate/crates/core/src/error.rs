use alloc::string::String;

/// Errors raised by the core algorithms.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid `{name}` = {value}: expected {expected}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    #[error("horizon n = {n} is outside the supported range ({reason})")]
    InvalidHorizon { n: u64, reason: &'static str },
    #[error("sample {index} is not finite")]
    NonFiniteSample { index: usize },
    #[error("bracket decreases at index {index}")]
    DecreasingBracket { index: usize },
    #[error("coefficients cover indices 0..={available} but {needed} are required")]
    InsufficientCoverage { needed: usize, available: usize },
    #[error("log-log fit needs at least 3 points, got {got}")]
    TooFewPoints { got: usize },
    #[error("duplicate horizon n = {n} in fit input")]
    DuplicateHorizon { n: f64 },
    #[error("distance d = {d} at n = {n} is not positive; log undefined")]
    NonPositiveDistance { n: f64, d: f64 },
    #[error("series lengths differ ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("unsupported innovations: {0}")]
    UnsupportedInnovations(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn check_range(
    name: &'static str,
    value: f64,
    ok: bool,
    expected: &'static str,
) -> Result<()> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            expected,
        })
    }
}
