use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("spinor has zero norm")]
    ZeroNorm,
    #[error("wavelength must be positive, got {0} m")]
    NonPositiveWavelength(f64),
    #[error("field magnitude must be positive, got {0} T")]
    NonPositiveField(f64),
    #[error("speed must be positive, got {0} m/s")]
    NonPositiveSpeed(f64),
    #[error("frequency must be positive, got {0} rad/s")]
    NonPositiveFrequency(f64),
    #[error(
        "outgoing frequency {0} rad/s is not positive; outside the slow-rotation approximation"
    )]
    NonPositiveOutput(f64),
    #[error("magnetic quantum number {0} is neither integer nor half-odd-integer")]
    InvalidQuantumNumber(f64),
    #[error("invalid element: {0}")]
    InvalidElement(String),
    #[error("oscillating rotation profile is not supported by the closed-form propagator")]
    UnsupportedProfile,
    #[error("numerical integration did not converge within {max_steps} steps")]
    NoConvergence { max_steps: u64 },
    #[error("path lengths differ: path I is {path_i} m, path II is {path_ii} m")]
    UnequalPathLengths { path_i: f64, path_ii: f64 },
    #[error("invalid configuration at `{field}`: {message}")]
    InvalidConfig { field: String, message: String },
    #[error("insufficient data for a beat fit: {0}")]
    InsufficientData(String),
    #[error("no beat present: {0}")]
    DegenerateFit(String),
    #[error("malformed input: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field: field.into(),
            message: message.into(),
        }
    }

    /// True for errors that come from numerics rather than from bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. } | Error::InsufficientData(_) | Error::DegenerateFit(_)
        )
    }
}
