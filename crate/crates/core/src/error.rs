use std::fmt;

/// Errors raised by the analytic engines, the channel models and the simulator.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A Gamma-type factor was evaluated exactly on one of its poles.
    #[error("pole hit: {what} evaluated at {at}")]
    PoleHit { what: &'static str, at: Point },

    /// An iterative procedure ran out of budget.
    #[error("{what} did not converge (last {last:e}, previous {previous:e})")]
    NonConvergence {
        what: &'static str,
        last: f64,
        previous: f64,
    },

    /// A model or configuration parameter is outside its admissible range.
    #[error("invalid parameter `{field}` = {value}: {reason}")]
    InvalidParameter {
        field: String,
        value: f64,
        reason: &'static str,
    },

    /// Argument outside the domain of a formula.
    #[error("domain error: {0}")]
    Domain(String),

    /// An analytic estimate fell outside [-1e-6, 1 + 1e-6] before clamping.
    #[error("outage estimate {value:e} is outside [0, 1] beyond tolerance")]
    RangeOvershoot { value: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

/// Complex location used in error reports.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub re: f64,
    pub im: f64,
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im == 0.0 {
            write!(f, "{}", self.re)
        } else {
            write!(f, "{}{:+}i", self.re, self.im)
        }
    }
}

impl From<num_complex::Complex64> for Point {
    fn from(z: num_complex::Complex64) -> Self {
        Point { re: z.re, im: z.im }
    }
}

pub(crate) fn invalid(field: impl Into<String>, value: f64, reason: &'static str) -> Error {
    Error::InvalidParameter {
        field: field.into(),
        value,
        reason,
    }
}
