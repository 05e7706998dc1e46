use std::fmt;

use thiserror::Error;

/// Integration axis of a nested two-dimensional quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Outer,
    Inner,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axis::Outer => f.write_str("outer"),
            Axis::Inner => f.write_str("inner"),
        }
    }
}

fn axis_suffix(axis: &Option<Axis>) -> String {
    axis.map(|a| format!(" on the {a} axis")).unwrap_or_default()
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error(
        "quadrature did not converge{}: value {value:e}, error estimate {error_estimate:e} after {evaluations} evaluations",
        axis_suffix(axis)
    )]
    NonConverged {
        axis: Option<Axis>,
        value: f64,
        error_estimate: f64,
        evaluations: usize,
    },

    #[error("integrand returned a non-finite value at {at:e}{}", axis_suffix(axis))]
    NonFiniteEvaluation { axis: Option<Axis>, at: f64 },

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("Richardson extrapolation unstable, successive estimates {estimates:?}")]
    ExtrapolationUnstable { estimates: Vec<f64> },

    #[error("asymptotic fit unstable: rms residual {rms_residual:e} exceeds {tolerance:e}")]
    FitUnstable { rms_residual: f64, tolerance: f64 },
}

impl Error {
    /// Tags a quadrature failure with the axis it happened on, unless already tagged.
    pub fn on_axis(self, tag: Axis) -> Self {
        match self {
            Error::NonConverged {
                axis: None,
                value,
                error_estimate,
                evaluations,
            } => Error::NonConverged {
                axis: Some(tag),
                value,
                error_estimate,
                evaluations,
            },
            Error::NonFiniteEvaluation { axis: None, at } => Error::NonFiniteEvaluation {
                axis: Some(tag),
                at,
            },
            other => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
