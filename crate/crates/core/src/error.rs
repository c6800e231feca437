use thiserror::Error;

use crate::solver::SolveReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point {point:?} lies outside the density domain: {reason}")]
    Domain { point: Vec<f64>, reason: String },

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("radial chart touches a pole (theta range {lo}..{hi})")]
    Pole { lo: f64, hi: f64 },

    #[error("mode {mode} is incompatible with the density: {reason}")]
    Mode { mode: String, reason: String },

    #[error("Newton iteration did not converge (final residual {:e} after {} iterations)", .0.final_residual, .0.iterations)]
    NonConvergence(Box<SolveReport>),

    #[error("profile stops being a graph at s = {s} (|f'| = {slope:e})")]
    BlowUp { s: f64, slope: f64 },

    #[error("nonpositive radius {value} at node {node}")]
    Positivity { node: usize, value: f64 },

    #[error("degenerate simplex {index} with measure {measure:e}")]
    Mesh { index: usize, measure: f64 },

    #[error("factorization failed: {0}")]
    Factorization(String),

    #[error("sign function vanishes at node {node}")]
    Sign { node: usize },

    #[error("surface is not stationary: H_φ varies by {spread:e} over interior nodes")]
    Stationarity { spread: f64 },

    #[error("no nonzero amplitude matches the weighted volume")]
    NoRoot,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(point: &[f64], reason: impl Into<String>) -> Self {
        Error::Domain { point: point.to_vec(), reason: reason.into() }
    }

    pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
        if expected == got {
            Ok(())
        } else {
            Err(Error::Dimension { expected, got })
        }
    }
}
