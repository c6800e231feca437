//! Solvers for the weighted mean curvature equation `H_φ = λ`.

mod newton;
mod radial;
mod rotational;
mod vertical;

use serde::{Deserialize, Serialize};

pub use newton::NewtonParams;
pub use radial::solve_radial_axisymmetric;
pub use rotational::{solve_rotational_vertical, RotationalProfile};
pub use vertical::{harmonic_extension, solve_vertical};

/// Outcome of a Newton solve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub converged: bool,
    pub iterations: usize,
    /// Sup-norm of `H_φ - λ` after each accepted step.
    pub residual_history: Vec<f64>,
    pub final_residual: f64,
    pub lambda: f64,
}
