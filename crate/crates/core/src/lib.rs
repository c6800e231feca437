//! Graphs in Euclidean space with a density `e^φ`.
//!
//! The crate solves the weighted mean curvature equation `H_φ = λ` for vertical
//! and radial graphs, discretizes the weighted Jacobi operator to certify strong
//! stability, checks the pointwise identities satisfied by stationary graphs
//! numerically, and runs calibration-style minimizer trials.
//!
//! Conventions used throughout:
//!
//! * ambient points live in `R^{n+1}` with `n ∈ {1, 2}`; they are stored as
//!   `[f64; 3]` with unused trailing components set to zero,
//! * the last ambient coordinate `x_{n+1}` is the vertical direction,
//! * mean curvature follows `Δx = nH·N`, so an upward oriented upper hemisphere
//!   of radius `R` has `nH = -n/R`.

pub mod calibration;
pub mod density;
pub mod error;
pub mod fixtures;
pub mod identities;
pub mod linalg;
pub mod rng;
pub mod solver;
pub mod spectrum;
pub mod surface;
pub mod vec3;

pub use error::{Error, Result};
