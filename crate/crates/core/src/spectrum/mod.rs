//! Weak-form discretization of the weighted Jacobi operator
//! `L_φ = Δ_φ + |A|² - ∇²φ(N, N)` and strong stability verdicts.

mod assembly;
mod decomposition;
mod eigen;

pub use assembly::{assemble, barycentric_gradients, jacobi_potential, quadratic_form, OperatorAssembly};
pub use decomposition::{decomposition_check, DecompositionGap, DecompositionMode};
pub use eigen::{
    check_strong_stability, classify, default_tolerance, dense_spectrum, gershgorin_lower, min_eigenvalue, EigenParams,
    SpectrumReport, Verdict,
};

/// Eigenvector as CSV rows `node,value` keyed by mesh vertex.
pub fn eigenvector_csv(report: &SpectrumReport, assembly: &OperatorAssembly) -> String {
    let mut out = String::from("node,value\n");
    for (u, k) in report.eigenvector.iter().zip(&assembly.interior) {
        out.push_str(&format!("{k},{}\n", crate::surface::io::fmt17(*u)));
    }
    out
}
