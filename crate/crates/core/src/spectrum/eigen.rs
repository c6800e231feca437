use serde::{Deserialize, Serialize};

use super::assembly::OperatorAssembly;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EigenParams {
    /// Target for `‖(K - P)u - μMu‖ / ‖Mu‖`.
    pub residual_tol: f64,
    pub max_iter: usize,
    /// Bisection steps used to move the shift up to the lowest eigenvalue.
    pub shift_bisections: usize,
}

impl Default for EigenParams {
    fn default() -> Self {
        EigenParams { residual_tol: 1e-9, max_iter: 500, shift_bisections: 60 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Verdict {
    Stable,
    Unstable,
    /// `|μ_min|` within the band, or the eigen-iteration did not converge.
    Inconclusive { band: f64 },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub mu_min: f64,
    #[serde(skip)]
    pub eigenvector: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
    pub verdict: Verdict,
}

/// Default stability band: `1e-6` times the largest coordinate Rayleigh quotient.
pub fn default_tolerance(assembly: &OperatorAssembly) -> f64 {
    1e-6 * assembly.max_coordinate_rayleigh().abs().max(1.0)
}

pub fn classify(mu: f64, tol: f64) -> Verdict {
    if mu > tol {
        Verdict::Stable
    } else if mu < -tol {
        Verdict::Unstable
    } else {
        Verdict::Inconclusive { band: tol }
    }
}

/// Lower bound for the spectrum of `M^{-1/2}(K - P)M^{-1/2}` from Gershgorin
/// discs, using the lumped (diagonal) mass.
pub fn gershgorin_lower(assembly: &OperatorAssembly) -> f64 {
    let n = assembly.dim();
    let s: Vec<f64> = assembly.mass.iter().map(|m| 1.0 / m.sqrt()).collect();
    let mut diag = assembly.dense_diagonal();
    let mut off = vec![0.0; n];
    for (i, j, &v) in assembly.k.triplet_iter() {
        if i != j {
            off[i] += (v * s[i] * s[j]).abs();
        }
    }
    for i in 0..n {
        diag[i] *= s[i] * s[i];
    }
    (0..n).map(|i| diag[i] - off[i]).fold(f64::INFINITY, f64::min)
}

fn m_norm(assembly: &OperatorAssembly, u: &[f64]) -> f64 {
    u.iter().zip(&assembly.mass).map(|(a, m)| m * a * a).sum::<f64>().sqrt()
}

/// Smallest generalized eigenvalue of `(K - P)x = μMx` by shifted inverse
/// iteration.
///
/// The shift starts at the Gershgorin bound minus one and is then raised by
/// bisection, using success of the Cholesky factorization of `K - P - σM` as
/// the test `σ < μ_min`.
pub fn min_eigenvalue(assembly: &OperatorAssembly, params: &EigenParams) -> Result<SpectrumReport> {
    let n = assembly.dim();
    if n == 0 {
        return Err(Error::Invalid("no interior unknowns".into()));
    }
    let gersh = gershgorin_lower(assembly);
    let mut lo = gersh - 1.0;
    if assembly.shifted_band(lo).cholesky().is_err() {
        lo = gersh - 2.0 * (1.0 + gersh.abs());
        assembly.shifted_band(lo).cholesky()?;
    }
    let diag = assembly.dense_diagonal();
    let mut hi = diag.iter().zip(&assembly.mass).map(|(d, m)| d / m).fold(f64::INFINITY, f64::min);
    for _ in 0..params.shift_bisections {
        if hi - lo <= 1e-9 * (1.0 + hi.abs()) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if assembly.shifted_band(mid).cholesky().is_ok() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let sigma = lo;
    let factor = assembly.shifted_band(sigma).cholesky()?;
    let mut u = vec![1.0; n];
    let nrm = m_norm(assembly, &u);
    u.iter_mut().for_each(|v| *v /= nrm);
    let mut mu = f64::NAN;
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    while iterations < params.max_iter {
        iterations += 1;
        let mut y = factor.solve(&assembly.apply_mass(&u));
        let nrm = m_norm(assembly, &y);
        y.iter_mut().for_each(|v| *v /= nrm);
        u = y;
        let au = assembly.apply(&u);
        let mu_k = u.iter().zip(&au).map(|(a, b)| a * b).sum::<f64>();
        let mu_vec = assembly.apply_mass(&u);
        let r: f64 = au.iter().zip(&mu_vec).map(|(a, b)| (a - mu_k * b).powi(2)).sum::<f64>().sqrt();
        let mnorm: f64 = mu_vec.iter().map(|v| v * v).sum::<f64>().sqrt();
        mu = mu_k;
        residual = r / mnorm;
        if residual <= params.residual_tol {
            break;
        }
    }
    // orient the witness so that its largest entry is positive
    let imax = (0..n).max_by(|&a, &b| u[a].abs().total_cmp(&u[b].abs())).unwrap();
    if u[imax] < 0.0 {
        u.iter_mut().for_each(|v| *v = -*v);
    }
    let verdict = if residual <= params.residual_tol {
        classify(mu, default_tolerance(assembly))
    } else {
        Verdict::Inconclusive { band: default_tolerance(assembly) }
    };
    Ok(SpectrumReport { mu_min: mu, eigenvector: u, iterations, residual, verdict })
}

/// Strong stability verdict with the given band `tol`.
pub fn check_strong_stability(assembly: &OperatorAssembly, tol: f64, params: &EigenParams) -> Result<SpectrumReport> {
    if !(tol > 0.0) {
        return Err(Error::Invalid(format!("stability tolerance must be positive, got {tol}")));
    }
    let mut report = min_eigenvalue(assembly, params)?;
    if report.residual <= params.residual_tol {
        report.verdict = classify(report.mu_min, tol);
    } else {
        report.verdict = Verdict::Inconclusive { band: tol };
    }
    Ok(report)
}

/// All generalized eigenvalues by a dense symmetric solve, ascending.
pub fn dense_spectrum(assembly: &OperatorAssembly) -> Vec<f64> {
    let a = assembly.dense();
    let s: Vec<f64> = assembly.mass.iter().map(|m| 1.0 / m.sqrt()).collect();
    let b = nalgebra::DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * s[i] * s[j]);
    let mut ev: Vec<f64> = b.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}
