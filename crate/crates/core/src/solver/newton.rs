use serde::{Deserialize, Serialize};

use super::SolveReport;
use crate::error::{Error, Result};
use crate::linalg::BandMatrix;

/// Damped Newton parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NewtonParams {
    /// Stop once the sup-norm of the residual is at most this.
    pub tol: f64,
    pub max_iter: usize,
    /// Step reduction factor of the backtracking line search.
    pub backtrack: f64,
    /// Sufficient decrease constant of the Armijo test.
    pub armijo: f64,
    /// Relative perturbation used for the finite difference Jacobian.
    pub fd_step: f64,
}

impl Default for NewtonParams {
    fn default() -> Self {
        NewtonParams { tol: 1e-10, max_iter: 50, backtrack: 0.5, armijo: 1e-4, fd_step: 1e-7 }
    }
}

/// Interior unknowns of a tensor grid, ordered row by row.
#[derive(Clone, Copy, Debug)]
pub(crate) struct InteriorLayout {
    pub nx: usize,
    pub ny: usize,
}

impl InteriorLayout {
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn bandwidth(&self) -> usize {
        if self.ny == 1 {
            1
        } else {
            self.nx + 1
        }
    }

    fn color(&self, a: usize) -> usize {
        let (i, j) = (a % self.nx, a / self.nx);
        i % 3 + 3 * (j % 3)
    }

    /// Unknowns within one grid step of `a` (including `a`).
    fn stencil(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        let (i, j) = ((a % self.nx) as isize, (a / self.nx) as isize);
        let (nx, ny) = (self.nx as isize, self.ny as isize);
        (-1..=1).flat_map(move |dj| {
            (-1..=1).filter_map(move |di| {
                let (p, q) = (i + di, j + dj);
                (p >= 0 && q >= 0 && p < nx && q < ny).then_some((q * nx + p) as usize)
            })
        })
    }
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn recoverable(e: &Error) -> bool {
    matches!(e, Error::Domain { .. } | Error::Positivity { .. })
}

/// Damped Newton iteration for a residual whose row `a` depends only on the
/// unknowns in the 3×3 grid stencil of `a`. The Jacobian is built from
/// colored finite differences (nine colors in 2D, three in 1D).
pub(crate) fn damped_newton<F>(
    layout: InteriorLayout,
    x0: Vec<f64>,
    lambda: f64,
    params: &NewtonParams,
    residual: F,
) -> Result<(Vec<f64>, SolveReport)>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let m = layout.len();
    Error::check_len(m, x0.len())?;
    let mut x = x0;
    let mut r_vec = residual(&x)?;
    let mut r = sup(&r_vec);
    let mut report = SolveReport { converged: false, iterations: 0, residual_history: Vec::new(), final_residual: r, lambda };
    let colors = if layout.ny == 1 { 3 } else { 9 };
    let b = layout.bandwidth();
    while r > params.tol && report.iterations < params.max_iter {
        let mut jac = BandMatrix::zeros(m, b, b);
        for c in 0..colors {
            let cols: Vec<usize> = (0..m).filter(|&a| layout.color(a) == c).collect();
            if cols.is_empty() {
                continue;
            }
            let mut xp = x.clone();
            let steps: Vec<f64> = cols.iter().map(|&a| params.fd_step * x[a].abs().max(1.0)).collect();
            for (&a, &e) in cols.iter().zip(&steps) {
                xp[a] += e;
            }
            let rp = residual(&xp)?;
            for (&a, &e) in cols.iter().zip(&steps) {
                for row in layout.stencil(a) {
                    jac.add(row, a, (rp[row] - r_vec[row]) / e);
                }
            }
        }
        let mut dir = jac.lu()?.solve(&r_vec);
        dir.iter_mut().for_each(|d| *d = -*d);
        let mut alpha = 1.0;
        let mut last_err = None;
        let accepted = loop {
            let trial: Vec<f64> = x.iter().zip(&dir).map(|(xi, di)| xi + alpha * di).collect();
            match residual(&trial) {
                Ok(rt) => {
                    let rn = sup(&rt);
                    if rn <= (1.0 - params.armijo * alpha) * r {
                        break Some((trial, rt, rn));
                    }
                }
                Err(e) if recoverable(&e) => last_err = Some(e),
                Err(e) => return Err(e),
            }
            alpha *= params.backtrack;
            if alpha < 1e-10 {
                break None;
            }
        };
        let Some((xn, rn_vec, rn)) = accepted else {
            if let Some(e) = last_err {
                return Err(e);
            }
            break;
        };
        x = xn;
        r_vec = rn_vec;
        r = rn;
        report.iterations += 1;
        report.residual_history.push(r);
    }
    report.final_residual = r;
    report.converged = r <= params.tol;
    if report.converged {
        Ok((x, report))
    } else {
        Err(Error::NonConvergence(Box::new(report)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_a_nonlinear_chain() {
        // u_{i-1} - 2u_i + u_{i+1} = 0.1 exp(u_i) with zero ends
        let layout = InteriorLayout { nx: 30, ny: 1 };
        let res = |u: &[f64]| -> Result<Vec<f64>> {
            let n = u.len();
            Ok((0..n)
                .map(|i| {
                    let l = if i > 0 { u[i - 1] } else { 0.0 };
                    let r = if i + 1 < n { u[i + 1] } else { 0.0 };
                    l - 2.0 * u[i] + r - 0.01 * u[i].exp()
                })
                .collect())
        };
        let (u, report) = damped_newton(layout, vec![0.0; 30], 0.0, &NewtonParams::default(), res).unwrap();
        assert!(report.converged && report.final_residual <= 1e-10);
        assert_eq!(report.residual_history.len(), report.iterations);
        assert!(report.residual_history.windows(2).all(|w| w[1] <= w[0]));
        assert!(u.iter().all(|v| *v < 0.0));
    }

    #[test]
    fn stencil_coloring_is_proper() {
        let layout = InteriorLayout { nx: 7, ny: 5 };
        for a in 0..layout.len() {
            let mut seen = [false; 9];
            for s in layout.stencil(a) {
                assert!(!seen[layout.color(s)]);
                seen[layout.color(s)] = true;
            }
        }
    }
}
