use super::newton::{damped_newton, InteriorLayout, NewtonParams};
use super::SolveReport;
use crate::density::Density;
use crate::error::{Error, Result};
use crate::surface::{LocalGeometry, RadialGraph};

/// Solves `H_φ = λ` for a radial graph whose radius depends on the first chart
/// angle only. The unknowns are the interior radii of the first chart row;
/// the result replicates the profile along the second chart axis.
pub fn solve_radial_axisymmetric(
    density: &Density,
    lambda: f64,
    boundary: (f64, f64),
    graph0: &RadialGraph,
    params: &NewtonParams,
) -> Result<(RadialGraph, SolveReport)> {
    let grid = &graph0.grid;
    let dim = grid.dim();
    Error::check_len(dim + 1, density.ambient_dim())?;
    for v in [boundary.0, boundary.1] {
        if !(v > 0.0) {
            return Err(Error::Positivity { node: 0, value: v });
        }
    }
    let m = grid.counts()[0];
    let h = grid.spacing(0);
    let mut profile: Vec<f64> = graph0.radii[..m].to_vec();
    profile[0] = boundary.0;
    profile[m - 1] = boundary.1;
    let phi0 = if dim == 2 { grid.lo()[1] } else { 0.0 };
    let residual = |x: &[f64]| -> Result<Vec<f64>> {
        let mut rho = profile.clone();
        rho[1..m - 1].copy_from_slice(x);
        if let Some(node) = rho.iter().position(|&r| !(r > 0.0)) {
            return Err(Error::Positivity { node, value: rho[node] });
        }
        (1..m - 1)
            .map(|i| {
                let d1 = (rho[i + 1] - rho[i - 1]) / (2.0 * h);
                let d2 = (rho[i + 1] - 2.0 * rho[i] + rho[i - 1]) / (h * h);
                let theta = grid.coord(i)[0];
                let g = LocalGeometry::radial(dim, [theta, phi0], rho[i], [d1, 0.0], [d2, 0.0, 0.0]);
                Ok(density.weighted_mean_curvature(&g.position[..dim + 1], &g.normal, g.nh)? - lambda)
            })
            .collect()
    };
    let layout = InteriorLayout { nx: m - 2, ny: 1 };
    let (x, report) = damped_newton(layout, profile[1..m - 1].to_vec(), lambda, params, residual)?;
    profile[1..m - 1].copy_from_slice(&x);
    let radii = (0..grid.len()).map(|k| profile[grid.ij(k).0]).collect();
    Ok((graph0.with_radii(radii)?, report))
}
