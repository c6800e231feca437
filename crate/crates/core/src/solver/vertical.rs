use super::newton::{damped_newton, InteriorLayout, NewtonParams};
use super::SolveReport;
use crate::density::Density;
use crate::error::{Error, Result};
use crate::linalg::SymBandMatrix;
use crate::surface::{Grid, LocalGeometry, VerticalGraph};

/// Tolerance of the flux-form stage that precedes the pointwise solve.
const PRESTAGE_TOL: f64 = 1e-8;

/// Centered chart jet at an interior node, with the same floating point
/// operations as [`Grid::jet`].
pub(crate) fn centered_jet(grid: &Grid, u: &[f64], k: usize) -> ([f64; 2], [f64; 3]) {
    let hx = grid.spacing(0);
    let d0 = |m: usize| (u[m + 1] - u[m - 1]) / (2.0 * hx);
    let d00 = (u[k + 1] - 2.0 * u[k] + u[k - 1]) / (hx * hx);
    if grid.dim() == 1 {
        return ([d0(k), 0.0], [d00, 0.0, 0.0]);
    }
    let nx = grid.counts()[0];
    let hy = grid.spacing(1);
    let d1 = (u[k + nx] - u[k - nx]) / (2.0 * hy);
    let d11 = (u[k + nx] - 2.0 * u[k] + u[k - nx]) / (hy * hy);
    let d01 = (d0(k + nx) - d0(k - nx)) / (2.0 * hy);
    ([d0(k), d1], [d00, d01, d11])
}

/// `H_φ - λ` of a vertical graph at interior node `k`.
pub(crate) fn vertical_residual_at(grid: &Grid, f: &[f64], k: usize, density: &Density, lambda: f64) -> Result<f64> {
    let (d1, d2) = centered_jet(grid, f, k);
    let g = LocalGeometry::vertical(grid.dim(), grid.coord(k), f[k], d1, d2);
    Ok(density.weighted_mean_curvature(&g.position[..grid.dim() + 1], &g.normal, g.nh)? - lambda)
}

/// `div(Df/W) - ⟨∇φ, N⟩ - λ` at interior node `k` with face-centered
/// fluxes. Its discrete solutions agree with those of
/// [`vertical_residual_at`] to `O(h²)`, but it has no spurious branches with
/// a jump next to the boundary, so it is used to pick the Newton basin.
pub(crate) fn flux_residual_at(grid: &Grid, f: &[f64], k: usize, density: &Density, lambda: f64) -> Result<f64> {
    let dim = grid.dim();
    let nx = grid.counts()[0];
    let mut div = 0.0;
    for axis in 0..dim {
        let h = grid.spacing(axis);
        let (along, across) = if axis == 0 { (1, nx) } else { (nx, 1) };
        let hc = if dim == 2 { grid.spacing(1 - axis) } else { 1.0 };
        let flux = |a: usize, b: usize| {
            let da = (f[b] - f[a]) / h;
            let dc = if dim == 2 { (f[a + across] - f[a - across] + f[b + across] - f[b - across]) / (4.0 * hc) } else { 0.0 };
            da / (1.0 + da * da + dc * dc).sqrt()
        };
        div += (flux(k, k + along) - flux(k - along, k)) / h;
    }
    let (d1, d2) = centered_jet(grid, f, k);
    let g = LocalGeometry::vertical(dim, grid.coord(k), f[k], d1, d2);
    Ok(density.weighted_mean_curvature(&g.position[..dim + 1], &g.normal, div)? - lambda)
}

pub(crate) fn layout(grid: &Grid) -> InteriorLayout {
    let [nx, ny] = grid.counts();
    if grid.dim() == 1 {
        InteriorLayout { nx: nx - 2, ny: 1 }
    } else {
        InteriorLayout { nx: nx - 2, ny: ny - 2 }
    }
}

/// Solves `H_φ = λ` for a vertical graph with Dirichlet data `boundary` by
/// damped Newton, starting from `graph0`.
pub fn solve_vertical(
    density: &Density,
    lambda: f64,
    boundary: &dyn Fn(&[f64]) -> f64,
    graph0: &VerticalGraph,
    params: &NewtonParams,
) -> Result<(VerticalGraph, SolveReport)> {
    let grid = &graph0.grid;
    Error::check_len(grid.dim() + 1, density.ambient_dim())?;
    let mut full = graph0.heights.clone();
    for (k, v) in full.iter_mut().enumerate() {
        if grid.is_boundary(k) {
            *v = boundary(&grid.coord(k)[..grid.dim()]);
        }
    }
    let interior = grid.interior();
    let x0: Vec<f64> = interior.iter().map(|&k| full[k]).collect();
    let residual_with = |at: fn(&Grid, &[f64], usize, &Density, f64) -> Result<f64>| {
        let full = &full;
        let interior = &interior;
        move |x: &[f64]| -> Result<Vec<f64>> {
            let mut f = full.clone();
            for (&k, &v) in interior.iter().zip(x) {
                f[k] = v;
            }
            interior.iter().map(|&k| at(grid, &f, k, density, lambda)).collect()
        }
    };
    let coarse = NewtonParams { tol: params.tol.max(PRESTAGE_TOL), ..*params };
    let x0 = match damped_newton(layout(grid), x0.clone(), lambda, &coarse, residual_with(flux_residual_at)) {
        Ok((x, _)) => x,
        Err(e) if matches!(e, Error::NonConvergence(_) | Error::Domain { .. } | Error::Factorization(_)) => x0,
        Err(e) => return Err(e),
    };
    let (x, report) = damped_newton(layout(grid), x0, lambda, params, residual_with(vertical_residual_at))?;
    for (&k, v) in interior.iter().zip(x) {
        full[k] = v;
    }
    Ok((graph0.with_heights(full)?, report))
}

/// Discrete harmonic function on the grid with the given boundary values;
/// a neutral initial guess for [`solve_vertical`].
pub fn harmonic_extension(grid: &Grid, boundary: &dyn Fn(&[f64]) -> f64) -> Result<VerticalGraph> {
    let dim = grid.dim();
    let mut full: Vec<f64> = (0..grid.len())
        .map(|k| if grid.is_boundary(k) { boundary(&grid.coord(k)[..dim]) } else { 0.0 })
        .collect();
    let interior = grid.interior();
    let lay = layout(grid);
    let mut index = vec![usize::MAX; grid.len()];
    for (a, &k) in interior.iter().enumerate() {
        index[k] = a;
    }
    let nx = grid.counts()[0];
    let mut mat = SymBandMatrix::zeros(interior.len(), if dim == 1 { 1 } else { lay.nx });
    let mut rhs = vec![0.0; interior.len()];
    for (a, &k) in interior.iter().enumerate() {
        for axis in 0..dim {
            let w = 1.0 / grid.spacing(axis).powi(2);
            let stride = if axis == 0 { 1 } else { nx };
            mat.add(a, a, 2.0 * w);
            for nb in [k - stride, k + stride] {
                if index[nb] == usize::MAX {
                    rhs[a] += w * full[nb];
                } else if index[nb] < a {
                    mat.add(a, index[nb], -w);
                }
            }
        }
    }
    let sol = mat.cholesky()?.solve(&rhs);
    for (&k, v) in interior.iter().zip(sol) {
        full[k] = v;
    }
    VerticalGraph::new(grid.clone(), full)
}
