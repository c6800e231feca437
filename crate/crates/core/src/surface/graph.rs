use serde::{Deserialize, Serialize};

use super::grid::Grid;
use crate::error::{Error, Result};
use crate::vec3::Vec3;

/// Smallest node count per axis accepted for a graph.
pub const MIN_NODES: usize = 5;

fn check_grid(grid: &Grid) -> Result<()> {
    let counts = grid.counts();
    for (k, &c) in counts.iter().enumerate().take(grid.dim()) {
        if c < MIN_NODES {
            return Err(Error::Grid(format!("axis {k} has {c} nodes, graphs need at least {MIN_NODES}")));
        }
    }
    Ok(())
}

/// Graph `x_{n+1} = f(q)` sampled on a planar grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerticalGraph {
    pub grid: Grid,
    pub heights: Vec<f64>,
}

impl VerticalGraph {
    pub fn new(grid: Grid, heights: Vec<f64>) -> Result<Self> {
        check_grid(&grid)?;
        Error::check_len(grid.len(), heights.len())?;
        if let Some(k) = heights.iter().position(|v| !v.is_finite()) {
            return Err(Error::Invalid(format!("height at node {k} is not finite")));
        }
        Ok(VerticalGraph { grid, heights })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let heights = (0..grid.len()).map(|k| f(&grid.coord(k)[..grid.dim()])).collect();
        Self::new(grid, heights)
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    /// Ambient position of node `k`.
    pub fn point(&self, k: usize) -> Vec3 {
        let c = self.grid.coord(k);
        let mut x = [0.0; 3];
        x[..self.dim()].copy_from_slice(&c[..self.dim()]);
        x[self.dim()] = self.heights[k];
        x
    }

    pub fn points(&self) -> Vec<Vec3> {
        (0..self.grid.len()).map(|k| self.point(k)).collect()
    }

    pub fn with_heights(&self, heights: Vec<f64>) -> Result<Self> {
        Self::new(self.grid.clone(), heights)
    }
}

/// Radial graph `x = ρ ν` over a chart of the unit sphere.
///
/// For `n = 2` the chart axes are the polar angle `θ ∈ (0, π)` and the azimuth
/// `ϕ`, with `ν = (sin θ cos ϕ, sin θ sin ϕ, cos θ)`. For `n = 1` the single
/// axis is the angle `θ` of `ν = (cos θ, sin θ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialGraph {
    pub grid: Grid,
    pub radii: Vec<f64>,
}

impl RadialGraph {
    pub fn new(grid: Grid, radii: Vec<f64>) -> Result<Self> {
        check_grid(&grid)?;
        Error::check_len(grid.len(), radii.len())?;
        if grid.dim() == 2 {
            let (lo, hi) = (grid.lo()[0], grid.hi()[0]);
            if lo <= 0.0 || hi >= std::f64::consts::PI {
                return Err(Error::Pole { lo, hi });
            }
        }
        for (k, &r) in radii.iter().enumerate() {
            if !(r > 0.0) || !r.is_finite() {
                return Err(Error::Positivity { node: k, value: r });
            }
        }
        Ok(RadialGraph { grid, radii })
    }

    pub fn from_fn(grid: Grid, rho: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let radii = (0..grid.len()).map(|k| rho(&grid.coord(k)[..grid.dim()])).collect();
        Self::new(grid, radii)
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn point(&self, k: usize) -> Vec3 {
        let nu = sphere_chart(self.dim(), self.grid.coord(k)).0;
        crate::vec3::scale(&nu, self.radii[k])
    }

    pub fn points(&self) -> Vec<Vec3> {
        (0..self.grid.len()).map(|k| self.point(k)).collect()
    }

    pub fn with_radii(&self, radii: Vec<f64>) -> Result<Self> {
        Self::new(self.grid.clone(), radii)
    }
}

/// Unit sphere parametrization with its exact chart derivatives:
/// `(ν, [ν_1, ν_2], [ν_11, ν_12, ν_22])`.
pub fn sphere_chart(dim: usize, c: [f64; 2]) -> (Vec3, [Vec3; 2], [Vec3; 3]) {
    let z = [0.0; 3];
    if dim == 1 {
        let (s, co) = c[0].sin_cos();
        return ([co, s, 0.0], [[-s, co, 0.0], z], [[-co, -s, 0.0], z, z]);
    }
    let (st, ct) = c[0].sin_cos();
    let (sp, cp) = c[1].sin_cos();
    let nu = [st * cp, st * sp, ct];
    let nu_t = [ct * cp, ct * sp, -st];
    let nu_p = [-st * sp, st * cp, 0.0];
    let nu_tt = [-st * cp, -st * sp, -ct];
    let nu_tp = [-ct * sp, ct * cp, 0.0];
    let nu_pp = [-st * cp, -st * sp, 0.0];
    (nu, [nu_t, nu_p], [nu_tt, nu_tp, nu_pp])
}
