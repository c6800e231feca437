use serde::{Deserialize, Serialize};

use crate::density::Density;
use crate::error::{Error, Result};
use crate::surface::{Grid, VerticalGraph};

/// Profile `s ↦ f(s)` of a rotationally symmetric vertical graph, sampled at
/// `s_k = k·radius/steps`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RotationalProfile {
    pub dim: usize,
    pub lambda: f64,
    pub s: Vec<f64>,
    pub f: Vec<f64>,
    pub df: Vec<f64>,
}

/// Largest slope tolerated before the profile stops being a graph.
const MAX_SLOPE: f64 = 1e8;

fn point(dim: usize, s: f64, f: f64) -> [f64; 3] {
    let mut x = [0.0; 3];
    x[0] = s;
    x[dim] = f;
    x
}

/// `f''` from the rotational form of `H_φ = λ`.
fn second_derivative(density: &Density, dim: usize, lambda: f64, s: f64, f: f64, p: f64) -> Result<f64> {
    let x = point(dim, s, f);
    let w = (1.0 + p * p).sqrt();
    let mut normal = [0.0; 3];
    normal[0] = -p / w;
    normal[dim] = 1.0 / w;
    let g = crate::vec3::dot(&density.grad_phi(&x[..dim + 1])?, &normal) + lambda;
    if s == 0.0 {
        return Ok(g / dim as f64);
    }
    Ok(w * w * w * (g - (dim as f64 - 1.0) * p / (s * w)))
}

/// Integrates the profile ODE of a rotationally symmetric `φ`-stationary
/// vertical graph from a regular apex with classical RK4.
pub fn solve_rotational_vertical(
    density: &Density,
    lambda: f64,
    apex_height: f64,
    radius: f64,
    steps: usize,
) -> Result<RotationalProfile> {
    let dim = density.ambient_dim() - 1;
    if !(radius > 0.0) || steps == 0 {
        return Err(Error::Invalid("rotational solve needs radius > 0 and steps > 0".into()));
    }
    let h = radius / steps as f64;
    let rhs = |s: f64, y: [f64; 2]| -> Result<[f64; 2]> { Ok([y[1], second_derivative(density, dim, lambda, s, y[0], y[1])?]) };
    let mut y = [apex_height, 0.0];
    let mut out = RotationalProfile { dim, lambda, s: vec![0.0], f: vec![y[0]], df: vec![0.0] };
    for k in 0..steps {
        let s = k as f64 * h;
        let k1 = rhs(s, y)?;
        let k2 = rhs(s + h / 2.0, [y[0] + h / 2.0 * k1[0], y[1] + h / 2.0 * k1[1]])?;
        let k3 = rhs(s + h / 2.0, [y[0] + h / 2.0 * k2[0], y[1] + h / 2.0 * k2[1]])?;
        let k4 = rhs(s + h, [y[0] + h * k3[0], y[1] + h * k3[1]])?;
        for i in 0..2 {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let s_next = (k + 1) as f64 * h;
        if !(y[1].abs() <= MAX_SLOPE) {
            return Err(Error::BlowUp { s: s_next, slope: y[1].abs() });
        }
        out.s.push(s_next);
        out.f.push(y[0]);
        out.df.push(y[1]);
    }
    Ok(out)
}

impl RotationalProfile {
    pub fn radius(&self) -> f64 {
        *self.s.last().unwrap()
    }

    /// Cubic Hermite interpolation of the profile at `s ∈ [0, radius]`.
    pub fn eval(&self, s: f64) -> Result<f64> {
        let s = s.abs();
        let radius = self.radius();
        if s > radius * (1.0 + 1e-12) {
            return Err(Error::Invalid(format!("s = {s} lies beyond the profile radius {radius}")));
        }
        let steps = self.s.len() - 1;
        let h = radius / steps as f64;
        let k = ((s / h) as usize).min(steps - 1);
        let t = (s - self.s[k]) / h;
        let (t2, t3) = (t * t, t * t * t);
        Ok((2.0 * t3 - 3.0 * t2 + 1.0) * self.f[k]
            + (t3 - 2.0 * t2 + t) * h * self.df[k]
            + (-2.0 * t3 + 3.0 * t2) * self.f[k + 1]
            + (t3 - t2) * h * self.df[k + 1])
    }

    /// Samples `f(|q|)` on a chart grid lying inside the profile disk.
    pub fn to_vertical_graph(&self, grid: Grid) -> Result<VerticalGraph> {
        if grid.dim() != self.dim {
            return Err(Error::Dimension { expected: self.dim, got: grid.dim() });
        }
        let heights = (0..grid.len())
            .map(|k| {
                let c = grid.coord(k);
                self.eval(c[0].hypot(c[1]))
            })
            .collect::<Result<Vec<f64>>>()?;
        VerticalGraph::new(grid, heights)
    }

    /// Sup over interior samples of `|H_φ - λ|`, with the profile derivatives
    /// taken by centered differences of the samples.
    pub fn residual_sup(&self, density: &Density) -> Result<f64> {
        let n = self.dim as f64;
        let h = self.s[1] - self.s[0];
        let mut worst: f64 = 0.0;
        for k in 1..self.s.len() - 1 {
            let (s, f) = (self.s[k], self.f[k]);
            let p = (self.f[k + 1] - self.f[k - 1]) / (2.0 * h);
            let q = (self.f[k + 1] - 2.0 * f + self.f[k - 1]) / (h * h);
            let w = (1.0 + p * p).sqrt();
            let nh = q / (w * w * w) + (n - 1.0) * p / (s * w);
            let mut normal = [0.0; 3];
            normal[0] = -p / w;
            normal[self.dim] = 1.0 / w;
            let x = point(self.dim, s, f);
            let hphi = density.weighted_mean_curvature(&x[..self.dim + 1], &normal, nh)?;
            worst = worst.max((hphi - self.lambda).abs());
        }
        Ok(worst)
    }
}
