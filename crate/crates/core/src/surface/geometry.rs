use serde::{Deserialize, Serialize};

use super::graph::{sphere_chart, RadialGraph, VerticalGraph};
use super::grid::Grid;
use crate::density::Density;
use crate::error::{Error, Result};
use crate::vec3::{self, Vec3};

/// How a surface is parametrized over its chart.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphKind {
    Vertical,
    Radial,
}

/// Pointwise differential geometry of an embedding from its chart jet.
#[derive(Clone, Copy, Debug)]
pub struct LocalGeometry {
    pub position: Vec3,
    pub normal: Vec3,
    pub tangents: [Vec3; 2],
    /// `[x_11, x_12, x_22]`.
    pub second: [Vec3; 3],
    pub metric_inv: [[f64; 2]; 2],
    pub area_element: f64,
    pub nh: f64,
    pub a2: f64,
}

impl LocalGeometry {
    /// `dim` is the intrinsic dimension. With `outward` set the normal is
    /// flipped, if needed, so that `⟨N, x⟩ ≥ 0`.
    pub fn from_jet(dim: usize, position: Vec3, tangents: [Vec3; 2], second: [Vec3; 3], outward: bool) -> Self {
        let [t0, t1] = tangents;
        let (raw, metric_inv, area_element) = if dim == 1 {
            let g = vec3::dot(&t0, &t0);
            ([-t0[1], t0[0], 0.0], [[1.0 / g, 0.0], [0.0, 0.0]], g.sqrt())
        } else {
            let g11 = vec3::dot(&t0, &t0);
            let g12 = vec3::dot(&t0, &t1);
            let g22 = vec3::dot(&t1, &t1);
            let det = g11 * g22 - g12 * g12;
            (vec3::cross(&t0, &t1), [[g22 / det, -g12 / det], [-g12 / det, g11 / det]], det.sqrt())
        };
        let mut normal = vec3::normalize(&raw);
        if outward && vec3::dot(&normal, &position) < 0.0 {
            normal = vec3::scale(&normal, -1.0);
        }
        let b11 = vec3::dot(&second[0], &normal);
        let b12 = vec3::dot(&second[1], &normal);
        let b22 = vec3::dot(&second[2], &normal);
        let gi = metric_inv;
        let (nh, a2) = if dim == 1 {
            let k = gi[0][0] * b11;
            (k, k * k)
        } else {
            // shape operator S = g^{-1} b
            let s11 = gi[0][0] * b11 + gi[0][1] * b12;
            let s12 = gi[0][0] * b12 + gi[0][1] * b22;
            let s21 = gi[1][0] * b11 + gi[1][1] * b12;
            let s22 = gi[1][0] * b12 + gi[1][1] * b22;
            (s11 + s22, s11 * s11 + 2.0 * s12 * s21 + s22 * s22)
        };
        LocalGeometry { position, normal, tangents, second, metric_inv, area_element, nh, a2 }
    }

    /// Geometry of the graph `x_{n+1} = f` at chart point `q`.
    pub fn vertical(dim: usize, q: [f64; 2], f: f64, df: [f64; 2], d2f: [f64; 3]) -> Self {
        let k = dim;
        let mut x = [0.0; 3];
        x[..dim].copy_from_slice(&q[..dim]);
        x[k] = f;
        let mut t = [[0.0; 3]; 2];
        let mut s = [[0.0; 3]; 3];
        t[0][0] = 1.0;
        t[0][k] = df[0];
        if dim == 2 {
            t[1][1] = 1.0;
            t[1][k] = df[1];
        }
        for (sk, d) in s.iter_mut().zip(d2f) {
            sk[k] = d;
        }
        Self::from_jet(dim, x, t, s, false)
    }

    /// Geometry of the radial graph `x = ρ ν` at chart point `c`.
    pub fn radial(dim: usize, c: [f64; 2], rho: f64, drho: [f64; 2], d2rho: [f64; 3]) -> Self {
        let (nu, dnu, d2nu) = sphere_chart(dim, c);
        let x = vec3::scale(&nu, rho);
        let mut t = [[0.0; 3]; 2];
        for a in 0..dim {
            t[a] = vec3::add(&vec3::scale(&nu, drho[a]), &vec3::scale(&dnu[a], rho));
        }
        // x_ab = ρ_ab ν + ρ_a ν_b + ρ_b ν_a + ρ ν_ab
        let pairs = [(0, 0), (0, 1), (1, 1)];
        let mut s = [[0.0; 3]; 3];
        for (slot, &(a, b)) in pairs.iter().enumerate().take(if dim == 1 { 1 } else { 3 }) {
            let mut v = vec3::scale(&nu, d2rho[slot]);
            v = vec3::axpy(&v, drho[a], &dnu[b]);
            v = vec3::axpy(&v, drho[b], &dnu[a]);
            v = vec3::axpy(&v, rho, &d2nu[slot]);
            s[slot] = v;
        }
        Self::from_jet(dim, x, t, s, true)
    }
}

/// Per-node geometry of a sampled graph.
#[derive(Clone, Debug)]
pub struct GeometryField {
    pub kind: GraphKind,
    pub grid: Grid,
    pub position: Vec<Vec3>,
    pub normal: Vec<Vec3>,
    /// Trace of the shape operator, `Δx = nH·N`.
    pub nh: Vec<f64>,
    /// `|A|²`.
    pub a2: Vec<f64>,
    /// Support function `⟨N, x⟩`.
    pub h: Vec<f64>,
    /// `N_{n+1}`.
    pub g_vert: Vec<f64>,
    /// Area density `√det g` with respect to the chart coordinates.
    pub area_element: Vec<f64>,
    pub phi: Vec<f64>,
    pub weight: Vec<f64>,
    /// Weighted mean curvature `nH - ⟨∇φ, N⟩`.
    pub hphi: Vec<f64>,
    pub tangents: Vec<[Vec3; 2]>,
    pub second: Vec<[Vec3; 3]>,
    pub metric_inv: Vec<[[f64; 2]; 2]>,
}

impl GeometryField {
    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn len(&self) -> usize {
        self.position.len()
    }

    pub fn is_empty(&self) -> bool {
        self.position.is_empty()
    }

    fn assemble(kind: GraphKind, grid: &Grid, density: &Density, local: Vec<LocalGeometry>) -> Result<Self> {
        let dim = grid.dim();
        Error::check_len(dim + 1, density.ambient_dim())?;
        let m = local.len();
        let mut f = GeometryField {
            kind,
            grid: grid.clone(),
            position: Vec::with_capacity(m),
            normal: Vec::with_capacity(m),
            nh: Vec::with_capacity(m),
            a2: Vec::with_capacity(m),
            h: Vec::with_capacity(m),
            g_vert: Vec::with_capacity(m),
            area_element: Vec::with_capacity(m),
            phi: Vec::with_capacity(m),
            weight: Vec::with_capacity(m),
            hphi: Vec::with_capacity(m),
            tangents: Vec::with_capacity(m),
            second: Vec::with_capacity(m),
            metric_inv: Vec::with_capacity(m),
        };
        for g in local {
            let x = &g.position[..dim + 1];
            let phi = density.eval_phi(x)?;
            f.hphi.push(density.weighted_mean_curvature(x, &g.normal, g.nh)?);
            f.phi.push(phi);
            f.weight.push(phi.exp());
            f.h.push(vec3::dot(&g.normal, &g.position));
            f.g_vert.push(g.normal[dim]);
            f.position.push(g.position);
            f.normal.push(g.normal);
            f.nh.push(g.nh);
            f.a2.push(g.a2);
            f.area_element.push(g.area_element);
            f.tangents.push(g.tangents);
            f.second.push(g.second);
            f.metric_inv.push(g.metric_inv);
        }
        Ok(f)
    }

    /// Weighted area by chart quadrature (trapezoidal weights).
    pub fn chart_weighted_area(&self) -> f64 {
        let w = trapezoid_weights(&self.grid);
        (0..self.len()).map(|k| w[k] * self.area_element[k] * self.weight[k]).sum()
    }
}

/// Tensor trapezoidal quadrature weights of the grid.
pub fn trapezoid_weights(grid: &Grid) -> Vec<f64> {
    let counts = grid.counts();
    (0..grid.len())
        .map(|k| {
            let (i, j) = grid.ij(k);
            let mut w = grid.cell_measure();
            if i == 0 || i == counts[0] - 1 {
                w *= 0.5;
            }
            if grid.dim() == 2 && (j == 0 || j == counts[1] - 1) {
                w *= 0.5;
            }
            w
        })
        .collect()
}

pub fn geometry_vertical(graph: &VerticalGraph, density: &Density) -> Result<GeometryField> {
    let grid = &graph.grid;
    let dim = grid.dim();
    let (d1, d2) = grid.jet(&graph.heights);
    let local = (0..grid.len())
        .map(|k| {
            LocalGeometry::vertical(
                dim,
                grid.coord(k),
                graph.heights[k],
                [d1[0][k], d1[1][k]],
                [d2[0][k], d2[1][k], d2[2][k]],
            )
        })
        .collect();
    GeometryField::assemble(GraphKind::Vertical, grid, density, local)
}

pub fn geometry_radial(graph: &RadialGraph, density: &Density) -> Result<GeometryField> {
    let grid = &graph.grid;
    let dim = grid.dim();
    let (d1, d2) = grid.jet(&graph.radii);
    let local = (0..grid.len())
        .map(|k| {
            LocalGeometry::radial(
                dim,
                grid.coord(k),
                graph.radii[k],
                [d1[0][k], d1[1][k]],
                [d2[0][k], d2[1][k], d2[2][k]],
            )
        })
        .collect();
    GeometryField::assemble(GraphKind::Radial, grid, density, local)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn plane_is_flat() {
        let g = Grid::rectangle([0.0, 1.0], [0.0, 1.0], [6, 6]).unwrap();
        let graph = VerticalGraph::from_fn(g, |_| 0.0).unwrap();
        let f = geometry_vertical(&graph, &Density::constant(3)).unwrap();
        for k in 0..f.len() {
            assert_eq!(f.normal[k], [0.0, 0.0, 1.0]);
            assert_eq!(f.nh[k], 0.0);
            assert_eq!(f.a2[k], 0.0);
            assert_eq!(f.area_element[k], 1.0);
        }
    }

    #[test]
    fn round_sphere_chart_is_exact() {
        let r = 1.7;
        let g = Grid::rectangle([0.4, 2.0], [0.0, 1.5], [7, 9]).unwrap();
        let graph = RadialGraph::from_fn(g, |_| r).unwrap();
        let f = geometry_radial(&graph, &Density::constant(3)).unwrap();
        for k in 0..f.len() {
            assert_abs_diff_eq!(f.h[k], r, epsilon = 1e-12);
            assert_abs_diff_eq!(f.nh[k], -2.0 / r, epsilon = 1e-12);
            assert_abs_diff_eq!(f.a2[k], 2.0 / (r * r), epsilon = 1e-12);
        }
    }

    #[test]
    fn shrinker_sphere_has_vanishing_weighted_curvature() {
        for dim in 1..=2 {
            let r = (2.0 * dim as f64).sqrt();
            let g = if dim == 1 {
                Grid::interval(0.3, 2.5, 9).unwrap()
            } else {
                Grid::rectangle([0.4, 2.0], [0.0, 1.5], [7, 9]).unwrap()
            };
            let graph = RadialGraph::from_fn(g, |_| r).unwrap();
            let f = geometry_radial(&graph, &Density::shrinker(dim + 1)).unwrap();
            assert!(f.hphi.iter().all(|v| v.abs() < 1e-12));
        }
    }

    #[test]
    fn shape_operator_trace_bound() {
        let g = Grid::rectangle([-0.5, 0.5], [-0.4, 0.6], [9, 9]).unwrap();
        let graph = VerticalGraph::from_fn(g, |q| q[0] * q[0] - 0.3 * q[0] * q[1] + (2.0 * q[1]).sin()).unwrap();
        let f = geometry_vertical(&graph, &Density::constant(3)).unwrap();
        for k in 0..f.len() {
            assert!(f.a2[k] >= f.nh[k] * f.nh[k] / 2.0 - 1e-12);
            let w = 1.0 / f.g_vert[k];
            assert!(f.g_vert[k] > 0.0 && (f.area_element[k] - w).abs() < 1e-12);
        }
    }
}
