//! Oracles shared by the integration tests. Nothing here calls the code
//! under test for the quantity being checked.

#![allow(dead_code)]

use densgraph::density::Density;
use densgraph::rng::{self, SplitMix64};
use densgraph::spectrum::OperatorAssembly;
use densgraph::surface::{GeometryField, Grid, TriMesh};
use nalgebra::{DMatrix, SymmetricEigen};

pub fn grim_reaper(x: f64) -> f64 {
    -x.cos().ln()
}

pub fn catenary(x: f64) -> f64 {
    x.cosh()
}

/// Arc of the unit circle through `(±1/2, 0)` lying below the chord.
pub fn cmc_arc(x: f64) -> f64 {
    0.75f64.sqrt() - (1.0 - x * x).sqrt()
}

pub fn sup_error(grid: &Grid, values: &[f64], exact: impl Fn(f64) -> f64) -> f64 {
    (0..grid.len()).map(|k| (values[k] - exact(grid.coord(k)[0])).abs()).fold(0.0, f64::max)
}

/// Lowest eigenvalue of `(K - P)u = μ M u` by a dense symmetric solve of
/// `M^{-1/2}(K - P)M^{-1/2}` with the matrix built entry by entry.
pub fn dense_lowest(a: &OperatorAssembly) -> f64 {
    let n = a.dim();
    let mut mat = DMatrix::<f64>::zeros(n, n);
    for (i, j, v) in a.k.triplet_iter() {
        mat[(i, j)] += v;
    }
    for (i, j, v) in a.p.triplet_iter() {
        mat[(i, j)] -= v;
    }
    let mut mass = vec![0.0; n];
    for (i, j, v) in a.m.triplet_iter() {
        assert_eq!(i, j, "lumped mass is diagonal");
        mass[i] += v;
    }
    let scaled = DMatrix::from_fn(n, n, |i, j| mat[(i, j)] / (mass[i] * mass[j]).sqrt());
    SymmetricEigen::new(scaled).eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Max of `|A - Aᵀ|` over stored entries of a CSR matrix.
pub fn asymmetry(m: &nalgebra_sparse::CsrMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut d = DMatrix::<f64>::zeros(n, n);
    for (i, j, v) in m.triplet_iter() {
        d[(i, j)] += v;
    }
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((d[(i, j)] - d[(j, i)]).abs());
        }
    }
    worst
}

/// `Σ_T |T|·mean(e^φ)·|∇u|² - Σ_i q_i u_i² m_i`, with the simplex gradient
/// energy from the edge Gram matrix and the lumped weighted mass, in
/// full-vertex indexing with `u` zero on the boundary.
pub fn quadrature_form(mesh: &TriMesh, field: &GeometryField, density: &Density, u_full: &[f64]) -> f64 {
    let amb = field.dim() + 1;
    let per = (mesh.dim + 1) as f64;
    let mut lumped = vec![0.0; mesh.vertices.len()];
    let mut energy = 0.0;
    for s in 0..mesh.simplices.len() {
        let idx = mesh.simplex(s);
        let x0 = mesh.vertices[idx[0]];
        let edges: Vec<[f64; 3]> =
            idx[1..].iter().map(|&v| std::array::from_fn(|c| mesh.vertices[v][c] - x0[c])).collect();
        let m = edges.len();
        let gram = DMatrix::from_fn(m, m, |a, b| (0..3).map(|c| edges[a][c] * edges[b][c]).sum::<f64>());
        let measure = gram.determinant().sqrt() / if m == 2 { 2.0 } else { 1.0 };
        let du = nalgebra::DVector::from_fn(m, |a, _| u_full[idx[a + 1]] - u_full[idx[0]]);
        let inv = gram.clone().try_inverse().expect("nondegenerate simplex");
        let grad2 = (du.transpose() * inv * &du)[(0, 0)];
        let w: f64 = idx.iter().map(|&v| density.weight(&field.position[v][..amb]).unwrap()).sum::<f64>() / per;
        energy += measure * w * grad2;
        for &v in idx {
            lumped[v] += measure / per;
        }
    }
    let mut potential = 0.0;
    for v in 0..mesh.vertices.len() {
        if u_full[v] == 0.0 {
            continue;
        }
        let x = &field.position[v][..amb];
        let n = field.normal[v];
        let hess: f64 = density.hessian_nn(x, &n).unwrap();
        let q = field.a2[v] - hess;
        potential += q * u_full[v] * u_full[v] * lumped[v] * density.weight(x).unwrap();
    }
    energy - potential
}

/// Random smooth bump in chart coordinates supported well inside the grid.
pub struct ChartBump {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl ChartBump {
    pub fn random(grid: &Grid, rng: &mut SplitMix64) -> Self {
        let dim = grid.dim();
        let center = (0..dim)
            .map(|a| {
                let (lo, hi) = (grid.lo()[a], grid.hi()[a]);
                rng::uniform(rng, lo + 0.4 * (hi - lo), hi - 0.4 * (hi - lo))
            })
            .collect();
        let side = (0..dim).map(|a| grid.hi()[a] - grid.lo()[a]).fold(f64::INFINITY, f64::min);
        let radius = side * rng::uniform(rng, 0.2, 0.35);
        ChartBump { center, radius }
    }

    pub fn eval(&self, q: &[f64]) -> f64 {
        let d2: f64 = self.center.iter().zip(q).map(|(c, x)| (x - c) * (x - c)).sum::<f64>() / (self.radius * self.radius);
        if d2 < 1.0 {
            (1.0 - d2).powi(4)
        } else {
            0.0
        }
    }

    pub fn on_interior(&self, grid: &Grid, mesh: &TriMesh) -> Vec<f64> {
        mesh.interior.iter().map(|&k| self.eval(&grid.coord(k)[..grid.dim()])).collect()
    }
}
