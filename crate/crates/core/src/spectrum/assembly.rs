use nalgebra_sparse::{CooMatrix, CsrMatrix};

use crate::density::Density;
use crate::error::{Error, Result};
use crate::linalg::SymBandMatrix;
use crate::surface::{GeometryField, TriMesh};
use crate::vec3::{self, Vec3};

/// Discrete second variation on the interior vertices of a mesh:
/// `Q_φ[u] = uᵀ(K - P)u` and the weighted inner product `uᵀMu`.
#[derive(Clone, Debug)]
pub struct OperatorAssembly {
    /// Weighted stiffness `∫⟨∇u_i, ∇u_j⟩ dA_φ`.
    pub k: CsrMatrix<f64>,
    /// Lumped potential term `∫ q u_i u_j dA_φ` with `q = |A|² - ∇²φ(N, N)`.
    pub p: CsrMatrix<f64>,
    /// Lumped weighted mass.
    pub m: CsrMatrix<f64>,
    pub mass: Vec<f64>,
    /// Nodal potential `q` on the interior vertices.
    pub potential: Vec<f64>,
    /// Mesh vertex of each interior unknown.
    pub interior: Vec<usize>,
}

/// Gradients of the barycentric coordinates of an embedded simplex.
pub fn barycentric_gradients(vertices: &[Vec3], s: &[usize]) -> [Vec3; 3] {
    let e1 = vec3::sub(&vertices[s[1]], &vertices[s[0]]);
    if s.len() == 2 {
        let g = vec3::scale(&e1, 1.0 / vec3::dot(&e1, &e1));
        return [vec3::scale(&g, -1.0), g, vec3::ZERO];
    }
    let e2 = vec3::sub(&vertices[s[2]], &vertices[s[0]]);
    let (a, b, c) = (vec3::dot(&e1, &e1), vec3::dot(&e1, &e2), vec3::dot(&e2, &e2));
    let det = a * c - b * b;
    let g1 = vec3::scale(&vec3::sub(&vec3::scale(&e1, c), &vec3::scale(&e2, b)), 1.0 / det);
    let g2 = vec3::scale(&vec3::sub(&vec3::scale(&e2, a), &vec3::scale(&e1, b)), 1.0 / det);
    let g0 = vec3::scale(&vec3::add(&g1, &g2), -1.0);
    [g0, g1, g2]
}

/// `q = |A|² - ∇²φ(N, N)` at every node of the field.
pub fn jacobi_potential(field: &GeometryField, density: &Density) -> Result<Vec<f64>> {
    let amb = field.dim() + 1;
    (0..field.len())
        .map(|k| Ok(field.a2[k] - density.hessian_nn(&field.position[k][..amb], &field.normal[k])?))
        .collect()
}

pub fn assemble(mesh: &TriMesh, field: &GeometryField, density: &Density) -> Result<OperatorAssembly> {
    Error::check_len(mesh.vertices.len(), field.len())?;
    let q_all = jacobi_potential(field, density)?;
    let n = mesh.num_interior();
    let per = (mesh.dim + 1) as f64;
    let mut k = CooMatrix::new(n, n);
    let mut mass = vec![0.0; n];
    for s in 0..mesh.simplices.len() {
        let simplex = mesh.simplex(s);
        let measure = mesh.measure(s);
        if !(measure > 1e-14) {
            return Err(Error::Mesh { index: s, measure });
        }
        let grads = barycentric_gradients(&mesh.vertices, simplex);
        let wbar = simplex.iter().map(|&v| field.weight[v]).sum::<f64>() / per;
        for (a, &va) in simplex.iter().enumerate() {
            let Some(ia) = mesh.interior_index[va] else { continue };
            mass[ia] += field.weight[va] * measure / per;
            for (b, &vb) in simplex.iter().enumerate() {
                if let Some(ib) = mesh.interior_index[vb] {
                    k.push(ia, ib, wbar * measure * vec3::dot(&grads[a], &grads[b]));
                }
            }
        }
    }
    let potential: Vec<f64> = mesh.interior.iter().map(|&v| q_all[v]).collect();
    let diag = |vals: Vec<f64>| {
        let mut c = CooMatrix::new(n, n);
        for (i, v) in vals.into_iter().enumerate() {
            c.push(i, i, v);
        }
        CsrMatrix::from(&c)
    };
    let p = diag(mass.iter().zip(&potential).map(|(m, q)| m * q).collect());
    let m = diag(mass.clone());
    if let Some(i) = mass.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::Mesh { index: i, measure: mass[i] });
    }
    Ok(OperatorAssembly { k: CsrMatrix::from(&k), p, m, mass, potential, interior: mesh.interior.clone() })
}

fn csr_mul(a: &CsrMatrix<f64>, u: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.nrows()];
    for (i, row) in a.row_iter().enumerate() {
        out[i] = row.col_indices().iter().zip(row.values()).map(|(&j, v)| v * u[j]).sum();
    }
    out
}

impl OperatorAssembly {
    pub fn dim(&self) -> usize {
        self.mass.len()
    }

    /// `(K - P)u`.
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let ku = csr_mul(&self.k, u);
        ku.iter().zip(csr_mul(&self.p, u)).map(|(a, b)| a - b).collect()
    }

    pub fn apply_mass(&self, u: &[f64]) -> Vec<f64> {
        u.iter().zip(&self.mass).map(|(a, m)| a * m).collect()
    }

    /// `uᵀ(K - P)w`.
    pub fn bilinear(&self, u: &[f64], w: &[f64]) -> Result<f64> {
        Error::check_len(self.dim(), u.len())?;
        Error::check_len(self.dim(), w.len())?;
        Ok(u.iter().zip(self.apply(w)).map(|(a, b)| a * b).sum())
    }

    /// Same assembly with the potential lowered by `c`.
    pub fn with_potential_shift(&self, c: f64) -> OperatorAssembly {
        let mut out = self.clone();
        out.potential.iter_mut().for_each(|q| *q -= c);
        for (v, (m, q)) in out.p.values_mut().iter_mut().zip(self.mass.iter().zip(&out.potential)) {
            *v = m * q;
        }
        out
    }

    /// Largest `|i - j|` over the nonzeros of `K`.
    pub fn bandwidth(&self) -> usize {
        self.k
            .triplet_iter()
            .map(|(i, j, _)| i.abs_diff(j))
            .max()
            .unwrap_or(0)
    }

    /// `K - P - σM` in symmetric band storage.
    pub(crate) fn shifted_band(&self, sigma: f64) -> SymBandMatrix {
        let mut a = SymBandMatrix::zeros(self.dim(), self.bandwidth());
        for (i, j, &v) in self.k.triplet_iter() {
            if j <= i {
                a.add(i, j, v);
            }
        }
        for i in 0..self.dim() {
            a.add(i, i, -self.mass[i] * (self.potential[i] + sigma));
        }
        a
    }

    /// Dense `K - P`, for small instances and oracles.
    pub fn dense(&self) -> nalgebra::DMatrix<f64> {
        let n = self.dim();
        let mut a = nalgebra::DMatrix::zeros(n, n);
        for (i, j, &v) in self.k.triplet_iter() {
            a[(i, j)] += v;
        }
        for (i, j, &v) in self.p.triplet_iter() {
            a[(i, j)] -= v;
        }
        a
    }

    /// Largest Rayleigh quotient over coordinate basis vectors.
    pub fn max_coordinate_rayleigh(&self) -> f64 {
        let a = self.dense_diagonal();
        a.iter().zip(&self.mass).map(|(d, m)| d / m).fold(f64::NEG_INFINITY, f64::max)
    }

    pub(crate) fn dense_diagonal(&self) -> Vec<f64> {
        let mut d: Vec<f64> = self.mass.iter().zip(&self.potential).map(|(m, q)| -m * q).collect();
        for (i, j, &v) in self.k.triplet_iter() {
            if i == j {
                d[i] += v;
            }
        }
        d
    }
}

/// `Q_φ[u] = uᵀ(K - P)u` for an interior nodal vector.
pub fn quadratic_form(assembly: &OperatorAssembly, u: &[f64]) -> Result<f64> {
    assembly.bilinear(u, u)
}
