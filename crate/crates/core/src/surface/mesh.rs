use super::grid::Grid;
use crate::error::{Error, Result};
use crate::vec3::{self, Vec3};

/// Simplicial mesh of a sampled graph: segments for curves, triangles for
/// surfaces. Only the first `dim + 1` entries of each simplex are used.
#[derive(Clone, Debug)]
pub struct TriMesh {
    pub dim: usize,
    pub vertices: Vec<Vec3>,
    pub simplices: Vec<[usize; 3]>,
    pub boundary: Vec<bool>,
    /// Position of each vertex among the interior vertices.
    pub interior_index: Vec<Option<usize>>,
    pub interior: Vec<usize>,
}

impl TriMesh {
    pub fn simplex(&self, s: usize) -> &[usize] {
        &self.simplices[s][..self.dim + 1]
    }

    pub fn num_interior(&self) -> usize {
        self.interior.len()
    }

    /// Ambient length or area of simplex `s`.
    pub fn measure(&self, s: usize) -> f64 {
        simplex_measure(&self.vertices, self.simplex(s))
    }

    /// Scatter interior values into a full nodal vector with zero boundary.
    pub fn extend(&self, u: &[f64]) -> Vec<f64> {
        let mut full = vec![0.0; self.vertices.len()];
        for (a, &k) in self.interior.iter().enumerate() {
            full[k] = u[a];
        }
        full
    }

    pub fn restrict(&self, full: &[f64]) -> Vec<f64> {
        self.interior.iter().map(|&k| full[k]).collect()
    }
}

pub fn simplex_measure(vertices: &[Vec3], s: &[usize]) -> f64 {
    let e1 = vec3::sub(&vertices[s[1]], &vertices[s[0]]);
    if s.len() == 2 {
        return vec3::norm(&e1);
    }
    let e2 = vec3::sub(&vertices[s[2]], &vertices[s[0]]);
    0.5 * vec3::norm(&vec3::cross(&e1, &e2))
}

/// Triangulates a chart grid carrying the given ambient vertex positions.
/// Each cell is split along the diagonal from `(i, j)` to `(i+1, j+1)`.
pub fn triangulate_grid(grid: &Grid, vertices: Vec<Vec3>) -> Result<TriMesh> {
    Error::check_len(grid.len(), vertices.len())?;
    let [nx, ny] = grid.counts();
    let dim = grid.dim();
    let mut simplices = Vec::new();
    if dim == 1 {
        for i in 0..nx - 1 {
            simplices.push([i, i + 1, usize::MAX]);
        }
    } else {
        for j in 0..ny - 1 {
            for i in 0..nx - 1 {
                let a = grid.index(i, j);
                let b = grid.index(i + 1, j);
                let c = grid.index(i, j + 1);
                let d = grid.index(i + 1, j + 1);
                simplices.push([a, b, d]);
                simplices.push([a, d, c]);
            }
        }
    }
    for (index, s) in simplices.iter().enumerate() {
        let measure = simplex_measure(&vertices, &s[..dim + 1]);
        if !(measure > 1e-14) {
            return Err(Error::Mesh { index, measure });
        }
    }
    let boundary: Vec<bool> = (0..grid.len()).map(|k| grid.is_boundary(k)).collect();
    let mut interior = Vec::new();
    let interior_index = boundary
        .iter()
        .enumerate()
        .map(|(k, &b)| {
            if b {
                None
            } else {
                interior.push(k);
                Some(interior.len() - 1)
            }
        })
        .collect();
    Ok(TriMesh { dim, vertices, simplices, boundary, interior_index, interior })
}
