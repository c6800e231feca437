use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform tensor grid over an interval (`dim = 1`) or a rectangle (`dim = 2`).
///
/// Nodes are numbered row by row: node `(i, j)` has index `j * nx + i`, with
/// `i` running along axis 0. For `dim = 1` axis 1 has a single node.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dim: usize,
    lo: [f64; 2],
    hi: [f64; 2],
    counts: [usize; 2],
}

impl Grid {
    pub fn interval(a: f64, b: f64, nodes: usize) -> Result<Self> {
        Self::build(1, [a, 0.0], [b, 0.0], [nodes, 1])
    }

    pub fn rectangle(x: [f64; 2], y: [f64; 2], counts: [usize; 2]) -> Result<Self> {
        Self::build(2, [x[0], y[0]], [x[1], y[1]], counts)
    }

    fn build(dim: usize, lo: [f64; 2], hi: [f64; 2], counts: [usize; 2]) -> Result<Self> {
        for k in 0..dim {
            if counts[k] < 3 {
                return Err(Error::Grid(format!("axis {k} has {} nodes, need at least 3", counts[k])));
            }
            if !(lo[k].is_finite() && hi[k].is_finite() && hi[k] > lo[k]) {
                return Err(Error::Grid(format!("axis {k} has empty or non-finite range {}..{}", lo[k], hi[k])));
            }
        }
        Ok(Grid { dim, lo, hi, counts })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn counts(&self) -> [usize; 2] {
        self.counts
    }

    pub fn lo(&self) -> [f64; 2] {
        self.lo
    }

    pub fn hi(&self) -> [f64; 2] {
        self.hi
    }

    pub fn len(&self) -> usize {
        self.counts[0] * self.counts[1]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        (self.hi[axis] - self.lo[axis]) / (self.counts[axis] - 1) as f64
    }

    /// Product of the spacings along the active axes.
    pub fn cell_measure(&self) -> f64 {
        (0..self.dim).map(|k| self.spacing(k)).product()
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.counts[0] + i
    }

    pub fn ij(&self, k: usize) -> (usize, usize) {
        (k % self.counts[0], k / self.counts[0])
    }

    pub fn coord(&self, k: usize) -> [f64; 2] {
        let (i, j) = self.ij(k);
        let mut c = [0.0; 2];
        c[0] = self.lo[0] + i as f64 * self.spacing(0);
        if self.dim == 2 {
            c[1] = self.lo[1] + j as f64 * self.spacing(1);
        }
        c
    }

    /// Number of grid steps from node `k` to the nearest chart boundary.
    pub fn boundary_distance(&self, k: usize) -> usize {
        let (i, j) = self.ij(k);
        let mut d = i.min(self.counts[0] - 1 - i);
        if self.dim == 2 {
            d = d.min(j).min(self.counts[1] - 1 - j);
        }
        d
    }

    pub fn is_boundary(&self, k: usize) -> bool {
        self.boundary_distance(k) == 0
    }

    /// Node indices at distance at least `depth` from the boundary.
    pub fn nodes_at_depth(&self, depth: usize) -> Vec<usize> {
        (0..self.len()).filter(|&k| self.boundary_distance(k) >= depth).collect()
    }

    pub fn interior(&self) -> Vec<usize> {
        self.nodes_at_depth(1)
    }

    /// Same grid with `2(m - 1) + 1` nodes per active axis.
    pub fn refined(&self) -> Self {
        let mut counts = self.counts;
        for c in counts.iter_mut().take(self.dim) {
            *c = 2 * (*c - 1) + 1;
        }
        Grid { counts, ..self.clone() }
    }

    /// First (`order = 1`) or second (`order = 2`) derivative of nodal values
    /// along `axis`: centered second order stencils inside, second order
    /// one-sided stencils on the boundary.
    pub fn derivative(&self, values: &[f64], axis: usize, order: usize) -> Vec<f64> {
        assert_eq!(values.len(), self.len());
        assert!(axis < self.dim && (1..=2).contains(&order));
        let m = self.counts[axis];
        assert!(m >= 4, "finite differences need four nodes per axis");
        let h = self.spacing(axis);
        let stride = if axis == 0 { 1 } else { self.counts[0] };
        let mut out = vec![0.0; values.len()];
        for k in 0..values.len() {
            let (i, j) = self.ij(k);
            let p = if axis == 0 { i } else { j };
            let at = |off: isize| values[(k as isize + off * stride as isize) as usize];
            out[k] = match (order, p) {
                (1, 0) => (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h),
                (1, p) if p == m - 1 => (3.0 * at(0) - 4.0 * at(-1) + at(-2)) / (2.0 * h),
                (1, _) => (at(1) - at(-1)) / (2.0 * h),
                (_, 0) => (2.0 * at(0) - 5.0 * at(1) + 4.0 * at(2) - at(3)) / (h * h),
                (_, p) if p == m - 1 => (2.0 * at(0) - 5.0 * at(-1) + 4.0 * at(-2) - at(-3)) / (h * h),
                _ => (at(1) - 2.0 * at(0) + at(-1)) / (h * h),
            };
        }
        out
    }

    /// All first and second chart derivatives:
    /// `([u_1, u_2], [u_11, u_12, u_22])`. Inactive axes yield zeros.
    pub fn jet(&self, values: &[f64]) -> ([Vec<f64>; 2], [Vec<f64>; 3]) {
        let zero = vec![0.0; values.len()];
        let d0 = self.derivative(values, 0, 1);
        let d00 = self.derivative(values, 0, 2);
        if self.dim == 1 {
            return ([d0, zero.clone()], [d00, zero.clone(), zero]);
        }
        let d1 = self.derivative(values, 1, 1);
        let d01 = self.derivative(&d0, 1, 1);
        let d11 = self.derivative(values, 1, 2);
        ([d0, d1], [d00, d01, d11])
    }
}
