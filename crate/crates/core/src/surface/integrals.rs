use super::geometry::{trapezoid_weights, GeometryField};
use super::graph::VerticalGraph;
use super::mesh::TriMesh;
use crate::density::Density;
use crate::error::{Error, Result};

/// Absolute tolerance of the column integrals in [`weighted_volume_between`].
pub const COLUMN_TOL: f64 = 1e-12;

/// `A_φ`: each simplex contributes its ambient measure times the mean of
/// `e^φ` over its vertices.
pub fn weighted_area(mesh: &TriMesh, field: &GeometryField) -> Result<f64> {
    Error::check_len(mesh.vertices.len(), field.len())?;
    let k = (mesh.dim + 1) as f64;
    Ok((0..mesh.simplices.len())
        .map(|s| {
            let w: f64 = mesh.simplex(s).iter().map(|&v| field.weight[v]).sum();
            mesh.measure(s) * w / k
        })
        .sum())
}

/// Signed weighted volume of the slab between two graphs over the same grid,
/// `∫_U ∫_{f}^{f̃} e^{φ(q, t)} dt dq`. Columns are integrated by adaptive
/// Simpson, the chart by the trapezoidal rule.
pub fn weighted_volume_between(base: &VerticalGraph, other: &VerticalGraph, density: &Density) -> Result<f64> {
    if base.grid != other.grid {
        return Err(Error::Invalid("graphs are sampled on different grids".into()));
    }
    Error::check_len(base.dim() + 1, density.ambient_dim())?;
    let weights = trapezoid_weights(&base.grid);
    let mut total = 0.0;
    for (k, w) in weights.iter().enumerate() {
        total += w * column_integral(base, k, base.heights[k], other.heights[k], density)?;
    }
    Ok(total)
}

fn column_integral(graph: &VerticalGraph, k: usize, a: f64, b: f64, density: &Density) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let dim = graph.dim();
    let mut x = graph.point(k);
    let mut f = |t: f64| -> Result<f64> {
        x[dim] = t;
        density.weight(&x[..dim + 1])
    };
    if density.is_constant() {
        return Ok(b - a);
    }
    if b < a {
        return Ok(-adaptive_simpson(&mut f, b, a, COLUMN_TOL)?);
    }
    adaptive_simpson(&mut f, a, b, COLUMN_TOL)
}

/// Adaptive Simpson quadrature with Richardson correction.
pub fn adaptive_simpson<F>(f: &mut F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let fa = f(a)?;
    let fb = f(b)?;
    let m = 0.5 * (a + b);
    let fm = f(m)?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 48)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F>(f: &mut F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm)?;
    let frm = f(rm)?;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    Ok(simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{geometry_vertical, triangulate_vertical, Grid};

    #[test]
    fn simpson_integrates_exponential() {
        let v = adaptive_simpson(&mut |t: f64| Ok(t.exp()), 0.0, 1.0, 1e-13).unwrap();
        assert!((v - (std::f64::consts::E - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn translator_slab_volume() {
        let g = Grid::rectangle([0.0, 1.0], [0.0, 1.0], [5, 5]).unwrap();
        let base = VerticalGraph::from_fn(g.clone(), |_| 0.0).unwrap();
        let top = VerticalGraph::from_fn(g, |_| 1.0).unwrap();
        let d = Density::translator(3);
        let v = weighted_volume_between(&base, &top, &d).unwrap();
        let e = std::f64::consts::E - 1.0;
        assert!((v - e).abs() / e < 1e-10);
        assert_eq!(weighted_volume_between(&top, &base, &d).unwrap(), -v);
        assert_eq!(weighted_volume_between(&base, &base, &d).unwrap(), 0.0);
    }

    #[test]
    fn flat_square_area() {
        let g = Grid::rectangle([0.0, 1.0], [0.0, 1.0], [8, 8]).unwrap();
        let graph = VerticalGraph::from_fn(g, |_| 0.0).unwrap();
        for d in [Density::constant(3), Density::translator(3)] {
            let field = geometry_vertical(&graph, &d).unwrap();
            let mesh = triangulate_vertical(&graph).unwrap();
            assert!((weighted_area(&mesh, &field).unwrap() - 1.0).abs() < 1e-12);
        }
    }
}
