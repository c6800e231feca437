use densgraph::density::Density;
use densgraph::surface::io::mesh_to_text;
use densgraph::surface::{
    geometry_radial, geometry_vertical, triangulate_grid, triangulate_vertical, weighted_area, weighted_volume_between,
    Grid, RadialGraph, VerticalGraph,
};
use densgraph::Error;
use proptest::prelude::*;

fn unit_square(nodes: usize) -> Grid {
    Grid::rectangle([0.0, 1.0], [0.0, 1.0], [nodes, nodes]).unwrap()
}

fn sup_diff(values: &[f64], exact: impl Fn(usize) -> f64) -> f64 {
    values.iter().enumerate().map(|(k, v)| (v - exact(k)).abs()).fold(0.0, f64::max)
}

#[test]
fn flat_plane_geometry() {
    let g = VerticalGraph::from_fn(unit_square(9), |_| 0.0).unwrap();
    let f = geometry_vertical(&g, &Density::constant(3)).unwrap();
    for k in 0..f.len() {
        assert_eq!(f.normal[k], [0.0, 0.0, 1.0]);
        assert_eq!(f.nh[k], 0.0);
        assert_eq!(f.a2[k], 0.0);
        assert_eq!(f.g_vert[k], 1.0);
    }
}

#[test]
fn grim_reaper_curvature_converges() {
    let errs: Vec<(f64, f64)> = [129, 257, 513]
        .iter()
        .map(|&m| {
            let grid = Grid::interval(-1.0, 1.0, m).unwrap();
            let g = VerticalGraph::from_fn(grid.clone(), |q| -q[0].cos().ln()).unwrap();
            let f = geometry_vertical(&g, &Density::translator(2)).unwrap();
            let x = |k: usize| grid.coord(k)[0];
            (sup_diff(&f.nh, |k| x(k).cos()), sup_diff(&f.g_vert, |k| x(k).cos()))
        })
        .collect();
    assert!(errs[2].0 < 1e-4 && errs[2].1 < 1e-4, "{errs:?}");
    assert!((errs[1].0 / errs[2].0).log2() >= 1.9, "{errs:?}");
    assert!((errs[1].1 / errs[2].1).log2() >= 1.9, "{errs:?}");
}

#[test]
fn hemisphere_curvatures_converge() {
    let r = 2.0f64;
    let errs: Vec<(f64, f64)> = [33, 65]
        .iter()
        .map(|&m| {
            let grid = Grid::rectangle([-0.7, 0.7], [-0.7, 0.7], [m, m]).unwrap();
            let g = VerticalGraph::from_fn(grid, |q| (r * r - q[0] * q[0] - q[1] * q[1]).sqrt()).unwrap();
            let f = geometry_vertical(&g, &Density::constant(3)).unwrap();
            // upward normal on the upper hemisphere points outward: nH = -n/R
            (sup_diff(&f.a2, |_| 2.0 / (r * r)), sup_diff(&f.nh, |_| -2.0 / r))
        })
        .collect();
    assert!((errs[0].0 / errs[1].0).log2() >= 1.9, "{errs:?}");
    assert!((errs[0].1 / errs[1].1).log2() >= 1.9, "{errs:?}");
}

#[test]
fn round_sphere_radial() {
    let r = 1.5;
    let grid = Grid::rectangle([0.6, 2.5], [0.0, 2.0], [17, 17]).unwrap();
    let g = RadialGraph::from_fn(grid, |_| r).unwrap();
    let f = geometry_radial(&g, &Density::constant(3)).unwrap();
    assert!(sup_diff(&f.h, |_| r) < 1e-12);
    // the embedding is only known through finite differences of ν·ρ
    assert!(sup_diff(&f.nh, |_| -2.0 / r) < 1e-2);
    assert!(sup_diff(&f.a2, |_| 2.0 / (r * r)) < 1e-2);
}

#[test]
fn shrinker_sphere_is_weighted_minimal() {
    let r = 2.0f64;
    for m in [17, 33] {
        let grid = Grid::rectangle([0.6, 2.5], [0.0, 2.0], [m, m]).unwrap();
        let g = RadialGraph::from_fn(grid, |_| r).unwrap();
        let f = geometry_radial(&g, &Density::shrinker(3)).unwrap();
        let hphi = sup_diff(&f.hphi, |_| 0.0);
        assert!(hphi < 1e-8, "{m}: {hphi}");
        assert!(f.h.iter().all(|&h| h > 0.0));
    }
}

#[test]
fn polar_line_is_straight() {
    let theta0 = 0.3;
    let errs: Vec<f64> = [129, 257, 513]
        .iter()
        .map(|&m| {
            let g = RadialGraph::from_fn(Grid::interval(-0.5, 1.0, m).unwrap(), |c| 1.0 / (c[0] - theta0).cos()).unwrap();
            sup_diff(&geometry_radial(&g, &Density::constant(2)).unwrap().nh, |_| 0.0)
        })
        .collect();
    assert!(errs[2] < 1e-4, "{errs:?}");
    assert!((errs[1] / errs[2]).log2() >= 1.9, "{errs:?}");
}

#[test]
fn triangulation_combinatorics() {
    let grid = Grid::rectangle([0.0, 1.0], [0.0, 1.0], [3, 3]).unwrap();
    let verts = (0..9).map(|k| [grid.coord(k)[0], grid.coord(k)[1], 0.0]).collect();
    let mesh = triangulate_grid(&grid, verts).unwrap();
    assert_eq!(mesh.simplices.len(), 8);
    assert_eq!(mesh.boundary.iter().filter(|&&b| b).count(), 8);
    assert_eq!(mesh.interior, vec![4]);

    let grid = Grid::interval(0.0, 1.0, 11).unwrap();
    let verts = (0..11).map(|k| [grid.coord(k)[0], 0.0, 0.0]).collect();
    let mesh = triangulate_grid(&grid, verts).unwrap();
    assert_eq!(mesh.simplices.len(), 10);
    assert_eq!(mesh.boundary.iter().filter(|&&b| b).count(), 2);

    assert!(matches!(Grid::rectangle([0.0, 1.0], [0.0, 1.0], [2, 5]), Err(Error::Grid(_))));
}

#[test]
fn mesh_text_header() {
    let g = VerticalGraph::from_fn(unit_square(5), |q| q[0] * q[1]).unwrap();
    let mesh = triangulate_vertical(&g).unwrap();
    let text = mesh_to_text(&mesh);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "25 32");
    assert_eq!(text.lines().count(), 1 + 25 + 32);
}

fn area_of(g: &VerticalGraph, d: &Density) -> f64 {
    weighted_area(&triangulate_vertical(g).unwrap(), &geometry_vertical(g, d).unwrap()).unwrap()
}

/// Composite Simpson rule on `[a, b]` with `n` (even) intervals.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|i| f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 }).sum();
    (f(a) + inner + f(b)) * h / 3.0
}

#[test]
fn plane_areas() {
    let flat = VerticalGraph::from_fn(unit_square(9), |_| 0.0).unwrap();
    assert!((area_of(&flat, &Density::constant(3)) - 1.0).abs() <= 1e-12);
    assert!((area_of(&flat, &Density::translator(3)) - 1.0).abs() <= 1e-12);

    let flat = VerticalGraph::from_fn(unit_square(64), |_| 0.0).unwrap();
    let side = simpson(|x| (-x * x / 4.0).exp(), 0.0, 1.0, 2000);
    let rel = (area_of(&flat, &Density::shrinker(3)) / (side * side) - 1.0).abs();
    assert!(rel <= 1e-4, "{rel}");
}

#[test]
fn slab_volumes() {
    let grid = unit_square(9);
    let zero = VerticalGraph::from_fn(grid.clone(), |_| 0.0).unwrap();
    let up = VerticalGraph::from_fn(grid.clone(), |_| 0.7).unwrap();
    assert!((weighted_volume_between(&zero, &up, &Density::constant(3)).unwrap() - 0.7).abs() <= 1e-14);
    let one = VerticalGraph::from_fn(grid, |_| 1.0).unwrap();
    let v = weighted_volume_between(&zero, &one, &Density::translator(3)).unwrap();
    assert!((v / (std::f64::consts::E - 1.0) - 1.0).abs() <= 1e-10, "{v}");
    assert_eq!(weighted_volume_between(&one, &one, &Density::expander(3)).unwrap(), 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn volume_is_antisymmetric(a in -1.0..1.0f64, b in -1.0..1.0f64, c in -0.5..0.5f64) {
        let grid = Grid::rectangle([-1.0, 1.0], [-0.5, 0.5], [7, 9]).unwrap();
        let f = VerticalGraph::from_fn(grid.clone(), |q| a * q[0] + c * q[1] * q[1]).unwrap();
        let g = VerticalGraph::from_fn(grid, |q| b * q[1] - c * q[0] * q[0]).unwrap();
        for d in [Density::expander(3), Density::translator(3), Density::shrinker(3)] {
            let fwd = weighted_volume_between(&f, &g, &d).unwrap();
            let bwd = weighted_volume_between(&g, &f, &d).unwrap();
            prop_assert_eq!(fwd, -bwd);
        }
    }

    #[test]
    fn constant_density_area_is_rigid(a in -1.0..1.0f64, b in -1.0..1.0f64, sx in -3.0..3.0f64, sy in -3.0..3.0f64) {
        let d = Density::constant(3);
        let f = |x: f64, y: f64| a * x * x + b * x * y.sin();
        let base = Grid::rectangle([0.0, 1.0], [0.0, 2.0], [9, 13]).unwrap();
        let moved = Grid::rectangle([sx, sx + 1.0], [sy, sy + 2.0], [9, 13]).unwrap();
        let swapped = Grid::rectangle([0.0, 2.0], [0.0, 1.0], [13, 9]).unwrap();
        let a0 = area_of(&VerticalGraph::from_fn(base, |q| f(q[0], q[1])).unwrap(), &d);
        let a1 = area_of(&VerticalGraph::from_fn(moved, |q| f(q[0] - sx, q[1] - sy)).unwrap(), &d);
        let a2 = area_of(&VerticalGraph::from_fn(swapped, |q| f(q[1], q[0])).unwrap(), &d);
        prop_assert!((a0 - a1).abs() <= 1e-12, "{} {}", a0, a1);
        prop_assert!((a0 - a2).abs() <= 1e-12, "{} {}", a0, a2);
    }
}
