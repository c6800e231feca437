mod common;

use common::{asymmetry, dense_lowest, quadrature_form};
use densgraph::density::Density;
use densgraph::fixtures::{build, FixtureName};
use densgraph::rng;
use densgraph::spectrum::{
    assemble, check_strong_stability, decomposition_check, gershgorin_lower, min_eigenvalue, quadratic_form,
    DecompositionMode, EigenParams, OperatorAssembly, Verdict,
};
use densgraph::surface::{Grid, Surface, VerticalGraph};
use densgraph::Error;
use proptest::prelude::*;

fn assemble_surface(s: &Surface, d: &Density) -> OperatorAssembly {
    assemble(&s.triangulate().unwrap(), &s.geometry(d).unwrap(), d).unwrap()
}

fn lowest(a: &OperatorAssembly) -> f64 {
    min_eigenvalue(a, &EigenParams::default()).unwrap().mu_min
}

#[test]
fn flat_chain_spectrum() {
    // P1 on a uniform chain with lumped mass: λ_k = (4/h²) sin²(kπ/(2(m-1)))
    let m = 41;
    let grid = Grid::interval(0.0, 3.0, m).unwrap();
    let h = grid.spacing(0);
    let s = Surface::Vertical(VerticalGraph::from_fn(grid, |_| 0.0).unwrap());
    let a = assemble_surface(&s, &Density::constant(2));
    let exact = 4.0 / (h * h) * (std::f64::consts::PI / (2.0 * (m - 1) as f64)).sin().powi(2);
    assert!((lowest(&a) - exact).abs() <= 1e-9 * exact, "{} {exact}", lowest(&a));
}

#[test]
fn flat_square_spectrum() {
    let m = 9;
    let grid = Grid::rectangle([0.0, 2.0], [0.0, 2.0], [m, m]).unwrap();
    let h = grid.spacing(0);
    let s = Surface::Vertical(VerticalGraph::from_fn(grid, |_| 0.0).unwrap());
    let a = assemble_surface(&s, &Density::constant(3));
    let exact = 8.0 / (h * h) * (std::f64::consts::PI / (2.0 * (m - 1) as f64)).sin().powi(2);
    assert!((lowest(&a) - exact).abs() <= 1e-9 * exact);
    assert!((dense_lowest(&a) - exact).abs() <= 1e-9 * exact);
}

#[test]
fn inverse_iteration_matches_dense_solve() {
    for (name, m) in [
        (FixtureName::Bowl, 9),
        (FixtureName::Sphere, 9),
        (FixtureName::ShrinkerSphere, 9),
        (FixtureName::ShrinkerPlane, 9),
        (FixtureName::Catenary, 41),
    ] {
        let fx = build(name, m).unwrap();
        let a = assemble_surface(&fx.surface, &fx.density);
        let rep = min_eigenvalue(&a, &EigenParams::default()).unwrap();
        let dense = dense_lowest(&a);
        assert!((rep.mu_min - dense).abs() <= 1e-9 * dense.abs().max(1.0), "{name}: {} {dense}", rep.mu_min);
        assert!(gershgorin_lower(&a) <= dense + 1e-12);

        let u = &rep.eigenvector;
        let au = a.apply(u);
        let mu_u: Vec<f64> = u.iter().zip(&a.mass).map(|(x, m)| rep.mu_min * m * x).collect();
        let num: f64 = au.iter().zip(&mu_u).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt();
        let mu_norm: f64 = u.iter().zip(&a.mass).map(|(x, m)| m * m * x * x).sum::<f64>().sqrt();
        assert!(num <= 1e-8 * mu_norm.max(1.0), "{name}: {num}");
    }
}

#[test]
fn shrinker_plane_is_unstable() {
    let fx = build(FixtureName::ShrinkerPlane, 21).unwrap();
    let a = assemble_surface(&fx.surface, &fx.density);
    let rep = check_strong_stability(&a, 1e-6, &EigenParams::default()).unwrap();
    assert_eq!(rep.verdict, Verdict::Unstable);
    assert!(rep.mu_min <= -0.1);
    assert!(check_strong_stability(&a, 0.0, &EigenParams::default()).is_err());
}

#[test]
fn decomposition_mode_must_match_density() {
    let fx = build(FixtureName::GrimReaper, 17).unwrap();
    let mesh = fx.surface.triangulate().unwrap();
    let field = fx.surface.geometry(&fx.density).unwrap();
    let v = vec![0.5; mesh.num_interior()];
    let r = decomposition_check(&mesh, &field, &fx.density, 0.0, &v, DecompositionMode::VerticalGraphRadialDensity);
    assert!(matches!(r, Err(Error::Mode { .. })));
    let r = decomposition_check(&mesh, &field, &fx.density, 0.0, &v[1..], DecompositionMode::VerticalGraphVerticalDensity);
    assert!(r.is_err());
}

fn random_graph(c: [f64; 4]) -> VerticalGraph {
    let grid = Grid::rectangle([-0.8, 0.8], [-0.6, 0.7], [9, 8]).unwrap();
    VerticalGraph::from_fn(grid, |q| 1.0 + c[0] * q[0] + c[1] * q[0] * q[1] + c[2] * q[1] * q[1] + c[3] * (2.0 * q[0]).sin())
        .unwrap()
}

fn densities() -> impl Strategy<Value = Density> {
    prop_oneof![
        Just(Density::expander(3)),
        Just(Density::shrinker(3)),
        Just(Density::translator(3)),
        (-2.0..2.0f64).prop_map(|a| Density::singular_minimal(a, 3).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn operators_are_symmetric(c in prop::array::uniform4(-0.4..0.4f64), d in densities(), seed in 0u64..1000) {
        let g = random_graph(c);
        let s = Surface::Vertical(g);
        let mesh = s.triangulate().unwrap();
        let field = s.geometry(&d).unwrap();
        let a = assemble(&mesh, &field, &d).unwrap();
        prop_assert!(asymmetry(&a.k) <= 1e-12);
        prop_assert!(asymmetry(&a.p) <= 1e-12);
        prop_assert!(asymmetry(&a.m) <= 1e-12);
        prop_assert!(a.mass.iter().all(|&m| m > 0.0));

        let mut stream = rng::seeded(seed);
        let u: Vec<f64> = (0..a.dim()).map(|_| rng::uniform(&mut stream, -1.0, 1.0)).collect();
        let q = quadratic_form(&a, &u).unwrap();
        let oracle = quadrature_form(&mesh, &field, &d, &mesh.extend(&u));
        prop_assert!((q - oracle).abs() <= 1e-10 * oracle.abs().max(1.0), "{} {}", q, oracle);
    }

    #[test]
    fn shift_moves_the_spectrum(c in prop::array::uniform4(-0.3..0.3f64), shift in -3.0..3.0f64) {
        let s = Surface::Vertical(random_graph(c));
        let a = assemble_surface(&s, &Density::expander(3));
        let mu = lowest(&a);
        let shifted = lowest(&a.with_potential_shift(shift));
        prop_assert!((shifted - mu - shift).abs() <= 1e-9 * mu.abs().max(1.0), "{} {} {}", mu, shifted, shift);
    }

    #[test]
    fn rayleigh_quotients_bound_the_minimum(c in prop::array::uniform4(-0.3..0.3f64), seed in 0u64..1000) {
        let s = Surface::Vertical(random_graph(c));
        let a = assemble_surface(&s, &Density::shrinker(3));
        let mu = lowest(&a);
        let mut stream = rng::seeded(seed);
        let u: Vec<f64> = (0..a.dim()).map(|_| rng::uniform(&mut stream, -1.0, 1.0)).collect();
        let mass: f64 = u.iter().zip(&a.mass).map(|(x, m)| m * x * x).sum();
        prop_assert!(quadratic_form(&a, &u).unwrap() / mass >= mu - 1e-9);
    }
}
