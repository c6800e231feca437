//! Acceptance run: one pass/fail line per criterion, nonzero exit if any
//! criterion fails.

mod common;

use std::time::{Duration, Instant};

use densgraph::calibration::{run_calibration, trials_csv};
use densgraph::fixtures::{self, build, calibration_base, FixtureName, BATTERY};
use densgraph::identities::run_battery;
use densgraph::rng;
use densgraph::spectrum::{
    assemble, check_strong_stability, decomposition_check, default_tolerance, min_eigenvalue, quadratic_form,
    DecompositionMode, EigenParams, OperatorAssembly, Verdict,
};

use common::*;

struct Outcome {
    pass: bool,
    detail: String,
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

fn assembly_of(fx: &fixtures::Fixture) -> OperatorAssembly {
    let mesh = fx.surface.triangulate().unwrap();
    let field = fx.surface.geometry(&fx.density).unwrap();
    assemble(&mesh, &field, &fx.density).unwrap()
}

fn solver_fixtures() -> Outcome {
    let cases: [(FixtureName, fn(f64) -> f64); 3] =
        [(FixtureName::GrimReaper, grim_reaper), (FixtureName::Catenary, catenary), (FixtureName::CmcArc, cmc_arc)];
    let mut pass = true;
    let mut detail = Vec::new();
    for (name, exact) in cases {
        let mut errs = Vec::new();
        let mut slowest = Duration::ZERO;
        for m in [33, 65, 129, 257] {
            let (fx, t) = timed(|| build(name, m).unwrap());
            slowest = slowest.max(t);
            errs.push(sup_error(fx.surface.grid(), fx.surface.values(), exact));
        }
        let orders: Vec<f64> = errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
        let min_order = orders.iter().cloned().fold(f64::INFINITY, f64::min);
        let ok = errs[3] <= 5e-4 && min_order >= 1.9 && slowest <= Duration::from_secs(5);
        pass &= ok;
        detail.push(format!("{name} err257={:.2e} min_order={min_order:.3} slowest={slowest:.2?}", errs[3]));
    }
    Outcome { pass, detail: detail.join("; ") }
}

fn identity_battery() -> Outcome {
    let (reports, t) = timed(|| run_battery(&BATTERY).unwrap());
    let failing: Vec<String> = reports.iter().filter(|r| !r.pass).map(|r| format!("{}/{}", r.fixture, r.name)).collect();
    let plane_worst = reports
        .iter()
        .filter(|r| r.fixture == "plane")
        .flat_map(|r| r.residuals.iter().cloned())
        .fold(0.0, f64::max);
    let min_order = reports
        .iter()
        .flat_map(|r| r.grid_orders.iter().flatten().cloned())
        .fold(f64::INFINITY, f64::min);
    let pass = failing.is_empty() && plane_worst <= 1e-12 && t <= Duration::from_secs(60);
    Outcome {
        pass,
        detail: format!(
            "{} reports, failing={failing:?}, plane max residual={plane_worst:.1e}, min observed order={min_order:.3}, time={t:.2?}",
            reports.len()
        ),
    }
}

fn stationary_fixture_stability() -> Outcome {
    let cases = [
        (FixtureName::ExpanderGraph, 64, 127),
        (FixtureName::ExpanderRadial, 64, 127),
        (FixtureName::GrimReaper, 257, 513),
        (FixtureName::SingularMinimal(-2.0), 257, 513),
        (FixtureName::SingularMinimal(-1.0), 257, 513),
        (FixtureName::SingularMinimal(0.0), 257, 513),
    ];
    let mut pass = true;
    let mut detail = Vec::new();
    for (name, m, fine) in cases {
        let (mu, t) = timed(|| min_eigenvalue(&assembly_of(&build(name, m).unwrap()), &EigenParams::default()).unwrap().mu_min);
        let mut ok = mu >= -1e-4 && t <= Duration::from_secs(30);
        let mut note = String::new();
        if mu < 0.0 {
            let mu2 = min_eigenvalue(&assembly_of(&build(name, fine).unwrap()), &EigenParams::default()).unwrap().mu_min;
            let shrink = mu.abs() / mu2.min(0.0).abs().max(f64::MIN_POSITIVE);
            ok &= shrink >= 3.0;
            note = format!(" neg-part shrink={shrink:.2}");
        }
        pass &= ok;
        detail.push(format!("{name}@{m} mu={mu:.4e}{note} ({t:.2?})"));
    }
    Outcome { pass, detail: detail.join("; ") }
}

fn negative_control() -> Outcome {
    let fx = build(FixtureName::ShrinkerPlane, 41).unwrap();
    let a = assembly_of(&fx);
    let rep = check_strong_stability(&a, default_tolerance(&a), &EigenParams::default()).unwrap();
    let small = assembly_of(&build(FixtureName::ShrinkerPlane, 7).unwrap());
    let iterative = min_eigenvalue(&small, &EigenParams::default()).unwrap().mu_min;
    let dense = dense_lowest(&small);
    let pass = rep.mu_min <= -0.1 && rep.verdict == Verdict::Unstable && (iterative - dense).abs() <= 1e-9;
    Outcome {
        pass,
        detail: format!(
            "side 20 mu={:.6} verdict={:?}; 7x7 iterative={iterative:.12} dense={dense:.12} diff={:.1e}",
            rep.mu_min,
            rep.verdict,
            (iterative - dense).abs()
        ),
    }
}

const GAP_FLOOR: f64 = 1e-11;

fn decompositions() -> Outcome {
    let cases = [
        (FixtureName::ExpanderGraph, DecompositionMode::VerticalGraphRadialDensity, 33),
        (FixtureName::ShrinkerSphere, DecompositionMode::RadialGraphRadialDensity, 33),
        (FixtureName::ExpanderRadial, DecompositionMode::RadialGraphRadialDensity, 33),
        (FixtureName::GrimReaper, DecompositionMode::VerticalGraphVerticalDensity, 65),
        (FixtureName::Catenary, DecompositionMode::VerticalGraphVerticalDensity, 65),
        (FixtureName::Bowl, DecompositionMode::VerticalGraphVerticalDensity, 33),
        (FixtureName::Sphere, DecompositionMode::RadialGraphVerticalDensity, 33),
    ];
    let mut pass = true;
    let mut detail = Vec::new();
    let mut stream = rng::seeded(2024);
    for (name, mode, m) in cases {
        let levels = [build(name, m).unwrap(), build(name, 2 * m - 1).unwrap()];
        let prepared: Vec<_> = levels
            .iter()
            .map(|fx| {
                let grid = fx.surface.grid().clone();
                (fx, fx.surface.triangulate().unwrap(), fx.surface.geometry(&fx.density).unwrap(), grid)
            })
            .collect();
        let mut worst_ratio = f64::INFINITY;
        let mut consts = Vec::new();
        for _ in 0..10 {
            let bump = ChartBump::random(&prepared[0].3, &mut stream);
            let gaps: Vec<(f64, f64)> = prepared
                .iter()
                .map(|(fx, mesh, field, grid)| {
                    let v = bump.on_interior(grid, mesh);
                    let g = decomposition_check(mesh, field, &fx.density, fx.lambda, &v, mode).unwrap();
                    (g.gap, grid.spacing(0))
                })
                .collect();
            let (coarse, fine) = (gaps[0].0, gaps[1].0);
            if fine > GAP_FLOOR {
                worst_ratio = worst_ratio.min(coarse / fine);
                consts.push(fine / (gaps[1].1 * gaps[1].1));
            }
        }
        let spread = if consts.is_empty() {
            1.0
        } else {
            consts.iter().cloned().fold(0.0, f64::max) / consts.iter().cloned().fold(f64::INFINITY, f64::min)
        };
        let ok = (consts.is_empty() || worst_ratio >= 3.0) && spread <= 10.0;
        pass &= ok;
        if consts.is_empty() {
            detail.push(format!("{name}: all gaps at roundoff"));
        } else {
            detail.push(format!("{name}: min halving ratio={worst_ratio:.2}, C spread={spread:.2}"));
        }
    }
    Outcome { pass, detail: detail.join("; ") }
}

fn calibration() -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for name in [FixtureName::GrimReaper, FixtureName::ExpanderGraph, FixtureName::CmcArc] {
        let (res, t) = timed(|| {
            let (base, density, lambda) = calibration_base(name, 400).unwrap();
            run_calibration(&base, &density, lambda, 50, 100, 0).unwrap()
        });
        let worst = res.trials.iter().map(|r| r.delta_a / res.base_area).fold(f64::INFINITY, f64::min);
        let ok = res.divergence.sup_residual <= 1e-5
            && res.trials.len() == 50
            && worst >= -1e-10
            && t <= Duration::from_secs(120);
        pass &= ok;
        detail.push(format!(
            "{name}: div gap={:.1e} min deltaA/A={worst:.3e} ({t:.2?})",
            res.divergence.sup_residual
        ));
    }
    Outcome { pass, detail: detail.join("; ") }
}

fn infrastructure() -> Outcome {
    let mut pass = true;
    let mut notes = Vec::new();
    let mut sym: f64 = 0.0;
    let mut quad_rel: f64 = 0.0;
    let mut spd = true;
    let mut stream = rng::seeded(99);
    for (name, m) in [(FixtureName::Bowl, 17), (FixtureName::ExpanderRadial, 17), (FixtureName::GrimReaper, 65)] {
        let fx = build(name, m).unwrap();
        let mesh = fx.surface.triangulate().unwrap();
        let field = fx.surface.geometry(&fx.density).unwrap();
        let a = assemble(&mesh, &field, &fx.density).unwrap();
        sym = sym.max(asymmetry(&a.k)).max(asymmetry(&a.p)).max(asymmetry(&a.m));
        spd &= a.mass.iter().all(|&x| x > 0.0) && nalgebra::Cholesky::new(to_dense(&a.m)).is_some();
        for _ in 0..3 {
            let u: Vec<f64> = (0..a.dim()).map(|_| rng::uniform(&mut stream, -1.0, 1.0)).collect();
            let q = quadratic_form(&a, &u).unwrap();
            let oracle = quadrature_form(&mesh, &field, &fx.density, &mesh.extend(&u));
            quad_rel = quad_rel.max((q - oracle).abs() / oracle.abs().max(1.0));
        }
    }
    pass &= sym <= 1e-12 && spd && quad_rel <= 1e-10;
    notes.push(format!("asymmetry={sym:.1e} M SPD={spd} quadratic form rel diff={quad_rel:.1e}"));

    let mut eig: f64 = 0.0;
    for (name, m) in [(FixtureName::Bowl, 9), (FixtureName::ExpanderRadial, 9), (FixtureName::GrimReaper, 51)] {
        let a = assembly_of(&build(name, m).unwrap());
        assert!(a.dim() <= 49);
        let mu = min_eigenvalue(&a, &EigenParams::default()).unwrap().mu_min;
        eig = eig.max((mu - dense_lowest(&a)).abs());
    }
    pass &= eig <= 1e-9;
    notes.push(format!("inverse iteration vs dense={eig:.1e}"));

    let run = || {
        let (base, density, lambda) = calibration_base(FixtureName::GrimReaper, 200).unwrap();
        let r = run_calibration(&base, &density, lambda, 8, 10, 42).unwrap();
        (serde_json::to_string(&r).unwrap(), trials_csv(&r.trials))
    };
    let identical = run() == run();
    pass &= identical;
    notes.push(format!("seeded reports identical={identical}"));
    Outcome { pass, detail: notes.join("; ") }
}

fn to_dense(m: &nalgebra_sparse::CsrMatrix<f64>) -> nalgebra::DMatrix<f64> {
    let mut d = nalgebra::DMatrix::zeros(m.nrows(), m.ncols());
    for (i, j, v) in m.triplet_iter() {
        d[(i, j)] += v;
    }
    d
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("solver fixtures", solver_fixtures),
        ("identity battery", identity_battery),
        ("stability of stationary fixtures", stationary_fixture_stability),
        ("negative control", negative_control),
        ("decomposition identities", decompositions),
        ("calibration", calibration),
        ("infrastructure", infrastructure),
    ];
    let mut all = true;
    for (i, (label, run)) in criteria.iter().enumerate() {
        let out = run();
        all &= out.pass;
        println!("criterion {} [{}] {}: {}", i + 1, if out.pass { "PASS" } else { "FAIL" }, label, out.detail);
    }
    if !all {
        std::process::exit(1);
    }
}
