use std::f64::consts::FRAC_1_SQRT_2;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use densgraph::calibration::{run_calibration, trials_csv};
use densgraph::density::{Density, DensityProfile, Dependence};
use densgraph::fixtures::{self, FixtureName, BATTERY};
use densgraph::identities::{run_battery, IdentityReport};
use densgraph::solver::{
    harmonic_extension, solve_radial_axisymmetric, solve_rotational_vertical, solve_vertical, NewtonParams, SolveReport,
};
use densgraph::spectrum::{
    assemble, check_strong_stability, default_tolerance, eigenvector_csv, EigenParams, SpectrumReport, Verdict,
};
use densgraph::surface::io::{field_to_csv, fmt17, mesh_to_text};
use densgraph::surface::{Grid, RadialGraph, Surface, VerticalGraph};

use crate::config::Config;
use crate::error::{CliError, CliResult};
use crate::output::{write_atomic, Formats};

/// A stationary surface built from a configuration.
pub struct Problem {
    pub surface: Surface,
    pub density: Density,
    pub lambda: f64,
    pub report: Option<SolveReport>,
    pub exact_error: Option<f64>,
    pub profile_residual: Option<f64>,
}

fn bad(cfg: &Config, section: &str, key: &str, message: impl Into<String>) -> CliError {
    CliError::config(cfg.line(section, key), format!("{section}.{key}: {}", message.into()))
}

pub fn density_from(cfg: &Config, ambient: usize) -> CliResult<Density> {
    let kind = cfg.require_text("density", "kind")?;
    let param = |key: &str| cfg.require_float("density", key);
    let density = match kind {
        "constant" => Density::constant(ambient),
        "expander" => Density::expander(ambient),
        "shrinker" => Density::shrinker(ambient),
        "translator" => Density::translator(ambient),
        "singular_minimal" => Density::singular_minimal(param("alpha")?, ambient)?,
        "radial_power" => Density::radial_power(param("p")?, ambient)?,
        other => return Err(bad(cfg, "density", "kind", format!("unknown density kind {other:?}"))),
    };
    if let Some(dep) = cfg.text("density", "dependence") {
        let wanted = match dep {
            "radial" => Dependence::Radial,
            "vertical" => Dependence::Vertical,
            "horizontal" => Dependence::Horizontal,
            other => return Err(bad(cfg, "density", "dependence", format!("unknown dependence {other:?}"))),
        };
        if wanted != density.dependence() && !matches!(density.profile(), DensityProfile::Constant) {
            return Err(bad(cfg, "density", "dependence", format!("{kind} densities are {}", density.dependence())));
        }
    }
    for key in ["alpha", "p"] {
        let used = (key == "alpha" && kind == "singular_minimal") || (key == "p" && kind == "radial_power");
        if cfg.has("density", key) && !used {
            return Err(bad(cfg, "density", key, format!("not a parameter of {kind}")));
        }
    }
    Ok(density)
}

pub fn newton_params(cfg: &Config) -> CliResult<NewtonParams> {
    let d = NewtonParams::default();
    let p = NewtonParams {
        tol: cfg.float("solver", "tol").unwrap_or(d.tol),
        max_iter: cfg.int("solver", "max_iter").map_or(d.max_iter, |v| v as usize),
        backtrack: cfg.float("solver", "backtrack").unwrap_or(d.backtrack),
        armijo: cfg.float("solver", "armijo").unwrap_or(d.armijo),
        fd_step: cfg.float("solver", "fd_step").unwrap_or(d.fd_step),
    };
    if !(p.tol > 0.0 && p.fd_step > 0.0 && p.backtrack > 0.0 && p.backtrack < 1.0 && p.armijo > 0.0 && p.armijo < 1.0) {
        return Err(CliError::config(0, "solver: tol and fd_step must be positive, backtrack and armijo in (0, 1)"));
    }
    Ok(p)
}

pub fn eigen_params(cfg: &Config) -> EigenParams {
    let d = EigenParams::default();
    EigenParams {
        residual_tol: cfg.float("spectrum", "residual_tol").unwrap_or(d.residual_tol),
        max_iter: cfg.int("spectrum", "max_iter").map_or(d.max_iter, |v| v as usize),
        ..d
    }
}

fn nodes(cfg: &Config, dim: usize, default: usize) -> CliResult<Vec<usize>> {
    let v = cfg.ints("problem", "nodes").unwrap_or_else(|| vec![default]);
    let v = match (v.len(), dim) {
        (1, _) => vec![v[0]; dim],
        (l, d) if l == d => v,
        _ => return Err(bad(cfg, "problem", "nodes", format!("expected 1 or {dim} counts"))),
    };
    if v.iter().any(|&m| m < densgraph::surface::MIN_NODES) {
        return Err(bad(cfg, "problem", "nodes", format!("need at least {} nodes per axis", densgraph::surface::MIN_NODES)));
    }
    Ok(v)
}

fn intrinsic_dim(cfg: &Config) -> CliResult<usize> {
    match cfg.require_int("problem", "n")? {
        n @ (1 | 2) => Ok(n as usize),
        _ => Err(bad(cfg, "problem", "n", "intrinsic dimension must be 1 or 2")),
    }
}

fn bounds(cfg: &Config, key: &str, count: usize) -> CliResult<Vec<f64>> {
    let v = cfg.floats("problem", key).ok_or_else(|| CliError::config(0, format!("missing required key `{key}` in [problem]")))?;
    if v.len() != count {
        return Err(bad(cfg, "problem", key, format!("expected {count} numbers")));
    }
    Ok(v)
}

/// Boundary data `constant:c`, `affine:c0,c1[,c2]`, `fixture:name` or
/// `file:path` (nodal heights of the whole grid, row-major).
fn boundary_fn(cfg: &Config, source: &str, grid: &Grid, base_dir: &Path) -> CliResult<Box<dyn Fn(&[f64]) -> f64 + Sync>> {
    let err = |m: String| bad(cfg, "problem", "boundary", m);
    let (kind, arg) = source.split_once(':').ok_or_else(|| err(format!("expected `kind:value`, got {source:?}")))?;
    let numbers = || -> CliResult<Vec<f64>> {
        arg.split(',')
            .map(|s| s.trim().parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| err(format!("bad number {s:?}"))))
            .collect()
    };
    Ok(match kind {
        "constant" => {
            let c = numbers()?;
            if c.len() != 1 {
                return Err(err("constant takes one value".into()));
            }
            let c = c[0];
            Box::new(move |_| c)
        }
        "affine" => {
            let c = numbers()?;
            if c.len() != grid.dim() + 1 {
                return Err(err(format!("affine takes {} coefficients", grid.dim() + 1)));
            }
            Box::new(move |q| c[0] + q.iter().zip(&c[1..]).map(|(x, a)| a * x).sum::<f64>())
        }
        "fixture" => {
            let name: FixtureName = arg.parse().map_err(|e: densgraph::Error| err(e.to_string()))?;
            let f = name.exact().ok_or_else(|| err(format!("fixture {name} has no closed form")))?;
            Box::new(f)
        }
        "file" => {
            let path = base_dir.join(arg);
            let text = std::fs::read_to_string(&path)?;
            let values: Vec<f64> = text
                .split_whitespace()
                .map(|s| s.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| err(format!("bad number {s:?} in {}", path.display()))))
                .collect::<CliResult<_>>()?;
            if values.len() != grid.len() {
                return Err(err(format!("{} holds {} values, grid has {}", path.display(), values.len(), grid.len())));
            }
            let g = grid.clone();
            Box::new(move |q| {
                let i = ((q[0] - g.lo()[0]) / g.spacing(0)).round() as usize;
                let j = if g.dim() == 2 { ((q[1] - g.lo()[1]) / g.spacing(1)).round() as usize } else { 0 };
                values[g.index(i, j)]
            })
        }
        other => return Err(err(format!("unknown boundary kind {other:?}"))),
    })
}

/// Builds the configured surface, solving for it when the mode asks to.
pub fn build_problem(cfg: &Config, base_dir: &Path) -> CliResult<Problem> {
    let params = newton_params(cfg)?;
    if let Some(name) = cfg.text("problem", "fixture") {
        let name: FixtureName = name.parse().map_err(|e: densgraph::Error| bad(cfg, "problem", "fixture", e.to_string()))?;
        if cfg.has_section("density") {
            return Err(CliError::config(0, "a fixture fixes its density; remove the [density] section"));
        }
        let m = nodes(cfg, 1, 33)?[0];
        let fx = fixtures::build_with(name, m, &params)?;
        let exact_error = fx.exact_error();
        return Ok(Problem {
            surface: fx.surface,
            density: fx.density,
            lambda: fx.lambda,
            report: fx.report,
            exact_error,
            profile_residual: None,
        });
    }
    let dim = intrinsic_dim(cfg)?;
    let density = density_from(cfg, dim + 1)?;
    let lambda = cfg.require_float("problem", "lambda")?;
    let mode = cfg.require_text("problem", "mode")?;
    match mode {
        "vertical" => {
            let d = bounds(cfg, "domain", 2 * dim)?;
            let m = nodes(cfg, dim, 33)?;
            let grid = if dim == 1 { Grid::interval(d[0], d[1], m[0])? } else { Grid::rectangle([d[0], d[1]], [d[2], d[3]], [m[0], m[1]])? };
            let source = cfg.require_text("problem", "boundary")?;
            let boundary = boundary_fn(cfg, source, &grid, base_dir)?;
            let g0 = if source.starts_with("file:") {
                VerticalGraph::from_fn(grid.clone(), |q| boundary(q))?
            } else {
                harmonic_extension(&grid, &*boundary)?
            };
            let (graph, report) = solve_vertical(&density, lambda, &*boundary, &g0, &params)?;
            let exact_error = source.strip_prefix("fixture:").and_then(|n| n.parse::<FixtureName>().ok()).and_then(|n| n.exact()).map(|f| {
                (0..grid.len()).map(|k| (graph.heights[k] - f(&grid.coord(k)[..dim])).abs()).fold(0.0, f64::max)
            });
            Ok(Problem { surface: Surface::Vertical(graph), density, lambda, report: Some(report), exact_error, profile_residual: None })
        }
        "radial" => {
            let m = nodes(cfg, dim, 33)?;
            let t = bounds(cfg, "theta", 2)?;
            let grid = if dim == 1 {
                Grid::interval(t[0], t[1], m[0])?
            } else {
                let p = bounds(cfg, "phi", 2)?;
                Grid::rectangle([t[0], t[1]], [p[0], p[1]], [m[0], m[1]])?
            };
            let source = cfg.require_text("problem", "boundary")?;
            let err = |m: &str| bad(cfg, "problem", "boundary", m);
            let (r0, r1) = match source.split_once(':') {
                Some(("constant", v)) => {
                    let r: f64 = v.trim().parse().map_err(|_| err("bad radius"))?;
                    (r, r)
                }
                Some(("pair", v)) => {
                    let (a, b) = v.split_once(',').ok_or_else(|| err("pair takes two radii"))?;
                    (a.trim().parse().map_err(|_| err("bad radius"))?, b.trim().parse().map_err(|_| err("bad radius"))?)
                }
                _ => return Err(err("radial boundary is constant:r or pair:r0,r1")),
            };
            let (t0, t1) = (t[0], t[1]);
            let g0 = RadialGraph::from_fn(grid, |c| r0 + (r1 - r0) * (c[0] - t0) / (t1 - t0))?;
            let (graph, report) = solve_radial_axisymmetric(&density, lambda, (r0, r1), &g0, &params)?;
            Ok(Problem { surface: Surface::Radial(graph), density, lambda, report: Some(report), exact_error: None, profile_residual: None })
        }
        "rotational" => {
            let apex = cfg.require_float("problem", "apex")?;
            let radius = cfg.require_float("problem", "radius")?;
            let steps = cfg.require_int("problem", "steps")? as usize;
            if steps == 0 || radius <= 0.0 {
                return Err(CliError::config(0, "problem: steps and radius must be positive"));
            }
            let profile = solve_rotational_vertical(&density, lambda, apex, radius, steps)?;
            let half = if dim == 1 { radius } else { radius * FRAC_1_SQRT_2 };
            let m = nodes(cfg, dim, 2 * steps.min(200) + 1)?;
            let grid = if dim == 1 { Grid::interval(-half, half, m[0])? } else { Grid::rectangle([-half, half], [-half, half], [m[0], m[1]])? };
            let graph = profile.to_vertical_graph(grid)?;
            let profile_residual = Some(profile.residual_sup(&density)?);
            Ok(Problem { surface: Surface::Vertical(graph), density, lambda, report: None, exact_error: None, profile_residual })
        }
        other => Err(bad(cfg, "problem", "mode", format!("unknown mode {other:?}; expected vertical, radial or rotational"))),
    }
}

/// Output directory and formats from the `[output]` section, with a flag
/// override for the directory.
pub fn output_target(cfg: &Config, flag: Option<&Path>) -> CliResult<(PathBuf, Formats)> {
    let dir = match flag {
        Some(p) => p.to_path_buf(),
        None => PathBuf::from(cfg.text("output", "directory").unwrap_or(".")),
    };
    let formats = match cfg.texts("output", "formats") {
        Some(list) => Formats::parse(&list).map_err(|m| bad(cfg, "output", "formats", m))?,
        None => Formats::all(),
    };
    std::fs::create_dir_all(&dir)?;
    Ok((dir, formats))
}

#[derive(Serialize)]
struct SolveSummary<'a> {
    kind: &'static str,
    density: &'static str,
    lambda: f64,
    nodes: usize,
    report: Option<&'a SolveReport>,
    exact_error: Option<f64>,
    profile_residual: Option<f64>,
    min_value: f64,
    max_value: f64,
}

fn summary(p: &Problem) -> SolveSummary<'_> {
    let v = p.surface.values();
    SolveSummary {
        kind: match p.surface {
            Surface::Vertical(_) => "vertical",
            Surface::Radial(_) => "radial",
        },
        density: p.density.profile().name(),
        lambda: p.lambda,
        nodes: v.len(),
        report: p.report.as_ref(),
        exact_error: p.exact_error,
        profile_residual: p.profile_residual,
        min_value: v.iter().cloned().fold(f64::INFINITY, f64::min),
        max_value: v.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    }
}

pub fn cmd_solve(cfg: &Config, out: Option<&Path>, base_dir: &Path) -> CliResult<String> {
    let (dir, formats) = output_target(cfg, out)?;
    let problem = match build_problem(cfg, base_dir) {
        Err(CliError::Core(densgraph::Error::NonConvergence(report))) => {
            if formats.json {
                write_atomic(&dir.join("solve_report.json"), &serde_json::to_string_pretty(&*report)?)?;
            }
            return Err(CliError::Core(densgraph::Error::NonConvergence(report)));
        }
        other => other?,
    };
    if formats.mesh {
        write_atomic(&dir.join("graph.mesh"), &mesh_to_text(&problem.surface.triangulate()?))?;
    }
    if formats.csv {
        write_atomic(&dir.join("field.csv"), &field_to_csv(&problem.surface.geometry(&problem.density)?))?;
    }
    let json = serde_json::to_string_pretty(&summary(&problem))?;
    if formats.json {
        write_atomic(&dir.join("solve_report.json"), &json)?;
    }
    Ok(json)
}

/// Spectrum report plus the verdict-dependent exit status.
pub fn cmd_stability(cfg: &Config, out: Option<&Path>, base_dir: &Path) -> CliResult<(String, i32)> {
    let (dir, formats) = output_target(cfg, out)?;
    let problem = build_problem(cfg, base_dir)?;
    let (report, assembly) = stability_of(&problem, cfg)?;
    let json = serde_json::to_string_pretty(&report)?;
    if formats.json {
        write_atomic(&dir.join("spectrum_report.json"), &json)?;
    }
    if formats.csv {
        write_atomic(&dir.join("eigenvector.csv"), &eigenvector_csv(&report, &assembly))?;
    }
    Ok((json, verdict_code(&report.verdict)))
}

pub fn verdict_code(v: &Verdict) -> i32 {
    match v {
        Verdict::Stable => 0,
        Verdict::Unstable => 3,
        Verdict::Inconclusive { .. } => 4,
    }
}

fn stability_of(problem: &Problem, cfg: &Config) -> CliResult<(SpectrumReport, densgraph::spectrum::OperatorAssembly)> {
    let mesh = problem.surface.triangulate()?;
    let field = problem.surface.geometry(&problem.density)?;
    let assembly = assemble(&mesh, &field, &problem.density)?;
    let tol = cfg.float("spectrum", "tol").unwrap_or_else(|| default_tolerance(&assembly));
    let report = check_strong_stability(&assembly, tol, &eigen_params(cfg))?;
    Ok((report, assembly))
}

/// Parses a comma separated fixture list; the empty string selects nothing.
pub fn parse_fixture_list(list: &str) -> CliResult<Vec<FixtureName>> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|e: densgraph::Error| CliError::Usage(e.to_string())))
        .collect()
}

pub fn cmd_identities(selector: Option<&str>, out: Option<&Path>) -> CliResult<String> {
    let names = match selector {
        Some(list) => parse_fixture_list(list)?,
        None => BATTERY.to_vec(),
    };
    let reports: Vec<IdentityReport> = run_battery(&names)?;
    let json = serde_json::to_string_pretty(&reports)?;
    if let Some(path) = out {
        write_atomic(path, &json)?;
    }
    Ok(json)
}

pub fn cmd_calibrate(cfg: &Config, out: Option<&Path>, base_dir: &Path) -> CliResult<String> {
    let (dir, formats) = output_target(cfg, out)?;
    let (base, density, lambda) = match cfg.text("calibration", "base") {
        Some(name) => {
            let name: FixtureName = name.parse().map_err(|e: densgraph::Error| bad(cfg, "calibration", "base", e.to_string()))?;
            let steps = cfg.int("calibration", "steps").unwrap_or(400) as usize;
            fixtures::calibration_base(name, steps)?
        }
        None => {
            let p = build_problem(cfg, base_dir)?;
            match p.surface {
                Surface::Vertical(g) => (g, p.density, p.lambda),
                Surface::Radial(_) => return Err(CliError::config(0, "calibration needs a vertical graph")),
            }
        }
    };
    let trials = cfg.int("calibration", "trials").unwrap_or(50) as usize;
    let samples = cfg.int("calibration", "samples").unwrap_or(100) as usize;
    let seed = cfg.int("calibration", "seed").unwrap_or(0);
    let report = run_calibration(&base, &density, lambda, trials, samples, seed)?;
    let csv = trials_csv(&report.trials);
    if formats.csv {
        write_atomic(&dir.join("trials.csv"), &csv)?;
    }
    if formats.json {
        write_atomic(&dir.join("calibration_report.json"), &serde_json::to_string_pretty(&report)?)?;
    }
    Ok(csv)
}

/// Sweep values from `start:stop:count` or an explicit list.
pub fn parse_range(source: &str) -> CliResult<Vec<f64>> {
    let bad = || CliError::Usage(format!("range {source:?} is neither `start:stop:count` nor a list of numbers"));
    let source = source.trim();
    if source.is_empty() {
        return Ok(Vec::new());
    }
    if let Some((a, rest)) = source.split_once(':') {
        let (b, c) = rest.split_once(':').ok_or_else(bad)?;
        let a: f64 = a.trim().parse().map_err(|_| bad())?;
        let b: f64 = b.trim().parse().map_err(|_| bad())?;
        let c: usize = c.trim().parse().map_err(|_| bad())?;
        if !(a.is_finite() && b.is_finite()) {
            return Err(bad());
        }
        return Ok(match c {
            0 => Vec::new(),
            1 => vec![a],
            _ => (0..c).map(|i| a + (b - a) * i as f64 / (c - 1) as f64).collect(),
        });
    }
    source.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(bad))
        .collect()
}

fn sweep_config(cfg: &Config, parameter: &str, value: f64) -> CliResult<Config> {
    let mut c = cfg.clone();
    match parameter {
        "alpha" => match cfg.text("problem", "fixture") {
            Some(f) if f.starts_with("singular_minimal") => c.set(&format!("problem.fixture=singular_minimal:{value}"))?,
            _ => c.set(&format!("density.alpha={value}"))?,
        },
        "p" => c.set(&format!("density.p={value}"))?,
        "lambda" => c.set(&format!("problem.lambda={value}"))?,
        "nodes" => {
            if value < 0.0 || value.fract() != 0.0 {
                return Err(CliError::Usage(format!("node count {value} is not an integer")));
            }
            c.set(&format!("problem.nodes={}", value as usize))?
        }
        other => return Err(CliError::Usage(format!("unknown sweep parameter {other:?}; expected alpha, p, lambda or nodes"))),
    }
    Ok(c)
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt17).unwrap_or_default()
}

pub fn cmd_sweep(
    cfg: &Config,
    parameter: Option<&str>,
    range: Option<&str>,
    out: Option<&Path>,
    base_dir: &Path,
    pool: &rayon::ThreadPool,
) -> CliResult<String> {
    let parameter = match parameter {
        Some(p) => p.to_string(),
        None => cfg.require_text("sweep", "parameter")?.to_string(),
    };
    let values = match range {
        Some(r) => parse_range(r)?,
        None => parse_range(cfg.require_text("sweep", "range")?).map_err(|e| bad(cfg, "sweep", "range", e.to_string()))?,
    };
    let configs = values.iter().map(|&v| sweep_config(cfg, &parameter, v)).collect::<CliResult<Vec<_>>>()?;
    let rows: Vec<CliResult<String>> = pool.install(|| {
        configs
            .par_iter()
            .zip(values.par_iter())
            .map(|(c, &v)| {
                let p = build_problem(c, base_dir)?;
                let (report, _) = stability_of(&p, c)?;
                let verdict = match report.verdict {
                    Verdict::Stable => "Stable",
                    Verdict::Unstable => "Unstable",
                    Verdict::Inconclusive { .. } => "Inconclusive",
                };
                Ok(format!(
                    "{},{},{},{},{}\n",
                    fmt17(v),
                    fmt17(report.mu_min),
                    opt(p.report.as_ref().map(|r| r.final_residual)),
                    opt(p.exact_error),
                    verdict
                ))
            })
            .collect()
    });
    let mut csv = format!("{parameter},mu_min,final_residual,exact_error,verdict\n");
    for row in rows {
        csv.push_str(&row?);
    }
    if let Some(path) = out {
        write_atomic(path, &csv)?;
    }
    Ok(csv)
}

pub fn cmd_fixtures() -> String {
    let mut out = String::from("name,n,density,lambda\n");
    for name in FixtureName::all() {
        let density = name.density().map(|d| d.profile().name()).unwrap_or("invalid");
        out.push_str(&format!("{name},{},{density},{}\n", name.dim(), name.lambda()));
    }
    out
}
