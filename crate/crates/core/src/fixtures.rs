//! Built-in stationary graphs with known closed forms or known stability
//! behavior, sampled at a requested resolution.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::density::Density;
use crate::error::{Error, Result};
use crate::solver::{
    harmonic_extension, solve_radial_axisymmetric, solve_rotational_vertical, solve_vertical, NewtonParams,
    RotationalProfile, SolveReport,
};
use crate::surface::{Grid, RadialGraph, Surface, VerticalGraph};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FixtureName {
    /// `f ≡ 0` over `[-1, 1]²`, constant density.
    Plane,
    /// Unit sphere patch, constant density, `λ = -2`.
    Sphere,
    /// `f = -ln cos x` over `[-1, 1]`, translator density.
    GrimReaper,
    /// `f = cosh x` over `[-1, 1]`, singular minimal density with `α = 1`.
    Catenary,
    /// Rotational translator over `[-1, 1]²`.
    Bowl,
    /// Sphere of radius 2 with the shrinker density.
    ShrinkerSphere,
    /// Circular arc of curvature 1 over `[-1/2, 1/2]`, constant density, `λ = 1`.
    CmcArc,
    /// Solved expander graph over `[-1, 1]²` with rotational boundary data.
    ExpanderGraph,
    /// Rotational expander written as a radial graph.
    ExpanderRadial,
    /// Singular minimal graph over `[-1/2, 1/2]` with heights 1 and 3/2 at the ends.
    SingularMinimal(f64),
    /// Flat graph over the centered square of side 20, shrinker density.
    ShrinkerPlane,
}

/// The fixtures of the identity battery.
pub const BATTERY: [FixtureName; 6] = [
    FixtureName::Plane,
    FixtureName::Sphere,
    FixtureName::GrimReaper,
    FixtureName::Catenary,
    FixtureName::Bowl,
    FixtureName::ShrinkerSphere,
];

impl fmt::Display for FixtureName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FixtureName::Plane => f.write_str("plane"),
            FixtureName::Sphere => f.write_str("sphere"),
            FixtureName::GrimReaper => f.write_str("grim_reaper"),
            FixtureName::Catenary => f.write_str("catenary"),
            FixtureName::Bowl => f.write_str("bowl"),
            FixtureName::ShrinkerSphere => f.write_str("shrinker_sphere"),
            FixtureName::CmcArc => f.write_str("cmc_arc"),
            FixtureName::ExpanderGraph => f.write_str("expander_graph"),
            FixtureName::ExpanderRadial => f.write_str("expander_radial"),
            FixtureName::SingularMinimal(a) => write!(f, "singular_minimal:{a}"),
            FixtureName::ShrinkerPlane => f.write_str("shrinker_plane"),
        }
    }
}

impl FromStr for FixtureName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "plane" => FixtureName::Plane,
            "sphere" => FixtureName::Sphere,
            "grim_reaper" => FixtureName::GrimReaper,
            "catenary" => FixtureName::Catenary,
            "bowl" => FixtureName::Bowl,
            "shrinker_sphere" => FixtureName::ShrinkerSphere,
            "cmc_arc" => FixtureName::CmcArc,
            "expander_graph" => FixtureName::ExpanderGraph,
            "expander_radial" => FixtureName::ExpanderRadial,
            "shrinker_plane" => FixtureName::ShrinkerPlane,
            other => match other.strip_prefix("singular_minimal:") {
                Some(a) => FixtureName::SingularMinimal(
                    a.parse().map_err(|_| Error::Invalid(format!("bad singular minimal parameter {a:?}")))?,
                ),
                None => return Err(Error::Invalid(format!("unknown fixture {s:?}"))),
            },
        })
    }
}

impl FixtureName {
    pub fn all() -> Vec<FixtureName> {
        let mut v = BATTERY.to_vec();
        v.extend([
            FixtureName::CmcArc,
            FixtureName::ExpanderGraph,
            FixtureName::ExpanderRadial,
            FixtureName::SingularMinimal(-1.0),
            FixtureName::ShrinkerPlane,
        ]);
        v
    }

    /// Intrinsic dimension of the fixture.
    pub fn dim(self) -> usize {
        match self {
            FixtureName::GrimReaper | FixtureName::Catenary | FixtureName::CmcArc | FixtureName::SingularMinimal(_) => 1,
            _ => 2,
        }
    }

    pub fn density(self) -> Result<Density> {
        let amb = self.dim() + 1;
        Ok(match self {
            FixtureName::Plane | FixtureName::Sphere | FixtureName::CmcArc => Density::constant(amb),
            FixtureName::GrimReaper | FixtureName::Bowl => Density::translator(amb),
            FixtureName::Catenary => Density::singular_minimal(1.0, amb)?,
            FixtureName::SingularMinimal(a) => Density::singular_minimal(a, amb)?,
            FixtureName::ShrinkerSphere | FixtureName::ShrinkerPlane => Density::shrinker(amb),
            FixtureName::ExpanderGraph | FixtureName::ExpanderRadial => Density::expander(amb),
        })
    }

    pub fn lambda(self) -> f64 {
        match self {
            FixtureName::Sphere => -2.0,
            FixtureName::CmcArc => 1.0,
            _ => 0.0,
        }
    }

    /// Closed-form graph function, when one is known.
    pub fn exact(self) -> Option<fn(&[f64]) -> f64> {
        match self {
            FixtureName::Plane | FixtureName::ShrinkerPlane => Some(|_| 0.0),
            FixtureName::Sphere => Some(|_| 1.0),
            FixtureName::ShrinkerSphere => Some(|_| 2.0),
            FixtureName::GrimReaper => Some(|q| -q[0].cos().ln()),
            FixtureName::Catenary => Some(|q| q[0].cosh()),
            FixtureName::CmcArc => Some(|q| 0.75f64.sqrt() - (1.0 - q[0] * q[0]).sqrt()),
            _ => None,
        }
    }
}

/// A sampled stationary graph together with its density and `λ`.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: FixtureName,
    pub surface: Surface,
    pub density: Density,
    pub lambda: f64,
    /// Newton report when the graph came out of a solve.
    pub report: Option<SolveReport>,
}

impl Fixture {
    /// Sup over all nodes of the distance to the closed form, if known.
    pub fn exact_error(&self) -> Option<f64> {
        let f = self.name.exact()?;
        let grid = self.surface.grid();
        let vals = self.surface.values();
        Some((0..grid.len()).map(|k| (vals[k] - f(&grid.coord(k)[..grid.dim()])).abs()).fold(0.0, f64::max))
    }
}

const PROFILE_STEPS: usize = 4000;

fn expander_profile(amb: usize, radius: f64, steps: usize) -> Result<RotationalProfile> {
    solve_rotational_vertical(&Density::expander(amb), 0.0, 1.0, radius, steps)
}

fn bowl_profile() -> Result<RotationalProfile> {
    solve_rotational_vertical(&Density::translator(3), 0.0, 0.0, 1.5, PROFILE_STEPS)
}

/// Builds a fixture with `nodes` nodes per chart axis.
pub fn build(name: FixtureName, nodes: usize) -> Result<Fixture> {
    build_with(name, nodes, &NewtonParams::default())
}

pub fn build_with(name: FixtureName, nodes: usize, params: &NewtonParams) -> Result<Fixture> {
    let density = name.density()?;
    let lambda = name.lambda();
    let square = |a: f64| Grid::rectangle([-a, a], [-a, a], [nodes, nodes]);
    let sphere_chart = || Grid::rectangle([PI / 4.0, 3.0 * PI / 4.0], [0.0, PI / 2.0], [nodes, nodes]);
    let vertical = |grid: Grid, boundary: &dyn Fn(&[f64]) -> f64, guess: Option<VerticalGraph>| -> Result<(Surface, Option<SolveReport>)> {
        let g0 = match guess {
            Some(g) => g,
            None => harmonic_extension(&grid, boundary)?,
        };
        let (g, report) = solve_vertical(&density, lambda, boundary, &g0, params)?;
        Ok((Surface::Vertical(g), Some(report)))
    };
    let (surface, report) = match name {
        FixtureName::Plane => (Surface::Vertical(VerticalGraph::from_fn(square(1.0)?, |_| 0.0)?), None),
        FixtureName::ShrinkerPlane => (Surface::Vertical(VerticalGraph::from_fn(square(10.0)?, |_| 0.0)?), None),
        FixtureName::Sphere => (Surface::Radial(RadialGraph::from_fn(sphere_chart()?, |_| 1.0)?), None),
        FixtureName::ShrinkerSphere => (Surface::Radial(RadialGraph::from_fn(sphere_chart()?, |_| 2.0)?), None),
        FixtureName::GrimReaper | FixtureName::Catenary => {
            let exact = name.exact().unwrap();
            vertical(Grid::interval(-1.0, 1.0, nodes)?, &exact, None)?
        }
        FixtureName::CmcArc => {
            let grid = Grid::interval(-0.5, 0.5, nodes)?;
            let guess = VerticalGraph::from_fn(grid.clone(), |_| 0.0)?;
            vertical(grid, &|_| 0.0, Some(guess))?
        }
        FixtureName::SingularMinimal(_) => {
            let grid = Grid::interval(-0.5, 0.5, nodes)?;
            vertical(grid, &|q| 1.25 + 0.5 * q[0], None)?
        }
        FixtureName::Bowl => {
            let profile = bowl_profile()?;
            let grid = square(1.0)?;
            let b = |q: &[f64]| profile.eval(q[0].hypot(q[1])).unwrap_or(f64::NAN);
            vertical(grid, &b, None)?
        }
        FixtureName::ExpanderGraph => {
            let profile = expander_profile(3, 1.5, PROFILE_STEPS)?;
            let grid = square(1.0)?;
            let b = |q: &[f64]| profile.eval(q[0].hypot(q[1])).unwrap_or(f64::NAN);
            let guess = profile.to_vertical_graph(grid.clone())?;
            vertical(grid, &b, Some(guess))?
        }
        FixtureName::ExpanderRadial => {
            let profile = expander_profile(3, 1.5, PROFILE_STEPS)?;
            let polar = |s: f64| -> Result<(f64, f64)> {
                let f = profile.eval(s)?;
                Ok((s.atan2(f), s.hypot(f)))
            };
            let (t0, r0) = polar(0.3)?;
            let (t1, r1) = polar(1.2)?;
            let grid = Grid::rectangle([t0, t1], [0.0, PI / 2.0], [nodes, nodes])?;
            let g0 = RadialGraph::from_fn(grid, |c| r0 + (r1 - r0) * (c[0] - t0) / (t1 - t0))?;
            let (g, report) = solve_radial_axisymmetric(&density, lambda, (r0, r1), &g0, params)?;
            (Surface::Radial(g), Some(report))
        }
    };
    Ok(Fixture { name, surface, density, lambda, report })
}

/// Rotational profile through a regular apex, for calibration bases.
pub fn calibration_profile(name: FixtureName, steps: usize) -> Result<RotationalProfile> {
    match name {
        FixtureName::GrimReaper => solve_rotational_vertical(&Density::translator(2), 0.0, 0.0, 1.0, steps),
        FixtureName::CmcArc => solve_rotational_vertical(&Density::constant(2), 1.0, 0.0, 0.5, steps),
        FixtureName::ExpanderGraph => expander_profile(2, 1.0, steps),
        other => Err(Error::Invalid(format!("no calibration profile for fixture {other}"))),
    }
}

/// Symmetric one-dimensional calibration base sampled from
/// [`calibration_profile`] on `2·steps + 1` nodes.
pub fn calibration_base(name: FixtureName, steps: usize) -> Result<(VerticalGraph, Density, f64)> {
    let profile = calibration_profile(name, steps)?;
    let r = profile.radius();
    let graph = profile.to_vertical_graph(Grid::interval(-r, r, 2 * steps + 1)?)?;
    let (density, lambda) = match name {
        FixtureName::GrimReaper => (Density::translator(2), 0.0),
        FixtureName::CmcArc => (Density::constant(2), 1.0),
        _ => (Density::expander(2), 0.0),
    };
    Ok((graph, density, lambda))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for name in FixtureName::all() {
            assert_eq!(name.to_string().parse::<FixtureName>().unwrap(), name);
        }
        assert!("torus".parse::<FixtureName>().is_err());
    }

    #[test]
    fn every_fixture_builds_at_coarse_resolution() {
        for name in FixtureName::all() {
            let f = build(name, 17).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(f.surface.dim(), name.dim());
            if let Some(r) = &f.report {
                assert!(r.converged);
            }
        }
    }
}
