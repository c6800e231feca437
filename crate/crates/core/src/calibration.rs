//! Calibration of stationary vertical graphs by the field `X = e^φ N(q)`,
//! extended off the graph by vertical translation, and the weighted area
//! comparison against competitors enclosing the same weighted volume.

use serde::{Deserialize, Serialize};

use crate::density::Density;
use crate::error::{Error, Result};
use crate::identities::{sampled_weighted_area, IdentityReport};
use crate::rng::{self, SplitMix64};
use crate::surface::{io::fmt17, trapezoid_weights, weighted_volume_between, Grid, Surface, VerticalGraph};
use crate::vec3::{self, Vec3};

/// Nodes per axis in the local interpolation stencil.
pub const STENCIL: usize = 8;
/// Largest allowed `sup |H_φ - λ|` of the interpolated base.
pub const STATIONARITY_TOL: f64 = 1e-8;
/// Pass threshold for the divergence discrepancy.
pub const DIVERGENCE_TOL: f64 = 1e-5;
/// Target for `|V_φ(competitor) - V_φ(base)|`.
pub const VOLUME_TOL: f64 = 1e-12;

/// Lagrange basis on the nodes `0, 1, …, STENCIL-1` with first and second
/// derivatives, at local coordinate `x`.
fn lagrange_basis(x: f64) -> [[f64; STENCIL]; 3] {
    let mut out = [[0.0; STENCIL]; 3];
    for j in 0..STENCIL {
        let xj = j as f64;
        let den: f64 = (0..STENCIL).filter(|&k| k != j).map(|k| xj - k as f64).product();
        let others: Vec<f64> = (0..STENCIL).filter(|&k| k != j).map(|k| x - k as f64).collect();
        let m = others.len();
        out[0][j] = others.iter().product::<f64>() / den;
        let mut d1 = 0.0;
        let mut d2 = 0.0;
        for a in 0..m {
            d1 += (0..m).filter(|&k| k != a).map(|k| others[k]).product::<f64>();
            for b in 0..m {
                if b != a {
                    d2 += (0..m).filter(|&k| k != a && k != b).map(|k| others[k]).product::<f64>();
                }
            }
        }
        out[1][j] = d1 / den;
        out[2][j] = d2 / den;
    }
    out
}

/// Second-order jet of the graph function at a point.
#[derive(Clone, Copy, Debug)]
pub struct GraphJet {
    pub f: f64,
    pub df: [f64; 2],
    /// `[f_11, f_12, f_22]`.
    pub d2f: [f64; 3],
}

impl GraphJet {
    pub fn w(&self) -> f64 {
        (1.0 + self.df[0] * self.df[0] + self.df[1] * self.df[1]).sqrt()
    }

    /// Upward unit normal `(-Df, 1)/W` in ambient dimension `dim + 1`.
    pub fn normal(&self, dim: usize) -> Vec3 {
        let w = self.w();
        let mut n = vec3::ZERO;
        for a in 0..dim {
            n[a] = -self.df[a] / w;
        }
        n[dim] = 1.0 / w;
        n
    }

    /// `div(Df/W)`, which is `nH` for the upward normal.
    pub fn nh(&self, dim: usize) -> f64 {
        let [p, q] = self.df;
        let w = self.w();
        if dim == 1 {
            self.d2f[0] / w.powi(3)
        } else {
            ((1.0 + q * q) * self.d2f[0] - 2.0 * p * q * self.d2f[1] + (1.0 + p * p) * self.d2f[2]) / w.powi(3)
        }
    }
}

/// Piecewise tensor-product interpolant of degree `STENCIL - 1` of a
/// vertical graph. The stencil can be fixed so that nearby evaluations use
/// one polynomial.
pub struct GraphInterpolant<'a> {
    base: &'a VerticalGraph,
}

impl<'a> GraphInterpolant<'a> {
    pub fn new(base: &'a VerticalGraph) -> Result<Self> {
        if base.grid.counts()[..base.dim()].iter().any(|&m| m < STENCIL) {
            return Err(Error::Grid(format!("interpolation needs at least {STENCIL} nodes per axis")));
        }
        Ok(GraphInterpolant { base })
    }

    fn check_domain(&self, q: &[f64]) -> Result<()> {
        let g = &self.base.grid;
        for a in 0..g.dim() {
            if !(q[a] >= g.lo()[a] && q[a] <= g.hi()[a]) {
                return Err(Error::domain(q, "horizontal projection outside the base domain"));
            }
        }
        Ok(())
    }

    /// First node index per axis of the stencil used around `q`.
    pub fn stencil(&self, q: &[f64]) -> Result<[usize; 2]> {
        self.check_domain(q)?;
        let g = &self.base.grid;
        let mut start = [0; 2];
        for a in 0..g.dim() {
            let m = g.counts()[a];
            let cell = (((q[a] - g.lo()[a]) / g.spacing(a)).floor() as isize).clamp(0, m as isize - 2);
            start[a] = (cell - (STENCIL as isize / 2 - 1)).clamp(0, (m - STENCIL) as isize) as usize;
        }
        Ok(start)
    }

    /// Jet at `q` using the stencil starting at `start`.
    pub fn jet_with(&self, q: &[f64], start: [usize; 2]) -> Result<GraphJet> {
        self.check_domain(q)?;
        let g = &self.base.grid;
        let dim = g.dim();
        let h = [g.spacing(0), if dim == 2 { g.spacing(1) } else { 1.0 }];
        let basis: Vec<[[f64; STENCIL]; 3]> =
            (0..dim).map(|a| lagrange_basis((q[a] - g.lo()[a]) / h[a] - start[a] as f64)).collect();
        let fk = &self.base.heights;
        if dim == 1 {
            let mut d = [0.0; 3];
            for j in 0..STENCIL {
                let v = fk[start[0] + j];
                for (o, dv) in d.iter_mut().enumerate() {
                    *dv += basis[0][o][j] * v;
                }
            }
            return Ok(GraphJet { f: d[0], df: [d[1] / h[0], 0.0], d2f: [d[2] / (h[0] * h[0]), 0.0, 0.0] });
        }
        // (order in x, order in y)
        let orders = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)];
        let mut d = [0.0; 6];
        for jy in 0..STENCIL {
            for jx in 0..STENCIL {
                let v = fk[g.index(start[0] + jx, start[1] + jy)];
                for (slot, &(ox, oy)) in orders.iter().enumerate() {
                    d[slot] += basis[0][ox][jx] * basis[1][oy][jy] * v;
                }
            }
        }
        Ok(GraphJet {
            f: d[0],
            df: [d[1] / h[0], d[2] / h[1]],
            d2f: [d[3] / (h[0] * h[0]), d[4] / (h[0] * h[1]), d[5] / (h[1] * h[1])],
        })
    }

    pub fn jet(&self, q: &[f64]) -> Result<GraphJet> {
        self.jet_with(q, self.stencil(q)?)
    }
}

/// Sup over the base nodes of `|H_φ - λ|` for the interpolated graph.
pub fn interpolated_stationarity(base: &VerticalGraph, density: &Density, lambda: f64) -> Result<f64> {
    let interp = GraphInterpolant::new(base)?;
    let dim = base.dim();
    let mut worst: f64 = 0.0;
    for k in 0..base.grid.len() {
        let q = base.grid.coord(k);
        let jet = interp.jet(&q[..dim])?;
        let x = lift(&q[..dim], jet.f);
        let n = jet.normal(dim);
        let hphi = density.weighted_mean_curvature(&x[..dim + 1], &n, jet.nh(dim))?;
        worst = worst.max((hphi - lambda).abs());
    }
    Ok(worst)
}

fn lift(q: &[f64], t: f64) -> Vec3 {
    let mut x = vec3::ZERO;
    x[..q.len()].copy_from_slice(q);
    x[q.len()] = t;
    x
}

/// The calibration field of a base graph.
pub struct Calibration<'a> {
    base: &'a VerticalGraph,
    density: &'a Density,
    interp: GraphInterpolant<'a>,
}

impl<'a> Calibration<'a> {
    pub fn new(base: &'a VerticalGraph, density: &'a Density) -> Result<Self> {
        Error::check_len(base.dim() + 1, density.ambient_dim())?;
        Ok(Calibration { base, density, interp: GraphInterpolant::new(base)? })
    }

    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn field_with(&self, x: &[f64], start: [usize; 2]) -> Result<Vec3> {
        let dim = self.dim();
        let jet = self.interp.jet_with(&x[..dim], start)?;
        Ok(vec3::scale(&jet.normal(dim), self.density.weight(&x[..dim + 1])?))
    }

    /// `X(x) = e^{φ(x)} N(q)` with `q` the horizontal projection of `x`.
    pub fn field(&self, x: &[f64]) -> Result<Vec3> {
        Error::check_len(self.dim() + 1, x.len())?;
        self.field_with(x, self.interp.stencil(&x[..self.dim()])?)
    }

    /// Centered difference divergence of `X` with step `delta`, every
    /// evaluation sharing the stencil chosen at `x`.
    pub fn divergence_fd(&self, x: &[f64], delta: f64) -> Result<f64> {
        let amb = self.dim() + 1;
        Error::check_len(amb, x.len())?;
        let start = self.interp.stencil(&x[..amb - 1])?;
        let mut div = 0.0;
        for i in 0..amb {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[i] += delta;
            xm[i] -= delta;
            div += (self.field_with(&xp, start)?[i] - self.field_with(&xm, start)?[i]) / (2.0 * delta);
        }
        Ok(div)
    }

    /// `e^{φ(x)}(⟨∇φ(x) - ∇φ(q, f(q)), N(q)⟩ - λ)`.
    pub fn divergence_closed(&self, x: &[f64], lambda: f64) -> Result<f64> {
        let dim = self.dim();
        Error::check_len(dim + 1, x.len())?;
        let jet = self.interp.jet(&x[..dim])?;
        let n = jet.normal(dim);
        let on_graph = lift(&x[..dim], jet.f);
        let diff = vec3::sub(&self.density.grad_phi(x)?, &self.density.grad_phi(&on_graph[..dim + 1])?);
        Ok(self.density.weight(x)? * (vec3::dot(&diff, &n) - lambda))
    }
}

/// Evaluates the calibration field of `base` at `x`.
pub fn calibration_field(x: &[f64], base: &VerticalGraph, density: &Density) -> Result<Vec3> {
    Calibration::new(base, density)?.field(x)
}

/// Horizontal extent of the base domain.
fn domain_scale(grid: &Grid) -> f64 {
    (0..grid.dim()).map(|a| grid.hi()[a] - grid.lo()[a]).fold(0.0, f64::max)
}

/// Random sample points over the base: horizontal position in the central
/// 90% of the domain, height within half a unit of the graph.
pub fn divergence_samples(base: &VerticalGraph, count: usize, rng: &mut SplitMix64) -> Result<Vec<Vec<f64>>> {
    let interp = GraphInterpolant::new(base)?;
    let g = &base.grid;
    let dim = g.dim();
    (0..count)
        .map(|_| {
            let mut x: Vec<f64> = (0..dim)
                .map(|a| {
                    let margin = 0.05 * (g.hi()[a] - g.lo()[a]);
                    rng::uniform(rng, g.lo()[a] + margin, g.hi()[a] - margin)
                })
                .collect();
            let f = interp.jet(&x)?.f;
            x.push(f + rng::uniform(rng, -0.5, 0.5));
            Ok(x)
        })
        .collect()
}

/// Compares the numerical divergence of the calibration field with its
/// closed form at each sample.
pub fn divergence_check(
    base: &VerticalGraph,
    density: &Density,
    lambda: f64,
    samples: &[Vec<f64>],
) -> Result<IdentityReport> {
    let spread = interpolated_stationarity(base, density, lambda)?;
    if spread > STATIONARITY_TOL {
        return Err(Error::Stationarity { spread });
    }
    let cal = Calibration::new(base, density)?;
    let delta = 1e-5 * domain_scale(&base.grid);
    let mut gap: f64 = 0.0;
    for x in samples {
        gap = gap.max((cal.divergence_fd(x, delta)? - cal.divergence_closed(x, lambda)?).abs());
    }
    Ok(IdentityReport {
        name: "divergence".into(),
        fixture: String::new(),
        sup_residual: gap,
        residuals: vec![gap],
        grid_orders: Vec::new(),
        pass: gap <= DIVERGENCE_TOL,
        dropped_term: None,
    })
}

/// A graph over the base domain with the base's boundary values.
#[derive(Clone, Debug)]
pub struct Competitor {
    pub graph: VerticalGraph,
    /// Signed weighted volume enclosed between base and competitor.
    pub volume_gap: f64,
    /// Multiple of the perturbation added to the base.
    pub amplitude: f64,
}

/// Search bounds for [`make_competitor`].
#[derive(Clone, Copy, Debug)]
pub struct CompetitorSearch {
    pub s_max: f64,
    pub expansions: usize,
    /// Roots closer to zero than this fraction of `s_max` are rejected.
    pub min_fraction: f64,
    pub max_bisections: usize,
}

impl Default for CompetitorSearch {
    fn default() -> Self {
        CompetitorSearch { s_max: 1.0, expansions: 3, min_fraction: 1e-6, max_bisections: 200 }
    }
}

fn perturbed(base: &VerticalGraph, psi: &[f64], s: f64) -> Result<VerticalGraph> {
    base.with_heights(base.heights.iter().zip(psi).map(|(f, p)| f + s * p).collect())
}

/// Finds a nonzero `s` for which `base + s·psi` encloses zero signed
/// weighted volume with the base.
///
/// The volume `V(s)` vanishes at `s = 0`, so the search brackets a sign
/// change of `V(s)/s`, whose value at zero is the discrete derivative
/// `Σ wₖ ψₖ e^{φ(qₖ, fₖ)}`.
pub fn make_competitor(base: &VerticalGraph, psi: &[f64], density: &Density) -> Result<Competitor> {
    make_competitor_with(base, psi, density, &CompetitorSearch::default())
}

pub fn make_competitor_with(
    base: &VerticalGraph,
    psi: &[f64],
    density: &Density,
    search: &CompetitorSearch,
) -> Result<Competitor> {
    let grid = &base.grid;
    Error::check_len(grid.len(), psi.len())?;
    if (0..grid.len()).any(|k| grid.is_boundary(k) && psi[k] != 0.0) {
        return Err(Error::Invalid("perturbation must vanish on the boundary".into()));
    }
    if psi.iter().all(|&p| p == 0.0) {
        return Err(Error::Invalid("perturbation is identically zero".into()));
    }
    let volume = |s: f64| -> Result<f64> { weighted_volume_between(base, &perturbed(base, psi, s)?, density) };
    let w = trapezoid_weights(grid);
    let mut slope = 0.0;
    for k in 0..grid.len() {
        slope += w[k] * psi[k] * density.weight(&base.point(k)[..grid.dim() + 1])?;
    }
    let ratio = |s: f64| -> Result<f64> { if s == 0.0 { Ok(slope) } else { Ok(volume(s)? / s) } };
    let finish = |s: f64| -> Result<Competitor> {
        let graph = perturbed(base, psi, s)?;
        let volume_gap = weighted_volume_between(base, &graph, density)?;
        Ok(Competitor { graph, volume_gap, amplitude: s })
    };

    let mut s_max = search.s_max;
    for _ in 0..=search.expansions {
        if volume(s_max)?.abs() <= VOLUME_TOL {
            return finish(s_max);
        }
        let r0 = slope;
        for side in [1.0, -1.0] {
            let far = side * s_max;
            let rf = ratio(far)?;
            if r0 == 0.0 || rf.signum() == r0.signum() {
                continue;
            }
            // invariant: ratio(near) has the sign of r0, ratio(far) does not
            let (mut near, mut far) = (0.0, far);
            let mut s = far;
            for _ in 0..search.max_bisections {
                s = 0.5 * (near + far);
                let v = volume(s)?;
                if v.abs() <= VOLUME_TOL || (far - near).abs() <= 1e-15 * s_max {
                    break;
                }
                if (v / s).signum() == r0.signum() {
                    near = s;
                } else {
                    far = s;
                }
            }
            if s.abs() >= search.min_fraction * s_max {
                return finish(s);
            }
        }
        s_max *= 2.0;
    }
    Err(Error::NoRoot)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrialVerdict {
    MinimizerConsistent,
    Violation,
}

impl std::fmt::Display for TrialVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TrialVerdict::MinimizerConsistent => "MinimizerConsistent",
            TrialVerdict::Violation => "Violation",
        })
    }
}

/// Weighted area of a vertical graph from its triangulated samples.
pub fn graph_weighted_area(graph: &VerticalGraph, density: &Density) -> Result<f64> {
    sampled_weighted_area(&Surface::Vertical(graph.clone()), density)
}

/// `A_φ(competitor) - A_φ(base)` and the verdict at tolerance
/// `1e-8·A_φ(base)`.
pub fn minimizer_trial(base: &VerticalGraph, competitor: &VerticalGraph, density: &Density) -> Result<(f64, TrialVerdict)> {
    let a0 = graph_weighted_area(base, density)?;
    let delta = graph_weighted_area(competitor, density)? - a0;
    let verdict = if delta >= -1e-8 * a0 { TrialVerdict::MinimizerConsistent } else { TrialVerdict::Violation };
    Ok((delta, verdict))
}

/// Polynomial bump `(1 - |q - c|²/r²)³` supported in the ball of radius `r`.
fn bump(q: &[f64], center: &[f64], r: f64) -> f64 {
    let d2: f64 = q.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / (r * r);
    if d2 >= 1.0 {
        0.0
    } else {
        (1.0 - d2).powi(3)
    }
}

/// Random perturbation `a₁·bump₁ - a₂·bump₂` with disjoint supports on either
/// side of a random split of the first axis.
///
/// The second amplitude is chosen so that the first order volume change is a
/// random fraction in `±[0.02, 0.2]` of the first bump's contribution; for a
/// constant density it is balanced exactly, so every multiple of the
/// perturbation encloses zero volume.
pub fn random_two_bump(base: &VerticalGraph, density: &Density, rng: &mut SplitMix64) -> Result<Vec<f64>> {
    let g = &base.grid;
    let dim = g.dim();
    let (lo, hi) = (g.lo(), g.hi());
    let length = hi[0] - lo[0];
    let split = lo[0] + length * rng::uniform(rng, 0.35, 0.65);
    let mut pick = |a: f64, b: f64| -> (Vec<f64>, f64) {
        let mut half = 0.5 * (b - a);
        if dim == 2 {
            half = half.min(0.5 * (hi[1] - lo[1]));
        }
        let r = half * rng::uniform(rng, 0.4, 0.9);
        let mut c = vec![rng::uniform(rng, a + r, b - r)];
        if dim == 2 {
            c.push(rng::uniform(rng, lo[1] + r, hi[1] - r));
        }
        (c, r)
    };
    let (c1, r1) = pick(lo[0], split);
    let (c2, r2) = pick(split, hi[0]);
    let a1 = length * rng::uniform(rng, 0.25, 0.75);
    let b1: Vec<f64> = (0..g.len()).map(|k| bump(&g.coord(k)[..dim], &c1, r1)).collect();
    let b2: Vec<f64> = (0..g.len()).map(|k| bump(&g.coord(k)[..dim], &c2, r2)).collect();
    let w = trapezoid_weights(g);
    let mut m1 = 0.0;
    let mut m2 = 0.0;
    for k in 0..g.len() {
        let e = density.weight(&base.point(k)[..dim + 1])?;
        m1 += w[k] * b1[k] * e;
        m2 += w[k] * b2[k] * e;
    }
    let excess = if density.is_constant() {
        0.0
    } else {
        let frac = rng::uniform(rng, 0.02, 0.2);
        if rng::uniform(rng, 0.0, 1.0) < 0.5 {
            frac
        } else {
            -frac
        }
    };
    let a2 = a1 * (1.0 - excess) * m1 / m2;
    let mut psi: Vec<f64> = (0..g.len()).map(|k| a1 * b1[k] - a2 * b2[k]).collect();
    for k in 0..g.len() {
        if g.is_boundary(k) {
            psi[k] = 0.0;
        }
    }
    Ok(psi)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub amplitude: f64,
    #[serde(rename = "deltaA")]
    pub delta_a: f64,
    pub volume_gap: f64,
    pub verdict: TrialVerdict,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub seed: u64,
    pub base_area: f64,
    pub divergence: IdentityReport,
    pub trials: Vec<TrialRecord>,
    pub min_delta_a: f64,
    pub violations: usize,
}

/// Draws up to this many perturbations per trial before giving up.
const MAX_REDRAWS: usize = 20;

/// Runs the divergence check on `samples` random points and `trials`
/// volume-matched random competitors, all drawn from one seeded stream.
pub fn run_calibration(
    base: &VerticalGraph,
    density: &Density,
    lambda: f64,
    trials: usize,
    samples: usize,
    seed: u64,
) -> Result<CalibrationReport> {
    let mut rng = rng::seeded(seed);
    let points = divergence_samples(base, samples, &mut rng)?;
    let divergence = divergence_check(base, density, lambda, &points)?;
    let base_area = graph_weighted_area(base, density)?;
    let mut records = Vec::with_capacity(trials);
    for trial in 0..trials {
        let mut found = None;
        for _ in 0..MAX_REDRAWS {
            let psi = random_two_bump(base, density, &mut rng)?;
            match make_competitor(base, &psi, density) {
                Ok(c) => {
                    found = Some(c);
                    break;
                }
                Err(Error::NoRoot) => continue,
                Err(e) => return Err(e),
            }
        }
        let competitor = found.ok_or(Error::NoRoot)?;
        let (delta_a, verdict) = minimizer_trial(base, &competitor.graph, density)?;
        records.push(TrialRecord {
            trial,
            amplitude: competitor.amplitude,
            delta_a,
            volume_gap: competitor.volume_gap,
            verdict,
        });
    }
    let min_delta_a = records.iter().map(|r| r.delta_a).fold(f64::INFINITY, f64::min);
    let violations = records.iter().filter(|r| r.verdict == TrialVerdict::Violation).count();
    Ok(CalibrationReport { seed, base_area, divergence, trials: records, min_delta_a, violations })
}

/// CSV rows `trial,amplitude,deltaA,verdict`.
pub fn trials_csv(records: &[TrialRecord]) -> String {
    let mut out = String::from("trial,amplitude,deltaA,verdict\n");
    for r in records {
        out.push_str(&format!("{},{},{},{}\n", r.trial, fmt17(r.amplitude), fmt17(r.delta_a), r.verdict));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{calibration_base, FixtureName};

    fn flat(m: usize) -> VerticalGraph {
        VerticalGraph::from_fn(Grid::interval(-1.0, 1.0, m).unwrap(), |_| 0.0).unwrap()
    }

    #[test]
    fn lagrange_basis_reproduces_polynomials() {
        let x = 3.37;
        let b = lagrange_basis(x);
        let p = |t: f64| 1.0 - 2.0 * t + 0.5 * t.powi(3) - 0.01 * t.powi(7);
        let dp = |t: f64| -2.0 + 1.5 * t * t - 0.07 * t.powi(6);
        let d2p = |t: f64| 3.0 * t - 0.42 * t.powi(5);
        let mut v = [0.0; 3];
        for j in 0..STENCIL {
            for o in 0..3 {
                v[o] += b[o][j] * p(j as f64);
            }
        }
        assert!((v[0] - p(x)).abs() < 1e-10);
        assert!((v[1] - dp(x)).abs() < 1e-9);
        assert!((v[2] - d2p(x)).abs() < 1e-8);
    }

    #[test]
    fn flat_base_fields() {
        let base = flat(21);
        let x = calibration_field(&[0.3, 5.0], &base, &Density::constant(2)).unwrap();
        assert_eq!(x, [0.0, 1.0, 0.0]);
        let x = calibration_field(&[0.3, 2.0], &base, &Density::translator(2)).unwrap();
        assert!((x[1] - 2f64.exp()).abs() < 1e-14 && x[0] == 0.0);
        assert!(matches!(calibration_field(&[1.5, 0.0], &base, &Density::constant(2)), Err(Error::Domain { .. })));
    }

    #[test]
    fn monotone_volume_has_no_match() {
        let base = flat(41);
        let psi: Vec<f64> = base.grid.interior().iter().fold(vec![0.0; 41], |mut v, &k| {
            v[k] = 1.0 - base.grid.coord(k)[0].powi(2);
            v
        });
        assert!(matches!(make_competitor(&base, &psi, &Density::constant(2)), Err(Error::NoRoot)));
    }

    #[test]
    fn odd_perturbation_matches_at_unit_amplitude() {
        let base = flat(41);
        let psi: Vec<f64> = (0..41).map(|k| {
            let q = base.grid.coord(k)[0];
            q * (1.0 - q * q)
        }).collect();
        let c = make_competitor(&base, &psi, &Density::constant(2)).unwrap();
        assert_eq!(c.amplitude, 1.0);
        assert!(c.volume_gap.abs() <= 1e-12);
    }

    #[test]
    fn grim_reaper_base_is_calibrated() {
        let (base, density, lambda) = calibration_base(FixtureName::GrimReaper, 200).unwrap();
        let mut rng = rng::seeded(1);
        let pts = divergence_samples(&base, 20, &mut rng).unwrap();
        let rep = divergence_check(&base, &density, lambda, &pts).unwrap();
        assert!(rep.pass, "{}", rep.sup_residual);
    }

    #[test]
    fn swapping_roles_negates_delta() {
        let (base, density, _) = calibration_base(FixtureName::GrimReaper, 100).unwrap();
        let mut rng = rng::seeded(3);
        let psi = random_two_bump(&base, &density, &mut rng).unwrap();
        let c = make_competitor(&base, &psi, &density).unwrap();
        let (d1, _) = minimizer_trial(&base, &c.graph, &density).unwrap();
        let (d2, _) = minimizer_trial(&c.graph, &base, &density).unwrap();
        assert_eq!(d1, -d2);
        assert!(c.volume_gap.abs() <= 1e-12);
    }
}
