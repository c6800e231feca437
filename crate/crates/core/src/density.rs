//! Densities `e^φ` on `R^{n+1}` and the pointwise quantities derived from `φ`.
//!
//! Radial profiles are functions of `r = |x|^2`; vertical profiles are functions
//! of `t = x_{n+1}`. Every profile supplies `(φ, φ', φ'')` in closed form.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vec3::{self, Vec3};

/// A user supplied scalar profile `s ↦ (φ(s), φ'(s), φ''(s))`.
pub trait ScalarProfile: Send + Sync + fmt::Debug {
    fn value(&self, s: f64) -> f64;
    fn first(&self, s: f64) -> f64;
    fn second(&self, s: f64) -> f64;

    fn contains(&self, _s: f64) -> bool {
        true
    }
}

#[derive(Clone, Debug)]
pub enum DensityProfile {
    /// `φ ≡ 0`.
    Constant,
    /// `φ(r) = r/4`.
    Expander,
    /// `φ(r) = -r/4`.
    Shrinker,
    /// `φ(t) = t`.
    Translator,
    /// `φ(t) = α log t`, only for `t > 0`.
    SingularMinimal { alpha: f64 },
    /// `φ = |x|^p = r^{p/2}`.
    RadialPower { p: f64 },
    CustomRadial(Arc<dyn ScalarProfile>),
    CustomVertical(Arc<dyn ScalarProfile>),
}

impl DensityProfile {
    pub fn name(&self) -> &'static str {
        match self {
            DensityProfile::Constant => "constant",
            DensityProfile::Expander => "expander",
            DensityProfile::Shrinker => "shrinker",
            DensityProfile::Translator => "translator",
            DensityProfile::SingularMinimal { .. } => "singular_minimal",
            DensityProfile::RadialPower { .. } => "radial_power",
            DensityProfile::CustomRadial(_) => "custom_radial",
            DensityProfile::CustomVertical(_) => "custom_vertical",
        }
    }

    fn natural_dependence(&self) -> Option<Dependence> {
        match self {
            DensityProfile::Constant => None,
            DensityProfile::Expander
            | DensityProfile::Shrinker
            | DensityProfile::RadialPower { .. }
            | DensityProfile::CustomRadial(_) => Some(Dependence::Radial),
            DensityProfile::Translator
            | DensityProfile::SingularMinimal { .. }
            | DensityProfile::CustomVertical(_) => Some(Dependence::Vertical),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dependence {
    Radial,
    Vertical,
    Horizontal,
}

impl fmt::Display for Dependence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Dependence::Radial => "radial",
            Dependence::Vertical => "vertical",
            Dependence::Horizontal => "horizontal",
        };
        f.write_str(s)
    }
}

/// Pointwise functional whose sign is the hypothesis of one of the stability
/// criteria.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SufficientMode {
    /// `φ'(r) + 2φ''(r) h²` (vertical graphs, radial density).
    VerticalRadial,
    /// `φ'(r) + φ''(r) h²` (radial graphs, radial density).
    RadialRadial,
    /// `φ''(t)` (vertical graphs, vertical density).
    VerticalCoordinate,
    /// `h · N_{n+1}` (radial translators).
    TranslatorRadialDiagnostic,
}

/// Values of a profile and its first two derivatives at its scalar argument.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfileJet {
    pub value: f64,
    pub first: f64,
    pub second: f64,
}

#[derive(Clone, Debug)]
pub struct Density {
    profile: DensityProfile,
    dependence: Dependence,
    ambient_dim: usize,
}

impl Density {
    pub fn new(profile: DensityProfile, dependence: Dependence, ambient_dim: usize) -> Result<Self> {
        if !(2..=3).contains(&ambient_dim) {
            return Err(Error::Invalid(format!("ambient dimension {ambient_dim} not in {{2, 3}}")));
        }
        match (profile.natural_dependence(), dependence) {
            (None, _) => {}
            (Some(d), dep) if d == dep => {}
            (Some(d), dep) => {
                return Err(Error::Invalid(format!(
                    "{} profile is {d}, cannot be used with {dep} dependence",
                    profile.name()
                )))
            }
        }
        if let DensityProfile::SingularMinimal { alpha } | DensityProfile::RadialPower { p: alpha } = &profile {
            if !alpha.is_finite() {
                return Err(Error::Invalid("profile parameter must be finite".into()));
            }
        }
        Ok(Density { profile, dependence, ambient_dim })
    }

    pub fn constant(ambient_dim: usize) -> Self {
        Self::new(DensityProfile::Constant, Dependence::Horizontal, ambient_dim).unwrap()
    }

    pub fn expander(ambient_dim: usize) -> Self {
        Self::new(DensityProfile::Expander, Dependence::Radial, ambient_dim).unwrap()
    }

    pub fn shrinker(ambient_dim: usize) -> Self {
        Self::new(DensityProfile::Shrinker, Dependence::Radial, ambient_dim).unwrap()
    }

    pub fn translator(ambient_dim: usize) -> Self {
        Self::new(DensityProfile::Translator, Dependence::Vertical, ambient_dim).unwrap()
    }

    pub fn singular_minimal(alpha: f64, ambient_dim: usize) -> Result<Self> {
        Self::new(DensityProfile::SingularMinimal { alpha }, Dependence::Vertical, ambient_dim)
    }

    pub fn radial_power(p: f64, ambient_dim: usize) -> Result<Self> {
        Self::new(DensityProfile::RadialPower { p }, Dependence::Radial, ambient_dim)
    }

    pub fn profile(&self) -> &DensityProfile {
        &self.profile
    }

    pub fn dependence(&self) -> Dependence {
        self.dependence
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.profile, DensityProfile::Constant)
    }

    /// Index of the vertical coordinate `x_{n+1}`.
    pub fn vertical_axis(&self) -> usize {
        self.ambient_dim - 1
    }

    /// Scalar argument of the profile: `r = |x|²` or `t = x_{n+1}`.
    pub fn argument(&self, x: &[f64]) -> Result<f64> {
        Error::check_len(self.ambient_dim, x.len())?;
        Ok(match self.dependence {
            Dependence::Radial => x.iter().map(|v| v * v).sum(),
            Dependence::Vertical => x[self.ambient_dim - 1],
            Dependence::Horizontal => 0.0,
        })
    }

    /// `(φ, φ', φ'')` of the profile at the point `x`.
    pub fn jet(&self, x: &[f64]) -> Result<ProfileJet> {
        let s = self.argument(x)?;
        let jet = |value, first, second| ProfileJet { value, first, second };
        Ok(match &self.profile {
            DensityProfile::Constant => jet(0.0, 0.0, 0.0),
            DensityProfile::Expander => jet(s / 4.0, 0.25, 0.0),
            DensityProfile::Shrinker => jet(-s / 4.0, -0.25, 0.0),
            DensityProfile::Translator => jet(s, 1.0, 0.0),
            DensityProfile::SingularMinimal { alpha } => {
                if !(s > 0.0) {
                    return Err(Error::domain(x, "singular minimal density needs x_{n+1} > 0"));
                }
                jet(alpha * s.ln(), alpha / s, -alpha / (s * s))
            }
            DensityProfile::RadialPower { p } => {
                let e = p / 2.0;
                let term = |c: f64, k: f64| -> Result<f64> {
                    if c == 0.0 {
                        Ok(0.0)
                    } else if s == 0.0 && k < 0.0 {
                        Err(Error::domain(x, "radial power profile is singular at the origin"))
                    } else {
                        Ok(c * s.powf(k))
                    }
                };
                jet(term(1.0, e)?, term(e, e - 1.0)?, term(e * (e - 1.0), e - 2.0)?)
            }
            DensityProfile::CustomRadial(p) | DensityProfile::CustomVertical(p) => {
                if !p.contains(s) {
                    return Err(Error::domain(x, "outside the custom profile domain"));
                }
                jet(p.value(s), p.first(s), p.second(s))
            }
        })
    }

    pub fn eval_phi(&self, x: &[f64]) -> Result<f64> {
        Ok(self.jet(x)?.value)
    }

    /// `e^{φ(x)}`.
    pub fn weight(&self, x: &[f64]) -> Result<f64> {
        Ok(self.eval_phi(x)?.exp())
    }

    /// Ambient gradient, padded to three components.
    pub fn grad_phi(&self, x: &[f64]) -> Result<Vec3> {
        let jet = self.jet(x)?;
        let mut g = vec3::ZERO;
        match self.dependence {
            Dependence::Radial => {
                for (gi, xi) in g.iter_mut().zip(x) {
                    *gi = 2.0 * jet.first * xi;
                }
            }
            Dependence::Vertical => g[self.ambient_dim - 1] = jet.first,
            Dependence::Horizontal => {}
        }
        Ok(g)
    }

    /// Ambient Hessian bilinear form `∇²φ(u, w)`.
    pub fn hessian_form(&self, x: &[f64], u: &Vec3, w: &Vec3) -> Result<f64> {
        let jet = self.jet(x)?;
        Ok(match self.dependence {
            Dependence::Radial => {
                // ∇²φ = 2φ' I + 4φ'' x xᵀ
                let xu: f64 = x.iter().zip(u).map(|(a, b)| a * b).sum();
                let xw: f64 = x.iter().zip(w).map(|(a, b)| a * b).sum();
                2.0 * jet.first * vec3::dot(u, w) + 4.0 * jet.second * xu * xw
            }
            Dependence::Vertical => {
                let k = self.ambient_dim - 1;
                jet.second * u[k] * w[k]
            }
            Dependence::Horizontal => 0.0,
        })
    }

    /// `∇²φ(N, N)` for a unit vector `N`.
    pub fn hessian_nn(&self, x: &[f64], normal: &Vec3) -> Result<f64> {
        let len = vec3::norm(normal);
        if (len - 1.0).abs() > 1e-12 {
            return Err(Error::Invalid(format!("normal has length {len}, expected 1")));
        }
        self.hessian_form(x, normal, normal)
    }

    /// `H_φ = nH - ⟨∇φ(x), N⟩`.
    pub fn weighted_mean_curvature(&self, x: &[f64], normal: &Vec3, nh: f64) -> Result<f64> {
        Ok(nh - vec3::dot(&self.grad_phi(x)?, normal))
    }

    pub fn sufficient_condition(&self, x: &[f64], normal: &Vec3, mode: SufficientMode) -> Result<f64> {
        let incompatible = |reason: &str| Error::Mode { mode: format!("{mode:?}"), reason: reason.to_string() };
        let radial_ok = matches!(self.dependence, Dependence::Radial) || self.is_constant();
        let vertical_ok = matches!(self.dependence, Dependence::Vertical) || self.is_constant();
        let h: f64 = x.iter().zip(normal).map(|(a, b)| a * b).sum();
        match mode {
            SufficientMode::VerticalRadial | SufficientMode::RadialRadial => {
                if !radial_ok {
                    return Err(incompatible("needs a radial density"));
                }
                let jet = self.jet(x)?;
                let c = if mode == SufficientMode::VerticalRadial { 2.0 } else { 1.0 };
                Ok(jet.first + c * jet.second * h * h)
            }
            SufficientMode::VerticalCoordinate => {
                if !vertical_ok {
                    return Err(incompatible("needs a vertical density"));
                }
                Ok(self.jet(x)?.second)
            }
            SufficientMode::TranslatorRadialDiagnostic => {
                if !matches!(self.profile, DensityProfile::Translator) {
                    return Err(incompatible("needs the translator density"));
                }
                self.jet(x)?;
                Ok(h * normal[self.ambient_dim - 1])
            }
        }
    }
}
