use serde::{Deserialize, Serialize};

use super::assembly::{assemble, barycentric_gradients, quadratic_form};
use crate::density::{Density, Dependence};
use crate::error::{Error, Result};
use crate::surface::{GeometryField, TriMesh};
use crate::vec3;

/// Which test-function factorization `u = v·g` is checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DecompositionMode {
    /// `g = N_{n+1}`, radial density.
    VerticalGraphRadialDensity,
    /// `g = h`, radial density.
    RadialGraphRadialDensity,
    /// `g = N_{n+1}`, vertical density.
    VerticalGraphVerticalDensity,
    /// `g = h`, vertical density.
    RadialGraphVerticalDensity,
}

impl DecompositionMode {
    fn uses_support(self) -> bool {
        matches!(self, DecompositionMode::RadialGraphRadialDensity | DecompositionMode::RadialGraphVerticalDensity)
    }

    fn needs(self) -> Dependence {
        match self {
            DecompositionMode::VerticalGraphRadialDensity | DecompositionMode::RadialGraphRadialDensity => Dependence::Radial,
            _ => Dependence::Vertical,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionGap {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
}

/// Compares `Q_φ[v·g]` from the assembled operator with the integrated form
/// `∫ g²|∇v|² dA_φ - ∫ v² g L_φ[g] dA_φ`, where `L_φ[g]` is replaced by its
/// closed form for a stationary surface with `H_φ = λ`.
///
/// For radial densities with `φ'' ≠ 0` the closed form keeps the Hessian
/// frame term `Σᵢ⟨D_{eᵢ}∇φ, N⟩⟨eᵢ, ·⟩`.
pub fn decomposition_check(
    mesh: &TriMesh,
    field: &GeometryField,
    density: &Density,
    lambda: f64,
    v: &[f64],
    mode: DecompositionMode,
) -> Result<DecompositionGap> {
    Error::check_len(mesh.num_interior(), v.len())?;
    if !(density.is_constant() || density.dependence() == mode.needs()) {
        return Err(Error::Mode { mode: format!("{mode:?}"), reason: format!("density is {}", density.dependence()) });
    }
    let g: &[f64] = if mode.uses_support() { &field.h } else { &field.g_vert };
    if let Some(node) = g.iter().position(|&x| x == 0.0 || !x.is_finite()) {
        return Err(Error::Sign { node });
    }
    let s0 = g[0].signum();
    if let Some(node) = g.iter().position(|&x| x.signum() != s0) {
        return Err(Error::Sign { node });
    }
    let assembly = assemble(mesh, field, density)?;
    let u: Vec<f64> = v.iter().zip(&mesh.interior).map(|(vi, &k)| vi * g[k]).collect();
    let lhs = quadratic_form(&assembly, &u)?;

    let vf = mesh.extend(v);
    let per = (mesh.dim + 1) as f64;
    let mut rhs = 0.0;
    for s in 0..mesh.simplices.len() {
        let simplex = mesh.simplex(s);
        let grads = barycentric_gradients(&mesh.vertices, simplex);
        let mut gv = vec3::ZERO;
        for (a, &k) in simplex.iter().enumerate() {
            gv = vec3::axpy(&gv, vf[k], &grads[a]);
        }
        let g2 = simplex.iter().map(|&k| g[k] * g[k]).sum::<f64>() / per;
        let w = simplex.iter().map(|&k| field.weight[k]).sum::<f64>() / per;
        rhs += mesh.measure(s) * w * g2 * vec3::dot(&gv, &gv);
    }
    let amb = field.dim() + 1;
    for (a, &k) in mesh.interior.iter().enumerate() {
        let x = &field.position[k][..amb];
        let jet = density.jet(x)?;
        let (h, nv) = (field.h[k], field.g_vert[k]);
        let t = x[amb - 1];
        let r: f64 = x.iter().map(|c| c * c).sum();
        let c = match mode {
            DecompositionMode::VerticalGraphRadialDensity => {
                2.0 * nv * nv * (jet.first + 2.0 * jet.second * h * h) + 4.0 * jet.second * h * nv * (t - h * nv)
            }
            DecompositionMode::RadialGraphRadialDensity => {
                4.0 * h * h * (jet.first + jet.second * h * h) + lambda * h + 4.0 * jet.second * h * h * (r - h * h)
            }
            DecompositionMode::VerticalGraphVerticalDensity => jet.second * nv * nv,
            DecompositionMode::RadialGraphVerticalDensity => lambda * h + h * nv * (jet.first + t * jet.second),
        };
        rhs += assembly.mass[a] * v[a] * v[a] * c;
    }
    Ok(DecompositionGap { lhs, rhs, gap: (lhs - rhs).abs() })
}
