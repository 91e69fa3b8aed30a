//! Energy-type functionals of a potential relative to the reference form,
//! written out for n = 1 (ω_φ = f·ω, V = ∫ω).

use serde::Serialize;

use crate::geometry::{FiberGeometry, FiberKind};
use crate::potential::{PotentialField, KAHLER_MARGIN};
use crate::MetricsError;
use num_complex::Complex64;

fn ready(phi: &PotentialField) -> Result<(&FiberGeometry, f64), MetricsError> {
    phi.check_kahler()?;
    let g = phi.geometry();
    Ok((g, g.volume()))
}

/// 𝓔(φ) = (1/V)·Σ_{i=0}^{n} ∫φ ω^i ∧ ω_φ^{n−i}.
pub fn am_energy(phi: &PotentialField) -> Result<f64, MetricsError> {
    let (g, v) = ready(phi)?;
    let a: Vec<f64> = phi.samples().iter().zip(phi.density()).map(|(p, f)| p * (1.0 + f)).collect();
    Ok(g.integrate(&a) / v)
}

/// 𝓔^{Ric}(φ) = (1/V)·Σ_{i=0}^{n−1} ∫φ Ric(ω) ∧ ω^i ∧ ω_φ^{n−1−i}.
pub fn ricci_energy(phi: &PotentialField) -> Result<f64, MetricsError> {
    let (g, v) = ready(phi)?;
    Ok(g.reference_scalar_curvature() * g.integrate(phi.samples()) / v)
}

/// Ent(φ) = ∫ log(ω_φ^n/ω^n) ω_φ^n.
pub fn entropy(phi: &PotentialField) -> Result<f64, MetricsError> {
    let (g, _) = ready(phi)?;
    let a: Vec<f64> = phi.density().iter().map(|f| f * f.ln()).collect();
    Ok(g.integrate(&a))
}

/// μ(φ) = (S̄/(n+1))·𝓔 − 𝓔^{Ric} + Ent/V.
pub fn k_energy(phi: &PotentialField) -> Result<f64, MetricsError> {
    let (g, v) = ready(phi)?;
    Ok(g.sbar() / 2.0 * am_energy(phi)? - ricci_energy(phi)? + entropy(phi)? / v)
}

/// I(φ) = (1/V)∫φ(ω^n − ω_φ^n).
pub fn aubin_i(phi: &PotentialField) -> Result<f64, MetricsError> {
    let (g, v) = ready(phi)?;
    let a: Vec<f64> = phi.samples().iter().zip(phi.density()).map(|(p, f)| p * (1.0 - f)).collect();
    Ok(g.integrate(&a) / v)
}

/// J(φ) = (1/V)∫φω^n − (1/((n+1)V))·Σ_j ∫φ ω_φ^j ∧ ω^{n−j}.
pub fn aubin_j(phi: &PotentialField) -> Result<f64, MetricsError> {
    let (g, v) = ready(phi)?;
    Ok(g.integrate(phi.samples()) / v - am_energy(phi)? / 2.0)
}

/// ∫ φ·c₁(L₁)∧…∧c₁(L_n), the forms given as densities against ω.
pub fn bott_chern_delta(phi: &PotentialField, curvature_forms: &[Vec<f64>]) -> Result<f64, MetricsError> {
    let g = phi.geometry();
    if curvature_forms.len() != 1 {
        return Err(MetricsError::ArityMismatch { expected: 1, got: curvature_forms.len() });
    }
    let c = &curvature_forms[0];
    if c.len() != g.len() {
        return Err(MetricsError::GeometryMismatch(format!("curvature density has {} values, grid has {}", c.len(), g.len())));
    }
    let a: Vec<f64> = phi.samples().iter().zip(c).map(|(p, d)| p * d).collect();
    Ok(g.integrate(&a))
}

/// S(f·ω) = (S(ω) − D[log f])/f at the nodes.
pub fn scalar_curvature(g: &FiberGeometry, density: &[f64]) -> Result<Vec<f64>, MetricsError> {
    if density.len() != g.len() {
        return Err(MetricsError::GeometryMismatch(format!("density has {} values, grid has {}", density.len(), g.len())));
    }
    for (i, &f) in density.iter().enumerate() {
        if !(f > KAHLER_MARGIN) {
            return Err(MetricsError::NonKahler { node: i, density: f });
        }
    }
    let logs: Vec<f64> = density.iter().map(|f| f.ln()).collect();
    let dl = g.density_operator(&logs);
    let s0 = g.reference_scalar_curvature();
    Ok(density.iter().zip(dl).map(|(f, d)| (s0 - d) / f).collect())
}

/// (1/n²)∫S(ω_h)² ω_h^n for ω_h = density·ω.
pub fn scalar_curvature_l2(g: &FiberGeometry, density: &[f64]) -> Result<f64, MetricsError> {
    let s = scalar_curvature(g, density)?;
    let a: Vec<f64> = s.iter().zip(density).map(|(s, f)| s * s * f).collect();
    Ok(g.integrate(&a))
}

/// Both sides of (d/n!)·|α|²_{det g} = (i/2)^n ∫α∧ᾱ for α = λ·dz and the flat
/// metric of mass d; |α|² is averaged over the nodes (it is constant).
pub fn cubic_identity_check_scaled(torus: &FiberGeometry, degree: u32, lambda: Complex64) -> Result<(f64, f64), MetricsError> {
    let tau = match torus.kind() {
        FiberKind::Torus { tau } => tau,
        FiberKind::Sphere => return Err(MetricsError::GeometryMismatch("cubic identity needs a torus fibre".into())),
    };
    let d = degree as f64;
    let area = tau.im;
    // ω = (i/2)·g dz∧dz̄ with g = d/area, so |dz|²_g = 1/g
    let pointwise: Vec<f64> = (0..torus.len()).map(|_| lambda.norm_sqr() * area / d).collect();
    let uniform = vec![1.0 / torus.len() as f64; torus.len()];
    let lhs = d * crate::quadrature::weighted_sum(&uniform, &pointwise);
    // (i/2)α∧ᾱ = |λ|² dx∧dy = |λ|²·(area/d)·ω
    let dens: Vec<f64> = vec![lambda.norm_sqr() * area / d; torus.len()];
    let rhs = torus.integrate(&dens);
    Ok((lhs, rhs))
}

pub fn cubic_identity_check(torus: &FiberGeometry, degree: u32) -> Result<(f64, f64), MetricsError> {
    let g = match torus.kind() {
        FiberKind::Torus { tau } => FiberGeometry::torus(tau, torus.shape().0, degree)?,
        FiberKind::Sphere => return Err(MetricsError::GeometryMismatch("cubic identity needs a torus fibre".into())),
    };
    cubic_identity_check_scaled(&g, degree, Complex64::new(1.0, 0.0))
}

#[derive(Debug, Clone, Serialize)]
pub struct FunctionalReport {
    pub geometry: String,
    pub nodes: usize,
    pub volume: f64,
    pub sbar: f64,
    pub energy: f64,
    pub ricci_energy: f64,
    pub entropy: f64,
    pub k_energy: f64,
    pub aubin_i: f64,
    pub aubin_j: f64,
    pub calabi: f64,
}

pub fn report(phi: &PotentialField) -> Result<FunctionalReport, MetricsError> {
    let g = phi.geometry();
    let geometry = match g.kind() {
        FiberKind::Sphere => format!("sphere({}x{}, degree {})", g.shape().0, g.shape().1, g.degree()),
        FiberKind::Torus { tau } => format!("torus(tau = {} + {}i, {}x{}, degree {})", tau.re, tau.im, g.shape().0, g.shape().1, g.degree()),
    };
    Ok(FunctionalReport {
        geometry,
        nodes: g.len(),
        volume: g.volume(),
        sbar: g.sbar(),
        energy: am_energy(phi)?,
        ricci_energy: ricci_energy(phi)?,
        entropy: entropy(phi)?,
        k_energy: k_energy(phi)?,
        aubin_i: aubin_i(phi)?,
        aubin_j: aubin_j(phi)?,
        calabi: scalar_curvature_l2(g, phi.density())?,
    })
}
