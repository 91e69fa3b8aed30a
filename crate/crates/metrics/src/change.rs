//! Intersection data under a change of archimedean metric.
//!
//! The metric on L goes from e^{−ψ₀}h to e^{−ψ₁}h (ω_ψ = ω + dd^cψ), the K
//! metric follows the Ricci form. In Bott–Chern terms a class X with metric
//! e^{−2u_X}h_X and curvature c_X satisfies, for n = 1,
//!   (X_u.Y_v) = (X.Y) + ∫u_X c_Y + ∫u_Y c_X + 2∫u_Y dd^c u_X,
//! with u_L = (ψ₁ − ψ₀)/2 and u_K = ½·log(f₁/f₀).

use heightnum::HeightValue;
use isect::{ref_name, ClassKind, IntersectionModel, ModelPair};

use crate::functionals::scalar_curvature;
use crate::potential::PotentialField;
use crate::MetricsError;

struct ArchData {
    u: Vec<f64>,
    /// curvature before the change, as a density against ω
    c1: Vec<f64>,
}

fn check_geometry(m: &IntersectionModel, phi: &PotentialField) -> Result<(), MetricsError> {
    if m.n != 1 {
        return Err(MetricsError::GeometryMismatch(format!("metric changes are implemented for n = 1, model has n = {}", m.n)));
    }
    let (dl, dk) = phi.geometry().generic_degrees();
    if m.deg_ln != heightnum::qi(dl) || m.deg_lk != heightnum::qi(dk) {
        return Err(MetricsError::GeometryMismatch(format!(
            "model fibre has (deg_Ln, deg_LK) = ({}, {}), grid fibre has ({dl}, {dk})",
            m.deg_ln, m.deg_lk
        )));
    }
    Ok(())
}

fn arch_data(m: &IntersectionModel, from: &PotentialField, to: &PotentialField) -> Result<Vec<ArchData>, MetricsError> {
    let g = from.geometry();
    let zero = vec![0.0; g.len()];
    let s_from = scalar_curvature(g, from.density())?;
    m.form
        .names()
        .iter()
        .map(|name| {
            let cls = m.class(name).expect("form names are classes");
            Ok(match &cls.kind {
                _ if *name == m.l_class => ArchData {
                    u: to.samples().iter().zip(from.samples()).map(|(a, b)| 0.5 * (a - b)).collect(),
                    c1: from.density().to_vec(),
                },
                _ if *name == m.k_class => ArchData {
                    u: to.density().iter().zip(from.density()).map(|(a, b)| 0.5 * (a / b).ln()).collect(),
                    c1: s_from.iter().zip(from.density()).map(|(s, f)| -s * f).collect(),
                },
                ClassKind::Vertical { .. } | ClassKind::BasePullback => ArchData { u: zero.clone(), c1: zero.clone() },
                _ => {
                    return Err(MetricsError::GeometryMismatch(format!(
                        "horizontal class {name} carries no archimedean data on this grid"
                    )))
                }
            })
        })
        .collect()
}

fn product(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

/// The change of (X.Y) between the two metrics.
fn pair_delta(g: &crate::FiberGeometry, x: &ArchData, y: &ArchData) -> f64 {
    let dux = g.density_operator(&x.u);
    g.integrate(&product(&x.u, &y.c1)) + g.integrate(&product(&y.u, &x.c1)) + 2.0 * g.integrate(&product(&y.u, &dux))
}

/// Model for the metric e^{−ψ₁}h on L, starting from a model whose L metric is e^{−ψ₀}h.
pub fn apply_metric_change_from(m: &IntersectionModel, from: &PotentialField, to: &PotentialField) -> Result<IntersectionModel, MetricsError> {
    check_geometry(m, to)?;
    if !from.geometry().same_grid(to.geometry()) {
        return Err(MetricsError::GeometryMismatch("potentials live on different grids".into()));
    }
    from.check_kahler()?;
    to.check_kahler()?;
    let data = arch_data(m, from, to)?;
    let g = to.geometry();
    let mut out = m.clone();
    for (mono, v) in m.form.entries() {
        let (i, j) = (mono[0], mono[1]);
        let delta = pair_delta(g, &data[i], &data[j]);
        if delta != 0.0 {
            out.form.set_monomial(mono.clone(), v.clone() + HeightValue::real(delta));
        }
    }
    Ok(out)
}

/// Model for (𝒳, 𝓛, e^{−φ}h) with ω_φ = ω + dd^cφ.
pub fn apply_metric_change(m: &IntersectionModel, phi: &PotentialField) -> Result<IntersectionModel, MetricsError> {
    apply_metric_change_from(m, &PotentialField::zero(phi.geometry().clone()), phi)
}

/// (changed model, original model) with mixed entries (X_new.Y_old) = (X.Y) + ∫u_X c_Y.
pub fn metric_change_pair(m: &IntersectionModel, phi: &PotentialField) -> Result<ModelPair, MetricsError> {
    let new = apply_metric_change(m, phi)?;
    let zero = PotentialField::zero(phi.geometry().clone());
    let data = arch_data(m, &zero, phi)?;
    let g = phi.geometry();
    let names = m.form.names();
    let mut mixed = Vec::new();
    for i in 0..names.len() {
        for j in 0..names.len() {
            let old = m.form.get(&[names[i].as_str(), names[j].as_str()])?.clone();
            let d = g.integrate(&product(&data[i].u, &data[j].c1));
            let v = if d != 0.0 { old + HeightValue::real(d) } else { old };
            mixed.push((vec![names[i].clone(), ref_name(&names[j])], v));
        }
    }
    Ok(ModelPair::new(new, m.clone(), mixed)?)
}
