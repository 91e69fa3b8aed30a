//! Archimedean side: quadrature grids on n = 1 fibres (round sphere, flat
//! torus), Kähler potentials, the energy functionals and the change of
//! intersection data under h ↦ e^{−φ}h.

pub mod change;
pub mod functionals;
pub mod geometry;
pub mod potential;
pub mod quadrature;

pub use change::{apply_metric_change, apply_metric_change_from, metric_change_pair};
pub use functionals::{
    am_energy, aubin_i, aubin_j, bott_chern_delta, cubic_identity_check, cubic_identity_check_scaled, entropy, k_energy,
    report, ricci_energy, scalar_curvature, scalar_curvature_l2, FunctionalReport,
};
pub use geometry::{FiberGeometry, FiberKind, Node};
pub use potential::{load_potential, potential_from_csv, potential_to_csv, PotentialField, KAHLER_MARGIN};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetricsError {
    #[error("NonKahler: ω_φ/ω = {density} at node {node}")]
    NonKahler { node: usize, density: f64 },
    #[error("ArityMismatch: expected {expected} curvature forms, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("GeometryMismatch: {0}")]
    GeometryMismatch(String),
    #[error("Parse: {0}")]
    Parse(String),
    #[error("Io: {0}")]
    Io(String),
    #[error("{0}")]
    Isect(#[from] isect::IsectError),
}
