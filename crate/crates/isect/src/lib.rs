//! Integral models as exact intersection data.
//!
//! A model is its (n+1)-fold symmetric intersection form on labelled
//! divisor classes, with designated polarization and relative canonical
//! classes, generic-fibre degrees and per-prime fibre components. All
//! functionals are evaluated by multilinear expansion of that form.

pub mod form;
pub mod functionals;
pub mod io;
pub mod model;
pub mod na;
pub mod pair;

pub use form::{power, IntersectionForm, LinComb, Monomial};
pub use functionals::{
    aubin_i_rel, aubin_j_rel, arakelov_energy, decomposition_check, df_numerator, energy_rel, entropy_rel,
    modular_height, relative_modular_height, ricci_energy_rel,
};
pub use io::{load_model, model_from_json, model_to_json};
pub use model::{BaseKind, ClassKind, DivisorClass, FiberComponent, IntersectionModel};
pub use na::{
    arakelov_calabi, component_twist_derivative, na_calabi, na_scalar_curvature, normalized_df, rescale_metric_const,
    slope_semistability_test, twist_by_base_divisor, SlopeReport, SlopeVerdict,
};
pub use pair::{ref_name, ModelPair, REF_PREFIX};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IsectError {
    #[error("MissingClass: {0}")]
    MissingClass(String),
    #[error("DuplicateClass: {0}")]
    DuplicateClass(String),
    #[error("MissingEntry: form has no value for {0}")]
    MissingEntry(String),
    #[error("IncompleteForm: form is not total, first missing monomial {0}")]
    IncompleteForm(String),
    #[error("IncompleteJointForm: joint form lacks {0}")]
    IncompleteJointForm(String),
    #[error("GenericFiberMismatch: {0}")]
    GenericFiberMismatch(String),
    #[error("UnknownPrime: no fibre components recorded at {0}")]
    UnknownPrime(u64),
    #[error("UnknownComponent: no vertical class for component {1} at {0}")]
    UnknownComponent(u64, String),
    #[error("ZeroCoverDegree")]
    ZeroCoverDegree,
    #[error("NegativeArchTerm: {0}")]
    NegativeArchTerm(f64),
    #[error("ZeroSelfIntersection: (L^(n+1)) = 0")]
    ZeroSelfIntersection,
    #[error("NonRationalEntry: {0} must be rational for a geometric base")]
    NonRationalEntry(String),
    #[error("MissingGenericDegree: {0}")]
    MissingGenericDegree(String),
    #[error("InconsistentFiber: {0}")]
    InconsistentFiber(String),
    #[error("InvalidModel: {0}")]
    InvalidModel(String),
    #[error("{0}")]
    Height(#[from] heightnum::HeightError),
    #[error("Parse: {0}")]
    Parse(String),
    #[error("Io: {0}")]
    Io(String),
}
