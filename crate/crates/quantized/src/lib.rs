//! Quantized side on P¹_ℤ: L² Grams of H⁰(O(m)), arithmetic degrees, Chow
//! and extended Chow heights, the balanced iteration and the m → ∞ scans.

pub mod balanced;
pub mod chow;
pub mod gram;
pub mod scan;

pub use balanced::{balanced_iterate, balanced_step, BalancedRun, TraceRow};
pub use chow::{bergman_samples, chow_height, extended_chow_at_fs, extended_chow_height, model_for_fs_metric, BergmanSamples};
pub use gram::{
    arithmetic_degree, default_grid, fs_gram_closed_form, fs_log_det, l2_gram, l2_gram_quadrature, monomial_labels, Family,
    SectionGram, SectionMetric, VolumeConvention,
};
pub use scan::{
    dequantization_scan, fit_log_model, hilbert_samuel_residual, hilbert_samuel_residual_without_log, p1_arithmetic_degree,
    scan_to_csv, tail_fit, ScanFit, ScanResult, ScanRow,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuantizedError {
    #[error("UnsupportedFamily: {0}")]
    UnsupportedFamily(String),
    #[error("NonPositiveDefinite: Gram matrix is not positive definite")]
    NonPositiveDefinite,
    #[error("NonSymmetric: Gram matrix is not symmetric")]
    NonSymmetric,
    #[error("ConventionMismatch: {0}")]
    ConventionMismatch(String),
    #[error("DimensionMismatch: {0}")]
    DimensionMismatch(String),
    #[error("InvalidArgument: {0}")]
    InvalidArgument(String),
    #[error("{0}")]
    Isect(#[from] isect::IsectError),
    #[error("{0}")]
    Metrics(#[from] metrics::MetricsError),
}
