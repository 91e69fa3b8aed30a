//! The T-operator H ↦ Hilb(FS(H)) and its iteration.

use isect::IntersectionModel;
use metrics::FiberGeometry;
use serde::Serialize;

use crate::chow::extended_chow_at_fs;
use crate::gram::{check_symmetric, l2_gram_quadrature, SectionGram, SectionMetric, VolumeConvention};
use crate::QuantizedError;

/// L² Gram under FS(H) with volume c₁(L^m, FS(H)), rescaled to tr(H).
pub fn balanced_step(g: &SectionGram, grid: &FiberGeometry) -> Result<SectionGram, QuantizedError> {
    check_symmetric(&g.gram)?;
    let next = l2_gram_quadrature(g.m, &SectionMetric::FsOf(g.gram.clone()), VolumeConvention::MOmega, grid)?;
    let scale = g.gram.trace() / next.gram.trace();
    Ok(SectionGram { gram: next.gram * scale, ..next })
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceRow {
    pub iteration: usize,
    /// max-norm of G_k − G_{k−1}
    pub distance: f64,
    /// h̃_C at h = FS(G_k)
    pub ext_chow: f64,
}

#[derive(Debug, Clone)]
pub struct BalancedRun {
    pub gram: SectionGram,
    pub iterations: usize,
    pub converged: bool,
    pub trace: Vec<TraceRow>,
}

/// Iterates until successive Grams differ by < tol in max-norm.
/// `base` is the (P¹, O(1), FS) model used for the h̃_C column.
pub fn balanced_iterate(
    g0: &SectionGram,
    tol: f64,
    max_iter: usize,
    base: &IntersectionModel,
    grid: &FiberGeometry,
) -> Result<BalancedRun, QuantizedError> {
    if !(tol > 0.0) {
        return Err(QuantizedError::InvalidArgument(format!("tolerance {tol} must be positive")));
    }
    let mut cur = g0.clone();
    let mut trace = vec![TraceRow { iteration: 0, distance: f64::NAN, ext_chow: extended_chow_at_fs(base, &cur, grid)? }];
    for it in 1..=max_iter {
        let next = balanced_step(&cur, grid)?;
        let dist = (&next.gram - &cur.gram).amax();
        trace.push(TraceRow { iteration: it, distance: dist, ext_chow: extended_chow_at_fs(base, &next, grid)? });
        cur = next;
        if dist < tol {
            return Ok(BalancedRun { gram: cur, iterations: it, converged: true, trace });
        }
    }
    Ok(BalancedRun { gram: cur, iterations: max_iter, converged: false, trace })
}
