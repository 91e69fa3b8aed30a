//! Arithmetic Hilbert–Samuel residuals and the dequantization scan on P¹_ℤ.

use isect::IntersectionModel;
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::gram::{fs_log_det, VolumeConvention};
use crate::QuantizedError;

fn check_p1(model: &IntersectionModel) -> Result<(), QuantizedError> {
    let ok = model.n == 1 && model.deg_ln == heightnum::qi(1) && model.deg_lk == heightnum::qi(-2);
    if !ok {
        return Err(QuantizedError::UnsupportedFamily(format!(
            "closed-form section norms exist for (P¹, O(1)) only; model has n = {}, deg_Ln = {}, deg_LK = {}",
            model.n, model.deg_ln, model.deg_lk
        )));
    }
    Ok(())
}

/// deĝ(π_*L̄^m) for FS on P¹_ℤ under the (mω) convention.
pub fn p1_arithmetic_degree(m: u32) -> f64 {
    -0.5 * fs_log_det(m, VolumeConvention::MOmega)
}

/// deĝ(m) − [(L̄²)m²/2 − m·log m/4 − (L̄.K̄)m/2] for m = 1..=m_max.
pub fn hilbert_samuel_residual(model: &IntersectionModel, m_max: u32) -> Result<Vec<(u32, f64)>, QuantizedError> {
    residuals(model, m_max, true)
}

/// Same, without the m·log m term.
pub fn hilbert_samuel_residual_without_log(model: &IntersectionModel, m_max: u32) -> Result<Vec<(u32, f64)>, QuantizedError> {
    residuals(model, m_max, false)
}

fn residuals(model: &IntersectionModel, m_max: u32, with_log: bool) -> Result<Vec<(u32, f64)>, QuantizedError> {
    check_p1(model)?;
    if m_max == 0 {
        return Err(QuantizedError::InvalidArgument("m_max must be positive".into()));
    }
    let l2 = model.l_top()?.evaluate();
    let lk = model.l_n_k()?.evaluate();
    Ok((1..=m_max)
        .into_par_iter()
        .map(|m| {
            let mf = m as f64;
            let log_term = if with_log { mf * mf.ln() / 4.0 } else { 0.0 };
            (m, p1_arithmetic_degree(m) - (l2 * mf * mf / 2.0 - log_term - lk * mf / 2.0))
        })
        .collect())
}

/// Least squares for y ≈ a + s·log m + (b + c·log m)/m; returns (a, s, b, c).
pub fn fit_log_model(points: &[(f64, f64)]) -> Result<[f64; 4], QuantizedError> {
    if points.len() < 4 {
        return Err(QuantizedError::InvalidArgument(format!("fit needs at least 4 points, got {}", points.len())));
    }
    let a = DMatrix::from_fn(points.len(), 4, |i, j| {
        let m = points[i].0;
        match j {
            0 => 1.0,
            1 => m.ln(),
            2 => 1.0 / m,
            _ => m.ln() / m,
        }
    });
    let y = DVector::from_iterator(points.len(), points.iter().map(|p| p.1));
    let x = a.svd(true, true).solve(&y, 1e-14).map_err(|e| QuantizedError::InvalidArgument(e.to_string()))?;
    Ok([x[0], x[1], x[2], x[3]])
}

/// Fit over the tail m ∈ [m_max/2, m_max].
pub fn tail_fit(rows: &[(u32, f64)], m_max: u32) -> Result<[f64; 4], QuantizedError> {
    let pts: Vec<(f64, f64)> = rows.iter().filter(|(m, _)| *m >= m_max / 2 && *m <= m_max).map(|(m, v)| (*m as f64, *v)).collect();
    fit_log_model(&pts)
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanRow {
    pub m: u32,
    pub deg_hat: f64,
    pub h_c: f64,
    pub h_c_minus_log_term: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanFit {
    pub m_max: u32,
    pub constant: f64,
    pub log_slope: f64,
    pub inv_m: f64,
    pub log_over_m: f64,
}

#[derive(Debug, Clone)]
pub struct ScanResult {
    pub fit: ScanFit,
    pub rows: Vec<ScanRow>,
}

/// h_C(X, L^m, h^m) for m = 1..=m_max with the tail fit.
pub fn dequantization_scan(model: &IntersectionModel, m_max: u32) -> Result<ScanResult, QuantizedError> {
    check_p1(model)?;
    if m_max < 8 {
        return Err(QuantizedError::InvalidArgument(format!("m_max = {m_max}; the tail fit needs m_max ≥ 8")));
    }
    let l2 = model.l_top()?.evaluate();
    let d = model.degree_kq as f64;
    let n = model.n as f64;
    let rows: Vec<ScanRow> = (1..=m_max)
        .into_par_iter()
        .map(|m| {
            let mf = m as f64;
            let deg_hat = p1_arithmetic_degree(m);
            let h_c = mf * l2 / (2.0 * d) - deg_hat / ((mf + 1.0) * d);
            ScanRow { m, deg_hat, h_c, h_c_minus_log_term: h_c - n / 4.0 * mf.ln() }
        })
        .collect();
    let pts: Vec<(u32, f64)> = rows.iter().map(|r| (r.m, r.h_c)).collect();
    let [a, s, b, c] = tail_fit(&pts, m_max)?;
    Ok(ScanResult { fit: ScanFit { m_max, constant: a, log_slope: s, inv_m: b, log_over_m: c }, rows })
}

pub fn scan_to_csv(rows: &[ScanRow]) -> String {
    let mut w = csv::Writer::from_writer(vec![]);
    for r in rows {
        w.serialize(r).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf8")
}
