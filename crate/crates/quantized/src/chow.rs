//! Chow height and the extended Chow height.

use heightnum::HeightValue;
use isect::IntersectionModel;
use metrics::FiberGeometry;

use crate::gram::{arithmetic_degree, checked_inverse, node_data, SectionGram, VolumeConvention};
use crate::QuantizedError;

/// (L̄_m^{n+1})/((n+1)(L_m^n)[K:ℚ]) − deĝ/(rank·[K:ℚ]) with L̄_m = m·L̄.
pub fn chow_height(model: &IntersectionModel, g: &SectionGram) -> Result<f64, QuantizedError> {
    if g.volume != VolumeConvention::MOmega {
        return Err(QuantizedError::ConventionMismatch("the Chow height of (X, L^m, h^m) needs the (mω)^n volume".into()));
    }
    if g.m == 0 {
        return Err(QuantizedError::InvalidArgument("m must be positive".into()));
    }
    let n = model.n as f64;
    let m = g.m as f64;
    let d = model.degree_kq as f64;
    let top = model.l_top()?.evaluate();
    let ln = heightnum::q_to_f64(&model.deg_ln);
    let rank = g.gram.nrows() as f64;
    Ok(m * top / ((n + 1.0) * ln * d) - arithmetic_degree(g)? / (rank * d))
}

/// Σ_α |s_α|²_h at nodes for an H-orthonormal basis, with the probability
/// weights of c₁(L, h)^n/(L^n).
#[derive(Debug, Clone)]
pub struct BergmanSamples {
    pub values: Vec<f64>,
    pub weights: Vec<f64>,
}

impl BergmanSamples {
    pub fn integral(&self) -> f64 {
        metrics::quadrature::weighted_sum(&self.weights, &self.values)
    }
}

/// chow_height + ½·log ∫ Σ_α|s_α|²_h c₁(L,h)^n/(L^n).
pub fn extended_chow_height(model: &IntersectionModel, g: &SectionGram, samples: &BergmanSamples) -> Result<f64, QuantizedError> {
    let total = samples.integral();
    if !(total > 0.0) {
        return Err(QuantizedError::InvalidArgument(format!("Bergman integral {total} is not positive")));
    }
    Ok(chow_height(model, g)? + 0.5 * total.ln())
}

/// Bergman samples of h = FS(G)^{1/m}-type metrics: the FS metric of `metric`
/// evaluated against an orthonormal basis of `h_gram`.
pub fn bergman_samples(h_gram: &SectionGram, metric_gram: &SectionGram, grid: &FiberGeometry) -> Result<BergmanSamples, QuantizedError> {
    let n = h_gram.m as usize + 1;
    let hinv = checked_inverse(&h_gram.gram, n)?;
    let minv = checked_inverse(&metric_gram.gram, n)?;
    let w = grid.weights();
    let mut values = Vec::with_capacity(grid.len());
    let mut weights = Vec::with_capacity(grid.len());
    for (k, node) in grid.nodes().into_iter().enumerate() {
        let d = node_data(h_gram.m, &minv, node.a, node.b);
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += hinv[(i, j)] * d.inner[(i, j)];
            }
        }
        values.push(s);
        weights.push(w[k] * d.density);
    }
    Ok(BergmanSamples { values, weights })
}

/// (P¹, O(1), FS(H)^{1/m}) obtained from the FS model: only (L̄²) moves,
/// by ½·(1/m)·∫ log B̃ (ω + ω_{FS(H)}).
pub fn model_for_fs_metric(base: &IntersectionModel, g: &SectionGram, grid: &FiberGeometry) -> Result<IntersectionModel, QuantizedError> {
    let n = g.m as usize + 1;
    let hinv = checked_inverse(&g.gram, n)?;
    let w = grid.weights();
    let vals: Vec<f64> = grid
        .nodes()
        .into_iter()
        .map(|node| {
            let d = node_data(g.m, &hinv, node.a, node.b);
            d.log_bt * (1.0 + d.density)
        })
        .collect();
    let shift = 0.5 * metrics::quadrature::weighted_sum(w, &vals) / g.m as f64;
    let mut out = base.clone();
    let l = base.l_class.clone();
    let cur = base.get(&[l.as_str(), l.as_str()])?.clone();
    out.set(&[l.as_str(), l.as_str()], cur + HeightValue::real(shift))?;
    Ok(out)
}

/// h̃_C at h = FS(H): Bergman density ≡ 1, so the log term drops.
pub fn extended_chow_at_fs(base: &IntersectionModel, g: &SectionGram, grid: &FiberGeometry) -> Result<f64, QuantizedError> {
    let model = model_for_fs_metric(base, g, grid)?;
    let samples = bergman_samples(g, g, grid)?;
    extended_chow_height(&model, g, &samples)
}
