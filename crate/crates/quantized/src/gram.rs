//! L² Gram matrices of the monomial basis x^{m−a}y^a of H⁰(P¹, O(m)).
//!
//! Metrics are invariant under complex conjugation, so every Gram here is
//! real symmetric.

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::str::FromStr;

use metrics::{FiberGeometry, FiberKind};

use crate::QuantizedError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    P1Fs,
}

impl FromStr for Family {
    type Err = QuantizedError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "p1-fs" | "p1" => Ok(Family::P1Fs),
            other => Err(QuantizedError::UnsupportedFamily(other.to_string())),
        }
    }
}

/// Which volume form the inner product integrates against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VolumeConvention {
    /// c₁(L, h)^n
    Omega,
    /// c₁(L^m, h^m)^n = m^n·c₁(L, h)^n
    MOmega,
}

/// Metric on O(m).
#[derive(Debug, Clone, PartialEq)]
pub enum SectionMetric {
    /// h_FS^m
    FubiniStudy,
    /// Fubini–Study metric of the embedding by an H-orthonormal basis:
    /// |s|² = |s|²_{eucl}/Σ_{ab}(H^{−1})_{ab} s̄_a s_b.
    FsOf(DMatrix<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SectionGram {
    pub m: u32,
    pub basis: Vec<String>,
    pub gram: DMatrix<f64>,
    pub volume: VolumeConvention,
}

pub fn monomial_labels(m: u32) -> Vec<String> {
    (0..=m)
        .map(|a| {
            let part = |v: &str, e: u32| match e {
                0 => String::new(),
                1 => v.to_string(),
                e => format!("{v}^{e}"),
            };
            let s = format!("{}{}", part("x", m - a), part("y", a));
            if s.is_empty() {
                "1".into()
            } else {
                s
            }
        })
        .collect()
}

fn ln_factorial(k: u32) -> f64 {
    (2..=k).map(|i| (i as f64).ln()).sum()
}

/// diag a!(m−a)!/(m+1)!, times m under (mω).
pub fn fs_gram_closed_form(m: u32, volume: VolumeConvention) -> SectionGram {
    let scale = match volume {
        VolumeConvention::Omega => 1.0,
        VolumeConvention::MOmega => m as f64,
    };
    let top = ln_factorial(m + 1);
    let diag: Vec<f64> = (0..=m).map(|a| scale * (ln_factorial(a) + ln_factorial(m - a) - top).exp()).collect();
    SectionGram { m, basis: monomial_labels(m), gram: DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag)), volume }
}

/// log det of the closed-form FS Gram, summed without forming the matrix.
pub fn fs_log_det(m: u32, volume: VolumeConvention) -> f64 {
    let top = ln_factorial(m + 1);
    let s = match volume {
        VolumeConvention::Omega => 0.0,
        VolumeConvention::MOmega => (m as f64).ln(),
    };
    (0..=m).map(|a| s + ln_factorial(a) + ln_factorial(m - a) - top).sum()
}

pub fn l2_gram(family: Family, m: u32, metric: &SectionMetric, volume: VolumeConvention) -> Result<SectionGram, QuantizedError> {
    match (family, metric) {
        (Family::P1Fs, SectionMetric::FubiniStudy) => Ok(fs_gram_closed_form(m, volume)),
        (Family::P1Fs, SectionMetric::FsOf(_)) => l2_gram_quadrature(m, metric, volume, &default_grid(m)),
    }
}

/// Gauss–Legendre × uniform grid adequate for degree-m integrands.
pub fn default_grid(m: u32) -> FiberGeometry {
    let nt = (2 * m as usize + 24).max(32);
    FiberGeometry::sphere(nt, 2 * nt, 1).expect("valid grid")
}

/// Per-node data of the FS(H) metric: pointwise inner products of the basis,
/// the density of ω_{FS(H)} against ω_FS, and log of B̃ = B/(1+|ζ|²)^m.
pub(crate) struct NodeData {
    pub inner: DMatrix<f64>,
    pub density: f64,
    pub log_bt: f64,
}

pub(crate) fn node_data(m: u32, hinv: &DMatrix<f64>, x: f64, psi: f64) -> NodeData {
    let n = m as usize + 1;
    // chart with |ζ| ≤ 1: ζ = z = Z1/Z0 near x = 1, ζ = 1/z otherwise
    let north = x >= 0.0;
    let r2 = if north { (1.0 - x) / (1.0 + x) } else { (1.0 + x) / (1.0 - x) };
    let zeta = Complex64::from_polar(r2.sqrt(), if north { psi } else { -psi });
    let exps: Vec<u32> = (0..=m).map(|a| if north { a } else { m - a }).collect();
    let v: Vec<Complex64> = exps.iter().map(|&e| zeta.powu(e)).collect();
    let dv: Vec<Complex64> = exps.iter().map(|&e| if e == 0 { Complex64::new(0.0, 0.0) } else { zeta.powu(e - 1) * e as f64 }).collect();
    let (mut b, mut bz, mut bzz) = (0.0, Complex64::new(0.0, 0.0), 0.0);
    for i in 0..n {
        for j in 0..n {
            let c = hinv[(i, j)];
            if c == 0.0 {
                continue;
            }
            b += c * (v[i].conj() * v[j]).re;
            bz += v[i].conj() * dv[j] * c;
            bzz += c * (dv[i].conj() * dv[j]).re;
        }
    }
    let ddbar = (b * bzz - bz.norm_sqr()) / (b * b);
    let density = (1.0 + r2).powi(2) * ddbar / m as f64;
    let mut inner = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            inner[(i, j)] = (v[i] * v[j].conj()).re / b;
        }
    }
    NodeData { inner, density, log_bt: b.ln() - m as f64 * (1.0 + r2).ln() }
}

fn check_sphere(grid: &FiberGeometry) -> Result<(), QuantizedError> {
    if grid.kind() != FiberKind::Sphere || grid.degree() != 1 {
        return Err(QuantizedError::UnsupportedFamily("Gram quadrature needs the degree-1 sphere grid".into()));
    }
    Ok(())
}

/// Gram by quadrature on the sphere grid.
pub fn l2_gram_quadrature(m: u32, metric: &SectionMetric, volume: VolumeConvention, grid: &FiberGeometry) -> Result<SectionGram, QuantizedError> {
    check_sphere(grid)?;
    let n = m as usize + 1;
    let scale = match volume {
        VolumeConvention::Omega => 1.0,
        VolumeConvention::MOmega => m as f64,
    };
    let w = grid.weights();
    let mut gram = DMatrix::zeros(n, n);
    match metric {
        SectionMetric::FubiniStudy => {
            for (k, node) in grid.nodes().into_iter().enumerate() {
                let (p, q) = ((1.0 - node.a) / 2.0, (1.0 + node.a) / 2.0);
                for a in 0..n {
                    for b in a..n {
                        let mag = (p.powi(a as i32) * q.powi((m as usize - a) as i32) * p.powi(b as i32) * q.powi((m as usize - b) as i32)).sqrt();
                        let v = mag * ((a as f64 - b as f64) * node.b).cos();
                        gram[(a, b)] += w[k] * v;
                    }
                }
            }
        }
        SectionMetric::FsOf(h) => {
            let hinv = checked_inverse(h, n)?;
            for (k, node) in grid.nodes().into_iter().enumerate() {
                let d = node_data(m, &hinv, node.a, node.b);
                for a in 0..n {
                    for b in a..n {
                        gram[(a, b)] += w[k] * d.density * d.inner[(a, b)];
                    }
                }
            }
        }
    }
    for a in 0..n {
        for b in 0..a {
            gram[(a, b)] = gram[(b, a)];
        }
    }
    Ok(SectionGram { m, basis: monomial_labels(m), gram: gram * scale, volume })
}

pub(crate) fn check_symmetric(h: &DMatrix<f64>) -> Result<(), QuantizedError> {
    if !h.is_square() {
        return Err(QuantizedError::DimensionMismatch(format!("{}×{} Gram", h.nrows(), h.ncols())));
    }
    let scale = h.amax().max(f64::MIN_POSITIVE);
    if (h - h.transpose()).amax() > 1e-12 * scale {
        return Err(QuantizedError::NonSymmetric);
    }
    Ok(())
}

pub(crate) fn checked_inverse(h: &DMatrix<f64>, n: usize) -> Result<DMatrix<f64>, QuantizedError> {
    if h.nrows() != n {
        return Err(QuantizedError::DimensionMismatch(format!("H is {}×{}, rank is {n}", h.nrows(), h.ncols())));
    }
    check_symmetric(h)?;
    let ch = nalgebra::Cholesky::new(h.clone()).ok_or(QuantizedError::NonPositiveDefinite)?;
    Ok(ch.inverse())
}

/// deĝ = −½·log det(gram).
pub fn arithmetic_degree(g: &SectionGram) -> Result<f64, QuantizedError> {
    check_symmetric(&g.gram)?;
    let ch = nalgebra::Cholesky::new(g.gram.clone()).ok_or(QuantizedError::NonPositiveDefinite)?;
    let l = ch.l();
    let mut s = 0.0;
    for i in 0..l.nrows() {
        let d = l[(i, i)];
        if !(d > 0.0) {
            return Err(QuantizedError::NonPositiveDefinite);
        }
        s += d.ln();
    }
    Ok(-s)
}
