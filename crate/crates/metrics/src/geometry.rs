//! Fibre grids and the density operator D with dd^c u = D[u]·ω.
//!
//! Sphere: P¹ with ω = k·ω_FS (mass k), nodes Gauss–Legendre in cos θ times
//! uniform longitude; D = Δ_{S²}/k, Laplacian applied spectrally.
//! Torus: ℂ/(ℤ + τℤ) in lattice coordinates z = s + tτ with the flat form of
//! mass d; D = (Im τ/(4πd))·Δ_flat, applied by FFT.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::quadrature::{gauss_legendre, weighted_sum};
use crate::MetricsError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FiberKind {
    Sphere,
    Torus { tau: Complex64 },
}

#[derive(Debug)]
struct Inner {
    kind: FiberKind,
    n_a: usize,
    n_b: usize,
    degree: u32,
    /// cos θ on the sphere, s on the torus
    coord_a: Vec<f64>,
    coord_b: Vec<f64>,
    weights: Vec<f64>,
    gl_weights: Vec<f64>,
    /// legendre[m][l − m][j] = orthonormal P̄_l^m(x_j), sphere only
    legendre: Vec<Vec<Vec<f64>>>,
}

/// A quadrature grid on the n = 1 fibre; cheap to clone.
#[derive(Debug, Clone)]
pub struct FiberGeometry(Arc<Inner>);

/// Grid node coordinates: (cos θ, ψ) on the sphere, (s, t) on the torus.
#[derive(Debug, Clone, Copy)]
pub struct Node {
    pub a: f64,
    pub b: f64,
}

impl FiberGeometry {
    /// n_theta Gauss–Legendre latitudes × n_psi longitudes, ω = degree·ω_FS.
    pub fn sphere(n_theta: usize, n_psi: usize, degree: u32) -> Result<Self, MetricsError> {
        if n_theta < 2 || n_psi < 4 || n_psi % 2 != 0 || degree == 0 {
            return Err(MetricsError::GeometryMismatch(format!(
                "sphere grid needs n_theta ≥ 2, even n_psi ≥ 4, degree ≥ 1 (got {n_theta}, {n_psi}, {degree})"
            )));
        }
        let (x, w) = gauss_legendre(n_theta);
        let coord_b: Vec<f64> = (0..n_psi).map(|k| 2.0 * PI * k as f64 / n_psi as f64).collect();
        let mass = degree as f64;
        let mut weights = Vec::with_capacity(n_theta * n_psi);
        for wi in &w {
            for _ in 0..n_psi {
                weights.push(mass * wi / (2.0 * n_psi as f64));
            }
        }
        let mmax = (n_theta - 1).min(n_psi / 2 - 1);
        let legendre = (0..=mmax).map(|m| legendre_table(m, n_theta - 1, &x)).collect();
        Ok(FiberGeometry(Arc::new(Inner {
            kind: FiberKind::Sphere,
            n_a: n_theta,
            n_b: n_psi,
            degree,
            coord_a: x,
            coord_b,
            weights,
            gl_weights: w,
            legendre,
        })))
    }

    /// Uniform n × n grid on the fundamental domain, flat form of mass `degree`.
    pub fn torus(tau: Complex64, n: usize, degree: u32) -> Result<Self, MetricsError> {
        if tau.im <= 0.0 || n < 4 || degree == 0 {
            return Err(MetricsError::GeometryMismatch(format!("torus needs Im τ > 0, n ≥ 4, degree ≥ 1 (got τ = {tau}, n = {n})")));
        }
        let c: Vec<f64> = (0..n).map(|k| k as f64 / n as f64).collect();
        let weights = vec![degree as f64 / (n * n) as f64; n * n];
        Ok(FiberGeometry(Arc::new(Inner {
            kind: FiberKind::Torus { tau },
            n_a: n,
            n_b: n,
            degree,
            coord_a: c.clone(),
            coord_b: c,
            weights,
            gl_weights: vec![],
            legendre: vec![],
        })))
    }

    pub fn kind(&self) -> FiberKind {
        self.0.kind
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.0.n_a, self.0.n_b)
    }

    pub fn len(&self) -> usize {
        self.0.n_a * self.0.n_b
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn degree(&self) -> u32 {
        self.0.degree
    }

    /// V = ∫ω.
    pub fn volume(&self) -> f64 {
        self.0.degree as f64
    }

    pub fn weights(&self) -> &[f64] {
        &self.0.weights
    }

    pub fn node(&self, idx: usize) -> Node {
        let (i, j) = (idx / self.0.n_b, idx % self.0.n_b);
        Node { a: self.0.coord_a[i], b: self.0.coord_b[j] }
    }

    pub fn nodes(&self) -> Vec<Node> {
        (0..self.len()).map(|i| self.node(i)).collect()
    }

    /// Scalar curvature of the reference form, S(ω) with Ric(ω) = S·ω.
    pub fn reference_scalar_curvature(&self) -> f64 {
        match self.0.kind {
            FiberKind::Sphere => 2.0 / self.0.degree as f64,
            FiberKind::Torus { .. } => 0.0,
        }
    }

    /// S̄ = n·(−deg_LK)/deg_Ln for the polarization of this degree.
    pub fn sbar(&self) -> f64 {
        self.reference_scalar_curvature()
    }

    /// (deg_Ln, deg_LK) of the polarization.
    pub fn generic_degrees(&self) -> (i64, i64) {
        match self.0.kind {
            FiberKind::Sphere => (self.0.degree as i64, -2),
            FiberKind::Torus { .. } => (self.0.degree as i64, 0),
        }
    }

    /// ∫ a·ω.
    pub fn integrate(&self, a: &[f64]) -> f64 {
        weighted_sum(&self.0.weights, a)
    }

    pub fn same_grid(&self, other: &FiberGeometry) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.kind == other.0.kind && self.shape() == other.shape() && self.0.degree == other.0.degree)
    }

    /// D[u] with dd^c u = D[u]·ω.
    pub fn density_operator(&self, u: &[f64]) -> Vec<f64> {
        assert_eq!(u.len(), self.len());
        match self.0.kind {
            FiberKind::Sphere => {
                let k = self.0.degree as f64;
                self.sphere_laplacian(u).into_iter().map(|v| v / k).collect()
            }
            FiberKind::Torus { tau } => {
                let c = tau.im / (4.0 * PI * self.0.degree as f64);
                self.spectral_torus(u, |k, l| {
                    let a = (l - k * tau.re) / tau.im;
                    -(2.0 * PI).powi(2) * (k * k + a * a) * c
                })
            }
        }
    }

    /// Flat Laplacian ∂²_x + ∂²_y on the torus (z = x + iy).
    pub fn torus_flat_laplacian(&self, u: &[f64]) -> Option<Vec<f64>> {
        match self.0.kind {
            FiberKind::Torus { tau } => Some(self.spectral_torus(u, |k, l| {
                let a = (l - k * tau.re) / tau.im;
                -(2.0 * PI).powi(2) * (k * k + a * a)
            })),
            FiberKind::Sphere => None,
        }
    }

    fn spectral_torus(&self, u: &[f64], symbol: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        let n = self.0.n_a;
        let mut data: Vec<Complex64> = u.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft2(&mut data, n, false);
        let signed = |i: usize| if i <= n / 2 { i as f64 } else { i as f64 - n as f64 };
        for i in 0..n {
            for j in 0..n {
                // row index i ↔ s ↔ k, column j ↔ t ↔ l; Nyquist rows/columns dropped
                let v = if (n % 2 == 0) && (i == n / 2 || j == n / 2) { 0.0 } else { symbol(signed(i), signed(j)) };
                data[i * n + j] *= v / (n * n) as f64;
            }
        }
        fft2(&mut data, n, true);
        data.into_iter().map(|c| c.re).collect()
    }

    /// Fraction of spectral energy in modes with max(|k|,|l|) > n/4; the torus
    /// smoothness diagnostic.
    pub fn spectral_tail(&self, u: &[f64]) -> Option<f64> {
        if !matches!(self.0.kind, FiberKind::Torus { .. }) {
            return None;
        }
        let n = self.0.n_a;
        let mut data: Vec<Complex64> = u.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft2(&mut data, n, false);
        let signed = |i: usize| if i <= n / 2 { i as i64 } else { i as i64 - n as i64 };
        let (mut tot, mut tail) = (0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                if i == 0 && j == 0 {
                    continue;
                }
                let e = data[i * n + j].norm_sqr();
                tot += e;
                if signed(i).abs().max(signed(j).abs()) as usize > n / 4 {
                    tail += e;
                }
            }
        }
        Some(if tot == 0.0 { 0.0 } else { tail / tot })
    }

    /// Laplace–Beltrami of the unit sphere through the truncated harmonic transform.
    pub fn sphere_laplacian(&self, u: &[f64]) -> Vec<f64> {
        let inner = &*self.0;
        let (nt, np) = (inner.n_a, inner.n_b);
        let mut planner = FftPlanner::<f64>::new();
        let fwd = planner.plan_fft_forward(np);
        let inv = planner.plan_fft_inverse(np);
        let rows: Vec<Vec<Complex64>> = (0..nt)
            .map(|j| {
                let mut r: Vec<Complex64> = u[j * np..(j + 1) * np].iter().map(|&v| Complex64::new(v, 0.0)).collect();
                fwd.process(&mut r);
                r.iter_mut().for_each(|c| *c /= np as f64);
                r
            })
            .collect();
        let mmax = inner.legendre.len() - 1;
        let mut out: Vec<Vec<Complex64>> = vec![vec![Complex64::new(0.0, 0.0); np]; nt];
        for m in 0..=mmax {
            let table = &inner.legendre[m];
            let cols: Vec<usize> = if m == 0 { vec![0] } else { vec![m, np - m] };
            for col in cols {
                for (li, p) in table.iter().enumerate() {
                    let l = (m + li) as f64;
                    let mut c = Complex64::new(0.0, 0.0);
                    for j in 0..nt {
                        c += rows[j][col] * (inner.gl_weights[j] * p[j]);
                    }
                    let c = c * (-l * (l + 1.0));
                    for j in 0..nt {
                        out[j][col] += c * p[j];
                    }
                }
            }
        }
        let mut res = Vec::with_capacity(nt * np);
        for row in out.iter_mut() {
            inv.process(row);
            res.extend(row.iter().map(|c| c.re));
        }
        res
    }
}

/// Orthonormal P̄_l^m on [−1, 1] for l = m..=lmax at the nodes.
fn legendre_table(m: usize, lmax: usize, x: &[f64]) -> Vec<Vec<f64>> {
    if m > lmax {
        return vec![];
    }
    let mut pmm: Vec<f64> = vec![(0.5f64).sqrt(); x.len()];
    for k in 1..=m {
        let f = ((2 * k + 1) as f64 / (2 * k) as f64).sqrt();
        for (p, xi) in pmm.iter_mut().zip(x) {
            *p *= f * (1.0 - xi * xi).sqrt();
        }
    }
    let mut table = vec![pmm.clone()];
    if m < lmax {
        let p1: Vec<f64> = pmm.iter().zip(x).map(|(p, xi)| xi * ((2 * m + 3) as f64).sqrt() * p).collect();
        table.push(p1);
    }
    for l in (m + 2)..=lmax {
        let (lf, mf) = (l as f64, m as f64);
        let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
        let b = (((lf - 1.0).powi(2) - mf * mf) / (4.0 * (lf - 1.0).powi(2) - 1.0)).sqrt();
        let t = table.len();
        let next: Vec<f64> = (0..x.len()).map(|j| a * (x[j] * table[t - 1][j] - b * table[t - 2][j])).collect();
        table.push(next);
    }
    table
}

fn fft2(data: &mut [Complex64], n: usize, inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    let fft = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
    for row in data.chunks_mut(n) {
        fft.process(row);
    }
    let mut col = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        for i in 0..n {
            col[i] = data[i * n + j];
        }
        fft.process(&mut col);
        for i in 0..n {
            data[i * n + j] = col[i];
        }
    }
}
