//! Faltings heights of elliptic curves over ℚ.
//!
//! Normalization: the Néron differential α is measured by
//! (α, ᾱ) = (i/2)∫α∧ᾱ, the covolume of its period lattice, so
//! h_F = −½·log covol = (1/12)[log|Δ_min| − log(|Δ(τ)|(Im τ)^6)] − log 2π.
//! Other common normalizations differ by constants:
//!
//! | metric on α          | height        |
//! |----------------------|---------------|
//! | (i/2)∫α∧ᾱ (here)     | h_F           |
//! | i∫α∧ᾱ                | h_F − ½·log 2 |
//! | (i/2π)∫α∧ᾱ           | h_F + ½·log π |

use std::f64::consts::PI;

use heightnum::{q, qi, HeightValue, Q};
use isect::{BaseKind, ClassKind, DivisorClass, IntersectionModel};
use num_complex::Complex64;

use crate::FamiliesError;

/// Minimum number of factors in the product for Δ(τ).
pub const MIN_Q_TERMS: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct EllipticCurveData {
    /// [a1, a2, a3, a4, a6]
    pub a: [i64; 5],
    pub delta_min: i64,
    pub tau: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodLattice {
    /// real period
    pub omega1: f64,
    /// imaginary part of the second generator
    pub omega2_im: f64,
    pub tau: Complex64,
}

impl PeriodLattice {
    pub fn covolume(&self) -> f64 {
        self.omega1 * self.omega2_im
    }
}

fn b_invariants(a: &[i64; 5]) -> (i128, i128, i128, i128) {
    let [a1, a2, a3, a4, a6] = a.map(|x| x as i128);
    let b2 = a1 * a1 + 4 * a2;
    let b4 = 2 * a4 + a1 * a3;
    let b6 = a3 * a3 + 4 * a6;
    let b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
    (b2, b4, b6, b8)
}

pub fn discriminant(a: &[i64; 5]) -> i128 {
    let (b2, b4, b6, b8) = b_invariants(a);
    -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6
}

impl EllipticCurveData {
    pub fn new(a: [i64; 5], delta_min: i64, tau: Complex64) -> Result<Self, FamiliesError> {
        let d = discriminant(&a);
        if d == 0 {
            return Err(FamiliesError::InvalidArgument("singular Weierstrass equation".into()));
        }
        if d != delta_min as i128 {
            return Err(FamiliesError::NonMinimalModel { computed: d.to_string(), given: delta_min });
        }
        if !(tau.im > 0.0) || !tau.re.is_finite() {
            return Err(FamiliesError::BadTau(tau.to_string()));
        }
        Ok(EllipticCurveData { a, delta_min, tau })
    }

    /// Takes Δ_min from the coefficients and τ from the AGM periods.
    pub fn from_coefficients(a: [i64; 5]) -> Result<Self, FamiliesError> {
        let d = discriminant(&a);
        let delta = i64::try_from(d).map_err(|_| FamiliesError::InvalidArgument("discriminant out of range".into()))?;
        let lat = period_lattice(&a)?;
        Self::new(a, delta, lat.tau)
    }
}

fn agm(mut x: f64, mut y: f64) -> f64 {
    for _ in 0..64 {
        if (x - y).abs() <= 1e-16 * x.abs() {
            break;
        }
        (x, y) = ((x + y) / 2.0, (x * y).sqrt());
    }
    (x + y) / 2.0
}

/// Real roots of 4x³ + b2x² + 2b4x + b6 in decreasing order.
fn real_roots(b2: f64, b4: f64, b6: f64, three: bool) -> Vec<f64> {
    let (ca, cb, cc) = (b2 / 4.0, b4 / 2.0, b6 / 4.0);
    let p = cb - ca * ca / 3.0;
    let qq = 2.0 * ca * ca * ca / 27.0 - ca * cb / 3.0 + cc;
    let ts: Vec<f64> = if three {
        let r = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * qq / (2.0 * p) * (-3.0 / p).sqrt()).clamp(-1.0, 1.0);
        let th = arg.acos() / 3.0;
        (0..3).map(|k| r * (th - 2.0 * PI * k as f64 / 3.0).cos()).collect()
    } else {
        let s = (qq * qq / 4.0 + p * p * p / 27.0).sqrt();
        vec![(-qq / 2.0 + s).cbrt() + (-qq / 2.0 - s).cbrt()]
    };
    let f = |x: f64| ((x + ca) * x + cb) * x + cc;
    let df = |x: f64| (3.0 * x + 2.0 * ca) * x + cb;
    let mut xs: Vec<f64> = ts
        .into_iter()
        .map(|t| {
            let mut x = t - ca / 3.0;
            for _ in 0..3 {
                let d = df(x);
                if d != 0.0 {
                    x -= f(x) / d;
                }
            }
            x
        })
        .collect();
    xs.sort_by(|a, b| b.partial_cmp(a).unwrap());
    xs
}

/// Periods of dx/(2y + a1x + a3) by the arithmetic–geometric mean.
pub fn period_lattice(a: &[i64; 5]) -> Result<PeriodLattice, FamiliesError> {
    let d = discriminant(a);
    if d == 0 {
        return Err(FamiliesError::InvalidArgument("singular Weierstrass equation".into()));
    }
    let (b2, b4, b6, _) = b_invariants(a);
    let (b2, b4, b6) = (b2 as f64, b4 as f64, b6 as f64);
    if d > 0 {
        let e = real_roots(b2, b4, b6, true);
        let w1 = PI / agm((e[0] - e[2]).sqrt(), (e[0] - e[1]).sqrt());
        let y = PI / agm((e[0] - e[2]).sqrt(), (e[1] - e[2]).sqrt());
        Ok(PeriodLattice { omega1: w1, omega2_im: y, tau: Complex64::new(0.0, y / w1) })
    } else {
        let e1 = real_roots(b2, b4, b6, false)[0];
        let beta = 3.0 * e1 + b2 / 4.0;
        let alpha = (3.0 * e1 * e1 + b2 * e1 / 2.0 + b4 / 2.0).sqrt();
        let w1 = 2.0 * PI / agm(2.0 * alpha.sqrt(), (2.0 * alpha + beta).sqrt());
        let y = PI / agm(2.0 * alpha.sqrt(), (2.0 * alpha - beta).sqrt());
        Ok(PeriodLattice { omega1: w1, omega2_im: y, tau: Complex64::new(0.5, y / w1) })
    }
}

/// Δ(τ) = q∏(1 − q^k)^24, q = e^{2πiτ}.
pub fn modular_discriminant(tau: Complex64) -> Result<Complex64, FamiliesError> {
    if !(tau.im > 0.0) {
        return Err(FamiliesError::BadTau(tau.to_string()));
    }
    let qn = (Complex64::new(0.0, 2.0 * PI) * tau).exp();
    // log of the product, so that small Im τ does not overflow
    let mut log_prod = Complex64::new(0.0, 0.0);
    let mut qk = qn;
    let mut k = 1;
    while k <= MIN_Q_TERMS || qk.norm() > 1e-18 {
        log_prod += (Complex64::new(1.0, 0.0) - qk).ln();
        qk *= qn;
        k += 1;
        if k > 1_000_000 {
            break;
        }
    }
    Ok(qn * (log_prod * 24.0).exp())
}

/// log|Δ(τ)| through the q-product, without forming Δ itself.
fn log_abs_modular_discriminant(tau: Complex64) -> f64 {
    let qn = (Complex64::new(0.0, 2.0 * PI) * tau).exp();
    let mut s = -2.0 * PI * tau.im;
    let mut qk = qn;
    let mut k = 1;
    while k <= MIN_Q_TERMS || qk.norm() > 1e-18 {
        s += 24.0 * (Complex64::new(1.0, 0.0) - qk).norm().ln();
        qk *= qn;
        k += 1;
        if k > 1_000_000 {
            break;
        }
    }
    s
}

/// h_F(E) from Δ_min and the q-expansion of Δ at the period ratio.
pub fn elliptic_faltings_height(e: &EllipticCurveData) -> Result<f64, FamiliesError> {
    if !(e.tau.im > 0.0) {
        return Err(FamiliesError::BadTau(e.tau.to_string()));
    }
    let log_delta = (e.delta_min.unsigned_abs() as f64).ln();
    let log_mod = log_abs_modular_discriminant(e.tau) + 6.0 * e.tau.im.ln();
    Ok((log_delta - log_mod) / 12.0 - (2.0 * PI).ln())
}

/// h_F(E) = −½·log of the covolume of the Néron period lattice.
pub fn faltings_height_from_periods(a: &[i64; 5]) -> Result<f64, FamiliesError> {
    Ok(-0.5 * period_lattice(a)?.covolume().ln())
}

/// h_K = 2d·(h_F + ½·log d) for the polarization of degree d.
pub fn faltings_to_hk(e: &EllipticCurveData, d: u32) -> Result<f64, FamiliesError> {
    if d == 0 {
        return Err(FamiliesError::InvalidArgument("polarization degree must be ≥ 1".into()));
    }
    Ok(hk_from_faltings(elliptic_faltings_height(e)?, d))
}

pub fn hk_from_faltings(h_f: f64, d: u32) -> f64 {
    let df = d as f64;
    2.0 * df * (h_f + 0.5 * df.ln())
}

/// ½·log d as exact log terms.
fn half_log(d: u32) -> HeightValue {
    let mut v = HeightValue::zero();
    let mut m = d as u64;
    let mut p = 2;
    while m > 1 {
        while m % p == 0 {
            v += &HeightValue::log_term(p, q(1, 2)).expect("trial divisor is prime");
            m /= p;
        }
        p += 1;
    }
    v
}

/// Intersection model of (E, O(d·0)) whose h_K is the Faltings bridge value:
/// (L̄²) = 0, (L̄.K̄) = h_F + ½·log d.
pub fn build_elliptic_model(e: &EllipticCurveData, d: u32) -> Result<IntersectionModel, FamiliesError> {
    if d == 0 {
        return Err(FamiliesError::InvalidArgument("polarization degree must be ≥ 1".into()));
    }
    let h_f = elliptic_faltings_height(e)?;
    let classes = vec![DivisorClass::new("L", ClassKind::Polarization), DivisorClass::new("K", ClassKind::RelativeCanonical)];
    let mut m = IntersectionModel::skeleton(1, 1, BaseKind::Arithmetic, classes, "L", "K", qi(d as i64), Q::from_integer(0.into()))?;
    m.set(&["L", "L"], HeightValue::zero())?;
    m.set(&["L", "K"], half_log(d) + HeightValue::real(h_f))?;
    m.set(&["K", "K"], HeightValue::zero())?;
    m.validate()?;
    Ok(m)
}
