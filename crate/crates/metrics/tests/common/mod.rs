#![allow(dead_code)]

use heightnum::{q, HeightValue};
use isect::{BaseKind, ClassKind, DivisorClass, FiberComponent, IntersectionModel};
use metrics::{FiberGeometry, Node, PotentialField};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

pub fn xyz(n: Node) -> (f64, f64, f64) {
    let r = (1.0 - n.a * n.a).max(0.0).sqrt();
    (r * n.b.cos(), r * n.b.sin(), n.a)
}

pub fn sphere(nt: usize) -> FiberGeometry {
    FiberGeometry::sphere(nt, 2 * nt, 1).unwrap()
}

pub fn torus(tau: Complex64, n: usize, d: u32) -> FiberGeometry {
    FiberGeometry::torus(tau, n, d).unwrap()
}

/// Smooth bump centred at the north pole.
pub fn bump(g: &FiberGeometry, eps: f64) -> PotentialField {
    PotentialField::from_fn(g.clone(), |n| {
        let (x, _, z) = xyz(n);
        eps * (1.5 * z + 0.5 * x * z).exp()
    })
}

/// Random low-degree harmonic mix plus an exponential term, scaled until Kähler.
pub fn random_sphere_potential(g: &FiberGeometry, seed: u64) -> PotentialField {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let c: Vec<f64> = (0..8).map(|_| r.random_range(-1.0..1.0)).collect();
    let raw = PotentialField::from_fn(g.clone(), |n| {
        let (x, y, z) = xyz(n);
        c[0] * x + c[1] * y + c[2] * z + c[3] * x * y + c[4] * (x * x - z * z) + c[5] * y * z * z + c[6] * (c[7] * x + z).exp()
    });
    let mut s = 0.3;
    loop {
        let p = raw.scaled(s);
        if p.density().iter().all(|f| *f > 0.2) {
            return p;
        }
        s *= 0.7;
    }
}

pub fn random_torus_potential(g: &FiberGeometry, seed: u64) -> PotentialField {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let c: Vec<f64> = (0..6).map(|_| r.random_range(-1.0..1.0)).collect();
    let raw = PotentialField::from_fn(g.clone(), |n| {
        let (s, t) = (2.0 * PI * n.a, 2.0 * PI * n.b);
        c[0] * s.cos() + c[1] * (s + t).sin() + c[2] * (2.0 * s - t).cos() + c[3] * (c[4] * s.cos() + c[5] * t.sin()).exp()
    });
    let mut s = 0.05;
    loop {
        let p = raw.scaled(s);
        if p.density().iter().all(|f| *f > 0.2) {
            return p;
        }
        s *= 0.7;
    }
}

/// (P¹_ℤ, O(1), FS) with one vertical class over 3.
pub fn p1_model() -> IntersectionModel {
    let classes = vec![
        DivisorClass::new("L", ClassKind::Polarization),
        DivisorClass::new("K", ClassKind::RelativeCanonical),
        DivisorClass::vertical("F3", 3, "0"),
    ];
    let mut m = IntersectionModel::skeleton(1, 1, BaseKind::Arithmetic, classes, "L", "K", q(1, 1), q(-2, 1)).unwrap();
    m.set(&["L", "L"], HeightValue::from_q(q(1, 2))).unwrap();
    m.set(&["L", "K"], HeightValue::from_int(-1).add_real(0.5 * (2.0 * PI).ln())).unwrap();
    m.set(&["K", "K"], HeightValue::real(0.41)).unwrap();
    m.set(&["L", "F3"], HeightValue::log(3).unwrap()).unwrap();
    m.set(&["K", "F3"], HeightValue::log_term(3, q(-2, 1)).unwrap()).unwrap();
    m.set(&["F3", "F3"], HeightValue::zero()).unwrap();
    m.fibers.push(FiberComponent::new(3, "0", q(1, 1), q(-2, 1), 1));
    m.validate().unwrap();
    m
}

/// Elliptic-curve model of polarization degree d, deg_LK = 0.
pub fn torus_model(d: i64) -> IntersectionModel {
    let classes = vec![DivisorClass::new("L", ClassKind::Polarization), DivisorClass::new("K", ClassKind::RelativeCanonical)];
    let mut m = IntersectionModel::skeleton(1, 1, BaseKind::Arithmetic, classes, "L", "K", q(d, 1), q(0, 1)).unwrap();
    m.set(&["L", "L"], HeightValue::real(0.7)).unwrap();
    m.set(&["L", "K"], HeightValue::log_term(2, q(d, 12)).unwrap().add_real(-0.3)).unwrap();
    m.set(&["K", "K"], HeightValue::zero()).unwrap();
    m.validate().unwrap();
    m
}
