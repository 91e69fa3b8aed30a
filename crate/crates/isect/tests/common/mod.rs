#![allow(dead_code)]

use heightnum::{q, HeightValue, Q};
use isect::{BaseKind, DivisorClass, ClassKind, IntersectionModel, ModelPair, ref_name};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rand_q(r: &mut ChaCha8Rng) -> Q {
    q(r.random_range(-12..=12), r.random_range(1..=6))
}

pub fn rand_hv(r: &mut ChaCha8Rng, with_real: bool) -> HeightValue {
    let mut v = HeightValue::from_q(rand_q(r));
    for p in [2u64, 3, 5] {
        if r.random_bool(0.5) {
            v += &HeightValue::log_term(p, rand_q(r)).unwrap();
        }
    }
    if with_real {
        v += &HeightValue::real(r.random_range(-2.0..2.0));
    }
    v
}

/// Random total form over L, K, an auxiliary horizontal class and a vertical
/// class over 2; generic degrees filled for every horizontal n-fold product.
pub fn random_model(r: &mut ChaCha8Rng, n: usize, deg_ln: Q, deg_lk: Q) -> IntersectionModel {
    let classes = vec![
        DivisorClass::new("L", ClassKind::Polarization),
        DivisorClass::new("K", ClassKind::RelativeCanonical),
        DivisorClass::new("M", ClassKind::Auxiliary),
        DivisorClass::vertical("V2", 2, "a"),
    ];
    let mut m = IntersectionModel::skeleton(n, 1, BaseKind::Arithmetic, classes, "L", "K", deg_ln, deg_lk).unwrap();
    for mono in m.form.all_monomials() {
        m.form.set_monomial(mono, rand_hv(r, true));
    }
    let horiz = ["L", "K", "M"];
    let tmp = isect::IntersectionForm::new(horiz.iter().map(|s| s.to_string()).collect(), n).unwrap();
    for mono in tmp.all_monomials() {
        let names: Vec<&str> = mono.iter().map(|&i| horiz[i]).collect();
        let is_default = names.iter().filter(|s| **s == "L").count() >= n - 1 && !names.contains(&"M");
        if !is_default {
            m.set_generic(&names, rand_q(r));
        }
    }
    m
}

/// Same generic fibre as `template`, fresh random entries.
pub fn sibling(r: &mut ChaCha8Rng, template: &IntersectionModel) -> IntersectionModel {
    let mut m = random_model(r, template.n, template.deg_ln.clone(), template.deg_lk.clone());
    m.generic = template.generic.clone();
    m
}

/// Pair with random (non-geometric) mixed entries.
pub fn random_pair(r: &mut ChaCha8Rng, n: usize) -> ModelPair {
    let a = random_model(r, n, q(3, 1), q(-2, 1));
    let b = sibling(r, &a);
    let names: Vec<String> = a.form.names().iter().cloned().chain(b.form.names().iter().map(|s| ref_name(s))).collect();
    let tmp = isect::IntersectionForm::new(names.clone(), n + 1).unwrap();
    let k = a.form.names().len();
    let mut mixed = Vec::new();
    for mono in tmp.all_monomials() {
        if mono.iter().any(|&i| i < k) && mono.iter().any(|&i| i >= k) {
            mixed.push((mono.iter().map(|&i| names[i].clone()).collect(), rand_hv(r, true)));
        }
    }
    ModelPair::new(a, b, mixed).unwrap()
}

/// Geometric-base model with one fibre over the point 1 split into two components.
/// Restricted degrees follow the form, the fibre class sums to the generic degrees.
pub fn two_component_model(dl: (Q, Q), dlk: (Q, Q), n: usize) -> IntersectionModel {
    let deg_ln = &dl.0 + &dl.1;
    let deg_lk = &dlk.0 + &dlk.1;
    let classes = vec![
        DivisorClass::new("L", ClassKind::Polarization),
        DivisorClass::new("K", ClassKind::RelativeCanonical),
        DivisorClass::vertical("E1", 7, "e1"),
        DivisorClass::vertical("E2", 7, "e2"),
    ];
    let mut m = IntersectionModel::skeleton(n, 1, BaseKind::Geometric, classes, "L", "K", deg_ln, deg_lk).unwrap();
    for mono in m.form.all_monomials() {
        let names: Vec<&str> = mono.iter().map(|&i| ["L", "K", "E1", "E2"][i]).collect();
        let verticals: Vec<&str> = names.iter().copied().filter(|s| s.starts_with('E')).collect();
        let v = match verticals.len() {
            0 => q(((mono.iter().sum::<usize>() * 7) % 5) as i64 - 2, 3),
            1 => {
                let idx = if verticals[0] == "E1" { 0 } else { 1 };
                let ks = names.iter().filter(|s| **s == "K").count();
                match ks {
                    0 => if idx == 0 { dl.0.clone() } else { dl.1.clone() },
                    1 => if idx == 0 { dlk.0.clone() } else { dlk.1.clone() },
                    _ => q(-1 - idx as i64, 2),
                }
            }
            // E1·E2 = −E1² = −E2² keeps the fibre class numerically trivial on verticals
            2 => {
                let same = verticals[0] == verticals[1];
                let c = q(((names.len() + verticals.len()) % 3) as i64 + 1, 1);
                if same { -c } else { c }
            }
            _ => q(0, 1),
        };
        m.form.set_monomial(mono, HeightValue::from_q(v));
    }
    m.fibers.push(isect::FiberComponent::new(7, "e1", dl.0.clone(), dlk.0.clone(), 1));
    m.fibers.push(isect::FiberComponent::new(7, "e2", dl.1.clone(), dlk.1.clone(), 1));
    m.validate().unwrap();
    m
}
