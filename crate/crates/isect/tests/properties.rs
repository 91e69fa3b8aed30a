mod common;

use std::collections::BTreeMap;

use common::*;
use heightnum::{q, HeightValue, Q};
use isect::*;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::Rng;

fn rand_comb(r: &mut rand_chacha::ChaCha8Rng, names: &[&str]) -> LinComb {
    let mut c = LinComb::default();
    for n in names {
        if r.random_bool(0.6) {
            c.add_term(n, rand_q(r));
        }
    }
    c
}

fn close(a: &HeightValue, b: &HeightValue) -> bool {
    a.exact_parts_eq(b) && (a.real_part() - b.real_part()).abs() <= 1e-9 * (1.0 + a.real_part().abs())
}

/// f'(0) from samples at ε = 0, ±1, ±2, … by exact Lagrange differentiation.
fn lagrange_derivative_at_zero(xs: &[Q], ys: &[HeightValue]) -> HeightValue {
    let mut acc = HeightValue::zero();
    for j in 0..xs.len() {
        // l_j'(0) = Σ_{k≠j} Π_{m≠j,k}(0 − x_m) / Π_{m≠j}(x_j − x_m)
        let mut denom = Q::one();
        for m in 0..xs.len() {
            if m != j {
                denom *= &xs[j] - &xs[m];
            }
        }
        let mut num = Q::zero();
        for k in 0..xs.len() {
            if k == j {
                continue;
            }
            let mut p = Q::one();
            for m in 0..xs.len() {
                if m != j && m != k {
                    p *= -&xs[m];
                }
            }
            num += p;
        }
        acc += &ys[j].scale(&(num / denom));
    }
    acc
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn form_is_multilinear_in_every_slot(seed in any::<u64>(), n in 1usize..=3, slot in 0usize..4) {
        let mut r = rng(seed);
        let m = random_model(&mut r, n, q(2, 1), q(-1, 1));
        let names = ["L", "K", "M", "V2"];
        let slot = slot % (n + 1);
        let mut slots: Vec<LinComb> = (0..=n).map(|_| rand_comb(&mut r, &names)).collect();
        let x = rand_comb(&mut r, &names);
        let y = rand_comb(&mut r, &names);
        let (a, b) = (rand_q(&mut r), rand_q(&mut r));
        slots[slot] = x.scaled(&a).plus(&y.scaled(&b));
        let lhs = m.eval(&slots).unwrap();
        slots[slot] = x;
        let ex = m.eval(&slots).unwrap();
        slots[slot] = y;
        let ey = m.eval(&slots).unwrap();
        prop_assert!(close(&lhs, &(ex.scale(&a) + ey.scale(&b))));
    }

    #[test]
    fn form_is_symmetric(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = rng(seed);
        let m = random_model(&mut r, n, q(2, 1), q(-1, 1));
        let mut slots: Vec<LinComb> = (0..=n).map(|_| rand_comb(&mut r, &["L", "K", "M", "V2"])).collect();
        let before = m.eval(&slots).unwrap();
        slots.reverse();
        slots.rotate_left(1);
        prop_assert!(close(&before, &m.eval(&slots).unwrap()));
    }

    #[test]
    fn relative_height_cocycle(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = rng(seed);
        let a = random_model(&mut r, n, q(3, 1), q(-5, 2));
        let b = sibling(&mut r, &a);
        let c = sibling(&mut r, &a);
        let lhs = relative_modular_height(&a, &c).unwrap();
        let rhs = relative_modular_height(&a, &b).unwrap() + relative_modular_height(&b, &c).unwrap();
        prop_assert!(close(&lhs, &rhs));
        prop_assert!(relative_modular_height(&a, &a).unwrap().approx_eq(&HeightValue::zero(), 0.0));
    }

    #[test]
    fn decomposition_holds_on_random_pairs(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = rng(seed);
        let pair = random_pair(&mut r, n);
        let (lhs, rhs) = decomposition_check(&pair, None).unwrap();
        prop_assert!(close(&lhs, &rhs));
    }

    #[test]
    fn aubin_identities_on_random_pairs(seed in any::<u64>(), n in 1usize..=3) {
        // I − J is J with the roles of A and B swapped
        let mut r = rng(seed);
        let pair = random_pair(&mut r, n);
        let i = aubin_i_rel(&pair).unwrap();
        let j = aubin_j_rel(&pair).unwrap();
        let (a, b) = (pair.a(), pair.b());
        let n1 = Q::from_integer(((n + 1) as i64).into());
        let nq = Q::from_integer((n as i64).into());
        let expect = (pair.mono(&a, n, &b, 1, &[]).unwrap()
            - pair.mono(&a, n + 1, &b, 0, &[]).unwrap().scale(&(&nq / &n1))
            - pair.mono(&b, n + 1, &a, 0, &[]).unwrap().scale(&(Q::one() / &n1)))
        .scale(&pair.model.one_over_d());
        prop_assert!(close(&(i - j), &expect));
    }

    #[test]
    fn twist_leaves_height_unchanged(seed in any::<u64>(), n in 1usize..=3, c2 in -6i64..=6, c5 in -6i64..=6) {
        let mut r = rng(seed);
        let m = random_model(&mut r, n, q(3, 1), q(-2, 1));
        let mut d = BTreeMap::new();
        d.insert(2u64, q(c2, 1));
        d.insert(5u64, q(c5, 3));
        let t = twist_by_base_divisor(&m, &d).unwrap();
        prop_assert!(close(&modular_height(&t).unwrap(), &modular_height(&m).unwrap()));
        prop_assert!(close(&normalized_df(&t, 2).unwrap(), &normalized_df(&m, 2).unwrap()));
    }

    #[test]
    fn rescale_leaves_height_unchanged(seed in any::<u64>(), n in 1usize..=3, c in -3.0f64..3.0) {
        let mut r = rng(seed);
        let m = random_model(&mut r, n, q(3, 1), q(-2, 1));
        let t = rescale_metric_const(&m, c).unwrap();
        let (a, b) = (modular_height(&t).unwrap(), modular_height(&m).unwrap());
        prop_assert!(a.exact_parts_eq(&b));
        prop_assert!((a.real_part() - b.real_part()).abs() <= 1e-9 * (1.0 + b.real_part().abs()));
    }

    #[test]
    fn twist_derivative_matches_lagrange_grid(
        d1 in 1i64..6, d2 in 1i64..6, k1 in -6i64..6, k2 in -6i64..6, n in 1usize..=2,
    ) {
        let m = two_component_model((q(d1, 1), q(d2, 1)), (q(k1, 1), q(k2, 1)), n);
        let xs: Vec<Q> = (-(n as i64 + 1)..=(n as i64 + 1)).map(|e| q(e, 1)).collect();
        for (cls, id) in [("E1", "e1"), ("E2", "e2")] {
            let ys: Vec<HeightValue> = xs
                .iter()
                .map(|e| {
                    let twisted = m.substitute("L", &LinComb::from_terms(&[("L", Q::one()), (cls, e.clone())])).unwrap();
                    df_numerator(&twisted).unwrap()
                })
                .collect();
            let fd = lagrange_derivative_at_zero(&xs, &ys);
            let an = component_twist_derivative(&m, 7, id).unwrap();
            prop_assert!(fd.exact_eq(&an) == Some(true), "{} vs {}", fd, an);
        }
        // vanishing on every component iff the nA scalar curvature is constant
        let s = na_scalar_curvature(&m, 7).unwrap();
        let constant = s["e1"] == s["e2"];
        let all_zero = ["e1", "e2"].iter().all(|id| component_twist_derivative(&m, 7, id).unwrap().is_zero());
        prop_assert_eq!(constant, all_zero);
        if constant {
            prop_assert_eq!(&s["e1"], &m.sbar());
        }
    }
}
