use std::collections::BTreeMap;

use families::{blowup_constant, blowup_oracle, build_p1_fs, build_p2_blowup_family, oracle_c, FamiliesError};
use heightnum::{q, qi, HeightValue};
use isect::{
    aubin_i_rel, aubin_j_rel, decomposition_check, model_from_json, model_to_json, modular_height, na_scalar_curvature,
    relative_modular_height, rescale_metric_const, twist_by_base_divisor,
};
use quantized::{dequantization_scan, l2_gram_quadrature, default_grid, SectionMetric, VolumeConvention};

#[test]
fn p1_good_fibres_have_scalar_curvature_two() {
    let p = build_p1_fs();
    for prime in [2, 3, 5] {
        let s = na_scalar_curvature(&p.model, prime).unwrap();
        assert_eq!(s.len(), 1);
        assert!(s.values().all(|v| *v == qi(2)));
    }
}

#[test]
fn p1_height_value() {
    let p = build_p1_fs();
    let h = modular_height(&p.model).unwrap();
    let expected = -1.0 + (2.0 * std::f64::consts::PI).ln();
    assert!((h.evaluate() - expected).abs() < 1e-14, "{h}");
    // the log 2 part is carried exactly
    assert_eq!(h.log_coeff(2), qi(1));
}

#[test]
fn p1_height_reproduced_by_scan() {
    let p = build_p1_fs();
    let h = modular_height(&p.model).unwrap().evaluate();
    let scan = dequantization_scan(&p.model, 200).unwrap();
    assert!((scan.fit.constant - h / 4.0).abs() < 1e-3, "{} vs {}", scan.fit.constant, h / 4.0);
    assert!((scan.fit.log_slope - 0.25).abs() < 1e-3);
}

#[test]
fn p1_height_rigid_under_twists_and_rescale() {
    let p = build_p1_fs();
    let h = modular_height(&p.model).unwrap();
    let mut d = BTreeMap::new();
    d.insert(2u64, q(3, 2));
    d.insert(5u64, qi(-4));
    let t = twist_by_base_divisor(&p.model, &d).unwrap();
    // exact parts equal, real part untouched
    assert!(modular_height(&t).unwrap().approx_eq(&h, 0.0));
    let r = rescale_metric_const(&p.model, 0.37).unwrap();
    assert!((modular_height(&r).unwrap().evaluate() - h.evaluate()).abs() < 1e-12);
}

#[test]
fn p1_closed_form_gram_matches_quadrature() {
    let p = build_p1_fs();
    for m in [1u32, 4, 9] {
        let closed = (p.gram)(m, VolumeConvention::MOmega);
        let quad = l2_gram_quadrature(m, &SectionMetric::FubiniStudy, VolumeConvention::MOmega, &default_grid(m)).unwrap();
        assert!((&closed.gram - &quad.gram).amax() < 1e-13, "m = {m}");
    }
}

#[test]
fn p1_model_roundtrips_through_json() {
    let p = build_p1_fs();
    let back = model_from_json(&model_to_json(&p.model)).unwrap();
    assert!(modular_height(&back).unwrap().approx_eq(&modular_height(&p.model).unwrap(), 1e-15));
}

#[test]
fn blowup_with_no_primes_is_the_base() {
    let fam = build_p2_blowup_family(&[]).unwrap();
    let d = relative_modular_height(&fam.blown, &fam.base).unwrap();
    assert!(d.is_zero());
    assert_eq!(fam.blown.form.entries(), fam.base.form.entries());
}

#[test]
fn blowup_rejects_repeated_primes() {
    assert_eq!(build_p2_blowup_family(&[2, 3, 2]).unwrap_err(), FamiliesError::DuplicatePrime(2));
    assert!(build_p2_blowup_family(&[4]).is_err());
}

#[test]
fn blowup_entries_match_toric_oracle() {
    let o = blowup_oracle().unwrap();
    // the bare rules the builder uses
    assert_eq!((o.a2f.clone(), o.af2.clone(), o.f3.clone()), (qi(0), qi(-1), qi(1)));
    assert_eq!(o.generic, (qi(8), qi(-8)));
    let fam = build_p2_blowup_family(&[3]).unwrap();
    let comp = |id: &str| fam.blown.fibers.iter().find(|f| f.component_id == id).unwrap().clone();
    assert_eq!((comp("F").deg_l, comp("F").deg_lk), o.deg_f);
    assert_eq!((comp("G").deg_l, comp("G").deg_lk), o.deg_g);
    let l3 = fam.blown.l_top().unwrap() - fam.base.l_top().unwrap();
    let l2k = fam.blown.l_n_k().unwrap() - fam.base.l_n_k().unwrap();
    assert_eq!(l3.exact_eq(&HeightValue::log_term(3, o.delta_l3.clone()).unwrap()), Some(true));
    assert_eq!(l2k.exact_eq(&HeightValue::log_term(3, o.delta_l2k.clone()).unwrap()), Some(true));
}

#[test]
fn blowup_constant_is_shared_across_prime_sets() {
    let reference = oracle_c(&blowup_oracle().unwrap());
    for primes in [vec![2u64], vec![3], vec![5], vec![2, 3], vec![2, 3, 5], vec![7, 11]] {
        let fam = build_p2_blowup_family(&primes).unwrap();
        let d = relative_modular_height(&fam.blown, &fam.base).unwrap();
        let c = blowup_constant(&d, &primes).unwrap_or_else(|| panic!("{d} is not a multiple of Σ log p"));
        assert_eq!(c, reference, "primes {primes:?}");
    }
    assert_eq!(reference, qi(-32));
}

#[test]
fn blowup_pair_satisfies_decomposition_and_aubin_chain() {
    let fam = build_p2_blowup_family(&[2, 3]).unwrap();
    let (lhs, rhs) = decomposition_check(&fam.pair, None).unwrap();
    assert_eq!(lhs.exact_eq(&rhs), Some(true), "{lhs} vs {rhs}");
    let i = aubin_i_rel(&fam.pair).unwrap();
    let j = aubin_j_rel(&fam.pair).unwrap();
    let lg = (2f64).ln() + (3f64).ln();
    assert!((i.evaluate() - 3.0 * lg).abs() < 1e-12);
    assert!((j.evaluate() - 4.0 / 3.0 * lg).abs() < 1e-12);
    let (iv, jv) = (i.evaluate(), j.evaluate());
    assert!(0.0 <= iv / 3.0 && iv / 3.0 <= jv && jv <= 2.0 * iv / 3.0);
}

#[test]
fn blowup_models_roundtrip_through_json() {
    let fam = build_p2_blowup_family(&[2, 5]).unwrap();
    for m in [&fam.base, &fam.blown] {
        let back = model_from_json(&model_to_json(m)).unwrap();
        assert_eq!(modular_height(&back).unwrap().exact_eq(&modular_height(m).unwrap()), Some(true));
    }
}
