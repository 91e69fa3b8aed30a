//! P¹_ℤ with the Fubini–Study metric on O(1) and the induced metric on the
//! relative tangent bundle, |∂_z|² = 2π/(1+|z|²)².

use heightnum::{qi, q, HeightValue};
use isect::{BaseKind, ClassKind, DivisorClass, FiberComponent, IntersectionModel};
use quantized::{fs_gram_closed_form, Family, SectionGram, VolumeConvention};

use crate::FamiliesError;

/// Good fibres listed as vertical classes.
pub const P1_PRIMES: [u64; 3] = [2, 3, 5];

#[derive(Debug, Clone)]
pub struct P1Fs {
    pub model: IntersectionModel,
    pub family: Family,
    /// Closed-form L² Gram of the monomial basis of H⁰(O(m)) under h_FS^m.
    pub gram: fn(u32, VolumeConvention) -> SectionGram,
}

/// (L̄²) = 1/2
pub fn fs_l_squared() -> HeightValue {
    HeightValue::from_q(q(1, 2))
}

/// (L̄.K̄) = −1 + ½·log 2π
pub fn fs_l_k() -> HeightValue {
    let half_log_2 = HeightValue::log_term(2, q(1, 2)).expect("2 is prime");
    HeightValue::from_int(-1) + half_log_2 + HeightValue::real(0.5 * std::f64::consts::PI.ln())
}

/// (K̄²) = 2 − 2·log 2π: K̄ is −2L̄ shifted by the constant ½·log 2π.
pub fn fs_k_squared() -> HeightValue {
    let log_2 = HeightValue::log_term(2, qi(-2)).expect("2 is prime");
    HeightValue::from_int(2) + log_2 + HeightValue::real(-2.0 * std::f64::consts::PI.ln())
}

pub fn build_p1_fs() -> P1Fs {
    build_p1_fs_with_primes(&P1_PRIMES).expect("fixed primes are valid")
}

pub fn build_p1_fs_with_primes(primes: &[u64]) -> Result<P1Fs, FamiliesError> {
    let mut classes = vec![DivisorClass::new("L", ClassKind::Polarization), DivisorClass::new("K", ClassKind::RelativeCanonical)];
    for &p in primes {
        classes.push(DivisorClass::vertical(&format!("F{p}"), p, "0"));
    }
    let mut m = IntersectionModel::skeleton(1, 1, BaseKind::Arithmetic, classes, "L", "K", qi(1), qi(-2))?;
    m.set(&["L", "L"], fs_l_squared())?;
    m.set(&["L", "K"], fs_l_k())?;
    m.set(&["K", "K"], fs_k_squared())?;
    m.set_generic(&["K"], qi(-2));
    for (i, &p) in primes.iter().enumerate() {
        let f = format!("F{p}");
        m.set(&["L", &f], HeightValue::log(p)?)?;
        m.set(&["K", &f], HeightValue::log_term(p, qi(-2))?)?;
        for &r in &primes[i..] {
            m.set(&[&f, &format!("F{r}")], HeightValue::zero())?;
        }
        m.fibers.push(FiberComponent::new(p, "0", qi(1), qi(-2), 1));
    }
    m.validate()?;
    Ok(P1Fs { model: m, family: Family::P1Fs, gram: fs_gram_closed_form })
}
