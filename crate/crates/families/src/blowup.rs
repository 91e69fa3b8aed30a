//! (Bl₁P²_ℤ, −K) and its blow-ups along the exceptional curve in the fibres
//! over a list of primes, polarized by 𝓛(−ΣF_p).
//!
//! Everything is computed on one ambient form over the classes
//! A = −K pulled back, B = K_{X/ℤ} pulled back, the exceptional divisors F_p
//! and the full fibres Fib_p. The base metrics are the canonical toric ones,
//! so every purely horizontal entry vanishes and the vertical entries are
//! rational multiples of log p.

use std::collections::BTreeSet;

use heightnum::{qi, HeightValue, Q};
use isect::{ref_name, BaseKind, ClassKind, DivisorClass, FiberComponent, IntersectionForm, IntersectionModel, LinComb, ModelPair};
use num_traits::Zero;

use crate::FamiliesError;

/// −K_X and K_X degrees on X = Bl₁P²
const ANTICANONICAL_DEGREE: i64 = 8;
/// (−K_X·E) for the exceptional curve E
const ANTICANONICAL_ON_E: i64 = 1;
/// (E²)_X
const E_SELF: i64 = -1;

#[derive(Debug, Clone)]
pub struct BlowupFamily {
    pub primes: Vec<u64>,
    pub base: IntersectionModel,
    pub blown: IntersectionModel,
    pub pair: ModelPair,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Ambient {
    A,
    B,
    F(u64),
    Fib(u64),
}

fn ambient_name(a: Ambient) -> String {
    match a {
        Ambient::A => "A".into(),
        Ambient::B => "B".into(),
        Ambient::F(p) => format!("F{p}"),
        Ambient::Fib(p) => format!("Fib{p}"),
    }
}

/// Triple products on the blown-up threefold. Horizontal classes enter
/// through their sign against −K (A ↦ +1, B ↦ −1).
fn ambient_entry(slots: &[Ambient]) -> Result<HeightValue, FamiliesError> {
    let mut primes = BTreeSet::new();
    let mut hor = Vec::new();
    let (mut nf, mut nfib) = (0, 0);
    for s in slots {
        match s {
            Ambient::A => hor.push(1i64),
            Ambient::B => hor.push(-1),
            Ambient::F(p) => {
                primes.insert(*p);
                nf += 1;
            }
            Ambient::Fib(p) => {
                primes.insert(*p);
                nfib += 1;
            }
        }
    }
    if primes.is_empty() {
        return Ok(HeightValue::zero());
    }
    if primes.len() > 1 {
        return Ok(HeightValue::zero());
    }
    let p = *primes.iter().next().unwrap();
    let sign: i64 = hor.iter().product();
    let coeff = match (nfib, nf) {
        // Fib·X·Y = generic degree of X·Y
        (1, 0) => qi(sign * ANTICANONICAL_DEGREE),
        // two vertical classes of one fibre when one of them is the whole fibre
        (1, _) | (2, _) | (3, _) => Q::zero(),
        // f*X·f*Y·F = 0
        (0, 1) => Q::zero(),
        // f*X·F² = −(X·Z)
        (0, 2) => qi(-sign * ANTICANONICAL_ON_E),
        // F³ = −deg N_Z, N_Z = N_{E/X} ⊕ O
        (0, 3) => qi(-E_SELF),
        _ => unreachable!("arity 3"),
    };
    Ok(HeightValue::log_term(p, coeff)?)
}

fn ambient_form(primes: &[u64]) -> Result<IntersectionForm, FamiliesError> {
    let mut classes = vec![Ambient::A, Ambient::B];
    for &p in primes {
        classes.push(Ambient::F(p));
        classes.push(Ambient::Fib(p));
    }
    let mut form = IntersectionForm::new(classes.iter().map(|c| ambient_name(*c)).collect(), 3)?;
    for m in form.all_monomials() {
        let slots: Vec<Ambient> = m.iter().map(|&i| classes[i]).collect();
        form.set_monomial(m, ambient_entry(&slots)?);
    }
    Ok(form)
}

fn check_primes(primes: &[u64]) -> Result<(), FamiliesError> {
    let mut seen = BTreeSet::new();
    for &p in primes {
        if !heightnum::is_prime(p) {
            return Err(FamiliesError::Height(heightnum::HeightError::NonPrimeLabel(p)));
        }
        if !seen.insert(p) {
            return Err(FamiliesError::DuplicatePrime(p));
        }
    }
    Ok(())
}

/// Fills a model over `classes` by evaluating each monomial through `image`.
fn pull_back(
    ambient: &IntersectionForm,
    classes: Vec<DivisorClass>,
    image: &dyn Fn(&str) -> LinComb,
) -> Result<IntersectionModel, FamiliesError> {
    let d8 = qi(ANTICANONICAL_DEGREE);
    let mut m = IntersectionModel::skeleton(2, 1, BaseKind::Arithmetic, classes, "L", "K", d8.clone(), -d8.clone())?;
    m.set_generic(&["K", "K"], d8);
    for mono in m.form.all_monomials() {
        let slots: Vec<LinComb> = mono.iter().map(|&i| image(&m.form.names()[i])).collect();
        let v = ambient.eval(&slots)?;
        m.form.set_monomial(mono, v);
    }
    Ok(m)
}

fn blown_image(primes: &[u64], name: &str) -> LinComb {
    match name {
        "L" => {
            let mut c = LinComb::class("A");
            for p in primes {
                c.add_term(&format!("F{p}"), qi(-1));
            }
            c
        }
        "K" => {
            let mut c = LinComb::class("B");
            for p in primes {
                c.add_term(&format!("F{p}"), qi(1));
            }
            c
        }
        other => {
            if let Some(p) = other.strip_prefix('G') {
                LinComb::from_terms(&[(&format!("Fib{p}"), qi(1)), (&format!("F{p}"), qi(-1))])
            } else {
                LinComb::class(other)
            }
        }
    }
}

fn base_image(name: &str) -> LinComb {
    match name {
        "L" => LinComb::class("A"),
        "K" => LinComb::class("B"),
        other => LinComb::class(other),
    }
}

fn horizontal() -> Vec<DivisorClass> {
    vec![DivisorClass::new("L", ClassKind::Polarization), DivisorClass::new("K", ClassKind::RelativeCanonical)]
}

pub fn build_p2_blowup_family(primes: &[u64]) -> Result<BlowupFamily, FamiliesError> {
    check_primes(primes)?;
    let ambient = ambient_form(primes)?;

    let mut base_classes = horizontal();
    for &p in primes {
        base_classes.push(DivisorClass::vertical(&format!("Fib{p}"), p, "0"));
    }
    let mut base = pull_back(&ambient, base_classes, &base_image)?;
    for &p in primes {
        base.fibers.push(FiberComponent::new(p, "0", qi(ANTICANONICAL_DEGREE), qi(-ANTICANONICAL_DEGREE), 1));
    }
    base.validate()?;

    let mut blown_classes = horizontal();
    for &p in primes {
        blown_classes.push(DivisorClass::vertical(&format!("F{p}"), p, "F"));
        blown_classes.push(DivisorClass::vertical(&format!("G{p}"), p, "G"));
    }
    let mut blown = pull_back(&ambient, blown_classes, &|n| blown_image(primes, n))?;
    for &p in primes {
        blown.fibers.push(FiberComponent::new(p, "F", Q::zero(), Q::zero(), 1));
        blown.fibers.push(FiberComponent::new(p, "G", Q::zero(), Q::zero(), 1));
    }
    blown.refresh_fibers()?;
    blown.validate()?;

    let pair = blowup_pair(&ambient, &blown, &base, primes)?;
    Ok(BlowupFamily { primes: primes.to_vec(), base, blown, pair })
}

fn blowup_pair(ambient: &IntersectionForm, blown: &IntersectionModel, base: &IntersectionModel, primes: &[u64]) -> Result<ModelPair, FamiliesError> {
    let mine: Vec<String> = blown.form.names().to_vec();
    let theirs: Vec<String> = base.form.names().iter().map(|n| ref_name(n)).collect();
    let all: Vec<String> = mine.iter().chain(&theirs).cloned().collect();
    let k = mine.len();
    let tmp = IntersectionForm::new(all.clone(), 3)?;
    let image = |i: usize| if i < k { blown_image(primes, &all[i]) } else { base_image(&base.form.names()[i - k]) };
    let mut mixed = Vec::new();
    for m in tmp.all_monomials() {
        if m.iter().any(|&i| i < k) && m.iter().any(|&i| i >= k) {
            let slots: Vec<LinComb> = m.iter().map(|&i| image(i)).collect();
            mixed.push((m.iter().map(|&i| all[i].clone()).collect(), ambient.eval(&slots)?));
        }
    }
    Ok(ModelPair::new(blown.clone(), base.clone(), mixed)?)
}

/// Extracts c from h(blown) − h(base) = −c·Σ log p when it has that shape.
pub fn blowup_constant(diff: &HeightValue, primes: &[u64]) -> Option<Q> {
    if !diff.const_part().is_zero() || !diff.is_real_exact() || diff.real_part() != 0.0 {
        return None;
    }
    if primes.is_empty() {
        return None;
    }
    let c = -diff.log_coeff(primes[0]);
    let same = primes.iter().all(|&p| -diff.log_coeff(p) == c) && diff.log_terms().keys().all(|p| primes.contains(p));
    same.then_some(c)
}
