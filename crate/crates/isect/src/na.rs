//! Non-archimedean scalar curvature, normalized DF, Calabi functionals,
//! slope test and the rigidity operations.

use std::collections::BTreeMap;

use heightnum::{HeightValue, Q};
use num_traits::{One, Zero};

use crate::form::LinComb;
use crate::functionals::df_numerator;
use crate::model::{BaseKind, FiberComponent, IntersectionModel};
use crate::IsectError;

fn components_at(m: &IntersectionModel, prime: u64) -> Result<Vec<&FiberComponent>, IsectError> {
    let v: Vec<&FiberComponent> = m.fibers.iter().filter(|f| f.prime == prime).collect();
    if v.is_empty() {
        return Err(IsectError::UnknownPrime(prime));
    }
    Ok(v)
}

/// E_i ↦ −n·deg_LK(E_i)/deg_L(E_i), on reduced components.
pub fn na_scalar_curvature(m: &IntersectionModel, prime: u64) -> Result<BTreeMap<String, Q>, IsectError> {
    let n = m.n_q();
    Ok(components_at(m, prime)?.into_iter().map(|f| (f.component_id.clone(), -&n * &f.deg_lk / &f.deg_l)).collect())
}

pub fn normalized_df(m: &IntersectionModel, cover_degree: u32) -> Result<HeightValue, IsectError> {
    if cover_degree == 0 {
        return Err(IsectError::ZeroCoverDegree);
    }
    Ok(df_numerator(m)?.scale(&(Q::one() / Q::from_integer((cover_degree as i64).into()))))
}

/// d/dε at 0 of the DF numerator of L + εE:
/// (n+1)·(−n·deg_LK·(L^n.E) + n·deg_Ln·(L^{n−1}.K.E)).
pub fn component_twist_derivative(m: &IntersectionModel, prime: u64, component: &str) -> Result<HeightValue, IsectError> {
    let cls = m.vertical_class(prime, component).ok_or_else(|| IsectError::UnknownComponent(prime, component.to_string()))?;
    let e = LinComb::class(&cls.name);
    let n = m.n;
    let nq = m.n_q();
    let mut s1 = vec![m.l(); n];
    s1.push(e.clone());
    let mut s2 = vec![m.l(); n - 1];
    s2.push(m.k());
    s2.push(e);
    let a = m.eval(&s1)?.scale(&(-&nq * &m.deg_lk));
    let b = m.eval(&s2)?.scale(&(&nq * &m.deg_ln));
    Ok((a + b).scale(&(nq + Q::one())))
}

/// Σ_i (deg_LK(E_i)/deg_L(E_i))² over the components at the given primes.
pub fn na_calabi(m: &IntersectionModel, primes: &[u64]) -> Result<Q, IsectError> {
    let mut acc = Q::zero();
    for &p in primes {
        for f in components_at(m, p)? {
            let r = &f.deg_lk / &f.deg_l;
            acc += &r * &r;
        }
    }
    Ok(acc)
}

pub fn arakelov_calabi(m: &IntersectionModel, primes: &[u64], arch_term: f64) -> Result<f64, IsectError> {
    if arch_term < 0.0 || !arch_term.is_finite() {
        return Err(IsectError::NegativeArchTerm(arch_term));
    }
    Ok(heightnum::q_to_f64(&na_calabi(m, primes)?) + arch_term)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlopeVerdict {
    StableDirection,
    Equality,
    Violated,
}

#[derive(Debug, Clone)]
pub struct SlopeReport {
    pub verdict: SlopeVerdict,
    /// −(n+1)(𝓛^n.K)/(𝓛^{n+1})
    pub lhs: Q,
    /// −n(L^{n−1}.K_X)/(L^n)
    pub rhs: Q,
}

/// Compares the slope of a test configuration over a curve with S̄.
pub fn slope_semistability_test(tc: &IntersectionModel) -> Result<SlopeReport, IsectError> {
    let top = tc.l_top()?;
    let lk = tc.l_n_k()?;
    let top = top.as_rational().cloned().ok_or_else(|| IsectError::NonRationalEntry("L^{n+1}".into()))?;
    let lk = lk.as_rational().cloned().ok_or_else(|| IsectError::NonRationalEntry("L^n.K".into()))?;
    if top.is_zero() {
        return Err(IsectError::ZeroSelfIntersection);
    }
    let lhs = -(tc.n_q() + Q::one()) * lk / top;
    let rhs = tc.sbar();
    let verdict = match lhs.cmp(&rhs) {
        std::cmp::Ordering::Less => SlopeVerdict::StableDirection,
        std::cmp::Ordering::Equal => SlopeVerdict::Equality,
        std::cmp::Ordering::Greater => SlopeVerdict::Violated,
    };
    Ok(SlopeReport { verdict, lhs, rhs })
}

/// 𝓛 ↦ 𝓛(π*D) for D = Σ c_p·[p].
pub fn twist_by_base_divisor(m: &IntersectionModel, divisor: &BTreeMap<u64, Q>) -> Result<IntersectionModel, IsectError> {
    let mut deg = HeightValue::zero();
    for (p, c) in divisor {
        if c.is_zero() {
            continue;
        }
        deg += &m.vertical_weight(*p)?.scale(c);
        if m.base == BaseKind::Arithmetic && !heightnum::is_prime(*p) {
            return Err(heightnum::HeightError::NonPrimeLabel(*p).into());
        }
    }
    if deg.is_zero() {
        return Ok(m.clone());
    }
    m.shift_polarization(&deg)
}

/// h ↦ e^{2c}·h: a trivial line bundle of arithmetic degree −c added to 𝓛.
pub fn rescale_metric_const(m: &IntersectionModel, c: f64) -> Result<IntersectionModel, IsectError> {
    if c == 0.0 {
        return Ok(m.clone());
    }
    m.shift_polarization(&HeightValue::real(-c))
}
