//! Log-linear height values.
//!
//! A [`HeightValue`] is `q0 + Σ_p q_p·log p + r` with `q0`, `q_p` arbitrary
//! precision rationals over distinct primes and `r` a real remainder. The
//! rational part is exact under addition and rational scaling; `r` is an
//! ordinary `f64`, and `real_exact` records that it is known to be exactly 0.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, MapAccess, Visitor};
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub type Q = BigRational;

/// Default absolute tolerance for comparing real parts.
pub const REAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HeightError {
    #[error("NonPrimeLabel: log label {0} is not a prime")]
    NonPrimeLabel(u64),
    #[error("BadRational: cannot parse {0:?} as p/q")]
    BadRational(String),
    #[error("InconsistentExactFlag: real_exact is set but real part is {0}")]
    InconsistentExactFlag(f64),
}

/// `n/d` as a big rational. Panics on `d == 0`.
pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Parses `"p/q"`, `"p"` or `"-p/q"`.
pub fn parse_q(s: &str) -> Result<Q, HeightError> {
    let t = s.trim();
    Q::from_str(t).map_err(|_| HeightError::BadRational(s.to_string()))
}

pub fn q_to_f64(x: &Q) -> f64 {
    match x.to_f64() {
        Some(v) => v,
        None => {
            // numerator/denominator too large for a direct conversion
            let n = x.numer().to_f64().unwrap_or(f64::NAN);
            let d = x.denom().to_f64().unwrap_or(f64::NAN);
            n / d
        }
    }
}

/// Trial division; labels are small primes in every use here.
pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p < 4 {
        return true;
    }
    if p % 2 == 0 {
        return false;
    }
    let mut k = 3u64;
    while k.saturating_mul(k) <= p {
        if p % k == 0 {
            return false;
        }
        k += 2;
    }
    true
}

/// Uncanonical input: log entries may repeat, be zero or carry bad labels.
#[derive(Debug, Clone)]
pub struct RawHeight {
    pub const_part: Q,
    pub logs: Vec<(u64, Q)>,
    pub real: f64,
    pub real_exact: bool,
}

#[derive(Debug, Clone)]
pub struct HeightValue {
    const_part: Q,
    log_terms: BTreeMap<u64, Q>,
    real_part: f64,
    real_exact: bool,
}

/// Merges duplicate labels, drops zero coefficients, rejects composite labels.
pub fn canonicalize(raw: &RawHeight) -> Result<HeightValue, HeightError> {
    let mut log_terms: BTreeMap<u64, Q> = BTreeMap::new();
    for (p, c) in &raw.logs {
        if !is_prime(*p) {
            return Err(HeightError::NonPrimeLabel(*p));
        }
        *log_terms.entry(*p).or_insert_with(Q::zero) += c;
    }
    log_terms.retain(|_, c| !c.is_zero());
    if raw.real_exact && raw.real != 0.0 {
        return Err(HeightError::InconsistentExactFlag(raw.real));
    }
    Ok(HeightValue {
        const_part: raw.const_part.clone(),
        log_terms,
        real_part: raw.real,
        real_exact: raw.real_exact,
    })
}

impl Default for HeightValue {
    fn default() -> Self {
        Self::zero()
    }
}

impl HeightValue {
    pub fn zero() -> Self {
        HeightValue {
            const_part: Q::zero(),
            log_terms: BTreeMap::new(),
            real_part: 0.0,
            real_exact: true,
        }
    }

    pub fn from_q(c: Q) -> Self {
        HeightValue { const_part: c, ..Self::zero() }
    }

    pub fn from_int(c: i64) -> Self {
        Self::from_q(qi(c))
    }

    /// `c·log p`.
    pub fn log_term(p: u64, c: Q) -> Result<Self, HeightError> {
        canonicalize(&RawHeight { const_part: Q::zero(), logs: vec![(p, c)], real: 0.0, real_exact: true })
    }

    /// `log p`.
    pub fn log(p: u64) -> Result<Self, HeightError> {
        Self::log_term(p, Q::one())
    }

    /// A purely archimedean value. Never flagged exact, even when `r == 0`.
    pub fn real(r: f64) -> Self {
        HeightValue { real_part: r, real_exact: false, ..Self::zero() }
    }

    pub fn const_part(&self) -> &Q {
        &self.const_part
    }

    pub fn log_terms(&self) -> &BTreeMap<u64, Q> {
        &self.log_terms
    }

    pub fn log_coeff(&self, p: u64) -> Q {
        self.log_terms.get(&p).cloned().unwrap_or_else(Q::zero)
    }

    pub fn real_part(&self) -> f64 {
        self.real_part
    }

    pub fn is_real_exact(&self) -> bool {
        self.real_exact
    }

    /// True when the value has no log terms and no real part.
    pub fn is_rational(&self) -> bool {
        self.log_terms.is_empty() && self.real_exact
    }

    pub fn as_rational(&self) -> Option<&Q> {
        if self.is_rational() {
            Some(&self.const_part)
        } else {
            None
        }
    }

    pub fn is_zero(&self) -> bool {
        self.const_part.is_zero() && self.log_terms.is_empty() && self.real_part == 0.0
    }

    pub fn evaluate(&self) -> f64 {
        let mut s = q_to_f64(&self.const_part);
        for (p, c) in &self.log_terms {
            s += q_to_f64(c) * (*p as f64).ln();
        }
        s + self.real_part
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        HeightValue {
            const_part: &self.const_part * c,
            log_terms: self.log_terms.iter().map(|(p, v)| (*p, v * c)).collect(),
            real_part: self.real_part * q_to_f64(c),
            real_exact: self.real_exact,
        }
    }

    pub fn add_real(&self, r: f64) -> Self {
        let mut out = self.clone();
        out.real_part += r;
        out.real_exact = self.real_exact && r == 0.0;
        out
    }

    /// Same value with the real remainder replaced.
    pub fn with_real(&self, r: f64, exact: bool) -> Self {
        let mut out = self.clone();
        out.real_part = r;
        out.real_exact = exact && r == 0.0;
        out
    }

    /// The value without its real remainder.
    pub fn exact_part(&self) -> Self {
        HeightValue { const_part: self.const_part.clone(), log_terms: self.log_terms.clone(), real_part: 0.0, real_exact: true }
    }

    pub fn exact_parts_eq(&self, other: &Self) -> bool {
        self.const_part == other.const_part && self.log_terms == other.log_terms
    }

    /// Exact comparison, defined only when both real parts are exact.
    pub fn exact_eq(&self, other: &Self) -> Option<bool> {
        if self.real_exact && other.real_exact {
            Some(self.exact_parts_eq(other))
        } else {
            None
        }
    }

    /// Exact on the rational and log parts, `tol` on the real parts.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.exact_parts_eq(other) && (self.real_part - other.real_part).abs() <= tol
    }

    pub fn raw(&self) -> RawHeight {
        RawHeight {
            const_part: self.const_part.clone(),
            logs: self.log_terms.iter().map(|(p, c)| (*p, c.clone())).collect(),
            real: self.real_part,
            real_exact: self.real_exact,
        }
    }
}

impl PartialEq for HeightValue {
    fn eq(&self, other: &Self) -> bool {
        self.exact_parts_eq(other) && self.real_part == other.real_part && self.real_exact == other.real_exact
    }
}

fn add_into(a: &mut HeightValue, b: &HeightValue, sign: i32) {
    if sign > 0 {
        a.const_part += &b.const_part;
    } else {
        a.const_part -= &b.const_part;
    }
    for (p, c) in &b.log_terms {
        let e = a.log_terms.entry(*p).or_insert_with(Q::zero);
        if sign > 0 {
            *e += c;
        } else {
            *e -= c;
        }
    }
    a.log_terms.retain(|_, c| !c.is_zero());
    a.real_part += sign as f64 * b.real_part;
    a.real_exact = a.real_exact && b.real_exact;
}

impl AddAssign<&HeightValue> for HeightValue {
    fn add_assign(&mut self, rhs: &HeightValue) {
        add_into(self, rhs, 1);
    }
}

impl SubAssign<&HeightValue> for HeightValue {
    fn sub_assign(&mut self, rhs: &HeightValue) {
        add_into(self, rhs, -1);
    }
}

impl Add<&HeightValue> for &HeightValue {
    type Output = HeightValue;
    fn add(self, rhs: &HeightValue) -> HeightValue {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&HeightValue> for &HeightValue {
    type Output = HeightValue;
    fn sub(self, rhs: &HeightValue) -> HeightValue {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Add for HeightValue {
    type Output = HeightValue;
    fn add(mut self, rhs: HeightValue) -> HeightValue {
        self += &rhs;
        self
    }
}

impl Sub for HeightValue {
    type Output = HeightValue;
    fn sub(mut self, rhs: HeightValue) -> HeightValue {
        self -= &rhs;
        self
    }
}

impl Neg for &HeightValue {
    type Output = HeightValue;
    fn neg(self) -> HeightValue {
        self.scale(&-Q::one())
    }
}

impl Neg for HeightValue {
    type Output = HeightValue;
    fn neg(self) -> HeightValue {
        (&self).neg()
    }
}

impl Mul<&Q> for &HeightValue {
    type Output = HeightValue;
    fn mul(self, rhs: &Q) -> HeightValue {
        self.scale(rhs)
    }
}

impl std::iter::Sum for HeightValue {
    fn sum<I: Iterator<Item = HeightValue>>(iter: I) -> HeightValue {
        let mut acc = HeightValue::zero();
        for v in iter {
            acc += &v;
        }
        acc
    }
}

impl<'a> std::iter::Sum<&'a HeightValue> for HeightValue {
    fn sum<I: Iterator<Item = &'a HeightValue>>(iter: I) -> HeightValue {
        let mut acc = HeightValue::zero();
        for v in iter {
            acc += v;
        }
        acc
    }
}

impl fmt::Display for HeightValue {
    /// `q0 + Σ q_p·log p [+ r]`; zero parts are omitted.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<(bool, String)> = Vec::new();
        if !self.const_part.is_zero() {
            terms.push((self.const_part.is_negative(), self.const_part.abs().to_string()));
        }
        for (p, c) in &self.log_terms {
            let a = c.abs();
            let body = if a.is_one() { format!("log {p}") } else { format!("{a}·log {p}") };
            terms.push((c.is_negative(), body));
        }
        if !self.real_exact && (self.real_part != 0.0 || terms.is_empty()) {
            terms.push((self.real_part < 0.0, format!("{}", self.real_part.abs())));
        }
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (neg, body)) in terms.iter().enumerate() {
            match (i, neg) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => write!(f, "{body}")?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for HeightValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let logs: BTreeMap<String, String> = self.log_terms.iter().map(|(p, c)| (p.to_string(), c.to_string())).collect();
        let mut st = s.serialize_struct("HeightValue", 4)?;
        st.serialize_field("const", &self.const_part.to_string())?;
        st.serialize_field("logs", &logs)?;
        st.serialize_field("real", &self.real_part)?;
        st.serialize_field("real_exact", &self.real_exact)?;
        st.end()
    }
}

/// Log map that keeps repeated keys instead of letting the last one win.
struct LogEntries(Vec<(u64, Q)>);

impl<'de> Deserialize<'de> for LogEntries {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = LogEntries;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map from prime labels to rationals")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut m: A) -> Result<LogEntries, A::Error> {
                let mut out = Vec::new();
                while let Some((k, v)) = m.next_entry::<String, String>()? {
                    let p: u64 = k.trim().parse().map_err(|_| de::Error::custom(format!("bad log label {k:?}")))?;
                    let c = parse_q(&v).map_err(de::Error::custom)?;
                    out.push((p, c));
                }
                Ok(LogEntries(out))
            }
        }
        d.deserialize_map(V)
    }
}

#[derive(Deserialize)]
struct Wire {
    #[serde(rename = "const", default)]
    const_part: Option<String>,
    #[serde(default)]
    logs: Option<LogEntries>,
    #[serde(default)]
    real: f64,
    #[serde(default)]
    real_exact: Option<bool>,
}

impl<'de> Deserialize<'de> for HeightValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let w = Wire::deserialize(d)?;
        let const_part = match w.const_part {
            Some(s) => parse_q(&s).map_err(de::Error::custom)?,
            None => Q::zero(),
        };
        let raw = RawHeight {
            const_part,
            logs: w.logs.map(|l| l.0).unwrap_or_default(),
            real: w.real,
            real_exact: w.real_exact.unwrap_or(w.real == 0.0),
        };
        canonicalize(&raw).map_err(de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_labels_merge() {
        let raw = RawHeight { const_part: Q::zero(), logs: vec![(2, q(1, 4)), (2, q(1, 4))], real: 0.0, real_exact: true };
        let v = canonicalize(&raw).unwrap();
        assert_eq!(v.log_terms().len(), 1);
        assert_eq!(v.log_coeff(2), q(1, 2));
    }

    #[test]
    fn zero_coefficient_dropped() {
        let raw = RawHeight { const_part: Q::zero(), logs: vec![(3, Q::zero())], real: 0.0, real_exact: true };
        assert!(canonicalize(&raw).unwrap().log_terms().is_empty());
    }

    #[test]
    fn composite_rejected() {
        for bad in [0u64, 1, 4, 9, 15, 91] {
            let raw = RawHeight { const_part: Q::zero(), logs: vec![(bad, Q::one())], real: 0.0, real_exact: true };
            assert_eq!(canonicalize(&raw).unwrap_err(), HeightError::NonPrimeLabel(bad));
        }
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(HeightValue::from_int(1).evaluate(), 1.0);
        assert_eq!(HeightValue::log(2).unwrap().evaluate(), 2f64.ln());
        let v = &HeightValue::log(2).unwrap() - &HeightValue::log(3).unwrap();
        assert!((v.evaluate() - (2.0f64 / 3.0).ln()).abs() < 1e-15);
    }

    #[test]
    fn exactness_flag() {
        let a = HeightValue::log(5).unwrap();
        let b = HeightValue::real(0.25);
        assert!(a.is_real_exact());
        assert!(!(&a + &b).is_real_exact());
        assert_eq!(a.exact_eq(&a.clone()), Some(true));
        assert_eq!(a.exact_eq(&b), None);
    }

    #[test]
    fn display_forms() {
        let v = &(&HeightValue::from_q(q(1, 2)) + &HeightValue::log_term(2, q(-3, 2)).unwrap()) + &HeightValue::log(7).unwrap();
        assert_eq!(v.to_string(), "1/2 - 3/2·log 2 + log 7");
        assert_eq!(HeightValue::zero().to_string(), "0");
        assert_eq!(HeightValue::real(-0.5).to_string(), "-0.5");
    }

    #[test]
    fn serde_roundtrip_and_duplicates() {
        let v = &HeightValue::log_term(3, q(2, 5)).unwrap() + &HeightValue::real(1.5);
        let s = serde_json::to_string(&v).unwrap();
        let back: HeightValue = serde_json::from_str(&s).unwrap();
        assert_eq!(v, back);
        let dup: HeightValue = serde_json::from_str(r#"{"const":"0","logs":{"2":"1/4","2":"1/4"},"real":0.0,"real_exact":true}"#).unwrap();
        assert_eq!(dup.log_coeff(2), q(1, 2));
        let bad = serde_json::from_str::<HeightValue>(r#"{"const":"0","logs":{"4":"1"},"real":0.0,"real_exact":true}"#);
        assert!(bad.unwrap_err().to_string().contains("NonPrimeLabel"));
    }
}
