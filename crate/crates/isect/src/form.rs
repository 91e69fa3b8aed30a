//! Symmetric multilinear forms on labelled divisor classes.

use std::collections::{BTreeMap, HashMap};

use heightnum::{HeightValue, Q};
use itertools::Itertools;
use num_traits::{One, Zero};

use crate::IsectError;

/// Sorted class indices; a multiset of classes.
pub type Monomial = Vec<usize>;

/// Formal ℚ-combination of classes, by name.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinComb(pub BTreeMap<String, Q>);

impl LinComb {
    pub fn class(name: &str) -> Self {
        let mut m = BTreeMap::new();
        m.insert(name.to_string(), Q::one());
        LinComb(m)
    }

    pub fn from_terms(terms: &[(&str, Q)]) -> Self {
        let mut out = LinComb::default();
        for (n, c) in terms {
            out.add_term(n, c.clone());
        }
        out
    }

    pub fn add_term(&mut self, name: &str, c: Q) {
        let e = self.0.entry(name.to_string()).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.0.remove(name);
        }
    }

    pub fn plus(&self, other: &LinComb) -> LinComb {
        let mut out = self.clone();
        for (n, c) in &other.0 {
            out.add_term(n, c.clone());
        }
        out
    }

    pub fn scaled(&self, c: &Q) -> LinComb {
        if c.is_zero() {
            return LinComb::default();
        }
        LinComb(self.0.iter().map(|(n, v)| (n.clone(), v * c)).collect())
    }

    pub fn minus(&self, other: &LinComb) -> LinComb {
        self.plus(&other.scaled(&-Q::one()))
    }
}

/// `k` copies of the same slot.
pub fn power(c: &LinComb, k: usize) -> Vec<LinComb> {
    vec![c.clone(); k]
}

#[derive(Debug, Clone)]
pub struct IntersectionForm {
    names: Vec<String>,
    index: HashMap<String, usize>,
    arity: usize,
    entries: BTreeMap<Monomial, HeightValue>,
}

impl IntersectionForm {
    pub fn new(names: Vec<String>, arity: usize) -> Result<Self, IsectError> {
        let mut index = HashMap::new();
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() || n.contains(',') {
                return Err(IsectError::InvalidModel(format!("class name {n:?} must be non-empty and comma-free")));
            }
            if index.insert(n.clone(), i).is_some() {
                return Err(IsectError::DuplicateClass(n.clone()));
            }
        }
        Ok(IntersectionForm { names, index, arity, entries: BTreeMap::new() })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn monomial(&self, names: &[&str]) -> Result<Monomial, IsectError> {
        if names.len() != self.arity {
            return Err(IsectError::InvalidModel(format!("monomial {names:?} has arity {} not {}", names.len(), self.arity)));
        }
        let mut m = names
            .iter()
            .map(|n| self.index_of(n).ok_or_else(|| IsectError::MissingClass(n.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        m.sort_unstable();
        Ok(m)
    }

    /// Comma-separated key with names in lexicographic order.
    pub fn key_string(&self, m: &Monomial) -> String {
        m.iter().map(|&i| self.names[i].as_str()).sorted().join(",")
    }

    pub fn set(&mut self, names: &[&str], v: HeightValue) -> Result<(), IsectError> {
        let m = self.monomial(names)?;
        self.entries.insert(m, v);
        Ok(())
    }

    pub fn set_monomial(&mut self, m: Monomial, v: HeightValue) {
        debug_assert!(m.windows(2).all(|w| w[0] <= w[1]));
        self.entries.insert(m, v);
    }

    pub fn get(&self, names: &[&str]) -> Result<&HeightValue, IsectError> {
        let m = self.monomial(names)?;
        self.entries.get(&m).ok_or_else(|| IsectError::MissingEntry(self.key_string(&m)))
    }

    pub fn entry(&self, m: &Monomial) -> Option<&HeightValue> {
        self.entries.get(m)
    }

    pub fn entries(&self) -> &BTreeMap<Monomial, HeightValue> {
        &self.entries
    }

    pub fn all_monomials(&self) -> Vec<Monomial> {
        (0..self.names.len()).combinations_with_replacement(self.arity).collect()
    }

    pub fn missing(&self) -> Vec<String> {
        self.all_monomials().into_iter().filter(|m| !self.entries.contains_key(m)).map(|m| self.key_string(&m)).collect()
    }

    pub fn is_total(&self) -> bool {
        self.all_monomials().iter().all(|m| self.entries.contains_key(m))
    }

    /// Multinomial expansion of the slots into monomial coefficients.
    pub fn expand(&self, slots: &[LinComb]) -> Result<BTreeMap<Monomial, Q>, IsectError> {
        if slots.len() != self.arity {
            return Err(IsectError::InvalidModel(format!("{} slots given, form has arity {}", slots.len(), self.arity)));
        }
        let mut poly: BTreeMap<Monomial, Q> = BTreeMap::new();
        poly.insert(Vec::new(), Q::one());
        for slot in slots {
            let terms =
                slot.0.iter().map(|(n, c)| Ok((self.index_of(n).ok_or_else(|| IsectError::MissingClass(n.clone()))?, c))).collect::<Result<Vec<_>, IsectError>>()?;
            let mut next: BTreeMap<Monomial, Q> = BTreeMap::new();
            for (m, a) in &poly {
                for (i, c) in &terms {
                    let mut k = m.clone();
                    let pos = k.partition_point(|x| x <= i);
                    k.insert(pos, *i);
                    *next.entry(k).or_insert_with(Q::zero) += a * *c;
                }
            }
            next.retain(|_, c| !c.is_zero());
            poly = next;
        }
        Ok(poly)
    }

    /// The form on formal combinations, extended multilinearly.
    pub fn eval(&self, slots: &[LinComb]) -> Result<HeightValue, IsectError> {
        let poly = self.expand(slots)?;
        let mut acc = HeightValue::zero();
        for (m, c) in &poly {
            let v = self.entries.get(m).ok_or_else(|| IsectError::MissingEntry(self.key_string(m)))?;
            acc += &v.scale(c);
        }
        Ok(acc)
    }

    /// Copy of the form over a larger class list; existing entries keep their values.
    pub fn extended(&self, extra: &[String]) -> Result<IntersectionForm, IsectError> {
        let mut names = self.names.clone();
        names.extend(extra.iter().cloned());
        let mut out = IntersectionForm::new(names, self.arity)?;
        for (m, v) in &self.entries {
            out.entries.insert(m.clone(), v.clone());
        }
        Ok(out)
    }
}
