use std::collections::BTreeMap;

use heightnum::{is_prime, HeightValue, Q};
use num_traits::{One, Signed, Zero};

use crate::form::{IntersectionForm, LinComb};
use crate::IsectError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClassKind {
    Polarization,
    RelativeCanonical,
    Vertical { prime: u64, component: String },
    BasePullback,
    Auxiliary,
}

impl ClassKind {
    /// Classes whose products have a generic-fibre degree.
    pub fn is_horizontal(&self) -> bool {
        matches!(self, ClassKind::Polarization | ClassKind::RelativeCanonical | ClassKind::Auxiliary)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorClass {
    pub name: String,
    pub kind: ClassKind,
}

impl DivisorClass {
    pub fn new(name: &str, kind: ClassKind) -> Self {
        DivisorClass { name: name.to_string(), kind }
    }

    pub fn vertical(name: &str, prime: u64, component: &str) -> Self {
        DivisorClass::new(name, ClassKind::Vertical { prime, component: component.to_string() })
    }
}

/// Spec(O_K) versus a smooth curve over a field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseKind {
    Arithmetic,
    Geometric,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiberComponent {
    pub prime: u64,
    pub component_id: String,
    /// (L|_E^n)
    pub deg_l: Q,
    /// (L|_E^{n-1}.K|_E)
    pub deg_lk: Q,
    pub fiber_multiplicity: u32,
}

impl FiberComponent {
    pub fn new(prime: u64, id: &str, deg_l: Q, deg_lk: Q, mult: u32) -> Self {
        FiberComponent { prime, component_id: id.to_string(), deg_l, deg_lk, fiber_multiplicity: mult }
    }
}

#[derive(Debug, Clone)]
pub struct IntersectionModel {
    pub n: usize,
    pub degree_kq: u32,
    pub base: BaseKind,
    pub classes: Vec<DivisorClass>,
    pub form: IntersectionForm,
    pub l_class: String,
    pub k_class: String,
    pub deg_ln: Q,
    pub deg_lk: Q,
    pub fibers: Vec<FiberComponent>,
    /// n-fold generic-fibre degrees of horizontal classes, keyed by sorted names.
    pub generic: BTreeMap<Vec<String>, Q>,
}

impl IntersectionModel {
    /// An empty form over `classes`; entries are filled with [`IntersectionModel::set`].
    #[allow(clippy::too_many_arguments)]
    pub fn skeleton(
        n: usize,
        degree_kq: u32,
        base: BaseKind,
        classes: Vec<DivisorClass>,
        l_class: &str,
        k_class: &str,
        deg_ln: Q,
        deg_lk: Q,
    ) -> Result<Self, IsectError> {
        if n == 0 {
            return Err(IsectError::InvalidModel("relative dimension must be positive".into()));
        }
        let form = IntersectionForm::new(classes.iter().map(|c| c.name.clone()).collect(), n + 1)?;
        Ok(IntersectionModel {
            n,
            degree_kq,
            base,
            classes,
            form,
            l_class: l_class.to_string(),
            k_class: k_class.to_string(),
            deg_ln,
            deg_lk,
            fibers: Vec::new(),
            generic: BTreeMap::new(),
        })
    }

    pub fn set(&mut self, names: &[&str], v: HeightValue) -> Result<(), IsectError> {
        self.form.set(names, v)
    }

    pub fn get(&self, names: &[&str]) -> Result<&HeightValue, IsectError> {
        self.form.get(names)
    }

    pub fn set_generic(&mut self, names: &[&str], v: Q) {
        let mut k: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        k.sort();
        self.generic.insert(k, v);
    }

    pub fn class(&self, name: &str) -> Option<&DivisorClass> {
        self.classes.iter().find(|c| c.name == name)
    }

    pub fn l(&self) -> LinComb {
        LinComb::class(&self.l_class)
    }

    pub fn k(&self) -> LinComb {
        LinComb::class(&self.k_class)
    }

    pub fn eval(&self, slots: &[LinComb]) -> Result<HeightValue, IsectError> {
        self.form.eval(slots)
    }

    /// (L̄^{n+1})
    pub fn l_top(&self) -> Result<HeightValue, IsectError> {
        self.eval(&vec![self.l(); self.n + 1])
    }

    /// (L̄^n.K̄)
    pub fn l_n_k(&self) -> Result<HeightValue, IsectError> {
        let mut s = vec![self.l(); self.n];
        s.push(self.k());
        self.eval(&s)
    }

    /// The intersection weight of a point of the base: log p, or 1 on a curve.
    pub fn vertical_weight(&self, p: u64) -> Result<HeightValue, IsectError> {
        match self.base {
            BaseKind::Arithmetic => Ok(HeightValue::log(p)?),
            BaseKind::Geometric => Ok(HeightValue::from_int(1)),
        }
    }

    /// Coefficient of the vertical weight in a value supported over `p`.
    pub fn vertical_degree(&self, v: &HeightValue, p: u64) -> Option<Q> {
        match self.base {
            BaseKind::Arithmetic => {
                let c = v.log_coeff(p);
                let rest = v - &HeightValue::log_term(p, c.clone()).ok()?;
                rest.is_zero().then_some(c)
            }
            BaseKind::Geometric => v.as_rational().cloned(),
        }
    }

    pub fn generic_degree(&self, names: &[String]) -> Result<Q, IsectError> {
        let mut k = names.to_vec();
        k.sort();
        if let Some(v) = self.generic.get(&k) {
            return Ok(v.clone());
        }
        let ls = names.iter().filter(|s| **s == self.l_class).count();
        let ks = names.iter().filter(|s| **s == self.k_class).count();
        if ls == self.n && names.len() == self.n {
            return Ok(self.deg_ln.clone());
        }
        if ls + 1 == self.n && ks == 1 && names.len() == self.n {
            return Ok(self.deg_lk.clone());
        }
        Err(IsectError::MissingGenericDegree(k.join(",")))
    }

    pub fn validate(&self) -> Result<(), IsectError> {
        if self.n == 0 {
            return Err(IsectError::InvalidModel("relative dimension must be positive".into()));
        }
        if self.degree_kq == 0 {
            return Err(IsectError::InvalidModel("[K:Q] must be positive".into()));
        }
        if self.form.arity() != self.n + 1 {
            return Err(IsectError::InvalidModel("form arity must be n+1".into()));
        }
        for c in [&self.l_class, &self.k_class] {
            if self.class(c).is_none() {
                return Err(IsectError::MissingClass(c.clone()));
            }
        }
        if !self.deg_ln.is_positive() {
            return Err(IsectError::InvalidModel("deg_Ln must be positive".into()));
        }
        for c in &self.classes {
            if let ClassKind::Vertical { prime, .. } = &c.kind {
                if self.base == BaseKind::Arithmetic && !is_prime(*prime) {
                    return Err(IsectError::Height(heightnum::HeightError::NonPrimeLabel(*prime)));
                }
            }
        }
        let missing = self.form.missing();
        if let Some(first) = missing.first() {
            return Err(IsectError::IncompleteForm(first.clone()));
        }
        for f in &self.fibers {
            if self.base == BaseKind::Arithmetic && !is_prime(f.prime) {
                return Err(IsectError::Height(heightnum::HeightError::NonPrimeLabel(f.prime)));
            }
            if !f.deg_l.is_positive() {
                return Err(IsectError::InvalidModel(format!("fibre component {}@{} has deg_L <= 0", f.component_id, f.prime)));
            }
            if f.fiber_multiplicity == 0 {
                return Err(IsectError::InvalidModel(format!("fibre component {}@{} has multiplicity 0", f.component_id, f.prime)));
            }
        }
        self.check_vertical_consistency()
    }

    /// The class carrying the given fibre component, if the model lists one.
    pub fn vertical_class(&self, p: u64, component: &str) -> Option<&DivisorClass> {
        self.classes.iter().find(|c| matches!(&c.kind, ClassKind::Vertical { prime, component: id } if *prime == p && id == component))
    }

    /// Restricted degrees recorded in `fibers` must match the form.
    pub fn check_vertical_consistency(&self) -> Result<(), IsectError> {
        for f in &self.fibers {
            let Some(cls) = self.vertical_class(f.prime, &f.component_id) else { continue };
            let (dl, dlk) = self.restricted_degrees(&cls.name, f.prime)?;
            if dl != f.deg_l || dlk != f.deg_lk {
                return Err(IsectError::InconsistentFiber(format!(
                    "{}@{}: form gives ({dl}, {dlk}), fibre record says ({}, {})",
                    f.component_id, f.prime, f.deg_l, f.deg_lk
                )));
            }
        }
        Ok(())
    }

    /// (L^n.E, L^{n-1}.K.E) divided by the vertical weight.
    pub fn restricted_degrees(&self, class: &str, p: u64) -> Result<(Q, Q), IsectError> {
        let e = LinComb::class(class);
        let mut s1 = vec![self.l(); self.n];
        s1.push(e.clone());
        let mut s2 = vec![self.l(); self.n - 1];
        s2.push(self.k());
        s2.push(e);
        let a = self.eval(&s1)?;
        let b = self.eval(&s2)?;
        let bad = || IsectError::InconsistentFiber(format!("class {class} has intersections not supported over {p}"));
        Ok((self.vertical_degree(&a, p).ok_or_else(bad)?, self.vertical_degree(&b, p).ok_or_else(bad)?))
    }

    /// Re-reads the fibre records from the form after a change of L or K.
    pub fn refresh_fibers(&mut self) -> Result<(), IsectError> {
        let mut updated = self.fibers.clone();
        for f in updated.iter_mut() {
            if let Some(cls) = self.vertical_class(f.prime, &f.component_id) {
                let (dl, dlk) = self.restricted_degrees(&cls.name.clone(), f.prime)?;
                f.deg_l = dl;
                f.deg_lk = dlk;
            }
        }
        self.fibers = updated;
        Ok(())
    }

    /// Replaces one class by a combination of the current classes, keeping its name.
    pub fn substitute(&self, name: &str, combo: &LinComb) -> Result<IntersectionModel, IsectError> {
        if self.class(name).is_none() {
            return Err(IsectError::MissingClass(name.to_string()));
        }
        let mut out = self.clone();
        for m in self.form.all_monomials() {
            let slots: Vec<LinComb> = m
                .iter()
                .map(|&i| {
                    let nm = &self.form.names()[i];
                    if nm == name {
                        combo.clone()
                    } else {
                        LinComb::class(nm)
                    }
                })
                .collect();
            let v = self.form.eval(&slots)?;
            out.form.set_monomial(m, v);
        }
        if name == self.l_class || name == self.k_class {
            out.refresh_fibers()?;
        }
        Ok(out)
    }

    /// L ↦ L + π*D for a base class of total degree `deg`: only the L-linear
    /// terms against horizontal products change.
    pub fn shift_polarization(&self, deg: &HeightValue) -> Result<IntersectionModel, IsectError> {
        let li = self.form.index_of(&self.l_class).ok_or_else(|| IsectError::MissingClass(self.l_class.clone()))?;
        let mut out = self.clone();
        for m in self.form.all_monomials() {
            let k = m.iter().filter(|&&i| i == li).count();
            if k == 0 {
                continue;
            }
            let mut rest: Vec<String> = Vec::with_capacity(self.n);
            let mut dropped = false;
            for &i in &m {
                if i == li && !dropped {
                    dropped = true;
                    continue;
                }
                rest.push(self.form.names()[i].clone());
            }
            let horizontal = rest.iter().all(|nm| self.class(nm).map(|c| c.kind.is_horizontal()).unwrap_or(false));
            if !horizontal {
                continue;
            }
            let g = self.generic_degree(&rest)?;
            if g.is_zero() {
                continue;
            }
            let old = self.form.entry(&m).ok_or_else(|| IsectError::MissingEntry(self.form.key_string(&m)))?;
            let shift = deg.scale(&(g * Q::from_integer((k as i64).into())));
            out.form.set_monomial(m, old + &shift);
        }
        Ok(out)
    }

    pub fn same_generic_fiber(&self, other: &IntersectionModel) -> bool {
        self.n == other.n && self.degree_kq == other.degree_kq && self.deg_ln == other.deg_ln && self.deg_lk == other.deg_lk
    }

    /// S̄ = n·(−deg_LK)/deg_Ln.
    pub fn sbar(&self) -> Q {
        -Q::from_integer((self.n as i64).into()) * &self.deg_lk / &self.deg_ln
    }

    pub fn d_q(&self) -> Q {
        Q::from_integer((self.degree_kq as i64).into())
    }

    pub fn n_q(&self) -> Q {
        Q::from_integer((self.n as i64).into())
    }

    pub fn one_over_d(&self) -> Q {
        Q::one() / self.d_q()
    }
}
