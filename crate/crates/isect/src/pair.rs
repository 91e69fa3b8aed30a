//! A model and a reference model on a common dominating model.
//!
//! Reference classes appear in the joint form as `ref:<name>`. Monomials
//! involving only one side are copied from that side; the builder supplies
//! the mixed ones, and evaluation fails with `IncompleteJointForm` when a
//! needed mixed monomial is absent.

use heightnum::HeightValue;

use crate::form::{IntersectionForm, LinComb};
use crate::model::IntersectionModel;
use crate::IsectError;

pub const REF_PREFIX: &str = "ref:";

pub fn ref_name(name: &str) -> String {
    format!("{REF_PREFIX}{name}")
}

#[derive(Debug, Clone)]
pub struct ModelPair {
    pub model: IntersectionModel,
    pub reference: IntersectionModel,
    pub joint: IntersectionForm,
}

impl ModelPair {
    /// `mixed` lists monomials (by joint names) that touch both sides.
    pub fn new(
        model: IntersectionModel,
        reference: IntersectionModel,
        mixed: Vec<(Vec<String>, HeightValue)>,
    ) -> Result<Self, IsectError> {
        if model.n != reference.n {
            return Err(IsectError::GenericFiberMismatch("relative dimensions differ".into()));
        }
        let ref_names: Vec<String> = reference.form.names().iter().map(|n| ref_name(n)).collect();
        let mut joint = model.form.extended(&ref_names)?;
        let offset = model.form.names().len();
        for (m, v) in reference.form.entries() {
            let mut shifted: Vec<usize> = m.iter().map(|i| i + offset).collect();
            shifted.sort_unstable();
            joint.set_monomial(shifted, v.clone());
        }
        for (names, v) in mixed {
            let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
            let key = joint.monomial(&refs)?;
            let pure_model = key.iter().all(|&i| i < offset);
            let pure_ref = key.iter().all(|&i| i >= offset);
            if pure_model || pure_ref {
                let existing = joint.entry(&key).cloned();
                if let Some(e) = existing {
                    if !e.approx_eq(&v, heightnum::REAL_TOL) {
                        return Err(IsectError::InvalidModel(format!(
                            "joint entry {} disagrees with its constituent form",
                            joint.key_string(&key)
                        )));
                    }
                }
            }
            joint.set_monomial(key, v);
        }
        Ok(ModelPair { model, reference, joint })
    }

    /// Pairs a model with itself; every mixed monomial equals its pure counterpart.
    pub fn diagonal(model: &IntersectionModel) -> Result<Self, IsectError> {
        let names: Vec<String> = model.form.names().to_vec();
        let k = names.len();
        let mut mixed = Vec::new();
        let all: Vec<String> = names.iter().cloned().chain(names.iter().map(|n| ref_name(n))).collect();
        let tmp = IntersectionForm::new(all.clone(), model.n + 1)?;
        for m in tmp.all_monomials() {
            let touches_model = m.iter().any(|&i| i < k);
            let touches_ref = m.iter().any(|&i| i >= k);
            if touches_model && touches_ref {
                let base: Vec<&str> = m.iter().map(|&i| names[i % k].as_str()).collect();
                let v = model.form.get(&base)?.clone();
                mixed.push((m.iter().map(|&i| all[i].clone()).collect(), v));
            }
        }
        ModelPair::new(model.clone(), model.clone(), mixed)
    }

    pub fn eval(&self, slots: &[LinComb]) -> Result<HeightValue, IsectError> {
        self.joint.eval(slots).map_err(|e| match e {
            IsectError::MissingEntry(k) => IsectError::IncompleteJointForm(k),
            other => other,
        })
    }

    /// p*L̄
    pub fn a(&self) -> LinComb {
        LinComb::class(&self.model.l_class)
    }

    /// q*L̄_ref
    pub fn b(&self) -> LinComb {
        LinComb::class(&ref_name(&self.reference.l_class))
    }

    pub fn k_a(&self) -> LinComb {
        LinComb::class(&self.model.k_class)
    }

    pub fn k_b(&self) -> LinComb {
        LinComb::class(&ref_name(&self.reference.k_class))
    }

    /// X^i·Y^j·extra
    pub fn mono(&self, x: &LinComb, i: usize, y: &LinComb, j: usize, extra: &[LinComb]) -> Result<HeightValue, IsectError> {
        let mut s = vec![x.clone(); i];
        s.extend(std::iter::repeat_n(y.clone(), j));
        s.extend(extra.iter().cloned());
        self.eval(&s)
    }
}
