//! JSON model files.
//!
//! ```json
//! {"n":1,"degree_KQ":1,"deg_Ln":"1","deg_LK":"-2",
//!  "classes":[{"name":"L","kind":"polarization"},{"name":"K","kind":"relative-canonical"},
//!             {"name":"F2","kind":"vertical","prime":2,"component":"0"}],
//!  "form":{"L,L":{"const":"1/2","logs":{},"real":0.0,"real_exact":true}, …},
//!  "L_class":"L","K_class":"K","fibers":[…]}
//! ```
//! Optional keys: `"base"` (`"arithmetic"` | `"geometric"`) and `"generic"`
//! (n-fold generic-fibre degrees keyed like `form`).

use std::collections::BTreeMap;
use std::path::Path;

use heightnum::{parse_q, HeightValue};
use serde::{Deserialize, Serialize};

use crate::model::{BaseKind, ClassKind, DivisorClass, FiberComponent, IntersectionModel};
use crate::IsectError;

#[derive(Serialize, Deserialize)]
struct ClassEntry {
    name: String,
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    prime: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    component: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct FiberEntry {
    prime: u64,
    component_id: String,
    #[serde(rename = "deg_L")]
    deg_l: String,
    #[serde(rename = "deg_LK")]
    deg_lk: String,
    #[serde(default = "one")]
    fiber_multiplicity: u32,
}

fn one() -> u32 {
    1
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    n: usize,
    #[serde(rename = "degree_KQ")]
    degree_kq: u32,
    #[serde(rename = "deg_Ln")]
    deg_ln: String,
    #[serde(rename = "deg_LK")]
    deg_lk: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    base: Option<String>,
    classes: Vec<ClassEntry>,
    form: BTreeMap<String, HeightValue>,
    #[serde(rename = "L_class")]
    l_class: String,
    #[serde(rename = "K_class")]
    k_class: String,
    #[serde(default)]
    fibers: Vec<FiberEntry>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    generic: BTreeMap<String, String>,
}

fn kind_from(e: &ClassEntry) -> Result<ClassKind, IsectError> {
    Ok(match e.kind.as_str() {
        "polarization" => ClassKind::Polarization,
        "relative-canonical" => ClassKind::RelativeCanonical,
        "base-pullback" => ClassKind::BasePullback,
        "auxiliary" => ClassKind::Auxiliary,
        "vertical" => ClassKind::Vertical {
            prime: e.prime.ok_or_else(|| IsectError::InvalidModel(format!("vertical class {} lacks a prime", e.name)))?,
            component: e.component.clone().unwrap_or_else(|| e.name.clone()),
        },
        other => return Err(IsectError::InvalidModel(format!("unknown class kind {other:?}"))),
    })
}

fn kind_to(c: &DivisorClass) -> ClassEntry {
    let (kind, prime, component) = match &c.kind {
        ClassKind::Polarization => ("polarization", None, None),
        ClassKind::RelativeCanonical => ("relative-canonical", None, None),
        ClassKind::BasePullback => ("base-pullback", None, None),
        ClassKind::Auxiliary => ("auxiliary", None, None),
        ClassKind::Vertical { prime, component } => ("vertical", Some(*prime), Some(component.clone())),
    };
    ClassEntry { name: c.name.clone(), kind: kind.to_string(), prime, component }
}

fn split_key(k: &str) -> Vec<&str> {
    k.split(',').map(|s| s.trim()).collect()
}

pub fn model_from_json(text: &str) -> Result<IntersectionModel, IsectError> {
    let f: ModelFile = serde_json::from_str(text).map_err(|e| {
        let msg = e.to_string();
        if msg.contains("NonPrimeLabel") {
            IsectError::Parse(format!("NonPrimeLabel: {msg}"))
        } else {
            IsectError::Parse(msg)
        }
    })?;
    let base = match f.base.as_deref() {
        None | Some("arithmetic") => BaseKind::Arithmetic,
        Some("geometric") => BaseKind::Geometric,
        Some(other) => return Err(IsectError::InvalidModel(format!("unknown base {other:?}"))),
    };
    let classes = f.classes.iter().map(|e| Ok(DivisorClass { name: e.name.clone(), kind: kind_from(e)? })).collect::<Result<Vec<_>, IsectError>>()?;
    let mut m = IntersectionModel::skeleton(
        f.n,
        f.degree_kq,
        base,
        classes,
        &f.l_class,
        &f.k_class,
        parse_q(&f.deg_ln)?,
        parse_q(&f.deg_lk)?,
    )?;
    for (k, v) in f.form {
        m.set(&split_key(&k), v)?;
    }
    for (k, v) in f.generic {
        m.set_generic(&split_key(&k), parse_q(&v)?);
    }
    for e in f.fibers {
        m.fibers.push(FiberComponent::new(e.prime, &e.component_id, parse_q(&e.deg_l)?, parse_q(&e.deg_lk)?, e.fiber_multiplicity));
    }
    m.validate()?;
    Ok(m)
}

pub fn model_to_json(m: &IntersectionModel) -> String {
    let form = m.form.entries().iter().map(|(k, v)| (m.form.key_string(k), v.clone())).collect();
    let file = ModelFile {
        n: m.n,
        degree_kq: m.degree_kq,
        deg_ln: m.deg_ln.to_string(),
        deg_lk: m.deg_lk.to_string(),
        base: Some(match m.base {
            BaseKind::Arithmetic => "arithmetic".into(),
            BaseKind::Geometric => "geometric".into(),
        }),
        classes: m.classes.iter().map(kind_to).collect(),
        form,
        l_class: m.l_class.clone(),
        k_class: m.k_class.clone(),
        fibers: m
            .fibers
            .iter()
            .map(|f| FiberEntry {
                prime: f.prime,
                component_id: f.component_id.clone(),
                deg_l: f.deg_l.to_string(),
                deg_lk: f.deg_lk.to_string(),
                fiber_multiplicity: f.fiber_multiplicity,
            })
            .collect(),
        generic: m.generic.iter().map(|(k, v)| (k.join(","), v.to_string())).collect(),
    };
    serde_json::to_string_pretty(&file).expect("model serializes")
}

pub fn load_model(path: &Path) -> Result<IntersectionModel, IsectError> {
    let text = std::fs::read_to_string(path).map_err(|e| IsectError::Io(format!("{}: {e}", path.display())))?;
    model_from_json(&text)
}
