//! Modular height and the Arakelov energy-type functionals.

use heightnum::{HeightValue, Q};
use num_traits::One;

use crate::model::IntersectionModel;
use crate::pair::ModelPair;
use crate::IsectError;

fn ensure_designated(m: &IntersectionModel) -> Result<(), IsectError> {
    for c in [&m.l_class, &m.k_class] {
        if m.class(c).is_none() {
            return Err(IsectError::MissingClass(c.clone()));
        }
    }
    Ok(())
}

/// −n·deg_LK·(L̄^{n+1}) + (n+1)·deg_Ln·(L̄^n.K̄), before any normalization.
pub fn df_numerator(m: &IntersectionModel) -> Result<HeightValue, IsectError> {
    ensure_designated(m)?;
    let n = m.n_q();
    let a = m.l_top()?.scale(&(-&n * &m.deg_lk));
    let b = m.l_n_k()?.scale(&((n + Q::one()) * &m.deg_ln));
    Ok(a + b)
}

/// h_K = (1/[K:ℚ])·(−n·deg_LK·(L̄^{n+1}) + (n+1)·deg_Ln·(L̄^n.K̄)).
pub fn modular_height(m: &IntersectionModel) -> Result<HeightValue, IsectError> {
    Ok(df_numerator(m)?.scale(&m.one_over_d()))
}

/// (L̄^{n+1})/[K:ℚ]
pub fn arakelov_energy(m: &IntersectionModel) -> Result<HeightValue, IsectError> {
    ensure_designated(m)?;
    Ok(m.l_top()?.scale(&m.one_over_d()))
}

pub fn relative_modular_height(m: &IntersectionModel, reference: &IntersectionModel) -> Result<HeightValue, IsectError> {
    if !m.same_generic_fiber(reference) {
        return Err(IsectError::GenericFiberMismatch(format!(
            "(n, [K:Q], deg_Ln, deg_LK) = ({}, {}, {}, {}) vs ({}, {}, {}, {})",
            m.n, m.degree_kq, m.deg_ln, m.deg_lk, reference.n, reference.degree_kq, reference.deg_ln, reference.deg_lk
        )));
    }
    Ok(modular_height(m)? - modular_height(reference)?)
}

/// 𝓔^{Ar}(model) − 𝓔^{Ar}(ref).
pub fn energy_rel(pair: &ModelPair) -> Result<HeightValue, IsectError> {
    Ok(arakelov_energy(&pair.model)? - arakelov_energy(&pair.reference)?)
}

/// (1/[K:ℚ])·((B^n − A^n)·K_B), A = p*L̄, B = q*L̄_ref.
pub fn ricci_energy_rel(pair: &ModelPair) -> Result<HeightValue, IsectError> {
    let n = pair.model.n;
    let kb = pair.k_b();
    let bb = pair.mono(&pair.b(), n, &pair.b(), 0, std::slice::from_ref(&kb))?;
    let aa = pair.mono(&pair.a(), n, &pair.a(), 0, std::slice::from_ref(&kb))?;
    Ok((bb - aa).scale(&pair.model.one_over_d()))
}

/// (1/[K:ℚ])·(A^n·(K_A − K_B)).
pub fn entropy_rel(pair: &ModelPair) -> Result<HeightValue, IsectError> {
    let n = pair.model.n;
    let diff = pair.k_a().minus(&pair.k_b());
    let v = pair.mono(&pair.a(), n, &pair.a(), 0, &[diff])?;
    Ok(v.scale(&pair.model.one_over_d()))
}

/// (1/[K:ℚ])·(−A^{n+1} − B^{n+1} + A·B^n + B·A^n).
pub fn aubin_i_rel(pair: &ModelPair) -> Result<HeightValue, IsectError> {
    let n = pair.model.n;
    let (a, b) = (pair.a(), pair.b());
    let v = pair.mono(&a, n + 1, &b, 0, &[])? + pair.mono(&b, n + 1, &a, 0, &[])?;
    let w = pair.mono(&a, 1, &b, n, &[])? + pair.mono(&a, n, &b, 1, &[])?;
    Ok((w - v).scale(&pair.model.one_over_d()))
}

/// (1/[K:ℚ])·(A·B^n − (n/(n+1))·B^{n+1} − (1/(n+1))·A^{n+1}).
pub fn aubin_j_rel(pair: &ModelPair) -> Result<HeightValue, IsectError> {
    let n = pair.model.n;
    let nq = pair.model.n_q();
    let n1 = &nq + Q::one();
    let (a, b) = (pair.a(), pair.b());
    let ab = pair.mono(&a, 1, &b, n, &[])?;
    let bb = pair.mono(&b, n + 1, &a, 0, &[])?.scale(&(&nq / &n1));
    let aa = pair.mono(&a, n + 1, &b, 0, &[])?.scale(&(Q::one() / &n1));
    Ok((ab - bb - aa).scale(&pair.model.one_over_d()))
}

/// lhs = h_K(model) − h_K(ref);
/// rhs = (n+1)(L^n)·[(S̄/(n+1))·Δ𝓔^{Ar} − 𝓔^{Ar.Ric} + Ent^{Ar}].
pub fn decomposition_check(pair: &ModelPair, sbar: Option<Q>) -> Result<(HeightValue, HeightValue), IsectError> {
    let lhs = relative_modular_height(&pair.model, &pair.reference)?;
    let m = &pair.model;
    let s = sbar.unwrap_or_else(|| m.sbar());
    let n1 = m.n_q() + Q::one();
    let inner = energy_rel(pair)?.scale(&(&s / &n1)) - ricci_energy_rel(pair)? + entropy_rel(pair)?;
    let rhs = inner.scale(&(n1 * &m.deg_ln));
    Ok((lhs, rhs))
}
