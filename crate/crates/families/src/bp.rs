//! Multiplicities of monomial singularities, toric discrepancies, and the
//! Brieskorn–Pham analyzer built on them.

use std::collections::{BTreeMap, BTreeSet};

use heightnum::{qi, Q};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::FamiliesError;

/// Affine semigroup in ℕ^dim given by generators, optionally cut by one
/// equation represented by the initial monomial of its tangent cone.
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialSemigroup {
    pub dim: usize,
    pub generators: Vec<Vec<u32>>,
    pub initial_monomial: Option<Vec<u32>>,
}

fn total(v: &[u32]) -> u32 {
    v.iter().sum()
}

fn leq(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn sub(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// All exponent vectors of total degree exactly `deg`.
fn shell(dim: usize, deg: u32) -> Vec<Vec<u32>> {
    if dim == 0 {
        return if deg == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in (0..=deg).rev() {
        for mut rest in shell(dim - 1, deg - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

impl MonomialSemigroup {
    pub fn from_generators(dim: usize, generators: Vec<Vec<u32>>) -> Result<Self, FamiliesError> {
        if generators.iter().any(|g| g.len() != dim || total(g) == 0) {
            return Err(FamiliesError::InvalidArgument("generators must be nonzero vectors of the ambient dimension".into()));
        }
        Ok(MonomialSemigroup { dim, generators, initial_monomial: None })
    }

    /// ℕ^dim, the local ring of a smooth point.
    pub fn full(dim: usize) -> Self {
        let gens = (0..dim)
            .map(|i| {
                let mut e = vec![0; dim];
                e[i] = 1;
                e
            })
            .collect();
        MonomialSemigroup { dim, generators: gens, initial_monomial: None }
    }

    /// Invariant monomials of C^dim/μ_r acting with weights w.
    pub fn cyclic_quotient(r: u32, weights: &[u32]) -> Result<Self, FamiliesError> {
        if r == 0 {
            return Err(FamiliesError::InvalidArgument("group order must be positive".into()));
        }
        let dim = weights.len();
        let invariant = |v: &[u32]| v.iter().zip(weights).map(|(a, w)| (*a as u64) * (*w as u64)).sum::<u64>() % r as u64 == 0;
        // invariants are generated in degree ≤ r
        let mut elems: Vec<Vec<u32>> = Vec::new();
        for d in 1..=r {
            elems.extend(shell(dim, d).into_iter().filter(|v| invariant(v)));
        }
        let set: BTreeSet<Vec<u32>> = elems.iter().cloned().collect();
        let atoms = elems
            .iter()
            .filter(|s| !elems.iter().any(|t| t != *s && leq(t, s) && set.contains(&sub(s, t))))
            .cloned()
            .collect();
        Self::from_generators(dim, atoms)
    }

    /// The hypersurface Σ X_i^D in C^dim at the origin.
    pub fn power_hypersurface(dim: usize, d: u32) -> Result<Self, FamiliesError> {
        let mut u = vec![0; dim];
        u[0] = d;
        Self::full(dim).with_initial_monomial(u)
    }

    pub fn with_initial_monomial(mut self, u: Vec<u32>) -> Result<Self, FamiliesError> {
        if u.len() != self.dim || total(&u) == 0 {
            return Err(FamiliesError::InvalidArgument("initial monomial must be a nonzero vector of the ambient dimension".into()));
        }
        self.initial_monomial = Some(u);
        Ok(self)
    }

    /// Krull dimension of the ring.
    pub fn krull_dim(&self) -> usize {
        let rows: Vec<Vec<Q>> = self.generators.iter().map(|g| g.iter().map(|&x| qi(x as i64)).collect()).collect();
        let r = rank(rows, self.dim);
        r - usize::from(self.initial_monomial.is_some())
    }

    /// Elements of the semigroup with their order: the largest number of
    /// nonzero elements summing to them. Complete for orders < `k_max`.
    fn orders(&self, k_max: u32) -> BTreeMap<Vec<u32>, u32> {
        let max_gen = self.generators.iter().map(|g| total(g)).max().unwrap_or(1);
        let deg_cap = k_max * max_gen;
        let mut by_degree: BTreeMap<u32, BTreeSet<Vec<u32>>> = BTreeMap::new();
        by_degree.entry(0).or_default().insert(vec![0; self.dim]);
        for d in 0..deg_cap {
            let Some(layer) = by_degree.get(&d).cloned() else { continue };
            for s in layer {
                for g in &self.generators {
                    let t: Vec<u32> = s.iter().zip(g).map(|(a, b)| a + b).collect();
                    let td = total(&t);
                    if td <= deg_cap {
                        by_degree.entry(td).or_default().insert(t);
                    }
                }
            }
        }
        let mut ord: BTreeMap<Vec<u32>, u32> = BTreeMap::new();
        for layer in by_degree.values() {
            for s in layer {
                let best = self
                    .generators
                    .iter()
                    .filter(|g| leq(g, s))
                    .filter_map(|g| ord.get(&sub(s, g)).map(|o| o + 1))
                    .max()
                    .unwrap_or(0);
                ord.insert(s.clone(), best);
            }
        }
        ord
    }

    /// Lengths ℓ(R/m^k) for k = 1..=k_max.
    pub fn hilbert_samuel(&self, k_max: u32) -> Vec<u64> {
        let ord = self.orders(k_max);
        let excluded = |s: &Vec<u32>| match &self.initial_monomial {
            Some(u) => leq(u, s) && ord.contains_key(&sub(s, u)),
            None => false,
        };
        let mut counts = vec![0u64; k_max as usize + 1];
        for (s, &o) in &ord {
            if o < k_max && !excluded(s) {
                counts[o as usize] += 1;
            }
        }
        let mut out = Vec::with_capacity(k_max as usize);
        let mut acc = 0;
        for k in 1..=k_max as usize {
            acc += counts[k - 1];
            out.push(acc);
        }
        out
    }
}

fn rank(mut rows: Vec<Vec<Q>>, ncols: usize) -> usize {
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let pivot = rows[r].clone();
        for row in rows.iter_mut().skip(r + 1) {
            if !row[c].is_zero() {
                let f = &row[c] / &pivot[c];
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x -= &f * y;
                }
            }
        }
        r += 1;
    }
    r
}

/// Leading coefficient e of ℓ(R/m^k) ~ e·k^d/d!, read off as the d-th finite
/// difference; stable when the last three differences agree.
pub fn multiplicity_hilbert_samuel(sg: &MonomialSemigroup, degree_bound: u32) -> (Q, bool) {
    let d = sg.krull_dim();
    let h: Vec<i64> = sg.hilbert_samuel(degree_bound).into_iter().map(|x| x as i64).collect();
    let mut diff = h;
    for _ in 0..d {
        diff = diff.windows(2).map(|w| w[1] - w[0]).collect();
    }
    let Some(&last) = diff.last() else { return (Q::zero(), false) };
    let stable = diff.len() >= 3 && diff[diff.len() - 3..].iter().all(|&x| x == last);
    (qi(last), stable)
}

fn solve_q(cols: &[Vec<i64>], v: &[i64]) -> Option<Vec<Q>> {
    let n = v.len();
    let mut rows: Vec<Vec<Q>> = (0..n).map(|i| cols.iter().map(|c| qi(c[i])).chain([qi(v[i])]).collect()).collect();
    let k = cols.len();
    for c in 0..k {
        let p = (c..n).find(|&i| !rows[i][c].is_zero())?;
        rows.swap(c, p);
        let inv = Q::one() / &rows[c][c];
        for x in rows[c].iter_mut() {
            *x *= &inv;
        }
        let pivot = rows[c].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != c && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x -= &f * y;
                }
            }
        }
    }
    Some((0..k).map(|i| rows[i][k].clone()).collect())
}

fn gcd_all(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, &x| g.gcd(&x))
}

/// a(E_v) = Σλ_i − 1 for v = Σλ_i u_i in a simplicial cone with primitive
/// generators u_i.
pub fn toric_log_discrepancy(cone: &[Vec<i64>], v: &[i64]) -> Result<Q, FamiliesError> {
    let n = v.len();
    if cone.len() != n || cone.iter().any(|u| u.len() != n) {
        return Err(FamiliesError::InvalidCone("cone must be simplicial and full-dimensional".into()));
    }
    if cone.iter().any(|u| gcd_all(u) != 1) {
        return Err(FamiliesError::InvalidCone("cone generators must be primitive".into()));
    }
    if gcd_all(v) != 1 {
        return Err(FamiliesError::NotPrimitive(v.to_vec()));
    }
    let lambda = solve_q(cone, v).ok_or_else(|| FamiliesError::InvalidCone("cone generators are dependent".into()))?;
    if lambda.iter().any(|l| l.is_negative()) {
        return Err(FamiliesError::OutsideCone(v.to_vec()));
    }
    Ok(lambda.iter().fold(Q::zero(), |a, l| a + l) - Q::one())
}

/// Row-style Hermite normal form of the lattice spanned by `gens`; returns
/// an upper triangular basis with positive pivots.
pub fn hermite_basis(gens: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let Some(n) = gens.first().map(|g| g.len()) else { return vec![] };
    let mut rows: Vec<Vec<i128>> = gens.iter().map(|g| g.iter().map(|&x| x as i128).collect()).collect();
    let mut basis = Vec::new();
    for c in 0..n {
        // gcd-combine the column over the remaining rows
        loop {
            let nz: Vec<usize> = (0..rows.len()).filter(|&i| rows[i][c] != 0).collect();
            if nz.len() <= 1 {
                break;
            }
            let piv = *nz.iter().min_by_key(|&&i| rows[i][c].abs()).unwrap();
            let prow = rows[piv].clone();
            for &i in &nz {
                if i != piv {
                    let f = rows[i][c] / prow[c];
                    for (x, y) in rows[i].iter_mut().zip(&prow) {
                        *x -= f * y;
                    }
                }
            }
        }
        if let Some(i) = (0..rows.len()).find(|&i| rows[i][c] != 0) {
            let mut row = rows.remove(i);
            if row[c] < 0 {
                row.iter_mut().for_each(|x| *x = -*x);
            }
            basis.push(row);
        }
        rows.retain(|r| r.iter().any(|&x| x != 0));
    }
    // reduce entries above the pivots
    for i in 0..basis.len() {
        let c = basis[i].iter().position(|&x| x != 0).unwrap();
        for j in 0..i {
            let f = basis[j][c].div_euclid(basis[i][c]);
            if f != 0 {
                let bi = basis[i].clone();
                for (x, y) in basis[j].iter_mut().zip(&bi) {
                    *x -= f * y;
                }
            }
        }
    }
    basis.into_iter().map(|r| r.into_iter().map(|x| x as i64).collect()).collect()
}

/// Integer coordinates of x in an upper triangular basis, if x lies in the lattice.
fn lattice_coords(basis: &[Vec<i64>], x: &[i64]) -> Option<Vec<i64>> {
    let mut rem: Vec<i64> = x.to_vec();
    let mut out = vec![0; basis.len()];
    for (i, b) in basis.iter().enumerate() {
        let c = b.iter().position(|&v| v != 0)?;
        if rem[c] % b[c] != 0 {
            return None;
        }
        let f = rem[c] / b[c];
        out[i] = f;
        for (r, v) in rem.iter_mut().zip(b) {
            *r -= f * v;
        }
    }
    rem.iter().all(|&r| r == 0).then_some(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct LcCheck {
    /// primitive box points of the quotient lattice (scaled by the group order) and their discrepancies
    #[serde(serialize_with = "ser_pairs")]
    pub discrepancies: Vec<(Vec<i64>, Q)>,
    pub log_canonical: bool,
    pub log_terminal: bool,
}

/// Discrepancies of the toric valuations of C^n/μ_r at the box points
/// (j·w mod r)/r, computed in the lattice ℤ^n + ℤ·w/r.
pub fn quotient_chart_check(r: u32, weights: &[u32]) -> Result<LcCheck, FamiliesError> {
    let n = weights.len();
    let ri = r as i64;
    let mut gens: Vec<Vec<i64>> = (0..n)
        .map(|i| {
            let mut e = vec![0; n];
            e[i] = ri;
            e
        })
        .collect();
    gens.push(weights.iter().map(|&w| w as i64).collect());
    let basis = hermite_basis(&gens);
    let mut cone = Vec::new();
    for i in 0..n {
        let g = (1..=ri)
            .find_map(|g| {
                let mut e = vec![0; n];
                e[i] = g;
                lattice_coords(&basis, &e)
            })
            .ok_or_else(|| FamiliesError::InvalidCone("no lattice point on a coordinate ray".into()))?;
        cone.push(g);
    }
    let mut discrepancies = Vec::new();
    let mut lc = true;
    let mut klt = true;
    for j in 1..ri {
        let v: Vec<i64> = weights.iter().map(|&w| (j * w as i64).rem_euclid(ri)).collect();
        if v.iter().all(|&x| x == 0) {
            continue;
        }
        let c = lattice_coords(&basis, &v).ok_or_else(|| FamiliesError::InvalidCone("box point outside the lattice".into()))?;
        // multiples of an earlier box point give no new divisor
        if gcd_all(&c) != 1 {
            continue;
        }
        let a = toric_log_discrepancy(&cone, &c)?;
        lc &= a >= -Q::one();
        klt &= a > -Q::one();
        discrepancies.push((v, a));
    }
    Ok(LcCheck { discrepancies, log_canonical: lc, log_terminal: klt })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BrieskornPhamSpec {
    pub weights: Vec<u32>,
    pub prime: u64,
}

impl BrieskornPhamSpec {
    pub fn new(weights: Vec<u32>, prime: u64) -> Result<Self, FamiliesError> {
        if weights.len() < 2 || weights.contains(&0) {
            return Err(FamiliesError::InvalidArgument("need at least two positive weights".into()));
        }
        if !heightnum::is_prime(prime) {
            return Err(FamiliesError::Height(heightnum::HeightError::NonPrimeLabel(prime)));
        }
        for (i, &a) in weights.iter().enumerate() {
            if (a as u64).gcd(&prime) != 1 {
                return Err(FamiliesError::CoprimalityViolated(format!("a_{i} = {a} is not coprime to p = {prime}")));
            }
            for (j, &b) in weights.iter().enumerate().skip(i + 1) {
                if a.gcd(&b) != 1 {
                    return Err(FamiliesError::CoprimalityViolated(format!("a_{i} = {a} and a_{j} = {b} share a factor")));
                }
            }
        }
        Ok(BrieskornPhamSpec { weights, prime })
    }

    pub fn n(&self) -> usize {
        self.weights.len() - 1
    }

    /// d_i = Π_{j≠i} a_j
    pub fn exponents(&self) -> Vec<u64> {
        (0..self.weights.len())
            .map(|i| self.weights.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, &a)| a as u64).product())
            .collect()
    }

    /// min a_i > n
    pub fn admissible(&self) -> bool {
        self.weights.iter().all(|&a| a as usize > self.n())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BpReport {
    pub weights: Vec<u32>,
    pub prime: u64,
    pub exponents: Vec<u64>,
    pub chart_order: u32,
    pub chart_weights: Vec<u32>,
    #[serde(serialize_with = "ser_q")]
    pub multiplicity_lower_bound: Q,
    pub multiplicity_stable: bool,
    pub threshold: u64,
    pub unstable: bool,
    pub admissible: bool,
    pub lc_check: LcCheck,
}

/// The point [0:…:0:1] sits on the chart C^n/μ_{a_n} with weights
/// a_0..a_{n−1}; its multiplicity bounds that of the reduction from below.
pub fn brieskorn_pham_analyze(spec: &BrieskornPhamSpec) -> Result<BpReport, FamiliesError> {
    let n = spec.n();
    let r = *spec.weights.last().unwrap();
    let chart_weights: Vec<u32> = spec.weights[..n].iter().map(|a| a % r).collect();
    let sg = MonomialSemigroup::cyclic_quotient(r, &chart_weights)?;
    let (bound, stable) = multiplicity_hilbert_samuel(&sg, n as u32 + 6);
    let threshold: u64 = (1..=n as u64 + 1).product();
    let unstable = stable && bound > qi(threshold as i64);
    let lc_check = quotient_chart_check(r, &chart_weights)?;
    Ok(BpReport {
        weights: spec.weights.clone(),
        prime: spec.prime,
        exponents: spec.exponents(),
        chart_order: r,
        chart_weights,
        multiplicity_lower_bound: bound,
        multiplicity_stable: stable,
        threshold,
        unstable,
        admissible: spec.admissible(),
        lc_check,
    })
}

fn ser_q<S: serde::Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

fn ser_pairs<S: serde::Serializer>(v: &[(Vec<i64>, Q)], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for (p, a) in v {
        seq.serialize_element(&(p, a.to_string()))?;
    }
    seq.end()
}
