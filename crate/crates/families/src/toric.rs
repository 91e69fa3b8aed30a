//! Triple intersections of torus-invariant divisors on a complete simplicial
//! toric threefold, and the toric model of the blow-up family.
//!
//! The numbers are the unique solution of three sets of linear conditions:
//! D_i·D_j·D_k for distinct rays is 1/mult(σ) if they span a cone σ, a
//! product vanishes when its rays do not lie in a common cone, and
//! Σ_ρ ⟨m, u_ρ⟩ D_ρ·D_a·D_b = 0 for every character m.

use std::collections::BTreeMap;

use heightnum::{qi, Q};
use num_traits::{One, Zero};

use crate::FamiliesError;

#[derive(Debug, Clone)]
pub struct ToricFan {
    pub names: Vec<String>,
    pub rays: Vec<[i64; 3]>,
    pub cones: Vec<[usize; 3]>,
}

fn det3(a: [i64; 3], b: [i64; 3], c: [i64; 3]) -> i64 {
    a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0])
}

fn sorted3(mut t: [usize; 3]) -> [usize; 3] {
    t.sort_unstable();
    t
}

/// Row reduction over Q; returns the solution when the system has full column rank.
fn solve_exact(mut rows: Vec<Vec<Q>>, ncols: usize) -> Option<Vec<Q>> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = Q::one() / &rows[r][c];
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if pivots.len() < ncols {
        return None;
    }
    // inconsistent rows would read 0 = nonzero
    if rows[r..].iter().any(|row| !row[ncols].is_zero()) {
        return None;
    }
    Some((0..ncols).map(|i| rows[i][ncols].clone()).collect())
}

impl ToricFan {
    pub fn new(rays: &[(&str, [i64; 3])], cones: &[[&str; 3]]) -> Result<Self, FamiliesError> {
        let names: Vec<String> = rays.iter().map(|(n, _)| n.to_string()).collect();
        let idx = |s: &str| names.iter().position(|n| n == s).ok_or_else(|| FamiliesError::InvalidCone(format!("unknown ray {s}")));
        let cones = cones
            .iter()
            .map(|c| Ok(sorted3([idx(c[0])?, idx(c[1])?, idx(c[2])?])))
            .collect::<Result<Vec<_>, FamiliesError>>()?;
        let fan = ToricFan { names, rays: rays.iter().map(|(_, r)| *r).collect(), cones };
        for c in &fan.cones {
            if fan.multiplicity(c) == 0 {
                return Err(FamiliesError::InvalidCone(format!("cone {c:?} is not full-dimensional")));
            }
        }
        Ok(fan)
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    fn multiplicity(&self, c: &[usize; 3]) -> i64 {
        det3(self.rays[c[0]], self.rays[c[1]], self.rays[c[2]]).abs()
    }

    /// All D_i·D_j·D_k keyed by sorted index triples.
    pub fn intersection_table(&self) -> Result<BTreeMap<[usize; 3], Q>, FamiliesError> {
        let r = self.rays.len();
        let mut monos = Vec::new();
        for i in 0..r {
            for j in i..r {
                for k in j..r {
                    monos.push([i, j, k]);
                }
            }
        }
        let col: BTreeMap<[usize; 3], usize> = monos.iter().enumerate().map(|(c, m)| (*m, c)).collect();
        let n = monos.len();
        let mut rows = Vec::new();
        for m in &monos {
            let distinct = m[0] != m[1] && m[1] != m[2];
            let supported = self.cones.iter().any(|c| m.iter().all(|i| c.contains(i)));
            if distinct || !supported {
                let mut row = vec![Q::zero(); n + 1];
                row[col[m]] = Q::one();
                if let Some(c) = self.cones.iter().find(|c| *c == m) {
                    row[n] = Q::one() / qi(self.multiplicity(c));
                }
                rows.push(row);
            }
        }
        for a in 0..r {
            for b in a..r {
                for coord in 0..3 {
                    let mut row = vec![Q::zero(); n + 1];
                    for (rho, u) in self.rays.iter().enumerate() {
                        if u[coord] != 0 {
                            row[col[&sorted3([rho, a, b])]] += qi(u[coord]);
                        }
                    }
                    rows.push(row);
                }
            }
        }
        let sol = solve_exact(rows, n).ok_or_else(|| FamiliesError::InvalidCone("fan is not complete or not simplicial".into()))?;
        Ok(monos.into_iter().zip(sol).collect())
    }
}

/// Torus-invariant divisor as ray-name coefficients.
pub type ToricDivisor = BTreeMap<String, Q>;

pub fn divisor(terms: &[(&str, i64)]) -> ToricDivisor {
    let mut d = ToricDivisor::new();
    for (n, c) in terms {
        *d.entry(n.to_string()).or_insert_with(Q::zero) += qi(*c);
    }
    d
}

pub fn triple(fan: &ToricFan, table: &BTreeMap<[usize; 3], Q>, a: &ToricDivisor, b: &ToricDivisor, c: &ToricDivisor) -> Q {
    let mut s = Q::zero();
    for (x, cx) in a {
        for (y, cy) in b {
            for (z, cz) in c {
                let key = sorted3([fan.index(x).unwrap(), fan.index(y).unwrap(), fan.index(z).unwrap()]);
                s += cx * cy * cz * &table[&key];
            }
        }
    }
    s
}

/// The blow-up family over one closed point of the base, in the toric model
/// X × P¹ with X = Bl₁P² and the base point at t = 0. Numbers are in units
/// of the point's weight (log p in the arithmetic family).
#[derive(Debug, Clone, PartialEq)]
pub struct BlowupOracle {
    /// f*A·f*A·F, f*A·F², F³ with A = −K_X
    pub a2f: Q,
    pub af2: Q,
    pub f3: Q,
    /// (L'|_F^2, L'|_F·K'|_F) and the same for the strict transform G of the fibre
    pub deg_f: (Q, Q),
    pub deg_g: (Q, Q),
    /// L'³ − A³ and L'²·K' − A²·K
    pub delta_l3: Q,
    pub delta_l2k: Q,
    /// L^2 and L·K on the generic fibre
    pub generic: (Q, Q),
}

/// Fan of X × P¹ after the star subdivision of the cone over E × {0},
/// E the exceptional curve of X (ray e), {0} the ray t0. The new ray is f.
pub fn blowup_fan() -> ToricFan {
    let rays = [
        ("u1", [1, 0, 0]),
        ("u2", [0, 1, 0]),
        ("u3", [-1, -1, 0]),
        ("e", [1, 1, 0]),
        ("t0", [0, 0, 1]),
        ("ti", [0, 0, -1]),
        ("f", [1, 1, 1]),
    ];
    let mut cones: Vec<[&str; 3]> = Vec::new();
    for (a, b) in [("u1", "e"), ("e", "u2"), ("u2", "u3"), ("u3", "u1")] {
        cones.push([a, b, "ti"]);
        if !(b == "e" || a == "e") {
            cones.push([a, b, "t0"]);
        }
    }
    cones.extend([["u1", "e", "f"], ["u1", "f", "t0"], ["e", "u2", "f"], ["f", "u2", "t0"]]);
    ToricFan::new(&rays, &cones).expect("blow-up fan is valid")
}

pub fn blowup_oracle() -> Result<BlowupOracle, FamiliesError> {
    let fan = blowup_fan();
    let t = fan.intersection_table()?;
    let i = |a: &ToricDivisor, b: &ToricDivisor, c: &ToricDivisor| triple(&fan, &t, a, b, c);
    // pullbacks evaluate the support function at f = e + t0
    let a = divisor(&[("u1", 1), ("u2", 1), ("u3", 1), ("e", 1), ("f", 1)]);
    let k = divisor(&[("u1", -1), ("u2", -1), ("u3", -1), ("e", -1), ("f", -1)]);
    let f = divisor(&[("f", 1)]);
    let g = divisor(&[("t0", 1)]);
    let fiber = divisor(&[("t0", 1), ("f", 1)]);
    let mut lp = a.clone();
    *lp.get_mut("f").unwrap() -= Q::one();
    let mut kp = k.clone();
    *kp.get_mut("f").unwrap() += Q::one();
    let generic = (i(&a, &a, &fiber), i(&a, &k, &fiber));
    let ka = i(&a, &a, &k);
    Ok(BlowupOracle {
        a2f: i(&a, &a, &f),
        af2: i(&a, &f, &f),
        f3: i(&f, &f, &f),
        deg_f: (i(&lp, &lp, &f), i(&lp, &kp, &f)),
        deg_g: (i(&lp, &lp, &g), i(&lp, &kp, &g)),
        delta_l3: i(&lp, &lp, &lp) - i(&a, &a, &a),
        delta_l2k: i(&lp, &lp, &kp) - ka,
        generic,
    })
}

/// The relative-height coefficient implied by the oracle: h(blown) − h(base)
/// = −c·w with h = −n·deg_LK·L³ + (n+1)·deg_Ln·L²K, n = 2.
pub fn oracle_c(o: &BlowupOracle) -> Q {
    let (dl, dlk) = &o.generic;
    let delta = -qi(2) * dlk * &o.delta_l3 + qi(3) * dl * &o.delta_l2k;
    -delta
}
