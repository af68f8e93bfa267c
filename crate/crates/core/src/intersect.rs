//! Intersection numbers on smooth complete toric surfaces.
//!
//! Divisor classes are kept as unreduced coefficient vectors on the torus
//! invariant divisors `D_j = V(ρ_j)`; all numerical invariants are computed
//! through the intersection table, so they do not depend on the chosen
//! representative modulo linear equivalence.

use std::ops::{Add, Mul, Neg, Sub};

use num::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fan::{adjacent, Fan};
use crate::linalg::{fmt_q, q, qf, solve, Q};

/// Symmetric table of intersection numbers `D_i · D_j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntersectionTable {
    pub entries: Vec<Vec<i64>>,
}

impl IntersectionTable {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn self_intersections(&self) -> Vec<i64> {
        (0..self.len()).map(|i| self.entries[i][i]).collect()
    }
}

pub(crate) fn require_surface(fan: &Fan) -> Result<()> {
    if fan.rank() != 2 {
        return Err(Error::Unsupported(format!(
            "intersection theory is implemented for surfaces only (rank {})",
            fan.rank()
        )));
    }
    Ok(())
}

/// Intersection table of a smooth complete surface fan. Self-intersections
/// come from `n(ρ_{i−1}) + n(ρ_{i+1}) = −(D_i²) n(ρ_i)`.
pub fn intersection_table(fan: &Fan) -> Result<IntersectionTable> {
    require_surface(fan)?;
    let n = fan.num_rays();
    let rays = fan.rays();
    let mut t = vec![vec![0i64; n]; n];
    for i in 0..n {
        let (prev, next) = (&rays[(i + n - 1) % n], &rays[(i + 1) % n]);
        let s = [prev[0] + next[0], prev[1] + next[1]];
        let r = &rays[i];
        let c = if r[0] != 0 { s[0] / r[0] } else { s[1] / r[1] };
        if s[0] != c * r[0] || s[1] != c * r[1] {
            return Err(Error::InvalidFan(format!("wall relation fails at ray {i}")));
        }
        t[i][i] = -c;
        for (j, x) in t[i].iter_mut().enumerate() {
            if adjacent(fan, i, j) {
                *x = 1;
            }
        }
    }
    Ok(IntersectionTable { entries: t })
}

/// `a · b` for divisor classes given by ray coefficients.
pub fn pair(a: &[Q], b: &[Q], table: &IntersectionTable) -> Result<Q> {
    if a.len() != table.len() || b.len() != table.len() {
        return Err(Error::Dimension(format!(
            "divisor lengths {} and {} for {} rays",
            a.len(),
            b.len(),
            table.len()
        )));
    }
    let mut s = Q::zero();
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            let e = table.entries[i][j];
            if e != 0 && !y.is_zero() {
                s += x * y * q(e);
            }
        }
    }
    Ok(s)
}

/// Integer divisor as rational coefficients.
pub fn to_q(d: &[i64]) -> Vec<Q> {
    d.iter().map(|&x| q(x)).collect()
}

/// Element of `A⁰ ⊕ A¹ ⊕ A²` (with rational coefficients) on a surface.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChowClassSurface {
    pub r0: Q,
    pub d: Vec<Q>,
    pub p: Q,
}

impl ChowClassSurface {
    pub fn zero(n: usize) -> Self {
        ChowClassSurface { r0: Q::zero(), d: vec![Q::zero(); n], p: Q::zero() }
    }

    pub fn one(n: usize) -> Self {
        ChowClassSurface { r0: Q::one(), d: vec![Q::zero(); n], p: Q::zero() }
    }

    /// A pure divisor class.
    pub fn divisor(d: Vec<Q>) -> Self {
        ChowClassSurface { r0: Q::zero(), p: Q::zero(), d }
    }

    /// `exp(D) = 1 + D + D²/2`.
    pub fn exp(d: &[Q], table: &IntersectionTable) -> Self {
        let sq = pair(d, d, table).expect("length checked by caller");
        ChowClassSurface { r0: Q::one(), d: d.to_vec(), p: sq / q(2) }
    }

    pub fn mul(&self, other: &Self, table: &IntersectionTable) -> Self {
        let d: Vec<Q> = self.d.iter().zip(&other.d).map(|(a, b)| &self.r0 * b + &other.r0 * a).collect();
        let p = &self.r0 * &other.p + &other.r0 * &self.p + pair(&self.d, &other.d, table).expect("same fan");
        ChowClassSurface { r0: &self.r0 * &other.r0, d, p }
    }

    pub fn scale(&self, c: &Q) -> Self {
        ChowClassSurface { r0: &self.r0 * c, d: self.d.iter().map(|x| x * c).collect(), p: &self.p * c }
    }

    /// Degree of the top-dimensional part.
    pub fn degree(&self) -> Q {
        self.p.clone()
    }

    /// Equality in the rational Chow group: the degree-one parts may differ
    /// by a rational combination of relations.
    pub fn class_eq(&self, other: &Self, fan: &Fan) -> bool {
        if self.r0 != other.r0 || self.p != other.p {
            return false;
        }
        let diff: Vec<Q> = self.d.iter().zip(&other.d).map(|(a, b)| a - b).collect();
        divisor_is_rational_relation(&diff, fan)
    }

    pub fn to_text(&self) -> String {
        format!(
            "rank {}; c1 [{}]; ch2 {}",
            fmt_q(&self.r0),
            self.d.iter().map(fmt_q).collect::<Vec<_>>().join(", "),
            fmt_q(&self.p)
        )
    }
}

impl Add for &ChowClassSurface {
    type Output = ChowClassSurface;
    fn add(self, o: &ChowClassSurface) -> ChowClassSurface {
        ChowClassSurface {
            r0: &self.r0 + &o.r0,
            d: self.d.iter().zip(&o.d).map(|(a, b)| a + b).collect(),
            p: &self.p + &o.p,
        }
    }
}

impl Sub for &ChowClassSurface {
    type Output = ChowClassSurface;
    fn sub(self, o: &ChowClassSurface) -> ChowClassSurface {
        self + &(-o)
    }
}

impl Neg for &ChowClassSurface {
    type Output = ChowClassSurface;
    fn neg(self) -> ChowClassSurface {
        self.scale(&-Q::one())
    }
}

impl Mul<&Q> for &ChowClassSurface {
    type Output = ChowClassSurface;
    fn mul(self, c: &Q) -> ChowClassSurface {
        self.scale(c)
    }
}

/// Whether a rational ray vector is `(⟨u, n(ρ_j)⟩)_j` for some `u ∈ M ⊗ ℚ`.
pub fn divisor_is_rational_relation(d: &[Q], fan: &Fan) -> bool {
    let cone = &fan.max_cones()[0];
    let a: Vec<Vec<Q>> = cone.iter().map(|&k| to_q(&fan.rays()[k])).collect();
    let b: Vec<Q> = cone.iter().map(|&k| d[k].clone()).collect();
    let u = solve(&a, &b).expect("smooth cone is unimodular");
    fan.rays().iter().zip(d).all(|(n, dj)| {
        let v: Q = n.iter().zip(&u).map(|(x, y)| q(*x) * y).sum();
        &v == dj
    })
}

/// Todd class `1 + ½ΣD_j + [pt]` and canonical divisor `−ΣD_j`.
pub fn todd_and_canonical(fan: &Fan) -> Result<(ChowClassSurface, Vec<Q>)> {
    require_surface(fan)?;
    let n = fan.num_rays();
    let todd = ChowClassSurface { r0: Q::one(), d: vec![qf(1, 2); n], p: Q::one() };
    Ok((todd, vec![-Q::one(); n]))
}

/// `χ(O(D)) = 1 + ½ D·(D − K)`.
pub fn chi_line_bundle(d: &[Q], fan: &Fan) -> Result<Q> {
    let table = intersection_table(fan)?;
    let (_, k) = todd_and_canonical(fan)?;
    let dk: Vec<Q> = d.iter().zip(&k).map(|(a, b)| a - b).collect();
    Ok(Q::one() + pair(d, &dk, &table)? / q(2))
}

/// Vertices `m_σ` of the support function of `D = Σ a_ρ D_ρ`:
/// `⟨m_σ, n(ρ)⟩ = −a_ρ` for the rays of σ.
pub fn support_vertices(a: &[i64], fan: &Fan) -> Vec<Vec<i64>> {
    (0..fan.max_cones().len())
        .map(|i| {
            let vals: Vec<i64> = fan.max_cones()[i].iter().map(|&k| -a[k]).collect();
            fan.solve_on_cone(i, &vals)
        })
        .collect()
}

fn convexity(a: &[i64], fan: &Fan, strict: bool) -> bool {
    let verts = support_vertices(a, fan);
    for (i, m) in verts.iter().enumerate() {
        for (k, n) in fan.rays().iter().enumerate() {
            if fan.max_cones()[i].contains(&k) {
                continue;
            }
            let v: i64 = m.iter().zip(n).map(|(x, y)| x * y).sum();
            if v < -a[k] || (strict && v == -a[k]) {
                return false;
            }
        }
    }
    true
}

/// Whether the support function of `D` is convex.
pub fn is_nef(a: &[i64], fan: &Fan) -> bool {
    convexity(a, fan, false)
}

/// Whether the support function of `D` is strictly convex.
pub fn is_ample(a: &[i64], fan: &Fan) -> bool {
    convexity(a, fan, true)
}

/// A canonical ample divisor: `Σ D_j` perturbed upward until strictly convex.
pub fn some_ample(fan: &Fan) -> Vec<i64> {
    let n = fan.num_rays();
    for scale in 1..64 {
        let a: Vec<i64> = (0..n).map(|j| scale + (j as i64 % 2)).collect();
        if is_ample(&a, fan) {
            return a;
        }
        let b = vec![scale; n];
        if is_ample(&b, fan) {
            return b;
        }
    }
    polygon_divisor(fan)
}

/// Divisor of a lattice polygon with normal fan `fan`. Edge lengths come
/// from a relation `Σ ℓ_j n(ρ_j) = 0` with every `ℓ_j > 0`, obtained by
/// writing each `−n(ρ_j)` in the cone containing it.
fn polygon_divisor(fan: &Fan) -> Vec<i64> {
    let n = fan.num_rays();
    let rays = fan.rays();
    let mut len = vec![0i64; n];
    for j in 0..n {
        let neg: Vec<i64> = rays[j].iter().map(|x| -x).collect();
        let (i, coeffs) = (0..fan.max_cones().len())
            .find_map(|i| {
                let cone = &fan.max_cones()[i];
                let a: Vec<Vec<Q>> = (0..2).map(|r| cone.iter().map(|&k| q(rays[k][r])).collect()).collect();
                let c = solve(&a, &to_q(&neg))?;
                c.iter().all(|x| *x >= Q::zero()).then_some((i, c))
            })
            .expect("a complete fan covers every direction");
        len[j] += 1;
        for (&k, c) in fan.max_cones()[i].iter().zip(&coeffs) {
            len[k] += c.to_integer().to_i64().expect("unimodular cone");
        }
    }
    for sign in [1, -1] {
        // Walk the vertices: consecutive cones share ray j, whose edge is
        // perpendicular to n(ρ_j).
        let mut m = vec![0i64, 0];
        let mut verts = vec![m.clone()];
        for j in 1..n {
            m[0] -= sign * len[j] * rays[j][1];
            m[1] += sign * len[j] * rays[j][0];
            verts.push(m.clone());
        }
        let a: Vec<i64> = (0..n)
            .map(|k| {
                let cone = fan.max_cones().iter().position(|c| c.contains(&k)).expect("every ray lies in a cone");
                -verts[cone].iter().zip(&rays[k]).map(|(x, y)| x * y).sum::<i64>()
            })
            .collect();
        if is_ample(&a, fan) {
            return a;
        }
    }
    panic!("complete smooth surface fans are projective")
}

/// Number of lattice points of `P_D = {m : ⟨m, n(ρ)⟩ ≥ −a_ρ}` for nef `D`.
pub fn lattice_point_count(a: &[i64], fan: &Fan) -> Result<u64> {
    if a.len() != fan.num_rays() {
        return Err(Error::Dimension(format!("divisor length {} for {} rays", a.len(), fan.num_rays())));
    }
    if !is_nef(a, fan) {
        return Err(Error::NotNef);
    }
    let verts = support_vertices(a, fan);
    let r = fan.rank();
    let lo: Vec<i64> = (0..r).map(|k| verts.iter().map(|v| v[k]).min().unwrap()).collect();
    let hi: Vec<i64> = (0..r).map(|k| verts.iter().map(|v| v[k]).max().unwrap()).collect();
    let mut count = 0u64;
    let mut m = lo.clone();
    loop {
        if fan.rays().iter().zip(a).all(|(n, &ak)| m.iter().zip(n).map(|(x, y)| x * y).sum::<i64>() >= -ak) {
            count += 1;
        }
        let mut k = 0;
        loop {
            if k == r {
                return Ok(count);
            }
            if m[k] < hi[k] {
                m[k] += 1;
                break;
            }
            m[k] = lo[k];
            k += 1;
        }
    }
}
