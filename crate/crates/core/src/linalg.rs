//! Exact linear algebra over ℚ.
//!
//! Subspaces of `ℚ^M` are stored by their reduced row-echelon basis, which is a
//! canonical form: two equal subspaces have identical bases, so derived
//! equality and hashing are meaningful.

use std::fmt;

use num::{BigInt, BigRational, One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Exact rational scalar used throughout the crate.
pub type Q = BigRational;

/// Rational from an integer.
pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Rational `n / d`.
pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Formats a rational as `p/q`, or as `p` when the denominator is one.
pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `p`, `-p` or `p/q`.
pub fn parse_q(s: &str) -> Result<Q, Error> {
    let t = s.trim();
    let bad = || Error::Parse(format!("malformed rational {s:?}"));
    match t.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Q::new(n, d))
        }
        None => Ok(Q::from_integer(t.parse().map_err(|_| bad())?)),
    }
}

/// Row-reduces `rows` in place and drops zero rows. Returns pivot columns.
pub fn rref(rows: &mut Vec<Vec<Q>>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        if !inv.is_one() {
            for x in rows[r].iter_mut() {
                *x *= &inv;
            }
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

/// Rank of a list of row vectors of length `ncols`.
pub fn rank(rows: &[Vec<Q>], ncols: usize) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m, ncols).len()
}

/// Square or rectangular matrix acting on column vectors: `v ↦ A v`.
pub type Matrix = Vec<Vec<Q>>;

/// Identity matrix of size `n`.
pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect())
        .collect()
}

/// `A v`.
pub fn mat_vec(a: &Matrix, v: &[Q]) -> Vec<Q> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

/// `A B`.
pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..n)
                .map(|j| row.iter().zip(b).map(|(x, brow)| x * &brow[j]).sum())
                .collect()
        })
        .collect()
}

/// Solves `A x = b` for square invertible integer `A`; `None` if singular.
pub fn solve(a: &Matrix, b: &[Q]) -> Option<Vec<Q>> {
    let n = a.len();
    let mut aug: Vec<Vec<Q>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let piv = rref(&mut aug, n);
    if piv.len() < n || piv.iter().enumerate().any(|(i, &c)| i != c) {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n].clone()).collect())
}

/// A subspace of `ℚ^M` in canonical reduced row-echelon form.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubspaceQ {
    ambient: usize,
    basis: Vec<Vec<Q>>,
}

impl fmt::Debug for SubspaceQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .basis
            .iter()
            .map(|r| format!("({})", r.iter().map(fmt_q).collect::<Vec<_>>().join(",")))
            .collect();
        write!(f, "⟨{}⟩⊂ℚ^{}", rows.join(" "), self.ambient)
    }
}

impl SubspaceQ {
    /// The zero subspace.
    pub fn zero(ambient: usize) -> Self {
        SubspaceQ { ambient, basis: Vec::new() }
    }

    /// The whole space `ℚ^M`.
    pub fn full(ambient: usize) -> Self {
        SubspaceQ { ambient, basis: identity(ambient) }
    }

    /// Span of the given vectors.
    pub fn span(ambient: usize, vectors: impl IntoIterator<Item = Vec<Q>>) -> Result<Self, Error> {
        let mut rows: Vec<Vec<Q>> = Vec::new();
        for v in vectors {
            if v.len() != ambient {
                return Err(Error::Dimension(format!(
                    "vector of length {} in ambient dimension {ambient}",
                    v.len()
                )));
            }
            rows.push(v);
        }
        rref(&mut rows, ambient);
        Ok(SubspaceQ { ambient, basis: rows })
    }

    /// Span of integer vectors; panics on a length mismatch.
    pub fn span_int(ambient: usize, vectors: &[&[i64]]) -> Self {
        Self::span(ambient, vectors.iter().map(|v| v.iter().map(|&x| q(x)).collect()))
            .expect("vector length matches ambient dimension")
    }

    /// Ambient dimension `M`.
    pub fn ambient(&self) -> usize {
        self.ambient
    }

    /// Dimension of the subspace.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Canonical basis rows.
    pub fn basis(&self) -> &[Vec<Q>] {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.ambient
    }

    /// Orthogonal complement for the standard pairing.
    pub fn annihilator(&self) -> SubspaceQ {
        let m = self.ambient;
        let mut rows = self.basis.clone();
        let pivots = rref(&mut rows, m);
        let free: Vec<usize> = (0..m).filter(|c| !pivots.contains(c)).collect();
        let mut out = Vec::with_capacity(free.len());
        for &f in &free {
            let mut v = vec![Q::zero(); m];
            v[f] = Q::one();
            for (row, &p) in rows.iter().zip(&pivots) {
                v[p] = -row[f].clone();
            }
            out.push(v);
        }
        rref(&mut out, m);
        SubspaceQ { ambient: m, basis: out }
    }

    /// `self + other`.
    pub fn sum(&self, other: &SubspaceQ) -> SubspaceQ {
        debug_assert_eq!(self.ambient, other.ambient);
        if other.is_zero() || self.is_full() {
            return self.clone();
        }
        if self.is_zero() || other.is_full() {
            return other.clone();
        }
        let mut rows = self.basis.clone();
        rows.extend(other.basis.iter().cloned());
        rref(&mut rows, self.ambient);
        SubspaceQ { ambient: self.ambient, basis: rows }
    }

    /// `self ∩ other`.
    pub fn intersect(&self, other: &SubspaceQ) -> SubspaceQ {
        debug_assert_eq!(self.ambient, other.ambient);
        if self.is_zero() || other.is_full() {
            return self.clone();
        }
        if other.is_zero() || self.is_full() {
            return other.clone();
        }
        if self.contains(other) {
            return other.clone();
        }
        if other.contains(self) {
            return self.clone();
        }
        self.annihilator().sum(&other.annihilator()).annihilator()
    }

    /// Whether `v` lies in the subspace.
    pub fn contains_vector(&self, v: &[Q]) -> bool {
        let mut rows = self.basis.clone();
        rows.push(v.to_vec());
        rank(&rows, self.ambient) == self.basis.len()
    }

    /// Whether `other ⊆ self`.
    pub fn contains(&self, other: &SubspaceQ) -> bool {
        if other.dim() > self.dim() {
            return false;
        }
        if self.is_full() || other.is_zero() {
            return true;
        }
        other.basis.iter().all(|v| self.contains_vector(v))
    }

    /// Image under `A`.
    pub fn image(&self, a: &Matrix) -> SubspaceQ {
        let rows = self.basis.iter().map(|v| mat_vec(a, v));
        SubspaceQ::span(self.ambient, rows).expect("square map preserves ambient dimension")
    }

    /// Basis rows as `p/q` strings.
    pub fn to_strings(&self) -> Vec<Vec<String>> {
        self.basis.iter().map(|r| r.iter().map(fmt_q).collect()).collect()
    }

    /// Parses rows of `p/q` strings.
    pub fn from_strings(ambient: usize, rows: &[Vec<String>]) -> Result<Self, Error> {
        let mut vs = Vec::with_capacity(rows.len());
        for r in rows {
            vs.push(r.iter().map(|s| parse_q(s)).collect::<Result<Vec<_>, _>>()?);
        }
        Self::span(ambient, vs)
    }
}

/// Subspace serialized as its basis rows of rational strings.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(transparent)]
pub struct BasisJson(pub Vec<Vec<String>>);

/// Largest absolute value among numerators and denominators; used to keep
/// random data small.
pub fn height(s: &SubspaceQ) -> BigInt {
    s.basis
        .iter()
        .flatten()
        .map(|x| x.numer().abs().max(x.denom().abs()))
        .max()
        .unwrap_or_else(BigInt::zero)
}
