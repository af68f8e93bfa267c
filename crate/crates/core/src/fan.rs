//! Smooth complete fans and their face combinatorics.
//!
//! A cone is a sorted list of ray indices; the empty list is the apex. Only
//! maximal cones are stored, every other cone is a subset of one of them. In
//! rank two the rays are put in counterclockwise order starting from the
//! first input ray, and maximal cone `i` is spanned by rays `i` and `i + 1`.

use std::cmp::Ordering;
use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use num::integer::Integer;
use num::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{q, solve, Q};

/// Sorted ray-index set; the empty set is the apex.
pub type Cone = Vec<usize>;

/// Raw fan data as read from a file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanData {
    pub rank: usize,
    pub rays: Vec<Vec<i64>>,
    pub max_cones: Vec<Vec<usize>>,
}

/// Which standing hypothesis a fan violates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FanInvariant {
    Malformed,
    NotPrimitive,
    DuplicateRay,
    NotSmooth,
    NotComplete,
    BadIntersection,
}

impl fmt::Display for FanInvariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FanInvariant::Malformed => "malformed",
            FanInvariant::NotPrimitive => "ray not primitive",
            FanInvariant::DuplicateRay => "duplicate ray",
            FanInvariant::NotSmooth => "cone not smooth",
            FanInvariant::NotComplete => "not complete",
            FanInvariant::BadIntersection => "cones do not meet in a common face",
        })
    }
}

/// One entry of a fan validation report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FanViolation {
    pub invariant: FanInvariant,
    pub rays: Vec<usize>,
    pub cones: Vec<usize>,
    pub detail: String,
}

impl fmt::Display for FanViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.invariant, self.detail)
    }
}

/// A fan: lattice rank, primitive ray generators and maximal cones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fan {
    rank: usize,
    rays: Vec<Vec<i64>>,
    max_cones: Vec<Cone>,
}

fn gcd_all(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, &x| g.gcd(&x))
}

/// Integer determinant via exact rational elimination.
pub fn det(rows: &[Vec<i64>]) -> i64 {
    let n = rows.len();
    let mut m: Vec<Vec<Q>> = rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect();
    let mut d = q(1);
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return 0;
        };
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        d *= &m[c][c];
        let piv = m[c].clone();
        for row in m.iter_mut().skip(c + 1) {
            if row[c].is_zero() {
                continue;
            }
            let f = &row[c] / &piv[c];
            for (x, y) in row.iter_mut().zip(&piv) {
                *x -= &f * y;
            }
        }
    }
    d.to_integer().to_i64().expect("determinant fits in i64")
}

fn half(v: &[i64]) -> u8 {
    if v[1] > 0 || (v[1] == 0 && v[0] > 0) {
        0
    } else {
        1
    }
}

fn angle_cmp(a: &[i64], b: &[i64]) -> Ordering {
    half(a).cmp(&half(b)).then_with(|| {
        let cross = a[0] as i128 * b[1] as i128 - a[1] as i128 * b[0] as i128;
        0.cmp(&cross)
    })
}

/// Counterclockwise order of planar rays starting at ray 0.
fn ccw_order(rays: &[Vec<i64>]) -> Vec<usize> {
    let base = &rays[0];
    // Rotate so that ray 0 sits at angle zero: compare angles relative to it.
    let rel = |v: &[i64]| -> Vec<i64> {
        vec![base[0] * v[0] + base[1] * v[1], base[0] * v[1] - base[1] * v[0]]
    };
    let mut idx: Vec<usize> = (0..rays.len()).collect();
    idx.sort_by(|&i, &j| angle_cmp(&rel(&rays[i]), &rel(&rays[j])));
    idx
}

/// Checks every standing hypothesis on raw fan data.
pub fn validate_fan(data: &FanData) -> Vec<FanViolation> {
    let mut out = Vec::new();
    let r = data.rank;
    let n = data.rays.len();
    let v = |inv, rays: Vec<usize>, cones: Vec<usize>, detail: String| FanViolation {
        invariant: inv,
        rays,
        cones,
        detail,
    };
    if r == 0 {
        out.push(v(FanInvariant::Malformed, vec![], vec![], "rank must be positive".into()));
        return out;
    }
    for (i, ray) in data.rays.iter().enumerate() {
        if ray.len() != r {
            out.push(v(FanInvariant::Malformed, vec![i], vec![], format!("ray {i} has length {}", ray.len())));
        } else if ray.iter().all(|&x| x == 0) {
            out.push(v(FanInvariant::Malformed, vec![i], vec![], format!("ray {i} is zero")));
        } else if gcd_all(ray) != 1 {
            out.push(v(FanInvariant::NotPrimitive, vec![i], vec![], format!("ray {i} = {ray:?} has gcd {}", gcd_all(ray))));
        }
    }
    for (ci, c) in data.max_cones.iter().enumerate() {
        if c.len() != r || c.iter().any(|&k| k >= n) || c.iter().collect::<BTreeSet<_>>().len() != c.len() {
            out.push(v(FanInvariant::Malformed, c.clone(), vec![ci], format!("cone {ci} = {c:?} is not {r} distinct valid ray indices")));
        }
    }
    if !out.is_empty() {
        return out;
    }
    for i in 0..n {
        for j in i + 1..n {
            if data.rays[i] == data.rays[j] {
                out.push(v(FanInvariant::DuplicateRay, vec![i, j], vec![], format!("rays {i} and {j} coincide")));
            }
        }
    }
    let sorted: Vec<Cone> = data
        .max_cones
        .iter()
        .map(|c| {
            let mut c = c.clone();
            c.sort_unstable();
            c
        })
        .collect();
    for i in 0..sorted.len() {
        for j in i + 1..sorted.len() {
            if sorted[i] == sorted[j] {
                out.push(v(FanInvariant::BadIntersection, sorted[i].clone(), vec![i, j], format!("cones {i} and {j} coincide")));
            }
        }
    }
    for (ci, c) in sorted.iter().enumerate() {
        let rows: Vec<Vec<i64>> = c.iter().map(|&k| data.rays[k].clone()).collect();
        let d = det(&rows);
        if d.abs() != 1 {
            out.push(v(FanInvariant::NotSmooth, c.clone(), vec![ci], format!("cone {ci} has determinant {d}")));
        }
    }
    if !out.is_empty() {
        return out;
    }
    let used: BTreeSet<usize> = sorted.iter().flatten().copied().collect();
    for i in 0..n {
        if !used.contains(&i) {
            out.push(v(FanInvariant::NotComplete, vec![i], vec![], format!("ray {i} lies in no maximal cone")));
        }
    }
    if r == 2 {
        validate_planar(data, &sorted, &mut out);
    } else {
        validate_facet_pairing(data, &sorted, &mut out);
    }
    out
}

fn validate_planar(data: &FanData, cones: &[Cone], out: &mut Vec<FanViolation>) {
    let n = data.rays.len();
    if n < 3 {
        out.push(FanViolation {
            invariant: FanInvariant::NotComplete,
            rays: (0..n).collect(),
            cones: vec![],
            detail: format!("{n} rays cannot cover the plane"),
        });
        return;
    }
    let order = ccw_order(&data.rays);
    let mut expected = BTreeSet::new();
    for k in 0..n {
        let (a, b) = (order[k], order[(k + 1) % n]);
        let (ra, rb) = (&data.rays[a], &data.rays[b]);
        let cross = ra[0] * rb[1] - ra[1] * rb[0];
        let mut c = vec![a, b];
        c.sort_unstable();
        if cross <= 0 {
            out.push(FanViolation {
                invariant: FanInvariant::NotComplete,
                rays: c.clone(),
                cones: vec![],
                detail: format!("gap of angle at least π between rays {a} and {b}"),
            });
        }
        expected.insert(c);
    }
    for (ci, c) in cones.iter().enumerate() {
        if !expected.contains(c) {
            out.push(FanViolation {
                invariant: FanInvariant::BadIntersection,
                rays: c.clone(),
                cones: vec![ci],
                detail: format!("cone {ci} = {c:?} overlaps other cones (its rays are not angularly adjacent)"),
            });
        }
    }
    let have: BTreeSet<Cone> = cones.iter().cloned().collect();
    for c in &expected {
        if !have.contains(c) {
            out.push(FanViolation {
                invariant: FanInvariant::NotComplete,
                rays: c.clone(),
                cones: vec![],
                detail: format!("the sector between rays {} and {} is not covered", c[0], c[1]),
            });
        }
    }
}

fn validate_facet_pairing(data: &FanData, cones: &[Cone], out: &mut Vec<FanViolation>) {
    let r = data.rank;
    let mut facets: std::collections::BTreeMap<Cone, Vec<usize>> = Default::default();
    for (ci, c) in cones.iter().enumerate() {
        for skip in 0..r {
            let f: Cone = c.iter().enumerate().filter(|&(k, _)| k != skip).map(|(_, &x)| x).collect();
            facets.entry(f).or_default().push(ci);
        }
    }
    let mut adj = vec![Vec::new(); cones.len()];
    for (f, owners) in &facets {
        if owners.len() != 2 {
            out.push(FanViolation {
                invariant: FanInvariant::NotComplete,
                rays: f.clone(),
                cones: owners.clone(),
                detail: format!("facet {f:?} lies in {} maximal cones instead of 2", owners.len()),
            });
            continue;
        }
        let (a, b) = (owners[0], owners[1]);
        adj[a].push(b);
        adj[b].push(a);
        // The two opposite rays must lie on opposite sides of the facet hyperplane.
        let side = |ci: usize| -> i64 {
            let extra = cones[ci].iter().find(|k| !f.contains(k)).copied().unwrap();
            let mut rows: Vec<Vec<i64>> = f.iter().map(|&k| data.rays[k].clone()).collect();
            rows.push(data.rays[extra].clone());
            det(&rows).signum()
        };
        if side(a) == side(b) {
            out.push(FanViolation {
                invariant: FanInvariant::BadIntersection,
                rays: f.clone(),
                cones: vec![a, b],
                detail: format!("cones {a} and {b} fold over their common facet {f:?}"),
            });
        }
    }
    if !cones.is_empty() {
        let mut seen = vec![false; cones.len()];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(c) = queue.pop_front() {
            for &d in &adj[c] {
                if !seen[d] {
                    seen[d] = true;
                    queue.push_back(d);
                }
            }
        }
        let missing: Vec<usize> = (0..cones.len()).filter(|&c| !seen[c]).collect();
        if !missing.is_empty() {
            out.push(FanViolation {
                invariant: FanInvariant::NotComplete,
                rays: vec![],
                cones: missing,
                detail: "maximal cones are not connected through shared facets".into(),
            });
        }
    }
}

impl Fan {
    /// Validates and canonicalizes fan data.
    pub fn new(data: FanData) -> Result<Fan> {
        let report = validate_fan(&data);
        if !report.is_empty() {
            let msg: Vec<String> = report.iter().map(ToString::to_string).collect();
            return Err(Error::InvalidFan(msg.join("; ")));
        }
        let FanData { rank, rays, max_cones } = data;
        if rank == 2 {
            let order = ccw_order(&rays);
            let n = rays.len();
            let new_rays: Vec<Vec<i64>> = order.iter().map(|&i| rays[i].clone()).collect();
            let cones = (0..n)
                .map(|k| {
                    let mut c = vec![k, (k + 1) % n];
                    c.sort_unstable();
                    c
                })
                .collect();
            return Ok(Fan { rank, rays: new_rays, max_cones: cones });
        }
        let mut cones: Vec<Cone> = max_cones
            .into_iter()
            .map(|mut c| {
                c.sort_unstable();
                c
            })
            .collect();
        cones.sort();
        Ok(Fan { rank, rays, max_cones: cones })
    }

    /// Builds a fan without any checks; used to exercise the validators.
    pub fn from_rays(rank: usize, rays: &[&[i64]], cones: &[&[usize]]) -> Result<Fan> {
        Fan::new(FanData {
            rank,
            rays: rays.iter().map(|r| r.to_vec()).collect(),
            max_cones: cones.iter().map(|c| c.to_vec()).collect(),
        })
    }

    /// The projective plane.
    pub fn projective_plane() -> Fan {
        Fan::from_rays(2, &[&[1, 0], &[0, 1], &[-1, -1]], &[&[0, 1], &[1, 2], &[2, 0]]).unwrap()
    }

    /// The product of two projective lines.
    pub fn p1_times_p1() -> Fan {
        Fan::from_rays(2, &[&[1, 0], &[0, 1], &[-1, 0], &[0, -1]], &[&[0, 1], &[1, 2], &[2, 3], &[3, 0]])
            .unwrap()
    }

    /// The Hirzebruch surface with rays (1,0), (0,1), (−1,−a), (0,−1); ray
    /// self-intersections are 0, a, 0, −a.
    pub fn hirzebruch(a: i64) -> Fan {
        Fan::from_rays(2, &[&[1, 0], &[0, 1], &[-1, -a], &[0, -1]], &[&[0, 1], &[1, 2], &[2, 3], &[3, 0]])
            .unwrap()
    }

    /// Surface fan given by rays in counterclockwise order.
    pub fn surface(rays: Vec<Vec<i64>>) -> Result<Fan> {
        let n = rays.len();
        let cones = (0..n).map(|k| vec![k, (k + 1) % n]).collect();
        Fan::new(FanData { rank: 2, rays, max_cones: cones })
    }

    /// Blows up the fixed point of maximal cone `i` of a surface fan by
    /// inserting the sum of its two rays.
    pub fn blow_up(&self, i: usize) -> Result<Fan> {
        if self.rank != 2 {
            return Err(Error::Unsupported("blow-up only for surfaces".into()));
        }
        let n = self.rays.len();
        let (a, b) = (i % n, (i + 1) % n);
        let new: Vec<i64> = self.rays[a].iter().zip(&self.rays[b]).map(|(x, y)| x + y).collect();
        let mut rays = self.rays.clone();
        rays.insert(a + 1, new);
        Fan::surface(rays)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rays(&self) -> &[Vec<i64>] {
        &self.rays
    }

    pub fn num_rays(&self) -> usize {
        self.rays.len()
    }

    pub fn max_cones(&self) -> &[Cone] {
        &self.max_cones
    }

    pub fn to_data(&self) -> FanData {
        FanData { rank: self.rank, rays: self.rays.clone(), max_cones: self.max_cones.clone() }
    }

    /// Every cone of the fan, sorted by dimension and then lexicographically.
    pub fn cones(&self) -> Vec<Cone> {
        let mut set = BTreeSet::new();
        for c in &self.max_cones {
            for mask in 0u32..(1 << c.len()) {
                let f: Cone = c.iter().enumerate().filter(|&(k, _)| mask >> k & 1 == 1).map(|(_, &x)| x).collect();
                set.insert(f);
            }
        }
        let mut v: Vec<Cone> = set.into_iter().collect();
        v.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        v
    }

    /// Whether `tau` is a cone of the fan.
    pub fn is_cone(&self, tau: &[usize]) -> bool {
        self.max_cones.iter().any(|c| tau.iter().all(|k| c.contains(k)))
            && tau.windows(2).all(|w| w[0] < w[1])
    }

    fn check_cone(&self, tau: &[usize]) -> Result<()> {
        if self.is_cone(tau) {
            Ok(())
        } else {
            Err(Error::UnknownCone(tau.to_vec()))
        }
    }

    /// Indices of the maximal cones containing `tau`, in increasing order.
    pub fn max_cones_containing(&self, tau: &[usize]) -> Vec<usize> {
        (0..self.max_cones.len())
            .filter(|&i| tau.iter().all(|k| self.max_cones[i].contains(k)))
            .collect()
    }

    /// Index of the maximal cone with exactly these rays.
    pub fn max_cone_index(&self, rays: &[usize]) -> Option<usize> {
        let mut s = rays.to_vec();
        s.sort_unstable();
        self.max_cones.iter().position(|c| *c == s)
    }

    /// Solves `⟨u, n(ρ)⟩ = values[k]` for the rays ρ of maximal cone `i`.
    pub fn solve_on_cone(&self, i: usize, values: &[i64]) -> Vec<i64> {
        let a: Vec<Vec<Q>> = self.max_cones[i].iter().map(|&k| self.rays[k].iter().map(|&x| q(x)).collect()).collect();
        let b: Vec<Q> = values.iter().map(|&x| q(x)).collect();
        let u = solve(&a, &b).expect("smooth cone is unimodular");
        u.iter().map(|x| x.to_integer().to_i64().expect("integral solution")).collect()
    }

    /// The relation vector `(⟨u, n(ρ_j)⟩)_j` of a character `u`.
    pub fn relation(&self, u: &[i64]) -> Vec<i64> {
        self.rays.iter().map(|n| n.iter().zip(u).map(|(a, b)| a * b).sum()).collect()
    }

    /// Whether an integer ray vector lies in the relation lattice.
    pub fn is_relation(&self, k: &[i64]) -> bool {
        let c = &self.max_cones[0];
        let vals: Vec<i64> = c.iter().map(|&j| k[j]).collect();
        let u = self.solve_on_cone(0, &vals);
        self.relation(&u) == k
    }

    /// Whether two ray-coefficient vectors define linearly equivalent divisors.
    pub fn linearly_equivalent(&self, a: &[i64], b: &[i64]) -> bool {
        let d: Vec<i64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        self.is_relation(&d)
    }
}

/// All cones having `tau` as a face, `tau` included.
pub fn star(fan: &Fan, tau: &[usize]) -> Result<Vec<Cone>> {
    fan.check_cone(tau)?;
    Ok(fan.cones().into_iter().filter(|c| tau.iter().all(|k| c.contains(k))).collect())
}

/// The signed count `(−1)^{r−s} Σ_a (−1)^a #{σ ⊇ τ : dim σ = a + s}`, which is
/// one for every cone of a complete simplicial fan.
pub fn cone_count_identity(fan: &Fan, tau: &[usize]) -> Result<i64> {
    let report = validate_fan(&fan.to_data());
    if !report.is_empty() {
        return Err(Error::InvalidFan(format!("identity needs a complete fan: {}", report[0])));
    }
    let s = tau.len();
    let r = fan.rank;
    let st = star(fan, tau)?;
    let total: i64 = (0..=r - s)
        .map(|a| {
            let cnt = st.iter().filter(|c| c.len() == a + s).count() as i64;
            if a % 2 == 0 {
                cnt
            } else {
                -cnt
            }
        })
        .sum();
    Ok(if (r - s).is_multiple_of(2) { total } else { -total })
}

/// Topological Euler characteristic: the number of torus-fixed points.
pub fn euler_characteristic(fan: &Fan) -> i64 {
    fan.max_cones.len() as i64
}

/// Whether two distinct rays span a cone of the fan.
pub fn adjacent(fan: &Fan, i: usize, j: usize) -> bool {
    i != j && fan.max_cones.iter().any(|c| c.contains(&i) && c.contains(&j))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p2_is_valid_and_canonical() {
        let f = Fan::projective_plane();
        assert_eq!(f.max_cones(), &[vec![0, 1], vec![1, 2], vec![0, 2]]);
        assert_eq!(euler_characteristic(&f), 3);
    }

    #[test]
    fn missing_cone_is_incomplete() {
        let d = FanData { rank: 2, rays: vec![vec![1, 0], vec![0, 1], vec![-1, -1]], max_cones: vec![vec![0, 1], vec![1, 2]] };
        let rep = validate_fan(&d);
        assert!(rep.iter().any(|v| v.invariant == FanInvariant::NotComplete), "{rep:?}");
    }

    #[test]
    fn non_primitive_ray() {
        let d = FanData { rank: 2, rays: vec![vec![2, 0], vec![0, 1]], max_cones: vec![vec![0, 1]] };
        let rep = validate_fan(&d);
        assert_eq!(rep[0].invariant, FanInvariant::NotPrimitive);
        assert_eq!(rep[0].rays, vec![0]);
        assert_eq!(rep[0].invariant.to_string(), "ray not primitive");
    }

    #[test]
    fn singular_cone_rejected() {
        let d = FanData {
            rank: 2,
            rays: vec![vec![1, 0], vec![1, 2], vec![-1, 0], vec![0, -1]],
            max_cones: vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
        };
        assert!(validate_fan(&d).iter().any(|v| v.invariant == FanInvariant::NotSmooth));
    }

    #[test]
    fn overlapping_cones_rejected() {
        let d = FanData {
            rank: 2,
            rays: vec![vec![1, 0], vec![0, 1], vec![-1, 0], vec![0, -1], vec![1, 1]],
            max_cones: vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0], vec![0, 4]],
        };
        let rep = validate_fan(&d);
        assert!(rep.iter().any(|v| v.invariant == FanInvariant::BadIntersection), "{rep:?}");
    }

    #[test]
    fn canonical_order_is_counterclockwise() {
        let d = FanData {
            rank: 2,
            rays: vec![vec![1, 0], vec![-1, -1], vec![0, 1]],
            max_cones: vec![vec![0, 2], vec![2, 1], vec![1, 0]],
        };
        let f = Fan::new(d).unwrap();
        assert_eq!(f.rays(), &[vec![1, 0], vec![0, 1], vec![-1, -1]]);
    }

    #[test]
    fn star_examples() {
        let f = Fan::projective_plane();
        assert_eq!(star(&f, &[0]).unwrap(), vec![vec![0], vec![0, 1], vec![0, 2]]);
        assert_eq!(star(&f, &[]).unwrap().len(), 7);
        assert_eq!(star(&f, &[0, 1]).unwrap(), vec![vec![0, 1]]);
        assert!(star(&f, &[0, 5]).is_err());
    }

    #[test]
    fn three_dimensional_projective_space() {
        let d = FanData {
            rank: 3,
            rays: vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![-1, -1, -1]],
            max_cones: vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
        };
        assert!(validate_fan(&d).is_empty());
        let f = Fan::new(d).unwrap();
        for tau in f.cones() {
            assert_eq!(cone_count_identity(&f, &tau).unwrap(), 1);
        }
        let mut half = f.to_data();
        half.max_cones.pop();
        assert!(!validate_fan(&half).is_empty());
    }

    #[test]
    fn relations() {
        let f = Fan::projective_plane();
        assert!(f.is_relation(&[1, 0, -1]));
        assert!(!f.is_relation(&[1, 0, 0]));
        assert!(f.linearly_equivalent(&[1, 0, 0], &[0, 0, 1]));
    }
}
