use std::fmt;

use serde::Serialize;

use super::{CornerFamily, DeltaFamily, FamilyKind};
use crate::error::{Error, Result};
use crate::fan::{Cone, Fan};
use crate::grid::{box_points, INF};
use crate::linalg::{mat_mul, mat_vec, rank, Matrix, Q};

/// One failed condition: where and what.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyViolation {
    /// Maximal-cone index, if the condition is local to one chart.
    pub cone: Option<usize>,
    pub point: Vec<i64>,
    pub condition: String,
}

impl fmt::Display for FamilyViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.cone {
            Some(c) => write!(f, "cone {c} at {:?}: {}", self.point, self.condition),
            None => write!(f, "{}", self.condition),
        }
    }
}

fn violation(cone: usize, point: &[i64], condition: impl Into<String>) -> FamilyViolation {
    FamilyViolation { cone: Some(cone), point: point.to_vec(), condition: condition.into() }
}

fn check_shape(fam: &DeltaFamily, fan: &Fan, out: &mut Vec<FamilyViolation>) -> bool {
    if fam.corners.len() != fan.max_cones().len() {
        out.push(FamilyViolation {
            cone: None,
            point: vec![],
            condition: format!("{} corner families for {} maximal cones", fam.corners.len(), fan.max_cones().len()),
        });
        return false;
    }
    let mut ok = true;
    for (i, (c, cone)) in fam.corners.iter().zip(fan.max_cones()).enumerate() {
        if &c.rays != cone {
            out.push(violation(i, &[], format!("corner rays {:?} differ from cone rays {cone:?}", c.rays)));
            ok = false;
        }
        if c.ambient() != fam.rank {
            out.push(violation(i, &[], format!("ambient dimension {} differs from rank {}", c.ambient(), fam.rank)));
            ok = false;
        }
    }
    ok
}

/// Points of the union of two boxes on a common face, compared with clamping.
fn gluing(fam: &DeltaFamily, fan: &Fan, out: &mut Vec<FamilyViolation>) {
    let n = fan.max_cones().len();
    for i in 0..n {
        for j in i + 1..n {
            let common: Cone = fan.max_cones()[i].iter().filter(|k| fan.max_cones()[j].contains(k)).copied().collect();
            let a = fam.corners[i].restrict(&common);
            let b = fam.corners[j].restrict(&common);
            let lo: Vec<i64> = a.lo().iter().zip(b.lo()).map(|(x, y)| *x.min(y)).collect();
            let hi: Vec<i64> = a.hi().iter().zip(b.hi()).map(|(x, y)| *x.max(y)).collect();
            if let Some(p) = box_points(&lo, &hi).into_iter().find(|p| a.value(p) != b.value(p)) {
                out.push(FamilyViolation {
                    cone: Some(i),
                    point: p.clone(),
                    condition: format!(
                        "gluing: limits of cones {i} and {j} differ on face {common:?} at {p:?}"
                    ),
                });
            }
        }
    }
}

fn monotone(c: &CornerFamily, i: usize, require_inclusions: bool, out: &mut Vec<FamilyViolation>) {
    for p in c.grid().points() {
        for axis in 0..c.rays.len() {
            if p[axis] == c.hi()[axis] {
                continue;
            }
            let mut next = p.clone();
            next[axis] += 1;
            let (src, dst) = (c.value(&p), c.value(&next));
            let explicit = c.explicit_maps().get(&(axis, p.clone()));
            match explicit {
                Some(m) if require_inclusions => {
                    if !src.basis().iter().all(|v| &mat_vec(m, v) == v) || !dst.contains(&src) {
                        out.push(violation(i, &p, format!("axis {axis} map is not an inclusion")));
                    }
                }
                Some(m) => {
                    if !dst.contains(&src.image(m)) {
                        out.push(violation(i, &p, format!("axis {axis} map does not land in its target")));
                    }
                }
                None => {
                    if !dst.contains(&src) && !(dst.is_zero() && !require_inclusions) {
                        out.push(violation(i, &p, format!("monotonicity fails along axis {axis}")));
                    }
                }
            }
        }
    }
}

fn commuting(c: &CornerFamily, i: usize, out: &mut Vec<FamilyViolation>) {
    if c.explicit_maps().is_empty() && (0..c.rays.len()).all(|_| true) {
        // Inclusions and zero maps commute unless a zero map meets an inclusion.
        let any_zero = c.grid().points().iter().any(|p| {
            (0..c.rays.len()).any(|a| {
                if p[a] == c.hi()[a] {
                    return false;
                }
                let mut n = p.clone();
                n[a] += 1;
                let (s, d) = (c.value(p), c.value(&n));
                !s.is_zero() && !d.contains(&s)
            })
        });
        if !any_zero {
            return;
        }
    }
    let r = c.rays.len();
    for p in c.grid().points() {
        let src = c.value(&p);
        if src.is_zero() {
            continue;
        }
        for a in 0..r {
            for b in a + 1..r {
                if p[a] == c.hi()[a] || p[b] == c.hi()[b] {
                    continue;
                }
                let (Some(ma), Some(mb)) = (c.axis_map(a, &p), c.axis_map(b, &p)) else { continue };
                let mut pa = p.clone();
                pa[a] += 1;
                let mut pb = p.clone();
                pb[b] += 1;
                let (Some(mab), Some(mba)) = (c.axis_map(b, &pa), c.axis_map(a, &pb)) else { continue };
                let l = mat_mul(&mab, &ma);
                let rr = mat_mul(&mba, &mb);
                if src.basis().iter().any(|v| mat_vec(&l, v) != mat_vec(&rr, v)) {
                    out.push(violation(i, &p, format!("axis maps {a} and {b} do not commute")));
                }
            }
        }
    }
}

/// Torsion-free conditions: inclusions, gluing and full saturation.
pub fn validate_torsion_free(fam: &DeltaFamily, fan: &Fan) -> Vec<FamilyViolation> {
    let mut out = Vec::new();
    if !check_shape(fam, fan, &mut out) {
        return out;
    }
    for (i, c) in fam.corners.iter().enumerate() {
        let top = c.value(&vec![INF; c.rays.len()]);
        if !top.is_full() {
            out.push(violation(i, c.hi(), format!("limit has dimension {} instead of {}", top.dim(), fam.rank)));
        }
        monotone(c, i, true, &mut out);
    }
    gluing(fam, fan, &mut out);
    if fam.kind == FamilyKind::Reflexive && out.is_empty() && !is_reflexive(fam) {
        out.push(FamilyViolation {
            cone: None,
            point: vec![],
            condition: "declared reflexive but a corner value differs from the intersection of its limits".into(),
        });
    }
    out
}

/// Whether every corner value is the intersection of its axis limits.
pub fn is_reflexive(fam: &DeltaFamily) -> bool {
    fam.corners.iter().all(|c| {
        let r = c.rays.len();
        c.grid().points().iter().all(|p| {
            let hull = (0..r).fold(crate::linalg::SubspaceQ::full(c.ambient()), |acc, k| {
                let mut q = vec![INF; r];
                q[k] = p[k];
                acc.intersect(&c.value(&q))
            });
            hull == *c.grid().at(p)
        })
    })
}

/// Support of a corner family as the minimal faces with nonzero limits.
pub fn detect_support(c: &CornerFamily) -> Result<Vec<Cone>> {
    if c.is_zero() {
        return Err(Error::ZeroFamily("support of the zero family".into()));
    }
    let r = c.rays.len();
    let mut nonzero: Vec<Cone> = Vec::new();
    for mask in 0u32..(1 << r) {
        let face: Cone = (0..r).filter(|k| mask >> k & 1 == 1).map(|k| c.rays[k]).collect();
        if !c.restrict(&face).is_zero() {
            nonzero.push(face);
        }
    }
    let minimal: Vec<Cone> = nonzero
        .iter()
        .filter(|f| !nonzero.iter().any(|g| g != *f && g.iter().all(|k| f.contains(k))))
        .cloned()
        .collect();
    let mut m = minimal;
    m.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(m)
}

/// Composite axis map from `p` up to the top layer along `axis`.
fn map_to_top(c: &CornerFamily, axis: usize, p: &[i64]) -> Option<Matrix> {
    let mut m = crate::linalg::identity(c.ambient());
    let mut q = p.to_vec();
    while q[axis] < c.hi()[axis] {
        m = mat_mul(&c.axis_map(axis, &q)?, &m);
        q[axis] += 1;
    }
    Some(m)
}

fn injective_on(src: &crate::linalg::SubspaceQ, maps: &[Matrix]) -> bool {
    let rows: Vec<Vec<Q>> = src.basis().iter().map(|v| maps.iter().flat_map(|m| mat_vec(m, v)).collect()).collect();
    let width = rows.first().map_or(0, Vec::len);
    rank(&rows, width) == src.dim()
}

/// Pure-sheaf conditions for a family whose support is a union of orbit
/// closures of equal dimension. The top layer of each box stands for the
/// region beyond the upper bounds.
pub fn validate_pure(fam: &DeltaFamily, fan: &Fan) -> Vec<FamilyViolation> {
    let mut out = Vec::new();
    let FamilyKind::Pure(support) = &fam.kind else {
        out.push(FamilyViolation { cone: None, point: vec![], condition: "family is not declared pure".into() });
        return out;
    };
    let global = |s: &str| FamilyViolation { cone: None, point: vec![], condition: s.to_string() };
    if support.is_empty() {
        out.push(global("empty support"));
        return out;
    }
    let s = support[0].len();
    if support.iter().any(|t| t.len() != s) {
        out.push(global("support cones have different dimensions"));
        return out;
    }
    if let Some(t) = support.iter().find(|t| !fan.is_cone(t)) {
        out.push(global(&format!("support cone {t:?} is not in the fan")));
        return out;
    }
    if !check_shape(fam, fan, &mut out) {
        return out;
    }
    for (i, c) in fam.corners.iter().enumerate() {
        let local: Vec<&Cone> = support.iter().filter(|t| t.iter().all(|k| c.rays.contains(k))).collect();
        if local.is_empty() {
            if !c.is_zero() {
                out.push(violation(i, &[], "cone outside the star of the support carries data"));
            }
            continue;
        }
        let r = c.rays.len();
        let coords: Vec<Vec<usize>> = local
            .iter()
            .map(|t| t.iter().map(|k| c.rays.iter().position(|x| x == k).unwrap()).collect())
            .collect();
        let bounded: Vec<bool> = (0..r).map(|k| coords.iter().any(|t| t.contains(&k))).collect();
        monotone(c, i, false, &mut out);
        commuting(c, i, &mut out);
        for p in c.grid().points() {
            // Coordinates still at or below their upper bound.
            let inside: Vec<usize> = (0..r).filter(|&k| bounded[k] && p[k] < c.hi()[k]).collect();
            let in_region = coords.iter().any(|t| t.iter().all(|k| inside.contains(k)));
            let v = c.value(&p);
            if !in_region {
                if !v.is_zero() {
                    out.push(violation(i, &p, "nonzero value outside the support region"));
                }
                continue;
            }
            if v.is_zero() {
                continue;
            }
            for axis in 0..r {
                if inside.contains(&axis) || p[axis] == c.hi()[axis] {
                    continue;
                }
                if !c.axis_map(axis, &p).is_some_and(|m| injective_on(&v, &[m])) {
                    out.push(violation(i, &p, format!("axis {axis} map is not injective in an unbounded direction")));
                }
            }
            if inside.len() > s {
                for subset in subsets(&inside, s + 1) {
                    let maps: Option<Vec<Matrix>> = subset.iter().map(|&a| map_to_top(c, a, &p)).collect();
                    match maps {
                        Some(ms) if injective_on(&v, &ms) => {}
                        _ => out.push(violation(i, &p, format!("boundary map along axes {subset:?} has a kernel"))),
                    }
                }
            }
        }
        for t in &local {
            if c.restrict(t).is_zero() {
                out.push(violation(i, &[], format!("support component {t:?} has only zero limits")));
            }
        }
    }
    gluing(fam, fan, &mut out);
    out
}

fn subsets(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if items.len() < k {
        return vec![];
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        for mut rest in subsets(&items[i + 1..], k - 1) {
            rest.insert(0, x);
            out.push(rest);
        }
    }
    out
}
