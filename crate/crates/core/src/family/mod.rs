//! Combinatorial data of equivariant sheaves.
//!
//! On each maximal cone σ with rays `ρ_1, …, ρ_r` an equivariant sheaf is a
//! multi-filtered vector space `E^σ(λ_1, …, λ_r)` with maps along the axes.
//! A [`CornerFamily`] stores these spaces as subspaces of one ambient `ℚ^M`
//! on a finite box; reads below the box are zero and reads above it are
//! clamped, which realizes the limits `λ_k → ∞`. Axis maps default to the
//! inclusions; pure sheaves may override them with explicit matrices.

mod charfn;
mod validate;

use std::collections::BTreeMap;

use num::Zero;

pub use charfn::{CharCorner, CharCornerJson, CharFunction, CharFunctionJson};
pub use validate::{
    detect_support, is_reflexive, validate_pure, validate_torsion_free, FamilyViolation,
};

use crate::error::{Error, Result};
use crate::fan::{Cone, Fan};
use crate::grid::{Grid, INF};
use crate::linalg::{identity, Matrix, SubspaceQ, Q};

use charfn::trim_grid;

/// Which class of sheaves a family claims to describe.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    TorsionFree,
    Reflexive,
    /// Pure with support the union of the orbit closures of these cones.
    Pure(Vec<Cone>),
}

impl FamilyKind {
    pub fn is_torsion_free(&self) -> bool {
        matches!(self, FamilyKind::TorsionFree | FamilyKind::Reflexive)
    }
}

/// The multi-filtration of one chart.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CornerFamily {
    /// Coordinate `k` of the box belongs to ray `rays[k]`.
    pub rays: Vec<usize>,
    ambient: usize,
    grid: Grid<SubspaceQ>,
    /// Explicit axis maps `(axis, λ) ↦ A` from `E(λ)` to `E(λ + e_axis)`.
    maps: BTreeMap<(usize, Vec<i64>), Matrix>,
}

impl CornerFamily {
    pub fn zero(rays: Vec<usize>, ambient: usize) -> Self {
        let r = rays.len();
        CornerFamily {
            rays,
            ambient,
            grid: Grid::from_fn(vec![0; r], vec![0; r], |_| SubspaceQ::zero(ambient)),
            maps: BTreeMap::new(),
        }
    }

    /// Builds a corner family from a dense box of values.
    pub fn from_fn(
        rays: Vec<usize>,
        ambient: usize,
        lo: Vec<i64>,
        hi: Vec<i64>,
        f: impl FnMut(&[i64]) -> SubspaceQ,
    ) -> Result<Self> {
        if lo.len() != rays.len() || hi.len() != rays.len() {
            return Err(Error::Dimension(format!("box of length {} for {} rays", lo.len(), rays.len())));
        }
        if lo.iter().zip(&hi).any(|(a, b)| a > b) {
            return Err(Error::InvalidFamily(format!("empty box {lo:?}..{hi:?}")));
        }
        let grid = Grid::from_fn(lo, hi, f);
        if let Some(v) = grid.values().iter().find(|v| v.ambient() != ambient) {
            return Err(Error::Dimension(format!("value in ℚ^{} for rank {ambient}", v.ambient())));
        }
        Ok(CornerFamily { rays, ambient, grid, maps: BTreeMap::new() })
    }

    /// Adds an explicit axis map leaving `at` along `axis`.
    pub fn with_map(mut self, axis: usize, at: Vec<i64>, m: Matrix) -> Result<Self> {
        if axis >= self.rays.len() || !self.grid.contains(&at) {
            return Err(Error::InvalidFamily(format!("map at {at:?} along axis {axis} lies outside the box")));
        }
        if at[axis] == self.grid.hi()[axis] {
            return Err(Error::BoxTooSmall(format!(
                "map at {at:?} along axis {axis} sits on the saturated top layer"
            )));
        }
        if m.len() != self.ambient || m.iter().any(|r| r.len() != self.ambient) {
            return Err(Error::Dimension(format!("map at {at:?} is not {0}×{0}", self.ambient)));
        }
        self.maps.insert((axis, at), m);
        Ok(self)
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn lo(&self) -> &[i64] {
        self.grid.lo()
    }

    pub fn hi(&self) -> &[i64] {
        self.grid.hi()
    }

    pub fn grid(&self) -> &Grid<SubspaceQ> {
        &self.grid
    }

    pub fn explicit_maps(&self) -> &BTreeMap<(usize, Vec<i64>), Matrix> {
        &self.maps
    }

    /// `E(λ)`; coordinates may be [`INF`].
    pub fn value(&self, p: &[i64]) -> SubspaceQ {
        self.grid.get(p).cloned().unwrap_or_else(|| SubspaceQ::zero(self.ambient))
    }

    pub fn dim_at(&self, p: &[i64]) -> usize {
        self.grid.get(p).map_or(0, SubspaceQ::dim)
    }

    pub fn is_zero(&self) -> bool {
        self.grid.values().iter().all(SubspaceQ::is_zero)
    }

    /// The axis map `E(λ) → E(λ + e_axis)`: an explicit override, else the
    /// inclusion, else the zero map onto a zero target. `None` when the
    /// value is not contained in its successor and no map was given.
    pub fn axis_map(&self, axis: usize, p: &[i64]) -> Option<Matrix> {
        let clamped: Vec<i64> = p.iter().zip(self.grid.hi()).map(|(x, h)| *x.min(h)).collect();
        if clamped[axis] == self.grid.hi()[axis] {
            return Some(identity(self.ambient));
        }
        if let Some(m) = self.maps.get(&(axis, clamped.clone())) {
            return Some(m.clone());
        }
        let mut next = clamped.clone();
        next[axis] += 1;
        let (src, dst) = (self.value(&clamped), self.value(&next));
        if dst.contains(&src) {
            Some(identity(self.ambient))
        } else if dst.is_zero() {
            Some(vec![vec![Q::zero(); self.ambient]; self.ambient])
        } else {
            None
        }
    }

    /// Dimension function.
    pub fn char_corner(&self) -> CharCorner {
        CharCorner { rays: self.rays.clone(), grid: self.grid.map(SubspaceQ::dim) }
    }

    /// Limits on the face spanned by `keep` (global ray indices).
    pub fn restrict(&self, keep: &[usize]) -> Self {
        let pos: Vec<usize> = keep
            .iter()
            .map(|k| self.rays.iter().position(|x| x == k).expect("face ray"))
            .collect();
        let r = self.rays.len();
        let lift = |p: &[i64]| -> Vec<i64> {
            let mut full = vec![INF; r];
            for (j, &i) in pos.iter().enumerate() {
                full[i] = p[j];
            }
            full
        };
        let lo: Vec<i64> = pos.iter().map(|&i| self.grid.lo()[i]).collect();
        let hi: Vec<i64> = pos.iter().map(|&i| self.grid.hi()[i]).collect();
        let grid = Grid::from_fn(lo, hi, |p| self.value(&lift(p)));
        let mut maps = BTreeMap::new();
        for ((axis, at), m) in &self.maps {
            let Some(j) = pos.iter().position(|i| i == axis) else { continue };
            let on_limit = (0..r).all(|i| pos.contains(&i) || at[i] == self.grid.hi()[i]);
            if on_limit {
                maps.insert((j, pos.iter().map(|&i| at[i]).collect()), m.clone());
            }
        }
        CornerFamily { rays: keep.to_vec(), ambient: self.ambient, grid, maps }
    }

    /// `F(λ) = E(λ + shift)`.
    pub fn shift(&self, shift: &[i64]) -> Self {
        let maps = self
            .maps
            .iter()
            .map(|((a, at), m)| ((*a, at.iter().zip(shift).map(|(x, s)| x - s).collect()), m.clone()))
            .collect();
        CornerFamily { rays: self.rays.clone(), ambient: self.ambient, grid: self.grid.shifted(shift), maps }
    }

    /// Re-grids onto a box containing the current one.
    pub fn with_box(&self, lo: Vec<i64>, hi: Vec<i64>) -> Self {
        let grid = Grid::from_fn(lo, hi, |p| self.value(p));
        CornerFamily { rays: self.rays.clone(), ambient: self.ambient, grid, maps: self.maps.clone() }
    }

    /// Smallest box with the same reads and maps.
    pub fn canonical(&self) -> Self {
        let zero = SubspaceQ::zero(self.ambient);
        let maps = &self.maps;
        let grid = trim_grid(&self.grid, &zero, |axis, layer| maps.keys().all(|(_, at)| at[axis] != layer));
        CornerFamily { rays: self.rays.clone(), ambient: self.ambient, grid, maps: self.maps.clone() }
    }

    /// Replaces the value at one box point.
    pub fn set(&mut self, p: &[i64], v: SubspaceQ) {
        *self.grid.at_mut(p) = v;
    }

    /// Every value intersected with `w`.
    pub fn intersect_with(&self, w: &SubspaceQ) -> Self {
        CornerFamily {
            rays: self.rays.clone(),
            ambient: self.ambient,
            grid: self.grid.map(|v| v.intersect(w)),
            maps: self.maps.clone(),
        }
    }
}

/// A family of corner data over all maximal cones.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DeltaFamily {
    pub kind: FamilyKind,
    pub rank: usize,
    /// One corner family per maximal cone, in the fan's order.
    pub corners: Vec<CornerFamily>,
}

/// Filtration `E^ρ(λ)` of one ray, given by its jumps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RayFiltration {
    pub ray: usize,
    pub jumps: Vec<(i64, SubspaceQ)>,
}

impl RayFiltration {
    /// Value at `λ`.
    pub fn value(&self, lambda: i64) -> SubspaceQ {
        let m = self.jumps[0].1.ambient();
        self.jumps
            .iter()
            .take_while(|(l, _)| *l <= lambda)
            .last()
            .map_or_else(|| SubspaceQ::zero(m), |(_, v)| v.clone())
    }

    /// Lowest and saturating index.
    pub fn bounds(&self) -> (i64, i64) {
        (self.jumps[0].0, self.jumps.last().unwrap().0)
    }

    /// The filtration `λ ≥ −k ⇒ E(λ) = ℚ^M`.
    pub fn line_bundle(ray: usize, k: i64, m: usize) -> Self {
        RayFiltration { ray, jumps: vec![(-k, SubspaceQ::full(m))] }
    }

    /// Filtration with lower bound `base` stepping through `flag`: the
    /// `k`-th flag member is the value for `gaps[k]` steps, and members with
    /// a zero gap are skipped.
    pub fn from_flag(ray: usize, base: i64, gaps: &[i64], flag: &[SubspaceQ], m: usize) -> Self {
        let mut jumps = Vec::new();
        let mut at = base;
        for (gap, p) in gaps.iter().zip(flag) {
            if *gap > 0 {
                jumps.push((at, p.clone()));
                at += gap;
            }
        }
        jumps.push((at, SubspaceQ::full(m)));
        RayFiltration { ray, jumps }
    }

    fn check(&self) -> Result<usize> {
        let Some((_, first)) = self.jumps.first() else {
            return Err(Error::InvalidFamily(format!("ray {} has an empty filtration", self.ray)));
        };
        let m = first.ambient();
        for w in self.jumps.windows(2) {
            let ((l0, v0), (l1, v1)) = (&w[0], &w[1]);
            if l1 <= l0 || !v1.contains(v0) || v1 == v0 {
                return Err(Error::InvalidFamily(format!(
                    "ray {} jumps at {l0} and {l1} are not strictly increasing",
                    self.ray
                )));
            }
        }
        if self.jumps.iter().any(|(_, v)| v.ambient() != m) {
            return Err(Error::Dimension(format!("ray {} mixes ambient dimensions", self.ray)));
        }
        if !self.jumps.last().unwrap().1.is_full() {
            return Err(Error::InvalidFamily(format!("ray {} never reaches the full space", self.ray)));
        }
        if first.is_zero() {
            return Err(Error::InvalidFamily(format!("ray {} has a zero jump", self.ray)));
        }
        Ok(m)
    }
}

/// Reflexive family with corner values `E^σ(λ) = ⋂_k E^{ρ_k}(λ_k)`.
pub fn reflexive_from_filtrations(filts: &[RayFiltration], fan: &Fan) -> Result<DeltaFamily> {
    let mut by_ray: Vec<Option<&RayFiltration>> = vec![None; fan.num_rays()];
    let mut m = None;
    for f in filts {
        if f.ray >= fan.num_rays() {
            return Err(Error::InvalidFamily(format!("filtration for unknown ray {}", f.ray)));
        }
        let d = f.check()?;
        if *m.get_or_insert(d) != d {
            return Err(Error::Dimension(format!("ray {} has ambient dimension {d}, expected {}", f.ray, m.unwrap())));
        }
        by_ray[f.ray] = Some(f);
    }
    let m = m.ok_or_else(|| Error::InvalidFamily("no filtrations".into()))?;
    if let Some(j) = by_ray.iter().position(Option::is_none) {
        return Err(Error::InvalidFamily(format!("ray {j} has no filtration")));
    }
    let mut corners = Vec::new();
    for cone in fan.max_cones() {
        let fs: Vec<&RayFiltration> = cone.iter().map(|&j| by_ray[j].unwrap()).collect();
        let lo: Vec<i64> = fs.iter().map(|f| f.bounds().0).collect();
        let hi: Vec<i64> = fs.iter().map(|f| f.bounds().1).collect();
        corners.push(CornerFamily::from_fn(cone.clone(), m, lo, hi, |p| {
            fs.iter().zip(p).fold(SubspaceQ::full(m), |acc, (f, &l)| acc.intersect(&f.value(l)))
        })?);
    }
    Ok(DeltaFamily { kind: FamilyKind::Reflexive, rank: m, corners })
}

/// Rank-one reflexive family of the line bundle `O(Σ k_j D_j)`.
pub fn line_bundle_family(k: &[i64], fan: &Fan) -> DeltaFamily {
    let f: Vec<RayFiltration> = k.iter().enumerate().map(|(j, &kj)| RayFiltration::line_bundle(j, kj, 1)).collect();
    reflexive_from_filtrations(&f, fan).expect("line bundle data is valid")
}

impl DeltaFamily {
    pub fn canonical(&self) -> Self {
        DeltaFamily {
            kind: self.kind.clone(),
            rank: self.rank,
            corners: self.corners.iter().map(CornerFamily::canonical).collect(),
        }
    }

    fn carrier(&self, fan: &Fan, nu: &[usize]) -> Result<usize> {
        if !fan.is_cone(nu) {
            return Err(Error::UnknownCone(nu.to_vec()));
        }
        Ok(fan.max_cones_containing(nu)[0])
    }

    /// Limits of the family on the chart of a face.
    pub fn restrict_to_face(&self, fan: &Fan, nu: &[usize]) -> Result<CornerFamily> {
        let i = self.carrier(fan, nu)?;
        if let FamilyKind::Pure(support) = &self.kind {
            if !support.iter().any(|t| t.iter().all(|k| nu.contains(k))) {
                return Ok(CornerFamily::zero(nu.to_vec(), self.rank));
            }
        }
        Ok(self.corners[i].restrict(nu))
    }

    /// Tensor with the equivariant line bundle with ray coefficients `kvec`.
    pub fn tensor_line_bundle(&self, kvec: &[i64]) -> Self {
        DeltaFamily {
            kind: self.kind.clone(),
            rank: self.rank,
            corners: self
                .corners
                .iter()
                .map(|c| {
                    let s: Vec<i64> = c.rays.iter().map(|&j| kvec[j]).collect();
                    c.shift(&s)
                })
                .collect(),
        }
    }

    pub fn characteristic_function(&self) -> CharFunction {
        CharFunction { rank: self.rank, corners: self.corners.iter().map(CornerFamily::char_corner).collect() }
    }

    /// Twist by a relation vector so that the designated cone has lower
    /// bounds zero. Returns the twisted family and the twist.
    pub fn gauge_fix(&self, fan: &Fan) -> Result<(DeltaFamily, Vec<i64>)> {
        let (n, a) = self
            .corners
            .iter()
            .enumerate()
            .find_map(|(i, c)| c.char_corner().lower_bounds().map(|a| (i, a)))
            .ok_or_else(|| Error::ZeroFamily("family vanishes on every cone".into()))?;
        let u = fan.solve_on_cone(n, &a);
        let k = fan.relation(&u);
        Ok((self.tensor_line_bundle(&k).canonical(), k))
    }

    /// Characteristic function of the subfamily `E ∩ W`.
    pub fn intersection_char(&self, w: &SubspaceQ) -> CharFunction {
        CharFunction {
            rank: w.dim(),
            corners: self
                .corners
                .iter()
                .map(|c| CharCorner { rays: c.rays.clone(), grid: c.grid.map(|v| v.intersect(w).dim()) })
                .collect(),
        }
    }

    /// Every distinct value of every corner, with multiplicity removed.
    pub fn all_values(&self) -> Vec<SubspaceQ> {
        let mut set = std::collections::BTreeSet::new();
        for c in &self.corners {
            for v in c.grid.values() {
                set.insert(v.clone());
            }
        }
        set.into_iter().collect()
    }

    /// Direct sum of two families without explicit maps.
    pub fn direct_sum(&self, other: &DeltaFamily) -> Result<DeltaFamily> {
        if self.corners.len() != other.corners.len() {
            return Err(Error::Dimension("families over different fans".into()));
        }
        if self.corners.iter().chain(&other.corners).any(|c| !c.maps.is_empty()) {
            return Err(Error::Unsupported("direct sum of families with explicit maps".into()));
        }
        let (m1, m2) = (self.rank, other.rank);
        let kind = if self.kind == other.kind { self.kind.clone() } else { FamilyKind::TorsionFree };
        let mut corners = Vec::new();
        for (a, b) in self.corners.iter().zip(&other.corners) {
            let lo: Vec<i64> = a.lo().iter().zip(b.lo()).map(|(x, y)| *x.min(y)).collect();
            let hi: Vec<i64> = a.hi().iter().zip(b.hi()).map(|(x, y)| *x.max(y)).collect();
            corners.push(CornerFamily::from_fn(a.rays.clone(), m1 + m2, lo, hi, |p| {
                let pad = |v: &SubspaceQ, before: usize, after: usize| -> Vec<Vec<Q>> {
                    v.basis()
                        .iter()
                        .map(|row| {
                            let mut r = vec![Q::zero(); before];
                            r.extend(row.iter().cloned());
                            r.extend(std::iter::repeat_n(Q::zero(), after));
                            r
                        })
                        .collect()
                };
                let mut rows = pad(&a.value(p), 0, m2);
                rows.extend(pad(&b.value(p), m1, 0));
                SubspaceQ::span(m1 + m2, rows).expect("padded rows")
            })?);
        }
        Ok(DeltaFamily { kind, rank: m1 + m2, corners })
    }

    /// Ray filtrations of a torsion-free family (limits on each ray).
    pub fn ray_filtrations(&self, fan: &Fan) -> Result<Vec<RayFiltration>> {
        let mut out = Vec::new();
        for j in 0..fan.num_rays() {
            let c = self.restrict_to_face(fan, &[j])?;
            let mut jumps: Vec<(i64, SubspaceQ)> = Vec::new();
            for l in c.lo()[0]..=c.hi()[0] {
                let v = c.value(&[l]);
                if !v.is_zero() && jumps.last().is_none_or(|(_, w)| *w != v) {
                    jumps.push((l, v));
                }
            }
            out.push(RayFiltration { ray: j, jumps });
        }
        Ok(out)
    }
}
