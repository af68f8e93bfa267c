//! Torus-fixed points of moduli of sheaves on toric surfaces: generating
//! functions and enumeration of gauge-fixed characteristic functions.

use std::collections::BTreeMap;
use std::fmt;

use num::bigint::BigInt;
use num::{One, Signed, ToPrimitive, Zero};

use crate::chern::{c2 as second_chern, chern_character};
use crate::error::{Error, Result};
use crate::fan::Fan;
use crate::family::{
    reflexive_from_filtrations, validate_torsion_free, CharFunction, CornerFamily, DeltaFamily, FamilyKind,
    RayFiltration,
};
use crate::fan::euler_characteristic;
use crate::grid::box_points;
use crate::intersect::{intersection_table, require_surface, IntersectionTable};
use crate::linalg::{q, SubspaceQ, Q};
use crate::stability::{gieseker_test, mu_test, Verdict};

/// Power series in `q` truncated after `q^order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntSeries {
    coeffs: Vec<BigInt>,
}

impl IntSeries {
    pub fn zero(order: usize) -> Self {
        IntSeries { coeffs: vec![BigInt::zero(); order + 1] }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = BigInt::one();
        s
    }

    pub fn from_coeffs(order: usize, c: impl IntoIterator<Item = BigInt>) -> Self {
        let mut s = Self::zero(order);
        for (i, x) in c.into_iter().take(order + 1).enumerate() {
            s.coeffs[i] = x;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &BigInt {
        &self.coeffs[k]
    }

    pub fn add(&self, o: &Self) -> Self {
        IntSeries { coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.order().min(o.order());
        let mut c = vec![BigInt::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(n + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate().take(n + 1 - i) {
                c[i + j] += a * b;
            }
        }
        IntSeries { coeffs: c }
    }

    /// Multiplicative inverse; needs a constant term of `±1`.
    pub fn inverse(&self) -> Result<Self> {
        let c0 = &self.coeffs[0];
        if !c0.abs().is_one() {
            return Err(Error::Unsupported("series inverse needs constant term ±1".into()));
        }
        let n = self.order();
        let mut inv = vec![BigInt::zero(); n + 1];
        inv[0] = c0.clone();
        for k in 1..=n {
            let s: BigInt = (1..=k).map(|i| &self.coeffs[i] * &inv[k - i]).sum();
            inv[k] = -(s * c0);
        }
        Ok(IntSeries { coeffs: inv })
    }

    /// Integer power; negative exponents go through the inverse.
    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut out = Self::one(self.order());
        for _ in 0..e.unsigned_abs() {
            out = out.mul(&base);
        }
        Ok(out)
    }

    /// `∏_{k ≥ 1} (1 − q^k)^e`.
    pub fn euler_product(order: usize, e: i64) -> Self {
        let mut p = Self::one(order);
        for k in 1..=order {
            let mut f = Self::one(order);
            f.coeffs[k] = -BigInt::one();
            p = p.mul(&f);
        }
        p.pow(e).expect("constant term one")
    }
}

impl fmt::Display for IntSeries {
    /// One `q^k: c` line per coefficient.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, c) in self.coeffs.iter().enumerate() {
            writeln!(f, "q^{k}: {c}")?;
        }
        Ok(())
    }
}

/// All partitions of `n` as non-increasing part lists.
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for p in (1..=n.min(max)).rev() {
            cur.push(p);
            go(n - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// Default and largest supported order for the rank-one series.
pub const RANK1_DEFAULT_ORDER: usize = 10;
pub const RANK2_MAX_ORDER: usize = 30;

/// Counts tuples of partitions, one per maximal cone, by total size.
pub fn rank1_fixed_point_series(fan: &Fan, order: usize) -> Result<IntSeries> {
    require_surface(fan)?;
    let cones = fan.max_cones().len();
    let by_size: Vec<Vec<Vec<usize>>> = (0..=order).map(partitions).collect();
    let mut counts = vec![BigInt::zero(); order + 1];
    fn walk(cone: usize, cones: usize, used: usize, order: usize, by_size: &[Vec<Vec<usize>>], counts: &mut [BigInt]) {
        if cone == cones {
            counts[used] += 1;
            return;
        }
        for s in 0..=order - used {
            for _tuple_member in &by_size[s] {
                walk(cone + 1, cones, used + s, order, by_size, counts);
            }
        }
    }
    walk(0, cones, 0, order, &by_size, &mut counts);
    Ok(IntSeries::from_coeffs(order, counts))
}

/// `∏(1 − q^k)^{−6} · Σ_{m,n ≥ 1} q^{mn} / (1 − q^{m+n−1})`.
pub fn rank2_p2_series(order: usize) -> Result<IntSeries> {
    if order > RANK2_MAX_ORDER {
        return Err(Error::Unsupported(format!("order {order} exceeds {RANK2_MAX_ORDER}")));
    }
    let mut inner = IntSeries::zero(order);
    for m in 1..=order {
        for n in 1..=order / m {
            let step = m + n - 1;
            let mut e = m * n;
            while e <= order {
                inner.coeffs[e] += 1;
                e += step;
            }
        }
    }
    Ok(IntSeries::euler_product(order, -6).mul(&inner))
}

/// One family of subspace configurations realizing a characteristic
/// function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stratum {
    /// Class label of each ray's flag line, `None` where the flag has no gap.
    pub pattern: Vec<Option<usize>>,
    /// Corner lines not forced by the flags; chosen distinct and general.
    pub free_lines: usize,
    pub mu: Verdict,
    pub gieseker: Verdict,
    /// Euler number when the stratum is a single point up to `GL(M)`.
    pub euler: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumeratedChi {
    pub chi: CharFunction,
    pub c2: Q,
    pub strata: Vec<Stratum>,
    /// A validated family with this characteristic function.
    pub witness: DeltaFamily,
}

/// Parameters of [`enumerate_gauge_fixed_chi`].
#[derive(Clone, Debug)]
pub struct EnumerationParams {
    pub rank: usize,
    pub c1: Vec<i64>,
    pub c2_max: i64,
    /// Offsets and gaps are searched in `[-bound, bound]` and `[0, bound]`.
    pub bound: i64,
    pub ample: Vec<i64>,
}

/// Restricted-growth strings: set partitions of `n` labelled items.
fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(i: usize, n: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        for c in 0..=max {
            cur.push(c);
            go(i + 1, n, if c == max { max + 1 } else { max }, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, 0, &mut Vec::new(), &mut out);
    out
}

fn product_ranges(ranges: &[(i64, i64)]) -> Vec<Vec<i64>> {
    if ranges.is_empty() {
        return vec![vec![]];
    }
    let lo: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    let hi: Vec<i64> = ranges.iter().map(|r| r.1).collect();
    box_points(&lo, &hi)
}

/// A corner family below a reflexive one, with its deficit and the number
/// of lines not forced by the reflexive values.
struct Cut {
    corner: CornerFamily,
    deficit: i64,
    free_lines: usize,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, i: usize) -> usize {
        if self.0[i] != i {
            let r = self.find(self.0[i]);
            self.0[i] = r;
        }
        self.0[i]
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        self.0[ra] = rb;
    }
}

/// Every dimension function below the reflexive corner with total deficit
/// at most `budget` that some subspace configuration realizes. Rank one or
/// two only.
fn corner_cuts(refl: &CornerFamily, budget: i64, next_free: &mut i64) -> Vec<Cut> {
    let m = refl.ambient();
    let r = refl.rays.len();
    let lo = refl.lo().to_vec();
    let hi: Vec<i64> = refl.hi().iter().map(|h| h + budget + 1).collect();
    let pts = box_points(&lo, &hi);
    let index: BTreeMap<Vec<i64>, usize> = pts.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
    let top = |p: &[i64]| p.iter().zip(&hi).any(|(x, h)| x == h);
    let mut dims: Vec<usize> = vec![0; pts.len()];
    let mut out = Vec::new();

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        i: usize,
        left: i64,
        pts: &[Vec<i64>],
        index: &BTreeMap<Vec<i64>, usize>,
        refl: &CornerFamily,
        top: &dyn Fn(&[i64]) -> bool,
        dims: &mut Vec<usize>,
        found: &mut Vec<(Vec<usize>, i64)>,
        budget: i64,
    ) {
        if i == pts.len() {
            found.push((dims.clone(), budget - left));
            return;
        }
        let p = &pts[i];
        let full = refl.dim_at(p);
        let floor = (0..p.len())
            .filter_map(|k| {
                let mut s = p.clone();
                s[k] -= 1;
                index.get(&s).map(|&j| dims[j])
            })
            .max()
            .unwrap_or(0);
        let choices: Vec<usize> = if top(p) { vec![full] } else { (0..=full).collect() };
        for d in choices {
            let cost = (full - d) as i64;
            if d < floor || cost > left {
                continue;
            }
            dims[i] = d;
            dfs(i + 1, left - cost, pts, index, refl, top, dims, found, budget);
        }
    }

    let mut found = Vec::new();
    dfs(0, budget, &pts, &index, refl, &top, &mut dims, &mut found, budget);
    for (dims, deficit) in found {
        // Lines on connected one-dimensional regions must agree.
        let mut uf = UnionFind((0..pts.len()).collect());
        for (i, p) in pts.iter().enumerate() {
            if dims[i] != 1 {
                continue;
            }
            for k in 0..r {
                let mut s = p.clone();
                s[k] += 1;
                if let Some(&j) = index.get(&s) {
                    if dims[j] == 1 {
                        uf.union(i, j);
                    }
                }
            }
        }
        let mut forced: BTreeMap<usize, SubspaceQ> = BTreeMap::new();
        let mut ok = true;
        for (i, p) in pts.iter().enumerate() {
            if dims[i] == 1 && refl.dim_at(p) == 1 {
                let root = uf.find(i);
                let v = refl.value(p);
                if forced.get(&root).is_some_and(|w| *w != v) {
                    ok = false;
                    break;
                }
                forced.insert(root, v);
            }
        }
        if !ok {
            continue;
        }
        let mut free: BTreeMap<usize, SubspaceQ> = BTreeMap::new();
        let mut assigned = *next_free;
        let corner = CornerFamily::from_fn(refl.rays.clone(), m, lo.clone(), hi.clone(), |p| {
            let i = index[p];
            match dims[i] {
                0 => SubspaceQ::zero(m),
                d if d == m => SubspaceQ::full(m),
                _ => {
                    let root = uf.find(i);
                    if let Some(v) = forced.get(&root) {
                        return v.clone();
                    }
                    free.entry(root)
                        .or_insert_with(|| {
                            assigned += 1;
                            SubspaceQ::span_int(m, &[&[1, assigned]])
                        })
                        .clone()
                }
            }
        })
        .expect("box matches the reflexive corner");
        *next_free = assigned;
        out.push(Cut { corner, deficit, free_lines: free.len() });
    }
    out
}

/// Flag lines `(1, c)` for class `c`; free corner lines start after them.
const FREE_LINE_OFFSET: i64 = 1000;

fn reflexive_candidate(fan: &Fan, m: usize, a: &[i64], gaps: &[i64], pattern: &[Option<usize>]) -> Result<DeltaFamily> {
    let filts: Vec<RayFiltration> = (0..fan.num_rays())
        .map(|j| {
            if m == 1 {
                return RayFiltration::from_flag(j, a[j], &[], &[], 1);
            }
            let line = SubspaceQ::span_int(2, &[&[1, pattern[j].unwrap_or(0) as i64]]);
            RayFiltration::from_flag(j, a[j], &[gaps[j]], &[line], 2)
        })
        .collect();
    reflexive_from_filtrations(&filts, fan)
}

fn c2_of(chi: &CharFunction, fan: &Fan, table: &IntersectionTable) -> Result<Q> {
    second_chern(&chern_character(chi, fan, table)?, table)
}

/// Gauge-fixed characteristic functions of μ-semistable torsion-free
/// sheaves of rank one or two with first Chern class linearly equivalent to
/// `c1` and `c₂ ≤ c2_max`, each with the configuration strata realizing it.
///
/// Gauge fixing puts the lower bounds of the first maximal cone at zero, so
/// the other offsets range over `[-bound, bound]`; a result touching the
/// edge of the search range is reported as [`Error::BoxTooSmall`].
pub fn enumerate_gauge_fixed_chi(fan: &Fan, p: &EnumerationParams) -> Result<Vec<EnumeratedChi>> {
    require_surface(fan)?;
    let m = p.rank;
    if !(1..=2).contains(&m) {
        return Err(Error::Unsupported(format!("enumeration in rank {m}")));
    }
    if p.c1.len() != fan.num_rays() {
        return Err(Error::Dimension(format!("c1 has {} entries for {} rays", p.c1.len(), fan.num_rays())));
    }
    crate::chern::require_ample(&p.ample, fan)?;
    let table = intersection_table(fan)?;
    let n = fan.num_rays();
    let gauge_cone = fan.max_cones()[0].clone();
    let b = p.bound;
    let a_ranges: Vec<(i64, i64)> = (0..n).map(|j| if gauge_cone.contains(&j) { (0, 0) } else { (-b, b) }).collect();
    let gap_ranges: Vec<(i64, i64)> = (0..n).map(|_| if m == 2 { (0, b) } else { (0, 0) }).collect();
    if m == 1 {
        // The offsets are determined by the class of `c1`.
        let u = fan.solve_on_cone(0, &gauge_cone.iter().map(|&j| p.c1[j]).collect::<Vec<_>>());
        let rel = fan.relation(&u);
        if (0..n).any(|j| (rel[j] - p.c1[j]).abs() >= b) {
            return Err(Error::BoxTooSmall(format!("the line bundle offsets exceed the search bound {b}")));
        }
    }
    let mut results: BTreeMap<String, EnumeratedChi> = BTreeMap::new();
    let mut touched = false;
    let mut next_free = FREE_LINE_OFFSET;
    for a in product_ranges(&a_ranges) {
        for gaps in product_ranges(&gap_ranges) {
            let c1v: Vec<i64> = (0..n).map(|j| -(m as i64 * a[j] + gaps[j])).collect();
            if !fan.linearly_equivalent(&c1v, &p.c1) {
                continue;
            }
            let flagged: Vec<usize> = (0..n).filter(|&j| gaps[j] > 0).collect();
            for labels in set_partitions(flagged.len()) {
                let mut pattern = vec![None; n];
                for (&j, &c) in flagged.iter().zip(&labels) {
                    pattern[j] = Some(c);
                }
                let refl = reflexive_candidate(fan, m, &a, &gaps, &pattern)?;
                let mu = mu_test(&refl, fan, &p.ample)?.verdict;
                if mu == Verdict::Unstable {
                    continue;
                }
                let c2_refl = c2_of(&refl.characteristic_function(), fan, &table)?;
                let budget = (q(p.c2_max) - &c2_refl).floor().to_integer().to_i64().unwrap_or(i64::MIN);
                if budget < 0 {
                    continue;
                }
                let edge = a.iter().zip(&a_ranges).any(|(x, r)| r.0 != r.1 && x.abs() == b)
                    || (m == 2 && gaps.contains(&b));
                touched |= edge;
                let cuts: Vec<Vec<Cut>> =
                    refl.corners.iter().map(|c| corner_cuts(c, budget, &mut next_free)).collect();
                let mut choice = vec![0usize; cuts.len()];
                combine(&cuts, 0, budget, &mut choice, &mut |sel: &[usize]| -> Result<()> {
                    let corners: Vec<CornerFamily> =
                        sel.iter().enumerate().map(|(i, &k)| cuts[i][k].corner.clone()).collect();
                    let deficit: i64 = sel.iter().enumerate().map(|(i, &k)| cuts[i][k].deficit).sum();
                    let free_lines: usize = sel.iter().enumerate().map(|(i, &k)| cuts[i][k].free_lines).sum();
                    let kind = if deficit == 0 { FamilyKind::Reflexive } else { FamilyKind::TorsionFree };
                    let fam = DeltaFamily { kind, rank: m, corners }.canonical();
                    let violations = validate_torsion_free(&fam, fan);
                    if !violations.is_empty() {
                        return Err(Error::InvalidFamily(format!("enumeration witness failed validation: {}", violations[0])));
                    }
                    let chi = fam.characteristic_function().canonical();
                    let c2 = c2_of(&chi, fan, &table)?;
                    let gieseker = gieseker_test(&fam, fan, &p.ample)?.verdict;
                    let classes = labels.iter().max().map_or(0, |x| x + 1);
                    let euler = if m == 1 || (free_lines == 0 && classes <= 3) { Some(1) } else { None };
                    let stratum = Stratum { pattern: pattern.clone(), free_lines, mu, gieseker, euler };
                    results
                        .entry(chi.key())
                        .or_insert_with(|| EnumeratedChi { chi, c2, strata: vec![], witness: fam })
                        .strata
                        .push(stratum);
                    Ok(())
                })?;
            }
        }
    }
    if touched {
        return Err(Error::BoxTooSmall(format!("a solution reaches the search bound {b}; increase the bound")));
    }
    Ok(results.into_values().collect())
}

fn combine(
    cuts: &[Vec<Cut>],
    i: usize,
    left: i64,
    choice: &mut Vec<usize>,
    f: &mut dyn FnMut(&[usize]) -> Result<()>,
) -> Result<()> {
    if i == cuts.len() {
        return f(choice);
    }
    for (k, c) in cuts[i].iter().enumerate() {
        if c.deficit <= left {
            choice[i] = k;
            combine(cuts, i + 1, left - c.deficit, choice, f)?;
        }
    }
    Ok(())
}

/// Sum of the Euler numbers of the Gieseker-stable strata, or `None` if one
/// of them is not a point.
pub fn stable_euler_total(list: &[EnumeratedChi]) -> Option<i64> {
    list.iter()
        .flat_map(|e| &e.strata)
        .filter(|s| s.gieseker == Verdict::Stable)
        .map(|s| s.euler)
        .sum()
}

/// Number of characteristic functions with each value of `c₂`.
pub fn count_by_c2(list: &[EnumeratedChi]) -> BTreeMap<Q, usize> {
    let mut out = BTreeMap::new();
    for e in list {
        *out.entry(e.c2.clone()).or_insert(0) += 1;
    }
    out
}

/// Euler characteristic of the surface, the exponent in the rank-one series.
pub fn surface_euler_number(fan: &Fan) -> i64 {
    euler_characteristic(fan)
}
