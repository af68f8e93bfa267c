//! Chern characters, first Chern classes and Hilbert polynomials.
//!
//! Everything here is computed from the characteristic function alone. The
//! Chern character is the signed sum over all cones of the finite
//! differences of the dimension function, weighted by truncated exponentials
//! of the boundary divisors.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fan::Fan;
use crate::family::{CharCorner, CharFunction};
use crate::grid::Grid;
use crate::intersect::{
    intersection_table, is_ample, pair, require_surface, to_q, todd_and_canonical, ChowClassSurface,
    IntersectionTable,
};
use crate::linalg::{fmt_q, q, Q};

/// Polynomial in `t` with rational coefficients, lowest degree first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct RatPoly {
    coeffs: Vec<Q>,
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    pub fn zero() -> Self {
        RatPoly { coeffs: vec![] }
    }

    pub fn constant(c: Q) -> Self {
        RatPoly::new(vec![c])
    }

    /// Coefficients from degree 0 upward, without trailing zeros.
    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Q {
        self.coeffs.get(i).cloned().unwrap_or_else(Q::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Q {
        self.coeffs.last().cloned().unwrap_or_else(Q::zero)
    }

    pub fn eval(&self, t: &Q) -> Q {
        self.coeffs.iter().rev().fold(Q::zero(), |acc, c| acc * t + c)
    }

    pub fn scale(&self, c: &Q) -> Self {
        RatPoly::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    /// Order by the values for `t ≫ 0`: compare coefficients from the top.
    pub fn cmp_eventually(&self, other: &Self) -> Ordering {
        let n = self.coeffs.len().max(other.coeffs.len());
        for i in (0..n).rev() {
            match self.coeff(i).cmp(&other.coeff(i)) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        Ordering::Equal
    }

    /// The polynomial `t ↦ p(t + s)`.
    pub fn shifted(&self, s: &Q) -> Self {
        let mut out = RatPoly::zero();
        let lin = RatPoly::new(vec![s.clone(), Q::one()]);
        for c in self.coeffs.iter().rev() {
            out = &(&out * &lin) + &RatPoly::constant(c.clone());
        }
        out
    }

    pub fn to_json(&self) -> Vec<String> {
        self.coeffs.iter().map(fmt_q).collect()
    }
}

impl Add for &RatPoly {
    type Output = RatPoly;
    fn add(self, o: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        RatPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl Sub for &RatPoly {
    type Output = RatPoly;
    fn sub(self, o: &RatPoly) -> RatPoly {
        self + &(-o)
    }
}

impl Neg for &RatPoly {
    type Output = RatPoly;
    fn neg(self) -> RatPoly {
        RatPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &RatPoly {
    type Output = RatPoly;
    fn mul(self, o: &RatPoly) -> RatPoly {
        if self.is_zero() || o.is_zero() {
            return RatPoly::zero();
        }
        let mut c = vec![Q::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        RatPoly::new(c)
    }
}

impl fmt::Display for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            let mono = match i {
                0 => String::new(),
                1 => "t".into(),
                _ => format!("t^{i}"),
            };
            if mono.is_empty() {
                write!(f, "{}", fmt_q(&a))?;
            } else if a.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{} {mono}", fmt_q(&a))?;
            }
        }
        Ok(())
    }
}

/// `[E^ν](λ)` for one cone ν, on the restricted box extended by one step
/// in every negative direction.
pub fn bracket_dims(chi: &CharFunction, fan: &Fan, cone: &[usize]) -> Result<Grid<i64>> {
    let face = chi.at_face(fan, cone)?;
    Ok(bracket_of(&face))
}

fn bracket_of(face: &CharCorner) -> Grid<i64> {
    let r = face.rays.len();
    let lo: Vec<i64> = face.grid.lo().iter().map(|x| x - 1).collect();
    let hi = face.grid.hi().to_vec();
    Grid::from_fn(lo, hi, |p| {
        let mut total = 0i64;
        for mask in 0u32..(1 << r) {
            let mut s = p.to_vec();
            for (k, x) in s.iter_mut().enumerate() {
                if mask >> k & 1 == 1 {
                    *x -= 1;
                }
            }
            let d = face.dim_at(&s) as i64;
            total += if mask.count_ones() % 2 == 0 { d } else { -d };
        }
        total
    })
}

/// Chern character truncated to degree two.
pub fn chern_character(chi: &CharFunction, fan: &Fan, table: &IntersectionTable) -> Result<ChowClassSurface> {
    require_surface(fan)?;
    let n = fan.num_rays();
    let mut ch = ChowClassSurface::zero(n);
    for cone in fan.cones() {
        let sign = if (2 - cone.len()) % 2 == 0 { q(1) } else { q(-1) };
        let br = bracket_dims(chi, fan, &cone)?;
        for p in br.points() {
            let m = *br.at(&p);
            if m == 0 {
                continue;
            }
            let mut d = vec![Q::zero(); n];
            for (k, &j) in cone.iter().enumerate() {
                d[j] = q(-p[k]);
            }
            ch = &ch + &ChowClassSurface::exp(&d, table).scale(&(&sign * q(m)));
        }
    }
    Ok(ch)
}

/// First Chern class as ray coefficients, from the ray filtrations only.
pub fn c1_fast(chi: &CharFunction, fan: &Fan) -> Result<Vec<Q>> {
    (0..fan.num_rays())
        .map(|j| {
            let br = bracket_dims(chi, fan, &[j])?;
            Ok(q(-br.points().iter().map(|p| p[0] * br.at(p)).sum::<i64>()))
        })
        .collect()
}

/// `c₂ = ½c₁² − ch₂` as a degree.
pub fn c2(ch: &ChowClassSurface, table: &IntersectionTable) -> Result<Q> {
    Ok(pair(&ch.d, &ch.d, table)? / q(2) - &ch.p)
}

/// `χ(O(D + tH))` as a polynomial in `t`.
pub fn euler_polynomial(d: &[Q], h: &[Q], table: &IntersectionTable, todd: &ChowClassSurface) -> Result<RatPoly> {
    let c0 = &todd.p + pair(d, &todd.d, table)? + pair(d, d, table)? / q(2);
    let c1 = pair(h, &todd.d, table)? + pair(d, h, table)?;
    let c2 = pair(h, h, table)? / q(2);
    Ok(RatPoly::new(vec![c0, c1, c2]))
}

/// `deg{ch · e^{tH} · td}₂` for a given Chern character.
pub fn hilbert_from_ch(ch: &ChowClassSurface, h: &[Q], table: &IntersectionTable, todd: &ChowClassSurface) -> Result<RatPoly> {
    let c = ch.mul(todd, table);
    Ok(RatPoly::new(vec![c.p.clone(), pair(&c.d, h, table)?, &c.r0 * pair(h, h, table)? / q(2)]))
}

/// Hilbert polynomial with respect to an ample divisor.
pub fn hilbert_polynomial(chi: &CharFunction, fan: &Fan, h: &[i64]) -> Result<RatPoly> {
    require_ample(h, fan)?;
    let table = intersection_table(fan)?;
    let (todd, _) = todd_and_canonical(fan)?;
    let ch = chern_character(chi, fan, &table)?;
    hilbert_from_ch(&ch, &to_q(h), &table, &todd)
}

pub(crate) fn require_ample(h: &[i64], fan: &Fan) -> Result<()> {
    if h.len() != fan.num_rays() {
        return Err(Error::Dimension(format!("divisor length {} for {} rays", h.len(), fan.num_rays())));
    }
    if !is_ample(h, fan) {
        return Err(Error::NotAmple);
    }
    Ok(())
}

/// Numerical invariants read off a Hilbert polynomial `Σ α_i t^i / i!`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HilbertData {
    /// Dimension of the support (degree of the polynomial).
    pub dimension: usize,
    /// Rank for full support, multiplicity `α_d` otherwise.
    pub rank: String,
    pub degree: String,
    pub slope: String,
}

/// Rank, degree and slope. For full support the degree is
/// `α₁(E) − α₁(O)·rk(E)`; for lower-dimensional support it is `α_{d−1}`
/// and the rank is replaced by the multiplicity `α_d`.
pub fn hilbert_data(poly: &RatPoly, fan: &Fan, h: &[i64]) -> Result<HilbertData> {
    let d = poly.degree().ok_or_else(|| Error::ZeroFamily("zero Hilbert polynomial".into()))?;
    let fact = |i: usize| q((1..=i as i64).product());
    let alpha = |i: usize| poly.coeff(i) * fact(i);
    let table = intersection_table(fan)?;
    let hq = to_q(h);
    let (rank, degree) = if d == 2 {
        let rank = alpha(2) / pair(&hq, &hq, &table)?;
        let (todd, _) = todd_and_canonical(fan)?;
        let alpha1_o = pair(&hq, &todd.d, &table)?;
        (rank.clone(), alpha(1) - alpha1_o * rank)
    } else if d == 0 {
        (alpha(0), Q::zero())
    } else {
        (alpha(d), alpha(d - 1))
    };
    let slope = &degree / &rank;
    Ok(HilbertData { dimension: d, rank: fmt_q(&rank), degree: fmt_q(&degree), slope: fmt_q(&slope) })
}

/// Degree of `c₁ · H`.
pub fn slope_degree(c1: &[Q], h: &[i64], table: &IntersectionTable) -> Result<Q> {
    pair(c1, &to_q(h), table)
}

/// All bracket tables of a characteristic function, keyed by cone.
pub fn bracket_tables(chi: &CharFunction, fan: &Fan) -> Result<Vec<(Vec<usize>, Grid<i64>)>> {
    fan.cones().into_iter().map(|c| bracket_dims(chi, fan, &c).map(|g| (c, g))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{line_bundle_family, CornerFamily, DeltaFamily, FamilyKind, RayFiltration};
    use crate::intersect::lattice_point_count;
    use crate::linalg::{qf, SubspaceQ};

    fn ideal_of_point(fan: &Fan) -> DeltaFamily {
        let corners = fan
            .max_cones()
            .iter()
            .enumerate()
            .map(|(i, c)| {
                CornerFamily::from_fn(c.clone(), 1, vec![0, 0], vec![1, 1], |p| {
                    if i == 0 && p == [0, 0] {
                        SubspaceQ::zero(1)
                    } else {
                        SubspaceQ::full(1)
                    }
                })
                .unwrap()
            })
            .collect();
        DeltaFamily { kind: FamilyKind::TorsionFree, rank: 1, corners }
    }

    #[test]
    fn polynomial_arithmetic() {
        let a = RatPoly::new(vec![q(1), q(1)]);
        let b = RatPoly::new(vec![q(2), q(1)]);
        let p = (&a * &b).scale(&qf(1, 2));
        assert_eq!(p.coeffs(), &[q(1), qf(3, 2), qf(1, 2)]);
        assert_eq!(p.eval(&q(3)), q(10));
        assert_eq!(p.to_string(), "1/2 t^2 + 3/2 t + 1");
        assert_eq!((&p - &p).degree(), None);
        assert_eq!(p.cmp_eventually(&a), Ordering::Greater);
        assert_eq!(a.shifted(&q(1)).coeffs(), &[q(2), q(1)]);
        assert_eq!(RatPoly::new(vec![q(-1), q(0), qf(-1, 2)]).to_string(), "-1/2 t^2 - 1");
    }

    #[test]
    fn line_bundle_bracket_is_a_single_corner() {
        let fan = Fan::projective_plane();
        let chi = line_bundle_family(&[2, -1, 0], &fan).characteristic_function();
        let br = bracket_dims(&chi, &fan, &[0, 1]).unwrap();
        let nonzero: Vec<_> = br.points().into_iter().filter(|p| *br.at(p) != 0).collect();
        assert_eq!(nonzero, vec![vec![-2, 1]]);
        assert_eq!(*br.at(&[-2, 1]), 1);
        let o = line_bundle_family(&[0, 0, 0], &fan).characteristic_function();
        let ray = bracket_dims(&o, &fan, &[1]).unwrap();
        assert_eq!(ray.points().iter().map(|p| *ray.at(p)).collect::<Vec<_>>(), vec![0, 1]);
    }

    #[test]
    fn ideal_of_point_bracket() {
        let fan = Fan::projective_plane();
        let chi = ideal_of_point(&fan).characteristic_function();
        let br = bracket_dims(&chi, &fan, &[0, 1]).unwrap();
        // Independent inclusion–exclusion over the staircase: 0 at (0,0), 1 elsewhere.
        let dim = |a: i64, b: i64| i64::from(a >= 0 && b >= 0 && (a, b) != (0, 0));
        for p in br.points() {
            let expect = dim(p[0], p[1]) - dim(p[0] - 1, p[1]) - dim(p[0], p[1] - 1) + dim(p[0] - 1, p[1] - 1);
            assert_eq!(*br.at(&p), expect, "{p:?}");
        }
        assert_eq!(*br.at(&[1, 1]), -1);
        assert_eq!(*br.at(&[1, 0]), 1);
        assert_eq!(br.values().iter().sum::<i64>(), 1);
    }

    #[test]
    fn line_bundle_chern_character() {
        for fan in [Fan::projective_plane(), Fan::p1_times_p1(), Fan::hirzebruch(1)] {
            let table = intersection_table(&fan).unwrap();
            for k in [vec![0i64; fan.num_rays()], (0..fan.num_rays() as i64).map(|j| j - 1).collect()] {
                let chi = line_bundle_family(&k, &fan).characteristic_function();
                let ch = chern_character(&chi, &fan, &table).unwrap();
                let kq = to_q(&k);
                assert_eq!(ch.r0, q(1));
                assert_eq!(ch.d, kq);
                assert_eq!(ch.p, pair(&kq, &kq, &table).unwrap() / q(2));
                assert_eq!(c1_fast(&chi, &fan).unwrap(), kq);
            }
        }
    }

    #[test]
    fn ideal_of_point_invariants() {
        let fan = Fan::projective_plane();
        let table = intersection_table(&fan).unwrap();
        let chi = ideal_of_point(&fan).characteristic_function();
        let ch = chern_character(&chi, &fan, &table).unwrap();
        assert_eq!(ch.r0, q(1));
        assert!(ch.d.iter().all(Zero::is_zero));
        assert_eq!(ch.p, q(-1));
        assert_eq!(c2(&ch, &table).unwrap(), q(1));
        // P(t) = #monomials of degree t minus the point: (t+1)(t+2)/2 − 1.
        let p = hilbert_polynomial(&chi, &fan, &[1, 0, 0]).unwrap();
        for t in 0..6i64 {
            assert_eq!(p.eval(&q(t)), q((t + 1) * (t + 2) / 2 - 1));
        }
    }

    #[test]
    fn rank_two_ray_jumps() {
        let fan = Fan::projective_plane();
        let l = SubspaceQ::span_int(2, &[&[1, 0]]);
        let filts = vec![
            RayFiltration { ray: 0, jumps: vec![(-1, l), (0, SubspaceQ::full(2))] },
            RayFiltration::line_bundle(1, 0, 2),
            RayFiltration::line_bundle(2, 0, 2),
        ];
        let e = crate::family::reflexive_from_filtrations(&filts, &fan).unwrap();
        let c1 = c1_fast(&e.characteristic_function(), &fan).unwrap();
        assert_eq!(c1, vec![q(1), q(0), q(0)]);
    }

    #[test]
    fn structure_sheaf_hilbert_polynomial() {
        let fan = Fan::projective_plane();
        let chi = line_bundle_family(&[0, 0, 0], &fan).characteristic_function();
        let p = hilbert_polynomial(&chi, &fan, &[1, 0, 0]).unwrap();
        assert_eq!(p.coeffs(), &[q(1), qf(3, 2), qf(1, 2)]);
        let data = hilbert_data(&p, &fan, &[1, 0, 0]).unwrap();
        assert_eq!((data.rank.as_str(), data.degree.as_str()), ("1", "0"));
        assert!(matches!(hilbert_polynomial(&chi, &fan, &[1, 0, -1]), Err(Error::NotAmple)));
    }

    #[test]
    fn nef_line_bundles_match_lattice_points() {
        let fan = Fan::hirzebruch(1);
        let h = crate::intersect::some_ample(&fan);
        for k in [[0, 0, 0, 0], [1, 0, 0, 0], [0, 1, 0, 0], [2, 1, 0, 1]] {
            if !crate::intersect::is_nef(&k, &fan) {
                continue;
            }
            let chi = line_bundle_family(&k, &fan).characteristic_function();
            let p = hilbert_polynomial(&chi, &fan, &h).unwrap();
            for t in 0..6 {
                let d: Vec<i64> = k.iter().zip(&h).map(|(a, b)| a + t * b).collect();
                assert_eq!(p.eval(&q(t)), q(lattice_point_count(&d, &fan).unwrap() as i64));
            }
        }
    }

    #[test]
    fn direct_sum_is_additive() {
        let fan = Fan::p1_times_p1();
        let h = [1, 1, 0, 0];
        let a = line_bundle_family(&[1, 0, 0, 0], &fan);
        let b = ideal_of_point(&fan);
        let s = a.direct_sum(&b).unwrap();
        let p = |f: &DeltaFamily| hilbert_polynomial(&f.characteristic_function(), &fan, &h).unwrap();
        assert_eq!(p(&s), &p(&a) + &p(&b));
    }

    #[test]
    fn boundary_sheaf_has_one_dimensional_support() {
        let fan = Fan::projective_plane();
        let corners = fan
            .max_cones()
            .iter()
            .map(|c| {
                CornerFamily::from_fn(c.clone(), 1, vec![0, 0], vec![1, 1], |p| {
                    if p == [1, 1] {
                        SubspaceQ::zero(1)
                    } else {
                        SubspaceQ::full(1)
                    }
                })
                .unwrap()
            })
            .collect();
        let b = DeltaFamily { kind: FamilyKind::Pure(vec![vec![0], vec![1], vec![2]]), rank: 1, corners };
        let table = intersection_table(&fan).unwrap();
        let ch = chern_character(&b.characteristic_function(), &fan, &table).unwrap();
        assert_eq!(ch.r0, q(0));
        // O_D for D = D_0 + D_1 + D_2 = −K has c₁ = D.
        assert!(ch.class_eq(
            &ChowClassSurface { r0: q(0), d: vec![q(1); 3], p: ch.p.clone() },
            &fan
        ));
        let p = hilbert_polynomial(&b.characteristic_function(), &fan, &[1, 0, 0]).unwrap();
        // A plane cubic has P(t) = 3t.
        assert_eq!(p.coeffs(), &[q(0), q(3)]);
        let data = hilbert_data(&p, &fan, &[1, 0, 0]).unwrap();
        assert_eq!(data.dimension, 1);
        assert_eq!(data.rank, "3");
    }
}
