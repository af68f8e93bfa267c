//! Seeded random families for property tests and fuzzing.
//!
//! Reflexive families come from random flags on each ray. For rank two the
//! flag lines are drawn from a small pool so that coincidences, and hence
//! semistable and unstable examples, occur often. Torsion-free families are
//! obtained by cutting a staircase of smaller subspaces out of the bottom
//! corner of a reflexive family, which leaves every limit untouched.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::fan::Fan;
use crate::family::{reflexive_from_filtrations, DeltaFamily, FamilyKind, RayFiltration};
use crate::grid::box_points;
use crate::linalg::{q, SubspaceQ};

/// Ranges used by the samplers.
#[derive(Clone, Debug)]
pub struct SampleParams {
    pub rank: usize,
    /// Base offsets are drawn from `[-max_offset, max_offset]`.
    pub max_offset: i64,
    /// Flag gaps are drawn from `[0, max_gap]`.
    pub max_gap: i64,
    /// Largest extent of a corner cut along each axis.
    pub max_cut: i64,
    /// Size of the pool of flag lines in rank two.
    pub line_pool: usize,
}

impl SampleParams {
    pub fn rank(rank: usize) -> Self {
        SampleParams { rank, max_offset: 2, max_gap: 2, max_cut: 2, line_pool: 3 }
    }
}

/// A random subspace of the given dimension with small integer entries.
pub fn random_subspace<R: Rng>(rng: &mut R, m: usize, d: usize) -> SubspaceQ {
    loop {
        let rows: Vec<Vec<_>> = (0..d).map(|_| (0..m).map(|_| q(rng.gen_range(-3..=3))).collect()).collect();
        let s = SubspaceQ::span(m, rows).expect("rows have the ambient length");
        if s.dim() == d {
            return s;
        }
    }
}

/// A random proper nonzero subspace of random dimension.
pub fn random_proper_subspace<R: Rng>(rng: &mut R, m: usize) -> SubspaceQ {
    let d = rng.gen_range(1..m);
    random_subspace(rng, m, d)
}

fn random_flag<R: Rng>(rng: &mut R, m: usize, pool: &[SubspaceQ]) -> Vec<SubspaceQ> {
    let mut flag = Vec::new();
    let mut cur = SubspaceQ::zero(m);
    for k in 1..m {
        let next = if k == 1 && !pool.is_empty() {
            pool.choose(rng).unwrap().clone()
        } else {
            loop {
                let v = random_subspace(rng, m, 1);
                let s = cur.sum(&v);
                if s.dim() == k {
                    break s;
                }
            }
        };
        cur = next;
        flag.push(cur.clone());
    }
    flag
}

pub fn random_reflexive<R: Rng>(rng: &mut R, fan: &Fan, p: &SampleParams) -> DeltaFamily {
    let m = p.rank;
    let pool: Vec<SubspaceQ> = if m == 2 { (0..p.line_pool).map(|_| random_subspace(rng, 2, 1)).collect() } else { vec![] };
    let filts: Vec<RayFiltration> = (0..fan.num_rays())
        .map(|j| {
            let a = rng.gen_range(-p.max_offset..=p.max_offset);
            let gaps: Vec<i64> = (1..m).map(|_| rng.gen_range(0..=p.max_gap)).collect();
            let flag = random_flag(rng, m, &pool);
            RayFiltration::from_flag(j, a, &gaps, &flag, m)
        })
        .collect();
    reflexive_from_filtrations(&filts, fan).expect("sampled filtrations are valid")
}

/// Cuts a random staircase out of the bottom corner of some charts.
pub fn cut_corners<R: Rng>(rng: &mut R, fam: &DeltaFamily, p: &SampleParams) -> DeltaFamily {
    let m = fam.rank;
    let mut out = fam.clone();
    out.kind = FamilyKind::TorsionFree;
    for c in out.corners.iter_mut() {
        if rng.gen_bool(0.4) {
            continue;
        }
        let r = c.rays.len();
        let lo = c.lo().to_vec();
        // Down-closed sets generated by a few random corner points.
        let gens = |rng: &mut R, n: usize| -> Vec<Vec<i64>> {
            (0..n).map(|_| (0..r).map(|k| lo[k] + rng.gen_range(0..p.max_cut)).collect()).collect()
        };
        let n_outer = rng.gen_range(1..=2);
        let outer = gens(rng, n_outer);
        let inner: Vec<Vec<i64>> = if m > 1 && rng.gen_bool(0.5) { gens(rng, 1) } else { vec![] };
        let below = |gs: &[Vec<i64>], pt: &[i64]| gs.iter().any(|g| pt.iter().zip(g).all(|(x, y)| x <= y));
        let line = if m > 1 { random_proper_subspace(rng, m) } else { SubspaceQ::zero(1) };
        let hi: Vec<i64> = (0..r).map(|k| c.hi()[k].max(lo[k] + p.max_cut)).collect();
        *c = c.with_box(lo.clone(), hi.clone());
        for pt in box_points(&lo, &hi) {
            let v = c.value(&pt);
            if below(&inner, &pt) {
                c.set(&pt, SubspaceQ::zero(m));
            } else if below(&outer, &pt) {
                c.set(&pt, v.intersect(&line));
            }
        }
    }
    out
}

pub fn random_torsion_free<R: Rng>(rng: &mut R, fan: &Fan, p: &SampleParams) -> DeltaFamily {
    let base = random_reflexive(rng, fan, p);
    cut_corners(rng, &base, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::validate_torsion_free;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn samples_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for fan in [Fan::projective_plane(), Fan::p1_times_p1(), Fan::hirzebruch(1)] {
            for rank in 1..=3 {
                let p = SampleParams::rank(rank);
                for _ in 0..10 {
                    let r = random_reflexive(&mut rng, &fan, &p);
                    assert!(validate_torsion_free(&r, &fan).is_empty());
                    let t = cut_corners(&mut rng, &r, &p);
                    let v = validate_torsion_free(&t, &fan);
                    assert!(v.is_empty(), "{v:?}");
                }
            }
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let fan = Fan::projective_plane();
        let p = SampleParams::rank(2);
        let a = random_torsion_free(&mut ChaCha8Rng::seed_from_u64(3), &fan, &p);
        let b = random_torsion_free(&mut ChaCha8Rng::seed_from_u64(3), &fan, &p);
        assert_eq!(a, b);
    }
}
