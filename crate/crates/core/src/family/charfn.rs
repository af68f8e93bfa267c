use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fan::{Cone, Fan};
use crate::grid::{Grid, INF};

/// Dimension function of one corner family.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CharCorner {
    /// Coordinate `k` of the box belongs to ray `rays[k]`.
    pub rays: Vec<usize>,
    pub grid: Grid<usize>,
}

/// Dimension functions of a whole family, one per maximal cone.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CharFunction {
    pub rank: usize,
    pub corners: Vec<CharCorner>,
}

/// Shrinks a grid to the smallest box with the same clamped reads. A layer is
/// only removed when `removable(axis, layer)` allows it.
pub(crate) fn trim_grid<T: Clone + PartialEq>(
    g: &Grid<T>,
    zero: &T,
    removable: impl Fn(usize, i64) -> bool,
) -> Grid<T> {
    let r = g.ndim();
    if g.values().iter().all(|v| v == zero) && (0..r).all(|k| (g.lo()[k]..=g.hi()[k]).all(|l| removable(k, l))) {
        return Grid::from_fn(vec![0; r], vec![0; r], |_| zero.clone());
    }
    let mut lo = g.lo().to_vec();
    let mut hi = g.hi().to_vec();
    let pts = g.points();
    for k in 0..r {
        while lo[k] < hi[k]
            && removable(k, lo[k])
            && pts.iter().filter(|p| p[k] == lo[k]).all(|p| g.at(p) == zero)
        {
            lo[k] += 1;
        }
        while hi[k] > lo[k]
            && removable(k, hi[k] - 1)
            && removable(k, hi[k])
            && pts.iter().filter(|p| p[k] == hi[k]).all(|p| {
                let mut q = p.clone();
                q[k] -= 1;
                g.at(p) == g.at(&q)
            })
        {
            hi[k] -= 1;
        }
    }
    Grid::from_fn(lo, hi, |p| g.get(p).cloned().unwrap_or_else(|| zero.clone()))
}

impl CharCorner {
    pub fn zero(rays: Vec<usize>) -> Self {
        let r = rays.len();
        CharCorner { rays, grid: Grid::from_fn(vec![0; r], vec![0; r], |_| 0) }
    }

    /// `dim E(λ)` with the clamping convention.
    pub fn dim_at(&self, p: &[i64]) -> usize {
        self.grid.get(p).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.grid.values().iter().all(|&d| d == 0)
    }

    pub fn canonical(&self) -> Self {
        CharCorner { rays: self.rays.clone(), grid: trim_grid(&self.grid, &0, |_, _| true) }
    }

    /// The limit function on the face spanned by `keep` (global ray indices):
    /// the other coordinates go to infinity.
    pub fn restrict(&self, keep: &[usize]) -> Self {
        let pos: Vec<usize> = keep.iter().map(|k| self.rays.iter().position(|x| x == k).expect("face ray")).collect();
        let lo: Vec<i64> = pos.iter().map(|&i| self.grid.lo()[i]).collect();
        let hi: Vec<i64> = pos.iter().map(|&i| self.grid.hi()[i]).collect();
        let r = self.rays.len();
        let grid = Grid::from_fn(lo, hi, |p| {
            let mut full = vec![INF; r];
            for (j, &i) in pos.iter().enumerate() {
                full[i] = p[j];
            }
            self.dim_at(&full)
        });
        CharCorner { rays: keep.to_vec(), grid }
    }

    /// `F(λ) = E(λ + shift)`.
    pub fn shift(&self, shift: &[i64]) -> Self {
        CharCorner { rays: self.rays.clone(), grid: self.grid.shifted(shift) }
    }

    /// Largest `A` with `E(λ) = 0` unless `λ ≥ A`; `None` for the zero function.
    pub fn lower_bounds(&self) -> Option<Vec<i64>> {
        if self.is_zero() {
            return None;
        }
        let pts = self.grid.points();
        Some(
            (0..self.rays.len())
                .map(|k| pts.iter().filter(|p| *self.grid.at(p) > 0).map(|p| p[k]).min().unwrap())
                .collect(),
        )
    }

    /// Smallest `B` per coordinate such that the function is constant in that
    /// coordinate from `B` on.
    pub fn saturation(&self) -> Vec<i64> {
        let c = self.canonical();
        c.grid.hi().to_vec()
    }

    /// Re-grids onto a larger box with identical clamped reads.
    pub fn with_box(&self, lo: Vec<i64>, hi: Vec<i64>) -> Self {
        CharCorner { rays: self.rays.clone(), grid: Grid::from_fn(lo, hi, |p| self.dim_at(p)) }
    }
}

impl CharFunction {
    pub fn canonical(&self) -> Self {
        CharFunction { rank: self.rank, corners: self.corners.iter().map(CharCorner::canonical).collect() }
    }

    /// Index of the lowest maximal cone containing `nu`.
    fn carrier(&self, fan: &Fan, nu: &[usize]) -> Result<usize> {
        if !fan.is_cone(nu) {
            return Err(Error::UnknownCone(nu.to_vec()));
        }
        Ok(fan.max_cones_containing(nu)[0])
    }

    /// The limit function on a face.
    pub fn at_face(&self, fan: &Fan, nu: &[usize]) -> Result<CharCorner> {
        let i = self.carrier(fan, nu)?;
        Ok(self.corners[i].restrict(nu))
    }

    /// Twist by a line bundle given by ray coefficients.
    pub fn shift(&self, kvec: &[i64]) -> Self {
        CharFunction {
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

    /// Twist making the lower bounds on the designated cone vanish; returns the
    /// twisted function and the relation vector used.
    pub fn gauge_fix(&self, fan: &Fan) -> Result<(CharFunction, Vec<i64>)> {
        let (n, a) = self
            .corners
            .iter()
            .enumerate()
            .find_map(|(i, c)| c.lower_bounds().map(|a| (i, a)))
            .ok_or_else(|| Error::ZeroFamily("nothing to gauge-fix".into()))?;
        let u = fan.solve_on_cone(n, &a);
        let k = fan.relation(&u);
        Ok((self.shift(&k).canonical(), k))
    }

    /// Canonical text form used for deduplication.
    pub fn key(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("serializable")
    }

    pub fn to_json(&self) -> CharFunctionJson {
        let c = self.canonical();
        CharFunctionJson {
            rank: c.rank,
            cones: c
                .corners
                .iter()
                .map(|cc| CharCornerJson {
                    rays: cc.rays.clone(),
                    lower: cc.grid.lo().to_vec(),
                    upper: cc.grid.hi().to_vec(),
                    dims: cc.grid.values().to_vec(),
                })
                .collect(),
        }
    }

    pub fn from_json(j: &CharFunctionJson) -> Result<Self> {
        let mut corners = Vec::new();
        for c in &j.cones {
            let n: usize = c.lower.iter().zip(&c.upper).map(|(a, b)| (b - a + 1).max(0) as usize).product();
            if c.lower.len() != c.rays.len() || c.upper.len() != c.rays.len() || n != c.dims.len() {
                return Err(Error::Parse(format!("characteristic function on rays {:?} has inconsistent box", c.rays)));
            }
            let mut it = c.dims.iter();
            corners.push(CharCorner {
                rays: c.rays.clone(),
                grid: Grid::from_fn(c.lower.clone(), c.upper.clone(), |_| *it.next().unwrap()),
            });
        }
        Ok(CharFunction { rank: j.rank, corners })
    }

    /// Dense row-major dump per cone, for display.
    pub fn cones(&self) -> impl Iterator<Item = (&Cone, &Grid<usize>)> {
        self.corners.iter().map(|c| (&c.rays, &c.grid))
    }
}

/// Serialized characteristic function: row-major dimension arrays per cone.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CharFunctionJson {
    pub rank: usize,
    pub cones: Vec<CharCornerJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CharCornerJson {
    pub rays: Vec<usize>,
    pub lower: Vec<i64>,
    pub upper: Vec<i64>,
    pub dims: Vec<usize>,
}
