//! Dense data on an integer box with the saturation convention used by
//! corner families: points below the box read as a default (zero) value and
//! coordinates above the box are clamped to its top layer.

/// Stand-in for an infinite coordinate; clamps to the top of any box.
pub const INF: i64 = i64::MAX / 4;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Grid<T> {
    lo: Vec<i64>,
    hi: Vec<i64>,
    data: Vec<T>,
}

impl<T: Clone> Grid<T> {
    /// Fills the box `[lo, hi]` using `f`.
    pub fn from_fn(lo: Vec<i64>, hi: Vec<i64>, mut f: impl FnMut(&[i64]) -> T) -> Self {
        assert_eq!(lo.len(), hi.len());
        assert!(lo.iter().zip(&hi).all(|(a, b)| a <= b), "empty box {lo:?}..{hi:?}");
        let pts = box_points(&lo, &hi);
        let data = pts.iter().map(|p| f(p)).collect();
        Grid { lo, hi, data }
    }

    pub fn lo(&self) -> &[i64] {
        &self.lo
    }

    pub fn hi(&self) -> &[i64] {
        &self.hi
    }

    pub fn ndim(&self) -> usize {
        self.lo.len()
    }

    fn index(&self, p: &[i64]) -> usize {
        let mut idx = 0usize;
        for ((x, lo), hi) in p.iter().zip(&self.lo).zip(&self.hi) {
            idx = idx * (hi - lo + 1) as usize + (x - lo) as usize;
        }
        idx
    }

    /// Value at a point inside the box.
    pub fn at(&self, p: &[i64]) -> &T {
        debug_assert!(self.contains(p), "{p:?} outside {:?}..{:?}", self.lo, self.hi);
        &self.data[self.index(p)]
    }

    pub fn at_mut(&mut self, p: &[i64]) -> &mut T {
        let i = self.index(p);
        &mut self.data[i]
    }

    /// Clamped value, or `None` below the box.
    pub fn get(&self, p: &[i64]) -> Option<&T> {
        if p.iter().zip(&self.lo).any(|(x, l)| x < l) {
            return None;
        }
        let c: Vec<i64> = p.iter().zip(&self.hi).map(|(x, h)| *x.min(h)).collect();
        Some(&self.data[self.index(&c)])
    }

    pub fn contains(&self, p: &[i64]) -> bool {
        p.len() == self.lo.len() && p.iter().zip(&self.lo).zip(&self.hi).all(|((x, l), h)| l <= x && x <= h)
    }

    /// Every point of the box in row-major order.
    pub fn points(&self) -> Vec<Vec<i64>> {
        box_points(&self.lo, &self.hi)
    }

    pub fn values(&self) -> &[T] {
        &self.data
    }

    /// Same data on a translated box: the value at `p` moves to `p − shift`.
    pub fn shifted(&self, shift: &[i64]) -> Self {
        Grid {
            lo: self.lo.iter().zip(shift).map(|(a, s)| a - s).collect(),
            hi: self.hi.iter().zip(shift).map(|(a, s)| a - s).collect(),
            data: self.data.clone(),
        }
    }

    pub fn map<U: Clone>(&self, f: impl FnMut(&T) -> U) -> Grid<U> {
        Grid { lo: self.lo.clone(), hi: self.hi.clone(), data: self.data.iter().map(f).collect() }
    }
}

/// All integer points of `[lo, hi]` in row-major order.
pub fn box_points(lo: &[i64], hi: &[i64]) -> Vec<Vec<i64>> {
    let r = lo.len();
    if r == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    let mut p = lo.to_vec();
    loop {
        out.push(p.clone());
        let mut k = r;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if p[k] < hi[k] {
                p[k] += 1;
                break;
            }
            p[k] = lo[k];
        }
    }
}
