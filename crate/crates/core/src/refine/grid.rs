use num_complex::Complex64;

use crate::linalg::IVec;

/// An axis-aligned box of integer multi-indices, bounds inclusive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridBox {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

impl GridBox {
    pub fn new(lo: Vec<i64>, hi: Vec<i64>) -> Self {
        assert_eq!(lo.len(), hi.len());
        assert!(
            lo.iter().zip(&hi).all(|(a, b)| a <= b),
            "empty grid box {lo:?}..{hi:?}"
        );
        Self { lo, hi }
    }

    pub fn dimension(&self) -> usize {
        self.lo.len()
    }

    pub fn extent(&self, axis: usize) -> usize {
        (self.hi[axis] - self.lo[axis] + 1) as usize
    }

    pub fn cells(&self) -> usize {
        (0..self.dimension()).map(|a| self.extent(a)).product()
    }

    pub fn contains(&self, idx: &[i64]) -> bool {
        idx.iter()
            .enumerate()
            .all(|(a, &v)| v >= self.lo[a] && v <= self.hi[a])
    }

    /// Row-major offset of an index, `None` outside the box.
    pub fn offset(&self, idx: &[i64]) -> Option<usize> {
        if !self.contains(idx) {
            return None;
        }
        let mut off = 0usize;
        for (a, &v) in idx.iter().enumerate() {
            off = off * self.extent(a) + (v - self.lo[a]) as usize;
        }
        Some(off)
    }

    /// Iterate all indices in row-major order.
    pub fn iter(&self) -> GridIter {
        GridIter {
            grid: self.clone(),
            next: Some(self.lo.clone()),
        }
    }

    /// Smallest box containing both.
    pub fn union(&self, other: &GridBox) -> GridBox {
        GridBox::new(
            self.lo
                .iter()
                .zip(&other.lo)
                .map(|(a, b)| *a.min(b))
                .collect(),
            self.hi
                .iter()
                .zip(&other.hi)
                .map(|(a, b)| *a.max(b))
                .collect(),
        )
    }

    pub fn translated(&self, t: &IVec) -> GridBox {
        GridBox::new(
            self.lo.iter().enumerate().map(|(a, v)| v + t[a]).collect(),
            self.hi.iter().enumerate().map(|(a, v)| v + t[a]).collect(),
        )
    }

    pub fn contains_box(&self, inner: &GridBox) -> bool {
        self.contains(&inner.lo) && self.contains(&inner.hi)
    }
}

pub struct GridIter {
    grid: GridBox,
    next: Option<Vec<i64>>,
}

impl Iterator for GridIter {
    type Item = Vec<i64>;

    fn next(&mut self) -> Option<Vec<i64>> {
        let current = self.next.take()?;
        let d = self.grid.dimension();
        let mut succ = current.clone();
        let mut axis = d;
        loop {
            if axis == 0 {
                self.next = None;
                break;
            }
            axis -= 1;
            if succ[axis] < self.grid.hi[axis] {
                succ[axis] += 1;
                succ[(axis + 1)..d].copy_from_slice(&self.grid.lo[(axis + 1)..d]);
                self.next = Some(succ);
                break;
            }
        }
        Some(current)
    }
}

/// A `C^r`-valued function sampled on the level-`n` grid: the stored value
/// at index `j` and channel `i` is the average of component `i` over the
/// cell `A^{-n}(j + [0,1)^d)` (in lattice coordinates).
///
/// Averages rather than point values: indicator-type solutions of
/// refinement equations satisfy their two-scale identity only almost
/// everywhere, and uniform grids always hit the exceptional sets. Cell
/// averages ignore them, so Haar-type fixed points are exact here, and
/// integrals (Riemann sums with cell volume `|det A|^{-n} |det B|`) of
/// piecewise-constant functions are exact as well.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledVectorFunction {
    level: u32,
    channels: usize,
    grid: GridBox,
    cell_volume: f64,
    values: Vec<Complex64>,
}

impl SampledVectorFunction {
    pub fn zeros(level: u32, channels: usize, grid: GridBox, cell_volume: f64) -> Self {
        let n = grid.cells() * channels;
        Self {
            level,
            channels,
            grid,
            cell_volume,
            values: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn grid(&self) -> &GridBox {
        &self.grid
    }

    pub fn dimension(&self) -> usize {
        self.grid.dimension()
    }

    pub fn cell_volume(&self) -> f64 {
        self.cell_volume
    }

    /// Value at `(index, channel)`; zero outside the grid box.
    pub fn get(&self, idx: &[i64], channel: usize) -> Complex64 {
        match self.grid.offset(idx) {
            Some(off) => self.values[off * self.channels + channel],
            None => Complex64::new(0.0, 0.0),
        }
    }

    pub fn set(&mut self, idx: &[i64], channel: usize, value: Complex64) {
        let off = self
            .grid
            .offset(idx)
            .expect("set() index must lie in the grid box");
        self.values[off * self.channels + channel] = value;
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    /// Riemann L² norm.
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.cell_volume).sqrt()
    }

    /// Riemann L² distance; both functions must live on the same level
    /// (boxes may differ, reads outside a box are zero).
    pub fn l2_distance(&self, other: &SampledVectorFunction) -> f64 {
        assert_eq!(self.level, other.level, "l2_distance: level mismatch");
        assert_eq!(self.channels, other.channels);
        let grid = self.grid.union(&other.grid);
        let mut acc = 0.0;
        for idx in grid.iter() {
            for ch in 0..self.channels {
                acc += (self.get(&idx, ch) - other.get(&idx, ch)).norm_sqr();
            }
        }
        (acc * self.cell_volume).sqrt()
    }

    /// Riemann approximation of the integral of one channel.
    pub fn integral(&self, channel: usize) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for off in 0..self.grid.cells() {
            acc += self.values[off * self.channels + channel];
        }
        acc * self.cell_volume
    }

    /// Bounding box of the cells holding a value above `tol` in any
    /// channel, `None` when everything is (numerically) zero.
    pub fn nonzero_box(&self, tol: f64) -> Option<GridBox> {
        let d = self.dimension();
        let mut lo = vec![i64::MAX; d];
        let mut hi = vec![i64::MIN; d];
        let mut any = false;
        for (off, idx) in self.grid.iter().enumerate() {
            let row = &self.values[off * self.channels..(off + 1) * self.channels];
            if row.iter().any(|z| z.norm() > tol) {
                any = true;
                for a in 0..d {
                    lo[a] = lo[a].min(idx[a]);
                    hi[a] = hi[a].max(idx[a]);
                }
            }
        }
        any.then(|| GridBox::new(lo, hi))
    }
}
