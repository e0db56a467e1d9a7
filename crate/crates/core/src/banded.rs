//! Banded matrices with (possibly negative) lower/upper bandwidths.
//!
//! Storage is column-major over the band: column j keeps rows
//! j − u ..= j + l. Entries outside the declared band are structurally zero,
//! which is what the densified band checks in the tests rely on.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandedOperator {
    pub rows: usize,
    pub cols: usize,
    pub lower: isize,
    pub upper: isize,
    data: Vec<f64>,
}

impl BandedOperator {
    pub fn zeros(rows: usize, cols: usize, lower: isize, upper: isize) -> Self {
        let w = (lower + upper + 1).max(0) as usize;
        BandedOperator { rows, cols, lower, upper, data: vec![0.0; w * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut b = Self::zeros(n, n, 0, 0);
        for i in 0..n {
            b.set(i, i, 1.0);
        }
        b
    }

    pub fn width(&self) -> usize {
        (self.lower + self.upper + 1).max(0) as usize
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        if i >= self.rows || j >= self.cols {
            return None;
        }
        let d = i as isize - j as isize; // row minus column
        if d < -self.upper || d > self.lower {
            return None;
        }
        Some(j * self.width() + (d + self.upper) as usize)
    }

    pub fn in_band(&self, i: usize, j: usize) -> bool {
        self.slot(i, j).is_some()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map(|s| self.data[s]).unwrap_or(0.0)
    }

    /// Set an entry; panics when (i, j) is outside the band.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let s = self
            .slot(i, j)
            .unwrap_or_else(|| panic!("({i},{j}) outside band ({},{})", self.lower, self.upper));
        self.data[s] = v;
    }

    /// Row range of column j that lies inside the band.
    pub fn col_range(&self, j: usize) -> std::ops::Range<usize> {
        let lo = (j as isize - self.upper).max(0) as usize;
        let hi = ((j as isize + self.lower + 1).max(0) as usize).min(self.rows);
        lo..hi.max(lo)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for j in 0..self.cols {
            for i in self.col_range(j) {
                m[(i, j)] = self.get(i, j);
            }
        }
        m
    }

    /// Build from a dense matrix, keeping only the declared band.
    pub fn from_dense(m: &DMatrix<f64>, lower: isize, upper: isize) -> Self {
        let mut b = Self::zeros(m.nrows(), m.ncols(), lower, upper);
        for j in 0..m.ncols() {
            for i in b.col_range(j) {
                b.set(i, j, m[(i, j)]);
            }
        }
        b
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        let mut y = vec![0.0; self.rows];
        for j in 0..self.cols {
            if x[j] == 0.0 {
                continue;
            }
            for i in self.col_range(j) {
                y[i] += self.get(i, j) * x[j];
            }
        }
        y
    }

    /// Aᵀ x.
    pub fn tmul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.rows);
        (0..self.cols).map(|j| self.col_range(j).map(|i| self.get(i, j) * x[i]).sum()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows, self.upper, self.lower);
        for j in 0..self.cols {
            for i in self.col_range(j) {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// Banded product; bandwidths add.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols, self.lower + other.lower, self.upper + other.upper);
        for j in 0..other.cols {
            for k in other.col_range(j) {
                let bkj = other.get(k, j);
                if bkj == 0.0 {
                    continue;
                }
                for i in self.col_range(k) {
                    let v = out.get(i, j) + self.get(i, k) * bkj;
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut o = self.clone();
        o.data.iter_mut().for_each(|v| *v *= s);
        o
    }

    /// Top-left r×c section (structure metadata preserved).
    pub fn section(&self, r: usize, c: usize) -> Self {
        let mut o = Self::zeros(r, c, self.lower, self.upper);
        for j in 0..c.min(self.cols) {
            for i in o.col_range(j) {
                if i < self.rows {
                    o.set(i, j, self.get(i, j));
                }
            }
        }
        o
    }

    /// Solve U x = y for square upper-banded U (lower ≤ 0) by back-substitution.
    pub fn solve_upper(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(self.rows, self.cols);
        assert!(self.lower <= 0, "solve_upper needs an upper-banded matrix");
        let n = self.rows;
        let mut x = y.to_vec();
        for j in (0..n).rev() {
            x[j] /= self.get(j, j);
            let xj = x[j];
            for i in self.col_range(j) {
                if i < j {
                    x[i] -= self.get(i, j) * xj;
                }
            }
        }
        x
    }

    /// Largest |entry| outside (lower, upper) in a dense matrix; used by band checks.
    pub fn off_band_max(m: &DMatrix<f64>, lower: isize, upper: isize) -> f64 {
        let mut worst: f64 = 0.0;
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                let d = i as isize - j as isize;
                if d > lower || d < -upper {
                    worst = worst.max(m[(i, j)].abs());
                }
            }
        }
        worst
    }
}
