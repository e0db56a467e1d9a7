//! Minimal compressed-sparse-column matrices: enough for assembling the
//! global piecewise operators and forming RᵀMR-type products in O(nnz).

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseMat {
    pub rows: usize,
    pub cols: usize,
    pub colptr: Vec<usize>,
    pub rowidx: Vec<usize>,
    pub vals: Vec<f64>,
}

impl SparseMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMat { rows, cols, colptr: vec![0; cols + 1], rowidx: vec![], vals: vec![] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_triplets(n, n, (0..n).map(|i| (i, i, 1.0)))
    }

    pub fn diag(d: &[f64]) -> Self {
        let n = d.len();
        Self::from_triplets(n, n, d.iter().enumerate().map(|(i, &v)| (i, i, v)))
    }

    /// Duplicates are summed; explicit zeros are dropped.
    pub fn from_triplets(rows: usize, cols: usize, trips: impl IntoIterator<Item = (usize, usize, f64)>) -> Self {
        let mut t: Vec<(usize, usize, f64)> =
            trips.into_iter().filter(|&(i, j, _)| i < rows && j < cols).collect();
        t.sort_by(|a, b| (a.1, a.0).cmp(&(b.1, b.0)));
        let mut colptr = vec![0usize; cols + 1];
        let mut rowidx = Vec::with_capacity(t.len());
        let mut vals: Vec<f64> = Vec::with_capacity(t.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in t {
            if last == Some((i, j)) {
                *vals.last_mut().unwrap() += v;
            } else {
                rowidx.push(i);
                vals.push(v);
                colptr[j + 1] += 1;
                last = Some((i, j));
            }
        }
        for j in 0..cols {
            colptr[j + 1] += colptr[j];
        }
        let mut m = SparseMat { rows, cols, colptr, rowidx, vals };
        m.prune(0.0);
        m
    }

    pub fn from_dense(d: &DMatrix<f64>) -> Self {
        let mut t = vec![];
        for j in 0..d.ncols() {
            for i in 0..d.nrows() {
                if d[(i, j)] != 0.0 {
                    t.push((i, j, d[(i, j)]));
                }
            }
        }
        Self::from_triplets(d.nrows(), d.ncols(), t)
    }

    /// Drop entries with |v| ≤ tol.
    pub fn prune(&mut self, tol: f64) {
        let mut colptr = vec![0usize; self.cols + 1];
        let mut rowidx = Vec::with_capacity(self.rowidx.len());
        let mut vals = Vec::with_capacity(self.vals.len());
        for j in 0..self.cols {
            for k in self.colptr[j]..self.colptr[j + 1] {
                if self.vals[k].abs() > tol {
                    rowidx.push(self.rowidx[k]);
                    vals.push(self.vals[k]);
                }
            }
            colptr[j + 1] = rowidx.len();
        }
        self.colptr = colptr;
        self.rowidx = rowidx;
        self.vals = vals;
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn col(&self, j: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.colptr[j]..self.colptr[j + 1]).map(move |k| (self.rowidx[k], self.vals[k]))
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.cols).flat_map(move |j| self.col(j).map(move |(i, v)| (i, j, v)))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let s = &self.rowidx[self.colptr[j]..self.colptr[j + 1]];
        match s.binary_search(&i) {
            Ok(k) => self.vals[self.colptr[j] + k],
            Err(_) => 0.0,
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(self.cols, self.rows, self.iter().map(|(i, j, v)| (j, i, v)))
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut d = DMatrix::zeros(self.rows, self.cols);
        for (i, j, v) in self.iter() {
            d[(i, j)] += v;
        }
        d
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        let mut y = vec![0.0; self.rows];
        for j in 0..self.cols {
            let xj = x[j];
            if xj != 0.0 {
                for (i, v) in self.col(j) {
                    y[i] += v * xj;
                }
            }
        }
        y
    }

    pub fn tmul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.rows);
        (0..self.cols).map(|j| self.col(j).map(|(i, v)| v * x[i]).sum()).collect()
    }

    /// Sparse product self · other (Gustavson).
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "sparse product shape mismatch");
        let mut colptr = vec![0usize; other.cols + 1];
        let mut rowidx = vec![];
        let mut vals = vec![];
        let mut work = vec![0.0; self.rows];
        let mut mark = vec![usize::MAX; self.rows];
        let mut touched = vec![];
        for j in 0..other.cols {
            touched.clear();
            for (k, bkj) in other.col(j) {
                for (i, aik) in self.col(k) {
                    if mark[i] != j {
                        mark[i] = j;
                        work[i] = 0.0;
                        touched.push(i);
                    }
                    work[i] += aik * bkj;
                }
            }
            touched.sort_unstable();
            for &i in &touched {
                if work[i] != 0.0 {
                    rowidx.push(i);
                    vals.push(work[i]);
                }
            }
            colptr[j + 1] = rowidx.len();
        }
        SparseMat { rows: self.rows, cols: other.cols, colptr, rowidx, vals }
    }

    /// self + s·other.
    pub fn add_scaled(&self, other: &Self, s: f64) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_triplets(self.rows, self.cols, self.iter().chain(other.iter().map(|(i, j, v)| (i, j, s * v))))
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut o = self.clone();
        o.vals.iter_mut().for_each(|v| *v *= s);
        o
    }

    /// Top-left r×c section.
    pub fn section(&self, r: usize, c: usize) -> Self {
        Self::from_triplets(r, c, self.iter().filter(|&(i, j, _)| i < r && j < c))
    }

    pub fn frobenius(&self) -> f64 {
        self.vals.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}
