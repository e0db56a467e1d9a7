//! Cyclic banded matrices, CB³-arrowhead matrices and their O(N) reverse
//! Cholesky factorisation A = LᵀL.
//!
//! A CB³-arrowhead matrix of size m(1 + p) has an m×m head block A₀, head ×
//! tail blocks B_k, tail × head blocks C_k (all cyclic banded) and a tail of
//! p×p block-banded part whose m×m blocks are diagonal. The tail is stored
//! de-interlaced: one banded p×p matrix D_i per element i.

use crate::banded::BandedOperator;
use crate::error::{Error, Result};
use crate::sparse::SparseMat;
use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Offset j − i reduced to the cyclic representative of smallest magnitude.
pub fn cyclic_offset(i: usize, j: usize, n: usize) -> isize {
    let d = j as isize - i as isize;
    let n = n as isize;
    [d, d - n, d + n].into_iter().min_by_key(|v| v.abs()).unwrap()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CyclicBanded {
    pub n: usize,
    pub lower: usize,
    pub upper: usize,
    pub mat: SparseMat,
}

impl CyclicBanded {
    /// Wrap a square sparse matrix, inferring its cyclic sub-bandwidths.
    pub fn from_sparse(mat: SparseMat) -> Self {
        assert_eq!(mat.rows, mat.cols);
        let n = mat.rows;
        let (mut lower, mut upper) = (0usize, 0usize);
        for (i, j, _) in mat.iter() {
            let d = cyclic_offset(i, j, n);
            if d < 0 {
                lower = lower.max((-d) as usize);
            } else {
                upper = upper.max(d as usize);
            }
        }
        CyclicBanded { n, lower, upper, mat }
    }

    /// Does every stored entry sit inside the declared cyclic band?
    pub fn respects_band(&self) -> bool {
        self.mat.iter().all(|(i, j, _)| {
            let d = cyclic_offset(i, j, self.n);
            (d < 0 && (-d) as usize <= self.lower) || (d >= 0 && d as usize <= self.upper)
        })
    }

    pub fn matmul(&self, other: &Self) -> Self {
        Self::from_sparse(self.mat.matmul(&other.mat))
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        self.mat.to_dense()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CB3Arrowhead {
    /// Block size (number of elements).
    pub m: usize,
    /// Number of tail blocks.
    pub p: usize,
    pub block_lower: usize,
    pub block_upper: usize,
    pub a0: CyclicBanded,
    /// Head rows × tail block k + 1.
    pub b: Vec<CyclicBanded>,
    /// Tail block k + 1 × head columns.
    pub c: Vec<CyclicBanded>,
    /// Per-element tail matrices, p×p with bandwidths (block_lower, block_upper).
    pub d: Vec<BandedOperator>,
}

impl CB3Arrowhead {
    pub fn dim(&self) -> usize {
        self.m * (1 + self.p)
    }

    /// Sub-block bandwidths (λ, μ) read off the B blocks.
    pub fn sub_bandwidths(&self) -> (usize, usize) {
        self.b.iter().fold((0, 0), |(l, u), blk| (l.max(blk.lower), u.max(blk.upper)))
    }

    pub fn identity(m: usize, p: usize) -> Self {
        Self::from_sparse(&SparseMat::identity(m * (1 + p)), m).expect("identity is CB3")
    }

    /// Split a global sparse matrix into CB³ blocks, inferring bandwidths.
    /// Errors when a tail block is not diagonal.
    pub fn from_sparse(a: &SparseMat, m: usize) -> Result<Self> {
        let n = a.rows;
        if a.cols != n || m == 0 || n % m != 0 || n < m {
            return Err(Error::Shape(format!("{}x{} is not a CB3 shape for block size {m}", a.rows, a.cols)));
        }
        let p = n / m - 1;
        let (mut bl, mut bu) = (0usize, 0usize);
        for (i, j, _) in a.iter() {
            let (bi, bj) = (i / m, j / m);
            if bi > bj {
                bl = bl.max(bi - bj);
            } else {
                bu = bu.max(bj - bi);
            }
            if bi > 0 && bj > 0 && i % m != j % m {
                return Err(Error::Shape(format!("tail block ({bi},{bj}) is not diagonal at ({i},{j})")));
            }
        }
        let mut a0 = vec![];
        let mut bt: Vec<Vec<(usize, usize, f64)>> = vec![vec![]; bu];
        let mut ct: Vec<Vec<(usize, usize, f64)>> = vec![vec![]; bl];
        let mut d: Vec<BandedOperator> = (0..m).map(|_| BandedOperator::zeros(p, p, bl as isize, bu as isize)).collect();
        for (i, j, v) in a.iter() {
            let (bi, bj) = (i / m, j / m);
            match (bi, bj) {
                (0, 0) => a0.push((i, j, v)),
                (0, k) => bt[k - 1].push((i, j % m, v)),
                (k, 0) => ct[k - 1].push((i % m, j, v)),
                (ki, kj) => d[i % m].set(ki - 1, kj - 1, v),
            }
        }
        let cb = |t: Vec<(usize, usize, f64)>| CyclicBanded::from_sparse(SparseMat::from_triplets(m, m, t));
        Ok(CB3Arrowhead {
            m,
            p,
            block_lower: bl,
            block_upper: bu,
            a0: cb(a0),
            b: bt.into_iter().map(cb).collect(),
            c: ct.into_iter().map(cb).collect(),
            d,
        })
    }

    pub fn to_sparse(&self) -> SparseMat {
        let m = self.m;
        let mut t: Vec<(usize, usize, f64)> = self.a0.mat.iter().collect();
        for (k, blk) in self.b.iter().enumerate() {
            t.extend(blk.mat.iter().map(|(i, j, v)| (i, (k + 1) * m + j, v)));
        }
        for (k, blk) in self.c.iter().enumerate() {
            t.extend(blk.mat.iter().map(|(i, j, v)| ((k + 1) * m + i, j, v)));
        }
        for (e, di) in self.d.iter().enumerate() {
            for c in 0..self.p {
                for r in di.col_range(c) {
                    let v = di.get(r, c);
                    if v != 0.0 {
                        t.push(((r + 1) * m + e, (c + 1) * m + e, v));
                    }
                }
            }
        }
        SparseMat::from_triplets(self.dim(), self.dim(), t)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        self.to_sparse().to_dense()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        self.to_sparse().mul_vec(x)
    }

    pub fn transpose(&self) -> Self {
        Self::from_sparse(&self.to_sparse().transpose(), self.m).expect("transpose keeps CB3 shape")
    }

    /// Product of two conformable CB³-arrowhead matrices. The product stays in
    /// the class when C_k of `self` or B_k of `other` is diagonal (as in RᵀMR);
    /// otherwise a tail block fills in and a shape error is returned.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if self.m != other.m || self.p != other.p {
            return Err(Error::Shape(format!(
                "CB3 shapes (m={}, p={}) and (m={}, p={}) differ",
                self.m, self.p, other.m, other.p
            )));
        }
        Self::from_sparse(&self.to_sparse().matmul(&other.to_sparse()), self.m)
    }

    /// Principal section keeping `p_new` tail blocks.
    pub fn section(&self, p_new: usize) -> Result<Self> {
        if p_new > self.p {
            return Err(Error::Shape(format!("section with {p_new} tail blocks exceeds {}", self.p)));
        }
        let n = self.m * (1 + p_new);
        let s = Self::from_sparse(&self.to_sparse().section(n, n), self.m)?;
        Ok(s)
    }

    /// Whether every block stays inside the declared bandwidths.
    pub fn respects_structure(&self) -> bool {
        let dense = self.to_dense();
        let m = self.m;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                let (bi, bj) = (i / m, j / m);
                let outside = (bi > bj && bi - bj > self.block_lower)
                    || (bj > bi && bj - bi > self.block_upper)
                    || (bi > 0 && bj > 0 && i % m != j % m);
                if outside && dense[(i, j)] != 0.0 {
                    return false;
                }
            }
        }
        self.a0.respects_band() && self.b.iter().chain(&self.c).all(|b| b.respects_band())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Random CB³(1,1;1,0) matrix with the sparsity of a piecewise connection
/// matrix: head cyclic (0, 1), B₁ diagonal, C₁ cyclic (0, 1), tridiagonal tail.
pub fn random_cb3(m: usize, p: usize, rng: &mut impl Rng) -> CB3Arrowhead {
    let n = m * (1 + p);
    let mut t = vec![];
    let mut r = || rng.random_range(-1.0..1.0);
    for i in 0..m {
        t.push((i, i, r()));
        t.push((i, (i + 1) % m, r()));
        if p >= 1 {
            t.push((i, m + i, r()));
            t.push((m + i, i, r()));
            t.push((m + i, (i + 1) % m, r()));
        }
        for k in 0..p {
            t.push((m * (k + 1) + i, m * (k + 1) + i, r()));
            if k + 1 < p {
                t.push((m * (k + 1) + i, m * (k + 2) + i, r()));
                t.push((m * (k + 2) + i, m * (k + 1) + i, r()));
            }
        }
    }
    CB3Arrowhead::from_sparse(&SparseMat::from_triplets(n, n, t), m).expect("valid pattern")
}

/// Random SPD CB³(2,2;1,0) matrix GᵀG + n·I.
pub fn random_spd_cb3(m: usize, p: usize, rng: &mut impl Rng) -> CB3Arrowhead {
    let g = random_cb3(m, p, rng).to_sparse();
    let n = g.rows;
    let a = g.transpose().matmul(&g).add_scaled(&SparseMat::identity(n), n as f64);
    CB3Arrowhead::from_sparse(&a, m).expect("product keeps CB3 shape")
}

/// Reverse Cholesky of a banded symmetric matrix given through `get(i, j)`
/// (lower half used): returns lower-banded L with A = LᵀL.
fn rev_chol_banded(
    n: usize,
    w: usize,
    get: &dyn Fn(usize, usize) -> f64,
    global: &dyn Fn(usize) -> usize,
    pivot_tol: f64,
    ops: &mut u64,
) -> Result<BandedOperator> {
    let mut l = BandedOperator::zeros(n, n, w as isize, 0);
    for j in (0..n).rev() {
        let kmax = (j + w).min(n.saturating_sub(1));
        let mut s = get(j, j);
        for k in j + 1..=kmax {
            s -= l.get(k, j).powi(2);
            *ops += 1;
        }
        if !(s > pivot_tol) {
            return Err(Error::NotPositiveDefinite { index: global(j), value: s });
        }
        let ljj = s.sqrt();
        l.set(j, j, ljj);
        for i in j.saturating_sub(w)..j {
            let mut s = get(j, i);
            for k in j + 1..=(i + w).min(n - 1) {
                s -= l.get(k, j) * l.get(k, i);
                *ops += 1;
            }
            l.set(j, i, s / ljj);
            *ops += 1;
        }
    }
    Ok(l)
}

/// Solve Lᵀ y = r in place (L lower banded).
fn solve_lt(l: &BandedOperator, r: &mut [f64]) {
    let n = l.rows;
    let w = l.lower as usize;
    for j in (0..n).rev() {
        let mut s = r[j];
        for k in j + 1..=(j + w).min(n - 1) {
            s -= l.get(k, j) * r[k];
        }
        r[j] = s / l.get(j, j);
    }
}

/// Solve L x = y in place (L lower banded).
fn solve_l(l: &BandedOperator, y: &mut [f64]) {
    let n = l.rows;
    let w = l.lower as usize;
    for i in 0..n {
        let mut s = y[i];
        for k in i.saturating_sub(w)..i {
            s -= l.get(i, k) * y[k];
        }
        y[i] = s / l.get(i, i);
    }
}

/// Coupling of one element's tail to the head: rows are the first tail
/// blocks, columns the listed head indices.
#[derive(Clone, Debug)]
struct Coupling {
    cols: Vec<usize>,
    vals: Vec<Vec<f64>>,
}

/// Head factor [[L₀₀, 0], [V, L₀]] for a cyclic banded head: the trailing
/// block (indices r..m) is banded, the first r columns are dense.
#[derive(Clone, Debug)]
struct HeadFactor {
    r: usize,
    l00: DMatrix<f64>,
    v: DMatrix<f64>,
    l0: BandedOperator,
}

#[derive(Clone, Debug)]
enum FactorKind {
    Structured { head: HeadFactor, tail: Vec<BandedOperator>, coupling: Vec<Coupling> },
    Dense(DMatrix<f64>),
}

/// A = LᵀL with L lower triangular.
#[derive(Clone, Debug)]
pub struct ReverseCholeskyFactor {
    pub m: usize,
    pub p: usize,
    /// Multiply–add count of the factorisation.
    pub ops: u64,
    kind: FactorKind,
}

fn dense_rev_chol(a: &DMatrix<f64>, pivot_tol: f64, ops: &mut u64) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let mut l = DMatrix::zeros(n, n);
    for j in (0..n).rev() {
        let mut s = a[(j, j)];
        for k in j + 1..n {
            s -= l[(k, j)] * l[(k, j)];
        }
        *ops += (n - j) as u64;
        if !(s > pivot_tol) {
            return Err(Error::NotPositiveDefinite { index: j, value: s });
        }
        let ljj = s.sqrt();
        l[(j, j)] = ljj;
        for i in 0..j {
            let mut s = a[(j, i)];
            for k in j + 1..n {
                s -= l[(k, j)] * l[(k, i)];
            }
            l[(j, i)] = s / ljj;
        }
        *ops += (j * (n - j)) as u64;
    }
    Ok(l)
}

/// Reverse Cholesky factorisation of a symmetric positive definite CB³ matrix.
pub fn reverse_cholesky(a: &CB3Arrowhead) -> Result<ReverseCholeskyFactor> {
    let (m, p) = (a.m, a.p);
    let n = a.dim();
    let sp = a.to_sparse();
    let maxdiag = (0..n).map(|i| sp.get(i, i).abs()).fold(0.0, f64::max);
    let pivot_tol = 1e-13 * maxdiag;
    let asym = sp.add_scaled(&sp.transpose(), -1.0).frobenius();
    if asym > 1e-12 * sp.frobenius().max(1e-300) {
        return Err(Error::Domain(format!("matrix is not symmetric (asymmetry {asym:e})")));
    }
    let mut ops = 0u64;
    let w = a.block_lower.max(a.block_upper);
    if m < 3 || p < 2 || w > p {
        let l = dense_rev_chol(&sp.to_dense(), pivot_tol, &mut ops)?;
        return Ok(ReverseCholeskyFactor { m, p, ops, kind: FactorKind::Dense(l) });
    }
    // Step 1: per-element tail factors.
    let mut tail = Vec::with_capacity(m);
    for i in 0..m {
        let di = &a.d[i];
        let gidx = move |k: usize| m * (k + 1) + i;
        tail.push(rev_chol_banded(p, w, &|r, c| di.get(r, c), &gidx, pivot_tol, &mut ops)?);
    }
    // Step 2: couplings M_i = L_i^{-T} (C rows of element i), nonzero only in the first w rows.
    let mut coupling = Vec::with_capacity(m);
    let mut rows_of: Vec<Vec<(usize, usize, f64)>> = vec![vec![]; m];
    for (k, blk) in a.c.iter().enumerate() {
        for (i, j, v) in blk.mat.iter() {
            rows_of[i].push((k, j, v));
        }
    }
    for i in 0..m {
        let mut cols: Vec<usize> = rows_of[i].iter().map(|&(_, j, _)| j).collect();
        cols.sort_unstable();
        cols.dedup();
        let nk = a.c.len();
        let mut vals = vec![vec![0.0; cols.len()]; nk];
        for &(k, j, v) in &rows_of[i] {
            let ci = cols.binary_search(&j).unwrap();
            vals[k][ci] += v;
        }
        let li = &tail[i];
        for k in (0..nk).rev() {
            for ci in 0..cols.len() {
                let mut s = vals[k][ci];
                for j in k + 1..nk {
                    s -= li.get(j, k) * vals[j][ci];
                    ops += 1;
                }
                vals[k][ci] = s / li.get(k, k);
            }
        }
        coupling.push(Coupling { cols, vals });
    }
    // Step 3: Schur complement of the head.
    let mut head: Vec<(usize, usize, f64)> = a.a0.mat.iter().collect();
    for cp in &coupling {
        for row in &cp.vals {
            for (x, &cx) in cp.cols.iter().zip(row) {
                for (y, &cy) in cp.cols.iter().zip(row) {
                    head.push((*x, *y, -cx * cy));
                    ops += 1;
                }
            }
        }
    }
    let head = CyclicBanded::from_sparse(SparseMat::from_triplets(m, m, head));
    // Step 4: head factor; the trailing block after removing r leading indices is banded.
    // A head whose cyclic band wraps onto itself is factored densely (r = m).
    let r = head.lower.max(head.upper);
    let r = if 2 * r + 1 >= m { m } else { r };
    let hd = head.to_dense();
    let mm = m - r;
    let l0 = rev_chol_banded(mm, r, &|i, j| hd[(i + r, j + r)], &|k| k + r, pivot_tol, &mut ops)?;
    let mut v = DMatrix::zeros(mm, r);
    for c in 0..r {
        let mut col: Vec<f64> = (0..mm).map(|i| hd[(i + r, c)]).collect();
        solve_lt(&l0, &mut col);
        ops += (mm * (r + 1)) as u64;
        for i in 0..mm {
            v[(i, c)] = col[i];
        }
    }
    let mut s00 = DMatrix::zeros(r, r);
    for i in 0..r {
        for j in 0..r {
            s00[(i, j)] = hd[(i, j)] - (0..mm).map(|k| v[(k, i)] * v[(k, j)]).sum::<f64>();
        }
    }
    ops += (r * r * mm) as u64;
    let l00 = dense_rev_chol(&s00, pivot_tol, &mut ops)?;
    Ok(ReverseCholeskyFactor {
        m,
        p,
        ops,
        kind: FactorKind::Structured { head: HeadFactor { r, l00, v, l0 }, tail, coupling },
    })
}

fn solve_dense_lt(l: &DMatrix<f64>, r: &mut [f64]) {
    let n = l.nrows();
    for j in (0..n).rev() {
        let mut s = r[j];
        for k in j + 1..n {
            s -= l[(k, j)] * r[k];
        }
        r[j] = s / l[(j, j)];
    }
}

fn solve_dense_l(l: &DMatrix<f64>, y: &mut [f64]) {
    let n = l.nrows();
    for i in 0..n {
        let mut s = y[i];
        for k in 0..i {
            s -= l[(i, k)] * y[k];
        }
        y[i] = s / l[(i, i)];
    }
}

impl ReverseCholeskyFactor {
    pub fn dim(&self) -> usize {
        self.m * (1 + self.p)
    }

    pub fn is_structured(&self) -> bool {
        matches!(self.kind, FactorKind::Structured { .. })
    }

    /// Solve A x = rhs with two triangular sweeps.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        if rhs.len() != self.dim() {
            return Err(Error::Shape(format!("rhs has length {}, expected {}", rhs.len(), self.dim())));
        }
        let (m, p) = (self.m, self.p);
        match &self.kind {
            FactorKind::Dense(l) => {
                let mut x = rhs.to_vec();
                solve_dense_lt(l, &mut x);
                solve_dense_l(l, &mut x);
                Ok(x)
            }
            FactorKind::Structured { head, tail, coupling } => {
                // Lᵀ y = rhs: tail first
                let mut yt: Vec<Vec<f64>> = (0..m)
                    .map(|i| {
                        let mut v: Vec<f64> = (0..p).map(|k| rhs[m * (k + 1) + i]).collect();
                        solve_lt(&tail[i], &mut v);
                        v
                    })
                    .collect();
                let mut yh: Vec<f64> = rhs[..m].to_vec();
                for (i, cp) in coupling.iter().enumerate() {
                    for (k, row) in cp.vals.iter().enumerate() {
                        for (&c, &x) in cp.cols.iter().zip(row) {
                            yh[c] -= x * yt[i][k];
                        }
                    }
                }
                let r = head.r;
                let mut y0 = yh[r..].to_vec();
                solve_lt(&head.l0, &mut y0);
                let mut y00: Vec<f64> =
                    (0..r).map(|c| yh[c] - (0..m - r).map(|k| head.v[(k, c)] * y0[k]).sum::<f64>()).collect();
                solve_dense_lt(&head.l00, &mut y00);
                // L x = y: head first
                solve_dense_l(&head.l00, &mut y00);
                for k in 0..m - r {
                    y0[k] -= (0..r).map(|c| head.v[(k, c)] * y00[c]).sum::<f64>();
                }
                solve_l(&head.l0, &mut y0);
                let xh: Vec<f64> = y00.into_iter().chain(y0).collect();
                let mut x = vec![0.0; self.dim()];
                x[..m].copy_from_slice(&xh);
                for (i, cp) in coupling.iter().enumerate() {
                    for (k, row) in cp.vals.iter().enumerate() {
                        yt[i][k] -= cp.cols.iter().zip(row).map(|(&c, &v)| v * xh[c]).sum::<f64>();
                    }
                    solve_l(&tail[i], &mut yt[i]);
                    for k in 0..p {
                        x[m * (k + 1) + i] = yt[i][k];
                    }
                }
                Ok(x)
            }
        }
    }

    /// The factor L as a global sparse matrix.
    pub fn l_matrix(&self) -> SparseMat {
        let (m, n) = (self.m, self.dim());
        match &self.kind {
            FactorKind::Dense(l) => SparseMat::from_dense(l),
            FactorKind::Structured { head, tail, coupling } => {
                let r = head.r;
                let mut t = vec![];
                for i in 0..r {
                    for j in 0..r {
                        t.push((i, j, head.l00[(i, j)]));
                    }
                }
                for i in 0..m - r {
                    for j in 0..r {
                        t.push((i + r, j, head.v[(i, j)]));
                    }
                }
                for j in 0..m - r {
                    for i in head.l0.col_range(j) {
                        t.push((i + r, j + r, head.l0.get(i, j)));
                    }
                }
                for (e, cp) in coupling.iter().enumerate() {
                    for (k, row) in cp.vals.iter().enumerate() {
                        for (&c, &v) in cp.cols.iter().zip(row) {
                            t.push((m * (k + 1) + e, c, v));
                        }
                    }
                }
                for (e, li) in tail.iter().enumerate() {
                    for c in 0..self.p {
                        for rr in li.col_range(c) {
                            t.push((m * (rr + 1) + e, m * (c + 1) + e, li.get(rr, c)));
                        }
                    }
                }
                SparseMat::from_triplets(n, n, t)
            }
        }
    }
}

/// Convenience: factorise and solve.
pub fn solve(a: &CB3Arrowhead, rhs: &[f64]) -> Result<Vec<f64>> {
    reverse_cholesky(a)?.solve(rhs)
}
