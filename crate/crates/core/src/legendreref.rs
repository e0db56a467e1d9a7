//! Periodic piecewise integrated-Legendre basis, the comparison baseline.
//!
//! On element i the affine map x = (2θ − θ_i − θ_{i+1})/ℓ_i sends E_i to [−1, 1].
//!
//! * b = 0: Legendre polynomials P_k(x) per element, stored slot-major:
//!   degree k of element e lives at index k·M + e.
//! * b = −1: M piecewise-linear hats followed by the bubbles
//!   W_k(x) = (1 − x²) C_k^{(3/2)}(x) / ((k+1)(k+2)) = (P_k − P_{k+2}) / (2k+3);
//!   bubble k of element e lives at index (k + 1)·M + e.
//!
//! Hat e peaks at θ_e, so element e carries the left hat (1 − x)/2 (index e)
//! and the right hat (1 + x)/2 (index e + 1 mod M). Mass and weak Laplacian
//! are assembled by Gauss–Legendre quadrature, which is exact here because
//! every integrand is a polynomial in θ.

use crate::arcpoly;
use crate::error::{Error, Result};
use crate::piecewise::{gram, PiecewiseGrid};
use crate::quadrature::{gauss_legendre, legendre_all};
use crate::sparse::SparseMat;
use crate::structmat::CB3Arrowhead;
use serde::{Deserialize, Serialize};

const MAX_NODES: usize = 1 << 13;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LegendreBasis {
    pub grid: PiecewiseGrid,
    pub b: i32,
}

/// Mass, weak Laplacian (−Δ) and derivative map (b = −1 → b = 0) of one truncation.
#[derive(Clone, Debug)]
pub struct LegendreOperators {
    pub mass: SparseMat,
    pub laplacian: SparseMat,
    pub diff: SparseMat,
}

/// W_k(x) for k = 0..n−1.
pub fn bubbles(n: usize, x: f64) -> Vec<f64> {
    let p = legendre_all(n + 2, x);
    (0..n).map(|k| (p[k] - p[k + 2]) / (2 * k + 3) as f64).collect()
}

/// Legendre coefficients of the derivative of Σ c_k P_k.
pub fn legendre_derivative(c: &[f64]) -> Vec<f64> {
    let n = c.len();
    if n <= 1 {
        return vec![0.0];
    }
    let mut d = vec![0.0; n - 1];
    for k in (0..n - 1).rev() {
        let next = if k + 2 < n - 1 { d[k + 2] / (2 * k + 5) as f64 } else { 0.0 };
        d[k] = (2 * k + 1) as f64 * (c[k + 1] + next);
    }
    d
}

/// Σ c_k P_k(x).
pub fn legendre_eval(c: &[f64], x: f64) -> f64 {
    legendre_all(c.len(), x).iter().zip(c).map(|(p, v)| p * v).sum()
}

impl LegendreBasis {
    pub fn new(grid: PiecewiseGrid, b: i32) -> Result<Self> {
        if b != 0 && b != -1 {
            return Err(Error::Unsupported(format!("integrated Legendre basis with b = {b}")));
        }
        Ok(LegendreBasis { grid, b })
    }

    pub fn m(&self) -> usize {
        self.grid.m()
    }

    fn check_bm1(&self, what: &str) -> Result<()> {
        if self.b != -1 {
            return Err(Error::Unsupported(format!("{what} is defined on the b = -1 basis")));
        }
        Ok(())
    }

    /// Local coordinate x ∈ [−1, 1] of θ on element e.
    pub fn local_x(&self, e: usize, theta: f64) -> f64 {
        (2.0 * theta - self.grid.theta[e] - self.grid.theta[e + 1]) / self.grid.length(e)
    }

    /// Local Legendre coefficients of element e.
    pub fn local_legendre(&self, coeffs: &[f64], e: usize) -> Vec<f64> {
        let m = self.m();
        let nb = coeffs.len().div_ceil(m);
        let at = |i: usize| coeffs.get(i).copied().unwrap_or(0.0);
        match self.b {
            0 => (0..nb).map(|k| at(k * m + e)).collect(),
            _ => {
                let (hl, hr) = (at(e), at((e + 1) % m));
                let mut c = vec![0.0; nb + 2];
                c[0] = 0.5 * (hl + hr);
                c[1] = 0.5 * (hr - hl);
                for k in 0..nb.saturating_sub(1) {
                    let w = at((k + 1) * m + e) / (2 * k + 3) as f64;
                    c[k] += w;
                    c[k + 2] -= w;
                }
                c
            }
        }
    }

    /// Evaluate a coefficient vector at θ ∈ [−π, π].
    pub fn eval(&self, coeffs: &[f64], theta: f64) -> f64 {
        let e = self.grid.element_of(theta);
        legendre_eval(&self.local_legendre(coeffs, e), self.local_x(e, theta))
    }

    /// Evaluate the d-th θ-derivative at θ. Differentiation is exact here
    /// (piecewise polynomials), so no section parameter is needed.
    pub fn eval_derivative(&self, coeffs: &[f64], d: usize, theta: f64) -> f64 {
        let e = self.grid.element_of(theta);
        let mut c = self.local_legendre(coeffs, e);
        let scale = 2.0 / self.grid.length(e);
        for _ in 0..d {
            c = legendre_derivative(&c).into_iter().map(|v| v * scale).collect();
        }
        legendre_eval(&c, self.local_x(e, theta))
    }

    /// Legendre coefficients of f on element e from an n-point Gauss rule.
    pub fn transform_fixed_local(&self, f: &dyn Fn(f64) -> f64, e: usize, n: usize) -> Vec<f64> {
        let rule = gauss_legendre(n);
        let (a, l) = (self.grid.theta[e], self.grid.length(e));
        let mut out = vec![0.0; n];
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            let fx = w * f(a + 0.5 * l * (x + 1.0));
            for (k, p) in legendre_all(n, x).into_iter().enumerate() {
                out[k] += fx * p;
            }
        }
        for (k, v) in out.iter_mut().enumerate() {
            *v *= (2 * k + 1) as f64 / 2.0;
        }
        out
    }

    fn transform_local(&self, f: &dyn Fn(f64) -> f64, e: usize, tol: f64) -> Result<Vec<f64>> {
        let mut n = 16;
        loop {
            let c = self.transform_fixed_local(f, e, n);
            if c.iter().any(|v| !v.is_finite()) {
                return Err(Error::Domain(format!("non-finite function values on element {e}")));
            }
            // chop on L²-normalised magnitudes so the rounding floor is flat in k
            let scaled: Vec<f64> = c.iter().enumerate().map(|(k, v)| v / ((2 * k + 1) as f64).sqrt()).collect();
            if let Some(chopped) = arcpoly::chop(&scaled, tol.max(arcpoly::rounding_floor(n))) {
                return Ok(c[..chopped.len()].to_vec());
            }
            if n >= MAX_NODES {
                return Err(Error::NoConvergence {
                    element: Some(e),
                    msg: format!("Legendre transform unresolved with {MAX_NODES} nodes"),
                });
            }
            n *= 2;
        }
    }

    /// Adaptive expansion of f. For b = −1, f must be continuous and periodic.
    pub fn transform(&self, f: &dyn Fn(f64) -> f64, tol: f64) -> Result<Vec<f64>> {
        let m = self.m();
        let locals = (0..m).map(|e| self.transform_local(f, e, tol)).collect::<Result<Vec<_>>>()?;
        let len = locals.iter().map(|l| l.len()).max().unwrap_or(1);
        let mut c0 = vec![0.0; len * m];
        for (e, l) in locals.iter().enumerate() {
            for (k, v) in l.iter().enumerate() {
                c0[k * m + e] = *v;
            }
        }
        match self.b {
            0 => Ok(c0),
            _ => self.from_b0(&c0),
        }
    }

    /// Convert b = 0 coefficients of a continuous function to b = −1: hat
    /// values are endpoint averages, bubbles come from a backward recursion
    /// on the remainder.
    pub fn from_b0(&self, c0: &[f64]) -> Result<Vec<f64>> {
        self.check_bm1("conversion from b = 0")?;
        let m = self.m();
        let leg0 = LegendreBasis { grid: self.grid.clone(), b: 0 };
        let nb = c0.len().div_ceil(m).max(2);
        let mut out = vec![0.0; (nb - 1) * m];
        for e in 0..m {
            let mut g = leg0.local_legendre(c0, e);
            g.resize(nb, 0.0);
            let vr: f64 = g.iter().sum();
            let vl: f64 = g.iter().enumerate().map(|(k, v)| if k % 2 == 0 { *v } else { -*v }).sum();
            out[e] += 0.5 * vl;
            out[(e + 1) % m] += 0.5 * vr;
            g[0] -= 0.5 * (vl + vr);
            g[1] -= 0.5 * (vr - vl);
            // g_j = w_j/(2j+3) − w_{j−2}/(2j−1), solved from the top degree down
            let mut w = vec![0.0; nb + 2];
            for j in (2..nb).rev() {
                w[j - 2] = (2 * j - 1) as f64 * (w[j] / (2 * j + 3) as f64 - g[j]);
            }
            for k in 0..nb - 2 {
                out[(k + 1) * m + e] = w[k];
            }
        }
        Ok(out)
    }

    /// Connection (b = −1 → b = 0) as an exact (n + M) × n map.
    pub fn connection_rect(&self, n: usize) -> Result<SparseMat> {
        self.check_bm1("connection")?;
        let m = self.m();
        let nbub = n / m - 1;
        let mut t = vec![];
        for e in 0..m {
            let r = (e + 1) % m;
            t.extend([(e, e, 0.5), (m + e, e, -0.5), (e, r, 0.5), (m + e, r, 0.5)]);
            for k in 0..nbub {
                let s = 1.0 / (2 * k + 3) as f64;
                t.push((k * m + e, (k + 1) * m + e, s));
                t.push(((k + 2) * m + e, (k + 1) * m + e, -s));
            }
        }
        Ok(SparseMat::from_triplets(n + m, n, t))
    }

    /// θ-derivative (b = −1 → b = 0) as an exact n × n map.
    pub fn diff_rect(&self, n: usize) -> Result<SparseMat> {
        self.check_bm1("differentiation")?;
        let m = self.m();
        let nbub = n / m - 1;
        let mut t = vec![];
        for e in 0..m {
            let il = 1.0 / self.grid.length(e);
            t.push((e, e, -il));
            t.push((e, (e + 1) % m, il));
            for k in 0..nbub {
                t.push(((k + 1) * m + e, (k + 1) * m + e, -2.0 * il));
            }
        }
        Ok(SparseMat::from_triplets(n, n, t))
    }

    /// Diagonal b = 0 mass: ℓ_e / (2k + 1).
    pub fn mass_b0_diag(&self, n: usize) -> Vec<f64> {
        let m = self.m();
        (0..n).map(|i| self.grid.length(i % m) / (2 * (i / m) + 1) as f64).collect()
    }

    /// Quadrature assembly of Σ ∫ φ_a φ_b (mass) or Σ ∫ φ_a' φ_b' (stiffness)
    /// over the local b = −1 functions.
    fn assemble_quadrature(&self, n: usize, derivative: bool) -> SparseMat {
        let m = self.m();
        let nbub = n / m - 1;
        let rule = gauss_legendre(nbub + 3);
        let mut t = vec![];
        for e in 0..m {
            let l = self.grid.length(e);
            let mut idx = vec![e, (e + 1) % m];
            idx.extend((0..nbub).map(|k| (k + 1) * m + e));
            let mut local = vec![0.0; idx.len() * idx.len()];
            for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
                let vals: Vec<f64> = if derivative {
                    let p = legendre_all(nbub + 1, x);
                    let mut v = vec![-1.0 / l, 1.0 / l];
                    v.extend((0..nbub).map(|k| -2.0 / l * p[k + 1]));
                    v
                } else {
                    let mut v = vec![0.5 * (1.0 - x), 0.5 * (1.0 + x)];
                    v.extend(bubbles(nbub, x));
                    v
                };
                let jw = 0.5 * l * w;
                for a in 0..vals.len() {
                    for b in 0..vals.len() {
                        local[a * vals.len() + b] += jw * vals[a] * vals[b];
                    }
                }
            }
            for (a, &ia) in idx.iter().enumerate() {
                for (b, &ib) in idx.iter().enumerate() {
                    let v = local[a * idx.len() + b];
                    if v.abs() > 1e-300 {
                        t.push((ia, ib, v));
                    }
                }
            }
        }
        let mut s = SparseMat::from_triplets(n, n, t);
        s.prune(1e-15 * s.frobenius().max(1e-300));
        s
    }

    /// Mass matrix: diagonal for b = 0, quadrature-assembled for b = −1.
    pub fn mass(&self, n: usize) -> SparseMat {
        match self.b {
            0 => SparseMat::diag(&self.mass_b0_diag(n)),
            _ => self.assemble_quadrature(n, false),
        }
    }

    /// Weak Laplacian −Δ (stiffness), symmetric positive semidefinite.
    pub fn weak_laplacian(&self, n: usize) -> Result<SparseMat> {
        self.check_bm1("weak Laplacian")?;
        Ok(self.assemble_quadrature(n, true))
    }

    /// All three operators of an n × n truncation (n a multiple of M, ≥ 2M).
    pub fn operators(&self, n: usize) -> Result<LegendreOperators> {
        self.check_bm1("operator assembly")?;
        Ok(LegendreOperators { mass: self.mass(n), laplacian: self.weak_laplacian(n)?, diff: self.diff_rect(n)? })
    }

    /// Mass matrix in CB³ form, for the structured solver.
    pub fn mass_cb3(&self, n: usize) -> Result<CB3Arrowhead> {
        self.check_bm1("CB3 mass")?;
        CB3Arrowhead::from_sparse(&self.mass(n), self.m())
    }

    /// Weak Laplacian in CB³ form.
    pub fn laplacian_cb3(&self, n: usize) -> Result<CB3Arrowhead> {
        CB3Arrowhead::from_sparse(&self.weak_laplacian(n)?, self.m())
    }

    /// Right-hand side Rᵀ M⁽⁰⁾ f for b = 0 coefficients f, length n.
    pub fn load_vector(&self, n: usize, f0: &[f64]) -> Result<Vec<f64>> {
        let r = self.connection_rect(n)?;
        let mass = self.mass_b0_diag(r.rows);
        let mf: Vec<f64> = (0..r.rows).map(|i| mass[i] * f0.get(i).copied().unwrap_or(0.0)).collect();
        Ok(r.tmul_vec(&mf))
    }

    /// b = 0 coefficients of the d-th derivative (d ≥ 1) of a b = −1 field.
    /// Exact: the first step is the derivative map, later steps differentiate
    /// the per-element Legendre series.
    pub fn derivative_b0(&self, u: &[f64], d: usize) -> Result<Vec<f64>> {
        if d == 0 {
            return Err(Error::Domain("derivative order must be at least 1".into()));
        }
        let m = self.m();
        let n = self.grid.round_trunc(u.len());
        let mut uu = u.to_vec();
        uu.resize(n, 0.0);
        let mut out = self.diff_rect(n)?.mul_vec(&uu);
        let leg0 = LegendreBasis { grid: self.grid.clone(), b: 0 };
        for _ in 1..d {
            let nb = out.len() / m;
            let mut next = vec![0.0; out.len()];
            for e in 0..m {
                let scale = 2.0 / self.grid.length(e);
                for (k, v) in legendre_derivative(&leg0.local_legendre(&out, e)).into_iter().enumerate().take(nb) {
                    next[k * m + e] = v * scale;
                }
            }
            out = next;
        }
        Ok(out)
    }

    /// Convection operator C_ab = ∫ φ_a v φ_b' dθ (the analogue of
    /// RᵀM⁽⁰⁾J_v D), by Gauss–Legendre quadrature with `extra` nodes beyond
    /// the polynomial degree to resolve v.
    pub fn convection(&self, v: &dyn Fn(f64) -> f64, n: usize, extra: usize) -> Result<SparseMat> {
        self.check_bm1("convection")?;
        let m = self.m();
        let nbub = n / m - 1;
        let rule = gauss_legendre(nbub + 2 + extra);
        let mut t = vec![];
        for e in 0..m {
            let (a, l) = (self.grid.theta[e], self.grid.length(e));
            let mut idx = vec![e, (e + 1) % m];
            idx.extend((0..nbub).map(|k| (k + 1) * m + e));
            let k = idx.len();
            let mut local = vec![0.0; k * k];
            for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
                let p = legendre_all(nbub + 2, x);
                let mut val = vec![0.5 * (1.0 - x), 0.5 * (1.0 + x)];
                val.extend(bubbles(nbub, x));
                let mut der = vec![-1.0 / l, 1.0 / l];
                der.extend((0..nbub).map(|j| -2.0 / l * p[j + 1]));
                let jw = 0.5 * l * w * v(a + 0.5 * l * (x + 1.0));
                for i in 0..k {
                    for j in 0..k {
                        local[i * k + j] += jw * val[i] * der[j];
                    }
                }
            }
            for (i, &ii) in idx.iter().enumerate() {
                for (j, &jj) in idx.iter().enumerate() {
                    t.push((ii, jj, local[i * k + j]));
                }
            }
        }
        Ok(SparseMat::from_triplets(n, n, t))
    }

    /// Mass matrix as RᵀM⁽⁰⁾R from the closed-form connection (a cross-check
    /// of the quadrature assembly).
    pub fn mass_from_connection(&self, n: usize) -> Result<SparseMat> {
        let r = self.connection_rect(n)?;
        Ok(gram(&r, &self.mass_b0_diag(r.rows)))
    }
}
