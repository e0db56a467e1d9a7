//! Periodic piecewise arc bases on a grid −π = θ₁ < … < θ_{M+1} = π.
//!
//! On element i the local coordinate is the translation a = θ − (θ_i + θ_{i+1})/2,
//! so each element is an arc of half-angle φ_i = ℓ_i/2.
//!
//! * b = 0: per-element arc polynomials, stored slot-major: local slot s of
//!   element e lives at index s·M + e (slot 0 = p₀, 1 = q₁, 2 = p₁, …).
//! * b = −1: M trigonometric hat functions followed by bubbles; the bubble
//!   with local slot k ≥ 2 of element e lives at index (k − 1)·M + e.
//!
//! Hat e peaks at θ_e, so element e carries the left hat e and the right hat
//! e + 1 (mod M). On an element the two hats are ½(1 ∓ sin a / sin φ).

use crate::arcpoly::{self, ArcBasis};
use crate::banded::BandedOperator;
use crate::error::{Error, Result};
use crate::multop;
use crate::sparse::SparseMat;
use crate::structmat::CB3Arrowhead;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseGrid {
    /// Breakpoints θ₁ … θ_{M+1}.
    pub theta: Vec<f64>,
}

impl PiecewiseGrid {
    /// Validate and build a grid from its breakpoints.
    pub fn new(mut theta: Vec<f64>) -> Result<Self> {
        if theta.len() < 3 {
            return Err(Error::Domain("a periodic grid needs at least two elements".into()));
        }
        let n = theta.len();
        if (theta[0] + PI).abs() > 1e-6 || (theta[n - 1] - PI).abs() > 1e-6 {
            return Err(Error::Domain(format!(
                "grid must run from -pi to pi, got [{}, {}]",
                theta[0],
                theta[n - 1]
            )));
        }
        theta[0] = -PI;
        theta[n - 1] = PI;
        for i in 0..n - 1 {
            let l = theta[i + 1] - theta[i];
            if !(l > 0.0) {
                return Err(Error::Domain(format!("breakpoints not strictly increasing at {i}")));
            }
            if l > PI + 1e-12 {
                return Err(Error::Domain(format!("element {i} has length {l} > pi")));
            }
        }
        Ok(PiecewiseGrid { theta })
    }

    /// `points` equally spaced breakpoints (points − 1 elements).
    pub fn uniform(points: usize) -> Result<Self> {
        if points < 3 {
            return Err(Error::Domain("uniform grid needs at least 3 points".into()));
        }
        let m = points - 1;
        Self::new((0..=m).map(|i| -PI + 2.0 * PI * i as f64 / m as f64).collect())
    }

    /// Parse `uniform:k`, a comma-separated list of breakpoints, or a path to
    /// a JSON file holding a list of breakpoints.
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        if let Some(k) = spec.strip_prefix("uniform:") {
            let k: usize = k.trim().parse().map_err(|_| Error::Config(format!("bad uniform grid '{spec}'")))?;
            return Self::uniform(k);
        }
        if std::path::Path::new(spec).is_file() {
            let text = std::fs::read_to_string(spec)?;
            let pts: Vec<f64> = serde_json::from_str(&text)?;
            return Self::new(pts);
        }
        let pts: std::result::Result<Vec<f64>, _> = spec.split(',').map(|s| s.trim().parse::<f64>()).collect();
        Self::new(pts.map_err(|_| Error::Config(format!("cannot parse grid '{spec}'")))?)
    }

    /// Number of elements M.
    pub fn m(&self) -> usize {
        self.theta.len() - 1
    }

    pub fn length(&self, i: usize) -> f64 {
        self.theta[i + 1] - self.theta[i]
    }

    pub fn center(&self, i: usize) -> f64 {
        0.5 * (self.theta[i] + self.theta[i + 1])
    }

    pub fn half_angle(&self, i: usize) -> f64 {
        0.5 * self.length(i)
    }

    /// Arc basis (with parameter b) describing element i.
    pub fn arc(&self, i: usize, b: i32) -> Result<ArcBasis> {
        ArcBasis::from_half_angle(b, self.half_angle(i))
    }

    /// Element containing θ: θ_i belongs to element i, θ = π to the last.
    pub fn element_of(&self, theta: f64) -> usize {
        let k = self.theta.partition_point(|&t| t <= theta);
        k.saturating_sub(1).min(self.m() - 1)
    }

    /// Hat function peaking at breakpoint i (0-based), written in global θ.
    pub fn hat_eval(&self, i: usize, theta: f64) -> f64 {
        let m = self.m();
        let e = self.element_of(theta);
        // ½(1 ± sin(c − θ)/sin(ℓ/2)), c the element centre; stable up to ℓ = π
        let slope = |k: usize| (self.center(k) - theta).sin() / (0.5 * self.length(k)).sin();
        if e == i {
            0.5 * (1.0 + slope(e))
        } else if (e + 1) % m == i {
            0.5 * (1.0 - slope(e))
        } else {
            0.0
        }
    }

    /// Round a truncation size up to a multiple of M with at least two blocks.
    pub fn round_trunc(&self, n: usize) -> usize {
        let m = self.m();
        n.div_ceil(m).max(2) * m
    }
}

/// A periodic piecewise arc basis with b ∈ {−1, 0}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseBasis {
    pub grid: PiecewiseGrid,
    pub b: i32,
}

impl PiecewiseBasis {
    pub fn new(grid: PiecewiseGrid, b: i32) -> Result<Self> {
        if b != 0 && b != -1 {
            return Err(Error::Unsupported(format!("piecewise basis with b = {b}")));
        }
        Ok(PiecewiseBasis { grid, b })
    }

    pub fn m(&self) -> usize {
        self.grid.m()
    }

    /// Local coefficients (in this basis' local arc family) of element e.
    /// For b = −1 the first two local slots are rebuilt from the hats.
    pub fn local_coeffs(&self, coeffs: &[f64], e: usize) -> Vec<f64> {
        let m = self.m();
        let nb = coeffs.len().div_ceil(m);
        match self.b {
            0 => (0..nb).map(|s| coeffs.get(s * m + e).copied().unwrap_or(0.0)).collect(),
            _ => {
                let hl = coeffs.get(e).copied().unwrap_or(0.0);
                let hr = coeffs.get((e + 1) % m).copied().unwrap_or(0.0);
                let sphi = self.grid.half_angle(e).sin();
                let mut loc = vec![0.5 * (hl + hr), (hr - hl) / (2.0 * sphi)];
                loc.extend((1..nb).map(|k| coeffs.get(k * m + e).copied().unwrap_or(0.0)));
                loc
            }
        }
    }

    /// Evaluate a coefficient vector at θ ∈ [−π, π].
    pub fn eval(&self, coeffs: &[f64], theta: f64) -> Result<f64> {
        let e = self.grid.element_of(theta);
        let a = theta - self.grid.center(e);
        self.grid.arc(e, self.b)?.eval(&self.local_coeffs(coeffs, e), a)
    }

    /// Scatter per-element local vectors into the global layout (inverse of
    /// `local_coeffs`). For b = −1 the hat value at each breakpoint is the
    /// average of the estimates from its two elements.
    pub fn assemble(&self, locals: &[Vec<f64>]) -> Vec<f64> {
        let m = self.m();
        let lmax = locals.iter().map(|l| l.len()).max().unwrap_or(1).max(1);
        match self.b {
            0 => {
                let mut out = vec![0.0; lmax * m];
                for (e, l) in locals.iter().enumerate() {
                    for (s, v) in l.iter().enumerate() {
                        out[s * m + e] = *v;
                    }
                }
                out
            }
            _ => {
                let nb = lmax.max(2) - 1;
                let mut out = vec![0.0; nb * m];
                for (e, l) in locals.iter().enumerate() {
                    let r0 = l.first().copied().unwrap_or(0.0);
                    let r1 = l.get(1).copied().unwrap_or(0.0);
                    let sphi = self.grid.half_angle(e).sin();
                    out[e] += 0.5 * (r0 - sphi * r1);
                    out[(e + 1) % m] += 0.5 * (r0 + sphi * r1);
                    for k in 2..l.len() {
                        out[(k - 1) * m + e] = l[k];
                    }
                }
                out
            }
        }
    }

    /// Adaptive expansion of f (given in global θ). For b = 0, f may jump at
    /// breakpoints; for b = −1 it must be continuous and periodic.
    pub fn transform(&self, f: &dyn Fn(f64) -> f64, tol: f64) -> Result<Vec<f64>> {
        let locals = self.transform_locals(f, tol)?;
        Ok(self.assemble(&locals))
    }

    fn transform_locals(&self, f: &dyn Fn(f64) -> f64, tol: f64) -> Result<Vec<Vec<f64>>> {
        (0..self.m())
            .map(|e| {
                let c = self.grid.center(e);
                let arc = self.grid.arc(e, self.b)?;
                arc.transform(&|a| f(a + c), tol).map_err(|err| match err {
                    Error::NoConvergence { msg, .. } => Error::NoConvergence { element: Some(e), msg },
                    other => other,
                })
            })
            .collect()
    }

    /// Exact finite expansion of a₀ + Σ a_n cos nθ + b_n sin nθ.
    pub fn trig_exact_expand(&self, a0: f64, a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
        let big_n = a.len().max(b.len());
        let mut locals = vec![];
        for e in 0..self.m() {
            let c = self.grid.center(e);
            // f(a + c) re-expressed in the local variable a
            let (mut la, mut lb) = (vec![0.0; big_n], vec![0.0; big_n]);
            for n in 1..=big_n {
                let an = a.get(n - 1).copied().unwrap_or(0.0);
                let bn = b.get(n - 1).copied().unwrap_or(0.0);
                let (s, co) = (n as f64 * c).sin_cos();
                la[n - 1] = an * co + bn * s;
                lb[n - 1] = bn * co - an * s;
            }
            let arc = self.grid.arc(e, 0)?;
            let c0 = arc.trig_coeffs(a0, &la, &lb)?;
            locals.push(if self.b == 0 { c0 } else { arc.with_b(-1).lower_from_b0(&c0)? });
        }
        Ok(self.assemble(&locals))
    }

    /// Map global (−1) coefficients to b = 0 coefficients through per-element
    /// local operators X_e: local (−1) → local (0). The output keeps
    /// `extra_slots` more local slots than the input so nothing is lost at the
    /// truncation edge.
    fn assemble_operator(
        &self,
        n: usize,
        extra_slots: usize,
        local: &dyn Fn(&ArcBasis, usize, usize) -> Result<BandedOperator>,
    ) -> Result<SparseMat> {
        let m = self.m();
        let nb = n / m; // hats + nb − 1 bubble slots ⇒ local slots 0..=nb
        let nloc = nb + 1;
        let rows = (nloc + extra_slots) * m;
        let mut t = vec![];
        for e in 0..m {
            let arc = self.grid.arc(e, -1)?;
            let x = local(&arc, nloc + extra_slots, nloc)?;
            let sphi = self.grid.half_angle(e).sin();
            let right = (e + 1) % m;
            for k in 0..nloc {
                for s in x.col_range(k) {
                    let v = x.get(s, k);
                    if v == 0.0 {
                        continue;
                    }
                    let row = s * m + e;
                    match k {
                        0 => {
                            t.push((row, e, 0.5 * v));
                            t.push((row, right, 0.5 * v));
                        }
                        1 => {
                            t.push((row, e, -v / (2.0 * sphi)));
                            t.push((row, right, v / (2.0 * sphi)));
                        }
                        _ => t.push((row, (k - 1) * m + e, v)),
                    }
                }
            }
        }
        Ok(SparseMat::from_triplets(rows, n, t))
    }

    fn check_bm1(&self, what: &str) -> Result<()> {
        if self.b != -1 {
            return Err(Error::Unsupported(format!("{what} is defined on the b = -1 basis")));
        }
        Ok(())
    }

    /// Connection R_{(−1)}^{(0)} as an exact (n + M) × n map from (−1) to
    /// b = 0 coefficients (R is (0, 2)-banded locally).
    pub fn connection_rect(&self, n: usize) -> Result<SparseMat> {
        self.check_bm1("connection")?;
        self.assemble_operator(n, 0, &|arc, r, c| Ok(arc.connection(r + 2)?.section(r, c)))
    }

    /// Derivative D_{(−1)}^{(0)} as an exact (n + 2M) × n map from (−1)
    /// coefficients to b = 0 coefficients of d/dθ (one slot of spill-over).
    pub fn diff_rect(&self, n: usize) -> Result<SparseMat> {
        self.check_bm1("differentiation")?;
        self.assemble_operator(n, 1, &|arc, r, c| Ok(arc.diff(r + 4)?.section(r, c)))
    }

    /// Principal n×n section of R_{(−1)}^{(0)} as a CB³ matrix.
    pub fn connection(&self, n: usize) -> Result<CB3Arrowhead> {
        let r = self.connection_rect(n)?;
        CB3Arrowhead::from_sparse(&r.section(n, n), self.m())
    }

    /// Principal n×n section of D_{(−1)}^{(0)} as a CB³ matrix.
    pub fn diff(&self, n: usize) -> Result<CB3Arrowhead> {
        let d = self.diff_rect(n)?;
        CB3Arrowhead::from_sparse(&d.section(n, n), self.m())
    }

    /// Diagonal b = 0 mass matrix of size n (slot-major).
    pub fn mass_b0_diag(&self, n: usize) -> Result<Vec<f64>> {
        let m = self.m();
        let mut out = vec![0.0; n];
        for e in 0..m {
            let arc = self.grid.arc(e, 0)?;
            let (mp, mq) = (arc.m_p(), arc.m_q());
            for s in 0..n.div_ceil(m) {
                if s * m + e < n {
                    out[s * m + e] = if s % 2 == 0 { mp } else { mq };
                }
            }
        }
        Ok(out)
    }

    /// Mass matrix: diagonal for b = 0, RᵀM⁽⁰⁾R as CB³ for b = −1.
    pub fn mass(&self, n: usize) -> Result<SparseMat> {
        match self.b {
            0 => Ok(SparseMat::diag(&self.mass_b0_diag(n)?)),
            _ => {
                let r = self.connection_rect(n)?;
                Ok(gram(&r, &self.mass_b0_diag(r.rows)?))
            }
        }
    }

    /// Mass matrix of the b = −1 basis in CB³ form.
    pub fn mass_cb3(&self, n: usize) -> Result<CB3Arrowhead> {
        self.check_bm1("CB3 mass")?;
        CB3Arrowhead::from_sparse(&self.mass(n)?, self.m())
    }

    /// −Δ = DᵀM⁽⁰⁾D, symmetric positive semidefinite.
    pub fn weak_laplacian(&self, n: usize) -> Result<CB3Arrowhead> {
        let d = self.diff_rect(n)?;
        CB3Arrowhead::from_sparse(&gram(&d, &self.mass_b0_diag(d.rows)?), self.m())
    }

    /// Right-hand side Rᵀ M⁽⁰⁾ f for b = 0 coefficients f, length n.
    pub fn load_vector(&self, n: usize, f0: &[f64]) -> Result<Vec<f64>> {
        let r = self.connection_rect(n)?;
        let mass = self.mass_b0_diag(r.rows)?;
        let mf: Vec<f64> = (0..r.rows).map(|i| mass[i] * f0.get(i).copied().unwrap_or(0.0)).collect();
        Ok(r.tmul_vec(&mf))
    }

    /// Convert continuous b = 0 coefficients to b = −1 by per-element
    /// back-substitution through the local connection matrices.
    pub fn from_b0(&self, c0: &[f64]) -> Result<Vec<f64>> {
        self.check_bm1("conversion from b = 0")?;
        let b0 = PiecewiseBasis { grid: self.grid.clone(), b: 0 };
        let locals: Result<Vec<_>> = (0..self.m())
            .map(|e| {
                let loc = b0.local_coeffs(c0, e);
                self.grid.arc(e, -1)?.lower_from_b0(&loc)
            })
            .collect();
        Ok(self.assemble(&locals?))
    }

    /// Multiplication by a(θ) in the b = 0 basis: block-diagonal over elements,
    /// n×n (slot-major). The per-element expansions of a are computed
    /// adaptively.
    pub fn mult(&self, a: &dyn Fn(f64) -> f64, n: usize) -> Result<SparseMat> {
        if self.b != 0 {
            return Err(Error::Unsupported("multiplication matrices are built in the b = 0 basis".into()));
        }
        let m = self.m();
        let nloc = n.div_ceil(m);
        let mut t = vec![];
        for e in 0..m {
            let c = self.grid.center(e);
            let arc = self.grid.arc(e, 0)?;
            let ac = arc.transform(&|x| a(x + c), arcpoly::DEFAULT_TOL).map_err(|err| match err {
                Error::NoConvergence { msg, .. } => Error::NoConvergence { element: Some(e), msg },
                other => other,
            })?;
            let ja = multop::multiplication_matrix(&arc, &ac, nloc)?;
            for j in 0..nloc {
                for i in ja.col_range(j) {
                    let v = ja.get(i, j);
                    let (gi, gj) = (i * m + e, j * m + e);
                    if v != 0.0 && gi < n && gj < n {
                        t.push((gi, gj, v));
                    }
                }
            }
        }
        Ok(SparseMat::from_triplets(n, n, t))
    }

    /// b = 0 coefficients of the d-th derivative (d ≥ 1) of a b = −1 field,
    /// via D (R⁻¹ D)^{d−1}. Intermediate results are cut to `section`
    /// coefficients before each R⁻¹.
    pub fn derivative_b0(&self, u: &[f64], d: usize, section: usize) -> Result<Vec<f64>> {
        self.check_bm1("derivative reconstruction")?;
        if d == 0 {
            return Err(Error::Domain("derivative order must be at least 1".into()));
        }
        let mut cur = u.to_vec();
        let mut out = vec![];
        for step in 0..d {
            let n = self.grid.round_trunc(cur.len());
            cur.resize(n, 0.0);
            out = self.diff_rect(n)?.mul_vec(&cur);
            if step + 1 < d {
                let keep = self.grid.round_trunc(section).min(out.len());
                out.truncate(keep);
                cur = self.from_b0(&out)?;
            }
        }
        Ok(out)
    }

    /// Evaluate the d-th derivative of a b = −1 field at θ.
    pub fn eval_derivative(&self, u: &[f64], d: usize, section: usize, theta: f64) -> Result<f64> {
        if d == 0 {
            return self.eval(u, theta);
        }
        let c = self.derivative_b0(u, d, section)?;
        PiecewiseBasis { grid: self.grid.clone(), b: 0 }.eval(&c, theta)
    }
}

/// XᵀWX for a diagonal weight W.
pub fn gram(x: &SparseMat, w: &[f64]) -> SparseMat {
    let wx = SparseMat::diag(w).matmul(x);
    x.transpose().matmul(&wx)
}

/// Count of entries with magnitude above tol.
pub fn significant(c: &[f64], tol: f64) -> usize {
    c.iter().filter(|v| v.abs() > tol).count()
}
