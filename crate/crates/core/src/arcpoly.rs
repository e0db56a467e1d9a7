//! Orthogonal polynomials on the arc {(cos θ, sin θ) : |θ| ≤ φ}, h = cos φ.
//!
//! With σ = (1 − cos θ)/(1 − h) ∈ [0, 1] and τ = 2/(1 − h),
//!
//!   p_n(θ) = P_n^{τ,(−1/2,b,−1/2)}(σ),   q_n(θ) = sin θ · P_{n−1}^{τ,(1/2,b,1/2)}(σ).
//!
//! Coefficient vectors are interlaced: index 0 is p_0, index 2n−1 is q_n and
//! index 2n is p_n.

use crate::banded::BandedOperator;
use crate::error::{Error, Result};
use crate::semijacobi::{self, family, Family, QuadratureRule, WeightParams};
use once_cell::sync::Lazy;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

/// Interlaced slot of p_n.
pub fn idx_p(n: usize) -> usize {
    2 * n
}

/// Interlaced slot of q_n (n ≥ 1).
pub fn idx_q(n: usize) -> usize {
    2 * n - 1
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArcBasis {
    pub b: i32,
    pub h: f64,
    pub phi: f64,
    pub tau: f64,
}

/// Default tolerance for the adaptive transform's chop rule.
pub const DEFAULT_TOL: f64 = 1e-14;
/// Largest number of Radau nodes the adaptive transform will try.
pub const MAX_NODES: usize = 4096;

impl ArcBasis {
    pub fn new(b: i32, h: f64) -> Result<Self> {
        if !(-1..=1).contains(&b) {
            return Err(Error::Domain(format!("arc basis parameter b = {b} must be -1, 0 or 1")));
        }
        if !(h.is_finite() && h.abs() < 1.0) {
            return Err(Error::Domain(format!("arc parameter h = {h} must satisfy |h| < 1")));
        }
        let tau = 2.0 / (1.0 - h);
        if tau < 1.0 + 1e-12 {
            return Err(Error::Domain(format!("arc too long: tau = {tau}")));
        }
        Ok(ArcBasis { b, h, phi: h.acos(), tau })
    }

    /// Arc of half-angle φ.
    pub fn from_half_angle(b: i32, phi: f64) -> Result<Self> {
        let mut a = Self::new(b, phi.cos())?;
        a.phi = phi;
        // 1 − cos φ without cancellation for short arcs
        a.tau = 1.0 / (phi / 2.0).sin().powi(2);
        Ok(a)
    }

    pub fn with_b(&self, b: i32) -> Self {
        ArcBasis { b, ..*self }
    }

    /// 1 − h, computed from φ.
    pub fn one_minus_h(&self) -> f64 {
        2.0 / self.tau
    }

    pub fn params_p(&self) -> WeightParams {
        WeightParams { t: self.tau, a: -0.5, b: self.b as f64, c: -0.5 }
    }

    pub fn params_q(&self) -> WeightParams {
        WeightParams { t: self.tau, a: 0.5, b: self.b as f64, c: 0.5 }
    }

    pub fn fam_p(&self, len: usize) -> Result<Arc<Family>> {
        family(&self.params_p(), len)
    }

    pub fn fam_q(&self, len: usize) -> Result<Arc<Family>> {
        family(&self.params_q(), len)
    }

    pub fn sigma(&self, theta: f64) -> f64 {
        (theta / 2.0).sin().powi(2) * self.tau
    }

    /// θ ≥ 0 with σ(θ) = ξ.
    pub fn theta_of_sigma(&self, xi: f64) -> f64 {
        2.0 * (xi / self.tau).sqrt().min(1.0).asin()
    }

    /// Σ coeffs_k P_k(θ) (interlaced coefficients).
    pub fn eval(&self, coeffs: &[f64], theta: f64) -> Result<f64> {
        let (fp, fq) = split(coeffs);
        let s = self.sigma(theta);
        let mut v = self.fam_p(fp.len() + 1)?.rc.evaluate(&fp, s);
        if !fq.is_empty() {
            v += theta.sin() * self.fam_q(fq.len() + 1)?.rc.evaluate(&fq, s);
        }
        Ok(v)
    }

    /// Values of the first `n` interlaced basis functions at θ.
    pub fn basis_values(&self, n: usize, theta: f64) -> Result<Vec<f64>> {
        let np = n.div_ceil(2);
        let nq = n / 2;
        let s = self.sigma(theta);
        let vp = self.fam_p(np + 1)?.rc.eval_all(np, s);
        let vq = self.fam_q(nq + 1)?.rc.eval_all(nq, s);
        let y = theta.sin();
        Ok((0..n).map(|k| if k % 2 == 0 { vp[k / 2] } else { y * vq[k / 2] }).collect())
    }

    /// R with P^{(b)} = P^{(b+1)} R, n×n, (0, 2)-banded.
    pub fn connection(&self, n: usize) -> Result<BandedOperator> {
        if self.b > 0 {
            return Err(Error::Unsupported("arc connection from b = 1".into()));
        }
        let up = self.with_b(self.b + 1);
        let m = n / 2 + 2;
        let rp = semijacobi::connection_matrix(&self.params_p(), &up.params_p(), m)?;
        let rq = semijacobi::connection_matrix(&self.params_q(), &up.params_q(), m)?;
        let mut r = BandedOperator::zeros(n, n, 0, 2);
        for col in 0..n {
            if col % 2 == 0 {
                let k = col / 2;
                r.set(col, col, rp.get(k, k));
                if k > 0 {
                    r.set(col - 2, col, rp.get(k - 1, k));
                }
            } else {
                let k = col / 2; // q_{k+1} ↔ P⁺_k
                r.set(col, col, rq.get(k, k));
                if k > 0 {
                    r.set(col - 2, col, rq.get(k - 1, k));
                }
            }
        }
        Ok(r)
    }

    /// D with d/dθ P^{(b)} = P^{(b+1)} D, n×n, (1, 3)-banded.
    pub fn diff(&self, n: usize) -> Result<BandedOperator> {
        if self.b > 0 {
            return Err(Error::Unsupported("arc derivative from b = 1".into()));
        }
        let omh = self.one_minus_h();
        let up = self.with_b(self.b + 1);
        let m = n / 2 + 3;
        let dp = semijacobi::derivative_matrix(&self.params_p(), m)?;
        let src_q = self.fam_q(m + 2)?;
        let dst_p = up.fam_p(m + 2)?;
        let (qa, pa, pb) = (&src_q.rc.a, &dst_p.rc.a, &dst_p.rc.b);
        let qb = &src_q.rc.b;
        let mut d = BandedOperator::zeros(n, n, 1, 3);
        // p_k columns: q rows
        for k in 1..m {
            let col = idx_p(k);
            if col >= n {
                break;
            }
            d.set(idx_q(k), col, dp.get(k - 1, k) / omh);
            if k >= 2 {
                d.set(idx_q(k - 1), col, dp.get(k - 2, k) / omh);
            }
        }
        // q_k columns: p rows
        let (mut u, mut hh, mut kk) = (pb[0], -pa[0], -pa[0]);
        for k in 1..m {
            let kf = k as f64;
            let col = idx_q(k);
            if col >= n {
                break;
            }
            let a_k = -omh * kf * u;
            let b_k = u / pb[k - 1] * ((2.0 * kf - 1.0) + omh * hh);
            if idx_p(k) < n {
                d.set(idx_p(k), col, a_k);
            }
            d.set(idx_p(k - 1), col, b_k);
            hh += kk + kf * (qa[k - 1] - pa[k]) - pa[k];
            kk += qa[k - 1] - pa[k];
            u *= pb[k] / qb[k - 1];
        }
        Ok(d)
    }

    /// ∫ p_n² dθ = 4 arccsc(√τ).
    pub fn m_p(&self) -> f64 {
        4.0 * (1.0 / self.tau.sqrt()).asin()
    }

    /// ∫ q_n² dθ (b = 0).
    pub fn m_q(&self) -> f64 {
        let t = self.tau;
        let omh = self.one_minus_h();
        omh * omh * (t * t * (1.0 / t.sqrt()).asin() + (2.0 - t) * (t - 1.0).sqrt()) / 2.0
    }

    /// Mass matrix of the first n basis functions.
    pub fn mass(&self, n: usize) -> Result<BandedOperator> {
        match self.b {
            0 => {
                let mut m = BandedOperator::zeros(n, n, 0, 0);
                let (mp, mq) = (self.m_p(), self.m_q());
                for k in 0..n {
                    m.set(k, k, if k % 2 == 0 { mp } else { mq });
                }
                Ok(m)
            }
            -1 => {
                let r = self.connection(n)?;
                let m0 = self.with_b(0).mass(n)?;
                Ok(r.transpose().matmul(&m0).matmul(&r))
            }
            _ => Err(Error::Unsupported("mass matrix for b = 1".into())),
        }
    }

    /// Gauss–Radau rule in σ for the (−1/2, 0, −1/2) weight, pinned at σ = 0.
    pub fn radau(&self, n: usize) -> Result<Arc<QuadratureRule>> {
        static CACHE: Lazy<Mutex<HashMap<(u64, usize), Arc<QuadratureRule>>>> =
            Lazy::new(|| Mutex::new(HashMap::new()));
        let key = (self.tau.to_bits(), n);
        if let Some(r) = CACHE.lock().unwrap().get(&key) {
            return Ok(r.clone());
        }
        let rule = Arc::new(semijacobi::gauss_radau_at(&self.with_b(0).params_p(), n, 0.0)?);
        CACHE.lock().unwrap().insert(key, rule.clone());
        Ok(rule)
    }

    /// Interpolating transform with n Radau nodes: 2n − 1 coefficients in
    /// the b = 0 basis.
    pub fn transform_fixed_b0(&self, f: &dyn Fn(f64) -> f64, n: usize) -> Result<Vec<f64>> {
        let base = self.with_b(0);
        let rule = base.radau(n)?;
        let fp = base.fam_p(n + 1)?;
        let fq = base.fam_q(n + 1)?;
        let (mp, mq) = (base.m_p(), base.m_q());
        let mut out = vec![0.0; 2 * n - 1];
        for (&xi, &w) in rule.nodes.iter().zip(&rule.weights) {
            let th = self.theta_of_sigma(xi);
            let (fpl, fmi) = if th == 0.0 { (f(0.0), f(0.0)) } else { (f(th), f(-th)) };
            let even = w * (fpl + fmi) / mp;
            let pv = fp.rc.eval_all(n, xi);
            for k in 0..n {
                out[idx_p(k)] += even * pv[k];
            }
            if th != 0.0 {
                let odd = w * (fpl - fmi) * th.sin() / mq;
                let qv = fq.rc.eval_all(n - 1, xi);
                for k in 1..n {
                    out[idx_q(k)] += odd * qv[k - 1];
                }
            }
        }
        Ok(out)
    }

    /// Adaptive transform: doubles the node count until the trailing
    /// eighth of the coefficients falls below tol · max, then chops.
    pub fn transform(&self, f: &dyn Fn(f64) -> f64, tol: f64) -> Result<Vec<f64>> {
        let mut n = 16;
        loop {
            let c = self.transform_fixed_b0(f, n)?;
            if c.iter().any(|v| !v.is_finite()) {
                return Err(Error::Domain("non-finite function values in arc transform".into()));
            }
            if let Some(chopped) = chop(&c, tol.max(rounding_floor(n))) {
                return if self.b == 0 { Ok(chopped) } else { self.lower_from_b0(&chopped) };
            }
            if n >= MAX_NODES {
                return Err(Error::NoConvergence {
                    element: None,
                    msg: format!("arc transform unresolved with {MAX_NODES} nodes"),
                });
            }
            n *= 2;
        }
    }

    /// Convert b = 0 coefficients to this basis (b = −1) by back-substitution
    /// through the (0, 2)-banded connection matrix.
    pub fn lower_from_b0(&self, c0: &[f64]) -> Result<Vec<f64>> {
        match self.b {
            0 => Ok(c0.to_vec()),
            -1 => Ok(self.connection(c0.len())?.solve_upper(c0)),
            _ => Err(Error::Unsupported("transform into b = 1".into())),
        }
    }

    /// μ_{jn} for 0 ≤ j ≤ n ≤ big_n: cos nθ = (1/μ₀₀) Σ_j μ_{jn} p_j.
    pub fn trig_expand_cos(&self, big_n: usize) -> Result<Vec<Vec<f64>>> {
        let fam = self.with_b(0).fam_p(big_n + 2)?;
        let (a, b, c) = (&fam.rc.a, &fam.rc.b, &fam.rc.c);
        let hm1 = -self.one_minus_h();
        let xop = |v: &[f64]| -> Vec<f64> {
            let len = v.len() + 1;
            (0..len)
                .map(|j| {
                    let mut s = 0.0;
                    if j < v.len() {
                        s += (1.0 + hm1 * a[j]) * v[j];
                    }
                    if j >= 1 && j - 1 < v.len() {
                        s += hm1 * b[j - 1] * v[j - 1];
                    }
                    if j + 1 < v.len() {
                        s += hm1 * c[j + 1] * v[j + 1];
                    }
                    s
                })
                .collect()
        };
        three_term_table(vec![self.m_p()], &xop, big_n, 1.0)
    }

    /// η_{jn} for 1 ≤ j ≤ n ≤ big_n (stored at index j − 1): sin nθ = (1/η₁₁) Σ_j η_{jn} q_j.
    pub fn trig_expand_sin(&self, big_n: usize) -> Result<Vec<Vec<f64>>> {
        if big_n < 1 {
            return Err(Error::Domain("sine table needs N >= 1".into()));
        }
        let fam = self.with_b(0).fam_q(big_n + 2)?;
        let (a, b, c) = (&fam.rc.a, &fam.rc.b, &fam.rc.c);
        let hm1 = -self.one_minus_h();
        let xop = |v: &[f64]| -> Vec<f64> {
            let len = v.len() + 1;
            (0..len)
                .map(|k| {
                    let mut s = 0.0;
                    if k < v.len() {
                        s += (1.0 + hm1 * a[k]) * v[k];
                    }
                    if k >= 1 && k - 1 < v.len() {
                        s += hm1 * b[k - 1] * v[k - 1];
                    }
                    if k + 1 < v.len() {
                        s += hm1 * c[k + 1] * v[k + 1];
                    }
                    s
                })
                .collect()
        };
        // index 0 ↔ sin θ = q_1; the n = 0 row (sin 0) is empty
        let mut rows = three_term_table(vec![self.m_q()], &xop, big_n - 1, 2.0)?;
        rows.insert(0, vec![]);
        Ok(rows)
    }

    /// Exact interlaced coefficients of a₀ + Σ a_n cos nθ + b_n sin nθ
    /// (b = 0 basis, length 2N + 1).
    pub fn trig_coeffs(&self, a0: f64, a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
        let big_n = a.len().max(b.len());
        let mut out = vec![0.0; 2 * big_n + 1];
        out[0] = a0;
        if big_n == 0 {
            return Ok(out);
        }
        let mu = self.trig_expand_cos(big_n)?;
        let eta = self.trig_expand_sin(big_n)?;
        let (m00, e11) = (self.m_p(), self.m_q());
        for n in 1..=big_n {
            let an = a.get(n - 1).copied().unwrap_or(0.0);
            let bn = b.get(n - 1).copied().unwrap_or(0.0);
            if an != 0.0 {
                for (j, v) in mu[n].iter().enumerate() {
                    out[idx_p(j)] += an * v / m00;
                }
            }
            if bn != 0.0 {
                for (j, v) in eta[n].iter().enumerate() {
                    out[idx_q(j + 1)] += bn * v / e11;
                }
            }
        }
        Ok(out)
    }
}

/// Rows T_0 = seed, T_1 = s X T_0, T_{n+1} = 2 X T_n − T_{n−1}; s = 1 gives
/// the cosine (first-kind) table and s = 2 the sine (second-kind) table.
fn three_term_table(
    seed: Vec<f64>,
    xop: &dyn Fn(&[f64]) -> Vec<f64>,
    big_n: usize,
    s: f64,
) -> Result<Vec<Vec<f64>>> {
    let mut rows = vec![seed];
    if big_n >= 1 {
        let first = xop(&rows[0]).into_iter().map(|v| s * v).collect();
        rows.push(first);
    }
    for n in 1..big_n {
        let mut next: Vec<f64> = xop(&rows[n]).into_iter().map(|v| 2.0 * v).collect();
        for (j, v) in rows[n - 1].iter().enumerate() {
            next[j] -= v;
        }
        rows.push(next);
    }
    Ok(rows)
}

/// Split interlaced coefficients into (p-coefficients, q-coefficients), the
/// latter indexed by the P⁺ degree.
pub fn split(coeffs: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let fp = coeffs.iter().step_by(2).copied().collect();
    let fq = coeffs.iter().skip(1).step_by(2).copied().collect();
    (fp, fq)
}

/// Relative rounding plateau of an n-node transform; the chop tolerance is
/// never tighter than this, otherwise the tail test cannot succeed.
pub fn rounding_floor(n: usize) -> f64 {
    8.0 * f64::EPSILON * n as f64
}

/// Chop rule: None if the last ⌈n/8⌉ entries are not all below tol·max,
/// otherwise the vector with trailing entries below tol·max removed.
pub fn chop(c: &[f64], tol: f64) -> Option<Vec<f64>> {
    let mx = c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if mx == 0.0 {
        return Some(vec![0.0]);
    }
    let tail = c.len().div_ceil(8);
    if c[c.len() - tail..].iter().any(|v| v.abs() >= tol * mx) {
        return None;
    }
    let last = c.iter().rposition(|v| v.abs() >= tol * mx).unwrap_or(0);
    Some(c[..=last].to_vec())
}
