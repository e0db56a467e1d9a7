//! Semiclassical Jacobi polynomials P^{t,(a,b,c)}, orthogonal on [0, 1] for
//! the weight x^a (1−x)^b (t−x)^c with t > 1, including the b = −1 family
//! defined by P_0 = 1 and P_n = (1−x) P_{n−1}^{t,(a,1,c)}.
//!
//! Every family is normalised so that P_0 = 1 and all members share the
//! norm Γ = ∫ w; the recurrence coefficients are therefore those of the
//! orthonormal family and the Jacobi matrix is symmetric.
//!
//! Recurrence coefficients come from a discretised Stieltjes procedure and
//! are cached per parameter set. Connection and derivative matrices between
//! neighbouring families are assembled in O(n) from the recurrence data by
//! matching leading and subleading monomial coefficients.

use crate::banded::BandedOperator;
use crate::error::{Error, Result};
use crate::quadrature::{self, gauss_legendre};
use once_cell::sync::Lazy;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, ln_gamma};
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightParams {
    pub t: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl WeightParams {
    pub fn new(t: f64, a: f64, b: f64, c: f64) -> Result<Self> {
        let p = WeightParams { t, a, b, c };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let WeightParams { t, a, b, c } = *self;
        if !(t.is_finite() && t > 1.0) {
            return Err(Error::Domain(format!("t = {t} must exceed 1")));
        }
        if !(a.is_finite() && a > -1.0) {
            return Err(Error::Domain(format!("a = {a} must exceed -1")));
        }
        if !c.is_finite() {
            return Err(Error::Domain("c must be finite".into()));
        }
        if b == -1.0 {
            return Ok(());
        }
        if !(b.is_finite() && b >= -1.0 + 1e-10) {
            return Err(Error::Domain(format!("b = {b} must be -1 exactly or above -1 + 1e-10")));
        }
        Ok(())
    }

    /// The b = −1 family, built from the b = 1 family.
    pub fn is_derived(&self) -> bool {
        self.b == -1.0
    }

    pub fn with(&self, a: f64, b: f64, c: f64) -> Self {
        WeightParams { t: self.t, a, b, c }
    }

    pub fn weight(&self, x: f64) -> f64 {
        x.powf(self.a) * (1.0 - x).powf(self.b) * (self.t - x).powf(self.c)
    }

    fn key(&self) -> [u64; 4] {
        [self.t.to_bits(), self.a.to_bits(), self.b.to_bits(), self.c.to_bits()]
    }
}

/// ₂F₁(a, b; c; z) by its power series, |z| < 1.
pub fn hyp2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..10_000 {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * z;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            return Ok(sum);
        }
    }
    if term.abs() < 1e-14 * sum.abs() {
        Ok(sum)
    } else {
        Err(Error::NoConvergence { element: None, msg: format!("2F1 series at z = {z} did not converge in 1e4 terms") })
    }
}

/// Γ^{t,(a,b,c)} = ∫₀¹ x^a (1−x)^b (t−x)^c dx.
pub fn weight_integral(p: &WeightParams) -> Result<f64> {
    if !(p.a > -1.0 && p.b > -1.0) {
        return Err(Error::Domain(format!("weight not integrable for a = {}, b = {}", p.a, p.b)));
    }
    if !(p.t > 1.0) {
        return Err(Error::Domain(format!("t = {} must exceed 1", p.t)));
    }
    let beta = if p.a + p.b + 2.0 < 150.0 {
        gamma(p.a + 1.0) * gamma(p.b + 1.0) / gamma(p.a + p.b + 2.0)
    } else {
        (ln_gamma(p.a + 1.0) + ln_gamma(p.b + 1.0) - ln_gamma(p.a + p.b + 2.0)).exp()
    };
    Ok(beta * p.t.powf(p.c) * hyp2f1(p.a + 1.0, -p.c, p.a + p.b + 2.0, 1.0 / p.t)?)
}

/// (α, β) with P_1 = β (x − α).
pub fn linear_coeffs(p: &WeightParams) -> Result<(f64, f64)> {
    let g0 = weight_integral(p)?;
    let g1 = weight_integral(&p.with(p.a + 1.0, p.b, p.c))?;
    let g2 = weight_integral(&p.with(p.a + 2.0, p.b, p.c))?;
    let alpha = g1 / g0;
    let beta = (g0 / (g2 - 2.0 * alpha * g1 + alpha * alpha * g0)).sqrt();
    Ok((alpha, beta))
}

/// Three-term recurrence x P_n = c_n P_{n−1} + a_n P_n + b_n P_{n+1}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceCoeffs {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

impl RecurrenceCoeffs {
    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn truncate(&self, n: usize) -> Self {
        let n = n.min(self.len());
        RecurrenceCoeffs { a: self.a[..n].to_vec(), b: self.b[..n].to_vec(), c: self.c[..n].to_vec() }
    }

    /// Σ f_k P_k(x) by Clenshaw's algorithm. Needs `len() ≥ f.len()`.
    pub fn evaluate(&self, f: &[f64], x: f64) -> f64 {
        let n = f.len();
        assert!(n <= self.len(), "expansion longer than the recurrence data");
        let (mut u1, mut u2) = (0.0, 0.0); // u_{k+1}, u_{k+2}
        for k in (0..n).rev() {
            let mut u = f[k] + (x - self.a[k]) / self.b[k] * u1;
            if k + 2 <= n && k + 1 < self.len() {
                u -= self.c[k + 1] / self.b[k + 1] * u2;
            }
            u2 = u1;
            u1 = u;
        }
        u1
    }

    /// P_0(x), …, P_{n−1}(x) by forward recurrence.
    pub fn eval_all(&self, n: usize, x: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(n);
        if n == 0 {
            return out;
        }
        out.push(1.0);
        for k in 0..n - 1 {
            let prev = if k > 0 { self.c[k] * out[k - 1] } else { 0.0 };
            out.push(((x - self.a[k]) * out[k] - prev) / self.b[k]);
        }
        out
    }

    /// n×n tridiagonal section of J with x P = P J.
    pub fn jacobi_matrix(&self, n: usize) -> BandedOperator {
        assert!(n <= self.len());
        let mut j = BandedOperator::zeros(n, n, 1, 1);
        for k in 0..n {
            j.set(k, k, self.a[k]);
            if k + 1 < n {
                j.set(k + 1, k, self.b[k]);
            }
            if k > 0 {
                j.set(k - 1, k, self.c[k]);
            }
        }
        j
    }
}

/// A cached polynomial family.
#[derive(Debug)]
pub struct Family {
    pub params: WeightParams,
    /// Γ for integrable weights, `None` for b = −1.
    pub norm: Option<f64>,
    pub rc: RecurrenceCoeffs,
}

static FAMILIES: Lazy<Mutex<HashMap<[u64; 4], Arc<Family>>>> = Lazy::new(|| Mutex::new(HashMap::new()));

/// The family for `p` with at least `len` recurrence coefficients.
pub fn family(p: &WeightParams, len: usize) -> Result<Arc<Family>> {
    p.validate()?;
    let previous = FAMILIES.lock().unwrap().get(&p.key()).cloned();
    if let Some(f) = &previous {
        if f.rc.len() >= len {
            return Ok(f.clone());
        }
    }
    let target = len.max(64).next_power_of_two();
    let mut built = build_family(p, target)?;
    if let Some(old) = &previous {
        // Keep the coefficients already handed out: quadrature rules and
        // operators built from the shorter family stay consistent with it.
        let k = old.rc.len();
        built.rc.a[..k].copy_from_slice(&old.rc.a);
        built.rc.b[..k].copy_from_slice(&old.rc.b);
        built.rc.c[..k].copy_from_slice(&old.rc.c);
    }
    let fam = Arc::new(built);
    let mut cache = FAMILIES.lock().unwrap();
    let entry = cache.entry(p.key()).or_insert_with(|| fam.clone());
    if entry.rc.len() < fam.rc.len() {
        *entry = fam.clone();
    }
    Ok(entry.clone())
}

fn build_family(p: &WeightParams, len: usize) -> Result<Family> {
    if p.is_derived() {
        let base = family(&p.with(p.a, 1.0, p.c), len)?;
        let mut rc = RecurrenceCoeffs { a: vec![1.0], b: vec![-1.0], c: vec![0.0] };
        rc.a.extend_from_slice(&base.rc.a[..len - 1]);
        rc.b.extend_from_slice(&base.rc.b[..len - 1]);
        rc.c.extend_from_slice(&base.rc.c[..len - 1]);
        return Ok(Family { params: *p, norm: None, rc });
    }
    let gamma = weight_integral(p)?;
    let (x, w) = discretise(p, len)?;
    let (a, b) = stieltjes(&x, &w, len)?;
    let mut c = vec![0.0; len];
    c[1..len].copy_from_slice(&b[..(len - 1)]);
    Ok(Family { params: *p, norm: Some(gamma), rc: RecurrenceCoeffs { a, b, c } })
}

fn is_nonneg_int(v: f64) -> bool {
    v >= 0.0 && v.fract() == 0.0
}

/// A discrete measure that reproduces ⟨P_j, P_k⟩ to machine precision for
/// j, k < len. The (t−x)^c factor is analytic on [0, 1]; its Bernstein
/// ellipse parameter sets the oversampling.
fn discretise(p: &WeightParams, len: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let z = 2.0 * p.t - 1.0;
    let rho = z + (z * z - 1.0).sqrt();
    let margin = (18.0 * std::f64::consts::LN_10 / (2.0 * rho.ln())).ceil() as usize + 8;
    let n = (len + 2 + (p.a + p.b).max(0.0).ceil() as usize + margin).max((4 * (len + 2)).min(512));
    let tail = |x: f64| (p.t - x).powf(p.c);
    if is_nonneg_int(p.a + 0.5) && is_nonneg_int(p.b) {
        // x = s²: ∫₀¹ x^a(1−x)^b g dx = ∫₋₁¹ s^{2a+1}(1−s²)^b g(s²) ds, even integrand
        let rule = gauss_legendre(2 * n);
        let (mut xs, mut ws) = (Vec::with_capacity(n), Vec::with_capacity(n));
        for (&s, &w) in rule.nodes[n..].iter().zip(&rule.weights[n..]) {
            let x = s * s;
            xs.push(x);
            ws.push(2.0 * w * s.powf(2.0 * p.a + 1.0) * (1.0 - x).powf(p.b) * tail(x));
        }
        return Ok((xs, ws));
    }
    if is_nonneg_int(p.a) && is_nonneg_int(p.b) {
        let rule = gauss_legendre(n + (p.a + p.b) as usize / 2 + 1).mapped(0.0, 1.0);
        let ws = rule.nodes.iter().zip(&rule.weights).map(|(&x, &w)| w * p.weight(x)).collect();
        return Ok((rule.nodes.clone(), ws));
    }
    // Gauss–Jacobi in z = 2x − 1 for (1−z)^b (1+z)^a.
    let rule = quadrature::gauss_jacobi(n, p.b, p.a)?;
    let scale = 2f64.powf(-p.a - p.b - 1.0);
    let xs: Vec<f64> = rule.nodes.iter().map(|&z| 0.5 * (1.0 + z)).collect();
    let ws = xs.iter().zip(&rule.weights).map(|(&x, &w)| w * scale * tail(x)).collect();
    Ok((xs, ws))
}

/// Orthonormal Stieltjes procedure on a discrete measure.
fn stieltjes(x: &[f64], w: &[f64], len: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = x.len();
    let mu: f64 = w.iter().sum();
    let mut prev = vec![0.0; n];
    let mut cur = vec![1.0 / mu.sqrt(); n];
    let mut q = vec![0.0; n];
    let (mut a, mut b) = (Vec::with_capacity(len), Vec::with_capacity(len));
    let mut bprev = 0.0;
    for k in 0..len {
        let ak: f64 = (0..n).map(|i| w[i] * x[i] * cur[i] * cur[i]).sum();
        let mut nrm = 0.0;
        for i in 0..n {
            q[i] = (x[i] - ak) * cur[i] - bprev * prev[i];
            nrm += w[i] * q[i] * q[i];
        }
        let bk = nrm.sqrt();
        if !(bk.is_finite() && bk > 0.0 && ak.is_finite()) {
            return Err(Error::Recurrence { index: k, msg: format!("b_{k} = {bk}") });
        }
        a.push(ak);
        b.push(bk);
        for i in 0..n {
            prev[i] = cur[i];
            cur[i] = q[i] / bk;
        }
        bprev = bk;
    }
    Ok((a, b))
}

/// Recurrence coefficients with indices 0..=n_max.
pub fn recurrence_coeffs(p: &WeightParams, n_max: usize) -> Result<RecurrenceCoeffs> {
    if n_max < 1 {
        return Err(Error::Domain("n_max must be at least 1".into()));
    }
    Ok(family(p, n_max + 1)?.rc.truncate(n_max + 1))
}

/// Σ f_k P_k^{p}(x).
pub fn evaluate(p: &WeightParams, f: &[f64], x: f64) -> Result<f64> {
    Ok(family(p, f.len() + 1)?.rc.evaluate(f, x))
}

/// P = Q R for a unit step between neighbouring families (upper bidiagonal).
pub(crate) fn two_term_connection(p: &RecurrenceCoeffs, q: &RecurrenceCoeffs, n: usize) -> BandedOperator {
    let mut r = BandedOperator::zeros(n, n, 0, 1);
    let (mut rho, mut e) = (1.0, 0.0);
    for k in 0..n {
        r.set(k, k, rho);
        if k > 0 {
            r.set(k - 1, k, rho * e / q.b[k - 1]);
        }
        rho *= q.b[k] / p.b[k];
        e += q.a[k] - p.a[k];
    }
    r
}

/// P'_k = D_{k−1,k} Q_{k−1} + D_{k−2,k} Q_{k−2} ((−1, 2)-banded).
pub(crate) fn two_term_derivative(p: &RecurrenceCoeffs, q: &RecurrenceCoeffs, n: usize) -> BandedOperator {
    let mut d = BandedOperator::zeros(n, n, -1, 2);
    if n < 2 {
        return d;
    }
    let mut r = 1.0 / p.b[0];
    let mut g = 0.0;
    let mut e = -p.a[0];
    for k in 1..n {
        let kf = k as f64;
        d.set(k - 1, k, kf * r);
        if k >= 2 {
            d.set(k - 2, k, r * g / q.b[k - 2]);
        }
        g += e + kf * (q.a[k - 1] - p.a[k]) + q.a[k - 1];
        e += q.a[k - 1] - p.a[k];
        r *= q.b[k - 1] / p.b[k];
    }
    d
}

fn steps(src: &WeightParams, dst: &WeightParams) -> Result<[usize; 3]> {
    let mut out = [0usize; 3];
    for (slot, (s, d)) in [(src.a, dst.a), (src.b, dst.b), (src.c, dst.c)].into_iter().enumerate() {
        let diff = d - s;
        if !(diff >= 0.0 && diff.fract() == 0.0 && diff <= 16.0) {
            return Err(Error::Unsupported(format!(
                "connection from {src:?} to {dst:?} needs non-negative integer parameter steps"
            )));
        }
        out[slot] = diff as usize;
    }
    Ok(out)
}

/// Upper-triangular R with P^{src} = P^{dst} R (n×n section).
pub fn connection_matrix(src: &WeightParams, dst: &WeightParams, n: usize) -> Result<BandedOperator> {
    src.validate()?;
    dst.validate()?;
    if src.t != dst.t {
        return Err(Error::Unsupported("connection between different t".into()));
    }
    if src == dst {
        return Ok(BandedOperator::identity(n));
    }
    if src.is_derived() {
        if dst.is_derived() {
            // P_n = (1−x) P_{n−1}^{(a,1,c)} on both sides
            let inner = connection_matrix(&src.with(src.a, 1.0, src.c), &dst.with(dst.a, 1.0, dst.c), n.saturating_sub(1))?;
            let mut r = BandedOperator::zeros(n, n, 0, inner.upper);
            if n > 0 {
                r.set(0, 0, 1.0);
            }
            for j in 0..n.saturating_sub(1) {
                for i in inner.col_range(j) {
                    r.set(i + 1, j + 1, inner.get(i, j));
                }
            }
            return Ok(r);
        }
        let mid = src.with(src.a, 0.0, src.c);
        let first = two_term_connection(&family(src, n + 2)?.rc, &family(&mid, n + 2)?.rc, n);
        if mid == *dst {
            return Ok(first);
        }
        return Ok(connection_matrix(&mid, dst, n)?.matmul(&first));
    }
    if dst.is_derived() {
        return Err(Error::Unsupported("cannot connect into the b = -1 family".into()));
    }
    let st = steps(src, dst)?;
    let mut cur = *src;
    let mut acc = BandedOperator::identity(n);
    for (slot, count) in st.into_iter().enumerate() {
        for _ in 0..count {
            let mut next = cur;
            match slot {
                0 => next.a += 1.0,
                1 => next.b += 1.0,
                _ => next.c += 1.0,
            }
            let step = two_term_connection(&family(&cur, n + 2)?.rc, &family(&next, n + 2)?.rc, n);
            acc = step.matmul(&acc);
            cur = next;
        }
    }
    Ok(acc)
}

/// Which weight factors a weighted connection moves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeightTag {
    A,
    B,
    C,
}

/// Lower-banded L with w^{src} P^{src} = w^{dst} P^{dst} L, where dst lowers
/// the slots named in `tags` by integer amounts.
pub fn weighted_connection(src: &WeightParams, dst: &WeightParams, n: usize, tags: &[WeightTag]) -> Result<BandedOperator> {
    src.validate()?;
    dst.validate()?;
    let moved = [src.a != dst.a, src.b != dst.b, src.c != dst.c];
    for (slot, tag) in [WeightTag::A, WeightTag::B, WeightTag::C].into_iter().enumerate() {
        if moved[slot] != tags.contains(&tag) {
            return Err(Error::Unsupported(format!("weight tags {tags:?} do not match the step {src:?} -> {dst:?}")));
        }
    }
    if src.is_derived() || dst.is_derived() {
        if !(src.is_derived() && dst.is_derived() && dst.a == src.a - 1.0 && dst.c == src.c - 1.0) {
            return Err(Error::Unsupported("b = -1 weighted connection only for (a,-1,c) -> (a-1,-1,c-1)".into()));
        }
        let inner = weighted_connection(&src.with(src.a, 1.0, src.c), &dst.with(dst.a, 1.0, dst.c), n.saturating_sub(1), tags)?;
        let (alpha, beta) = linear_coeffs(&dst.with(dst.a, 1.0, dst.c))?;
        let mut l = BandedOperator::zeros(n, n, 2, 0);
        if n > 0 {
            l.set(0, 0, src.t - 1.0);
        }
        if n > 1 {
            l.set(1, 0, 1.0 + alpha - src.t);
        }
        if n > 2 {
            l.set(2, 0, 1.0 / beta);
        }
        for j in 0..n.saturating_sub(1) {
            for i in inner.col_range(j) {
                l.set(i + 1, j + 1, inner.get(i, j));
            }
        }
        return Ok(l);
    }
    let r = connection_matrix(dst, src, n)?;
    let ratio = weight_integral(src)? / weight_integral(dst)?;
    Ok(r.transpose().scale(ratio))
}

/// d/dx P^{(a,−1,c)} = P^{(a+1,0,c+1)} D.
pub fn differentiation_matrix(src: &WeightParams, n: usize) -> Result<BandedOperator> {
    if !src.is_derived() {
        return Err(Error::Domain("differentiation_matrix expects b = -1".into()));
    }
    derivative_matrix(src, n)
}

/// d/dx P^{(a,b,c)} = P^{(a+1,b+1,c+1)} D for any supported b.
pub fn derivative_matrix(src: &WeightParams, n: usize) -> Result<BandedOperator> {
    src.validate()?;
    let dst = src.with(src.a + 1.0, src.b + 1.0, src.c + 1.0);
    Ok(two_term_derivative(&family(src, n + 2)?.rc, &family(&dst, n + 2)?.rc, n))
}

/// Quadrature nodes in [0, 1] with optionally one pinned node.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub pinned: Option<f64>,
}

/// n-node Gauss–Radau rule for w^{t,(a,b,c)} with the node at 1 pinned.
pub fn gauss_radau(p: &WeightParams, n: usize) -> Result<QuadratureRule> {
    gauss_radau_at(p, n, 1.0)
}

/// Gauss–Radau rule with the pinned node at `z` (an endpoint of [0, 1]).
pub fn gauss_radau_at(p: &WeightParams, n: usize, z: f64) -> Result<QuadratureRule> {
    if p.is_derived() {
        return Err(Error::Domain("Gauss–Radau needs an integrable weight (b > -1)".into()));
    }
    let fam = family(p, n + 1)?;
    let gamma = fam.norm.expect("integrable family");
    let rule = quadrature::gauss_radau(&fam.rc.a[..n], &fam.rc.b[..n.saturating_sub(1)], gamma, n, z)?;
    Ok(QuadratureRule { nodes: rule.nodes, weights: rule.weights, pinned: Some(z) })
}

/// n-node Gauss rule for w^{t,(a,b,c)}.
pub fn gauss_rule(p: &WeightParams, n: usize) -> Result<QuadratureRule> {
    let fam = family(p, n + 1)?;
    let gamma = fam.norm.ok_or_else(|| Error::Domain("Gauss rule needs b > -1".into()))?;
    let rule = quadrature::golub_welsch(&fam.rc.a[..n], &fam.rc.b[..n - 1], gamma)?;
    Ok(QuadratureRule { nodes: rule.nodes, weights: rule.weights, pinned: None })
}
