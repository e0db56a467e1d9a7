//! Gauss-type quadrature rules: Gauss–Legendre by Newton iteration, generic
//! Golub–Welsch for Jacobi matrices (with a first-component-only implicit QL
//! sweep), Gauss–Jacobi and Gauss–Radau built on top of it.

use crate::error::{Error, Result};
use once_cell::sync::Lazy;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

/// Nodes and weights of a quadrature rule.
#[derive(Clone, Debug)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// Map a rule on [-1, 1] to [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> Rule {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        Rule {
            nodes: self.nodes.iter().map(|&x| mid + half * x).collect(),
            weights: self.weights.iter().map(|&w| w * half).collect(),
        }
    }
}

static LEGENDRE_CACHE: Lazy<Mutex<HashMap<usize, Arc<Rule>>>> = Lazy::new(|| Mutex::new(HashMap::new()));

/// n-point Gauss–Legendre rule on [-1, 1], nodes ascending. Cached by n.
pub fn gauss_legendre(n: usize) -> Arc<Rule> {
    if let Some(r) = LEGENDRE_CACHE.lock().unwrap().get(&n) {
        return r.clone();
    }
    let rule = Arc::new(legendre_newton(n));
    LEGENDRE_CACHE.lock().unwrap().insert(n, rule.clone());
    rule
}

fn legendre_newton(n: usize) -> Rule {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    let half = n.div_ceil(2);
    for i in 0..half {
        // Tricomi-style initial guess, largest root first.
        let theta = std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5);
        let mut x = (1.0 - 1.0 / (8.0 * nf * nf) + 1.0 / (8.0 * nf * nf * nf)) * theta.cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_p_and_dp(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1e-3) {
                break;
            }
        }
        let (_, d) = legendre_p_and_dp(n, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = w;
        nodes[i] = -x;
        weights[i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Rule { nodes, weights }
}

/// Value and derivative of the Legendre polynomial P_n at x.
pub fn legendre_p_and_dp(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let dp = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Legendre polynomials P_0..P_{n-1} at x.
pub fn legendre_all(n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return out;
    }
    out.push(1.0);
    if n == 1 {
        return out;
    }
    out.push(x);
    for k in 1..n - 1 {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * out[k] - kf * out[k - 1]) / (kf + 1.0);
        out.push(next);
    }
    out
}

/// Eigenvalues and first eigenvector components of the symmetric tridiagonal
/// matrix with diagonal `d` and off-diagonal `e` (implicit QL with Wilkinson
/// shifts). Returned in ascending eigenvalue order.
pub fn symtrid_eig_first(d: &[f64], e: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = d.len();
    if n == 0 {
        return Ok((vec![], vec![]));
    }
    if e.len() + 1 < n {
        return Err(Error::Shape("off-diagonal too short".into()));
    }
    let mut d = d.to_vec();
    let mut e: Vec<f64> = e.iter().take(n - 1).copied().chain(std::iter::once(0.0)).collect();
    let mut z = vec![0.0; n];
    z[0] = 1.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 200 {
                return Err(Error::Eigen(format!("QL iteration did not converge for eigenvalue {l}")));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut early = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    early = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if early {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap());
    Ok((idx.iter().map(|&i| d[i]).collect(), idx.iter().map(|&i| z[i]).collect()))
}

/// Golub–Welsch: quadrature for a measure of total mass `mu0` from its
/// orthonormal Jacobi matrix (diagonal `alpha`, off-diagonal `beta`).
pub fn golub_welsch(alpha: &[f64], beta: &[f64], mu0: f64) -> Result<Rule> {
    let (nodes, z) = symtrid_eig_first(alpha, beta)?;
    let weights = z.iter().map(|v| mu0 * v * v).collect();
    Ok(Rule { nodes, weights })
}

/// Gauss–Radau rule with one node pinned at `z`: modifies the last diagonal
/// entry of the n×n Jacobi matrix so that `z` is an eigenvalue.
/// `alpha` needs n entries and `beta` n−1 entries (beta[k] couples k and k+1).
pub fn gauss_radau(alpha: &[f64], beta: &[f64], mu0: f64, n: usize, z: f64) -> Result<Rule> {
    if n == 0 {
        return Err(Error::Domain("Gauss–Radau needs at least one node".into()));
    }
    if n == 1 {
        return Ok(Rule { nodes: vec![z], weights: vec![mu0] });
    }
    // r_k = (monic p_k(z)) / (monic p_{k-1}(z))
    let mut r = z - alpha[0];
    for k in 1..n - 1 {
        r = (z - alpha[k]) - beta[k - 1] * beta[k - 1] / r;
    }
    let mut a = alpha[..n].to_vec();
    a[n - 1] = z - beta[n - 2] * beta[n - 2] / r;
    let mut rule = golub_welsch(&a, &beta[..n - 1], mu0)?;
    // snap the pinned node exactly
    let (mut best, mut dist) = (0, f64::INFINITY);
    for (i, &x) in rule.nodes.iter().enumerate() {
        if (x - z).abs() < dist {
            dist = (x - z).abs();
            best = i;
        }
    }
    rule.nodes[best] = z;
    Ok(rule)
}

/// Orthonormal Jacobi matrix entries for the weight (1−x)^α(1+x)^β on [-1, 1].
pub fn jacobi_recurrence(n: usize, alpha: f64, beta: f64) -> (Vec<f64>, Vec<f64>) {
    let ab = alpha + beta;
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for k in 0..n {
        let kf = k as f64;
        if k == 0 {
            a.push((beta - alpha) / (ab + 2.0));
            b.push((4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab).powi(2) * (3.0 + ab))).sqrt());
        } else {
            let s = 2.0 * kf + ab;
            a.push((beta * beta - alpha * alpha) / (s * (s + 2.0)));
            let k1 = kf + 1.0;
            let num = 4.0 * k1 * (k1 + alpha) * (k1 + beta) * (k1 + ab);
            let den = (s + 2.0).powi(2) * (s + 3.0) * (s + 1.0);
            b.push((num / den).sqrt());
        }
    }
    (a, b)
}

/// n-point Gauss–Jacobi rule for (1−x)^α(1+x)^β on [-1, 1].
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> Result<Rule> {
    use statrs::function::gamma::ln_gamma;
    let (a, b) = jacobi_recurrence(n, alpha, beta);
    let mu0 = ((alpha + beta + 1.0) * std::f64::consts::LN_2 + ln_gamma(alpha + 1.0) + ln_gamma(beta + 1.0)
        - ln_gamma(alpha + beta + 2.0))
    .exp();
    golub_welsch(&a, &b[..n.saturating_sub(1)], mu0)
}

/// Adaptive Gauss–Kronrod-free quadrature: composite Gauss–Legendre with
/// interval bisection until two levels agree. Used only as a test oracle and
/// for one-off integrals of smooth functions.
pub fn adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: usize) -> f64 {
        let m = 0.5 * (a + b);
        let g = gauss_legendre(20);
        let left = g.mapped(a, m).integrate(f);
        let right = g.mapped(m, b).integrate(f);
        if depth > 40 || (left + right - whole).abs() <= tol * (1.0 + (left + right).abs()) {
            left + right
        } else {
            rec(f, a, m, left, tol, depth + 1) + rec(f, m, b, right, tol, depth + 1)
        }
    }
    let g = gauss_legendre(20);
    let whole = g.mapped(a, b).integrate(f);
    rec(f, a, b, whole, tol, 0)
}
