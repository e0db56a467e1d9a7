//! Screened Poisson, heat, Schrödinger and convection-diffusion solvers on
//! either periodic piecewise basis, plus periodic-drift diagnostics, the
//! generalised eigenvalue experiment, convergence-rate fits and a timing
//! benchmark of the structured solver.
//!
//! Both bases are used with b = −1 (hats + bubbles). Boundary-value problems
//! go through the reverse Cholesky factorisation; evolution problems apply
//! expm(tA) to a dense truncation of the generator. Complex problems are
//! embedded as real [Re; Im] pairs.

use crate::error::{Error, Result};
use crate::legendreref::LegendreBasis;
use crate::piecewise::{PiecewiseBasis, PiecewiseGrid};
use crate::sparse::SparseMat;
use crate::structmat::{reverse_cholesky, CB3Arrowhead};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

/// Section size factor for derivative reconstruction: sections of 15·M.
pub const SECTION_PER_ELEMENT: usize = 15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisKind {
    Arc,
    Legendre,
}

impl FromStr for BasisKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "arc" => Ok(BasisKind::Arc),
            "legendre" => Ok(BasisKind::Legendre),
            _ => Err(Error::Config(format!("unknown basis '{s}' (expected arc or legendre)"))),
        }
    }
}

impl fmt::Display for BasisKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BasisKind::Arc => "arc",
            BasisKind::Legendre => "legendre",
        })
    }
}

/// A b = −1 discretisation in one of the two bases.
#[derive(Clone, Debug)]
pub enum Disc {
    Arc { basis: PiecewiseBasis, section: usize },
    Legendre(LegendreBasis),
}

impl Disc {
    pub fn new(kind: BasisKind, grid: PiecewiseGrid) -> Result<Self> {
        Ok(match kind {
            BasisKind::Arc => {
                let section = SECTION_PER_ELEMENT * grid.m();
                Disc::Arc { basis: PiecewiseBasis::new(grid, -1)?, section }
            }
            BasisKind::Legendre => Disc::Legendre(LegendreBasis::new(grid, -1)?),
        })
    }

    /// Override the derivative-reconstruction section (arc basis only).
    pub fn with_section(mut self, s: usize) -> Self {
        if let Disc::Arc { section, .. } = &mut self {
            *section = s;
        }
        self
    }

    pub fn kind(&self) -> BasisKind {
        match self {
            Disc::Arc { .. } => BasisKind::Arc,
            Disc::Legendre(_) => BasisKind::Legendre,
        }
    }

    pub fn grid(&self) -> &PiecewiseGrid {
        match self {
            Disc::Arc { basis, .. } => &basis.grid,
            Disc::Legendre(b) => &b.grid,
        }
    }

    pub fn m(&self) -> usize {
        self.grid().m()
    }

    /// Truncation rounded up to a whole number of blocks.
    pub fn trunc(&self, n: usize) -> usize {
        self.grid().round_trunc(n)
    }

    pub fn mass(&self, n: usize) -> Result<SparseMat> {
        match self {
            Disc::Arc { basis, .. } => basis.mass(n),
            Disc::Legendre(b) => Ok(b.mass(n)),
        }
    }

    /// Weak Laplacian −Δ (symmetric positive semidefinite).
    pub fn laplacian(&self, n: usize) -> Result<SparseMat> {
        match self {
            Disc::Arc { basis, .. } => Ok(basis.weak_laplacian(n)?.to_sparse()),
            Disc::Legendre(b) => b.weak_laplacian(n),
        }
    }

    /// Convection operator RᵀM⁽⁰⁾J_v D, i.e. ∫ φ_a v φ_b'.
    pub fn convection(&self, v: &dyn Fn(f64) -> f64, n: usize) -> Result<SparseMat> {
        match self {
            Disc::Arc { basis, .. } => {
                let m = basis.m();
                let r = basis.connection_rect(n)?;
                let d = basis.diff_rect(n)?;
                let b0 = PiecewiseBasis::new(basis.grid.clone(), 0)?;
                let jv = b0.mult(v, d.rows)?;
                let jd = jv.matmul(&d).section(n + m, n);
                let m0 = SparseMat::diag(&basis.mass_b0_diag(n + m)?);
                Ok(r.transpose().matmul(&m0.matmul(&jd)))
            }
            Disc::Legendre(b) => b.convection(v, n, 64),
        }
    }

    /// b = 0 coefficients of f (discontinuities at breakpoints allowed).
    pub fn expand_b0(&self, f: &dyn Fn(f64) -> f64) -> Result<Vec<f64>> {
        match self {
            Disc::Arc { basis, .. } => PiecewiseBasis::new(basis.grid.clone(), 0)?.transform(f, crate::arcpoly::DEFAULT_TOL),
            Disc::Legendre(b) => LegendreBasis::new(b.grid.clone(), 0)?.transform(f, crate::arcpoly::DEFAULT_TOL),
        }
    }

    /// Load vector Rᵀ M⁽⁰⁾ f, length n.
    pub fn load(&self, f0: &[f64], n: usize) -> Result<Vec<f64>> {
        match self {
            Disc::Arc { basis, .. } => basis.load_vector(n, f0),
            Disc::Legendre(b) => b.load_vector(n, f0),
        }
    }

    /// L² projection of f onto the first n basis functions.
    pub fn project(&self, f: &dyn Fn(f64) -> f64, n: usize) -> Result<Vec<f64>> {
        let rhs = self.load(&self.expand_b0(f)?, n)?;
        let mass = CB3Arrowhead::from_sparse(&self.mass(n)?, self.m())?;
        reverse_cholesky(&mass)?.solve(&rhs)
    }

    pub fn eval(&self, u: &[f64], theta: f64) -> Result<f64> {
        match self {
            Disc::Arc { basis, .. } => basis.eval(u, theta),
            Disc::Legendre(b) => Ok(b.eval(u, theta)),
        }
    }

    /// b = 0 coefficients of the d-th derivative (d ≥ 1).
    pub fn derivative_b0(&self, u: &[f64], d: usize) -> Result<Vec<f64>> {
        match self {
            Disc::Arc { basis, section } => basis.derivative_b0(u, d, *section),
            Disc::Legendre(b) => b.derivative_b0(u, d),
        }
    }

    /// Evaluate b = 0 coefficients at θ.
    pub fn eval_b0(&self, c: &[f64], theta: f64) -> Result<f64> {
        match self {
            Disc::Arc { basis, .. } => PiecewiseBasis::new(basis.grid.clone(), 0)?.eval(c, theta),
            Disc::Legendre(b) => Ok(LegendreBasis::new(b.grid.clone(), 0)?.eval(c, theta)),
        }
    }
}

/// A b = −1 field with its derivative expansions up to order `dmax`.
#[derive(Clone, Debug)]
pub struct Field {
    pub disc: Disc,
    pub coeffs: Vec<f64>,
    derivs: Vec<Vec<f64>>,
}

impl Field {
    pub fn new(disc: &Disc, coeffs: Vec<f64>, dmax: usize) -> Result<Self> {
        let derivs = (1..=dmax).map(|d| disc.derivative_b0(&coeffs, d)).collect::<Result<Vec<_>>>()?;
        Ok(Field { disc: disc.clone(), coeffs, derivs })
    }

    pub fn dmax(&self) -> usize {
        self.derivs.len()
    }

    /// d-th derivative at θ (d = 0 is the value).
    pub fn value(&self, d: usize, theta: f64) -> Result<f64> {
        if d == 0 {
            return self.disc.eval(&self.coeffs, theta);
        }
        let c = self
            .derivs
            .get(d - 1)
            .ok_or_else(|| Error::Domain(format!("derivative {d} beyond dmax {}", self.dmax())))?;
        self.disc.eval_b0(c, theta)
    }

    /// Periodic drift |u^{(d)}(π) − u^{(d)}(−π)| for d = 0..=dmax.
    pub fn drift(&self) -> Result<Vec<f64>> {
        (0..=self.dmax()).map(|d| Ok((self.value(d, PI)? - self.value(d, -PI)?).abs())).collect()
    }
}

/// Drift values E^{(d)}(t) at each sample time.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DriftReport {
    pub times: Vec<f64>,
    /// drift[k][d] at times[k].
    pub drift: Vec<Vec<f64>>,
}

impl DriftReport {
    pub fn series(&self, d: usize) -> Vec<f64> {
        self.drift.iter().map(|r| r[d]).collect()
    }
}

/// Drift of a sequence of (real) fields.
pub fn periodic_drift(times: &[f64], fields: &[Field]) -> Result<DriftReport> {
    let drift = fields.iter().map(|f| f.drift()).collect::<Result<Vec<_>>>()?;
    Ok(DriftReport { times: times.to_vec(), drift })
}

/// Solve −u″ + ω²u = f with the reverse Cholesky factorisation; returns the
/// b = −1 coefficients of length n (rounded to whole blocks).
pub fn solve_screened_poisson(disc: &Disc, f: &dyn Fn(f64) -> f64, omega: f64, n: usize) -> Result<Vec<f64>> {
    if !(omega > 0.0) {
        return Err(Error::Domain(format!("screened Poisson needs omega > 0, got {omega}")));
    }
    let n = disc.trunc(n);
    let f0 = disc.expand_b0(f)?;
    let rhs = disc.load(&f0, n)?;
    let a = screened_operator(disc, omega, n)?;
    reverse_cholesky(&a)?.solve(&rhs)
}

/// −Δ + ω²M as a CB³ matrix.
pub fn screened_operator(disc: &Disc, omega: f64, n: usize) -> Result<CB3Arrowhead> {
    let a = disc.laplacian(n)?.add_scaled(&disc.mass(n)?, omega * omega);
    CB3Arrowhead::from_sparse(&a, disc.m())
}

/// The evolution equations.
pub enum Evolution<'a> {
    /// u_t = u_θθ
    Heat,
    /// i u_t = u_θθ
    Schrodinger,
    /// u_t = u_θθ − v u_θ
    ConvectionDiffusion(&'a dyn Fn(f64) -> f64),
}

impl Evolution<'_> {
    pub fn is_complex(&self) -> bool {
        matches!(self, Evolution::Schrodinger)
    }
}

/// Dense generator A with du/dt = A u (2n × 2n for the complex case,
/// acting on [Re; Im]).
pub fn generator(disc: &Disc, eq: &Evolution, n: usize) -> Result<DMatrix<f64>> {
    let mass = disc.mass(n)?.to_dense();
    let chol = mass
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Eigen("mass matrix is not positive definite".into()))?;
    let mut k = disc.laplacian(n)?.to_dense();
    if let Evolution::ConvectionDiffusion(v) = eq {
        k += disc.convection(*v, n)?.to_dense();
    }
    let mk = chol.solve(&k);
    Ok(match eq {
        Evolution::Schrodinger => {
            // u_t = i M⁻¹(−Δ) u ⇒ x_t = −K y, y_t = K x
            let mut g = DMatrix::zeros(2 * n, 2 * n);
            g.view_mut((0, n), (n, n)).copy_from(&(-&mk));
            g.view_mut((n, 0), (n, n)).copy_from(&mk);
            g
        }
        _ => -mk,
    })
}

/// expm(tA) v.
pub fn matrix_exponential(a: &DMatrix<f64>, t: f64, v: &[f64]) -> Result<Vec<f64>> {
    if a.nrows() != a.ncols() || a.nrows() != v.len() {
        return Err(Error::Shape(format!("expm of {}x{} applied to length {}", a.nrows(), a.ncols(), v.len())));
    }
    let e = (a * t).exp();
    if e.iter().any(|x| !x.is_finite()) {
        return Err(Error::NoConvergence { element: None, msg: format!("matrix exponential overflowed at t = {t}") });
    }
    Ok((e * DVector::from_column_slice(v)).as_slice().to_vec())
}

/// Coefficient states at each sample time. For complex problems each state
/// holds [Re; Im] (length 2n).
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub n: usize,
    pub complex: bool,
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

impl Trajectory {
    /// Real and imaginary parts of state k.
    pub fn parts(&self, k: usize) -> (&[f64], Option<&[f64]>) {
        let s = &self.states[k];
        if self.complex {
            (&s[..self.n], Some(&s[self.n..]))
        } else {
            (&s[..], None)
        }
    }

    /// M-weighted squared norm uᴴ M u at each sample time.
    pub fn mass_norms(&self, disc: &Disc) -> Result<Vec<f64>> {
        let mass = disc.mass(self.n)?;
        Ok((0..self.states.len())
            .map(|k| {
                let (re, im) = self.parts(k);
                let q = |x: &[f64]| x.iter().zip(mass.mul_vec(x)).map(|(a, b)| a * b).sum::<f64>();
                q(re) + im.map_or(0.0, q)
            })
            .collect())
    }

    /// Drift per time; for complex problems the drift of u = Re + i Im is
    /// |Δ Re + i Δ Im|.
    pub fn drift(&self, disc: &Disc, dmax: usize) -> Result<DriftReport> {
        let mut drift = vec![];
        for k in 0..self.states.len() {
            let (re, im) = self.parts(k);
            let dr = Field::new(disc, re.to_vec(), dmax)?.drift()?;
            let row = match im {
                Some(im) => {
                    let di = Field::new(disc, im.to_vec(), dmax)?.drift()?;
                    dr.iter().zip(&di).map(|(a, b)| a.hypot(*b)).collect()
                }
                None => dr,
            };
            drift.push(row);
        }
        Ok(DriftReport { times: self.times.clone(), drift })
    }
}

/// Evolve the initial condition u0 (real part; `u0_im` optional imaginary
/// part) with the truncated generator, sampling at `times`.
pub fn solve_evolution(
    disc: &Disc,
    eq: &Evolution,
    u0: &dyn Fn(f64) -> f64,
    u0_im: Option<&dyn Fn(f64) -> f64>,
    n: usize,
    times: &[f64],
) -> Result<Trajectory> {
    let n = disc.trunc(n);
    let mut x0 = disc.project(u0, n)?;
    if eq.is_complex() {
        match u0_im {
            Some(g) => x0.extend(disc.project(g, n)?),
            None => x0.extend(vec![0.0; n]),
        }
    }
    let a = generator(disc, eq, n)?;
    let states = times.iter().map(|&t| matrix_exponential(&a, t, &x0)).collect::<Result<Vec<_>>>()?;
    Ok(Trajectory { n, complex: eq.is_complex(), times: times.to_vec(), states })
}

/// Generalised eigenproblem −Δu = λMu on the n×n truncation; eigenvalues
/// ascending with their coefficient vectors.
pub fn eigen_experiment(disc: &Disc, n: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = disc.trunc(n);
    let mass = disc.mass(n)?.to_dense();
    let k = disc.laplacian(n)?.to_dense();
    let chol = mass.cholesky().ok_or_else(|| Error::Eigen("mass matrix is not positive definite".into()))?;
    let l = chol.l();
    let linv = l
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Eigen("singular Cholesky factor".into()))?;
    let c = &linv * k * linv.transpose();
    let c = (&c + c.transpose()) * 0.5;
    let eig = c.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let lt = linv.transpose();
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = order.iter().map(|&i| (&lt * eig.eigenvectors.column(i)).as_slice().to_vec()).collect();
    Ok((vals, vecs))
}

/// Coefficient-decay tables of one basis.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Convergence {
    pub basis: BasisKind,
    /// max |coefficient| over elements (and p/q slots) for each degree.
    pub per_degree: Vec<f64>,
    /// every coefficient magnitude in storage order.
    pub per_coeff: Vec<f64>,
    pub rho: f64,
}

/// b = 0 expansion of f in the chosen basis and its decay rate.
pub fn convergence_study(f: &dyn Fn(f64) -> f64, grid: &PiecewiseGrid, kind: BasisKind) -> Result<Convergence> {
    let m = grid.m();
    let (coeffs, degree_of): (Vec<f64>, Box<dyn Fn(usize) -> usize>) = match kind {
        BasisKind::Arc => {
            let c = PiecewiseBasis::new(grid.clone(), 0)?.transform(f, crate::arcpoly::DEFAULT_TOL)?;
            // slot s: p_n at 2n, q_n at 2n − 1 ⇒ degree ⌈s/2⌉
            (c, Box::new(move |i| (i / m).div_ceil(2)))
        }
        BasisKind::Legendre => {
            let c = LegendreBasis::new(grid.clone(), 0)?.transform(f, crate::arcpoly::DEFAULT_TOL)?;
            (c, Box::new(move |i| i / m))
        }
    };
    let per_coeff: Vec<f64> = coeffs.iter().map(|v| v.abs()).collect();
    let top = coeffs.len().checked_sub(1).map_or(0, &degree_of);
    let mut per_degree = vec![0.0f64; top + 1];
    for (i, v) in per_coeff.iter().enumerate() {
        let d = degree_of(i);
        per_degree[d] = per_degree[d].max(*v);
    }
    let rho = fit_rho(&per_degree);
    Ok(Convergence { basis: kind, per_degree, per_coeff, rho })
}

/// ρ̂ from a least-squares line through log|c_n| over the geometric range:
/// degrees whose magnitude lies between 1e−12 and 1e−2 of the largest one.
pub fn fit_rho(per_degree: &[f64]) -> f64 {
    let mx = per_degree.iter().fold(0.0f64, |a, b| a.max(*b));
    let pts: Vec<(f64, f64)> = per_degree
        .iter()
        .enumerate()
        .filter(|(_, v)| **v > 1e-12 * mx && **v < 1e-2 * mx)
        .map(|(n, v)| (n as f64, v.ln()))
        .collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let (slope, _) = linear_fit(&pts);
    (-slope).exp()
}

/// Least-squares slope and R² of y against x.
pub fn linear_fit(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, r2)
}

/// Log-log slope of y against x.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = x.iter().zip(y).map(|(a, b)| (a.ln(), b.ln())).collect();
    linear_fit(&pts).0
}

/// Exact periodic solution of −u″ + ω²u = 2 + sgn(|θ| − π/3), and its first
/// two derivatives (d ∈ {0, 1, 2}).
///
/// The solution is even. Inside |θ| < π/3 it is 1/ω² + A cosh(ωθ), outside it
/// is 3/ω² + B cosh(ω(π − |θ|)), which is smooth across ±π. A and B follow
/// from continuity of u and u′ at π/3:
///   A cosh(ωa) − B cosh(ωb) = 2/ω²,  A sinh(ωa) + B sinh(ωb) = 0,
/// with a = π/3 and b = π − a.
pub fn step_exact(omega: f64, theta: f64, d: usize) -> f64 {
    let (a, b) = (PI / 3.0, 2.0 * PI / 3.0);
    let w2 = omega * omega;
    let (ca, sa, cb, sb) = ((omega * a).cosh(), (omega * a).sinh(), (omega * b).cosh(), (omega * b).sinh());
    // B = −A sa/sb ⇒ A (ca + cb sa/sb) = 2/ω²
    let big_a = 2.0 / w2 / (ca + cb * sa / sb);
    let big_b = -big_a * sa / sb;
    let x = theta.abs();
    let sign = if theta < 0.0 { -1.0 } else { 1.0 };
    if x < a {
        match d {
            0 => 1.0 / w2 + big_a * (omega * x).cosh(),
            1 => sign * big_a * omega * (omega * x).sinh(),
            _ => big_a * w2 * (omega * x).cosh(),
        }
    } else {
        let y = PI - x;
        match d {
            0 => 3.0 / w2 + big_b * (omega * y).cosh(),
            1 => -sign * big_b * omega * (omega * y).sinh(),
            _ => big_b * w2 * (omega * y).cosh(),
        }
    }
}

/// One benchmark measurement.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BenchRow {
    pub n: usize,
    pub build_seconds: f64,
    pub solve_seconds: f64,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

/// Time assembly + reverse Cholesky ("build") and the solve for the screened
/// Poisson problem with f = exp(cos θ) on a uniform grid of m elements, for
/// each size in `sizes`. Each size gets a discarded warm-up run (which also
/// fills the recurrence caches) and the median of `repeats` timings.
pub fn bench_screened_poisson(m: usize, sizes: &[usize], repeats: usize, omega: f64) -> Result<Vec<BenchRow>> {
    let grid = PiecewiseGrid::uniform(m + 1)?;
    let disc = Disc::new(BasisKind::Arc, grid)?;
    let f0 = disc.expand_b0(&|t: f64| t.cos().exp())?;
    let mut rows = vec![];
    for &size in sizes {
        let n = disc.trunc(size);
        let rhs = disc.load(&f0, n)?;
        let run = || -> Result<(f64, f64, Vec<f64>)> {
            let t0 = Instant::now();
            let fac = reverse_cholesky(&screened_operator(&disc, omega, n)?)?;
            let build = t0.elapsed().as_secs_f64();
            let t1 = Instant::now();
            let u = fac.solve(&rhs)?;
            Ok((build, t1.elapsed().as_secs_f64(), u))
        };
        run()?;
        let (mut b, mut s) = (vec![], vec![]);
        for _ in 0..repeats.max(1) {
            let (tb, ts, _) = run()?;
            b.push(tb);
            s.push(ts);
        }
        rows.push(BenchRow { n, build_seconds: median(b), solve_seconds: median(s) });
    }
    Ok(rows)
}
