//! Command-line front end: `expand`, `solve` and `bench`, writing CSV and
//! JSON into an output directory. The binary is a thin wrapper around `run`.

use crate::catalog;
use crate::error::{Error, Result};
use crate::io::{write_csv, write_json, Cell};
use crate::legendreref::LegendreBasis;
use crate::piecewise::{significant, PiecewiseBasis, PiecewiseGrid};
use crate::solvers::{self, BasisKind, Disc, Evolution, Field};
use clap::{Args, Parser, Subcommand};
use serde_json::json;
use std::f64::consts::PI;
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "arcsem", about = "Piecewise arc-polynomial spectral elements for periodic problems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Expand a catalog function or a trigonometric polynomial.
    Expand(ExpandArgs),
    /// Solve a boundary-value or evolution problem.
    Solve(SolveArgs),
    /// Time the structured screened-Poisson solver over a ladder of sizes.
    Bench(BenchArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Grid: `uniform:k`, a comma-separated list of breakpoints, or a JSON file.
    #[arg(long, default_value = "uniform:4", allow_hyphen_values = true)]
    pub grid: String,
    /// Basis: arc or legendre.
    #[arg(long, default_value = "arc")]
    pub basis: String,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Seed recorded in the metadata (runs are deterministic).
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, Clone)]
pub struct ExpandArgs {
    #[command(flatten)]
    pub common: Common,
    /// Basis parameter b ∈ {0, −1}.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub b: i32,
    /// Catalog function name.
    #[arg(long)]
    pub func: Option<String>,
    /// Trigonometric coefficients, e.g. "a0=1,a2=0.5,b3=-1".
    #[arg(long, allow_hyphen_values = true)]
    pub trig: Option<String>,
    /// Chop tolerance of the adaptive transform.
    #[arg(long, default_value_t = 1e-14)]
    pub tol: f64,
    /// Magnitude above which a coefficient counts as significant.
    #[arg(long, default_value_t = 1e-11)]
    pub sig_tol: f64,
}

#[derive(Args, Debug, Clone)]
pub struct SolveArgs {
    #[command(flatten)]
    pub common: Common,
    /// screened_poisson, heat, schrodinger or convection_diffusion.
    #[arg(long)]
    pub problem: String,
    /// Right-hand side (screened Poisson) or initial condition.
    #[arg(long)]
    pub func: String,
    /// Truncation size (rounded up to whole blocks).
    #[arg(long)]
    pub trunc: usize,
    /// Screening parameter ω.
    #[arg(long, default_value_t = 1.5)]
    pub omega: f64,
    /// Velocity v(θ) for convection-diffusion (catalog name).
    #[arg(long, default_value = "convdiff_v")]
    pub velocity: String,
    /// Sample times "t0,t1,count".
    #[arg(long, default_value = "0,1,11")]
    pub tspan: String,
    /// Number of θ samples in solution.csv.
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    /// Highest derivative reconstructed (≤ 3).
    #[arg(long, default_value_t = 2)]
    pub dmax: usize,
    /// Section size for derivative reconstruction (default 15·M).
    #[arg(long)]
    pub section: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct BenchArgs {
    /// Number of elements of the uniform grid.
    #[arg(long, default_value_t = 4)]
    pub elements: usize,
    /// Comma-separated sizes N.
    #[arg(long, default_value = "4096,8192,16384,32768,65536")]
    pub sizes: String,
    #[arg(long, default_value_t = 5)]
    pub repeats: usize,
    #[arg(long, default_value_t = 1.5)]
    pub omega: f64,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Parse arguments, run, and return the process exit code: 0 on success,
/// 2 for invalid configuration (including unknown function names), 1 for
/// solver failures.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let res = match &cli.command {
        Command::Expand(a) => cmd_expand(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match res {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) => 2,
                _ => 1,
            }
        }
    }
}

/// Collects validation problems into one report.
#[derive(Default)]
struct Problems(Vec<String>);

impl Problems {
    fn push(&mut self, s: impl Into<String>) {
        self.0.push(s.into());
    }
    fn check<T>(&mut self, r: Result<T>) -> Option<T> {
        r.map_err(|e| match e {
            Error::Config(m) => self.push(m),
            e => self.push(e.to_string()),
        })
        .ok()
    }
    fn finish(self) -> Result<()> {
        if self.0.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(self.0.join("; ")))
        }
    }
}

fn lookup(name: &str) -> Result<catalog::RealFn> {
    catalog::lookup(name).ok_or_else(|| {
        let known: Vec<&str> = catalog::NAMES.iter().map(|(n, _)| *n).collect();
        Error::Config(format!("unknown function '{name}' (known: {})", known.join(", ")))
    })
}

/// Parse "a0=1,a2=0.5,b3=-1" into (a₀, [a₁..], [b₁..]).
pub fn parse_trig(s: &str) -> Result<(f64, Vec<f64>, Vec<f64>)> {
    let (mut a0, mut a, mut b) = (0.0, vec![], vec![]);
    for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
        let (key, val) = item
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("trig term '{item}' is not of the form a3=0.5")))?;
        let v: f64 = val.trim().parse().map_err(|_| Error::Config(format!("bad number in '{item}'")))?;
        let key = key.trim();
        let (kind, idx) = key.split_at(1);
        let n: usize = idx.parse().map_err(|_| Error::Config(format!("bad index in '{item}'")))?;
        match (kind, n) {
            ("a", 0) => a0 = v,
            ("b", 0) => return Err(Error::Config("b0 is not a trigonometric term".into())),
            ("a", n) | ("b", n) => {
                let target = if kind == "a" { &mut a } else { &mut b };
                if target.len() < n {
                    target.resize(n, 0.0);
                }
                target[n - 1] = v;
            }
            _ => return Err(Error::Config(format!("trig term '{item}' must start with a or b"))),
        }
    }
    Ok((a0, a, b))
}

fn trig_eval(a0: f64, a: &[f64], b: &[f64], t: f64) -> f64 {
    let mut s = a0;
    for (k, v) in a.iter().enumerate() {
        s += v * ((k + 1) as f64 * t).cos();
    }
    for (k, v) in b.iter().enumerate() {
        s += v * ((k + 1) as f64 * t).sin();
    }
    s
}

/// Polynomial degree carried by storage block `block`.
fn block_degree(kind: BasisKind, b: i32, block: usize) -> usize {
    match (kind, b) {
        // slot s: p_n at 2n, q_n at 2n − 1
        (BasisKind::Arc, 0) => block.div_ceil(2),
        // hats are degree one; bubble block j is local slot j + 1
        (BasisKind::Arc, _) => (block + 1).div_ceil(2).max(1),
        (BasisKind::Legendre, 0) => block,
        (BasisKind::Legendre, _) => if block == 0 { 1 } else { block + 1 },
    }
}

pub fn cmd_expand(args: &ExpandArgs) -> Result<()> {
    let mut p = Problems::default();
    let grid = p.check(PiecewiseGrid::parse(&args.common.grid));
    let kind = p.check(args.common.basis.parse::<BasisKind>());
    if args.b != 0 && args.b != -1 {
        p.push(format!("b must be 0 or -1, got {}", args.b));
    }
    let source = match (&args.func, &args.trig) {
        (Some(_), Some(_)) => {
            p.push("give either --func or --trig, not both");
            None
        }
        (None, None) => {
            p.push("one of --func or --trig is required");
            None
        }
        (Some(name), None) => p.check(lookup(name)).map(|f| (f, None)),
        (None, Some(spec)) => p.check(parse_trig(spec)).map(|(a0, a, b)| {
            let (ac, bc) = (a.clone(), b.clone());
            let f: catalog::RealFn = Box::new(move |t| trig_eval(a0, &ac, &bc, t));
            (f, Some((a0, a, b)))
        }),
    };
    p.finish()?;
    let (grid, kind, (f, trig)) = (grid.unwrap(), kind.unwrap(), source.unwrap());
    let m = grid.m();
    let coeffs = match kind {
        BasisKind::Arc => {
            let basis = PiecewiseBasis::new(grid.clone(), args.b)?;
            match &trig {
                Some((a0, a, b)) => basis.trig_exact_expand(*a0, a, b)?,
                None => basis.transform(&*f, args.tol)?,
            }
        }
        BasisKind::Legendre => LegendreBasis::new(grid.clone(), args.b)?.transform(&*f, args.tol)?,
    };
    let rows: Vec<Vec<Cell>> = coeffs
        .iter()
        .enumerate()
        .map(|(i, v)| vec![i.into(), (i / m).into(), (i % m).into(), (*v).into()])
        .collect();
    let out = &args.common.out;
    write_csv(&out.join("coefficients.csv"), &["index", "block", "element", "value"], &rows)?;
    let mut decay: Vec<f64> = vec![];
    for (i, v) in coeffs.iter().enumerate() {
        let d = block_degree(kind, args.b, i / m);
        if decay.len() <= d {
            decay.resize(d + 1, 0.0);
        }
        decay[d] = decay[d].max(v.abs());
    }
    let drows: Vec<Vec<Cell>> = decay.iter().enumerate().map(|(d, v)| vec![d.into(), (*v).into()]).collect();
    write_csv(&out.join("decay.csv"), &["degree", "max_abs"], &drows)?;
    let sig = significant(&coeffs, args.sig_tol);
    let rho = solvers::fit_rho(&decay);
    write_json(
        &out.join("meta.json"),
        &json!({
            "command": "expand",
            "config": {
                "grid": grid.theta, "basis": kind, "b": args.b, "func": args.func, "trig": args.trig,
                "tol": args.tol, "sig_tol": args.sig_tol, "seed": args.common.seed,
            },
            "elements": m,
            "n_coeffs": coeffs.len(),
            "significant": sig,
            "rho": if rho.is_finite() { json!(rho) } else { json!(null) },
        }),
    )?;
    println!("{} coefficients, {sig} significant (> {:e})", coeffs.len(), args.sig_tol);
    if rho.is_finite() {
        println!("fitted decay rate rho = {rho:.4}");
    }
    Ok(())
}

/// "t0,t1,count" → sample times.
pub fn parse_tspan(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || Error::Config(format!("tspan '{s}' must be t0,t1,count"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let t0: f64 = parts[0].parse().map_err(|_| bad())?;
    let t1: f64 = parts[1].parse().map_err(|_| bad())?;
    let k: usize = parts[2].parse().map_err(|_| bad())?;
    if k < 1 || !(t1 >= t0) {
        return Err(bad());
    }
    if k == 1 {
        return Ok(vec![t1]);
    }
    Ok((0..k).map(|i| t0 + (t1 - t0) * i as f64 / (k - 1) as f64).collect())
}

fn sample_thetas(k: usize) -> Vec<f64> {
    (0..k).map(|i| -PI + 2.0 * PI * (i as f64 + 0.5) / k as f64).collect()
}

fn drift_rows(rep: &solvers::DriftReport) -> Vec<Vec<Cell>> {
    let mut rows = vec![];
    for (t, r) in rep.times.iter().zip(&rep.drift) {
        for (d, v) in r.iter().enumerate() {
            rows.push(vec![(*t).into(), d.into(), (*v).into()]);
        }
    }
    rows
}

pub fn cmd_solve(args: &SolveArgs) -> Result<()> {
    let mut p = Problems::default();
    let grid = p.check(PiecewiseGrid::parse(&args.common.grid));
    let kind = p.check(args.common.basis.parse::<BasisKind>());
    let f = p.check(lookup(&args.func));
    let v = if args.problem == "convection_diffusion" { p.check(lookup(&args.velocity)) } else { None };
    let times = p.check(parse_tspan(&args.tspan));
    if !["screened_poisson", "heat", "schrodinger", "convection_diffusion"].contains(&args.problem.as_str()) {
        p.push(format!("unknown problem '{}'", args.problem));
    }
    if args.dmax > 3 {
        p.push("dmax must be at most 3");
    }
    if args.samples == 0 {
        p.push("samples must be positive");
    }
    if let Some(g) = &grid {
        if args.trunc < 3 * g.m() {
            p.push(format!("trunc must be at least 3·M = {}", 3 * g.m()));
        }
    }
    if args.problem == "screened_poisson" && !(args.omega > 0.0) {
        p.push("omega must be positive");
    }
    p.finish()?;
    let (grid, kind, f, times) = (grid.unwrap(), kind.unwrap(), f.unwrap(), times.unwrap());
    let mut disc = Disc::new(kind, grid.clone())?;
    if let Some(s) = args.section {
        disc = disc.with_section(s);
    }
    let n = disc.trunc(args.trunc);
    let out = &args.common.out;
    let thetas = sample_thetas(args.samples);
    let config = json!({
        "grid": grid.theta, "basis": kind, "problem": args.problem, "func": args.func, "trunc": n,
        "omega": args.omega, "velocity": args.velocity, "tspan": args.tspan, "samples": args.samples,
        "dmax": args.dmax, "section": args.section, "seed": args.common.seed,
    });
    let dnames = ["u", "du", "d2u", "d3u"];
    if args.problem == "screened_poisson" {
        let u = solvers::solve_screened_poisson(&disc, &*f, args.omega, n)?;
        let field = Field::new(&disc, u, args.dmax.max(2))?;
        let mut header: Vec<&str> = vec!["theta"];
        header.extend(&dnames[..=args.dmax.max(2)]);
        header.push("residual");
        let mut rows = vec![];
        let mut res_max = 0.0f64;
        for &t in &thetas {
            let vals = (0..=field.dmax()).map(|d| field.value(d, t)).collect::<Result<Vec<_>>>()?;
            let res = -vals[2] + args.omega * args.omega * vals[0] - f(t);
            if grid.theta.iter().all(|b| (t - b).abs() > 1e-3) {
                res_max = res_max.max(res.abs());
            }
            let mut row: Vec<Cell> = vec![t.into()];
            row.extend(vals.into_iter().map(Cell::from));
            row.push(res.into());
            rows.push(row);
        }
        write_csv(&out.join("solution.csv"), &header, &rows)?;
        let rep = solvers::periodic_drift(&[0.0], std::slice::from_ref(&field))?;
        write_csv(&out.join("drift.csv"), &["t", "d", "value"], &drift_rows(&rep))?;
        write_json(
            &out.join("meta.json"),
            &json!({ "command": "solve", "config": config, "residual_max": res_max, "drift": rep.drift[0] }),
        )?;
        println!("solved with n = {n}; max residual away from breakpoints {res_max:e}");
        return Ok(());
    }
    let vfn = v.unwrap_or_else(|| Box::new(|_| 0.0));
    let eq = match args.problem.as_str() {
        "heat" => Evolution::Heat,
        "schrodinger" => Evolution::Schrodinger,
        _ => Evolution::ConvectionDiffusion(&*vfn),
    };
    let traj = solvers::solve_evolution(&disc, &eq, &*f, None, n, &times)?;
    let rep = traj.drift(&disc, args.dmax)?;
    let norms = traj.mass_norms(&disc)?;
    let last = times.len() - 1;
    let (re, im) = traj.parts(last);
    let fre = Field::new(&disc, re.to_vec(), args.dmax)?;
    let mut rows = vec![];
    let header: Vec<&str> = match im {
        Some(_) => vec!["theta", "re", "im", "abs"],
        None => {
            let mut h = vec!["theta"];
            h.extend(&dnames[..=args.dmax]);
            h
        }
    };
    for &t in &thetas {
        let mut row: Vec<Cell> = vec![t.into()];
        match im {
            Some(im) => {
                let (a, b) = (disc.eval(re, t)?, disc.eval(im, t)?);
                row.extend([a.into(), b.into(), a.hypot(b).into()]);
            }
            None => {
                for d in 0..=args.dmax {
                    row.push(fre.value(d, t)?.into());
                }
            }
        }
        rows.push(row);
    }
    write_csv(&out.join("solution.csv"), &header, &rows)?;
    write_csv(&out.join("drift.csv"), &["t", "d", "value"], &drift_rows(&rep))?;
    let nrows: Vec<Vec<Cell>> = times.iter().zip(&norms).map(|(t, v)| vec![(*t).into(), (*v).into()]).collect();
    write_csv(&out.join("norm.csv"), &["t", "norm"], &nrows)?;
    let n0 = norms[0];
    let norm_dev = norms.iter().map(|v| ((v - n0) / n0).abs()).fold(0.0, f64::max);
    write_json(
        &out.join("meta.json"),
        &json!({
            "command": "solve", "config": config, "final_time": times[last],
            "final_drift": rep.drift[last], "norm_relative_deviation": norm_dev,
        }),
    )?;
    println!("evolved with n = {n} to t = {}; final drift {:?}", times[last], rep.drift[last]);
    Ok(())
}

pub fn cmd_bench(args: &BenchArgs) -> Result<()> {
    let mut p = Problems::default();
    let sizes: Vec<usize> = args
        .sizes
        .split(',')
        .filter_map(|s| match s.trim().parse() {
            Ok(v) => Some(v),
            Err(_) => {
                p.push(format!("bad size '{s}'"));
                None
            }
        })
        .collect();
    if args.elements < 3 {
        p.push("bench needs at least 3 elements");
    }
    if sizes.len() < 2 {
        p.push("bench needs at least two sizes");
    }
    p.finish()?;
    let rows = solvers::bench_screened_poisson(args.elements, &sizes, args.repeats, args.omega)?;
    let cells: Vec<Vec<Cell>> =
        rows.iter().map(|r| vec![r.n.into(), r.build_seconds.into(), r.solve_seconds.into()]).collect();
    write_csv(&args.out.join("bench.csv"), &["n", "build_seconds", "solve_seconds"], &cells)?;
    let ns: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let build = solvers::loglog_slope(&ns, &rows.iter().map(|r| r.build_seconds).collect::<Vec<_>>());
    let solve = solvers::loglog_slope(&ns, &rows.iter().map(|r| r.solve_seconds).collect::<Vec<_>>());
    write_json(
        &args.out.join("meta.json"),
        &json!({
            "command": "bench",
            "config": { "elements": args.elements, "sizes": sizes, "repeats": args.repeats, "omega": args.omega, "seed": args.seed },
            "rows": rows, "build_slope": build, "solve_slope": solve,
        }),
    )?;
    println!("build slope {build:.3}, solve slope {solve:.3}");
    Ok(())
}
