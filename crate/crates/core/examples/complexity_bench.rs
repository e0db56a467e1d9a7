//! Build and solve timings for the structured screened-Poisson solver.
//! Usage: `cargo run --release --example complexity_bench [max_log2_n]`.

use arcsem::solvers::{bench_screened_poisson, loglog_slope};

fn main() -> arcsem::Result<()> {
    let top: u32 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(14);
    let sizes: Vec<usize> = (10..=top).map(|k| 1usize << k).collect();
    let rows = bench_screened_poisson(4, &sizes, 5, 1.5)?;
    println!("{:>8} {:>14} {:>14}", "N", "build [s]", "solve [s]");
    for r in &rows {
        println!("{:>8} {:>14.3e} {:>14.3e}", r.n, r.build_seconds, r.solve_seconds);
    }
    let ns: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let b: Vec<f64> = rows.iter().map(|r| r.build_seconds).collect();
    let s: Vec<f64> = rows.iter().map(|r| r.solve_seconds).collect();
    println!("log-log slopes: build {:.3}, solve {:.3}", loglog_slope(&ns, &b), loglog_slope(&ns, &s));
    Ok(())
}
