//! Named example functions, so runs can be configured without an
//! expression parser.

use std::f64::consts::PI;

pub type RealFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// Default smoothing width of the heat initial condition.
pub const HEAT_EPS: f64 = 0.005;

/// Registered names with a one-line description each.
pub const NAMES: &[(&str, &str)] = &[
    ("one", "the constant 1"),
    ("cos", "cos θ"),
    ("sin", "sin θ"),
    ("sin7", "sin 7θ"),
    ("exp_cos", "exp(cos θ)"),
    ("step_pi3", "2 + sgn(|θ| − π/3)"),
    ("fig5", "1 / (cos 2θ − cosh(1/5))"),
    ("fig5_text", "exp(sin θ) / (cos 2θ − cosh(1/5))"),
    ("heat_ic", "ε-smoothed ramp on [−π/4, π/4], ε = 0.005"),
    ("schrodinger_ic", "sin 7θ + exp(−cos θ)"),
    ("convdiff_ic", "exp(−cos 4θ)·s(θ), s = sin 3θ on |θ| ≤ π/4, sin θ otherwise"),
    ("convdiff_v", "−sin θ / 1000"),
    ("zero", "the constant 0"),
];

/// Look up a registered function by name.
pub fn lookup(name: &str) -> Option<RealFn> {
    let f: RealFn = match name {
        "one" => Box::new(|_| 1.0),
        "zero" => Box::new(|_| 0.0),
        "cos" => Box::new(f64::cos),
        "sin" => Box::new(f64::sin),
        "sin7" => Box::new(|t: f64| (7.0 * t).sin()),
        "exp_cos" => Box::new(|t: f64| t.cos().exp()),
        "step_pi3" => Box::new(step_pi3),
        "fig5" => Box::new(|t: f64| 1.0 / ((2.0 * t).cos() - 0.2f64.cosh())),
        "fig5_text" => Box::new(|t: f64| t.sin().exp() / ((2.0 * t).cos() - 0.2f64.cosh())),
        "heat_ic" => Box::new(|t| heat_ic(HEAT_EPS, t)),
        "schrodinger_ic" => Box::new(schrodinger_ic),
        "convdiff_ic" => Box::new(convdiff_ic),
        "convdiff_v" => Box::new(|t: f64| -t.sin() / 1000.0),
        _ => return None,
    };
    Some(f)
}

/// 2 + sgn(|θ| − π/3): 1 inside |θ| < π/3, 3 outside.
pub fn step_pi3(t: f64) -> f64 {
    2.0 + (t.abs() - PI / 3.0).signum()
}

/// The ε-smoothed heat initial condition, piece by piece as stated.
pub fn heat_ic(eps: f64, t: f64) -> f64 {
    let q = PI / 4.0;
    if t < -q - eps {
        0.0
    } else if t < -q + eps {
        1.0 + (t - eps + q) / (2.0 * eps)
    } else if t < q - eps {
        2.0 + (t + eps - q) / PI
    } else if t < q + eps {
        2.0 - (t + eps - q) / eps
    } else {
        0.0
    }
}

/// Breakpoints of the heat experiment's grid for smoothing width ε.
pub fn heat_grid(eps: f64) -> Vec<f64> {
    let q = PI / 4.0;
    vec![-PI, -q - eps, -q + eps, q - eps, q + eps, PI]
}

pub fn schrodinger_ic(t: f64) -> f64 {
    (7.0 * t).sin() + (-t.cos()).exp()
}

pub fn convdiff_ic(t: f64) -> f64 {
    let s = if t.abs() <= PI / 4.0 { (3.0 * t).sin() } else { t.sin() };
    (-(4.0 * t).cos()).exp() * s
}
