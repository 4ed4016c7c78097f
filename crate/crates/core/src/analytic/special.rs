//! Exponential integrals on the negative axis.
//!
//! `Ei(x) = -E1(-x)` for `x < 0`. `E1(z)` uses its convergent power series
//! for `z <= 1` and the Lentz-evaluated continued fraction beyond, where the
//! alternating series would cancel catastrophically.

use super::AnalyticError;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082_402_43;
const EPS: f64 = 1e-17;
const MAX_ITER: usize = 10_000;

/// `E1(z) = ∫_z^∞ e^{-t}/t dt` for `0 < z <= 1`.
fn e1_series(z: f64) -> f64 {
    // -γ - ln z - Σ_{n≥1} (-z)^n / (n·n!)
    let mut term = 1.0;
    let mut sum = 0.0;
    for n in 1..MAX_ITER {
        let nf = n as f64;
        term *= -z / nf;
        let add = term / nf;
        sum += add;
        if add.abs() < EPS * sum.abs() {
            break;
        }
    }
    -EULER_GAMMA - z.ln() - sum
}

/// `e^z·E1(z)` for `z > 1` by continued fraction (modified Lentz).
fn scaled_e1_cf(z: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = z + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// `E1(z)` for `z > 0`.
pub fn exp_int_e1(z: f64) -> f64 {
    debug_assert!(z > 0.0);
    if z <= 1.0 {
        e1_series(z)
    } else {
        scaled_e1_cf(z) * (-z).exp()
    }
}

/// `e^z·E1(z)` for `z > 0`, finite for arbitrarily large `z`; `+∞` maps to 0.
pub fn scaled_exp_int_e1(z: f64) -> f64 {
    if z == f64::INFINITY {
        0.0
    } else if z <= 1.0 {
        z.exp() * e1_series(z)
    } else {
        scaled_e1_cf(z)
    }
}

/// `Ei(x) = ∫_{-∞}^x e^t/t dt`, defined here for `x < 0` only.
pub fn exp_int_ei(x: f64) -> Result<f64, AnalyticError> {
    if x < 0.0 {
        Ok(-exp_int_e1(-x))
    } else {
        Err(AnalyticError::Domain(format!("Ei evaluated at x = {x}, need x < 0")))
    }
}
