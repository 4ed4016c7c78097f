//! Independent oracles shared by the integration suites.
#![allow(dead_code)]

use fdnoma_core::sinr::{self, AntennaChoice};
use fdnoma_core::{ChannelRealization, SystemParams};

/// `∫_0^∞ g(v) dv` by exp-sinh double-exponential quadrature, halving the
/// step until two successive estimates agree to `rel`.
pub fn exp_sinh_integral(g: impl Fn(f64) -> f64, rel: f64) -> f64 {
    use std::f64::consts::FRAC_PI_2;
    let node = |t: f64| {
        let v = (FRAC_PI_2 * t.sinh()).exp();
        let w = v * FRAC_PI_2 * t.cosh();
        (v, w)
    };
    let eval = |t: f64| {
        let (v, w) = node(t);
        if !v.is_finite() || v == 0.0 || w == 0.0 {
            return 0.0;
        }
        let y = g(v) * w;
        if y.is_finite() { y } else { 0.0 }
    };
    let t_max = 4.5;
    let mut h = 0.5;
    let mut sum: f64 = eval(0.0);
    let mut k = 1;
    while (k as f64) * h <= t_max {
        sum += eval(k as f64 * h) + eval(-(k as f64) * h);
        k += 1;
    }
    let mut prev = sum * h;
    for _ in 0..12 {
        h *= 0.5;
        // only the new odd nodes
        let mut k = 1;
        while (k as f64) * h <= t_max {
            sum += eval(k as f64 * h) + eval(-(k as f64) * h);
            k += 2;
        }
        let est = sum * h;
        if (est - prev).abs() <= rel * est.abs() {
            return est;
        }
        prev = est;
    }
    prev
}

/// `Ei(x)` for `x < 0` from its defining integral:
/// `Ei(x) = -e^{x} ∫_0^∞ e^{-v} / (v - x) dv`.
pub fn ei_oracle(x: f64) -> f64 {
    assert!(x < 0.0);
    -x.exp() * exp_sinh_integral(|v| (-v).exp() / (v - x), 1e-14)
}

/// All `(i, j, k)` in lexicographic order.
pub fn all_choices(r: &ChannelRealization) -> Vec<AntennaChoice> {
    let mut out = Vec::with_capacity(r.m_b * r.m_r * r.m_t);
    for i in 0..r.m_b {
        for j in 0..r.m_r {
            for k in 0..r.m_t {
                out.push(AntennaChoice { i, j, k });
            }
        }
    }
    out
}

/// First lexicographic maximizer of `f` by plain enumeration.
pub fn brute_argmax(r: &ChannelRealization, f: impl Fn(AntennaChoice) -> f64) -> AntennaChoice {
    let mut best: Option<(AntennaChoice, f64)> = None;
    for c in all_choices(r) {
        let v = f(c);
        match best {
            Some((_, bv)) if v <= bv => {}
            _ => best = Some((c, v)),
        }
    }
    best.unwrap().0
}

/// Sum rate recomputed from scratch (no shared helper with the library's
/// objective other than the SINR definitions).
pub fn sum_rate_oracle(r: &ChannelRealization, c: AntennaChoice, p: &SystemParams) -> f64 {
    let b = sinr::sinr_bundle(r, c, p);
    (1.0 + b.gamma_1).log2() + (1.0 + b.gamma_2).log2()
}

/// Two-sided Kolmogorov–Smirnov statistic of `samples` against `cdf`.
pub fn ks_statistic(mut samples: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(idx, &x)| {
            let f = cdf(x);
            let lo = f - idx as f64 / n;
            let hi = (idx + 1) as f64 / n - f;
            lo.max(hi)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic KS critical value at significance 0.01.
pub fn ks_critical_001(n: usize) -> f64 {
    1.628 / (n as f64).sqrt()
}

/// The reference four-antenna setup at a joint transmit power.
pub fn reference(db: f64) -> SystemParams {
    SystemParams::default().with_power_db(db)
}
