//! Closed-form and semi-closed-form performance of the two proposed schemes.
//!
//! The closed forms characterize the selection variants whose stages act on
//! independent gain groups: [`Scheme::MaxU1Analytic`] for the near-user
//! scheme and [`Scheme::MaxU2Decoupled`] for the far-user scheme. Under
//! those variants every selected gain is an order statistic of i.i.d.
//! exponentials, so `1 - (1 - e^{-t})^M` expands into the alternating
//! binomial sums used throughout.
//!
//! [`Scheme::MaxU1Analytic`]: crate::selection::Scheme::MaxU1Analytic
//! [`Scheme::MaxU2Decoupled`]: crate::selection::Scheme::MaxU2Decoupled

pub mod quadrature;
pub mod special;

use std::f64::consts::LN_2;

use thiserror::Error;

use crate::config::{ConfigError, MeanGains, SystemParams};
pub use quadrature::{integrate, integrate_semi_infinite, QuadratureResult, Tolerance};
pub use special::{exp_int_e1, exp_int_ei, scaled_exp_int_e1};

/// Largest antenna count the alternating sums are evaluated for.
pub const MAX_ANTENNAS: usize = 16;

/// Relative distance from a removable singularity below which the closed
/// forms switch to quadrature.
pub const SINGULAR_REL: f64 = 1e-6;

/// Slack allowed on raw CDF values before clamping to `[0, 1]`.
pub const CDF_SLACK: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("NON_CONVERGED: quadrature stopped at {0:?}")]
    NonConverged(QuadratureResult),
    #[error("ANTENNA_COUNT_UNSUPPORTED: {name} = {value} exceeds {MAX_ANTENNAS}")]
    AntennaCountUnsupported { name: &'static str, value: usize },
    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// Neumaier-compensated sum.
#[derive(Debug, Default, Clone, Copy)]
struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    #[inline]
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    fn value(self) -> f64 {
        self.sum + self.comp
    }
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, r| acc * (n - r) as f64 / (r + 1) as f64).round()
}

/// `M·(-1)^p·C(M-1, p)/(p+1)` for `p = 0..M`; these weights sum to one.
fn order_weights(m: usize) -> Vec<f64> {
    (0..m)
        .map(|p| {
            let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
            m as f64 * sign * binomial(m - 1, p) / (p + 1) as f64
        })
        .collect()
}

/// `Σ_p w_p·term(p+1)` with compensated accumulation.
#[inline]
fn weighted_sum(weights: &[f64], term: impl Fn(f64) -> f64) -> f64 {
    let mut acc = CompensatedSum::default();
    for (p, w) in weights.iter().enumerate() {
        acc.add(w * term((p + 1) as f64));
    }
    acc.value()
}

/// Checks the raw value and clamps it into `[0, 1]`.
#[inline]
fn clamp_probability(raw: f64) -> f64 {
    debug_assert!(
        (-CDF_SLACK..=1.0 + CDF_SLACK).contains(&raw),
        "probability {raw} outside [0, 1] beyond slack"
    );
    raw.clamp(0.0, 1.0)
}

/// `(1/ln2)·∫_0^upper (1 - F(x))/(1 + x) dx`; `upper = None` means `∞`.
pub fn rate_from_cdf(
    cdf: impl Fn(f64) -> f64,
    upper: Option<f64>,
    tol: Tolerance,
) -> Result<QuadratureResult, AnalyticError> {
    let integrand = |x: f64| (1.0 - cdf(x)) / (1.0 + x);
    let r = match upper {
        Some(b) => integrate(integrand, 0.0, b, tol)?,
        None => integrate_semi_infinite(integrand, 1.0, tol)?,
    };
    Ok(scale_result(r, 1.0 / LN_2))
}

fn scale_result(r: QuadratureResult, c: f64) -> QuadratureResult {
    QuadratureResult { value: r.value * c, abs_error_bound: r.abs_error_bound * c, ..r }
}

/// `∫_0^∞ e^{-αx} / ((1 + x)(1 + βx)) dx`.
///
/// Partial fractions give `[S(α) - S(α/β)] / (1 - β)` with
/// `S(z) = e^z E1(z)`; at `β = 1` the singularity is removable and the
/// integral is taken numerically instead.
fn exp_rational_integral(alpha: f64, beta: f64, tol: Tolerance) -> Result<f64, AnalyticError> {
    if (beta - 1.0).abs() < SINGULAR_REL {
        let scale = 1.0 / alpha.max(1e-300);
        let r = integrate_semi_infinite(
            |x| (-alpha * x).exp() / ((1.0 + x) * (1.0 + beta * x)),
            scale.clamp(1e-3, 1e12),
            tol,
        )?;
        return Ok(r.value);
    }
    let tail = if beta == 0.0 { 0.0 } else { scaled_exp_int_e1(alpha / beta) };
    Ok((scaled_exp_int_e1(alpha) - tail) / (1.0 - beta))
}

/// Near-user outage threshold `max(θ2/(a2 - a1θ2), θ1/a1)`; `+∞` when
/// `θ2 >= a2/a1` (the far-user symbol can never be decoded).
pub fn zeta(params: &SystemParams) -> f64 {
    let (theta1, theta2) = params.thresholds();
    if theta2 >= params.sinr_ceiling() {
        return f64::INFINITY;
    }
    (theta2 / (params.a2 - params.a1 * theta2)).max(theta1 / params.a1)
}

/// Closed-form evaluator bound to one validated parameter set.
#[derive(Debug, Clone)]
pub struct AnalyticModel {
    params: SystemParams,
    gains: MeanGains,
    w_b: Vec<f64>,
    w_r: Vec<f64>,
    w_t: Vec<f64>,
}

impl AnalyticModel {
    pub fn new(params: &SystemParams) -> Result<Self, AnalyticError> {
        let params = params.validate()?;
        for (name, value) in [("m_b", params.m_b), ("m_r", params.m_r), ("m_t", params.m_t)] {
            if value > MAX_ANTENNAS {
                return Err(AnalyticError::AntennaCountUnsupported { name, value });
            }
        }
        Ok(Self {
            params,
            gains: params.mean_gains(),
            w_b: order_weights(params.m_b),
            w_r: order_weights(params.m_r),
            w_t: order_weights(params.m_t),
        })
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn gains(&self) -> &MeanGains {
        &self.gains
    }

    /// `x / (a2 - a1·x)`, the gain ratio a far-symbol SINR of `x` requires.
    #[inline]
    fn far_ratio(&self, x: f64) -> f64 {
        x / (self.params.a2 - self.params.a1 * x)
    }

    /// Upper integration limit for far-user rates, just inside `a2/a1`.
    fn far_upper(&self) -> f64 {
        self.params.sinr_ceiling() * (1.0 - 1e-12)
    }

    // ---- survival functions of the selected links -------------------------

    /// `P(γ12 > x)` under max-U1: strongest of `m_b` BS→U1 gains against the
    /// weakest of `m_t` relay→U1 gains.
    fn surv_g12_max_u1(&self, x: f64) -> f64 {
        let g = &self.gains;
        let m_t = self.params.m_t as f64;
        let r = self.far_ratio(x);
        weighted_sum(&self.w_b, |n| {
            (-n * r / g.lam_su1).exp() / (1.0 + g.lam_ru1 * n * r / (m_t * g.lam_su1))
        })
    }

    /// `P(γR > x)` under max-U1 (analytic variant): strongest of `m_r`
    /// BS→relay gains, unselected SI.
    fn surv_gr_max_u1(&self, x: f64) -> f64 {
        let g = &self.gains;
        let r = self.far_ratio(x);
        weighted_sum(&self.w_r, |n| {
            (-n * r / g.lam_br).exp() / (1.0 + g.lam_si * n * r / g.lam_br)
        })
    }

    /// `P(γ12 > x)` under max-U2: both near-user gains unselected.
    fn surv_g12_max_u2(&self, x: f64) -> f64 {
        let g = &self.gains;
        let r = self.far_ratio(x);
        (-r / g.lam_su1).exp() / (1.0 + g.lam_ru1 * r / g.lam_su1)
    }

    /// `P(γR > x)` under max-U2: strongest of `m_b` BS→relay gains against
    /// the weakest of `m_r` SI gains.
    fn surv_gr_max_u2(&self, x: f64) -> f64 {
        let g = &self.gains;
        let m_r = self.params.m_r as f64;
        let r = self.far_ratio(x);
        weighted_sum(&self.w_b, |n| {
            (-n * r / g.lam_br).exp() / (1.0 + g.lam_si * n * r / (m_r * g.lam_br))
        })
    }

    /// `P(γRU2 > x)` under max-U2: strongest of `m_t` relay→U2 gains.
    fn surv_gru2_max_u2(&self, x: f64) -> f64 {
        let lam = self.gains.lam_ru2;
        weighted_sum(&self.w_t, |n| (-n * x / lam).exp())
    }

    // ---- near-user CDFs and rates ----------------------------------------

    /// CDF of `γ1` under max-U1.
    pub fn cdf_gamma1_max_u1(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let g = &self.gains;
        let (a1, m_t) = (self.params.a1, self.params.m_t as f64);
        let s = weighted_sum(&self.w_b, |n| {
            (-n * x / (a1 * g.lam_su1)).exp() / (1.0 + n * g.lam_ru1 * x / (m_t * a1 * g.lam_su1))
        });
        clamp_probability(1.0 - s)
    }

    /// Ergodic near-user rate under max-U1, in closed form.
    pub fn rate_u1_max_u1(&self) -> Result<f64, AnalyticError> {
        let g = &self.gains;
        let (a1, m_t) = (self.params.a1, self.params.m_t as f64);
        let mut acc = CompensatedSum::default();
        for (p, w) in self.w_b.iter().enumerate() {
            let n = (p + 1) as f64;
            let alpha = n / (a1 * g.lam_su1);
            let beta = n * g.lam_ru1 / (m_t * a1 * g.lam_su1);
            acc.add(w * exp_rational_integral(alpha, beta, Tolerance::tight())?);
        }
        Ok(acc.value() / LN_2)
    }

    /// CDF of `γ1` under max-U2 (no selection gain on the near-user links).
    pub fn cdf_gamma1_max_u2(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let g = &self.gains;
        let a1 = self.params.a1;
        clamp_probability(1.0 - (-x / (a1 * g.lam_su1)).exp() / (1.0 + g.lam_ru1 * x / (a1 * g.lam_su1)))
    }

    /// Ergodic near-user rate under max-U2, in closed form.
    pub fn rate_u1_max_u2(&self) -> Result<f64, AnalyticError> {
        let g = &self.gains;
        let a1 = self.params.a1;
        let alpha = 1.0 / (a1 * g.lam_su1);
        let beta = g.lam_ru1 / (a1 * g.lam_su1);
        Ok(exp_rational_integral(alpha, beta, Tolerance::tight())? / LN_2)
    }

    // ---- far-user CDFs and rates -----------------------------------------

    /// CDF of the end-to-end `γ2` under max-U1 (analytic variant); exactly 1
    /// from `a2/a1` on.
    pub fn cdf_gamma2_max_u1(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= self.params.sinr_ceiling() {
            return 1.0;
        }
        let surv = self.surv_g12_max_u1(x)
            * self.surv_gr_max_u1(x)
            * (-x / self.gains.lam_ru2).exp();
        clamp_probability(1.0 - surv)
    }

    /// Ergodic far-user rate under max-U1 by quadrature of the double-sum
    /// integrand on `[0, a2/a1)`.
    pub fn rate_u2_max_u1(&self, tol: Tolerance) -> Result<QuadratureResult, AnalyticError> {
        let g = self.gains;
        let m_t = self.params.m_t as f64;
        let integrand = |x: f64| {
            let r = self.far_ratio(x);
            let mut acc = CompensatedSum::default();
            for (p, wp) in self.w_b.iter().enumerate() {
                let np = (p + 1) as f64;
                let near = wp * (-np * r / g.lam_su1).exp()
                    / (1.0 + g.lam_ru1 * np * r / (m_t * g.lam_su1));
                for (q, wq) in self.w_r.iter().enumerate() {
                    let nq = (q + 1) as f64;
                    let relay =
                        wq * (-nq * r / g.lam_br).exp() / (1.0 + g.lam_si * nq * r / g.lam_br);
                    acc.add(near * relay);
                }
            }
            (-x / g.lam_ru2).exp() * acc.value() / (1.0 + x)
        };
        let r = integrate(integrand, 0.0, self.far_upper(), tol)?;
        Ok(scale_result(r, 1.0 / LN_2))
    }

    /// CDF of the end-to-end `γ2` under max-U2 (decoupled variant).
    pub fn cdf_gamma2_max_u2(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= self.params.sinr_ceiling() {
            return 1.0;
        }
        let surv = self.surv_g12_max_u2(x) * self.surv_gr_max_u2(x) * self.surv_gru2_max_u2(x);
        clamp_probability(1.0 - surv)
    }

    /// Ergodic far-user rate under max-U2 by quadrature of the double-sum
    /// integrand on `[0, a2/a1)`.
    pub fn rate_u2_max_u2(&self, tol: Tolerance) -> Result<QuadratureResult, AnalyticError> {
        let g = self.gains;
        let m_r = self.params.m_r as f64;
        let integrand = |x: f64| {
            let r = self.far_ratio(x);
            let lead = (-r / g.lam_su1).exp() / (1.0 + g.lam_ru1 * r / g.lam_su1);
            let mut acc = CompensatedSum::default();
            for (p, wp) in self.w_b.iter().enumerate() {
                let np = (p + 1) as f64;
                let relay = wp * (-np * r / g.lam_br).exp()
                    / (1.0 + g.lam_si * np * r / (m_r * g.lam_br));
                for (q, wq) in self.w_t.iter().enumerate() {
                    let nq = (q + 1) as f64;
                    acc.add(relay * wq * (-nq * x / g.lam_ru2).exp());
                }
            }
            lead * acc.value() / (1.0 + x)
        };
        let r = integrate(integrand, 0.0, self.far_upper(), tol)?;
        Ok(scale_result(r, 1.0 / LN_2))
    }

    // ---- outage ----------------------------------------------------------

    pub fn zeta(&self) -> f64 {
        zeta(&self.params)
    }

    /// Near-user outage under max-U1.
    pub fn outage_u1_max_u1(&self) -> f64 {
        let z = self.zeta();
        if z.is_infinite() {
            return 1.0;
        }
        let g = &self.gains;
        let m_t = self.params.m_t as f64;
        let s = weighted_sum(&self.w_b, |n| {
            (-n * z / g.lam_su1).exp() / (1.0 + g.lam_ru1 / g.lam_su1 * n * z / m_t)
        });
        clamp_probability(1.0 - s)
    }

    /// Near-user outage under max-U2.
    pub fn outage_u1_max_u2(&self) -> f64 {
        let z = self.zeta();
        if z.is_infinite() {
            return 1.0;
        }
        let g = &self.gains;
        clamp_probability(1.0 - (-z / g.lam_su1).exp() / (1.0 + g.lam_ru1 / g.lam_su1 * z))
    }

    fn far_threshold(&self) -> Option<f64> {
        let (_, theta2) = self.params.thresholds();
        (theta2 < self.params.sinr_ceiling()).then_some(theta2)
    }

    /// Far-user outage under max-U1 (analytic variant).
    pub fn outage_u2_max_u1(&self) -> f64 {
        match self.far_threshold() {
            None => 1.0,
            Some(t) => clamp_probability(
                1.0 - self.surv_gr_max_u1(t) * (-t / self.gains.lam_ru2).exp(),
            ),
        }
    }

    /// Far-user outage under max-U2 (decoupled variant).
    pub fn outage_u2_max_u2(&self) -> f64 {
        match self.far_threshold() {
            None => 1.0,
            Some(t) => clamp_probability(1.0 - self.surv_gru2_max_u2(t) * self.surv_gr_max_u2(t)),
        }
    }
}
