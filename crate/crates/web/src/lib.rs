//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every export returns a flat `Float64Array` with a fixed row stride so the
//! page can plot without any serialization layer. The `*_rows` functions
//! hold the logic and run natively too; the exports only map errors.

use fdnoma_core::analytic::{AnalyticError, AnalyticModel};
use fdnoma_core::montecarlo::{analytic_metrics, simulate};
use fdnoma_core::{Scheme, SystemParams};
use wasm_bindgen::prelude::*;

/// Values per row of [`analytic_curves`]: power, then rate_u1, rate_u2,
/// outage_u1, outage_u2 for max-U1 followed by the same four for max-U2.
pub const CURVE_STRIDE: usize = 9;
/// Values per row of [`cdf_curves`]: x, F under max-U1, F under max-U2.
pub const CDF_STRIDE: usize = 3;
/// Values per scheme of [`simulate_point`]: rate_u1, rate_u2, rate_sum,
/// outage_u1, outage_u2, jain.
pub const SIM_STRIDE: usize = 6;
/// Keeps a click responsive on one browser thread.
pub const MAX_TRIALS: u64 = 200_000;
const MAX_POINTS: usize = 2_000;

/// User-adjustable part of the system; the rest stays at the reference
/// values (unit variances, joint BS/relay power).
#[wasm_bindgen]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Setup {
    pub m_b: usize,
    pub m_r: usize,
    pub m_t: usize,
    /// Near-user power share; the far user gets `1 - a1`.
    pub a1: f64,
    pub var_si: f64,
    pub k1: f64,
    pub rate1: f64,
    pub rate2: f64,
}

#[wasm_bindgen]
impl Setup {
    #[wasm_bindgen(constructor)]
    pub fn new() -> Setup {
        let p = SystemParams::default();
        Setup {
            m_b: p.m_b,
            m_r: p.m_r,
            m_t: p.m_t,
            a1: p.a1,
            var_si: p.var_si,
            k1: p.k1,
            rate1: p.rate1,
            rate2: p.rate2,
        }
    }
}

impl Default for Setup {
    fn default() -> Self {
        Self::new()
    }
}

impl Setup {
    pub fn params(&self, power_db: f64) -> Result<SystemParams, String> {
        SystemParams {
            m_b: self.m_b,
            m_r: self.m_r,
            m_t: self.m_t,
            a1: self.a1,
            a2: 1.0 - self.a1,
            var_si: self.var_si,
            k1: self.k1,
            rate1: self.rate1,
            rate2: self.rate2,
            ..SystemParams::default()
        }
        .with_power_db(power_db)
        .validate()
        .map_err(|e| e.to_string())
    }
}

fn grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>, String> {
    if !start.is_finite() || !stop.is_finite() || step.is_nan() || step <= 0.0 || stop < start {
        return Err("need finite start <= stop and step > 0".into());
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
    if n > MAX_POINTS {
        return Err(format!("grid has {n} points, at most {MAX_POINTS} allowed"));
    }
    Ok((0..n).map(|i| start + i as f64 * step).collect())
}

pub fn analytic_rows(setup: &Setup, start: f64, stop: f64, step: f64) -> Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for db in grid(start, stop, step)? {
        let p = setup.params(db)?;
        out.push(db);
        for scheme in [Scheme::MaxU1Analytic, Scheme::MaxU2Decoupled] {
            match analytic_metrics(&p, scheme) {
                Ok(m) => out.extend([m.rate_u1.value, m.rate_u2.value, m.outage_u1.value, m.outage_u2.value]),
                // a quadrature miss leaves a gap in the plot, not an error
                Err(AnalyticError::NonConverged(_)) => out.extend([f64::NAN; 4]),
                Err(e) => return Err(e.to_string()),
            }
        }
    }
    Ok(out)
}

/// `which` is `gamma1` (near-user SINR) or `gamma2` (far-user end-to-end SINR).
pub fn cdf_rows(setup: &Setup, power_db: f64, which: &str, points: usize) -> Result<Vec<f64>, String> {
    let p = setup.params(power_db)?;
    let model = AnalyticModel::new(&p).map_err(|e| e.to_string())?;
    let points = points.clamp(2, MAX_POINTS);
    type Cdf = fn(&AnalyticModel, f64) -> f64;
    let (x_max, f1, f2): (f64, Cdf, Cdf) = match which {
        "gamma1" => (
            // about the 99.99% point of the weakest near-user SINR
            10.0 * p.a1 * model.gains().lam_su1,
            AnalyticModel::cdf_gamma1_max_u1,
            AnalyticModel::cdf_gamma1_max_u2,
        ),
        "gamma2" => (
            1.05 * p.sinr_ceiling(),
            AnalyticModel::cdf_gamma2_max_u1,
            AnalyticModel::cdf_gamma2_max_u2,
        ),
        other => return Err(format!("unknown CDF `{other}`, expected gamma1 or gamma2")),
    };
    let mut out = Vec::with_capacity(points * CDF_STRIDE);
    for i in 0..points {
        let x = x_max * i as f64 / (points - 1) as f64;
        out.extend([x, f1(&model, x), f2(&model, x)]);
    }
    Ok(out)
}

pub fn simulate_rows(setup: &Setup, power_db: f64, trials: u64, seed: u64) -> Result<Vec<f64>, String> {
    if trials == 0 || trials > MAX_TRIALS {
        return Err(format!("trials must be in 1..={MAX_TRIALS}"));
    }
    let p = setup.params(power_db)?;
    Ok(simulate(&p, &Scheme::ALL, trials, seed)
        .into_iter()
        .flat_map(|m| {
            [
                m.rate_u1.value,
                m.rate_u2.value,
                m.rate_sum.value,
                m.outage_u1.value,
                m.outage_u2.value,
                m.jain_index.value,
            ]
        })
        .collect())
}

/// Closed-form rates and outages over a power grid, [`CURVE_STRIDE`] per row.
#[wasm_bindgen]
pub fn analytic_curves(setup: &Setup, start: f64, stop: f64, step: f64) -> Result<Vec<f64>, JsError> {
    analytic_rows(setup, start, stop, step).map_err(|e| JsError::new(&e))
}

/// SINR CDFs at one power, [`CDF_STRIDE`] per row.
#[wasm_bindgen]
pub fn cdf_curves(setup: &Setup, power_db: f64, which: &str, points: usize) -> Result<Vec<f64>, JsError> {
    cdf_rows(setup, power_db, which, points).map_err(|e| JsError::new(&e))
}

/// Monte Carlo for every scheme at one power, [`SIM_STRIDE`] per scheme in
/// [`scheme_names`] order.
#[wasm_bindgen]
pub fn simulate_point(setup: &Setup, power_db: f64, trials: u32, seed: u32) -> Result<Vec<f64>, JsError> {
    simulate_rows(setup, power_db, trials.into(), seed.into()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn scheme_names() -> Vec<String> {
    Scheme::ALL.iter().map(|s| s.as_str().to_string()).collect()
}
