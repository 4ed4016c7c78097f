//! Monte Carlo estimation of ergodic rates, outage and fairness.
//!
//! Trials are split into fixed-size chunks keyed by trial index. Each chunk
//! is accumulated sequentially and the chunk partials are merged in index
//! order, so results do not depend on how many worker threads ran them.
//! Every scheme in one call sees the same realizations (common random
//! numbers), which makes per-realization dominance visible in the averages.

use std::io::{self, Write};

use rayon::prelude::*;

use crate::analytic::{AnalyticError, AnalyticModel, Tolerance};
use crate::channel::{ChannelRealization, RngSeed};
use crate::config::{ConfigError, Metric, SweepSpec, SystemParams};
use crate::selection::Scheme;
use crate::sinr::{instantaneous_rates, sinr_bundle};

/// Trials per deterministic reduction chunk.
pub const CHUNK: u64 = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateKind {
    MonteCarlo,
    Analytic,
}

impl EstimateKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EstimateKind::MonteCarlo => "monte_carlo",
            EstimateKind::Analytic => "analytic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricEstimate {
    pub value: f64,
    /// Sample standard deviation over `√trials`; zero for analytic values.
    pub std_error: f64,
    /// Zero for analytic values.
    pub trials: u64,
    pub kind: EstimateKind,
}

impl MetricEstimate {
    pub fn analytic(value: f64) -> Self {
        Self { value, std_error: 0.0, trials: 0, kind: EstimateKind::Analytic }
    }

    fn monte_carlo(value: f64, std_error: f64, trials: u64) -> Self {
        Self { value, std_error, trials, kind: EstimateKind::MonteCarlo }
    }

    /// `|self - other|` in units of the combined standard error.
    pub fn z_score(&self, other: &MetricEstimate) -> f64 {
        let se = self.std_error.hypot(other.std_error);
        if se == 0.0 {
            if self.value == other.value { 0.0 } else { f64::INFINITY }
        } else {
            (self.value - other.value).abs() / se
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSet {
    pub rate_u1: MetricEstimate,
    pub rate_u2: MetricEstimate,
    pub rate_sum: MetricEstimate,
    pub outage_u1: MetricEstimate,
    pub outage_u2: MetricEstimate,
    pub jain_index: MetricEstimate,
    /// `θ2 >= a2/a1`: both outages are 1 identically.
    pub threshold_infeasible: bool,
    /// Both mean rates were zero, so the fairness index fell back to 1.
    pub jain_undefined: bool,
}

/// Jain's index for two users.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fairness {
    pub value: f64,
    /// Both rates zero; `value` is 1 by convention.
    pub undefined: bool,
}

/// `(r1 + r2)² / (2(r1² + r2²))`, in `[1/2, 1]` for nonnegative rates.
pub fn jain_index(r1: f64, r2: f64) -> Fairness {
    let q = r1 * r1 + r2 * r2;
    if q == 0.0 {
        return Fairness { value: 1.0, undefined: true };
    }
    let s = r1 + r2;
    Fairness { value: s * s / (2.0 * q), undefined: false }
}

/// Running sums for one scheme.
#[derive(Debug, Clone, Copy, Default)]
struct Accumulator {
    n: u64,
    r1: f64,
    r2: f64,
    r1r1: f64,
    r2r2: f64,
    r1r2: f64,
    out1: u64,
    out2: u64,
}

impl Accumulator {
    fn merge(&mut self, o: &Accumulator) {
        self.n += o.n;
        self.r1 += o.r1;
        self.r2 += o.r2;
        self.r1r1 += o.r1r1;
        self.r2r2 += o.r2r2;
        self.r1r2 += o.r1r2;
        self.out1 += o.out1;
        self.out2 += o.out2;
    }

    fn finish(&self, threshold_infeasible: bool) -> MetricSet {
        let n = self.n as f64;
        let bessel = if self.n > 1 { n / (n - 1.0) } else { 0.0 };
        let mean1 = self.r1 / n;
        let mean2 = self.r2 / n;
        let var1 = ((self.r1r1 / n - mean1 * mean1) * bessel).max(0.0);
        let var2 = ((self.r2r2 / n - mean2 * mean2) * bessel).max(0.0);
        let cov = (self.r1r2 / n - mean1 * mean2) * bessel;
        let var_sum = (var1 + var2 + 2.0 * cov).max(0.0);
        let est = |mean: f64, var: f64| MetricEstimate::monte_carlo(mean, (var / n).sqrt(), self.n);
        let bernoulli = |count: u64| {
            let p = count as f64 / n;
            est(p, p * (1.0 - p) * bessel)
        };

        let jain = jain_index(mean1, mean2);
        // delta method on J(r1, r2) = s²/(2q)
        let jain_se = if jain.undefined {
            0.0
        } else {
            let s = mean1 + mean2;
            let q = mean1 * mean1 + mean2 * mean2;
            let d1 = s * (q - s * mean1) / (q * q);
            let d2 = s * (q - s * mean2) / (q * q);
            ((d1 * d1 * var1 + d2 * d2 * var2 + 2.0 * d1 * d2 * cov).max(0.0) / n).sqrt()
        };

        MetricSet {
            rate_u1: est(mean1, var1),
            rate_u2: est(mean2, var2),
            rate_sum: est(mean1 + mean2, var_sum),
            outage_u1: bernoulli(self.out1),
            outage_u2: bernoulli(self.out2),
            jain_index: MetricEstimate::monte_carlo(jain.value, jain_se, self.n),
            threshold_infeasible,
            jain_undefined: jain.undefined,
        }
    }
}

/// Runs `trials` realizations and evaluates every scheme on each.
pub fn simulate(params: &SystemParams, schemes: &[Scheme], trials: u64, seed: u64) -> Vec<MetricSet> {
    let params = *params;
    let (theta1, theta2) = params.thresholds();
    let infeasible = theta2 >= params.sinr_ceiling();
    let chunks = trials.div_ceil(CHUNK);
    let partials: Vec<Vec<Accumulator>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = vec![Accumulator::default(); schemes.len()];
            let mut real = ChannelRealization::zeros(&params);
            let end = ((c + 1) * CHUNK).min(trials);
            for t in c * CHUNK..end {
                let rs = RngSeed::new(seed, t);
                real.redraw(&params, rs);
                for (scheme, a) in schemes.iter().zip(acc.iter_mut()) {
                    let choice = scheme.select(&real, &params, rs);
                    let b = sinr_bundle(&real, choice, &params);
                    let (r1, r2) = instantaneous_rates(&b);
                    a.n += 1;
                    a.r1 += r1;
                    a.r2 += r2;
                    a.r1r1 += r1 * r1;
                    a.r2r2 += r2 * r2;
                    a.r1r2 += r1 * r2;
                    if !(b.gamma_12 > theta2 && b.gamma_1 > theta1) {
                        a.out1 += 1;
                    }
                    if !(b.gamma_r > theta2 && b.gamma_ru2 > theta2) {
                        a.out2 += 1;
                    }
                }
            }
            acc
        })
        .collect();

    let mut total = vec![Accumulator::default(); schemes.len()];
    for part in &partials {
        for (t, p) in total.iter_mut().zip(part) {
            t.merge(p);
        }
    }
    total.iter().map(|a| a.finish(infeasible)).collect()
}

/// `(rate_u1, rate_u2, rate_sum)` for one scheme.
pub fn estimate_rates(
    params: &SystemParams,
    scheme: Scheme,
    trials: u64,
    seed: u64,
) -> (MetricEstimate, MetricEstimate, MetricEstimate) {
    let m = simulate(params, &[scheme], trials.max(1), seed)[0];
    (m.rate_u1, m.rate_u2, m.rate_sum)
}

/// Outage frequencies for one scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageEstimate {
    pub outage_u1: MetricEstimate,
    pub outage_u2: MetricEstimate,
    /// Far-user target unreachable: `θ2 >= a2/a1`.
    pub threshold_infeasible: bool,
}

pub fn estimate_outage(params: &SystemParams, scheme: Scheme, trials: u64, seed: u64) -> OutageEstimate {
    let m = simulate(params, &[scheme], trials.max(1), seed)[0];
    OutageEstimate {
        outage_u1: m.outage_u1,
        outage_u2: m.outage_u2,
        threshold_infeasible: m.threshold_infeasible,
    }
}

/// Closed-form metrics for the schemes that have them.
pub fn analytic_metrics(params: &SystemParams, scheme: Scheme) -> Result<MetricSet, AnalyticError> {
    let model = AnalyticModel::new(params)?;
    let tol = Tolerance::default();
    let (rate_u1, rate_u2, out1, out2) = match scheme {
        Scheme::MaxU1Analytic => (
            model.rate_u1_max_u1()?,
            model.rate_u2_max_u1(tol)?.value,
            model.outage_u1_max_u1(),
            model.outage_u2_max_u1(),
        ),
        Scheme::MaxU2Decoupled => (
            model.rate_u1_max_u2()?,
            model.rate_u2_max_u2(tol)?.value,
            model.outage_u1_max_u2(),
            model.outage_u2_max_u2(),
        ),
        other => {
            return Err(AnalyticError::Domain(format!(
                "no closed form for scheme `{other}` (have max_u1_analytic, max_u2_decoupled)"
            )))
        }
    };
    let jain = jain_index(rate_u1, rate_u2);
    let (_, theta2) = params.thresholds();
    Ok(MetricSet {
        rate_u1: MetricEstimate::analytic(rate_u1),
        rate_u2: MetricEstimate::analytic(rate_u2),
        rate_sum: MetricEstimate::analytic(rate_u1 + rate_u2),
        outage_u1: MetricEstimate::analytic(out1),
        outage_u2: MetricEstimate::analytic(out2),
        jain_index: MetricEstimate::analytic(jain.value),
        threshold_infeasible: theta2 >= params.sinr_ceiling(),
        jain_undefined: jain.undefined,
    })
}

/// One CSV row: a grid point, a scheme, and its metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub power_db: f64,
    pub scheme: Scheme,
    pub metrics: MetricSet,
    /// Free-form status, e.g. `NON_CONVERGED` or `THRESHOLD_INFEASIBLE`.
    pub note: String,
}

impl SweepRow {
    fn new(power_db: f64, scheme: Scheme, metrics: MetricSet) -> Self {
        let note = if metrics.threshold_infeasible { "THRESHOLD_INFEASIBLE" } else { "" };
        Self { power_db, scheme, metrics, note: note.to_string() }
    }
}

/// Monte Carlo sweep with common random numbers at every grid point.
pub fn run_sweep(params: &SystemParams, sweep: &SweepSpec) -> Result<Vec<SweepRow>, ConfigError> {
    let base = params.validate()?;
    let sweep = sweep.clone().validate()?;
    let mut rows = Vec::with_capacity(sweep.power_db.len() * sweep.schemes.len());
    for &db in &sweep.power_db {
        let p = sweep.params_at(&base, db).validate()?;
        let sets = simulate(&p, &sweep.schemes, sweep.trials, sweep.seed);
        rows.extend(sweep.schemes.iter().zip(sets).map(|(&s, m)| SweepRow::new(db, s, m)));
    }
    Ok(rows)
}

/// Analytic sweep; schemes without a closed form are skipped and reported
/// in the second return value. A quadrature that misses its tolerance still
/// yields a row, tagged `NON_CONVERGED`.
pub fn run_analytic_sweep(
    params: &SystemParams,
    sweep: &SweepSpec,
) -> Result<(Vec<SweepRow>, Vec<String>), ConfigError> {
    let base = params.validate()?;
    let sweep = sweep.clone().validate()?;
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for &scheme in &sweep.schemes {
        if !matches!(scheme, Scheme::MaxU1Analytic | Scheme::MaxU2Decoupled) {
            skipped.push(format!("{scheme}: no closed form"));
        }
    }
    for &db in &sweep.power_db {
        let p = sweep.params_at(&base, db).validate()?;
        for &scheme in &sweep.schemes {
            if !matches!(scheme, Scheme::MaxU1Analytic | Scheme::MaxU2Decoupled) {
                continue;
            }
            match analytic_metrics(&p, scheme) {
                Ok(m) => rows.push(SweepRow::new(db, scheme, m)),
                Err(AnalyticError::NonConverged(q)) => {
                    let mut m = analytic_fallback(&p, scheme, q.value);
                    m.threshold_infeasible = false;
                    let mut row = SweepRow::new(db, scheme, m);
                    row.note = "NON_CONVERGED".into();
                    rows.push(row);
                }
                Err(e) => skipped.push(format!("{scheme} at {db} dB: {e}")),
            }
        }
    }
    Ok((rows, skipped))
}

/// Metrics when the far-user quadrature missed its tolerance: keep its best
/// estimate, everything else is closed form and cannot fail the same way.
fn analytic_fallback(p: &SystemParams, scheme: Scheme, rate_u2: f64) -> MetricSet {
    let model = AnalyticModel::new(p).expect("validated above");
    let (r1, o1, o2) = match scheme {
        Scheme::MaxU1Analytic => {
            (model.rate_u1_max_u1().unwrap_or(f64::NAN), model.outage_u1_max_u1(), model.outage_u2_max_u1())
        }
        _ => (model.rate_u1_max_u2().unwrap_or(f64::NAN), model.outage_u1_max_u2(), model.outage_u2_max_u2()),
    };
    let jain = jain_index(r1, rate_u2);
    MetricSet {
        rate_u1: MetricEstimate::analytic(r1),
        rate_u2: MetricEstimate::analytic(rate_u2),
        rate_sum: MetricEstimate::analytic(r1 + rate_u2),
        outage_u1: MetricEstimate::analytic(o1),
        outage_u2: MetricEstimate::analytic(o2),
        jain_index: MetricEstimate::analytic(jain.value),
        threshold_infeasible: false,
        jain_undefined: jain.undefined,
    }
}

pub const CSV_HEADER: &str = "power_db,scheme,rate_u1,rate_u1_se,rate_u2,rate_u2_se,rate_sum,\
outage_u1,outage_u1_se,outage_u2,outage_u2_se,jain,trials,kind,note";

/// 17 significant digits.
pub fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes the sweep table. Columns of metrics not in `metrics` are left empty.
pub fn write_csv<W: Write>(mut out: W, rows: &[SweepRow], metrics: &[Metric]) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    let rates = metrics.contains(&Metric::Rates);
    let outage = metrics.contains(&Metric::Outage);
    let jain = metrics.contains(&Metric::Jain);
    let cell = |on: bool, v: f64| if on { fmt_real(v) } else { String::new() };
    for r in rows {
        let m = &r.metrics;
        let cols = [
            fmt_real(r.power_db),
            r.scheme.to_string(),
            cell(rates, m.rate_u1.value),
            cell(rates, m.rate_u1.std_error),
            cell(rates, m.rate_u2.value),
            cell(rates, m.rate_u2.std_error),
            cell(rates, m.rate_sum.value),
            cell(outage, m.outage_u1.value),
            cell(outage, m.outage_u1.std_error),
            cell(outage, m.outage_u2.value),
            cell(outage, m.outage_u2.std_error),
            cell(jain, m.jain_index.value),
            m.rate_u1.trials.to_string(),
            m.rate_u1.kind.as_str().to_string(),
            r.note.clone(),
        ];
        writeln!(out, "{}", cols.join(","))?;
    }
    Ok(())
}
