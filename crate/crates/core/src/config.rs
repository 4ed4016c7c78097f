//! System parameters, their validation, and the flat `key = value` config
//! format.
//!
//! Noise powers are normalized to one, so every SNR enters through
//! `rho_s` (BS transmit SNR) and `rho_r` (relay transmit SNR).

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

use crate::selection::Scheme;

/// Tolerance on `a1 + a2 = 1`.
pub const POWER_SPLIT_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("POWER_SPLIT_INVALID: need a1 + a2 = 1 and 0 < a1 < a2 (got a1={a1}, a2={a2})")]
    PowerSplitInvalid { a1: f64, a2: f64 },
    #[error("ANTENNA_COUNT_INVALID: {name} must be >= 1")]
    AntennaCountInvalid { name: &'static str },
    #[error("VARIANCE_INVALID: {name} must be > 0 (got {value})")]
    VarianceInvalid { name: &'static str, value: f64 },
    #[error("SNR_INVALID: {name} must be > 0 (got {value})")]
    SnrInvalid { name: &'static str, value: f64 },
    #[error("K1_INVALID: k1 must be >= 0 (got {0})")]
    K1Invalid(f64),
    #[error("RATE_INVALID: {name} must be > 0 (got {value})")]
    RateInvalid { name: &'static str, value: f64 },
    #[error("SWEEP_INVALID: {0}")]
    SweepInvalid(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("cannot read config {path}: {reason}")]
    Io { path: String, reason: String },
}

/// Scalar model constants.
///
/// Defaults are the four-antenna reference setup (`a1 = 0.25`, `a2 = 0.75`,
/// `k1 = 0.01`, residual SI variance 0.3, unit link variances, target rates
/// of 0.5 bit/s/Hz) at 20 dB transmit SNR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// BS transmit antennas.
    pub m_b: usize,
    /// Relay receive antennas.
    pub m_r: usize,
    /// Relay transmit antennas.
    pub m_t: usize,
    pub a1: f64,
    pub a2: f64,
    /// Linear BS transmit SNR.
    pub rho_s: f64,
    /// Linear relay transmit SNR.
    pub rho_r: f64,
    pub var_br: f64,
    pub var_bu1: f64,
    pub var_ru1: f64,
    pub var_ru2: f64,
    /// Residual self-interference variance.
    pub var_si: f64,
    /// Inter-user interference strength at the near user.
    pub k1: f64,
    /// Near-user target rate, bit/s/Hz.
    pub rate1: f64,
    /// Far-user target rate, bit/s/Hz.
    pub rate2: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self {
            m_b: 4,
            m_r: 4,
            m_t: 4,
            a1: 0.25,
            a2: 0.75,
            rho_s: 100.0,
            rho_r: 100.0,
            var_br: 1.0,
            var_bu1: 1.0,
            var_ru1: 1.0,
            var_ru2: 1.0,
            var_si: 0.3,
            k1: 0.01,
            rate1: 0.5,
            rate2: 0.5,
        }
    }
}

/// Mean of each per-antenna exponential power gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanGains {
    pub lam_br: f64,
    pub lam_su1: f64,
    /// Includes the `k1` factor: the R→U1 link carries variance `k1·var_ru1`.
    pub lam_ru1: f64,
    pub lam_ru2: f64,
    pub lam_si: f64,
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}

impl SystemParams {
    /// Returns `self` unchanged when every invariant holds, otherwise the
    /// first violated one.
    pub fn validate(self) -> Result<Self, ConfigError> {
        for (name, m) in [("m_b", self.m_b), ("m_r", self.m_r), ("m_t", self.m_t)] {
            if m == 0 {
                return Err(ConfigError::AntennaCountInvalid { name });
            }
        }
        let split_ok = self.a1 > 0.0
            && self.a1 < self.a2
            && ((self.a1 + self.a2) - 1.0).abs() <= POWER_SPLIT_TOL;
        if !split_ok {
            return Err(ConfigError::PowerSplitInvalid { a1: self.a1, a2: self.a2 });
        }
        for (name, value) in [("rho_s", self.rho_s), ("rho_r", self.rho_r)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(ConfigError::SnrInvalid { name, value });
            }
        }
        for (name, value) in [
            ("var_br", self.var_br),
            ("var_bu1", self.var_bu1),
            ("var_ru1", self.var_ru1),
            ("var_ru2", self.var_ru2),
            ("var_si", self.var_si),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(ConfigError::VarianceInvalid { name, value });
            }
        }
        if !(self.k1 >= 0.0 && self.k1.is_finite()) {
            return Err(ConfigError::K1Invalid(self.k1));
        }
        for (name, value) in [("rate1", self.rate1), ("rate2", self.rate2)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(ConfigError::RateInvalid { name, value });
            }
        }
        Ok(self)
    }

    pub fn mean_gains(&self) -> MeanGains {
        MeanGains {
            lam_br: self.rho_s * self.var_br,
            lam_su1: self.rho_s * self.var_bu1,
            lam_ru1: self.rho_r * self.k1 * self.var_ru1,
            lam_ru2: self.rho_r * self.var_ru2,
            lam_si: self.rho_r * self.var_si,
        }
    }

    /// SINR thresholds `(θ1, θ2) = (2^R1 − 1, 2^R2 − 1)`.
    pub fn thresholds(&self) -> (f64, f64) {
        (self.rate1.exp2() - 1.0, self.rate2.exp2() - 1.0)
    }

    /// Supremum of every SINR that carries the far user's symbol.
    pub fn sinr_ceiling(&self) -> f64 {
        self.a2 / self.a1
    }

    /// Sets both transmit SNRs from a dB value.
    pub fn with_power_db(mut self, db: f64) -> Self {
        let lin = db_to_linear(db);
        self.rho_s = lin;
        self.rho_r = lin;
        self
    }
}

/// Which quantities a sweep reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    Rates,
    Outage,
    Jain,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Rates, Metric::Outage, Metric::Jain];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Rates => "rates",
            Metric::Outage => "outage",
            Metric::Jain => "jain",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "rates" | "rate" => Ok(Metric::Rates),
            "outage" => Ok(Metric::Outage),
            "jain" | "fairness" => Ok(Metric::Jain),
            other => Err(ConfigError::SweepInvalid(format!("unknown metric `{other}`"))),
        }
    }
}

/// A grid of power points crossed with a set of schemes.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    /// Transmit power points in dB.
    pub power_db: Vec<f64>,
    /// When set, `rho_r` stays at this dB value instead of following the grid.
    pub rho_r_db: Option<f64>,
    pub schemes: Vec<Scheme>,
    pub metrics: Vec<Metric>,
    pub trials: u64,
    pub seed: u64,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            power_db: parse_grid("0:50:5").expect("static grid"),
            rho_r_db: None,
            schemes: Scheme::ALL.to_vec(),
            metrics: Metric::ALL.to_vec(),
            trials: 1_000_000,
            seed: 1,
        }
    }
}

impl SweepSpec {
    pub fn validate(self) -> Result<Self, ConfigError> {
        if self.power_db.is_empty() {
            return Err(ConfigError::SweepInvalid("empty power grid".into()));
        }
        if self.schemes.is_empty() {
            return Err(ConfigError::SweepInvalid("no schemes".into()));
        }
        if self.metrics.is_empty() {
            return Err(ConfigError::SweepInvalid("no metrics".into()));
        }
        if self.trials == 0 {
            return Err(ConfigError::SweepInvalid("trials must be >= 1".into()));
        }
        Ok(self)
    }

    /// Parameters at one grid point.
    pub fn params_at(&self, base: &SystemParams, power_db: f64) -> SystemParams {
        let mut p = base.with_power_db(power_db);
        if let Some(r) = self.rho_r_db {
            p.rho_r = db_to_linear(r);
        }
        p
    }
}

/// Parses `start:stop:step` (inclusive) or a comma-separated list of dB values.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, ConfigError> {
    let bad = |m: &str| ConfigError::SweepInvalid(format!("power grid `{s}`: {m}"));
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad("not a number"));
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [start, stop, step] => {
            let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
            if step.is_nan() || step <= 0.0 || stop < start {
                return Err(bad("need step > 0 and stop >= start"));
            }
            // integer point count keeps 0:50:5 at exactly 11 points
            let n = ((stop - start) / step + 1e-9).floor() as usize;
            Ok((0..=n).map(|i| start + i as f64 * step).collect())
        }
        [single] => single.split(',').map(num).collect(),
        _ => Err(bad("expected start:stop:step or a comma list")),
    }
}

/// Everything a config file can carry.
#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    pub params: SystemParams,
    pub sweep: SweepSpec,
}

impl ConfigFile {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        text.parse()
    }
}

impl FromStr for ConfigFile {
    type Err = ConfigError;

    /// `key = value` per line, `#` starts a comment. SNR keys take an
    /// optional `dB` suffix; plain numbers are linear.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut cfg = ConfigFile::default();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| ConfigError::Parse { line: line_no, msg };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            let real = || -> Result<f64, ConfigError> {
                value.parse::<f64>().map_err(|_| err(format!("{key}: `{value}` is not a number")))
            };
            let count = || -> Result<usize, ConfigError> {
                value.parse::<usize>().map_err(|_| err(format!("{key}: `{value}` is not a count")))
            };
            let snr = || -> Result<f64, ConfigError> {
                let lower = value.to_ascii_lowercase();
                match lower.strip_suffix("db") {
                    Some(db) => db
                        .trim()
                        .parse::<f64>()
                        .map(db_to_linear)
                        .map_err(|_| err(format!("{key}: `{value}` is not a dB value"))),
                    None => real(),
                }
            };
            let p = &mut cfg.params;
            match key {
                "m_b" => p.m_b = count()?,
                "m_r" => p.m_r = count()?,
                "m_t" => p.m_t = count()?,
                "a1" => p.a1 = real()?,
                "a2" => p.a2 = real()?,
                "rho_s" => p.rho_s = snr()?,
                "rho_r" => {
                    p.rho_r = snr()?;
                    cfg.sweep.rho_r_db = Some(linear_to_db(p.rho_r));
                }
                "var_br" => p.var_br = real()?,
                "var_bu1" => p.var_bu1 = real()?,
                "var_ru1" => p.var_ru1 = real()?,
                "var_ru2" => p.var_ru2 = real()?,
                "var_si" => p.var_si = real()?,
                "k1" => p.k1 = real()?,
                "rate1" => p.rate1 = real()?,
                "rate2" => p.rate2 = real()?,
                "power" | "power_db" => cfg.sweep.power_db = parse_grid(value)?,
                "schemes" => {
                    cfg.sweep.schemes = value
                        .split(',')
                        .map(|s| s.trim().parse::<Scheme>())
                        .collect::<Result<_, _>>()
                        .map_err(|e| err(e.to_string()))?
                }
                "metrics" => {
                    cfg.sweep.metrics = value
                        .split(',')
                        .map(str::parse)
                        .collect::<Result<_, _>>()?
                }
                "trials" => {
                    cfg.sweep.trials = value
                        .replace('_', "")
                        .parse::<f64>()
                        .ok()
                        .filter(|t| *t >= 1.0 && t.fract() == 0.0)
                        .map(|t| t as u64)
                        .ok_or_else(|| err(format!("trials: `{value}` is not a positive integer")))?
                }
                "seed" => {
                    cfg.sweep.seed =
                        value.parse().map_err(|_| err(format!("seed: `{value}` is not a u64")))?
                }
                other => return Err(err(format!("unknown key `{other}`"))),
            }
        }
        Ok(cfg)
    }
}
