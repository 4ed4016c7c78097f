//! Antenna selection for a full-duplex cooperative NOMA downlink.
//!
//! A multi-antenna BS serves a near user directly and a far user through a
//! multi-antenna full-duplex relay. Each terminal activates a single
//! antenna: BS transmit `i`, relay receive `j`, relay transmit `k`. This
//! crate draws Rayleigh-faded realizations, applies the selection schemes,
//! estimates rates, outage and fairness by Monte Carlo, and evaluates the
//! matching closed forms so the two can be checked against each other.
//!
//! ```
//! use fdnoma_core::{analytic::AnalyticModel, config::SystemParams};
//!
//! let params = SystemParams::default().with_power_db(20.0);
//! let model = AnalyticModel::new(&params).unwrap();
//! let near = model.rate_u1_max_u1().unwrap();
//! assert!(near > 0.0);
//! ```

pub mod analytic;
pub mod channel;
pub mod config;
pub mod montecarlo;
pub mod selection;
pub mod sinr;

pub use channel::{draw, ChannelRealization, RngSeed};
pub use config::{ConfigError, ConfigFile, MeanGains, Metric, SweepSpec, SystemParams};
pub use montecarlo::{MetricEstimate, MetricSet};
pub use selection::Scheme;
pub use sinr::{AntennaChoice, SinrBundle};
