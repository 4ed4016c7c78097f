//! Antenna-selection schemes.
//!
//! Every argmax/argmin breaks ties toward the lowest index, and the
//! exhaustive searches toward the lexicographically smallest `(i, j, k)`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use thiserror::Error;

use crate::channel::{ChannelRealization, RngSeed};
use crate::config::SystemParams;
use crate::sinr::{self, AntennaChoice};

const RANDOM_DOMAIN: u64 = 0x005E_1EC7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    /// Maximize the near-user SINR over `(i, k)`, then the relay SINR over `j`.
    MaxU1,
    /// As [`Scheme::MaxU1`] but `j` maximizes the BS→relay gain alone.
    MaxU1Analytic,
    /// Exhaustive maximization of the far-user end-to-end SINR.
    MaxU2Exhaustive,
    /// Best `R→U2` antenna, then weakest SI receive antenna, then best BS antenna.
    MaxU2Decoupled,
    /// Exhaustive maximization of the instantaneous sum rate.
    OptimumSumrate,
    Random,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown scheme `{0}` (expected one of max_u1, max_u1_analytic, max_u2_exhaustive, max_u2_decoupled, optimum_sumrate, random)")]
pub struct UnknownScheme(pub String);

impl Scheme {
    pub const ALL: [Scheme; 6] = [
        Scheme::MaxU1,
        Scheme::MaxU1Analytic,
        Scheme::MaxU2Exhaustive,
        Scheme::MaxU2Decoupled,
        Scheme::OptimumSumrate,
        Scheme::Random,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::MaxU1 => "max_u1",
            Scheme::MaxU1Analytic => "max_u1_analytic",
            Scheme::MaxU2Exhaustive => "max_u2_exhaustive",
            Scheme::MaxU2Decoupled => "max_u2_decoupled",
            Scheme::OptimumSumrate => "optimum_sumrate",
            Scheme::Random => "random",
        }
    }

    /// `seed` is only consumed by [`Scheme::Random`].
    pub fn select(self, real: &ChannelRealization, params: &SystemParams, seed: RngSeed) -> AntennaChoice {
        match self {
            Scheme::MaxU1 => select_max_u1(real, params),
            Scheme::MaxU1Analytic => select_max_u1_analytic(real, params),
            Scheme::MaxU2Exhaustive => select_max_u2_exhaustive(real, params),
            Scheme::MaxU2Decoupled => select_max_u2_decoupled(real, params),
            Scheme::OptimumSumrate => select_optimum_sumrate(real, params),
            Scheme::Random => select_random(real, params, seed),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = UnknownScheme;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scheme::ALL
            .into_iter()
            .find(|sc| sc.as_str() == s.trim())
            .ok_or_else(|| UnknownScheme(s.trim().to_string()))
    }
}

/// First index of the largest value of `f(idx)`.
#[inline]
fn argmax_by(n: usize, f: impl Fn(usize) -> f64) -> usize {
    let mut best = 0;
    let mut best_v = f(0);
    for idx in 1..n {
        let v = f(idx);
        if v > best_v {
            best = idx;
            best_v = v;
        }
    }
    best
}

#[inline]
fn argmin_by(n: usize, f: impl Fn(usize) -> f64) -> usize {
    argmax_by(n, |idx| -f(idx))
}

/// Near-user stage shared by both max-U1 variants: strongest BS→U1 antenna
/// and weakest relay→U1 antenna.
fn near_user_stage(real: &ChannelRealization) -> (usize, usize) {
    (argmax_by(real.m_b, |i| real.g_su1[i]), argmin_by(real.m_t, |k| real.g_ru1[k]))
}

pub fn select_max_u1(real: &ChannelRealization, params: &SystemParams) -> AntennaChoice {
    let (i, k) = near_user_stage(real);
    let j = argmax_by(real.m_r, |j| sinr::sinr_relay(real, AntennaChoice::new(i, j, k), params));
    AntennaChoice { i, j, k }
}

pub fn select_max_u1_analytic(real: &ChannelRealization, _params: &SystemParams) -> AntennaChoice {
    let (i, k) = near_user_stage(real);
    let j = argmax_by(real.m_r, |j| real.br(i, j));
    AntennaChoice { i, j, k }
}

pub fn select_max_u2_exhaustive(real: &ChannelRealization, params: &SystemParams) -> AntennaChoice {
    exhaustive(real, |c| sinr::e2e_sinr_u2(real, c, params))
}

pub fn select_max_u2_decoupled(real: &ChannelRealization, _params: &SystemParams) -> AntennaChoice {
    let k = argmax_by(real.m_t, |k| real.g_ru2[k]);
    let j = argmin_by(real.m_r, |j| real.si(j, k));
    // with g_si[j, k] fixed, the relay SINR is increasing in g_br[i, j]
    let i = argmax_by(real.m_b, |i| real.br(i, j));
    AntennaChoice { i, j, k }
}

pub fn select_optimum_sumrate(real: &ChannelRealization, params: &SystemParams) -> AntennaChoice {
    exhaustive(real, |c| sinr::sum_rate(real, c, params))
}

pub fn select_random(real: &ChannelRealization, _params: &SystemParams, seed: RngSeed) -> AntennaChoice {
    let mut rng = seed.derived(RANDOM_DOMAIN).rng();
    AntennaChoice {
        i: rng.random_range(0..real.m_b),
        j: rng.random_range(0..real.m_r),
        k: rng.random_range(0..real.m_t),
    }
}

fn exhaustive(real: &ChannelRealization, objective: impl Fn(AntennaChoice) -> f64) -> AntennaChoice {
    let mut best = AntennaChoice::new(0, 0, 0);
    let mut best_v = objective(best);
    for i in 0..real.m_b {
        for j in 0..real.m_r {
            for k in 0..real.m_t {
                let c = AntennaChoice { i, j, k };
                let v = objective(c);
                if v > best_v {
                    best = c;
                    best_v = v;
                }
            }
        }
    }
    best
}
