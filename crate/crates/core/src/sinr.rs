//! Instantaneous SINRs of the decode chain for one antenna triple.
//!
//! All noise powers are one; no high-SNR approximation is made.

use crate::channel::ChannelRealization;
use crate::config::SystemParams;

/// Selected BS transmit antenna `i`, relay receive antenna `j` and relay
/// transmit antenna `k` (all zero-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AntennaChoice {
    pub i: usize,
    pub j: usize,
    pub k: usize,
}

impl AntennaChoice {
    pub const fn new(i: usize, j: usize, k: usize) -> Self {
        Self { i, j, k }
    }

    pub fn in_range(&self, real: &ChannelRealization) -> bool {
        self.i < real.m_b && self.j < real.m_r && self.k < real.m_t
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinrBundle {
    /// Far-user symbol decoded at the relay.
    pub gamma_r: f64,
    /// Far-user symbol decoded at the near user (first SIC stage).
    pub gamma_12: f64,
    /// Near user's own symbol after SIC.
    pub gamma_1: f64,
    /// Relay to far user.
    pub gamma_ru2: f64,
    /// End-to-end at the far user.
    pub gamma_2: f64,
}

/// `a2·g / (a1·g + s + 1)` with `g = g_br[i,j]`, `s = g_si[j,k]`.
#[inline]
pub fn sinr_relay(real: &ChannelRealization, c: AntennaChoice, params: &SystemParams) -> f64 {
    let g = real.br(c.i, c.j);
    params.a2 * g / (params.a1 * g + real.si(c.j, c.k) + 1.0)
}

#[inline]
pub fn sinr_u2_at_u1(real: &ChannelRealization, c: AntennaChoice, params: &SystemParams) -> f64 {
    let g = real.g_su1[c.i];
    params.a2 * g / (params.a1 * g + real.g_ru1[c.k] + 1.0)
}

#[inline]
pub fn sinr_u1(real: &ChannelRealization, c: AntennaChoice, params: &SystemParams) -> f64 {
    params.a1 * real.g_su1[c.i] / (real.g_ru1[c.k] + 1.0)
}

#[inline]
pub fn snr_u2(real: &ChannelRealization, c: AntennaChoice, _params: &SystemParams) -> f64 {
    real.g_ru2[c.k]
}

#[inline]
pub fn e2e_sinr_u2(real: &ChannelRealization, c: AntennaChoice, params: &SystemParams) -> f64 {
    sinr_u2_at_u1(real, c, params)
        .min(sinr_relay(real, c, params))
        .min(snr_u2(real, c, params))
}

/// Near-user effective gain `X = g_su1[i] / (g_ru1[k] + 1)`; both
/// `gamma_1 = a1·X` and `gamma_12 = a2·X / (a1·X + 1)` are functions of it.
#[inline]
pub fn near_user_gain(real: &ChannelRealization, c: AntennaChoice) -> f64 {
    real.g_su1[c.i] / (real.g_ru1[c.k] + 1.0)
}

pub fn sinr_bundle(real: &ChannelRealization, c: AntennaChoice, params: &SystemParams) -> SinrBundle {
    let gamma_r = sinr_relay(real, c, params);
    let gamma_12 = sinr_u2_at_u1(real, c, params);
    let gamma_1 = sinr_u1(real, c, params);
    let gamma_ru2 = snr_u2(real, c, params);
    SinrBundle { gamma_r, gamma_12, gamma_1, gamma_ru2, gamma_2: gamma_12.min(gamma_r).min(gamma_ru2) }
}

/// `(log2(1 + gamma_1), log2(1 + gamma_2))` in bit/s/Hz.
#[inline]
pub fn instantaneous_rates(b: &SinrBundle) -> (f64, f64) {
    (b.gamma_1.ln_1p() / std::f64::consts::LN_2, b.gamma_2.ln_1p() / std::f64::consts::LN_2)
}

/// Instantaneous sum rate; the objective of the exhaustive sum-rate search.
#[inline]
pub fn sum_rate(real: &ChannelRealization, c: AntennaChoice, params: &SystemParams) -> f64 {
    let (r1, r2) = instantaneous_rates(&sinr_bundle(real, c, params));
    r1 + r2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{draw, RngSeed};

    fn single(g_br: f64, g_si: f64, g_su1: f64, g_ru1: f64, g_ru2: f64) -> ChannelRealization {
        ChannelRealization {
            m_b: 1,
            m_r: 1,
            m_t: 1,
            g_br: vec![g_br],
            g_su1: vec![g_su1],
            g_ru1: vec![g_ru1],
            g_ru2: vec![g_ru2],
            g_si: vec![g_si],
        }
    }

    const C0: AntennaChoice = AntennaChoice::new(0, 0, 0);

    #[test]
    fn relay_sinr_values() {
        let p = SystemParams::default();
        assert!((sinr_relay(&single(1.0, 0.0, 0.0, 0.0, 0.0), C0, &p) - 0.6).abs() < 1e-15);
        assert!((sinr_relay(&single(2.0, 3.0, 0.0, 0.0, 0.0), C0, &p) - 1.0 / 3.0).abs() < 1e-15);
        let big = sinr_relay(&single(1e12, 5.0, 0.0, 0.0, 0.0), C0, &p);
        assert!(big < 3.0 && 3.0 - big < 1e-9);
    }

    #[test]
    fn near_user_values() {
        let p = SystemParams::default();
        assert_eq!(sinr_u2_at_u1(&single(0.0, 0.0, 0.0, 2.0, 0.0), C0, &p), 0.0);
        assert!((sinr_u2_at_u1(&single(0.0, 0.0, 4.0, 0.0, 0.0), C0, &p) - 1.5).abs() < 1e-15);
        assert_eq!(sinr_u1(&single(0.0, 0.0, 8.0, 0.0, 0.0), C0, &p), 2.0);
        assert_eq!(sinr_u1(&single(0.0, 0.0, 0.0, 3.0, 0.0), C0, &p), 0.0);
    }

    #[test]
    fn zero_k1_removes_interference() {
        let p = SystemParams { k1: 0.0, ..Default::default() };
        for s in 0..50 {
            let r = draw(&p, RngSeed::new(8, s));
            let c = AntennaChoice::new(1, 2, 3);
            assert_eq!(sinr_u1(&r, c, &p), p.a1 * r.g_su1[1]);
        }
    }

    #[test]
    fn snr_u2_is_passthrough() {
        let p = SystemParams::default();
        let r = draw(&p, RngSeed::new(2, 2));
        for k in [0, 1, 3] {
            assert_eq!(snr_u2(&r, AntennaChoice::new(0, 0, k), &p), r.g_ru2[k]);
        }
    }

    #[test]
    fn e2e_is_min() {
        let p = SystemParams::default();
        // gamma_r = 0.6, gamma_12 = 0.5, gamma_ru2 = 10
        // gamma_12 = 0.75 g / (0.25 g + 1) = 0.5  =>  g = 0.8
        let r = single(1.0, 0.0, 0.8, 0.0, 10.0);
        let b = sinr_bundle(&r, C0, &p);
        assert!((b.gamma_r - 0.6).abs() < 1e-15);
        assert!((b.gamma_12 - 0.5).abs() < 1e-15);
        assert_eq!(b.gamma_2, b.gamma_12);
        assert_eq!(e2e_sinr_u2(&single(5.0, 0.1, 5.0, 0.0, 0.0), C0, &p), 0.0);
    }

    #[test]
    fn rate_values() {
        let mk = |g: f64| SinrBundle { gamma_r: 0.0, gamma_12: 0.0, gamma_1: g, gamma_ru2: 0.0, gamma_2: g };
        assert_eq!(instantaneous_rates(&mk(0.0)), (0.0, 0.0));
        let (a, b) = instantaneous_rates(&mk(1.0));
        assert!((a - 1.0).abs() < 1e-15 && (b - 1.0).abs() < 1e-15);
        let (a, _) = instantaneous_rates(&mk(3.0));
        assert!((a - 2.0).abs() < 1e-15);
    }

    #[test]
    fn bounds_and_identity_on_random_draws() {
        let p = SystemParams { rho_s: 1e4, rho_r: 1e4, ..Default::default() };
        let ceiling = p.sinr_ceiling();
        for s in 0..100_000u64 {
            let r = draw(&p, RngSeed::new(77, s));
            let c = AntennaChoice::new((s % 4) as usize, ((s / 4) % 4) as usize, ((s / 16) % 4) as usize);
            let b = sinr_bundle(&r, c, &p);
            assert!(b.gamma_r < ceiling && b.gamma_12 < ceiling && b.gamma_2 < ceiling);
            let x = near_user_gain(&r, c);
            assert!((b.gamma_1 - p.a1 * x).abs() <= 1e-12 * b.gamma_1.max(1.0));
            let g12 = p.a2 * x / (p.a1 * x + 1.0);
            assert!((b.gamma_12 - g12).abs() <= 1e-12 * g12.max(1.0));
        }
    }

    #[test]
    fn e2e_monotone_in_each_gain() {
        let p = SystemParams::default();
        let base = single(3.0, 0.7, 2.0, 0.4, 1.5);
        let f = |r: &ChannelRealization| e2e_sinr_u2(r, C0, &p);
        let h = 1e-3;
        let bump = |edit: &dyn Fn(&mut ChannelRealization)| {
            let mut r = base.clone();
            edit(&mut r);
            f(&r) - f(&base)
        };
        assert!(bump(&|r| r.g_br[0] += h) >= 0.0);
        assert!(bump(&|r| r.g_ru2[0] += h) >= 0.0);
        assert!(bump(&|r| r.g_si[0] += h) <= 0.0);
        assert!(bump(&|r| r.g_ru1[0] += h) <= 0.0);
    }
}
