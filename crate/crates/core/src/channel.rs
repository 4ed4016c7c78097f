//! Rayleigh-fading channel draws.
//!
//! Only `|h|²` enters the SINR expressions, and `|CN(0, σ²)|²` is
//! exponential with mean `σ²`, so every per-antenna power gain is drawn
//! directly as `-mean·ln(U)` with `U` uniform on `(0, 1]`.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::SystemParams;

/// Seed plus stream index. One stream per trial makes every realization
/// reproducible no matter which worker draws it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngSeed {
    pub seed: u64,
    pub stream: u64,
}

impl RngSeed {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn rng(self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }

    /// Same stream under an unrelated key, for randomness that must not
    /// alias the channel draw (random antenna selection).
    pub fn derived(self, domain: u64) -> Self {
        // splitmix64 finalizer keeps nearby domains far apart
        let mut z = self.seed ^ domain.wrapping_mul(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        Self { seed: z ^ (z >> 31), stream: self.stream }
    }
}

/// One joint draw of every link gain (already scaled by the transmit SNR).
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub m_b: usize,
    pub m_r: usize,
    pub m_t: usize,
    /// `m_b × m_r`, row-major: BS antenna `i` to relay receive antenna `j`.
    pub g_br: Vec<f64>,
    /// BS antenna `i` to the near user.
    pub g_su1: Vec<f64>,
    /// Relay transmit antenna `k` to the near user (inter-user interference).
    pub g_ru1: Vec<f64>,
    /// Relay transmit antenna `k` to the far user.
    pub g_ru2: Vec<f64>,
    /// `m_r × m_t`, row-major: relay transmit antenna `k` leaking into
    /// receive antenna `j`.
    pub g_si: Vec<f64>,
}

impl ChannelRealization {
    pub fn zeros(params: &SystemParams) -> Self {
        let (b, r, t) = (params.m_b, params.m_r, params.m_t);
        Self {
            m_b: b,
            m_r: r,
            m_t: t,
            g_br: vec![0.0; b * r],
            g_su1: vec![0.0; b],
            g_ru1: vec![0.0; t],
            g_ru2: vec![0.0; t],
            g_si: vec![0.0; r * t],
        }
    }

    #[inline]
    pub fn br(&self, i: usize, j: usize) -> f64 {
        self.g_br[i * self.m_r + j]
    }

    #[inline]
    pub fn si(&self, j: usize, k: usize) -> f64 {
        self.g_si[j * self.m_t + k]
    }

    /// Refills `self` in place; identical to [`draw`] for the same seed.
    pub fn redraw(&mut self, params: &SystemParams, seed: RngSeed) {
        debug_assert_eq!((self.m_b, self.m_r, self.m_t), (params.m_b, params.m_r, params.m_t));
        let g = params.mean_gains();
        let mut rng = seed.rng();
        fill_exp(&mut rng, &mut self.g_br, g.lam_br);
        fill_exp(&mut rng, &mut self.g_su1, g.lam_su1);
        fill_exp(&mut rng, &mut self.g_ru1, g.lam_ru1);
        fill_exp(&mut rng, &mut self.g_ru2, g.lam_ru2);
        fill_exp(&mut rng, &mut self.g_si, g.lam_si);
    }

    /// Column names of [`Self::csv_row`], for replaying draws elsewhere.
    ///
    /// Order: `trial`, then `g_br_{i}_{j}` (i-major), `g_su1_{i}`,
    /// `g_ru1_{k}`, `g_ru2_{k}`, `g_si_{j}_{k}` (j-major).
    pub fn csv_header(&self) -> String {
        let mut cols = vec!["trial".to_string()];
        for i in 0..self.m_b {
            for j in 0..self.m_r {
                cols.push(format!("g_br_{i}_{j}"));
            }
        }
        cols.extend((0..self.m_b).map(|i| format!("g_su1_{i}")));
        cols.extend((0..self.m_t).map(|k| format!("g_ru1_{k}")));
        cols.extend((0..self.m_t).map(|k| format!("g_ru2_{k}")));
        for j in 0..self.m_r {
            for k in 0..self.m_t {
                cols.push(format!("g_si_{j}_{k}"));
            }
        }
        cols.join(",")
    }

    pub fn csv_row(&self, trial: u64) -> String {
        let mut row = trial.to_string();
        let groups = [&self.g_br, &self.g_su1, &self.g_ru1, &self.g_ru2, &self.g_si];
        for v in groups.into_iter().flatten() {
            let _ = write!(row, ",{v:.16e}");
        }
        row
    }
}

#[inline]
fn fill_exp(rng: &mut impl Rng, out: &mut [f64], mean: f64) {
    for v in out {
        let u = 1.0 - rng.random::<f64>();
        *v = mean * -u.ln();
    }
}

/// Draws one realization; deterministic in `(seed.seed, seed.stream)`.
pub fn draw(params: &SystemParams, seed: RngSeed) -> ChannelRealization {
    let mut real = ChannelRealization::zeros(params);
    real.redraw(params, seed);
    real
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_stream() {
        let p = SystemParams::default();
        let a = draw(&p, RngSeed::new(42, 9));
        let b = draw(&p, RngSeed::new(42, 9));
        assert_eq!(a, b);
        assert_ne!(a, draw(&p, RngSeed::new(42, 10)));
        assert_ne!(a, draw(&p, RngSeed::new(43, 9)));
    }

    #[test]
    fn zero_k1_silences_inter_user_link() {
        let p = SystemParams { k1: 0.0, ..Default::default() };
        for s in 0..100 {
            let r = draw(&p, RngSeed::new(1, s));
            assert!(r.g_ru1.iter().all(|&g| g == 0.0));
        }
    }

    #[test]
    fn shapes_and_signs() {
        let p = SystemParams { m_b: 2, m_r: 3, m_t: 5, ..Default::default() };
        let r = draw(&p, RngSeed::new(3, 0));
        assert_eq!(r.g_br.len(), 6);
        assert_eq!(r.g_si.len(), 15);
        assert_eq!((r.g_su1.len(), r.g_ru1.len(), r.g_ru2.len()), (2, 5, 5));
        let all = [&r.g_br, &r.g_su1, &r.g_ru1, &r.g_ru2, &r.g_si];
        assert!(all.into_iter().flatten().all(|&g| g >= 0.0 && g.is_finite()));
        assert_eq!(r.br(1, 2), r.g_br[5]);
        assert_eq!(r.si(2, 4), r.g_si[14]);
    }

    #[test]
    fn csv_dump_has_matching_columns() {
        let p = SystemParams { m_b: 2, m_r: 2, m_t: 3, ..Default::default() };
        let r = draw(&p, RngSeed::new(5, 1));
        let header = r.csv_header();
        let row = r.csv_row(1);
        assert_eq!(header.split(',').count(), row.split(',').count());
        assert_eq!(header.split(',').count(), 1 + 4 + 2 + 3 + 3 + 6);
        let parsed: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(parsed, r.g_br[0]);
    }

    #[test]
    fn derived_seed_differs() {
        let s = RngSeed::new(11, 4);
        assert_ne!(s.derived(1), s);
        assert_ne!(s.derived(1), s.derived(2));
        assert_eq!(s.derived(1).stream, 4);
    }
}
