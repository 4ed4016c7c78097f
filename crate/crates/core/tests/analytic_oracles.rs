mod common;

use fdnoma_core::analytic::{
    exp_int_ei, rate_from_cdf, AnalyticError, AnalyticModel, Tolerance, MAX_ANTENNAS,
};
use fdnoma_core::montecarlo::{estimate_rates, MetricEstimate};
use fdnoma_core::selection::Scheme;
use fdnoma_core::sinr::sinr_bundle;
use fdnoma_core::{draw, RngSeed, SystemParams};
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn ei_against_defining_integral() {
    for x in [-0.01, -0.3, -1.0, -2.5, -7.0, -19.0, -33.0, -40.0] {
        let e = exp_int_ei(x).unwrap();
        assert!(rel(e, common::ei_oracle(x)) < 1e-12, "x = {x}");
    }
    assert!((exp_int_ei(-1.0).unwrap() + 0.219383934395520).abs() < 1e-12);
    let far = exp_int_ei(-50.0).unwrap();
    assert!(far < 0.0 && far > -1e-20);
    assert!(matches!(exp_int_ei(0.0), Err(AnalyticError::Domain(_))));
    assert!(exp_int_ei(1.0).is_err());
}

#[test]
fn rate_from_cdf_known_integrals() {
    let tol = Tolerance::tight();
    let one = rate_from_cdf(|_| 1.0, None, tol).unwrap();
    assert_eq!(one.value, 0.0);
    let exp = rate_from_cdf(|x| 1.0 - (-x).exp(), None, tol).unwrap();
    // e·E1(1)/ln 2
    assert!(rel(exp.value, 0.860347382270886) < 1e-10, "{}", exp.value);
    assert!(exp.abs_error_bound <= 1e-12 * exp.value.max(1.0));
}

/// Empirical `P(stat <= x)` over `n` draws, compared with `cdf` within three
/// binomial standard errors.
fn empirical_cdf_check(p: &SystemParams, scheme: Scheme, n: u64, x: f64, cdf: f64, stat: impl Fn(&fdnoma_core::SinrBundle) -> f64) {
    let mut below = 0u64;
    for t in 0..n {
        let seed = RngSeed::new(606, t);
        let r = draw(p, seed);
        let b = sinr_bundle(&r, scheme.select(&r, p, seed), p);
        below += u64::from(stat(&b) <= x);
    }
    let freq = below as f64 / n as f64;
    let se = (cdf * (1.0 - cdf) / n as f64).sqrt();
    assert!((freq - cdf).abs() <= 3.0 * se, "empirical {freq}, analytic {cdf}, se {se}");
}

#[test]
fn near_user_cdf_single_antenna_matches_draws() {
    let p = SystemParams { m_b: 1, m_t: 1, ..common::reference(20.0) };
    let m = AnalyticModel::new(&p).unwrap();
    let g = m.gains();
    let closed = 1.0 - (-1.0 / (p.a1 * g.lam_su1)).exp() / (1.0 + g.lam_ru1 / (p.a1 * g.lam_su1));
    assert!(rel(m.cdf_gamma1_max_u1(1.0), closed) < 1e-14);
    empirical_cdf_check(&p, Scheme::MaxU1, 10_000_000, 1.0, closed, |b| b.gamma_1);
}

#[test]
fn far_user_cdf_matches_draws() {
    let p = common::reference(20.0);
    let m = AnalyticModel::new(&p).unwrap();
    empirical_cdf_check(&p, Scheme::MaxU1Analytic, 10_000_000, 0.5, m.cdf_gamma2_max_u1(0.5), |b| b.gamma_2);
}

#[test]
fn far_user_rates_equal_cdf_quadrature() {
    for db in [0.0, 20.0, 40.0] {
        let p = common::reference(db);
        let m = AnalyticModel::new(&p).unwrap();
        let tol = Tolerance::tight();
        let top = Some(p.sinr_ceiling());
        let r1 = m.rate_u2_max_u1(tol).unwrap().value;
        let q1 = rate_from_cdf(|x| m.cdf_gamma2_max_u1(x), top, tol).unwrap().value;
        let r2 = m.rate_u2_max_u2(tol).unwrap().value;
        let q2 = rate_from_cdf(|x| m.cdf_gamma2_max_u2(x), top, tol).unwrap().value;
        assert!(rel(r1, q1) < 1e-9 && rel(r2, q2) < 1e-9, "{db} dB");
        assert!(r1 < 2.0 && r2 < 2.0);
    }
}

#[test]
fn random_pair_matches_max_u2_near_user_rate() {
    let p = common::reference(20.0);
    let analytic = AnalyticModel::new(&p).unwrap().rate_u1_max_u2().unwrap();
    let (mc, _, _) = estimate_rates(&p, Scheme::Random, 1_000_000, 17);
    assert!(mc.z_score(&MetricEstimate::analytic(analytic)) < 3.0);
}

#[test]
fn vanishing_near_link_gives_zero_rate() {
    let p = SystemParams { var_bu1: 1e-12, ..common::reference(20.0) };
    let m = AnalyticModel::new(&p).unwrap();
    assert!(m.rate_u1_max_u1().unwrap() < 1e-9);
    assert!(m.rate_u1_max_u2().unwrap() < 1e-9);
}

#[test]
fn antenna_cap_is_enforced() {
    let p = SystemParams { m_r: MAX_ANTENNAS + 1, ..SystemParams::default() };
    assert!(matches!(AnalyticModel::new(&p), Err(AnalyticError::AntennaCountUnsupported { .. })));
    let p = SystemParams { m_r: MAX_ANTENNAS, ..SystemParams::default() };
    assert!(AnalyticModel::new(&p).is_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn near_user_rates_equal_cdf_quadrature(
        m_b in 1usize..=8,
        m_t in 1usize..=8,
        db in -5.0f64..50.0,
        a1 in 0.05f64..0.45,
        k1 in 0.001f64..0.5,
    ) {
        let p = SystemParams { m_b, m_t, a1, a2: 1.0 - a1, k1, ..common::reference(db) };
        let m = AnalyticModel::new(&p).unwrap();
        let tol = Tolerance::tight();
        let q1 = rate_from_cdf(|x| m.cdf_gamma1_max_u1(x), None, tol).unwrap().value;
        let q2 = rate_from_cdf(|x| m.cdf_gamma1_max_u2(x), None, tol).unwrap().value;
        prop_assert!(rel(m.rate_u1_max_u1().unwrap(), q1) < 1e-8);
        prop_assert!(rel(m.rate_u1_max_u2().unwrap(), q2) < 1e-8);
    }

    #[test]
    fn outages_are_probabilities(db in -10.0f64..70.0, r1 in 0.05f64..3.0, r2 in 0.05f64..2.5) {
        let p = SystemParams { rate1: r1, rate2: r2, ..common::reference(db) };
        let m = AnalyticModel::new(&p).unwrap();
        for o in [m.outage_u1_max_u1(), m.outage_u1_max_u2(), m.outage_u2_max_u1(), m.outage_u2_max_u2()] {
            prop_assert!((0.0..=1.0).contains(&o));
        }
        // more antennas on the near-user links never hurt under max-U1
        prop_assert!(m.outage_u1_max_u1() <= m.outage_u1_max_u2() + 1e-12);
    }
}
