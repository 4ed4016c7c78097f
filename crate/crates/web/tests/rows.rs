use fdnoma_web::{analytic_rows, cdf_rows, scheme_names, simulate_rows, Setup, CDF_STRIDE, CURVE_STRIDE, SIM_STRIDE};

#[test]
fn curves_have_fixed_stride() {
    let rows = analytic_rows(&Setup::new(), 0.0, 30.0, 10.0).unwrap();
    assert_eq!(rows.len(), 4 * CURVE_STRIDE);
    for r in rows.chunks(CURVE_STRIDE) {
        assert!(r[1..].iter().all(|v| v.is_finite() && *v >= 0.0));
        assert!(r[2] < 2.0 && r[4] < 2.0);
    }
    // selection gain on the near-user links
    assert!(rows[CURVE_STRIDE * 3 + 1] > rows[CURVE_STRIDE * 3 + 5]);
}

#[test]
fn cdfs_run_from_zero_to_one() {
    let s = Setup::new();
    let g2 = cdf_rows(&s, 20.0, "gamma2", 101).unwrap();
    assert_eq!(g2.len(), 101 * CDF_STRIDE);
    assert_eq!((g2[1], g2[2]), (0.0, 0.0));
    let last = &g2[100 * CDF_STRIDE..];
    assert_eq!((last[1], last[2]), (1.0, 1.0));
    for w in g2.chunks(CDF_STRIDE).collect::<Vec<_>>().windows(2) {
        assert!(w[1][1] >= w[0][1] && w[1][2] >= w[0][2]);
    }
    let g1 = cdf_rows(&s, 20.0, "gamma1", 50).unwrap();
    assert!(g1[49 * CDF_STRIDE + 1] > 0.99);
    assert!(cdf_rows(&s, 20.0, "gamma3", 50).is_err());
}

#[test]
fn simulation_covers_every_scheme_and_is_seeded() {
    let s = Setup::new();
    let a = simulate_rows(&s, 30.0, 4_000, 1).unwrap();
    assert_eq!(a.len(), scheme_names().len() * SIM_STRIDE);
    assert_eq!(a, simulate_rows(&s, 30.0, 4_000, 1).unwrap());
    let opt = scheme_names().iter().position(|n| n == "optimum_sumrate").unwrap();
    let best = a[opt * SIM_STRIDE + 2];
    assert!(a.chunks(SIM_STRIDE).all(|r| r[2] <= best));
}

#[test]
fn bad_inputs_are_rejected() {
    let s = Setup { a1: 0.6, ..Setup::new() };
    assert!(analytic_rows(&s, 0.0, 10.0, 5.0).unwrap_err().contains("POWER_SPLIT_INVALID"));
    assert!(analytic_rows(&Setup::new(), 10.0, 0.0, 5.0).is_err());
    assert!(analytic_rows(&Setup::new(), 0.0, 1e6, 1e-3).is_err());
    assert!(simulate_rows(&Setup::new(), 10.0, 0, 1).is_err());
    assert!(simulate_rows(&Setup::new(), 10.0, 10_000_000, 1).is_err());
    let big = Setup { m_r: 40, ..Setup::new() };
    assert!(cdf_rows(&big, 10.0, "gamma2", 10).is_err());
}
