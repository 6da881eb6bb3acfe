use proptest::prelude::*;
use robust_dcd::{weight, RobustStrategy, SigmaEstimator};

fn quad_cmpn(a: f64) -> f64 {
    // Composite Simpson on ∫₁² p·a^{p-2} dp.
    let n = 2000;
    let h = 1.0 / n as f64;
    let g = |p: f64| p * a.powf(p - 2.0);
    let mut s = g(1.0) + g(2.0);
    for k in 1..n {
        let p = 1.0 + k as f64 * h;
        s += if k % 2 == 1 { 4.0 } else { 2.0 } * g(p);
    }
    s * h / 3.0
}

proptest! {
    #[test]
    fn mcc_weight_in_unit_interval_and_monotone(beta_sq in 1e-3f64..1e3, a in -50.0f64..50.0, b in -50.0f64..50.0) {
        let s = RobustStrategy::mcc_from_variance(beta_sq);
        let fa = weight(&s, a, None).unwrap();
        let fb = weight(&s, b, None).unwrap();
        prop_assert!((0.0..=1.0).contains(&fa));
        if a.abs() <= b.abs() {
            prop_assert!(fa >= fb);
        }
    }

    #[test]
    fn mcc_wide_kernel_is_unit(e in -10.0f64..10.0) {
        let f = weight(&RobustStrategy::mcc_from_variance(1e6), e, None).unwrap();
        prop_assert!(f > 0.999);
    }

    #[test]
    fn m_estimate_is_binary(sigma2 in 0.0f64..10.0, e in -20.0f64..20.0) {
        let est = SigmaEstimator::new(0.99, 9).unwrap().with_state(sigma2, &[], 9);
        let f = weight(&RobustStrategy::m_estimate(), e, Some(&est)).unwrap();
        prop_assert!(f == 0.0 || f == 1.0);
    }

    #[test]
    fn quadratic_lp_norm_approaches_unit(e in prop_oneof![-100.0f64..-1e-2, 1e-2f64..100.0], eps_exp in -12i32..-4) {
        let eps = 10f64.powi(eps_exp);
        let f = weight(&RobustStrategy::LpNorm { p: 2.0, epsilon: eps }, e, None).unwrap();
        // 1 - f = ε/(e² + ε) < ε/e², up to rounding of f near 1.
        prop_assert!((f - 1.0).abs() <= eps / (e * e) + 4.0 * f64::EPSILON);
    }

    #[test]
    fn cmpn_matches_integral_definition(a in 0.05f64..20.0) {
        let f = weight(&RobustStrategy::Cmpn, a, None).unwrap();
        let q = quad_cmpn(a);
        prop_assert!((f - q).abs() <= 1e-7 * q.max(1.0), "{} vs {}", f, q);
    }

    #[test]
    fn sigma_stays_finite_and_nonnegative(errors in prop::collection::vec(-1e6f64..1e6, 1..60), zeta in 0.0f64..0.999) {
        let mut est = SigmaEstimator::new(zeta, 9).unwrap();
        for e in errors {
            let s = est.update(e).unwrap();
            prop_assert!(s.is_finite() && s >= 0.0);
        }
    }

    // With N_w = 9, up to four corrupted squared errors cannot push the
    // median above the largest clean one.
    #[test]
    fn median_resists_outliers(
        clean in prop::collection::vec(-3.0f64..3.0, 9),
        positions in prop::sample::subsequence((0..9).collect::<Vec<usize>>(), 0..=4),
        outlier in 1e3f64..1e12,
    ) {
        let mut window = clean.clone();
        for &p in &positions {
            window[p] = outlier;
        }
        let mut est = SigmaEstimator::new(0.0, 9).unwrap();
        for &e in &window[..8] {
            est.update(e).unwrap();
        }
        let s = est.update(window[8]).unwrap();
        let max_clean = clean
            .iter()
            .enumerate()
            .filter(|(i, _)| !positions.contains(i))
            .map(|(_, e)| e * e)
            .fold(0.0f64, f64::max);
        prop_assert!(s <= est.c_sigma() * max_clean * (1.0 + 1e-12));
    }
}
