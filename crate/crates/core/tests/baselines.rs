mod common;

use common::{gauss_solve, gaussian, max_abs_diff, nmsd_db, rng, tapped};
use robust_dcd::{
    AdaptiveFilter, DcdConfig, DcdFilter, FilterConfig, Lms, Rls, Rmcc, RobustStrategy,
};

fn channel_data(
    m: usize,
    n: usize,
    seed: u64,
    noise_sd: f64,
) -> (Vec<Vec<f64>>, Vec<f64>, Vec<f64>) {
    let mut g = rng(seed);
    let w_o: Vec<f64> = (0..m)
        .map(|_| gaussian(&mut g) / (m as f64).sqrt())
        .collect();
    let signal: Vec<f64> = (0..n).map(|_| gaussian(&mut g)).collect();
    let xs = tapped(&signal, m);
    let ds = xs
        .iter()
        .map(|x| x.iter().zip(&w_o).map(|(a, b)| a * b).sum::<f64>() + noise_sd * gaussian(&mut g))
        .collect();
    (xs, ds, w_o)
}

#[test]
fn rls_matches_direct_normal_equations() {
    let (m, lambda, delta0) = (4, 0.995, 0.01);
    let (xs, ds, w_o) = channel_data(m, 2000, 1, 0.05);
    let mut rls = Rls::new(m, lambda, delta0).unwrap();
    let mut r = vec![0.0; m * m];
    let mut z = vec![0.0; m];
    for i in 0..m {
        r[i * m + i] = delta0;
    }
    for (x, &d) in xs.iter().zip(&ds) {
        rls.adapt(x, d).unwrap();
        for i in 0..m {
            z[i] = lambda * z[i] + d * x[i];
            for j in 0..m {
                r[i * m + j] = lambda * r[i * m + j] + x[i] * x[j];
            }
        }
        let direct = gauss_solve(&r, &z);
        let gap = (nmsd_db(rls.weights(), &w_o) - nmsd_db(&direct, &w_o)).abs();
        assert!(gap <= 0.5, "gap {gap} dB");
        assert!(rls.last_asymmetry() <= 1e-8);
    }
}

// 1 - f ≈ e²/(2β²), so the trajectories differ by O(e²/β²) relative.
#[test]
fn wide_kernel_rmcc_equals_rls() {
    let m = 6;
    let (xs, ds, _) = channel_data(m, 1500, 2, 0.05);
    let gaps: Vec<f64> = [1e6, 1e8, 1e10]
        .iter()
        .map(|&beta_sq| {
            let mut rls = Rls::new(m, 0.99, 1.0).unwrap();
            let mut rmcc = Rmcc::from_variance(m, 0.99, 1.0, beta_sq).unwrap();
            let mut worst = 0.0f64;
            for (x, &d) in xs.iter().zip(&ds) {
                rls.adapt(x, d).unwrap();
                rmcc.adapt(x, d).unwrap();
                worst = worst.max(max_abs_diff(rls.weights(), rmcc.weights()));
            }
            worst
        })
        .collect();
    assert!(gaps[0] <= 2e-7, "β² = 1e6: {:e}", gaps[0]);
    assert!(gaps[2] <= 1e-9, "β² = 1e10: {:e}", gaps[2]);
    // The gap shrinks like 1/β².
    for w in gaps.windows(2) {
        let ratio = w[0] / w[1];
        assert!((ratio / 100.0 - 1.0).abs() < 0.05, "ratio {ratio}");
    }
}

#[test]
fn rmcc_agrees_with_dcd_mcc() {
    let m = 8;
    let runs = 20;
    let n = 2000;
    let mut acc = (vec![0.0; n], vec![0.0; n]);
    for run in 0..runs {
        let (xs, ds, w_o) = channel_data(m, n, 100 + run, 0.05);
        let mut rmcc = Rmcc::from_variance(m, 0.99, 1.0, 0.5).unwrap();
        let cfg = FilterConfig::new(m, 0.99, RobustStrategy::mcc_from_variance(0.5))
            .with_delta0(1.0)
            .with_dcd(DcdConfig::new(2.0, 30, 4 * m).unwrap());
        let mut dcd = DcdFilter::new(cfg).unwrap();
        for (k, (x, &d)) in xs.iter().zip(&ds).enumerate() {
            rmcc.adapt(x, d).unwrap();
            dcd.adapt(x, d).unwrap();
            acc.0[k] += 10f64.powf(nmsd_db(rmcc.weights(), &w_o) / 10.0);
            acc.1[k] += 10f64.powf(nmsd_db(AdaptiveFilter::weights(&dcd), &w_o) / 10.0);
        }
    }
    let worst = acc
        .0
        .iter()
        .zip(&acc.1)
        .map(|(a, b)| (10.0 * (a / b).log10()).abs())
        .fold(0.0, f64::max);
    assert!(worst <= 0.5, "gap {worst} dB");
}

#[test]
fn lms_stable_below_step_bound() {
    // White unit-variance input: covariance I, largest eigenvalue 1.
    let m = 8;
    let (xs, ds, w_o) = channel_data(m, 5000, 3, 0.05);
    let mut lms = Lms::new(m, 0.5 * 2.0 / (m as f64 + 2.0)).unwrap();
    for (x, &d) in xs.iter().zip(&ds) {
        lms.adapt(x, d).unwrap();
        assert!(nmsd_db(lms.weights(), &w_o) < 10.0);
    }
    assert!(nmsd_db(lms.weights(), &w_o) < -15.0);
}
