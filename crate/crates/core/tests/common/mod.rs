//! Test-only oracles. Nothing here calls into the code under test.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Dense solve of `A x = b` by Gaussian elimination with partial pivoting.
pub fn gauss_solve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut row = a[i * n..(i + 1) * n].to_vec();
            row.push(b[i]);
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        m.swap(col, pivot);
        let pivot_row = m[col].clone();
        for row in m.iter_mut().skip(col + 1) {
            let factor = row[col] / pivot_row[col];
            for (dst, src) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *dst -= factor * src;
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = ((i + 1)..n).map(|k| m[i][k] * x[k]).sum();
        x[i] = (m[i][n] - s) / m[i][i];
    }
    x
}

/// Random SPD matrix `B·Bᵀ/M + 0.5·I`, row-major.
pub fn random_spd(m: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let b: Vec<f64> = (0..m * m)
        .map(|_| rng.random::<f64>() * 2.0 - 1.0)
        .collect();
    let mut a = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            let s: f64 = (0..m).map(|k| b[i * m + k] * b[j * m + k]).sum();
            a[i * m + j] = s / m as f64 * 3.0;
        }
        a[i * m + i] += 0.5;
    }
    a
}

pub fn mat_vec(a: &[f64], x: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|i| (0..n).map(|j| a[i * n + j] * x[j]).sum())
        .collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller, independent of the crate's samplers.
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// `10·log10(‖a - b‖² / ‖b‖²)`.
pub fn nmsd_db(w: &[f64], w_o: &[f64]) -> f64 {
    let num: f64 = w.iter().zip(w_o).map(|(a, b)| (a - b).powi(2)).sum();
    let den: f64 = w_o.iter().map(|b| b * b).sum();
    10.0 * (num / den).log10()
}

/// Tapped-delay regressors `(x_n, …, x_{n-M+1})` with zero prehistory.
pub fn tapped(signal: &[f64], m: usize) -> Vec<Vec<f64>> {
    (0..signal.len())
        .map(|n| {
            (0..m)
                .map(|k| if n >= k { signal[n - k] } else { 0.0 })
                .collect()
        })
        .collect()
}
