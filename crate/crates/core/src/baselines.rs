//! Reference adaptive filters: exponentially weighted RLS, recursive MCC via
//! the matrix inversion lemma, gradient-descent MCC and LMS.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_finite, check_len, invalid, Error, Result};
use crate::filter::DcdFilter;

/// Common interface for per-sample adaptive filters.
pub trait AdaptiveFilter {
    /// Consumes `(x_n, d_n)` and returns the a-priori error.
    fn adapt(&mut self, x: &[f64], d: f64) -> Result<f64>;

    fn weights(&self) -> &[f64];
}

impl AdaptiveFilter for DcdFilter {
    fn adapt(&mut self, x: &[f64], d: f64) -> Result<f64> {
        self.step(x, d).map(|rep| rep.e)
    }

    fn weights(&self) -> &[f64] {
        DcdFilter::weights(self)
    }
}

fn check_sample(m: usize, x: &[f64], d: f64) -> Result<()> {
    check_len("regressor", m, x.len())?;
    check_finite("regressor", x)?;
    if d.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite {
            what: "desired sample",
        })
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Exponentially weighted RLS with `P_0 = δ_0^{-1} I`.
#[derive(Debug, Clone)]
pub struct Rls {
    w: Vec<f64>,
    /// Inverse autocorrelation, row-major.
    p: Vec<f64>,
    lambda: f64,
    px: Vec<f64>,
    asymmetry: f64,
}

impl Rls {
    pub fn new(taps: usize, lambda: f64, delta0: f64) -> Result<Self> {
        if taps == 0 {
            return Err(invalid("taps", "must be at least 1"));
        }
        if !(lambda > 0.0 && lambda <= 1.0) {
            return Err(invalid("lambda", "must lie in (0, 1]"));
        }
        if !(delta0 > 0.0 && delta0.is_finite()) {
            return Err(invalid("delta0", "must be positive"));
        }
        let mut p = vec![0.0; taps * taps];
        for i in 0..taps {
            p[i * taps + i] = 1.0 / delta0;
        }
        Ok(Self {
            w: vec![0.0; taps],
            p,
            lambda,
            px: vec![0.0; taps],
            asymmetry: 0.0,
        })
    }

    pub fn inverse_autocorrelation(&self) -> &[f64] {
        &self.p
    }

    /// Largest `|P_ij - P_ji|` seen before the last re-symmetrisation.
    pub fn last_asymmetry(&self) -> f64 {
        self.asymmetry
    }

    /// RLS step whose data term is scaled by `f`:
    /// `k = f·P·x / (λ + f·xᵀ·P·x)`, `w ← w + k·e`, `P ← (P - k·xᵀP)/λ`.
    pub fn weighted_step(&mut self, x: &[f64], d: f64, f: f64) -> Result<f64> {
        let m = self.w.len();
        check_sample(m, x, d)?;
        let e = d - dot(x, &self.w);
        self.update(x, e, f);
        Ok(e)
    }

    fn update(&mut self, x: &[f64], e: f64, f: f64) {
        let m = self.w.len();
        for i in 0..m {
            self.px[i] = dot(&self.p[i * m..(i + 1) * m], x);
        }
        let denom = self.lambda + f * dot(x, &self.px);
        let gain = f / denom;
        for i in 0..m {
            self.w[i] += gain * self.px[i] * e;
        }
        // P symmetric, so xᵀP = (Px)ᵀ.
        let inv_lambda = 1.0 / self.lambda;
        for i in 0..m {
            let ki = gain * self.px[i];
            for j in 0..m {
                let v = &mut self.p[i * m + j];
                *v = (*v - ki * self.px[j]) * inv_lambda;
            }
        }
        let mut worst = 0.0f64;
        for i in 0..m {
            for j in (i + 1)..m {
                let a = self.p[i * m + j];
                let b = self.p[j * m + i];
                worst = worst.max((a - b).abs());
                let avg = 0.5 * (a + b);
                self.p[i * m + j] = avg;
                self.p[j * m + i] = avg;
            }
        }
        self.asymmetry = worst;
    }
}

impl AdaptiveFilter for Rls {
    fn adapt(&mut self, x: &[f64], d: f64) -> Result<f64> {
        self.weighted_step(x, d, 1.0)
    }

    fn weights(&self) -> &[f64] {
        &self.w
    }
}

/// Recursive MCC: RLS with the data term weighted by `exp(-e²/(2β²))`.
#[derive(Debug, Clone)]
pub struct Rmcc {
    inner: Rls,
    beta: f64,
}

impl Rmcc {
    pub fn new(taps: usize, lambda: f64, delta0: f64, beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(invalid("beta", "kernel width must be positive and finite"));
        }
        Ok(Self {
            inner: Rls::new(taps, lambda, delta0)?,
            beta,
        })
    }

    pub fn from_variance(taps: usize, lambda: f64, delta0: f64, beta_sq: f64) -> Result<Self> {
        Self::new(taps, lambda, delta0, libm::sqrt(beta_sq))
    }

    pub fn inverse_autocorrelation(&self) -> &[f64] {
        self.inner.inverse_autocorrelation()
    }
}

impl AdaptiveFilter for Rmcc {
    fn adapt(&mut self, x: &[f64], d: f64) -> Result<f64> {
        check_sample(self.inner.w.len(), x, d)?;
        let e = d - dot(x, &self.inner.w);
        let f = libm::exp(-e * e / (2.0 * self.beta * self.beta));
        self.inner.update(x, e, f);
        Ok(e)
    }

    fn weights(&self) -> &[f64] {
        &self.inner.w
    }
}

/// Gradient-descent MCC: `w ← w + μ·f(e)·e·x`.
#[derive(Debug, Clone)]
pub struct GdMcc {
    w: Vec<f64>,
    mu: f64,
    beta: f64,
}

impl GdMcc {
    pub fn new(taps: usize, mu: f64, beta: f64) -> Result<Self> {
        if taps == 0 {
            return Err(invalid("taps", "must be at least 1"));
        }
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(invalid("mu", "step size must be positive"));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(invalid("beta", "kernel width must be positive and finite"));
        }
        Ok(Self {
            w: vec![0.0; taps],
            mu,
            beta,
        })
    }

    pub fn from_variance(taps: usize, mu: f64, beta_sq: f64) -> Result<Self> {
        Self::new(taps, mu, libm::sqrt(beta_sq))
    }
}

impl AdaptiveFilter for GdMcc {
    fn adapt(&mut self, x: &[f64], d: f64) -> Result<f64> {
        check_sample(self.w.len(), x, d)?;
        let e = d - dot(x, &self.w);
        let g = self.mu * libm::exp(-e * e / (2.0 * self.beta * self.beta)) * e;
        for (w, xi) in self.w.iter_mut().zip(x) {
            *w += g * xi;
        }
        Ok(e)
    }

    fn weights(&self) -> &[f64] {
        &self.w
    }
}

/// Least mean squares: `w ← w + μ·e·x`.
#[derive(Debug, Clone)]
pub struct Lms {
    w: Vec<f64>,
    mu: f64,
}

impl Lms {
    pub fn new(taps: usize, mu: f64) -> Result<Self> {
        if taps == 0 {
            return Err(invalid("taps", "must be at least 1"));
        }
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(invalid("mu", "step size must be positive"));
        }
        Ok(Self {
            w: vec![0.0; taps],
            mu,
        })
    }
}

impl AdaptiveFilter for Lms {
    fn adapt(&mut self, x: &[f64], d: f64) -> Result<f64> {
        check_sample(self.w.len(), x, d)?;
        let e = d - dot(x, &self.w);
        for (w, xi) in self.w.iter_mut().zip(x) {
            *w += self.mu * e * xi;
        }
        Ok(e)
    }

    fn weights(&self) -> &[f64] {
        &self.w
    }
}
