//! Robust error weighting.
//!
//! Each strategy maps the a-priori error `e` to `f(e) = φ'(e)/e`, the factor
//! that scales the rank-one data term of the recursion. Large (impulsive)
//! errors get a small weight and barely touch the autocorrelation estimate.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};

/// Weight returned by the continuous mixed p-norm strategy near `e = 0`,
/// where `f(e)` diverges.
pub const CMPN_WEIGHT_CAP: f64 = 1e3;

/// Choice of robust cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RobustStrategy {
    /// Unweighted least squares, `f = 1`.
    PlainRls,
    /// Maximum correntropy with Gaussian kernel width `beta`.
    Mcc { beta: f64 },
    /// Modified Huber M-estimate with threshold `ξ = tau·σ̂`, where `σ̂` is
    /// the median-based error scale over a window of `window` squared errors
    /// smoothed with factor `zeta`.
    MEstimate { tau: f64, zeta: f64, window: usize },
    /// `|e|^p` cost regularised by `epsilon`.
    LpNorm { p: f64, epsilon: f64 },
    /// Continuous mixed p-norms, `∫₁² |e|^p dp`.
    Cmpn,
}

impl RobustStrategy {
    /// Correntropy from the kernel variance `β²`.
    pub fn mcc_from_variance(beta_sq: f64) -> Self {
        RobustStrategy::Mcc {
            beta: libm::sqrt(beta_sq),
        }
    }

    /// M-estimate with `τ = 2.576`, `ζ = 0.99`, `N_w = 9`.
    pub fn m_estimate() -> Self {
        RobustStrategy::MEstimate {
            tau: 2.576,
            zeta: 0.99,
            window: 9,
        }
    }

    /// lp-norm with `ε = 0.01`.
    pub fn lp_norm(p: f64) -> Self {
        RobustStrategy::LpNorm { p, epsilon: 1e-2 }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            RobustStrategy::PlainRls | RobustStrategy::Cmpn => Ok(()),
            RobustStrategy::Mcc { beta } => {
                if beta > 0.0 && beta.is_finite() {
                    Ok(())
                } else {
                    Err(invalid("beta", "kernel width must be positive and finite"))
                }
            }
            RobustStrategy::MEstimate { tau, zeta, window } => {
                if !(tau > 0.0 && tau.is_finite()) {
                    Err(invalid("tau", "must be positive"))
                } else if !(0.0..1.0).contains(&zeta) {
                    Err(invalid("zeta", "must lie in [0, 1)"))
                } else if window < 1 {
                    Err(invalid("window", "must be at least 1"))
                } else {
                    Ok(())
                }
            }
            RobustStrategy::LpNorm { p, epsilon } => {
                if !(p > 0.0 && p <= 2.0) {
                    Err(invalid("p", "must lie in (0, 2]"))
                } else if !(epsilon > 0.0 && epsilon.is_finite()) {
                    Err(invalid("epsilon", "must be positive"))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Short label used in reports.
    pub fn label(&self) -> &'static str {
        match self {
            RobustStrategy::PlainRls => "RLS",
            RobustStrategy::Mcc { .. } => "RMCC",
            RobustStrategy::MEstimate { .. } => "RLM",
            RobustStrategy::LpNorm { .. } => "RLpN",
            RobustStrategy::Cmpn => "CMPN",
        }
    }
}

/// Median-based robust estimate of the error variance.
///
/// `σ̂²_n = ζ·σ̂²_{n-1} + c_σ·(1-ζ)·med(e²_n, …, e²_{n-N_w+1})` with
/// `c_σ = 1.483·(1 + 5/(N_w - 1))`. The very first update uses `ζ = 0`;
/// until the window is full the median runs over the samples seen so far.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaEstimator {
    sigma2: f64,
    window: VecDeque<f64>,
    capacity: usize,
    c_sigma: f64,
    zeta: f64,
    samples_seen: u64,
    scratch: Vec<f64>,
}

impl SigmaEstimator {
    pub fn new(zeta: f64, window: usize) -> Result<Self> {
        if !(0.0..1.0).contains(&zeta) {
            return Err(invalid("zeta", "must lie in [0, 1)"));
        }
        if window < 1 {
            return Err(invalid("window", "must be at least 1"));
        }
        Ok(Self {
            sigma2: 0.0,
            window: VecDeque::with_capacity(window),
            capacity: window,
            c_sigma: correction_factor(window),
            zeta,
            samples_seen: 0,
            scratch: Vec::with_capacity(window),
        })
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn c_sigma(&self) -> f64 {
        self.c_sigma
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn samples_seen(&self) -> u64 {
        self.samples_seen
    }

    /// Current window of squared errors, oldest first.
    pub fn window(&self) -> impl Iterator<Item = f64> + '_ {
        self.window.iter().copied()
    }

    /// Replaces the state; for fixtures and restoring snapshots.
    pub fn with_state(mut self, sigma2: f64, squared_errors: &[f64], samples_seen: u64) -> Self {
        self.sigma2 = sigma2.max(0.0);
        self.window.clear();
        let skip = squared_errors.len().saturating_sub(self.capacity);
        self.window.extend(squared_errors[skip..].iter().copied());
        self.samples_seen = samples_seen;
        self
    }

    /// Pushes `e²` and refreshes `σ̂²`.
    pub fn update(&mut self, e: f64) -> Result<f64> {
        if !e.is_finite() {
            return Err(Error::NonFinite {
                what: "error sample",
            });
        }
        if self.window.len() == self.capacity {
            self.window.pop_front();
        }
        self.window.push_back(e * e);

        self.scratch.clear();
        self.scratch.extend(self.window.iter().copied());
        let med = median(&mut self.scratch);
        let zeta = if self.samples_seen == 0 {
            0.0
        } else {
            self.zeta
        };
        self.sigma2 = zeta * self.sigma2 + self.c_sigma * (1.0 - zeta) * med;
        self.samples_seen += 1;
        Ok(self.sigma2)
    }
}

/// `c_σ = 1.483·(1 + 5/(N_w - 1))`; a single-sample window has no
/// small-sample correction and uses 1.483.
fn correction_factor(window: usize) -> f64 {
    if window >= 2 {
        1.483 * (1.0 + 5.0 / (window as f64 - 1.0))
    } else {
        1.483
    }
}

fn median(values: &mut [f64]) -> f64 {
    let n = values.len();
    if n == 0 {
        return 0.0;
    }
    values.sort_unstable_by(f64::total_cmp);
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// `ξ = τ·σ̂`.
pub fn threshold(est: &SigmaEstimator, tau: f64) -> f64 {
    tau * libm::sqrt(est.sigma2())
}

/// Robust weight `f(e)` for `strategy`. The M-estimate needs the error
/// scale estimator; the other strategies ignore it.
pub fn weight(strategy: &RobustStrategy, e: f64, est: Option<&SigmaEstimator>) -> Result<f64> {
    if !e.is_finite() {
        return Err(Error::NonFinite {
            what: "error sample",
        });
    }
    Ok(match *strategy {
        RobustStrategy::PlainRls => 1.0,
        RobustStrategy::Mcc { beta } => libm::exp(-e * e / (2.0 * beta * beta)),
        RobustStrategy::MEstimate { tau, .. } => {
            let est = est.ok_or(invalid(
                "sigma estimator",
                "the M-estimate weight needs an error scale estimate",
            ))?;
            if e.abs() <= threshold(est, tau) {
                1.0
            } else {
                0.0
            }
        }
        RobustStrategy::LpNorm { p, epsilon } => libm::pow(e.abs(), p) / (e * e + epsilon),
        RobustStrategy::Cmpn => cmpn_weight(e),
    })
}

/// `((2|e|-1)·ln|e| - |e| + 1) / (|e|·ln²|e|)`, continued through `|e| = 1`
/// by its Taylor series in `u = ln|e|` and capped near zero.
fn cmpn_weight(e: f64) -> f64 {
    let a = e.abs();
    if a == 0.0 {
        return CMPN_WEIGHT_CAP;
    }
    let u = libm::log(a);
    let f = if u.abs() < 1e-3 {
        // f = ∫₁² p·e^{(p-2)u} dp = 3/2 - 2u/3 + 5u²/24 - …
        1.5 - u * (2.0 / 3.0) + u * u * (5.0 / 24.0)
    } else {
        ((2.0 * a - 1.0) * u - a + 1.0) / (a * u * u)
    };
    f.min(CMPN_WEIGHT_CAP)
}
