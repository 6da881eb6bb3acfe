//! The unified DCD-based robust recursion.
//!
//! Per sample `n` with regressor `x_n` and desired output `d_n`:
//!
//! ```text
//! e_n  = d_n - x_nᵀ ŵ_{n-1}
//! f_n  = f(e_n)
//! R_n  = λ_n R_{n-1} + f_n x_n x_nᵀ + (δ_n - λ_n δ_{n-1}) I
//! b_n  = λ_n r_{n-1} + f_n e_n x_n - (δ_n - λ_n δ_{n-1}) ŵ_{n-1}
//! (Δŵ_n, r_n) = DCD(R_n, b_n)
//! ŵ_n  = ŵ_{n-1} + Δŵ_n
//! ```
//!
//! With the default decaying regularisation `δ_n = λ_n δ_{n-1}` the
//! bracketed terms vanish. Tapped-delay regressors can use the shifted
//! block update, which only recomputes the first column of `R_n`.

use alloc::vec;
use alloc::vec::Vec;

use crate::dcd::{solve_in_place, DcdConfig, DcdStats};
use crate::error::{check_finite, check_len, invalid, Result};
use crate::matrix::SymMatrix;
use crate::robust::{threshold, weight, RobustStrategy, SigmaEstimator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InputStructure {
    /// Arbitrary regressors: full rank-one update, `O(M²)`.
    #[default]
    General,
    /// `x_n = (x_n, x_{n-1}, …, x_{n-M+1})`: shift the upper-left block and
    /// refresh the first column, `O(M)`.
    TappedDelay,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Regularization {
    /// `δ_n = λ_n δ_{n-1}`; the diagonal loading decays with the data.
    #[default]
    Decaying,
    /// `δ_n = δ_0` for every `n`.
    Constant,
}

/// How the impulse-free squared error that drives the forgetting factor is
/// obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ImpulseFreeError {
    /// `min(e_n², ξ_n²)` with `ξ_n = τ·σ̂`.
    #[default]
    Clipped,
    /// `σ̂²` itself.
    SigmaEstimate,
}

/// Variable forgetting factor `λ_n = λ_min + (1 - λ_min)·exp(-ρ·e²_{n,f})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VffConfig {
    pub rho: f64,
    pub lambda_min: f64,
    pub source: ImpulseFreeError,
    /// Threshold multiplier for [`ImpulseFreeError::Clipped`].
    pub tau: f64,
    /// Smoothing of the error scale estimate (used unless the strategy is an
    /// M-estimate, which brings its own).
    pub zeta: f64,
    pub window: usize,
}

impl VffConfig {
    pub fn new(rho: f64, lambda_min: f64) -> Self {
        Self {
            rho,
            lambda_min,
            source: ImpulseFreeError::Clipped,
            tau: 2.576,
            zeta: 0.99,
            window: 9,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return Err(invalid("rho", "must be positive"));
        }
        if !(self.lambda_min > 0.0 && self.lambda_min < 1.0) {
            return Err(invalid("lambda_min", "must lie in (0, 1)"));
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(invalid("tau", "must be positive"));
        }
        Ok(())
    }
}

/// `λ_min + (1 - λ_min)·exp(-ρ·e2_f)`, always in `[λ_min, 1]`.
pub fn vff_step(vff: &VffConfig, e2_f: f64) -> f64 {
    let lambda = vff.lambda_min + (1.0 - vff.lambda_min) * libm::exp(-vff.rho * e2_f.max(0.0));
    lambda.clamp(vff.lambda_min, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterConfig {
    pub taps: usize,
    pub lambda: f64,
    pub delta0: f64,
    pub strategy: RobustStrategy,
    pub dcd: DcdConfig,
    pub structure: InputStructure,
    pub vff: Option<VffConfig>,
    pub regularization: Regularization,
}

impl FilterConfig {
    /// Defaults: `δ_0 = 0.01`, DCD `H = 1, M_b = 16, N_u = 8`, general
    /// regressors, fixed forgetting factor.
    pub fn new(taps: usize, lambda: f64, strategy: RobustStrategy) -> Self {
        Self {
            taps,
            lambda,
            delta0: 1e-2,
            strategy,
            dcd: DcdConfig::default(),
            structure: InputStructure::General,
            vff: None,
            regularization: Regularization::Decaying,
        }
    }

    pub fn with_dcd(mut self, dcd: DcdConfig) -> Self {
        self.dcd = dcd;
        self
    }

    pub fn with_delta0(mut self, delta0: f64) -> Self {
        self.delta0 = delta0;
        self
    }

    pub fn with_structure(mut self, structure: InputStructure) -> Self {
        self.structure = structure;
        self
    }

    pub fn with_vff(mut self, vff: VffConfig) -> Self {
        self.vff = Some(vff);
        self
    }

    pub fn with_regularization(mut self, reg: Regularization) -> Self {
        self.regularization = reg;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.taps == 0 {
            return Err(invalid("taps", "must be at least 1"));
        }
        // λ = 1 is accepted for growing-window tests.
        if !(self.lambda > 0.0 && self.lambda <= 1.0) {
            return Err(invalid("lambda", "must lie in (0, 1]"));
        }
        if !(self.delta0 > 0.0 && self.delta0.is_finite()) {
            return Err(invalid("delta0", "must be positive"));
        }
        self.strategy.validate()?;
        if let Some(vff) = &self.vff {
            vff.validate()?;
        }
        Ok(())
    }
}

/// Per-step diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    /// A-priori error.
    pub e: f64,
    /// Robust weight applied to the data term.
    pub f: f64,
    pub lambda_used: f64,
    pub dcd: DcdStats,
}

/// Plain record of the filter state for export.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterSnapshot {
    pub n: u64,
    pub weights: Vec<f64>,
    pub lambda: f64,
    pub sigma2: f64,
    pub delta: f64,
}

/// A DCD-based robust RLS filter.
#[derive(Debug, Clone)]
pub struct DcdFilter {
    cfg: FilterConfig,
    w_hat: Vec<f64>,
    r: SymMatrix,
    residual: Vec<f64>,
    delta_w: Vec<f64>,
    /// Uniform diagonal loading currently contained in `r`.
    delta: f64,
    last_lambda: f64,
    n: u64,
    sigma: SigmaEstimator,
}

impl DcdFilter {
    /// `R_0 = δ_0 I`, `ŵ_0 = 0`, `r_0 = 0`.
    pub fn new(cfg: FilterConfig) -> Result<Self> {
        cfg.validate()?;
        let (zeta, window) = match (cfg.strategy, cfg.vff) {
            (RobustStrategy::MEstimate { zeta, window, .. }, _) => (zeta, window),
            (_, Some(vff)) => (vff.zeta, vff.window),
            _ => (0.99, 9),
        };
        let m = cfg.taps;
        Ok(Self {
            w_hat: vec![0.0; m],
            r: SymMatrix::scaled_identity(m, cfg.delta0),
            residual: vec![0.0; m],
            delta_w: vec![0.0; m],
            delta: cfg.delta0,
            last_lambda: cfg.lambda,
            n: 0,
            sigma: SigmaEstimator::new(zeta, window)?,
            cfg,
        })
    }

    pub fn config(&self) -> &FilterConfig {
        &self.cfg
    }

    pub fn weights(&self) -> &[f64] {
        &self.w_hat
    }

    pub fn autocorrelation(&self) -> &SymMatrix {
        &self.r
    }

    pub fn residual(&self) -> &[f64] {
        &self.residual
    }

    /// Increment applied by the most recent step.
    pub fn last_increment(&self) -> &[f64] {
        &self.delta_w
    }

    pub fn sigma_estimator(&self) -> &SigmaEstimator {
        &self.sigma
    }

    pub fn samples_seen(&self) -> u64 {
        self.n
    }

    pub fn snapshot(&self) -> FilterSnapshot {
        FilterSnapshot {
            n: self.n,
            weights: self.w_hat.clone(),
            lambda: self.last_lambda,
            sigma2: self.sigma.sigma2(),
            delta: self.delta,
        }
    }

    /// Processes one sample.
    pub fn step(&mut self, x: &[f64], d: f64) -> Result<StepReport> {
        let m = self.cfg.taps;
        check_len("regressor", m, x.len())?;
        check_finite("regressor", x)?;
        if !d.is_finite() {
            return Err(crate::Error::NonFinite {
                what: "desired sample",
            });
        }

        let e = d - dot(x, &self.w_hat);
        // Thresholds use the error scale from before this sample.
        let f = weight(&self.cfg.strategy, e, Some(&self.sigma))?;
        let lambda = match &self.cfg.vff {
            None => self.cfg.lambda,
            Some(vff) => {
                let e2_f = match vff.source {
                    ImpulseFreeError::Clipped => {
                        let xi = threshold(&self.sigma, vff.tau);
                        (e * e).min(xi * xi)
                    }
                    ImpulseFreeError::SigmaEstimate => self.sigma.sigma2(),
                };
                vff_step(vff, e2_f)
            }
        };

        let prev_delta = self.delta;
        let next_delta = match self.cfg.regularization {
            Regularization::Decaying => lambda * prev_delta,
            Regularization::Constant => self.cfg.delta0,
        };
        let diag_term = match self.cfg.regularization {
            Regularization::Decaying => 0.0,
            Regularization::Constant => next_delta - lambda * prev_delta,
        };

        match self.cfg.structure {
            InputStructure::General => {
                update_r_general(&mut self.r, x, f, lambda);
                if diag_term != 0.0 {
                    let data = self.r.data_mut();
                    for i in 0..m {
                        data[i * m + i] += diag_term;
                    }
                }
            }
            InputStructure::TappedDelay => {
                shift_and_refresh(&mut self.r, x, f, lambda, prev_delta, next_delta);
            }
        }
        self.delta = next_delta;

        // b_n overwrites r_{n-1}; the solver turns it into r_n.
        let fe = f * e;
        for i in 0..m {
            self.residual[i] = lambda * self.residual[i] + fe * x[i] - diag_term * self.w_hat[i];
        }
        let stats = solve_in_place(
            &self.r,
            &mut self.residual,
            &mut self.delta_w,
            &self.cfg.dcd,
        );
        for (w, dw) in self.w_hat.iter_mut().zip(&self.delta_w) {
            *w += dw;
        }

        self.sigma.update(e)?;
        self.last_lambda = lambda;
        self.n += 1;
        Ok(StepReport {
            e,
            f,
            lambda_used: lambda,
            dcd: stats,
        })
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `R ← λR + f·x·xᵀ`, upper triangle computed and mirrored.
pub fn update_r_general(r: &mut SymMatrix, x: &[f64], f: f64, lambda: f64) {
    let m = r.dim();
    debug_assert_eq!(x.len(), m);
    let data = r.data_mut();
    for i in 0..m {
        let fxi = f * x[i];
        for j in i..m {
            let v = lambda * data[i * m + j] + fxi * x[j];
            data[i * m + j] = v;
            data[j * m + i] = v;
        }
    }
}

/// Tapped-delay update: the lower-right `(M-1)×(M-1)` block takes the
/// upper-left block of the previous matrix, the first column becomes
/// `λ·R[:,0] + f·x_0·x`, and the first row mirrors it.
///
/// `reg` is the uniform diagonal loading carried by `r` (`δ_{n-1}`). It is
/// rescaled to `λ·reg` in the copied block so that, for `f ≡ 1` and a
/// zero-prehistory regressor, the result equals [`update_r_general`] exactly.
pub fn update_r_tapped_delay(r: &mut SymMatrix, x: &[f64], f: f64, lambda: f64, reg: f64) {
    shift_and_refresh(r, x, f, lambda, reg, lambda * reg);
}

fn shift_and_refresh(
    r: &mut SymMatrix,
    x: &[f64],
    f: f64,
    lambda: f64,
    prev_delta: f64,
    next_delta: f64,
) {
    let m = r.dim();
    debug_assert_eq!(x.len(), m);
    let data = r.data_mut();
    // Walk bottom-right to top-left so every source is read before it is
    // overwritten.
    for i in (1..m).rev() {
        for j in (1..=i).rev() {
            let v = data[(i - 1) * m + (j - 1)];
            data[i * m + j] = v;
            data[j * m + i] = v;
        }
    }
    let shift = next_delta - prev_delta;
    for i in 1..m {
        data[i * m + i] += shift;
    }
    let fx0 = f * x[0];
    for i in 0..m {
        let v = lambda * data[i * m] + fx0 * x[i];
        data[i * m] = v;
        data[i] = v;
    }
    data[0] += next_delta - lambda * prev_delta;
}
