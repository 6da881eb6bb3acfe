//! Robust recursive least-squares adaptive filters driven by dichotomous
//! coordinate descent (DCD).
//!
//! The filters solve the exponentially weighted normal equations
//! `R_n w = z_n` incrementally: each sample produces a rank-one update of
//! `R_n`, a right-hand side for the auxiliary system `R_n Δw = b_n`, and a
//! handful of DCD iterations that use only comparisons, additions and
//! power-of-two scalings. A scalar weight `f_n` derived from the a-priori
//! error (correntropy, modified Huber M-estimate, lp-norm or continuous mixed
//! p-norms) suppresses impulsive noise before it reaches `R_n` and `b_n`.
//!
//! The crate is `no_std` and only needs `alloc`. Signal generators, the
//! classic RLS/RMCC/LMS/GD-MCC baselines and the NMSD metric live here too
//! so that experiments are reproducible on any target.
//!
//! ```
//! use robust_dcd::{DcdConfig, FilterConfig, RobustStrategy, DcdFilter};
//!
//! let cfg = FilterConfig::new(2, 0.99, RobustStrategy::mcc_from_variance(1.0))
//!     .with_dcd(DcdConfig::new(2.0, 24, 8).unwrap());
//! let mut filter = DcdFilter::new(cfg).unwrap();
//! let w_true = [0.5, -0.25];
//! for n in 0..400 {
//!     let x = [((n * 7) % 11) as f64 / 11.0 - 0.5, ((n * 3) % 5) as f64 / 5.0 - 0.4];
//!     let d = x[0] * w_true[0] + x[1] * w_true[1];
//!     filter.step(&x, d).unwrap();
//! }
//! assert!((filter.weights()[0] - 0.5).abs() < 1e-3);
//! ```
#![no_std]
#![forbid(unsafe_code)]
// Index loops mirror the matrix algebra more clearly than iterator chains.
#![allow(clippy::needless_range_loop)]

extern crate alloc;

pub mod baselines;
pub mod dcd;
mod error;
pub mod filter;
pub mod matrix;
pub mod robust;
pub mod signal;

pub use baselines::{AdaptiveFilter, GdMcc, Lms, Rls, Rmcc};
pub use dcd::{count_ops, dcd_solve, DcdConfig, DcdSolution, DcdStats};
pub use error::{Error, Result};
pub use filter::{
    update_r_general, update_r_tapped_delay, vff_step, DcdFilter, FilterConfig, FilterSnapshot,
    ImpulseFreeError, InputStructure, Regularization, StepReport, VffConfig,
};
pub use matrix::SymMatrix;
pub use robust::{threshold, weight, RobustStrategy, SigmaEstimator, CMPN_WEIGHT_CAP};
pub use signal::{
    deviation_ratio, gen_alpha_stable, gen_ar1, gen_channel, gen_noise, nmsd, ratio_to_db,
    shift_channel, substream, AlphaStable, Channel, ChannelKind, InputModel, NoiseModel,
    StreamPurpose, TappedDelayLine, NMSD_FLOOR_DB,
};
