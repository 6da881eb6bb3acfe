//! Monte-Carlo harness for the robust DCD filters: TOML scenario configs,
//! parallel deterministic runs, run-averaged NMSD learning curves, and CSV
//! reports.
//!
//! ```no_run
//! use robust_dcd_lab::{emit_outputs, load_config, run_experiment};
//! use std::path::Path;
//!
//! let exp = load_config(Path::new("configs/fig2_sparse.toml"))?;
//! let traces = run_experiment(&exp, None)?;
//! emit_outputs(&traces, &exp, Path::new("out"))?;
//! # Ok::<(), robust_dcd_lab::LabError>(())
//! ```

pub mod channel_io;
pub mod config;
mod error;
pub mod report;
pub mod runner;

pub use channel_io::{format_channel, parse_channel, read_channel, write_channel};
pub use config::{load_config, AlgorithmSpec, Experiment, ExperimentConfig};
pub use error::{LabError, Result};
pub use report::{emit_outputs, reconvergence, steady_state_db, summarize, EventSummary, Summary};
pub use runner::{average_curves, run_experiment, NmsdTrace, RunCurve};
