//! Monte-Carlo execution: every run draws its own input and noise
//! substreams, all algorithms see the same data within a run, and the
//! per-sample deviation is averaged over runs in the linear domain.

use rayon::prelude::*;
use robust_dcd::{
    count_ops, deviation_ratio, ratio_to_db, shift_channel, substream, Channel, StreamPurpose,
    TappedDelayLine,
};

use crate::config::{AlgorithmSpec, Experiment};
use crate::error::{config_err, Result};

/// Run-averaged learning curve of one algorithm.
#[derive(Debug, Clone, PartialEq)]
pub struct NmsdTrace {
    pub name: String,
    pub group: String,
    /// Mean of `‖ŵ_n - w°_n‖² / ‖w°_n‖²` over the runs that stayed finite,
    /// one entry per sample. All NaN if every run diverged.
    pub mean_ratio: Vec<f64>,
    /// Runs that contributed to the mean.
    pub runs: usize,
    /// Runs dropped because the deviation became non-finite.
    pub diverged: usize,
    /// Largest DCD addition count of any single solve (DCD filters only).
    pub max_additions: Option<u64>,
    /// `2·N_u·M + M_b` for the filter's solver settings.
    pub op_bound: Option<u64>,
}

impl NmsdTrace {
    pub fn db(&self) -> Vec<f64> {
        self.mean_ratio.iter().map(|&r| ratio_to_db(r)).collect()
    }
}

/// Outcome of one algorithm on one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunCurve {
    /// `None` once the deviation went non-finite or the filter rejected a
    /// sample.
    pub ratios: Option<Vec<f64>>,
    pub max_additions: Option<u64>,
}

/// Running mean in run order: deterministic, and `R` identical curves
/// average to exactly that curve.
pub fn average_curves<'a, I>(len: usize, curves: I) -> (Vec<f64>, usize, usize)
where
    I: IntoIterator<Item = Option<&'a [f64]>>,
{
    let mut mean = vec![0.0; len];
    let mut used = 0usize;
    let mut diverged = 0usize;
    for curve in curves {
        let Some(c) = curve else {
            diverged += 1;
            continue;
        };
        used += 1;
        let k = used as f64;
        for (m, &v) in mean.iter_mut().zip(c) {
            *m += (v - *m) / k;
        }
    }
    if used == 0 {
        mean.fill(f64::NAN);
    }
    (mean, used, diverged)
}

/// True responses in force from each 0-based sample index on.
pub fn channel_schedule(exp: &Experiment) -> Result<Vec<(usize, Channel)>> {
    let mut out = vec![(0, exp.channel.clone())];
    for (i, ev) in exp.config.changes.iter().enumerate() {
        let ch = shift_channel(&exp.channel, ev.shift)
            .map_err(|e| config_err(format!("change[{i}].shift"), e.to_string()))?;
        out.push((ev.time - 1, ch));
    }
    Ok(out)
}

/// Input samples and desired response for one run.
pub struct RunData {
    pub input: Vec<f64>,
    pub desired: Vec<f64>,
}

pub fn generate_run(exp: &Experiment, schedule: &[(usize, Channel)], run: u64) -> RunData {
    let cfg = &exp.config;
    let n = cfg.horizon;
    let input = exp
        .input_model()
        .generate(n, &mut substream(cfg.seed, run, StreamPurpose::Input));
    let noise = exp
        .noise_model()
        .generate(n, &mut substream(cfg.seed, run, StreamPurpose::Noise));
    let mut tdl = TappedDelayLine::new(exp.taps());
    let mut seg = 0;
    let desired = (0..n)
        .map(|i| {
            while seg + 1 < schedule.len() && schedule[seg + 1].0 <= i {
                seg += 1;
            }
            schedule[seg].1.respond(tdl.push(input[i])) + noise[i]
        })
        .collect();
    RunData { input, desired }
}

pub fn run_algorithm(
    alg: &AlgorithmSpec,
    taps: usize,
    data: &RunData,
    schedule: &[(usize, Channel)],
) -> Result<RunCurve> {
    let mut filter = alg
        .instantiate(taps)
        .map_err(|e| config_err(format!("algorithm `{}`", alg.name), e.to_string()))?;
    let mut tdl = TappedDelayLine::new(taps);
    let mut ratios = Vec::with_capacity(data.input.len());
    let mut max_additions: Option<u64> = None;
    let mut seg = 0;
    for (i, (&x, &d)) in data.input.iter().zip(&data.desired).enumerate() {
        while seg + 1 < schedule.len() && schedule[seg + 1].0 <= i {
            seg += 1;
        }
        let adds = match filter.adapt(tdl.push(x), d) {
            Ok(a) => a,
            Err(_) => {
                return Ok(RunCurve {
                    ratios: None,
                    max_additions,
                })
            }
        };
        if let Some(a) = adds {
            max_additions = Some(max_additions.map_or(a, |m| m.max(a)));
        }
        match deviation_ratio(filter.weights(), schedule[seg].1.taps()) {
            Ok(r) if r.is_finite() => ratios.push(r),
            _ => {
                return Ok(RunCurve {
                    ratios: None,
                    max_additions,
                })
            }
        }
    }
    Ok(RunCurve {
        ratios: Some(ratios),
        max_additions,
    })
}

/// All algorithms on run `run`.
pub fn simulate_run(
    exp: &Experiment,
    schedule: &[(usize, Channel)],
    run: u64,
) -> Result<Vec<RunCurve>> {
    let data = generate_run(exp, schedule, run);
    exp.config
        .algorithms
        .iter()
        .map(|alg| run_algorithm(alg, exp.taps(), &data, schedule))
        .collect()
}

/// Runs the whole experiment. `jobs = None` uses rayon's default pool;
/// results do not depend on the degree of parallelism.
pub fn run_experiment(exp: &Experiment, jobs: Option<usize>) -> Result<Vec<NmsdTrace>> {
    let schedule = channel_schedule(exp)?;
    let runs = exp.config.runs as u64;
    let per_run: Vec<Vec<RunCurve>> = match jobs {
        Some(1) => (0..runs)
            .map(|r| simulate_run(exp, &schedule, r))
            .collect::<Result<_>>()?,
        _ => {
            let work = || {
                (0..runs)
                    .into_par_iter()
                    .map(|r| simulate_run(exp, &schedule, r))
                    .collect::<Result<Vec<_>>>()
            };
            match jobs {
                Some(n) => rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| config_err("jobs", e.to_string()))?
                    .install(work)?,
                None => work()?,
            }
        }
    };

    let horizon = exp.config.horizon;
    let taps = exp.taps();
    Ok(exp
        .config
        .algorithms
        .iter()
        .enumerate()
        .map(|(a, alg)| {
            let (mean_ratio, used, diverged) = average_curves(
                horizon,
                per_run.iter().map(|curves| curves[a].ratios.as_deref()),
            );
            let max_additions = per_run
                .iter()
                .filter_map(|curves| curves[a].max_additions)
                .max();
            let op_bound = alg
                .filter_config(taps)
                .and_then(|c| c.ok())
                .map(|c| count_ops(&c.dcd, taps));
            NmsdTrace {
                name: alg.name.clone(),
                group: alg.group.clone(),
                mean_ratio,
                runs: used,
                diverged,
                max_additions,
                op_bound,
            }
        })
        .collect())
}
