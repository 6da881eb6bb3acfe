//! Summary statistics and CSV output.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use robust_dcd::ratio_to_db;

use crate::config::Experiment;
use crate::error::{io_err, Result};
use crate::runner::NmsdTrace;

/// Re-convergence tolerance above the pre-event steady state.
pub const RECONVERGENCE_MARGIN_DB: f64 = 3.0;

/// Linear mean over the final 10% (at least one sample) of `ratios`, in dB.
pub fn steady_state_db(ratios: &[f64]) -> f64 {
    if ratios.is_empty() {
        return f64::NAN;
    }
    let tail = (ratios.len() / 10).max(1);
    let slice = &ratios[ratios.len() - tail..];
    ratio_to_db(slice.iter().sum::<f64>() / slice.len() as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventSummary {
    /// 1-based sample at which the change takes effect.
    pub time: usize,
    /// Steady state over the final 10% of the segment before the event.
    pub pre_event_db: f64,
    /// Samples from the event until the trace is back within 3 dB of
    /// `pre_event_db`; `None` if it never gets there.
    pub reconvergence: Option<usize>,
}

/// Pre-event level and re-convergence time for an event at 0-based index
/// `event` whose preceding segment starts at `segment_start`.
pub fn reconvergence(ratios: &[f64], segment_start: usize, event: usize) -> EventSummary {
    let pre = steady_state_db(&ratios[segment_start..event]);
    let limit = pre + RECONVERGENCE_MARGIN_DB;
    let reconvergence = ratios[event..]
        .iter()
        .position(|&r| ratio_to_db(r) <= limit);
    EventSummary {
        time: event + 1,
        pre_event_db: pre,
        reconvergence,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub name: String,
    pub group: String,
    pub runs: usize,
    pub diverged: usize,
    pub steady_state_db: f64,
    pub events: Vec<EventSummary>,
    pub max_additions: Option<u64>,
    pub op_bound: Option<u64>,
}

/// `change_times` are 1-based, strictly increasing.
pub fn summarize(trace: &NmsdTrace, change_times: &[usize]) -> Summary {
    let mut start = 0;
    let events = change_times
        .iter()
        .map(|&t| {
            let ev = reconvergence(&trace.mean_ratio, start, t - 1);
            start = t - 1;
            ev
        })
        .collect();
    Summary {
        name: trace.name.clone(),
        group: trace.group.clone(),
        runs: trace.runs,
        diverged: trace.diverged,
        steady_state_db: steady_state_db(&trace.mean_ratio),
        events,
        max_additions: trace.max_additions,
        op_bound: trace.op_bound,
    }
}

fn fmt_db(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.4}")
    } else {
        "nan".into()
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

/// One CSV per group, keeping every `decimation`-th sample
/// (`n = decimation, 2·decimation, …`).
pub fn group_csv(traces: &[&NmsdTrace], horizon: usize, decimation: usize) -> String {
    let db: Vec<Vec<f64>> = traces.iter().map(|t| t.db()).collect();
    let mut out = String::from("n");
    for t in traces {
        out.push(',');
        out.push_str(&t.name);
    }
    out.push('\n');
    for n in (decimation..=horizon).step_by(decimation) {
        let _ = write!(out, "{n}");
        for col in &db {
            out.push(',');
            out.push_str(&fmt_db(col[n - 1]));
        }
        out.push('\n');
    }
    out
}

pub fn summary_csv(summaries: &[Summary], change_times: &[usize]) -> String {
    let mut out =
        String::from("algorithm,group,runs,diverged,steady_state_db,max_dcd_additions,op_bound");
    for t in change_times {
        let _ = write!(out, ",pre_event_db@{t},reconvergence@{t}");
    }
    out.push('\n');
    for s in summaries {
        let _ = write!(
            out,
            "{},{},{},{},{},{},{}",
            s.name,
            s.group,
            s.runs,
            s.diverged,
            fmt_db(s.steady_state_db),
            opt(s.max_additions),
            opt(s.op_bound)
        );
        for ev in &s.events {
            let rc = ev
                .reconvergence
                .map_or_else(|| "never".to_string(), |r| r.to_string());
            let _ = write!(out, ",{},{rc}", fmt_db(ev.pre_event_db));
        }
        out.push('\n');
    }
    out
}

/// Writes `<group>.csv` for every group (in order of first appearance) and
/// `summary.csv`. Returns the written paths.
pub fn emit_outputs(
    traces: &[NmsdTrace],
    exp: &Experiment,
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let cfg = &exp.config;
    let mut groups: Vec<&str> = Vec::new();
    for t in traces {
        if !groups.contains(&t.group.as_str()) {
            groups.push(&t.group);
        }
    }
    let mut written = Vec::new();
    for g in groups {
        let members: Vec<&NmsdTrace> = traces.iter().filter(|t| t.group == g).collect();
        let path = out_dir.join(format!("{g}.csv"));
        let body = group_csv(&members, cfg.horizon, cfg.decimation);
        std::fs::write(&path, body).map_err(io_err(&path))?;
        written.push(path);
    }
    let times: Vec<usize> = cfg.changes.iter().map(|c| c.time).collect();
    let summaries: Vec<Summary> = traces.iter().map(|t| summarize(t, &times)).collect();
    let path = out_dir.join("summary.csv");
    std::fs::write(&path, summary_csv(&summaries, &times)).map_err(io_err(&path))?;
    written.push(path);
    Ok(written)
}
