use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use robust_dcd::{gen_channel, gen_noise, AlphaStable, ChannelKind, NoiseModel};
use robust_dcd_lab::{emit_outputs, format_channel, run_experiment, ExperimentConfig, LabError};

#[derive(Parser)]
#[command(
    name = "rdcd",
    version,
    about = "Robust DCD adaptive filter experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte-Carlo experiment and write CSV traces plus a summary.
    Run {
        config: PathBuf,
        #[arg(short, long, default_value = "out")]
        out: PathBuf,
        /// Worker threads (default: all cores). Output does not depend on it.
        #[arg(short, long)]
        jobs: Option<usize>,
        /// Override the experiment seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Export a synthetic echo channel, one tap per line.
    Channels {
        #[arg(long, value_enum, default_value_t = Kind::Sparse)]
        kind: Kind,
        #[arg(long, default_value_t = 128)]
        taps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write to a file instead of stdout.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Emit symmetric alpha-stable (or Gaussian) noise samples, one per line.
    Noise {
        #[arg(long, default_value_t = 1.4)]
        alpha: f64,
        #[arg(long, default_value_t = 0.05)]
        gamma: f64,
        /// Gaussian noise of this variance instead of alpha-stable.
        #[arg(long, conflicts_with_all = ["alpha", "gamma"])]
        gaussian: Option<f64>,
        #[arg(short = 'n', long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Sparse,
    Disperse,
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), LabError> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|source| LabError::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|source| LabError::Io {
                path: "<stdout>".into(),
                source,
            }),
    }
}

fn run(cli: Cli) -> Result<(), LabError> {
    match cli.command {
        Command::Run {
            config,
            out,
            jobs,
            seed,
        } => {
            let text = std::fs::read_to_string(&config).map_err(|source| LabError::Io {
                path: config.clone(),
                source,
            })?;
            if jobs == Some(0) {
                return Err(LabError::Config {
                    field: "--jobs".into(),
                    reason: "must be at least 1".into(),
                });
            }
            let mut cfg = ExperimentConfig::from_toml(&text, &config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let exp = cfg.resolve(config.parent().unwrap_or(Path::new(".")))?;
            let traces = run_experiment(&exp, jobs)?;
            for path in emit_outputs(&traces, &exp, &out)? {
                eprintln!("wrote {}", path.display());
            }
            for t in traces.iter().filter(|t| t.diverged > 0) {
                eprintln!(
                    "warning: {}: {} of {} runs diverged",
                    t.name,
                    t.diverged,
                    t.runs + t.diverged
                );
            }
        }
        Command::Channels {
            kind,
            taps,
            seed,
            out,
        } => {
            let kind = match kind {
                Kind::Sparse => ChannelKind::Sparse,
                Kind::Disperse => ChannelKind::Disperse,
            };
            let ch = gen_channel(kind, taps, seed)?;
            emit(&format_channel(ch.taps()), out.as_deref())?;
        }
        Command::Noise {
            alpha,
            gamma,
            gaussian,
            samples,
            seed,
            out,
        } => {
            let model = match gaussian {
                Some(v) => NoiseModel::gaussian(v)?,
                None => NoiseModel::AlphaStable(AlphaStable::new(alpha, gamma)?),
            };
            let v = gen_noise(&model, samples, seed);
            emit(&format_channel(&v), out.as_deref())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
