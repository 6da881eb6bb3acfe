//! Experiment configuration: a TOML file describing one scenario and the
//! algorithms to run on it. See `configs/SCHEMA.md` for the full layout.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use robust_dcd::{
    gen_channel, AdaptiveFilter, AlphaStable, Channel, ChannelKind, DcdConfig, DcdFilter,
    FilterConfig, GdMcc, ImpulseFreeError, InputModel, InputStructure, Lms, NoiseModel,
    Regularization, Rls, Rmcc, RobustStrategy, VffConfig,
};
use serde::Deserialize;

use crate::channel_io::read_channel;
use crate::error::{config_err, LabError, Result};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(default = "one")]
    pub runs: usize,
    #[serde(default)]
    pub seed: u64,
    /// Number of samples per run.
    pub horizon: usize,
    /// Keep every `decimation`-th sample in the trace files.
    #[serde(default = "one")]
    pub decimation: usize,
    pub channel: ChannelSpec,
    #[serde(default)]
    pub input: InputSpec,
    #[serde(default)]
    pub noise: NoiseSpec,
    #[serde(default, rename = "change")]
    pub changes: Vec<ChangeEvent>,
    #[serde(rename = "algorithm")]
    pub algorithms: Vec<AlgorithmSpec>,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelSource {
    Sparse,
    Disperse,
    /// Plain text, one tap per line.
    File,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    pub kind: ChannelSource,
    /// Required for synthetic channels; taken from the file otherwise.
    pub taps: Option<usize>,
    /// Seed of the synthetic channel; defaults to the experiment seed. The
    /// channel is the same in every run.
    pub seed: Option<u64>,
    /// Relative paths resolve against the config file's directory.
    pub path: Option<PathBuf>,
    #[serde(default = "yes")]
    pub normalize: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputSpec {
    #[serde(default)]
    pub rho: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NoiseSpec {
    AlphaStable { alpha: f64, gamma: f64 },
    Gaussian { variance: f64 },
    None,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        NoiseSpec::AlphaStable {
            alpha: 1.4,
            gamma: 0.05,
        }
    }
}

/// From sample `time` (1-based) on, the true response is the original one
/// delayed by `shift` taps.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChangeEvent {
    pub time: usize,
    pub shift: usize,
}

#[derive(Debug, Clone, Deserialize)]
pub struct AlgorithmSpec {
    pub name: String,
    /// Traces sharing a group land in the same output file.
    #[serde(default = "default_group")]
    pub group: String,
    #[serde(flatten)]
    pub kind: AlgorithmKind,
}

fn default_group() -> String {
    "nmsd".into()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AlgorithmKind {
    Dcd {
        strategy: StrategySpec,
        lambda: f64,
        #[serde(default = "default_delta0")]
        delta0: f64,
        #[serde(default)]
        structure: StructureSpec,
        #[serde(default)]
        dcd: DcdSpec,
        vff: Option<VffSpec>,
        #[serde(default)]
        regularization: RegularizationSpec,
    },
    Rls {
        lambda: f64,
        #[serde(default = "default_delta0")]
        delta0: f64,
    },
    Rmcc {
        lambda: f64,
        #[serde(default = "default_delta0")]
        delta0: f64,
        beta_sq: f64,
    },
    GdMcc {
        mu: f64,
        beta_sq: f64,
    },
    Lms {
        mu: f64,
    },
}

fn default_delta0() -> f64 {
    0.01
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StrategySpec {
    PlainRls,
    Mcc {
        beta_sq: f64,
    },
    MEstimate {
        #[serde(default = "default_tau")]
        tau: f64,
        #[serde(default = "default_zeta")]
        zeta: f64,
        #[serde(default = "default_window")]
        window: usize,
    },
    LpNorm {
        p: f64,
        #[serde(default = "default_epsilon")]
        epsilon: f64,
    },
    Cmpn,
}

fn default_tau() -> f64 {
    2.576
}
fn default_zeta() -> f64 {
    0.99
}
fn default_window() -> usize {
    9
}
fn default_epsilon() -> f64 {
    0.01
}

impl StrategySpec {
    pub fn to_strategy(self) -> RobustStrategy {
        match self {
            StrategySpec::PlainRls => RobustStrategy::PlainRls,
            StrategySpec::Mcc { beta_sq } => RobustStrategy::mcc_from_variance(beta_sq),
            StrategySpec::MEstimate { tau, zeta, window } => {
                RobustStrategy::MEstimate { tau, zeta, window }
            }
            StrategySpec::LpNorm { p, epsilon } => RobustStrategy::LpNorm { p, epsilon },
            StrategySpec::Cmpn => RobustStrategy::Cmpn,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StructureSpec {
    #[default]
    General,
    TappedDelay,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegularizationSpec {
    #[default]
    Decaying,
    Constant,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DcdSpec {
    #[serde(default = "default_h")]
    pub h: f64,
    #[serde(default = "default_mb")]
    pub mb: u32,
    #[serde(default = "default_nu")]
    pub nu: usize,
}

fn default_h() -> f64 {
    1.0
}
fn default_mb() -> u32 {
    16
}
fn default_nu() -> usize {
    8
}

impl Default for DcdSpec {
    fn default() -> Self {
        Self {
            h: default_h(),
            mb: default_mb(),
            nu: default_nu(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VffSource {
    #[default]
    Clipped,
    SigmaEstimate,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VffSpec {
    pub rho: f64,
    pub lambda_min: f64,
    #[serde(default)]
    pub source: VffSource,
    #[serde(default = "default_tau")]
    pub tau: f64,
    #[serde(default = "default_zeta")]
    pub zeta: f64,
    #[serde(default = "default_window")]
    pub window: usize,
}

/// One instantiated algorithm for one run.
pub enum Instance {
    Dcd(Box<DcdFilter>),
    Baseline(Box<dyn AdaptiveFilter + Send>),
}

impl Instance {
    /// Returns the DCD additions spent, or `None` for baselines.
    pub fn adapt(&mut self, x: &[f64], d: f64) -> robust_dcd::Result<Option<u64>> {
        match self {
            Instance::Dcd(f) => f.step(x, d).map(|rep| Some(rep.dcd.additions_count)),
            Instance::Baseline(f) => f.adapt(x, d).map(|_| None),
        }
    }

    pub fn weights(&self) -> &[f64] {
        match self {
            Instance::Dcd(f) => f.weights(),
            Instance::Baseline(f) => f.weights(),
        }
    }
}

impl AlgorithmSpec {
    pub fn filter_config(&self, taps: usize) -> Option<Result<FilterConfig, robust_dcd::Error>> {
        let AlgorithmKind::Dcd {
            strategy,
            lambda,
            delta0,
            structure,
            dcd,
            vff,
            regularization,
        } = &self.kind
        else {
            return None;
        };
        let build = || {
            let mut cfg = FilterConfig::new(taps, *lambda, strategy.to_strategy())
                .with_delta0(*delta0)
                .with_dcd(DcdConfig::new(dcd.h, dcd.mb, dcd.nu)?)
                .with_structure(match structure {
                    StructureSpec::General => InputStructure::General,
                    StructureSpec::TappedDelay => InputStructure::TappedDelay,
                })
                .with_regularization(match regularization {
                    RegularizationSpec::Decaying => Regularization::Decaying,
                    RegularizationSpec::Constant => Regularization::Constant,
                });
            if let Some(v) = vff {
                cfg = cfg.with_vff(VffConfig {
                    rho: v.rho,
                    lambda_min: v.lambda_min,
                    source: match v.source {
                        VffSource::Clipped => ImpulseFreeError::Clipped,
                        VffSource::SigmaEstimate => ImpulseFreeError::SigmaEstimate,
                    },
                    tau: v.tau,
                    zeta: v.zeta,
                    window: v.window,
                });
            }
            cfg.validate()?;
            Ok(cfg)
        };
        Some(build())
    }

    pub fn instantiate(&self, taps: usize) -> Result<Instance, robust_dcd::Error> {
        if let Some(cfg) = self.filter_config(taps) {
            return Ok(Instance::Dcd(Box::new(DcdFilter::new(cfg?)?)));
        }
        let f: Box<dyn AdaptiveFilter + Send> = match self.kind {
            AlgorithmKind::Rls { lambda, delta0 } => Box::new(Rls::new(taps, lambda, delta0)?),
            AlgorithmKind::Rmcc {
                lambda,
                delta0,
                beta_sq,
            } => Box::new(Rmcc::from_variance(taps, lambda, delta0, beta_sq)?),
            AlgorithmKind::GdMcc { mu, beta_sq } => {
                Box::new(GdMcc::from_variance(taps, mu, beta_sq)?)
            }
            AlgorithmKind::Lms { mu } => Box::new(Lms::new(taps, mu)?),
            AlgorithmKind::Dcd { .. } => unreachable!(),
        };
        Ok(Instance::Baseline(f))
    }
}

impl NoiseSpec {
    pub fn model(&self) -> Result<NoiseModel, robust_dcd::Error> {
        Ok(match *self {
            NoiseSpec::AlphaStable { alpha, gamma } => {
                NoiseModel::AlphaStable(AlphaStable::new(alpha, gamma)?)
            }
            NoiseSpec::Gaussian { variance } => NoiseModel::gaussian(variance)?,
            NoiseSpec::None => NoiseModel::None,
        })
    }
}

/// Maps a parameter name reported by the filter library to the config key
/// that sets it.
fn algorithm_field(kind: &AlgorithmKind, name: &str) -> String {
    let AlgorithmKind::Dcd { strategy, .. } = kind else {
        return match name {
            "beta" => "beta_sq".into(),
            other => other.into(),
        };
    };
    match name {
        "H" => "dcd.h".into(),
        "M_b" => "dcd.mb".into(),
        "beta" => "strategy.beta_sq".into(),
        "p" | "epsilon" => format!("strategy.{name}"),
        "tau" | "zeta" | "window" if matches!(strategy, StrategySpec::MEstimate { .. }) => {
            format!("strategy.{name}")
        }
        "tau" | "zeta" | "window" | "rho" | "lambda_min" => format!("vff.{name}"),
        other => other.into(),
    }
}

fn field_err(prefix: &str, e: robust_dcd::Error) -> LabError {
    match e {
        robust_dcd::Error::InvalidParameter { name, reason } => {
            config_err(format!("{prefix}.{name}"), reason)
        }
        other => config_err(prefix, other.to_string()),
    }
}

/// A validated configuration together with the resolved true channel.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub channel: Channel,
}

impl Experiment {
    pub fn taps(&self) -> usize {
        self.channel.len()
    }

    pub fn input_model(&self) -> InputModel {
        // Checked during validation.
        InputModel::new(self.config.input.rho).expect("validated")
    }

    pub fn noise_model(&self) -> NoiseModel {
        self.config.noise.model().expect("validated")
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str, source: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|e| LabError::Parse {
            path: source.to_path_buf(),
            source: e,
        })
    }

    /// Checks every field and builds the true channel. `base_dir` resolves
    /// relative channel paths.
    pub fn resolve(self, base_dir: &Path) -> Result<Experiment> {
        if self.runs == 0 {
            return Err(config_err("runs", "must be at least 1"));
        }
        if self.horizon == 0 {
            return Err(config_err("horizon", "must be at least 1"));
        }
        if self.decimation == 0 || self.decimation > self.horizon {
            return Err(config_err("decimation", "must lie in [1, horizon]"));
        }
        InputModel::new(self.input.rho).map_err(|e| field_err("input", e))?;
        self.noise.model().map_err(|e| field_err("noise", e))?;

        let channel = self.build_channel(base_dir)?;
        let m = channel.len();

        let mut last = 0;
        for (i, ev) in self.changes.iter().enumerate() {
            if ev.time < 2 || ev.time > self.horizon {
                return Err(config_err(
                    format!("change[{i}].time"),
                    "must lie in [2, horizon]",
                ));
            }
            if ev.time <= last {
                return Err(config_err(
                    format!("change[{i}].time"),
                    "change times must be strictly increasing",
                ));
            }
            if ev.shift >= m {
                return Err(config_err(
                    format!("change[{i}].shift"),
                    "must be smaller than the channel length",
                ));
            }
            last = ev.time;
        }

        if self.algorithms.is_empty() {
            return Err(config_err(
                "algorithm",
                "at least one algorithm is required",
            ));
        }
        let mut names = HashSet::new();
        for (i, alg) in self.algorithms.iter().enumerate() {
            let prefix = format!("algorithm[{i}]");
            if alg.name.is_empty() || alg.name.contains([',', '"', '\n', '\r']) {
                return Err(config_err(
                    format!("{prefix}.name"),
                    "must be non-empty and free of commas, quotes and newlines",
                ));
            }
            if !names.insert(alg.name.as_str()) {
                return Err(config_err(format!("{prefix}.name"), "duplicate name"));
            }
            if alg.group.is_empty()
                || !alg
                    .group
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
            {
                return Err(config_err(
                    format!("{prefix}.group"),
                    "must be non-empty and use only [A-Za-z0-9_-]",
                ));
            }
            alg.instantiate(m).map_err(|e| match e {
                robust_dcd::Error::InvalidParameter { name, reason } => config_err(
                    format!("{prefix}.{}", algorithm_field(&alg.kind, name)),
                    reason,
                ),
                other => field_err(&prefix, other),
            })?;
        }
        Ok(Experiment {
            config: self,
            channel,
        })
    }

    fn build_channel(&self, base_dir: &Path) -> Result<Channel> {
        let spec = &self.channel;
        match spec.kind {
            ChannelSource::File => {
                let path = spec
                    .path
                    .as_ref()
                    .ok_or_else(|| config_err("channel.path", "required for kind = \"file\""))?;
                let path = base_dir.join(path);
                let taps = read_channel(&path)?;
                if let Some(m) = spec.taps {
                    if m != taps.len() {
                        return Err(config_err(
                            "channel.taps",
                            format!("file holds {} taps, config says {m}", taps.len()),
                        ));
                    }
                }
                Channel::custom(taps, spec.normalize).map_err(|e| field_err("channel", e))
            }
            ChannelSource::Sparse | ChannelSource::Disperse => {
                let m = spec
                    .taps
                    .ok_or_else(|| config_err("channel.taps", "required for synthetic channels"))?;
                let seed = spec.seed.unwrap_or(self.seed);
                let kind = if spec.kind == ChannelSource::Sparse {
                    ChannelKind::Sparse
                } else {
                    ChannelKind::Disperse
                };
                gen_channel(kind, m, seed).map_err(|e| field_err("channel", e))
            }
        }
    }
}

/// Reads and validates a config file.
pub fn load_config(path: &Path) -> Result<Experiment> {
    let text = std::fs::read_to_string(path).map_err(crate::error::io_err(path))?;
    let base = path.parent().unwrap_or(Path::new("."));
    ExperimentConfig::from_toml(&text, path)?.resolve(base)
}
