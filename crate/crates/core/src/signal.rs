//! Seedable experiment signals: AR(1) inputs, symmetric α-stable noise,
//! synthetic echo channels, and the NMSD metric.
//!
//! Every generator draws from ChaCha8, which produces the same stream on
//! every platform. Monte-Carlo runs get independent substreams via
//! [`substream`].

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::error::{check_finite, check_len, invalid, Result};

/// NMSD reported for an exact estimate.
pub const NMSD_FLOOR_DB: f64 = -300.0;

/// Independent roles that draw random numbers within one run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamPurpose {
    Input,
    Noise,
    Channel,
}

impl StreamPurpose {
    fn tag(self) -> u64 {
        match self {
            StreamPurpose::Input => 0x9e37_79b9_7f4a_7c15,
            StreamPurpose::Noise => 0xc2b2_ae3d_27d4_eb4f,
            StreamPurpose::Channel => 0x1656_67b1_9e37_79f9,
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Generator for `(seed, run, purpose)`: the key mixes seed and purpose, the
/// ChaCha stream id is the run index.
pub fn substream(seed: u64, run: u64, purpose: StreamPurpose) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed ^ purpose.tag()));
    rng.set_stream(run);
    rng
}

/// First-order autoregressive input `x_k = ρ·x_{k-1} + ϑ_k`, `ϑ ~ N(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputModel {
    pub rho: f64,
}

impl InputModel {
    pub fn new(rho: f64) -> Result<Self> {
        if rho.is_nan() || rho.abs() >= 1.0 {
            return Err(invalid("rho", "AR(1) coefficient must satisfy |rho| < 1"));
        }
        Ok(Self { rho })
    }

    pub fn white() -> Self {
        Self { rho: 0.0 }
    }

    /// Fills `n` samples from `rng`, starting with `x_0 = ϑ_0`.
    pub fn generate<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<f64> {
        let mut prev = 0.0;
        (0..n)
            .map(|_| {
                let innovation: f64 = StandardNormal.sample(rng);
                prev = self.rho * prev + innovation;
                prev
            })
            .collect()
    }
}

pub fn gen_ar1(model: InputModel, n: usize, seed: u64) -> Vec<f64> {
    model.generate(n, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Symmetric α-stable law with characteristic function `exp(-γ|t|^α)`,
/// sampled by the Chambers–Mallows–Stuck transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaStable {
    alpha: f64,
    gamma: f64,
    scale: f64,
}

impl AlphaStable {
    pub fn new(alpha: f64, gamma: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(invalid("alpha", "must lie in (0, 2]"));
        }
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(invalid("gamma", "dispersion must be positive"));
        }
        Ok(Self {
            alpha,
            gamma,
            scale: libm::pow(gamma, 1.0 / alpha),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

impl Distribution<f64> for AlphaStable {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        // U uniform on the open interval (-π/2, π/2), W ~ Exp(1) > 0.
        let u = loop {
            let v = PI * (rng.random::<f64>() - 0.5);
            if v > -FRAC_PI_2 {
                break v;
            }
        };
        let w = loop {
            let v: f64 = Exp1.sample(rng);
            if v > 0.0 {
                break v;
            }
        };
        let a = self.alpha;
        let standard = if a == 1.0 {
            libm::tan(u)
        } else {
            let head = libm::sin(a * u) / libm::pow(libm::cos(u), 1.0 / a);
            let tail = libm::pow(libm::cos(u - a * u) / w, (1.0 - a) / a);
            head * tail
        };
        self.scale * standard
    }
}

pub fn gen_alpha_stable(model: AlphaStable, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    model.sample_iter(&mut rng).take(n).collect()
}

/// Additive measurement noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseModel {
    AlphaStable(AlphaStable),
    Gaussian { variance: f64 },
    None,
}

impl NoiseModel {
    pub fn gaussian(variance: f64) -> Result<Self> {
        if !(variance >= 0.0 && variance.is_finite()) {
            return Err(invalid("variance", "must be non-negative"));
        }
        Ok(NoiseModel::Gaussian { variance })
    }

    pub fn generate<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<f64> {
        match self {
            NoiseModel::AlphaStable(dist) => dist.sample_iter(rng).take(n).collect(),
            NoiseModel::Gaussian { variance } => {
                let sd = libm::sqrt(*variance);
                (0..n)
                    .map(|_| {
                        sd * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng)
                    })
                    .collect()
            }
            NoiseModel::None => alloc::vec![0.0; n],
        }
    }
}

pub fn gen_noise(model: &NoiseModel, n: usize, seed: u64) -> Vec<f64> {
    model.generate(n, &mut ChaCha8Rng::seed_from_u64(seed))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelKind {
    Sparse,
    Disperse,
    Custom,
}

/// Unknown impulse response `w^o`.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    taps: Vec<f64>,
    kind: ChannelKind,
}

impl Channel {
    /// Wraps user-supplied taps, optionally scaled to unit norm.
    pub fn custom(taps: Vec<f64>, normalize: bool) -> Result<Self> {
        if taps.is_empty() {
            return Err(invalid("channel", "needs at least one tap"));
        }
        check_finite("channel", &taps)?;
        let mut ch = Self {
            taps,
            kind: ChannelKind::Custom,
        };
        if ch.norm() == 0.0 {
            return Err(invalid("channel", "all taps are zero"));
        }
        if normalize {
            ch.normalize();
        }
        Ok(ch)
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.taps.iter().map(|t| t * t).sum())
    }

    /// Output `x_nᵀ w^o` for a regressor `x_n`.
    pub fn respond(&self, x: &[f64]) -> f64 {
        self.taps.iter().zip(x).map(|(w, x)| w * x).sum()
    }

    fn normalize(&mut self) {
        let norm = self.norm();
        self.taps.iter_mut().for_each(|t| *t /= norm);
    }
}

/// Synthetic echo path of `taps` coefficients, unit norm.
///
/// * `Sparse`: up to 16 active taps starting at `M/8`, random signs under an
///   exponentially decaying envelope; all other taps are exactly zero.
/// * `Disperse`: a decaying oscillation with random jitter spread over the
///   whole response.
pub fn gen_channel(kind: ChannelKind, taps: usize, seed: u64) -> Result<Channel> {
    if taps == 0 {
        return Err(invalid("taps", "must be at least 1"));
    }
    let mut rng = substream(seed, 0, StreamPurpose::Channel);
    let mut w = alloc::vec![0.0; taps];
    match kind {
        ChannelKind::Sparse => {
            let active = taps.min(16);
            let offset = (taps / 8).min(taps - active);
            for k in 0..active {
                let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                let mag = 0.5 + 0.5 * rng.random::<f64>();
                w[offset + k] = sign * mag * libm::exp(-(k as f64) / 4.0);
            }
        }
        ChannelKind::Disperse => {
            let phase = 2.0 * PI * rng.random::<f64>();
            let decay = 3.0 / taps as f64;
            for (k, t) in w.iter_mut().enumerate() {
                let jitter: f64 = StandardNormal.sample(&mut rng);
                let osc = libm::cos(0.85 * k as f64 + phase) + 0.5 * jitter;
                // Keep every tap active.
                let osc = if osc.abs() < 0.05 {
                    0.05f64.copysign(osc)
                } else {
                    osc
                };
                *t = libm::exp(-decay * k as f64) * osc;
            }
        }
        ChannelKind::Custom => {
            return Err(invalid(
                "kind",
                "custom channels are built from explicit taps",
            ));
        }
    }
    let mut ch = Channel { taps: w, kind };
    ch.normalize();
    Ok(ch)
}

/// Delays the response by `k` taps: zero-filled head, truncated tail.
pub fn shift_channel(ch: &Channel, k: usize) -> Result<Channel> {
    let m = ch.len();
    if k >= m {
        return Err(invalid("shift", "must be smaller than the channel length"));
    }
    let mut taps = alloc::vec![0.0; m];
    taps[k..].copy_from_slice(&ch.taps[..m - k]);
    Ok(Channel {
        taps,
        kind: ch.kind,
    })
}

/// `‖ŵ - w^o‖² / ‖w^o‖²` on a linear scale.
pub fn deviation_ratio(w_hat: &[f64], w_o: &[f64]) -> Result<f64> {
    check_len("estimate", w_o.len(), w_hat.len())?;
    let ref_energy: f64 = w_o.iter().map(|v| v * v).sum();
    if ref_energy.is_nan() || ref_energy <= 0.0 {
        return Err(invalid("reference", "w^o must have non-zero norm"));
    }
    let dev: f64 = w_hat.iter().zip(w_o).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(dev / ref_energy)
}

/// `10·log10(‖ŵ - w^o‖² / ‖w^o‖²)` in dB, floored at [`NMSD_FLOOR_DB`].
pub fn nmsd(w_hat: &[f64], w_o: &[f64]) -> Result<f64> {
    Ok(ratio_to_db(deviation_ratio(w_hat, w_o)?))
}

/// Converts a linear deviation ratio to dB with the NMSD floor applied.
pub fn ratio_to_db(ratio: f64) -> f64 {
    if ratio > 0.0 {
        (10.0 * libm::log10(ratio)).max(NMSD_FLOOR_DB)
    } else if ratio == 0.0 {
        NMSD_FLOOR_DB
    } else {
        f64::NAN
    }
}

/// Sliding regressor `(x_n, x_{n-1}, …, x_{n-M+1})`, zero before the first
/// sample.
#[derive(Debug, Clone)]
pub struct TappedDelayLine {
    buf: Vec<f64>,
    pos: usize,
    len: usize,
}

impl TappedDelayLine {
    pub fn new(len: usize) -> Self {
        assert!(len > 0, "delay line needs at least one tap");
        // Each sample is stored twice so the window is always contiguous.
        Self {
            buf: alloc::vec![0.0; 2 * len],
            pos: 0,
            len,
        }
    }

    pub fn push(&mut self, sample: f64) -> &[f64] {
        self.pos = (self.pos + self.len - 1) % self.len;
        self.buf[self.pos] = sample;
        self.buf[self.pos + self.len] = sample;
        self.as_slice()
    }

    /// Newest sample first.
    pub fn as_slice(&self) -> &[f64] {
        &self.buf[self.pos..self.pos + self.len]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nmsd_fixtures() {
        let w = [0.3, -0.4, 0.5];
        assert_eq!(nmsd(&w, &w).unwrap(), NMSD_FLOOR_DB);
        assert_eq!(nmsd(&[0.0; 3], &w).unwrap(), 0.0);
        let scaled: Vec<f64> = w.iter().map(|v| 1.1 * v).collect();
        assert!((nmsd(&scaled, &w).unwrap() + 20.0).abs() < 1e-9);
        assert!(nmsd(&w, &[0.0; 3]).is_err());
        assert!(nmsd(&w, &[1.0]).is_err());
    }

    #[test]
    fn delay_line_order() {
        let mut line = TappedDelayLine::new(3);
        assert_eq!(line.push(1.0), &[1.0, 0.0, 0.0]);
        assert_eq!(line.push(2.0), &[2.0, 1.0, 0.0]);
        assert_eq!(line.push(3.0), &[3.0, 2.0, 1.0]);
        assert_eq!(line.push(4.0), &[4.0, 3.0, 2.0]);
        let mut one = TappedDelayLine::new(1);
        assert_eq!(one.push(5.0), &[5.0]);
    }

    #[test]
    fn shift_fixtures() {
        let ch = Channel::custom(alloc::vec![1.0, 2.0, 3.0, 4.0], false).unwrap();
        assert_eq!(shift_channel(&ch, 0).unwrap(), ch);
        assert_eq!(shift_channel(&ch, 1).unwrap().taps(), &[0.0, 1.0, 2.0, 3.0]);
        assert_eq!(shift_channel(&ch, 3).unwrap().taps(), &[0.0, 0.0, 0.0, 1.0]);
        assert!(shift_channel(&ch, 4).is_err());
    }

    #[test]
    fn custom_channel() {
        let ch = Channel::custom(alloc::vec![3.0, 4.0], false).unwrap();
        assert_eq!(ch.taps(), &[3.0, 4.0]);
        let ch = Channel::custom(alloc::vec![3.0, 4.0], true).unwrap();
        assert_eq!(ch.taps(), &[0.6, 0.8]);
        assert!(Channel::custom(alloc::vec![0.0, 0.0], true).is_err());
        assert!(Channel::custom(alloc::vec![], true).is_err());
    }

    #[test]
    fn parameter_validation() {
        assert!(AlphaStable::new(0.0, 1.0).is_err());
        assert!(AlphaStable::new(2.1, 1.0).is_err());
        assert!(AlphaStable::new(1.5, 0.0).is_err());
        assert!(InputModel::new(1.0).is_err());
        assert!(gen_channel(ChannelKind::Sparse, 0, 1).is_err());
        assert!(gen_channel(ChannelKind::Custom, 8, 1).is_err());
    }
}
