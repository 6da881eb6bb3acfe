//! Leading dichotomous coordinate descent.
//!
//! Solves `R Δw = b` for symmetric `R` with positive diagonal. Every step
//! size is a power of two no larger than `H/2`, so in a fixed-point datapath
//! all multiplications by the step become shifts. Each accepted update picks
//! the coordinate with the largest residual, shrinks the step until it is
//! worth taking, and moves that coordinate by `±μ`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_finite, check_len, invalid, Error, Result};
use crate::matrix::SymMatrix;

/// Controls for one DCD solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DcdConfig {
    amplitude: f64,
    bits: u32,
    max_updates: usize,
}

impl DcdConfig {
    /// `amplitude` (H) bounds the solution entries and must be an exact power
    /// of two; `bits` (M_b) is the resolution within `[-H, H]`; `max_updates`
    /// (N_u) caps the number of coordinate updates per solve.
    pub fn new(amplitude: f64, bits: u32, max_updates: usize) -> Result<Self> {
        if !(amplitude.is_finite() && amplitude > 0.0) || libm::frexp(amplitude).0 != 0.5 {
            return Err(invalid("H", "must be a positive power of two"));
        }
        if bits == 0 {
            return Err(invalid("M_b", "must be at least 1"));
        }
        // μ is halved at most M_b + 1 times from H/2; keep it a normal float.
        if libm::frexp(amplitude).1 - (bits as i32) - 2 < f64::MIN_EXP {
            return Err(invalid("M_b", "finest step underflows"));
        }
        Ok(Self {
            amplitude,
            bits,
            max_updates,
        })
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn max_updates(&self) -> usize {
        self.max_updates
    }

    /// Smallest step the solver can take, `H·2^-M_b`.
    pub fn resolution(&self) -> f64 {
        libm::ldexp(self.amplitude, -(self.bits as i32))
    }
}

impl Default for DcdConfig {
    /// `H = 1`, `M_b = 16`, `N_u = 8`.
    fn default() -> Self {
        Self {
            amplitude: 1.0,
            bits: 16,
            max_updates: 8,
        }
    }
}

/// Instrumentation of a single solve.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DcdStats {
    pub updates_performed: usize,
    /// Comparisons, additions and shifts executed, counted the way the
    /// `2·N_u·M + M_b` bound counts them.
    pub additions_count: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DcdSolution {
    pub delta_w: Vec<f64>,
    /// `b - R·delta_w`, maintained incrementally.
    pub residual: Vec<f64>,
    pub updates_performed: usize,
    pub additions_count: u64,
}

/// Upper bound on the additions of one solve: `2·N_u·M + M_b`.
pub fn count_ops(cfg: &DcdConfig, dim: usize) -> u64 {
    2 * cfg.max_updates as u64 * dim as u64 + cfg.bits as u64
}

/// Solves `R Δw = b` with validation of every input.
pub fn dcd_solve(r: &SymMatrix, b: &[f64], cfg: &DcdConfig) -> Result<DcdSolution> {
    check_len("right-hand side", r.dim(), b.len())?;
    check_finite("right-hand side", b)?;
    check_finite("matrix", r.as_slice())?;
    if r.diagonal().any(|d| d <= 0.0) {
        return Err(Error::InvalidParameter {
            name: "matrix",
            reason: "diagonal entries must be strictly positive",
        });
    }
    let mut residual = b.to_vec();
    let mut delta_w = vec![0.0; b.len()];
    let stats = solve_in_place(r, &mut residual, &mut delta_w, cfg);
    Ok(DcdSolution {
        delta_w,
        residual,
        updates_performed: stats.updates_performed,
        additions_count: stats.additions_count,
    })
}

/// Core iteration. On entry `residual` holds `b`; `delta_w` is overwritten
/// with the solution increment. Inputs are assumed validated.
pub(crate) fn solve_in_place(
    r: &SymMatrix,
    residual: &mut [f64],
    delta_w: &mut [f64],
    cfg: &DcdConfig,
) -> DcdStats {
    let dim = r.dim();
    delta_w.iter_mut().for_each(|v| *v = 0.0);
    let mut stats = DcdStats::default();
    if dim == 0 {
        return stats;
    }

    // Bit counter and step persist across updates within one solve.
    let mut y = 1u32;
    let mut mu = cfg.amplitude * 0.5;

    for _ in 0..cfg.max_updates {
        // argmax |r_l|, lowest index on ties
        let mut l = 0;
        let mut best = residual[0].abs();
        for (i, v) in residual.iter().enumerate().skip(1) {
            if v.abs() > best {
                best = v.abs();
                l = i;
            }
        }
        stats.additions_count += dim as u64 - 1;

        let r_ll = r.get(l, l);
        while best <= 0.5 * mu * r_ll && y <= cfg.bits {
            y += 1;
            mu *= 0.5;
            stats.additions_count += 1;
        }
        if y > cfg.bits {
            break;
        }

        let step = if residual[l] >= 0.0 { mu } else { -mu };
        delta_w[l] += step;
        for (ri, rl) in residual.iter_mut().zip(r.row(l)) {
            *ri -= step * rl;
        }
        stats.updates_performed += 1;
        stats.additions_count += dim as u64 + 1;
    }
    stats
}
