//! Completion of a martingale to unit conditional variance.
//!
//! Stop at `tau`, the last `k <= n` with `<X>_k <= 1`, then append `r` steps
//! `eps * zeta` with `r = floor((1 - <X>_tau) / eps^2)`, one residual step
//! `sqrt(1 - <X>_tau - r eps^2) * zeta`, and zeros up to `N = n + r + 1`. The
//! `zeta` are Rademacher signs independent of the original path. Original
//! increments after `tau` are dropped.

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};
use crate::model::{MartingalePath, StepLaw};
use crate::rng::PathStream;

/// Pads beyond this count are refused (`1/eps^2` must stay exactly representable).
pub const MAX_PADS: f64 = (1u64 << 52) as f64;

const PAD_STREAM: u64 = 0x7061_6473;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnlargedSequence {
    pub n: usize,
    pub tau: usize,
    pub r: u64,
    /// The `eps` used for the full padding steps.
    #[serde(rename = "epsilon")]
    pub pad_scale: f64,
    pub residual_step: f64,
    #[serde(rename = "N")]
    pub big_n: u64,
    /// `<X>_tau + r eps^2 + residual_step^2`.
    #[serde(rename = "bracket_N")]
    pub bracket_big_n: f64,
    #[serde(skip)]
    bracket_tau: f64,
}

impl EnlargedSequence {
    pub fn bracket_tau(&self) -> f64 {
        self.bracket_tau
    }

    /// Conditional laws of the appended steps: the padding law (if `r > 0`)
    /// and the residual law.
    pub fn pad_laws(&self) -> Vec<StepLaw> {
        let mut laws = Vec::with_capacity(2);
        if self.r > 0 {
            laws.push(StepLaw::symmetric(self.pad_scale));
        }
        laws.push(StepLaw::symmetric(self.residual_step));
        laws
    }

    /// Whether every appended step satisfies
    /// `E|xi|^{3+rho} <= epsilon_n^{1+rho} E[xi^2]` with zero mean and third
    /// moment, evaluated from the closed-form two-point laws.
    pub fn pads_satisfy_conditions(&self, epsilon_n: f64, rho: f64) -> bool {
        self.pad_laws().iter().all(|l| {
            let lhs = l.abs_moment(3.0 + rho);
            let rhs = libm::pow(epsilon_n, 1.0 + rho) * l.variance();
            l.mean() == 0.0 && l.third_moment() == 0.0 && lhs <= rhs * (1.0 + 1e-12)
        })
    }
}

/// Computes the stopping index and padding for `bracket = (<X>_1, ..., <X>_n)`.
pub fn enlarge_to_unit_variance(bracket: &[f64], epsilon: f64) -> Result<EnlargedSequence> {
    check_range("epsilon", epsilon, epsilon > 0.0, "epsilon > 0")?;
    let unit = epsilon * epsilon;
    if 1.0 / unit > MAX_PADS {
        return Err(Error::InvalidParameter {
            name: "epsilon",
            value: epsilon,
            expected: "epsilon >= 2^-26 (at most 2^52 pads)",
        });
    }
    let mut prev = 0.0;
    for (index, &b) in bracket.iter().enumerate() {
        if !b.is_finite() {
            return Err(Error::NonFiniteSample { index });
        }
        if b < prev {
            return Err(Error::DecreasingBracket { index });
        }
        prev = b;
    }

    let tau = bracket.partition_point(|&b| b <= 1.0);
    let bracket_tau = if tau == 0 { 0.0 } else { bracket[tau - 1] };
    let gap = 1.0 - bracket_tau;
    let mut r = libm::floor(gap / unit);
    // keep 0 <= gap - r eps^2 < eps^2 despite rounding in the division
    if gap - r * unit < 0.0 && r > 0.0 {
        r -= 1.0;
    } else if gap - r * unit >= unit {
        r += 1.0;
    }
    let rem = (gap - r * unit).max(0.0);
    let residual_step = libm::sqrt(rem);
    let r = r as u64;
    Ok(EnlargedSequence {
        n: bracket.len(),
        tau,
        r,
        pad_scale: epsilon,
        residual_step,
        big_n: bracket.len() as u64 + r + 1,
        bracket_big_n: bracket_tau + r as f64 * unit + residual_step * residual_step,
        bracket_tau,
    })
}

/// An enlarged path: the summary plus the increments `xi_hat_1..xi_hat_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnlargedPath {
    pub summary: EnlargedSequence,
    pub xi: Vec<f64>,
}

impl EnlargedPath {
    pub fn terminal(&self) -> f64 {
        self.xi.iter().sum()
    }
}

/// Enlarges a sampled path, drawing the padding signs from the stream keyed
/// by `(seed, path_index)`.
pub fn enlarge_path(
    path: &MartingalePath,
    epsilon: f64,
    seed: u64,
    path_index: u64,
) -> Result<EnlargedPath> {
    let summary = enlarge_to_unit_variance(&path.bracket, epsilon)?;
    let stream = PathStream::new(seed, path_index).substream(PAD_STREAM);
    let total = summary.big_n as usize;
    let mut xi = Vec::with_capacity(total);
    xi.extend_from_slice(&path.xi[..summary.tau]);
    let sign = |k: u64| if stream.sign(k) { 1.0 } else { -1.0 };
    for k in 0..summary.r {
        xi.push(epsilon * sign(k));
    }
    xi.push(summary.residual_step * sign(summary.r));
    xi.resize(total, 0.0);
    Ok(EnlargedPath { summary, xi })
}
