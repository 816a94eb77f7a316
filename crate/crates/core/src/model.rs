//! Martingale-difference families with closed-form conditional laws.
//!
//! Every step of every model is a two-point conditional law: given the past,
//! `xi_i` takes the value `hi` with probability `p_hi` and `lo` otherwise.
//! That keeps all conditional moments exact, so the moment conditions can be
//! certified by a finite maximization instead of by simulation.
//!
//! The four families:
//!
//! * `scaled-rademacher`: `xi_i = zeta_i / sqrt(n)`.
//! * `pair-compensated`: on each pair of steps the conditional variances are
//!   `(1 + eta z) / n` and `(1 - eta z) / n`, where `z` is the sign drawn at
//!   the end of the previous pair (`+1` for the first pair). The bracket is
//!   exactly 1 while individual increments depend on the past.
//! * `tilted`: `xi_1 = zeta_1 / sqrt(n)` and `xi_i = s zeta_i / sqrt(n)` for
//!   `i >= 2` with `s^2 = 1 + delta^2 zeta_1`, so
//!   `<X>_n = 1 + delta^2 zeta_1 (n - 1) / n`.
//! * `skewed-violation`: an asymmetric two-point law with zero mean and
//!   variance `1/n` but a nonzero third moment.

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};
use crate::rng::PathStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    ScaledRademacher,
    PairCompensated,
    Tilted,
    SkewedViolation,
}

/// A two-point conditional law: `hi` with probability `p_hi`, else `lo`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepLaw {
    pub hi: f64,
    pub lo: f64,
    pub p_hi: f64,
}

impl StepLaw {
    /// `+-scale` with probability 1/2 each.
    pub fn symmetric(scale: f64) -> Self {
        StepLaw {
            hi: scale,
            lo: -scale,
            p_hi: 0.5,
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.p_hi == 0.5 && self.hi == -self.lo
    }

    pub fn mean(&self) -> f64 {
        self.p_hi * self.hi + (1.0 - self.p_hi) * self.lo
    }

    pub fn variance(&self) -> f64 {
        self.p_hi * self.hi * self.hi + (1.0 - self.p_hi) * self.lo * self.lo
    }

    pub fn third_moment(&self) -> f64 {
        self.p_hi * self.hi * self.hi * self.hi + (1.0 - self.p_hi) * self.lo * self.lo * self.lo
    }

    /// `E|xi|^t`.
    pub fn abs_moment(&self, t: f64) -> f64 {
        self.p_hi * libm::pow(self.hi.abs(), t) + (1.0 - self.p_hi) * libm::pow(self.lo.abs(), t)
    }

    /// Smallest `eps` with `E|xi|^{3+rho} <= eps^{1+rho} E[xi^2]`.
    ///
    /// For a symmetric law `+-v` this is exactly `|v|`; a degenerate law at 0
    /// satisfies the condition for every `eps` and returns 0.
    pub fn tight_epsilon(&self, rho: f64) -> f64 {
        if self.is_symmetric() {
            return self.hi.abs();
        }
        let var = self.variance();
        if var == 0.0 {
            return 0.0;
        }
        libm::pow(self.abs_moment(3.0 + rho) / var, 1.0 / (1.0 + rho))
    }

    pub fn value(&self, outcome: bool) -> f64 {
        if outcome {
            self.hi
        } else {
            self.lo
        }
    }
}

/// Serialized form `{kind, n, rho, eta, delta, skew}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct ModelDescriptor {
    kind: ModelKind,
    n: usize,
    #[serde(default = "default_rho")]
    rho: f64,
    #[serde(default)]
    eta: f64,
    #[serde(default)]
    delta: f64,
    #[serde(default)]
    skew: f64,
}

fn default_rho() -> f64 {
    1.0
}

/// A validated martingale-difference model. Immutable after construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelDescriptor", into = "ModelDescriptor")]
pub struct MdsModel {
    kind: ModelKind,
    n: usize,
    rho: f64,
    eta: f64,
    delta: f64,
    skew: f64,
}

impl TryFrom<ModelDescriptor> for MdsModel {
    type Error = Error;

    fn try_from(d: ModelDescriptor) -> Result<Self> {
        MdsModel::new(d.kind, d.n, d.rho, d.eta, d.delta, d.skew)
    }
}

impl From<MdsModel> for ModelDescriptor {
    fn from(m: MdsModel) -> Self {
        ModelDescriptor {
            kind: m.kind,
            n: m.n,
            rho: m.rho,
            eta: m.eta,
            delta: m.delta,
            skew: m.skew,
        }
    }
}

impl core::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            ModelKind::ScaledRademacher => "scaled-rademacher",
            ModelKind::PairCompensated => "pair-compensated",
            ModelKind::Tilted => "tilted",
            ModelKind::SkewedViolation => "skewed-violation",
        })
    }
}

impl MdsModel {
    pub fn new(
        kind: ModelKind,
        n: usize,
        rho: f64,
        eta: f64,
        delta: f64,
        skew: f64,
    ) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidHorizon {
                n: n as u64,
                reason: "n must be at least 1",
            });
        }
        if kind == ModelKind::PairCompensated && (n < 2 || n % 2 != 0) {
            return Err(Error::InvalidHorizon {
                n: n as u64,
                reason: "pair-compensated needs an even n >= 2",
            });
        }
        check_range("rho", rho, rho > 0.0, "rho > 0")?;
        check_range("eta", eta, (0.0..=0.5).contains(&eta), "eta in [0, 1/2]")?;
        check_range(
            "delta",
            delta,
            (0.0..=0.5).contains(&delta),
            "delta in [0, 1/2]",
        )?;
        check_range("skew", skew, skew > -1.0 && skew < 1.0, "skew in (-1, 1)")?;
        Ok(MdsModel {
            kind,
            n,
            rho,
            eta,
            delta,
            skew,
        })
    }

    pub fn scaled_rademacher(n: usize) -> Result<Self> {
        Self::new(ModelKind::ScaledRademacher, n, 1.0, 0.0, 0.0, 0.0)
    }

    pub fn pair_compensated(n: usize, eta: f64) -> Result<Self> {
        Self::new(ModelKind::PairCompensated, n, 1.0, eta, 0.0, 0.0)
    }

    pub fn tilted(n: usize, delta: f64) -> Result<Self> {
        Self::new(ModelKind::Tilted, n, 1.0, 0.0, delta, 0.0)
    }

    pub fn skewed_violation(n: usize, skew: f64) -> Result<Self> {
        Self::new(ModelKind::SkewedViolation, n, 1.0, 0.0, 0.0, skew)
    }

    pub fn with_rho(self, rho: f64) -> Result<Self> {
        Self::new(self.kind, self.n, rho, self.eta, self.delta, self.skew)
    }

    /// Same parameters at another horizon.
    pub fn with_horizon(self, n: usize) -> Result<Self> {
        Self::new(self.kind, n, self.rho, self.eta, self.delta, self.skew)
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn skew(&self) -> f64 {
        self.skew
    }

    fn unit(&self) -> f64 {
        1.0 / libm::sqrt(self.n as f64)
    }

    fn skew_prob(&self) -> f64 {
        0.5 * (1.0 - self.skew)
    }

    fn tilted_variance(&self, first_up: bool) -> f64 {
        let d2 = self.delta * self.delta;
        let s2 = if first_up { 1.0 + d2 } else { 1.0 - d2 };
        s2.max(0.0)
    }

    fn tilted_scale(&self, first_up: bool) -> f64 {
        libm::sqrt(self.tilted_variance(first_up))
    }

    /// Conditional law of step `step` (1-based) given the outcome of step 1
    /// and the outcome closing the previous pair (step `2j - 2` for steps
    /// `2j - 1` and `2j`). These are the only parts of the past any model
    /// depends on.
    fn law_given(&self, step: usize, first: Option<bool>, closing: Option<bool>) -> StepLaw {
        let unit = self.unit();
        match self.kind {
            ModelKind::ScaledRademacher => StepLaw::symmetric(unit),
            ModelKind::PairCompensated => {
                let z = if step <= 2 {
                    1.0
                } else {
                    sign(closing.expect("pair step >= 3 needs the previous pair"))
                };
                let var = if step % 2 == 1 {
                    1.0 + self.eta * z
                } else {
                    1.0 - self.eta * z
                };
                StepLaw::symmetric(libm::sqrt(var) * unit)
            }
            ModelKind::Tilted => {
                if step == 1 {
                    StepLaw::symmetric(unit)
                } else {
                    let up = first.expect("tilted step >= 2 needs the first outcome");
                    StepLaw::symmetric(self.tilted_scale(up) * unit)
                }
            }
            ModelKind::SkewedViolation => {
                let q = self.skew_prob();
                StepLaw {
                    hi: libm::sqrt((1.0 - q) / q) * unit,
                    lo: -libm::sqrt(q / (1.0 - q)) * unit,
                    p_hi: q,
                }
            }
        }
    }

    /// Conditional law of step `step` (1-based) given the outcomes of steps
    /// `1..step` (`true` = the law's `hi` value).
    pub fn law_at(&self, step: usize, history: &[bool]) -> StepLaw {
        debug_assert!(step >= 1 && history.len() >= step - 1);
        let closing = if step >= 3 {
            let last = if step % 2 == 1 { step - 1 } else { step - 2 };
            Some(history[last - 1])
        } else {
            None
        };
        self.law_given(step, history.first().copied(), closing)
    }

    /// The distinct conditional laws the model can use at any step.
    pub fn step_laws(&self) -> Vec<StepLaw> {
        let unit = self.unit();
        let mut laws = Vec::new();
        match self.kind {
            ModelKind::ScaledRademacher => laws.push(StepLaw::symmetric(unit)),
            ModelKind::PairCompensated => {
                laws.push(StepLaw::symmetric(libm::sqrt(1.0 + self.eta) * unit));
                laws.push(StepLaw::symmetric(libm::sqrt(1.0 - self.eta) * unit));
            }
            ModelKind::Tilted => {
                laws.push(StepLaw::symmetric(unit));
                if self.n >= 2 {
                    laws.push(StepLaw::symmetric(self.tilted_scale(true) * unit));
                    laws.push(StepLaw::symmetric(self.tilted_scale(false) * unit));
                }
            }
            ModelKind::SkewedViolation => laws.push(self.law_given(1, None, None)),
        }
        laws
    }

    /// The possible values of `<X>_n`, in closed form.
    pub fn terminal_brackets(&self) -> Vec<f64> {
        match self.kind {
            ModelKind::Tilted if self.n >= 2 => {
                let n = self.n as f64;
                let frac = (n - 1.0) / n;
                [true, false]
                    .iter()
                    .map(|&up| 1.0 / n + frac * self.tilted_variance(up))
                    .collect()
            }
            _ => alloc::vec![1.0],
        }
    }

    /// Walks one path, calling `f(step, xi, conditional_variance)` per step.
    fn walk(&self, seed: u64, path_index: u64, mut f: impl FnMut(usize, f64, f64)) {
        let stream = PathStream::new(seed, path_index);
        let mut first = None;
        let mut closing = None;
        for step in 1..=self.n {
            let law = self.law_given(step, first, closing);
            let k = (step - 1) as u64;
            let outcome = match self.kind {
                ModelKind::SkewedViolation => stream.uniform(k) < law.p_hi,
                _ => stream.sign(k),
            };
            if step == 1 {
                first = Some(outcome);
            }
            if step % 2 == 0 {
                closing = Some(outcome);
            }
            f(step, law.value(outcome), law.variance());
        }
    }
}

fn sign(up: bool) -> f64 {
    if up {
        1.0
    } else {
        -1.0
    }
}

/// One sampled path: increments, running bracket and terminal value.
#[derive(Debug, Clone, PartialEq)]
pub struct MartingalePath {
    pub xi: Vec<f64>,
    pub bracket: Vec<f64>,
    pub x_n: f64,
}

impl MartingalePath {
    pub fn bracket_n(&self) -> f64 {
        self.bracket.last().copied().unwrap_or(0.0)
    }

    pub fn max_abs_xi(&self) -> f64 {
        self.xi.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn summary(&self) -> PathSummary {
        PathSummary {
            x_n: self.x_n,
            bracket_n: self.bracket_n(),
            max_abs_xi: self.max_abs_xi(),
        }
    }
}

/// The three per-path quantities Monte Carlo experiments need.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSummary {
    pub x_n: f64,
    pub bracket_n: f64,
    pub max_abs_xi: f64,
}

/// Samples a path. A pure function of `(model, seed, path_index)`.
pub fn sample_path(model: &MdsModel, seed: u64, path_index: u64) -> MartingalePath {
    let mut xi = Vec::with_capacity(model.n);
    let mut bracket = Vec::with_capacity(model.n);
    let mut acc = 0.0;
    let mut sum = 0.0;
    model.walk(seed, path_index, |_, x, var| {
        acc += var;
        sum += x;
        xi.push(x);
        bracket.push(acc);
    });
    MartingalePath {
        xi,
        bracket,
        x_n: sum,
    }
}

impl MdsModel {
    /// Terminal value, bracket and largest |increment| of the path
    /// `sample_path(self, seed, path_index)` without materializing it.
    ///
    /// Symmetric Rademacher-driven models are summed by popcount, so `x_n` is
    /// an integer combination of signs scaled once; it agrees with the
    /// step-by-step sum up to rounding and places equal lattice points on
    /// bit-identical values.
    pub fn path_summary(&self, seed: u64, path_index: u64) -> PathSummary {
        let n = self.n as u64;
        let unit = self.unit();
        match self.kind {
            ModelKind::ScaledRademacher => {
                let s = PathStream::new(seed, path_index).sign_sum(0, n);
                PathSummary {
                    x_n: s as f64 * unit,
                    bracket_n: 1.0,
                    max_abs_xi: unit,
                }
            }
            ModelKind::Tilted => {
                let stream = PathStream::new(seed, path_index);
                let up = stream.sign(0);
                let rest = stream.sign_sum(1, n - 1);
                let scale = self.tilted_scale(up);
                let z1 = sign(up);
                let x_n = (z1 + scale * rest as f64) * unit;
                let (bracket_n, max_abs_xi) = if n >= 2 {
                    let nf = n as f64;
                    (
                        1.0 / nf + (nf - 1.0) / nf * self.tilted_variance(up),
                        unit.max(scale * unit),
                    )
                } else {
                    (1.0, unit)
                };
                PathSummary {
                    x_n,
                    bracket_n,
                    max_abs_xi,
                }
            }
            _ => {
                let mut out = PathSummary {
                    x_n: 0.0,
                    bracket_n: 0.0,
                    max_abs_xi: 0.0,
                };
                self.walk(seed, path_index, |_, x, var| {
                    out.x_n += x;
                    out.bracket_n += var;
                    out.max_abs_xi = out.max_abs_xi.max(x.abs());
                });
                out
            }
        }
    }

    /// Visits the increments of one path in order.
    pub fn for_each_increment(&self, seed: u64, path_index: u64, mut f: impl FnMut(f64)) {
        self.walk(seed, path_index, |_, x, _| f(x));
    }
}

/// Exact certification of the moment conditions for a model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    /// Smallest `eps` with `E[|xi|^{3+rho} | F] <= eps^{1+rho} E[xi^2 | F]` on
    /// every history.
    pub epsilon_n: f64,
    /// Smallest `delta` with `|<X>_n - 1| <= delta^2` on every history.
    pub delta_n: f64,
    pub third_moment_max: f64,
    /// `E[xi^2 | F] <= epsilon_n^2` on every history.
    pub lemma2_ok: bool,
    pub satisfied: bool,
}

/// Relative slack for comparing closed forms that are equal in exact arithmetic.
const CLOSED_FORM_SLACK: f64 = 1e-12;

pub fn condition_report(model: &MdsModel) -> ConditionReport {
    let laws = model.step_laws();
    let epsilon_n = laws
        .iter()
        .map(|l| l.tight_epsilon(model.rho))
        .fold(0.0, f64::max);
    let third_moment_max = laws
        .iter()
        .map(|l| l.third_moment().abs())
        .fold(0.0, f64::max);
    let delta_n = libm::sqrt(
        model
            .terminal_brackets()
            .iter()
            .map(|b| (b - 1.0).abs())
            .fold(0.0, f64::max),
    );
    let max_var = laws.iter().map(StepLaw::variance).fold(0.0, f64::max);
    let lemma2_ok = max_var <= epsilon_n * epsilon_n * (1.0 + CLOSED_FORM_SLACK);
    let satisfied = third_moment_max == 0.0 && delta_n <= 0.5 && epsilon_n <= 0.5;
    ConditionReport {
        epsilon_n,
        delta_n,
        third_moment_max,
        lemma2_ok,
        satisfied,
    }
}
