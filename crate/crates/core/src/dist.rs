//! Kolmogorov distance to the standard normal.
//!
//! For a law with CDF `F` that is a step function, `sup_x |F(x) - Phi(x)|` is
//! attained at a jump point, approached from one side or the other, since
//! `Phi` is continuous. Every routine here therefore sweeps the sorted
//! support once and compares `Phi(x)` with both `F(x-)` and `F(x)`.

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::binomial;
use crate::error::{Error, Result};
use crate::model::MdsModel;
use crate::normal::std_normal_cdf;

/// Largest horizon accepted by [`exact_rademacher_distance`].
pub const MAX_EXACT_HORIZON: u64 = 1 << 22;
/// Largest horizon accepted by [`enumerate_model_distance`].
pub const MAX_ENUMERATION_HORIZON: usize = 20;

/// Confidence level used for the band attached to Monte Carlo results.
pub const DEFAULT_CONFIDENCE: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistanceMethod {
    ExactBinomial,
    ExactEnumeration,
    MonteCarlo,
}

impl DistanceMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            DistanceMethod::ExactBinomial => "exact-binomial",
            DistanceMethod::ExactEnumeration => "exact-enumeration",
            DistanceMethod::MonteCarlo => "monte-carlo",
        }
    }
}

impl core::fmt::Display for DistanceMethod {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KolmogorovResult {
    pub d: f64,
    pub method: DistanceMethod,
    /// Number of samples, Monte Carlo only.
    pub sample_size: Option<u64>,
    /// Half-width of the 95% DKW band, Monte Carlo only.
    pub dkw_band: Option<f64>,
    pub argsup: f64,
}

/// `sqrt(ln(2 / (1 - confidence)) / (2 N))`.
///
/// # Panics
///
/// If `n == 0` or `confidence` is not in (0, 1).
pub fn dkw_band(n: u64, confidence: f64) -> f64 {
    assert!(n >= 1, "DKW band needs at least one sample");
    assert!(
        confidence > 0.0 && confidence < 1.0,
        "confidence must lie in (0, 1)"
    );
    libm::sqrt(libm::log(2.0 / (1.0 - confidence)) / (2.0 * n as f64))
}

#[inline]
fn deviation(below: f64, upto: f64, phi: f64) -> f64 {
    let a = (below - phi).abs();
    let b = (upto - phi).abs();
    if a > b {
        a
    } else {
        b
    }
}

/// Distance between the empirical law of `samples` and `Phi`.
///
/// Equal values are handled as one jump of the empirical CDF.
pub fn kolmogorov_distance(samples: &[f64]) -> Result<KolmogorovResult> {
    let mut sorted = samples.to_vec();
    kolmogorov_distance_in_place(&mut sorted)
}

/// As [`kolmogorov_distance`], sorting the caller's buffer instead of a copy.
pub fn kolmogorov_distance_in_place(samples: &mut [f64]) -> Result<KolmogorovResult> {
    if samples.is_empty() {
        return Err(Error::InvalidParameter {
            name: "N",
            value: 0.0,
            expected: "at least one sample",
        });
    }
    if let Some(index) = samples.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFiniteSample { index });
    }
    samples.sort_unstable_by(f64::total_cmp);
    let n = samples.len();
    let nf = n as f64;
    let mut best = -1.0;
    let mut argsup = samples[0];
    let mut i = 0;
    while i < n {
        let x = samples[i];
        let mut j = i + 1;
        while j < n && samples[j] == x {
            j += 1;
        }
        let dev = deviation(i as f64 / nf, j as f64 / nf, std_normal_cdf(x));
        if dev > best {
            best = dev;
            argsup = x;
        }
        i = j;
    }
    Ok(KolmogorovResult {
        d: best,
        method: DistanceMethod::MonteCarlo,
        sample_size: Some(n as u64),
        dkw_band: Some(dkw_band(n as u64, DEFAULT_CONFIDENCE)),
        argsup,
    })
}

/// `|F(x-) - Phi(x)|` and `|F(x) - Phi(x)|` at `x` for the empirical CDF of
/// `sorted`, maximized. Uses the same arithmetic as the sweep.
pub fn empirical_deviation_at(sorted: &[f64], x: f64) -> f64 {
    let nf = sorted.len() as f64;
    let below = sorted.partition_point(|v| *v < x);
    let upto = sorted.partition_point(|v| *v <= x);
    deviation(below as f64 / nf, upto as f64 / nf, std_normal_cdf(x))
}

/// Exact distance of a discrete law given as atoms `(x, p)` sorted by `x`
/// with distinct locations.
fn discrete_law_distance(atoms: &[(f64, f64)]) -> (f64, f64) {
    let mut cum = 0.0;
    let mut best = -1.0;
    let mut argsup = f64::NAN;
    for &(x, p) in atoms {
        let after = cum + p;
        let dev = deviation(cum, after, std_normal_cdf(x));
        if dev > best {
            best = dev;
            argsup = x;
        }
        cum = after;
    }
    (best, argsup)
}

/// Exact distance for `X_n = (2K - n) / sqrt(n)`, `K ~ Binomial(n, 1/2)`,
/// the terminal value of the scaled Rademacher martingale.
pub fn exact_rademacher_distance(n: u64) -> Result<KolmogorovResult> {
    if !(1..=MAX_EXACT_HORIZON).contains(&n) {
        return Err(Error::InvalidHorizon {
            n,
            reason: "exact binomial distance needs 1 <= n <= 2^22",
        });
    }
    let cdf = binomial::symmetric_cdf(n);
    let root = libm::sqrt(n as f64);
    let mut best = -1.0;
    let mut argsup = 0.0;
    let mut below = 0.0;
    for (k, &upto) in cdf.iter().enumerate() {
        let x = (2.0 * k as f64 - n as f64) / root;
        let dev = deviation(below, upto, std_normal_cdf(x));
        if dev > best {
            best = dev;
            argsup = x;
        }
        below = upto;
    }
    Ok(KolmogorovResult {
        d: best,
        method: DistanceMethod::ExactBinomial,
        sample_size: None,
        dkw_band: None,
        argsup,
    })
}

/// Exact law of `X_n` by enumerating all outcome paths, as sorted atoms.
///
/// Path sums reached by different orderings of the same increments can differ
/// in the last bits; atoms closer than `1e-12 (1 + |x|)` are merged.
pub fn enumerate_terminal_law(model: &MdsModel) -> Result<Vec<(f64, f64)>> {
    let n = model.n();
    if n > MAX_ENUMERATION_HORIZON {
        return Err(Error::InvalidHorizon {
            n: n as u64,
            reason: "enumeration is limited to n <= 20",
        });
    }
    let mut atoms = Vec::with_capacity(1 << n);
    let mut history = Vec::with_capacity(n);
    descend(model, &mut history, 0.0, 1.0, &mut atoms);
    atoms.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
    for (x, p) in atoms {
        match merged.last_mut() {
            Some(last) if (x - last.0).abs() <= 1e-12 * (1.0 + x.abs()) => last.1 += p,
            _ => merged.push((x, p)),
        }
    }
    Ok(merged)
}

fn descend(
    model: &MdsModel,
    history: &mut Vec<bool>,
    x: f64,
    prob: f64,
    out: &mut Vec<(f64, f64)>,
) {
    let step = history.len() + 1;
    if step > model.n() {
        if prob > 0.0 {
            out.push((x, prob));
        }
        return;
    }
    let law = model.law_at(step, history);
    for outcome in [true, false] {
        let p = if outcome { law.p_hi } else { 1.0 - law.p_hi };
        history.push(outcome);
        descend(model, history, x + law.value(outcome), prob * p, out);
        history.pop();
    }
}

/// Exact distance of `X_n` under `model` by brute-force enumeration, n <= 20.
pub fn enumerate_model_distance(model: &MdsModel) -> Result<KolmogorovResult> {
    let atoms = enumerate_terminal_law(model)?;
    let (d, argsup) = discrete_law_distance(&atoms);
    Ok(KolmogorovResult {
        d,
        method: DistanceMethod::ExactEnumeration,
        sample_size: None,
        dkw_band: None,
        argsup,
    })
}
