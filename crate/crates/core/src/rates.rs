//! Rate extraction and bound functionals.

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};
use crate::model::{MartingalePath, PathSummary};

/// Least-squares fit of `log d = intercept + slope * log n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub points: Vec<(f64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    /// `(n, sqrt(n) * d)`.
    pub scaled: Vec<(f64, f64)>,
}

pub fn fit_loglog(points: &[(f64, f64)]) -> Result<RateFit> {
    if points.len() < 3 {
        return Err(Error::TooFewPoints { got: points.len() });
    }
    for (k, &(n, d)) in points.iter().enumerate() {
        check_range("n", n, n > 0.0, "n > 0")?;
        if d <= 0.0 || !d.is_finite() {
            return Err(Error::NonPositiveDistance { n, d });
        }
        if points[..k].iter().any(|p| p.0 == n) {
            return Err(Error::DuplicateHorizon { n });
        }
    }
    let xs: Vec<f64> = points.iter().map(|p| libm::log(p.0)).collect();
    let ys: Vec<f64> = points.iter().map(|p| libm::log(p.1)).collect();
    let len = points.len() as f64;
    let mx = xs.iter().sum::<f64>() / len;
    let my = ys.iter().sum::<f64>() / len;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(&ys) {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum();
    let r2 = if syy == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    Ok(RateFit {
        points: points.to_vec(),
        slope,
        intercept,
        r2,
        scaled: points
            .iter()
            .map(|&(n, d)| (n, libm::sqrt(n) * d))
            .collect(),
    })
}

/// Fits after dropping points with `d <= 0`; returns the dropped points.
pub fn fit_loglog_excluding_zeros(points: &[(f64, f64)]) -> Result<(RateFit, Vec<(f64, f64)>)> {
    let (kept, dropped): (Vec<_>, Vec<_>) = points.iter().partition(|p| p.1 > 0.0);
    Ok((fit_loglog(&kept)?, dropped))
}

/// Moment functionals `E|<X>_n - 1|^p`, `E max_i |xi_i|^{2p}` and their
/// constant-free combination `(sum)^{1/(2p+1)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Functionals {
    pub p: f64,
    pub moment_bracket: f64,
    pub moment_max: f64,
    pub combined: f64,
}

/// Streaming sums for [`Functionals`]; merge partial accumulators in a fixed
/// order for reproducible totals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunctionalAccumulator {
    p: f64,
    count: u64,
    sum_bracket: f64,
    sum_max: f64,
}

impl FunctionalAccumulator {
    pub fn new(p: f64) -> Result<Self> {
        check_range("p", p, p >= 1.0, "p >= 1")?;
        Ok(FunctionalAccumulator {
            p,
            count: 0,
            sum_bracket: 0.0,
            sum_max: 0.0,
        })
    }

    pub fn push(&mut self, bracket_n: f64, max_abs_xi: f64) {
        self.count += 1;
        self.sum_bracket += libm::pow((bracket_n - 1.0).abs(), self.p);
        self.sum_max += libm::pow(max_abs_xi, 2.0 * self.p);
    }

    pub fn push_summary(&mut self, s: &PathSummary) {
        self.push(s.bracket_n, s.max_abs_xi);
    }

    pub fn merge(&mut self, other: &Self) {
        self.count += other.count;
        self.sum_bracket += other.sum_bracket;
        self.sum_max += other.sum_max;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn finish(&self) -> Result<Functionals> {
        if self.count == 0 {
            return Err(Error::TooFewPoints { got: 0 });
        }
        let moment_bracket = self.sum_bracket / self.count as f64;
        let moment_max = self.sum_max / self.count as f64;
        Ok(Functionals {
            p: self.p,
            moment_bracket,
            moment_max,
            combined: libm::pow(moment_bracket + moment_max, 1.0 / (2.0 * self.p + 1.0)),
        })
    }
}

pub fn theorem2_functionals(paths: &[MartingalePath], p: f64) -> Result<Functionals> {
    let mut acc = FunctionalAccumulator::new(p)?;
    for path in paths {
        acc.push(path.bracket_n(), path.max_abs_xi());
    }
    acc.finish()
}

/// Pointwise `c (eps_n + delta_n)`.
pub fn bound_curve(eps: &[f64], delta: &[f64], c: f64) -> Result<Vec<f64>> {
    check_range("c", c, c > 0.0, "c > 0")?;
    if eps.len() != delta.len() {
        return Err(Error::LengthMismatch {
            left: eps.len(),
            right: delta.len(),
        });
    }
    Ok(eps.iter().zip(delta).map(|(e, d)| c * (e + d)).collect())
}

/// Smallest `c` with `d_n <= c (eps_n + delta_n)` for every point: the
/// empirical tightness ratio of the bound shape.
pub fn tightness_constant(d: &[f64], eps: &[f64], delta: &[f64]) -> Result<f64> {
    if d.len() != eps.len() || d.len() != delta.len() {
        return Err(Error::LengthMismatch {
            left: d.len(),
            right: eps.len().min(delta.len()),
        });
    }
    Ok(d.iter()
        .zip(eps.iter().zip(delta))
        .map(|(dn, (e, de))| dn / (e + de))
        .fold(0.0, f64::max))
}
