//! Causal linear processes `Y_k = sum_{j <= k} a_{k-j} e_j` and their partial
//! sums.
//!
//! `S_n = Y_1 + ... + Y_n = sum_{i <= n} b_{n,i} e_i` with
//! `b_{n,i} = a_0 + ... + a_{n-i}` for `0 < i <= n` and
//! `b_{n,i} = a_{1-i} + ... + a_{n-i}` for `i <= 0`. The infinite past is cut at
//! `i = -m`; all weights come from one prefix-sum array of the coefficients.

use alloc::string::ToString;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};
use crate::model::{MdsModel, ModelKind};
use crate::rng::PathStream;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CoefficientKind {
    /// `a_i = Gamma(i + d) / (Gamma(d) Gamma(i + 1))`.
    Farima { d: f64 },
    /// `a_0 = 1`, `a_i = scale * i^-alpha`.
    PowerLaw { alpha: f64, scale: f64 },
    /// An explicit list; coefficients past its end are zero.
    Finite,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSeq {
    kind: CoefficientKind,
    values: Vec<f64>,
    tail_exponent: Option<f64>,
    tail_mass_bound: f64,
}

impl CoefficientSeq {
    /// Explicit coefficients `a_0, a_1, ...`.
    pub fn finite(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter {
                name: "values",
                value: 0.0,
                expected: "at least one coefficient",
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteSample { index });
        }
        Ok(CoefficientSeq {
            kind: CoefficientKind::Finite,
            values,
            tail_exponent: None,
            tail_mass_bound: 0.0,
        })
    }

    pub fn kind(&self) -> CoefficientKind {
        self.kind
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Truncation length `m`: values are stored for indices `0..=m`.
    pub fn truncation(&self) -> usize {
        self.values.len() - 1
    }

    /// `alpha` of the regularly varying tail (`1 - d` for FARIMA).
    pub fn tail_exponent(&self) -> Option<f64> {
        self.tail_exponent
    }

    /// Upper bound on `sum_{i > m} a_i^2`.
    pub fn tail_mass_bound(&self) -> f64 {
        self.tail_mass_bound
    }

    /// `(C, alpha)` with `0 <= a_i <= C i^-alpha` and `a_i` non-increasing for `i >= 1`.
    fn tail_envelope(&self) -> Option<(f64, f64)> {
        match self.kind {
            // Gautschi: Gamma(i + d) / Gamma(i + 1) < i^(d - 1)
            CoefficientKind::Farima { d } => Some((1.0 / libm::tgamma(d), 1.0 - d)),
            CoefficientKind::PowerLaw { alpha, scale } => Some((scale, alpha)),
            CoefficientKind::Finite => None,
        }
    }

    fn get(&self, i: usize) -> f64 {
        self.values.get(i).copied().unwrap_or(0.0)
    }

    /// Multiplies every coefficient by `lambda`, as an explicit list.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        CoefficientSeq::finite(self.values.iter().map(|a| a * lambda).collect())
    }
}

/// FARIMA(0, d, 0) coefficients `a_0..=a_m` by `a_i = a_{i-1} (i - 1 + d) / i`.
pub fn farima_coefficients(d: f64, m: usize) -> Result<CoefficientSeq> {
    check_range("d", d, d > 0.0 && d < 0.5, "d in (0, 1/2)")?;
    if m < 1 {
        return Err(Error::InvalidParameter {
            name: "m",
            value: m as f64,
            expected: "m >= 1",
        });
    }
    let mut values = Vec::with_capacity(m + 1);
    let mut a = 1.0;
    values.push(a);
    for i in 1..=m {
        a *= (i as f64 - 1.0 + d) / i as f64;
        values.push(a);
    }
    let c = 1.0 / libm::tgamma(d);
    let tail_mass_bound = c * c * libm::pow(m as f64, 2.0 * d - 1.0) / (1.0 - 2.0 * d);
    Ok(CoefficientSeq {
        kind: CoefficientKind::Farima { d },
        values,
        tail_exponent: Some(1.0 - d),
        tail_mass_bound,
    })
}

/// `a_0 = 1`, `a_i = scale * i^-alpha` for `1 <= i <= m`.
pub fn power_law_coefficients(alpha: f64, scale: f64, m: usize) -> Result<CoefficientSeq> {
    check_range(
        "alpha",
        alpha,
        alpha > 0.5 && alpha < 1.0,
        "alpha in (1/2, 1)",
    )?;
    check_range("scale", scale, scale > 0.0, "scale > 0")?;
    if m < 1 {
        return Err(Error::InvalidParameter {
            name: "m",
            value: m as f64,
            expected: "m >= 1",
        });
    }
    let mut values = Vec::with_capacity(m + 1);
    values.push(1.0);
    values.extend((1..=m).map(|i| scale * libm::pow(i as f64, -alpha)));
    let tail_mass_bound =
        scale * scale * libm::pow(m as f64, 1.0 - 2.0 * alpha) / (2.0 * alpha - 1.0);
    Ok(CoefficientSeq {
        kind: CoefficientKind::PowerLaw { alpha, scale },
        values,
        tail_exponent: Some(alpha),
        tail_mass_bound,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MemoryClass {
    Long,
    Short,
    ShortDegenerate,
}

/// Long memory for the FARIMA and power-law families (non-summable by
/// construction); for an explicit list, short unless the coefficients sum to 0.
pub fn classify_memory(coeffs: &CoefficientSeq) -> MemoryClass {
    match coeffs.kind {
        CoefficientKind::Farima { .. } | CoefficientKind::PowerLaw { .. } => MemoryClass::Long,
        CoefficientKind::Finite => {
            let sum: f64 = coeffs.values.iter().sum();
            let scale: f64 = coeffs.values.iter().map(|a| a.abs()).sum();
            if sum.abs() <= 1e-12 * scale {
                MemoryClass::ShortDegenerate
            } else {
                MemoryClass::Short
            }
        }
    }
}

/// Weights `b_{n,i}` for `i = -m..=n` and the derived normalizers.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialSumWeights {
    n: usize,
    m: usize,
    b: Vec<f64>,
    bn2: f64,
    b_sup: f64,
    eps_n: f64,
    d_rho: f64,
    tail_mass_bound: f64,
}

/// JSON summary `{n, m, Bn2, b_sup, eps_n, tail_mass_bound}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightSummary {
    pub n: usize,
    pub m: usize,
    #[serde(rename = "Bn2")]
    pub bn2: f64,
    pub b_sup: f64,
    pub eps_n: f64,
    pub tail_mass_bound: f64,
}

impl PartialSumWeights {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// `b_{n,i}` for `i = -m..=n`, in that order.
    pub fn b(&self) -> &[f64] {
        &self.b
    }

    /// `b_{n,i}` for `-m <= i <= n`.
    pub fn weight(&self, i: i64) -> f64 {
        self.b[(i + self.m as i64) as usize]
    }

    /// `B_n^2 = sum b_{n,i}^2` over the truncated index set.
    pub fn bn2(&self) -> f64 {
        self.bn2
    }

    pub fn b_sup(&self) -> f64 {
        self.b_sup
    }

    /// `d_rho * b_sup / B_n`.
    pub fn eps_n(&self) -> f64 {
        self.eps_n
    }

    pub fn d_rho(&self) -> f64 {
        self.d_rho
    }

    /// Upper bound on the neglected `sum_{i < -m} b_{n,i}^2`.
    pub fn tail_mass_bound(&self) -> f64 {
        self.tail_mass_bound
    }

    pub fn summary(&self) -> WeightSummary {
        WeightSummary {
            n: self.n,
            m: self.m,
            bn2: self.bn2,
            b_sup: self.b_sup,
            eps_n: self.eps_n,
            tail_mass_bound: self.tail_mass_bound,
        }
    }
}

/// Partial-sum weights of `S_n` with the past truncated at `i = -m`.
pub fn partial_sum_weights(
    coeffs: &CoefficientSeq,
    n: usize,
    m: usize,
    d_rho: f64,
) -> Result<PartialSumWeights> {
    if n < 1 {
        return Err(Error::InvalidHorizon {
            n: 0,
            reason: "n must be at least 1",
        });
    }
    if m < n {
        return Err(Error::InvalidParameter {
            name: "m",
            value: m as f64,
            expected: "past depth m >= n",
        });
    }
    check_range("d_rho", d_rho, d_rho > 0.0, "d_rho > 0")?;
    let needed = n + m;
    if coeffs.kind != CoefficientKind::Finite && coeffs.truncation() < needed {
        return Err(Error::InsufficientCoverage {
            needed,
            available: coeffs.truncation(),
        });
    }

    // prefix[k] = a_0 + ... + a_{k-1}
    let mut prefix = Vec::with_capacity(needed + 2);
    let mut acc = 0.0;
    prefix.push(acc);
    for j in 0..=needed {
        acc += coeffs.get(j);
        prefix.push(acc);
    }

    let mut b = Vec::with_capacity(n + m + 1);
    for i in -(m as i64)..=(n as i64) {
        let hi = (n as i64 - i + 1) as usize;
        let w = if i > 0 {
            prefix[hi]
        } else {
            prefix[hi] - prefix[(1 - i) as usize]
        };
        b.push(w);
    }
    let bn2: f64 = b.iter().map(|w| w * w).sum();
    if bn2.is_nan() || bn2 <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "Bn2",
            value: bn2,
            expected: "a positive variance",
        });
    }
    let b_sup = b.iter().fold(0.0, |s: f64, w| s.max(w.abs()));
    let tail_mass_bound = neglected_past_bound(coeffs, n, m);
    Ok(PartialSumWeights {
        n,
        m,
        b,
        bn2,
        b_sup,
        eps_n: d_rho * b_sup / libm::sqrt(bn2),
        d_rho,
        tail_mass_bound,
    })
}

fn neglected_past_bound(coeffs: &CoefficientSeq, n: usize, m: usize) -> f64 {
    match coeffs.tail_envelope() {
        // b_{n,-k} = a_{k+1} + ... + a_{k+n} <= n C (k+1)^-alpha, then sum over k > m
        Some((c, alpha)) => {
            let nf = n as f64;
            nf * nf * c * c * libm::pow(m as f64 + 1.0, 1.0 - 2.0 * alpha) / (2.0 * alpha - 1.0)
        }
        None => {
            let len = coeffs.values.len();
            let mut total = 0.0;
            let mut k = m + 1;
            while k + 1 < len {
                let w: f64 = (k + 1..=k + n).map(|j| coeffs.get(j)).sum();
                total += w * w;
                k += 1;
            }
            total
        }
    }
}

/// Innovation sequences for [`simulate_normalized_sum`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Innovations {
    /// iid Rademacher signs.
    Rademacher,
    /// All innovations zero.
    Zero,
    /// Increments of a martingale model rescaled by `sqrt(model.n)` to unit
    /// conditional variance. The model horizon must equal `n + m + 1`.
    Martingale(MdsModel),
}

/// One draw of `sum_{i=-m}^{n} b_{n,i} e_i / B_n`.
pub fn simulate_normalized_sum(
    weights: &PartialSumWeights,
    innovations: &Innovations,
    seed: u64,
    path_index: u64,
) -> Result<f64> {
    let scale = 1.0 / libm::sqrt(weights.bn2);
    match innovations {
        Innovations::Zero => Ok(0.0),
        Innovations::Rademacher => {
            let stream = PathStream::new(seed, path_index);
            let mut sum = 0.0;
            for (block, chunk) in weights.b.chunks(64).enumerate() {
                let bits = stream.block(block as u64);
                for (k, w) in chunk.iter().enumerate() {
                    if (bits >> k) & 1 == 1 {
                        sum += w;
                    } else {
                        sum -= w;
                    }
                }
            }
            Ok(sum * scale)
        }
        Innovations::Martingale(model) => {
            if model.n() != weights.b.len() {
                return Err(Error::UnsupportedInnovations(
                    "martingale horizon must equal n + m + 1".to_string(),
                ));
            }
            if model.kind() == ModelKind::Tilted && model.delta() != 0.0 {
                return Err(Error::UnsupportedInnovations(
                    "tilted innovations do not have unit conditional variance".to_string(),
                ));
            }
            let unit = libm::sqrt(model.n() as f64);
            let mut sum = 0.0;
            let mut i = 0;
            model.for_each_increment(seed, path_index, |x| {
                sum += weights.b[i] * x * unit;
                i += 1;
            });
            Ok(sum * scale)
        }
    }
}

#[cfg(test)]
#[allow(clippy::excessive_precision)] // reference values keep all their digits
mod tests {
    use super::*;
    use alloc::vec;

    fn direct_weight(coeffs: &CoefficientSeq, n: usize, i: i64) -> f64 {
        let (lo, hi) = if i > 0 {
            (0, n as i64 - i)
        } else {
            (1 - i, n as i64 - i)
        };
        (lo..=hi).map(|j| coeffs.get(j as usize)).sum()
    }

    #[test]
    fn farima_basics() {
        let c = farima_coefficients(0.25, 10).unwrap();
        assert_eq!(c.values()[0], 1.0);
        assert_eq!(c.tail_exponent(), Some(0.75));
        for d in [0.05, 0.25, 0.49] {
            let c = farima_coefficients(d, 3).unwrap();
            assert!((c.values()[1] - d).abs() < 1e-16);
            for i in 1..=3 {
                let ratio = c.values()[i] / c.values()[i - 1];
                assert!((ratio - (i as f64 - 1.0 + d) / i as f64).abs() < 1e-15);
            }
        }
        assert!(farima_coefficients(0.5, 10).is_err());
        assert!(farima_coefficients(0.0, 10).is_err());
        assert!(farima_coefficients(0.2, 0).is_err());
    }

    #[test]
    fn farima_tail_constant() {
        // mpmath: a_{10^6} = Gamma(10^6 + 1/4) / (Gamma(1/4) Gamma(10^6 + 1))
        let c = farima_coefficients(0.25, 1_000_000).unwrap();
        let a = c.values()[1_000_000];
        assert!(
            ((a - 8.722_056_271_232_167_551e-6) / a).abs() < 1e-10,
            "{a}"
        );
        let scaled = a * libm::pow(1e6, 0.75);
        assert!((scaled - 0.275_815_636_972_489_981_299_478_2).abs() < 1e-10);
        assert!((scaled - 0.275_815_662_830_209_314_359_945_5).abs() < 1e-6);
    }

    #[test]
    fn power_law_values() {
        let c = power_law_coefficients(0.75, 1.0, 8).unwrap();
        assert_eq!(c.values()[0], 1.0);
        assert!((c.values()[4] - 0.353_553_390_593_273_8).abs() < 1e-15);
        assert!(power_law_coefficients(0.5, 1.0, 8).is_err());
        assert!(power_law_coefficients(1.0, 1.0, 8).is_err());
        assert!(power_law_coefficients(0.7, 0.0, 8).is_err());
        // partial sums keep growing
        let big = power_law_coefficients(0.75, 1.0, 2000).unwrap();
        let s1: f64 = big.values()[1..=1000].iter().sum();
        let s2: f64 = big.values()[1..=2000].iter().sum();
        assert!(s2 - s1 > 0.0);
        assert_eq!(classify_memory(&big), MemoryClass::Long);
    }

    #[test]
    fn memory_classes() {
        assert_eq!(
            classify_memory(&farima_coefficients(0.25, 4).unwrap()),
            MemoryClass::Long
        );
        assert_eq!(
            classify_memory(&CoefficientSeq::finite(vec![1.0, 0.0, 0.0]).unwrap()),
            MemoryClass::Short
        );
        assert_eq!(
            classify_memory(&CoefficientSeq::finite(vec![1.0, -1.0, 0.0]).unwrap()),
            MemoryClass::ShortDegenerate
        );
    }

    #[test]
    fn iid_weights() {
        let c = CoefficientSeq::finite(vec![1.0, 0.0, 0.0]).unwrap();
        let w = partial_sum_weights(&c, 5, 5, 1.0).unwrap();
        for i in -5..=5 {
            assert_eq!(w.weight(i), if i >= 1 { 1.0 } else { 0.0 });
        }
        assert_eq!(w.bn2(), 5.0);
        assert!((w.eps_n() - 1.0 / libm::sqrt(5.0)).abs() < 1e-16);
        let w2 = partial_sum_weights(&c, 5, 5, 2.5).unwrap();
        assert!((w2.eps_n() - 2.5 / libm::sqrt(5.0)).abs() < 1e-15);
        assert_eq!(w.tail_mass_bound(), 0.0);
    }

    #[test]
    fn degenerate_sum_weights() {
        let c = CoefficientSeq::finite(vec![1.0, -1.0]).unwrap();
        let w = partial_sum_weights(&c, 5, 5, 1.0).unwrap();
        assert_eq!(w.weight(5), 1.0);
        for i in 1..5 {
            assert_eq!(w.weight(i), 0.0);
        }
        assert_eq!(w.weight(0), -1.0);
        for i in -5..0 {
            assert_eq!(w.weight(i), 0.0);
        }
        assert_eq!(w.bn2(), 2.0);
    }

    #[test]
    fn prefix_weights_match_direct_sums() {
        let seqs = vec![
            farima_coefficients(0.3, 200).unwrap(),
            power_law_coefficients(0.8, 0.7, 200).unwrap(),
            CoefficientSeq::finite(vec![1.0, 0.5, -0.25, 0.125, 2.0]).unwrap(),
        ];
        for c in &seqs {
            for n in [1usize, 2, 17, 64] {
                let m = n + 3;
                let w = partial_sum_weights(c, n, m, 1.0).unwrap();
                for i in -(m as i64)..=(n as i64) {
                    let direct = direct_weight(c, n, i);
                    assert!((w.weight(i) - direct).abs() < 1e-12, "n={n} i={i}");
                    if i < n as i64 {
                        let rec = w.weight(i + 1) + c.get((n as i64 - i) as usize)
                            - if i <= 0 { c.get((-i) as usize) } else { 0.0 };
                        assert!((w.weight(i) - rec).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_shallow_past_and_short_coefficients() {
        let c = farima_coefficients(0.25, 100).unwrap();
        assert!(matches!(
            partial_sum_weights(&c, 10, 9, 1.0),
            Err(Error::InvalidParameter { name: "m", .. })
        ));
        assert!(matches!(
            partial_sum_weights(&c, 60, 60, 1.0),
            Err(Error::InsufficientCoverage { .. })
        ));
        assert!(partial_sum_weights(&c, 10, 10, 0.0).is_err());
    }

    #[test]
    fn scale_covariance() {
        let c = farima_coefficients(0.2, 400).unwrap();
        let base = partial_sum_weights(&c, 100, 300, 1.0).unwrap();
        for lambda in [0.5, 3.0] {
            let s = partial_sum_weights(&c.scaled(lambda).unwrap(), 100, 300, 1.0).unwrap();
            assert!((s.b_sup() - lambda * base.b_sup()).abs() < 1e-12 * s.b_sup());
            assert!((s.bn2() - lambda * lambda * base.bn2()).abs() < 1e-12 * s.bn2());
            assert!((s.eps_n() - base.eps_n()).abs() < 1e-13);
            for idx in 0..20 {
                let a = simulate_normalized_sum(&base, &Innovations::Rademacher, 4, idx).unwrap();
                let b = simulate_normalized_sum(&s, &Innovations::Rademacher, 4, idx).unwrap();
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn farima_bn2_order() {
        let slope = |n: usize| {
            let c = farima_coefficients(0.25, 2 * n).unwrap();
            partial_sum_weights(&c, n, n, 1.0).unwrap().bn2()
        };
        let (lo, hi) = (slope(1 << 12), slope(1 << 16));
        let s = libm::log2(hi / lo) / 4.0;
        assert!((1.45..=1.55).contains(&s), "{s}");
    }

    #[test]
    fn neglected_past_bound_holds() {
        let c = farima_coefficients(0.25, 50_000).unwrap();
        let (n, m) = (64usize, 256usize);
        let w = partial_sum_weights(&c, n, m, 1.0).unwrap();
        // direct sum over i in [-(50000 - n), -m) as a lower estimate of the neglected mass
        let mut neglected = 0.0;
        for k in (m + 1)..(50_000 - n) {
            let b: f64 = (k + 1..=k + n).map(|j| c.get(j)).sum();
            neglected += b * b;
        }
        assert!(neglected <= w.tail_mass_bound());
        let f =
            CoefficientSeq::finite(vec![1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625]).unwrap();
        let w = partial_sum_weights(&f, 2, 2, 1.0).unwrap();
        // i = -3: a_4 + a_5, i = -4: a_5 + a_6, i = -5: a_6
        let want =
            (0.0625f64 + 0.03125).powi(2) + (0.03125f64 + 0.015625).powi(2) + 0.015625f64.powi(2);
        assert!((w.tail_mass_bound() - want).abs() < 1e-16);
    }

    #[test]
    fn simulation_trivial_cases() {
        let c = CoefficientSeq::finite(vec![1.0]).unwrap();
        let w = partial_sum_weights(&c, 1, 1, 1.0).unwrap();
        for idx in 0..16 {
            let v = simulate_normalized_sum(&w, &Innovations::Rademacher, 1, idx).unwrap();
            assert!(v == 1.0 || v == -1.0);
        }
        assert_eq!(
            simulate_normalized_sum(&w, &Innovations::Zero, 1, 0).unwrap(),
            0.0
        );
    }

    #[test]
    fn simulation_is_deterministic() {
        let c = farima_coefficients(0.25, 200).unwrap();
        let w = partial_sum_weights(&c, 50, 100, 1.0).unwrap();
        let a = simulate_normalized_sum(&w, &Innovations::Rademacher, 9, 3).unwrap();
        let b = simulate_normalized_sum(&w, &Innovations::Rademacher, 9, 3).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn martingale_innovations() {
        let c = farima_coefficients(0.25, 40).unwrap();
        let w = partial_sum_weights(&c, 10, 20, 1.0).unwrap();
        let skew = MdsModel::skewed_violation(31, 0.2).unwrap();
        assert!(simulate_normalized_sum(&w, &Innovations::Martingale(skew), 1, 0).is_ok());
        let plain = MdsModel::scaled_rademacher(31).unwrap();
        let a = simulate_normalized_sum(&w, &Innovations::Martingale(plain), 1, 0).unwrap();
        let b = simulate_normalized_sum(&w, &Innovations::Rademacher, 1, 0).unwrap();
        assert!((a - b).abs() < 1e-12, "same signs, same sum");
        let tilted = MdsModel::tilted(31, 0.3).unwrap();
        assert!(simulate_normalized_sum(&w, &Innovations::Martingale(tilted), 1, 0).is_err());
        let wrong = MdsModel::scaled_rademacher(30).unwrap();
        assert!(simulate_normalized_sum(&w, &Innovations::Martingale(wrong), 1, 0).is_err());
    }

    #[test]
    fn json_summary_field_names() {
        let c = CoefficientSeq::finite(vec![1.0]).unwrap();
        let s = partial_sum_weights(&c, 3, 3, 1.0).unwrap().summary();
        let j = serde_json::to_string(&s).unwrap();
        for key in [
            "\"n\"",
            "\"m\"",
            "\"Bn2\"",
            "\"b_sup\"",
            "\"eps_n\"",
            "\"tail_mass_bound\"",
        ] {
            assert!(j.contains(key), "{j}");
        }
    }
}
