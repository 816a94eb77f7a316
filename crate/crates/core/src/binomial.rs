//! Binomial probabilities accurate over the whole lattice.
//!
//! Small `n` use the exact multiplicative recursion from `k = 0`. Large `n`
//! use Loader's saddle-point form, which evaluates each mass in the log domain
//! through the Stirling error `stirlerr` and the deviance term `bd0`, so no
//! large log-factorials are ever subtracted.

use alloc::vec::Vec;
use core::f64::consts::PI;

/// Above this horizon the log-domain form is used.
pub const RECURSION_LIMIT: u64 = 1000;

// lgamma(n + 1) - (n + 1/2) ln n + n - ln sqrt(2 pi), n = 0..=15
const STIRLERR_TABLE: [f64; 16] = [
    0.0,
    0.081_061_466_795_327_26,
    0.041_340_695_955_409_3,
    0.027_677_925_684_998_34,
    0.020_790_672_103_765_093,
    0.016_644_691_189_821_193,
    0.013_876_128_823_070_748,
    0.011_896_709_945_891_77,
    0.010_411_265_261_972_096,
    0.009_255_462_182_712_733,
    0.008_330_563_433_362_87,
    0.007_573_675_487_951_841,
    0.006_942_840_107_209_53,
    0.006_408_994_188_004_207,
    0.005_951_370_112_758_847_5,
    0.005_554_733_551_962_801,
];

/// Error of Stirling's approximation to `ln n!` for integer `n`.
pub fn stirlerr(n: u64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    if n <= 15 {
        return STIRLERR_TABLE[n as usize];
    }
    let n = n as f64;
    let nn = n * n;
    if n > 500.0 {
        (S0 - S1 / nn) / n
    } else if n > 80.0 {
        (S0 - (S1 - S2 / nn) / nn) / n
    } else if n > 35.0 {
        (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / n
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / n
    }
}

/// Deviance term `x ln(x / np) + np - x`, stable when `x` is close to `np`.
pub fn bd0(x: f64, np: f64) -> f64 {
    if (x - np).abs() < 0.1 * (x + np) {
        let v = (x - np) / (x + np);
        let mut s = (x - np) * v;
        let mut ej = 2.0 * x * v;
        let v2 = v * v;
        let mut j = 1;
        loop {
            ej *= v2;
            let s1 = s + ej / (2 * j + 1) as f64;
            if s1 == s {
                return s1;
            }
            s = s1;
            j += 1;
        }
    }
    x * libm::log(x / np) + np - x
}

/// `P(K = k)` for `K ~ Binomial(n, p)`, via the saddle-point form.
pub fn pmf(k: u64, n: u64, p: f64) -> f64 {
    let q = 1.0 - p;
    if k > n {
        return 0.0;
    }
    if k == 0 {
        return libm::exp(n as f64 * libm::log(q));
    }
    if k == n {
        return libm::exp(n as f64 * libm::log(p));
    }
    let (kf, nf) = (k as f64, n as f64);
    let lc = stirlerr(n) - stirlerr(k) - stirlerr(n - k) - bd0(kf, nf * p) - bd0(nf - kf, nf * q);
    let lf = libm::log(2.0 * PI) + libm::log(kf) + libm::log1p(-kf / nf);
    libm::exp(lc - 0.5 * lf)
}

/// Masses of `Binomial(n, 1/2)` for `k = 0..=n/2` (the lower half).
pub fn half_pmf_lower(n: u64) -> Vec<f64> {
    let half = n / 2;
    let mut out = Vec::with_capacity(half as usize + 1);
    if n <= RECURSION_LIMIT {
        let mut v = libm::ldexp(1.0, -(n as i32));
        out.push(v);
        for k in 0..half {
            v *= (n - k) as f64 / (k + 1) as f64;
            out.push(v);
        }
    } else {
        out.extend((0..=half).map(|k| pmf(k, n, 0.5)));
    }
    out
}

/// CDF `P(K <= k)` of `Binomial(n, 1/2)` for all `k = 0..=n`.
///
/// Masses are accumulated from the nearer tail: ascending for `k <= n/2`, and
/// `1 - P(K <= n - k - 1)` by symmetry above the middle.
pub fn symmetric_cdf(n: u64) -> Vec<f64> {
    let lower = half_pmf_lower(n);
    let mut tail = Vec::with_capacity(lower.len());
    let mut acc = 0.0;
    for &m in &lower {
        acc += m;
        tail.push(acc);
    }
    (0..=n)
        .map(|k| {
            if 2 * k <= n {
                tail[k as usize]
            } else if k == n {
                1.0
            } else {
                1.0 - tail[(n - k - 1) as usize]
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact_pmf(k: u64, n: u64) -> f64 {
        // C(n, k) / 2^n in integers, n <= 60
        let mut c: u128 = 1;
        for i in 0..k {
            c = c * u128::from(n - i) / u128::from(i + 1);
        }
        c as f64 / (1u128 << n) as f64
    }

    #[test]
    fn saddle_point_matches_exact_for_moderate_n() {
        for n in [1u64, 2, 5, 16, 33, 60] {
            for k in 0..=n {
                let want = exact_pmf(k, n);
                let got = pmf(k, n, 0.5);
                assert!(
                    ((got - want) / want).abs() < 1e-13,
                    "n={n} k={k} {got} {want}"
                );
            }
        }
    }

    #[test]
    fn both_routes_agree_at_the_switch() {
        let n = RECURSION_LIMIT;
        let rec = half_pmf_lower(n);
        for (k, &r) in rec.iter().enumerate() {
            let s = pmf(k as u64, n, 0.5);
            if r > 1e-280 {
                assert!(((r - s) / r).abs() < 1e-12, "k={k}: {r} vs {s}");
            }
        }
    }

    #[test]
    fn cdf_is_symmetric_and_ends_at_one() {
        for n in [1u64, 2, 3, 4, 7, 64, 1001, 4096] {
            let cdf = symmetric_cdf(n);
            assert_eq!(cdf.len() as u64, n + 1);
            assert!((cdf[n as usize] - 1.0).abs() < 1e-12);
            for k in 0..n {
                let s = cdf[k as usize] + cdf[(n - k - 1) as usize];
                assert!((s - 1.0).abs() < 1e-12, "n={n} k={k}");
                assert!(cdf[k as usize] <= cdf[k as usize + 1]);
            }
        }
    }

    #[test]
    fn binomial_4() {
        let cdf = symmetric_cdf(4);
        let want = [1.0, 5.0, 11.0, 15.0, 16.0].map(|v: f64| v / 16.0);
        for (g, w) in cdf.iter().zip(want) {
            assert!((g - w).abs() < 1e-16);
        }
    }
}
