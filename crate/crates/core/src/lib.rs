//! Core algorithms for checking martingale Berry-Esseen rates numerically.
//!
//! The crate is `no_std` (it needs `alloc`) and performs no IO. It provides:
//!
//! * [`model`]: martingale-difference families with closed-form conditional
//!   laws, path sampling and exact certification of the moment conditions.
//! * [`linproc`]: coefficient sequences of causal linear processes, the
//!   partial-sum weights `b_{n,i}` and simulation of `S_n / B_n`.
//! * [`dist`]: the Kolmogorov distance to the standard normal, exactly (binomial
//!   lattice, brute-force enumeration) or from samples with a DKW band.
//! * [`enlarge`]: completion of a martingale to unit conditional variance by
//!   stopping and padding with scaled Rademacher steps.
//! * [`rates`]: log-log rate fits, bound curves and moment functionals.
//!
//! Randomness is counter-based ([`rng::PathStream`]) so that every path is a
//! pure function of `(seed, path_index)`.
#![no_std]
#![deny(missing_debug_implementations)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod binomial;
pub mod dist;
pub mod enlarge;
mod error;
pub mod linproc;
pub mod model;
pub mod normal;
pub mod rates;
pub mod rng;

pub use dist::{
    dkw_band, enumerate_model_distance, exact_rademacher_distance, kolmogorov_distance,
    DistanceMethod, KolmogorovResult,
};
pub use enlarge::{enlarge_path, enlarge_to_unit_variance, EnlargedPath, EnlargedSequence};
pub use error::{Error, Result};
pub use linproc::{
    classify_memory, farima_coefficients, partial_sum_weights, power_law_coefficients,
    simulate_normalized_sum, CoefficientKind, CoefficientSeq, Innovations, MemoryClass,
    PartialSumWeights,
};
pub use model::{
    condition_report, sample_path, ConditionReport, MartingalePath, MdsModel, ModelKind,
    PathSummary, StepLaw,
};
pub use normal::std_normal_cdf;
pub use rates::{bound_curve, fit_loglog, theorem2_functionals, Functionals, RateFit};
