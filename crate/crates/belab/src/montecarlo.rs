//! Parallel sampling over path indices.
//!
//! Every path is a pure function of `(seed, path_index)`. Samples are
//! collected in path-index order and accumulators are formed over fixed
//! chunks of indices and merged in chunk order, so results do not depend on
//! the number of workers or on scheduling.

use belab_core::dist::kolmogorov_distance_in_place;
use belab_core::linproc::{simulate_normalized_sum, Innovations, PartialSumWeights};
use belab_core::rates::FunctionalAccumulator;
use belab_core::{enlarge_path, sample_path, Functionals, KolmogorovResult, MdsModel};
use rayon::prelude::*;

use crate::error::Result;

/// Paths per accumulator chunk. Part of the reproducibility contract.
pub const CHUNK: u64 = 4096;

#[derive(Debug)]
pub struct Sampler {
    pool: rayon::ThreadPool,
}

impl Sampler {
    pub fn new(workers: usize) -> Result<Self> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers.max(1))
            .build()?;
        Ok(Sampler { pool })
    }

    pub fn workers(&self) -> usize {
        self.pool.current_num_threads()
    }

    /// `f(0), ..., f(count - 1)` in index order.
    pub fn collect<T, F>(&self, count: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        self.pool
            .install(|| (0..count).into_par_iter().map(&f).collect())
    }

    /// Terminal values `X_n` of `count` paths.
    pub fn terminal_values(&self, model: &MdsModel, seed: u64, count: u64) -> Vec<f64> {
        self.collect(count, |i| model.path_summary(seed, i).x_n)
    }

    pub fn model_distance(
        &self,
        model: &MdsModel,
        seed: u64,
        count: u64,
    ) -> Result<KolmogorovResult> {
        let mut xs = self.terminal_values(model, seed, count);
        Ok(kolmogorov_distance_in_place(&mut xs)?)
    }

    /// Distance of the enlarged martingale `X_hat_N`, padding at `epsilon`.
    pub fn enlarged_distance(
        &self,
        model: &MdsModel,
        epsilon: f64,
        seed: u64,
        count: u64,
    ) -> Result<KolmogorovResult> {
        let xs: Vec<Result<f64>> = self.collect(count, |i| {
            let path = sample_path(model, seed, i);
            Ok(enlarge_path(&path, epsilon, seed, i)?.terminal())
        });
        let mut xs = xs.into_iter().collect::<Result<Vec<f64>>>()?;
        Ok(kolmogorov_distance_in_place(&mut xs)?)
    }

    /// Draws of `S_n / B_n`.
    pub fn linproc_values(
        &self,
        weights: &PartialSumWeights,
        innovations: &Innovations,
        seed: u64,
        count: u64,
    ) -> Result<Vec<f64>> {
        let xs: Vec<_> = self.collect(count, |i| {
            simulate_normalized_sum(weights, innovations, seed, i)
        });
        Ok(xs.into_iter().collect::<belab_core::Result<Vec<f64>>>()?)
    }

    pub fn linproc_distance(
        &self,
        weights: &PartialSumWeights,
        innovations: &Innovations,
        seed: u64,
        count: u64,
    ) -> Result<KolmogorovResult> {
        let mut xs = self.linproc_values(weights, innovations, seed, count)?;
        Ok(kolmogorov_distance_in_place(&mut xs)?)
    }

    /// Moment functionals over `count` paths, together with their terminal values.
    pub fn functionals(
        &self,
        model: &MdsModel,
        p: f64,
        seed: u64,
        count: u64,
    ) -> Result<(Functionals, Vec<f64>)> {
        let empty = FunctionalAccumulator::new(p)?;
        let chunks = count.div_ceil(CHUNK);
        let parts = self.collect(chunks, |c| {
            let mut acc = empty;
            let mut xs = Vec::with_capacity(CHUNK as usize);
            for i in c * CHUNK..((c + 1) * CHUNK).min(count) {
                let s = model.path_summary(seed, i);
                acc.push_summary(&s);
                xs.push(s.x_n);
            }
            (acc, xs)
        });
        let mut total = empty;
        let mut values = Vec::with_capacity(count as usize);
        for (acc, xs) in &parts {
            total.merge(acc);
            values.extend_from_slice(xs);
        }
        Ok((total.finish()?, values))
    }
}
