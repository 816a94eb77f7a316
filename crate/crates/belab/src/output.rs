//! Artifact records and the files they are written to.

use std::fs;
use std::path::{Path, PathBuf};

use belab_core::{DistanceMethod, KolmogorovResult};
use serde::Serialize;

use crate::error::{CliError, Result};

/// One line of `rates.csv`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateRow {
    pub n: usize,
    pub method: DistanceMethod,
    /// Paths, Monte Carlo only.
    #[serde(rename = "M")]
    pub paths: Option<u64>,
    #[serde(rename = "D")]
    pub d: f64,
    pub dkw_band: Option<f64>,
    #[serde(rename = "sqrt_n_D")]
    pub sqrt_n_d: f64,
    pub eps_n: f64,
    pub delta_n: f64,
    pub seed: u64,
}

impl RateRow {
    pub fn new(n: usize, r: &KolmogorovResult, eps_n: f64, delta_n: f64, seed: u64) -> Self {
        RateRow {
            n,
            method: r.method,
            paths: r.sample_size,
            d: r.d,
            dkw_band: r.dkw_band,
            sqrt_n_d: (n as f64).sqrt() * r.d,
            eps_n,
            delta_n,
            seed,
        }
    }
}

/// `{method, n, N, d, band, argsup}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistanceRecord {
    pub method: DistanceMethod,
    pub n: u64,
    #[serde(rename = "N")]
    pub sample_size: Option<u64>,
    pub d: f64,
    pub band: Option<f64>,
    pub argsup: f64,
}

impl DistanceRecord {
    pub fn new(n: u64, r: &KolmogorovResult) -> Self {
        DistanceRecord {
            method: r.method,
            n,
            sample_size: r.sample_size,
            d: r.d,
            band: r.dkw_band,
            argsup: r.argsup,
        }
    }
}

/// Slopes of the weight normalizers against `n` (linear processes).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightOrders {
    #[serde(rename = "Bn2")]
    pub bn2: f64,
    pub b_sup: f64,
    pub eps_n: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitRecord {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    /// Smallest `c` with `D_n <= c (eps_n + delta_n)` on the grid.
    pub c_hat: f64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight_orders: Option<WeightOrders>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FunctionalRow {
    pub n: usize,
    pub p: f64,
    #[serde(rename = "M")]
    pub paths: u64,
    pub moment_bracket: f64,
    pub moment_max: f64,
    pub combined: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IndexedValue {
    pub index: i64,
    pub value: f64,
}

/// An output directory that records every file written to it.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    written: Vec<PathBuf>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).map_err(|source| CliError::Io {
            path: root.to_path_buf(),
            source,
        })?;
        Ok(OutputDir {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn into_files(self) -> Vec<PathBuf> {
        self.written
    }

    pub fn text(&mut self, name: &str, body: &str) -> Result<PathBuf> {
        let path = self.root.join(name);
        fs::write(&path, body).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        self.written.push(path.clone());
        Ok(path)
    }

    pub fn json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<PathBuf> {
        let mut body = serde_json::to_string_pretty(value)?;
        body.push('\n');
        self.text(name, &body)
    }

    pub fn csv<T: Serialize>(&mut self, name: &str, rows: &[T]) -> Result<PathBuf> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in rows {
            w.serialize(r)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| csv::Error::from(e.into_error()))?;
        self.text(name, &String::from_utf8_lossy(&bytes))
    }
}
