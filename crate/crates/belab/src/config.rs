//! Experiment configuration, read from a single JSON document.

use std::path::{Path, PathBuf};

use belab_core::linproc::{farima_coefficients, power_law_coefficients, CoefficientSeq};
use belab_core::{MdsModel, ModelKind};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Fewest Monte Carlo paths accepted for a sampled distance.
pub const MIN_PATHS: u64 = 1_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    MartingaleRate,
    LinprocRate,
    EnlargementCheck,
    Functionals,
}

/// How distances are computed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodChoice {
    /// Exact where the model admits it, Monte Carlo otherwise.
    #[default]
    Auto,
    MonteCarlo,
}

/// `delta` is either fixed or a power of the horizon, `coef * n^power`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DeltaSpec {
    Fixed(f64),
    Scaled { coef: f64, power: f64 },
}

impl Default for DeltaSpec {
    fn default() -> Self {
        DeltaSpec::Fixed(0.0)
    }
}

impl DeltaSpec {
    pub fn at(&self, n: usize) -> f64 {
        match *self {
            DeltaSpec::Fixed(d) => d,
            DeltaSpec::Scaled { coef, power } => coef * (n as f64).powf(power),
        }
    }
}

/// A model family without its horizon; instantiated at every grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelTemplate {
    pub kind: ModelKind,
    #[serde(default = "one")]
    pub rho: f64,
    #[serde(default)]
    pub eta: f64,
    #[serde(default)]
    pub delta: DeltaSpec,
    #[serde(default)]
    pub skew: f64,
}

impl ModelTemplate {
    pub fn at(&self, n: usize) -> Result<MdsModel> {
        Ok(MdsModel::new(
            self.kind,
            n,
            self.rho,
            self.eta,
            self.delta.at(n),
            self.skew,
        )?)
    }

    /// Whether the exact binomial lattice applies regardless of `n`.
    pub fn is_rademacher(&self) -> bool {
        self.kind == ModelKind::ScaledRademacher
            || (self.kind == ModelKind::Tilted && self.delta == DeltaSpec::Fixed(0.0))
            || (self.kind == ModelKind::PairCompensated && self.eta == 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CoefficientSpec {
    Farima {
        d: f64,
    },
    PowerLaw {
        alpha: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    Finite {
        values: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinprocSpec {
    #[serde(flatten)]
    pub coefficients: CoefficientSpec,
    /// Past depth as a multiple of `n`: the sum starts at `i = -past_factor * n`.
    #[serde(default = "default_past_factor")]
    pub past_factor: usize,
}

impl LinprocSpec {
    pub fn past_depth(&self, n: usize) -> usize {
        self.past_factor * n
    }

    /// Coefficients covering every lag the weights at horizon `n` need.
    pub fn coefficients_for(&self, n: usize) -> Result<CoefficientSeq> {
        let lags = n + self.past_depth(n);
        Ok(match &self.coefficients {
            CoefficientSpec::Farima { d } => farima_coefficients(*d, lags)?,
            CoefficientSpec::PowerLaw { alpha, scale } => {
                power_law_coefficients(*alpha, *scale, lags)?
            }
            CoefficientSpec::Finite { values } => CoefficientSeq::finite(values.clone())?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelTemplate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linproc: Option<LinprocSpec>,
    #[serde(default)]
    pub n_grid: Vec<usize>,
    #[serde(default = "default_paths")]
    pub paths: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one")]
    pub p: f64,
    #[serde(default = "one")]
    pub d_rho: f64,
    /// Worker threads; never echoed since results do not depend on it.
    #[serde(default, skip_serializing)]
    pub workers: Option<usize>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub method: MethodChoice,
    /// Random brackets drawn by `enlargement-check`.
    #[serde(default = "default_brackets")]
    pub brackets: u64,
    /// Fixed padding scale for `enlargement-check`; random in `(0, 1/2]` if absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Also export coefficient and weight tables (`linproc-rate`).
    #[serde(default)]
    pub tables: bool,
}

fn one() -> f64 {
    1.0
}

fn default_past_factor() -> usize {
    4
}

fn default_paths() -> u64 {
    10_000
}

fn default_brackets() -> u64 {
    1_000
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("belab-out")
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    fn invalid(msg: impl Into<String>) -> CliError {
        CliError::Config(msg.into())
    }

    /// Whether grid point `n` is computed by Monte Carlo.
    pub fn uses_monte_carlo(&self, n: usize) -> bool {
        match self.experiment {
            ExperimentKind::LinprocRate => true,
            ExperimentKind::EnlargementCheck => false,
            ExperimentKind::MartingaleRate | ExperimentKind::Functionals => {
                let rademacher = self
                    .model
                    .as_ref()
                    .is_some_and(ModelTemplate::is_rademacher);
                self.method == MethodChoice::MonteCarlo
                    || (!rademacher && n > belab_core::dist::MAX_ENUMERATION_HORIZON)
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Self::invalid("n_grid must be strictly increasing"));
        }
        if self.n_grid.first() == Some(&0) {
            return Err(Self::invalid("n_grid entries must be at least 1"));
        }
        if self.p.is_nan() || self.p < 1.0 || self.p.is_infinite() {
            return Err(Self::invalid("p must be a finite number >= 1"));
        }
        if self.d_rho <= 0.0 || !self.d_rho.is_finite() {
            return Err(Self::invalid("d_rho must be positive"));
        }
        if self.workers == Some(0) {
            return Err(Self::invalid("workers must be at least 1"));
        }
        let rate = self.experiment != ExperimentKind::EnlargementCheck;
        if rate && self.n_grid.len() < 3 {
            return Err(Self::invalid(
                "a rate fit needs at least 3 horizons in n_grid",
            ));
        }
        match self.experiment {
            ExperimentKind::MartingaleRate | ExperimentKind::Functionals => {
                let Some(t) = &self.model else {
                    return Err(Self::invalid("this experiment needs a `model`"));
                };
                for &n in &self.n_grid {
                    t.at(n)?;
                }
            }
            ExperimentKind::LinprocRate => {
                let Some(l) = &self.linproc else {
                    return Err(Self::invalid("linproc-rate needs a `linproc` block"));
                };
                if l.past_factor < 1 {
                    return Err(Self::invalid("past_factor must be at least 1"));
                }
                // validates the coefficient parameters
                l.coefficients_for(1)?;
            }
            ExperimentKind::EnlargementCheck => {
                if self.brackets == 0 {
                    return Err(Self::invalid("brackets must be at least 1"));
                }
                if let Some(e) = self.epsilon {
                    if !(e > 0.0 && e <= 0.5) {
                        return Err(Self::invalid("epsilon must lie in (0, 1/2]"));
                    }
                }
                if let Some(t) = &self.model {
                    for &n in &self.n_grid {
                        t.at(n)?;
                    }
                }
            }
        }
        let sampled = match self.experiment {
            ExperimentKind::Functionals => true,
            ExperimentKind::EnlargementCheck => self.model.is_some() && !self.n_grid.is_empty(),
            _ => self.n_grid.iter().any(|&n| self.uses_monte_carlo(n)),
        };
        if sampled && self.paths < MIN_PATHS {
            return Err(Self::invalid(format!(
                "paths must be at least {MIN_PATHS} for Monte Carlo, got {}",
                self.paths
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<ExperimentConfig> {
        ExperimentConfig::from_json(s)
    }

    #[test]
    fn minimal_rate_config() {
        let c = parse(
            r#"{"experiment":"martingale-rate","model":{"kind":"scaled-rademacher"},
                "n_grid":[256,1024,4096]}"#,
        )
        .unwrap();
        assert_eq!(c.paths, 10_000);
        assert_eq!(c.p, 1.0);
        assert!(!c.uses_monte_carlo(4096));
    }

    #[test]
    fn scaled_delta() {
        let c = parse(
            r#"{"experiment":"martingale-rate","n_grid":[64,256,1024],
                "model":{"kind":"tilted","delta":{"coef":1.0,"power":-0.5}}}"#,
        )
        .unwrap();
        let m = c.model.unwrap().at(256).unwrap();
        assert_eq!(m.delta(), 0.0625);
        assert!(c.uses_monte_carlo(64));
    }

    #[test]
    fn rejections() {
        let bad = [
            r#"{"experiment":"martingale-rate","model":{"kind":"scaled-rademacher"},"n_grid":[8,4,16]}"#,
            r#"{"experiment":"martingale-rate","model":{"kind":"scaled-rademacher"},"n_grid":[4,8]}"#,
            r#"{"experiment":"martingale-rate","n_grid":[4,8,16]}"#,
            r#"{"experiment":"martingale-rate","model":{"kind":"tilted","delta":0.3},"n_grid":[64,128,256],"paths":10}"#,
            r#"{"experiment":"martingale-rate","model":{"kind":"pair-compensated","eta":0.2},"n_grid":[4,7,16]}"#,
            r#"{"experiment":"linproc-rate","linproc":{"kind":"farima","d":0.7},"n_grid":[4,8,16]}"#,
            r#"{"experiment":"nope"}"#,
            r#"{"experiment":"enlargement-check","typo":1}"#,
            r#"{"experiment":"enlargement-check","epsilon":0.9}"#,
        ];
        for s in bad {
            assert!(
                matches!(parse(s), Err(CliError::Config(_) | CliError::Core(_))),
                "{s}"
            );
        }
    }

    #[test]
    fn linproc_block() {
        let c = parse(
            r#"{"experiment":"linproc-rate","linproc":{"kind":"farima","d":0.25},
                "n_grid":[16,32,64]}"#,
        )
        .unwrap();
        let l = c.linproc.unwrap();
        assert_eq!(l.past_depth(16), 64);
        assert_eq!(l.coefficients_for(16).unwrap().truncation(), 80);
    }

    #[test]
    fn echo_omits_workers() {
        let c = parse(r#"{"experiment":"enlargement-check","workers":3}"#).unwrap();
        assert_eq!(c.workers, Some(3));
        let v = serde_json::to_value(&c).unwrap();
        assert!(v.get("workers").is_none());
        assert_eq!(v["seed"], 0);
    }
}
