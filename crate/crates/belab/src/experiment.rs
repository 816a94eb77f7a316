//! The experiment runner behind `belab run`.

use std::path::PathBuf;

use belab_core::dist::enumerate_model_distance;
use belab_core::linproc::{classify_memory, Innovations, MemoryClass, WeightSummary};
use belab_core::rates::tightness_constant;
use belab_core::rng::PathStream;
use belab_core::{
    bound_curve, condition_report, enlarge_to_unit_variance, exact_rademacher_distance, fit_loglog,
    partial_sum_weights, sample_path, ConditionReport, DistanceMethod, EnlargedSequence,
    KolmogorovResult, MdsModel, ModelKind, RateFit,
};
use serde::Serialize;

use crate::config::{ExperimentConfig, ExperimentKind, ModelTemplate};
use crate::error::{CliError, Result};
use crate::montecarlo::Sampler;
use crate::output::{
    DistanceRecord, FitRecord, FunctionalRow, IndexedValue, OutputDir, RateRow, WeightOrders,
};
use crate::svg::{loglog_plot, Series};

const BRACKET_STREAM: u64 = 0x6272_6163;
const MAX_BRACKET_LEN: f64 = 64.0;

/// What a run produced, for callers that want more than the files.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub files: Vec<PathBuf>,
    pub rows: Vec<RateRow>,
    pub fit: Option<FitRecord>,
    pub functionals: Vec<FunctionalRow>,
    pub enlargement: Option<EnlargementReport>,
    pub workers: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BracketCheck {
    pub cases: u64,
    pub max_abs_bracket_error: f64,
    pub max_r: u64,
    /// `r <= floor(1 / eps^2)` in every case.
    pub r_bound_ok: bool,
    /// Every pad law has zero mean and third moment and meets the moment
    /// condition at the padding scale.
    pub pads_ok: bool,
    pub residual_below_eps: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelEnlargement {
    pub n: usize,
    pub kind: ModelKind,
    pub epsilon_n: f64,
    pub check: BracketCheck,
    pub distance: DistanceRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnlargementReport {
    pub seed: u64,
    pub brackets: BracketCheck,
    pub models: Vec<ModelEnlargement>,
    pub examples: Vec<EnlargedSequence>,
}

#[derive(Debug, Clone, Copy)]
struct CaseOutcome {
    error: f64,
    r: u64,
    r_ok: bool,
    pads_ok: bool,
    residual_ok: bool,
}

impl CaseOutcome {
    fn of(e: &EnlargedSequence, epsilon_n: f64, rho: f64) -> Self {
        let eps = e.pad_scale;
        CaseOutcome {
            error: (e.bracket_big_n - 1.0).abs(),
            r: e.r,
            r_ok: e.r as f64 <= (1.0 / (eps * eps)).floor(),
            pads_ok: e.pads_satisfy_conditions(epsilon_n, rho),
            residual_ok: e.residual_step < eps,
        }
    }
}

fn summarize(outcomes: &[CaseOutcome]) -> BracketCheck {
    BracketCheck {
        cases: outcomes.len() as u64,
        max_abs_bracket_error: outcomes.iter().map(|o| o.error).fold(0.0, f64::max),
        max_r: outcomes.iter().map(|o| o.r).max().unwrap_or(0),
        r_bound_ok: outcomes.iter().all(|o| o.r_ok),
        pads_ok: outcomes.iter().all(|o| o.pads_ok),
        residual_below_eps: outcomes.iter().all(|o| o.residual_ok),
    }
}

/// Random non-decreasing bracket and padding scale for case `index`.
pub fn random_bracket(seed: u64, index: u64, epsilon: Option<f64>) -> (Vec<f64>, f64) {
    let s = PathStream::new(seed, index).substream(BRACKET_STREAM);
    let len = 1 + (s.uniform(0) * MAX_BRACKET_LEN) as usize;
    // total variance roughly uniform on (0, 2): both sides of 1 get covered
    let span = 2.0 * s.uniform(1);
    let eps = epsilon.unwrap_or_else(|| (0.5 * (1.0 - s.uniform(2))).max(1e-6));
    let mut acc = 0.0;
    let bracket = (0..len)
        .map(|k| {
            acc += s.uniform(3 + k as u64) * 2.0 * span / len as f64;
            acc
        })
        .collect();
    (bracket, eps)
}

fn resolve_workers(cfg: &ExperimentConfig) -> usize {
    cfg.workers.unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    })
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let sampler = Sampler::new(resolve_workers(cfg))?;
    let mut out = OutputDir::create(&cfg.output_dir)?;
    let mut report = match cfg.experiment {
        ExperimentKind::MartingaleRate | ExperimentKind::Functionals => {
            martingale_rate(cfg, &sampler, &mut out)?
        }
        ExperimentKind::LinprocRate => linproc_rate(cfg, &sampler, &mut out)?,
        ExperimentKind::EnlargementCheck => enlargement_check(cfg, &sampler, &mut out)?,
    };
    out.json("config-echo.json", cfg)?;
    report.workers = sampler.workers();
    report.files = out.into_files();
    Ok(report)
}

/// Exact distance when the model admits one.
pub fn exact_distance(template: &ModelTemplate, model: &MdsModel) -> Result<KolmogorovResult> {
    if template.is_rademacher() {
        Ok(exact_rademacher_distance(model.n() as u64)?)
    } else {
        Ok(enumerate_model_distance(model)?)
    }
}

fn martingale_rate(
    cfg: &ExperimentConfig,
    sampler: &Sampler,
    out: &mut OutputDir,
) -> Result<Report> {
    let template = cfg.model.expect("validated");
    let mut report = Report::default();
    let mut distances = Vec::new();
    let mut conditions = Vec::new();
    for &n in &cfg.n_grid {
        let model = template.at(n)?;
        let cond = condition_report(&model);
        let mut sampled = None;
        if cfg.experiment == ExperimentKind::Functionals {
            let (f, xs) = sampler.functionals(&model, cfg.p, cfg.seed, cfg.paths)?;
            report.functionals.push(FunctionalRow {
                n,
                p: cfg.p,
                paths: cfg.paths,
                moment_bracket: f.moment_bracket,
                moment_max: f.moment_max,
                combined: f.combined,
                seed: cfg.seed,
            });
            sampled = Some(xs);
        }
        let dist = if cfg.uses_monte_carlo(n) {
            let mut xs = match sampled {
                Some(xs) => xs,
                None => sampler.terminal_values(&model, cfg.seed, cfg.paths),
            };
            belab_core::dist::kolmogorov_distance_in_place(&mut xs)?
        } else {
            exact_distance(&template, &model)?
        };
        if dist.d <= 0.0 {
            return Err(CliError::ZeroDistance { n });
        }
        report.rows.push(RateRow::new(
            n,
            &dist,
            cond.epsilon_n,
            cond.delta_n,
            cfg.seed,
        ));
        distances.push(DistanceRecord::new(n as u64, &dist));
        conditions.push(ConditionEntry { n, report: cond });
    }
    let fit = fit_rows(&report.rows, cfg.seed, None)?;
    out.csv("rates.csv", &report.rows)?;
    out.json("fit.json", &fit)?;
    out.json("distances.json", &distances)?;
    out.json("conditions.json", &conditions)?;
    if !report.functionals.is_empty() {
        out.csv("functionals.csv", &report.functionals)?;
    }
    out.text(
        "plot.svg",
        &rate_plot(
            &format!("{} (seed {})", template.kind, cfg.seed),
            &report.rows,
            fit.c_hat,
        )?,
    )?;
    report.fit = Some(fit);
    Ok(report)
}

#[derive(Debug, Serialize)]
struct ConditionEntry {
    n: usize,
    #[serde(flatten)]
    report: ConditionReport,
}

fn fit_rows(rows: &[RateRow], seed: u64, weight_orders: Option<WeightOrders>) -> Result<FitRecord> {
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.d)).collect();
    let RateFit {
        slope,
        intercept,
        r2,
        ..
    } = fit_loglog(&points)?;
    let d: Vec<f64> = rows.iter().map(|r| r.d).collect();
    let eps: Vec<f64> = rows.iter().map(|r| r.eps_n).collect();
    let delta: Vec<f64> = rows.iter().map(|r| r.delta_n).collect();
    Ok(FitRecord {
        slope,
        intercept,
        r2,
        c_hat: tightness_constant(&d, &eps, &delta)?,
        seed,
        weight_orders,
    })
}

fn rate_plot(title: &str, rows: &[RateRow], c_hat: f64) -> Result<String> {
    let eps: Vec<f64> = rows.iter().map(|r| r.eps_n).collect();
    let delta: Vec<f64> = rows.iter().map(|r| r.delta_n).collect();
    let curve = bound_curve(&eps, &delta, c_hat)?;
    let measured = Series {
        label: "D_n".into(),
        points: rows.iter().map(|r| (r.n as f64, r.d)).collect(),
        color: "#1f4e9c",
        dashed: false,
        markers: true,
    };
    let bound = Series {
        label: format!("{c_hat:.3} (eps_n + delta_n)"),
        points: rows
            .iter()
            .zip(curve)
            .map(|(r, c)| (r.n as f64, c))
            .collect(),
        color: "#c0392b",
        dashed: true,
        markers: false,
    };
    Ok(loglog_plot(
        title,
        "n",
        "Kolmogorov distance",
        &[measured, bound],
    ))
}

#[derive(Debug, Serialize)]
struct WeightEntry {
    #[serde(flatten)]
    summary: WeightSummary,
    memory: MemoryClass,
    seed: u64,
}

fn linproc_rate(cfg: &ExperimentConfig, sampler: &Sampler, out: &mut OutputDir) -> Result<Report> {
    let spec = cfg.linproc.as_ref().expect("validated");
    let mut report = Report::default();
    let mut summaries = Vec::new();
    for &n in &cfg.n_grid {
        let coeffs = spec.coefficients_for(n)?;
        let weights = partial_sum_weights(&coeffs, n, spec.past_depth(n), cfg.d_rho)?;
        let dist =
            sampler.linproc_distance(&weights, &Innovations::Rademacher, cfg.seed, cfg.paths)?;
        if dist.d <= 0.0 {
            return Err(CliError::ZeroDistance { n });
        }
        // iid innovations: the conditional variance of S_n / B_n is exactly 1
        report
            .rows
            .push(RateRow::new(n, &dist, weights.eps_n(), 0.0, cfg.seed));
        summaries.push(WeightEntry {
            summary: weights.summary(),
            memory: classify_memory(&coeffs),
            seed: cfg.seed,
        });
        if cfg.tables {
            let m = weights.m() as i64;
            let rows: Vec<IndexedValue> = weights
                .b()
                .iter()
                .enumerate()
                .map(|(k, &value)| IndexedValue {
                    index: k as i64 - m,
                    value,
                })
                .collect();
            out.csv(&format!("weights-{n}.csv"), &rows)?;
            if Some(&n) == cfg.n_grid.last() {
                let rows: Vec<IndexedValue> = coeffs
                    .values()
                    .iter()
                    .enumerate()
                    .map(|(j, &value)| IndexedValue {
                        index: j as i64,
                        value,
                    })
                    .collect();
                out.csv("coefficients.csv", &rows)?;
            }
        }
    }
    let slope_of = |f: fn(&WeightSummary) -> f64| -> Result<f64> {
        let pts: Vec<(f64, f64)> = summaries
            .iter()
            .map(|s| (s.summary.n as f64, f(&s.summary)))
            .collect();
        Ok(fit_loglog(&pts)?.slope)
    };
    let orders = WeightOrders {
        bn2: slope_of(|s| s.bn2)?,
        b_sup: slope_of(|s| s.b_sup)?,
        eps_n: slope_of(|s| s.eps_n)?,
    };
    let fit = fit_rows(&report.rows, cfg.seed, Some(orders))?;
    out.csv("rates.csv", &report.rows)?;
    out.json("fit.json", &fit)?;
    out.json("weights.json", &summaries)?;
    out.text(
        "plot.svg",
        &rate_plot(
            &format!("linear process (seed {})", cfg.seed),
            &report.rows,
            fit.c_hat,
        )?,
    )?;
    report.fit = Some(fit);
    Ok(report)
}

const EXAMPLES: usize = 5;

fn enlargement_check(
    cfg: &ExperimentConfig,
    sampler: &Sampler,
    out: &mut OutputDir,
) -> Result<Report> {
    let rho = cfg.model.map_or(1.0, |m| m.rho);
    let cases: Vec<Result<(CaseOutcome, EnlargedSequence)>> = sampler.collect(cfg.brackets, |i| {
        let (bracket, eps) = random_bracket(cfg.seed, i, cfg.epsilon);
        let e = enlarge_to_unit_variance(&bracket, eps)?;
        Ok((CaseOutcome::of(&e, eps, rho), e))
    });
    let cases = cases.into_iter().collect::<Result<Vec<_>>>()?;
    let outcomes: Vec<CaseOutcome> = cases.iter().map(|c| c.0).collect();
    let examples = cases.iter().take(EXAMPLES).map(|c| c.1).collect();

    let mut models = Vec::new();
    if let Some(template) = cfg.model {
        for &n in &cfg.n_grid {
            let model = template.at(n)?;
            let epsilon_n = condition_report(&model).epsilon_n;
            let per_path: Vec<Result<CaseOutcome>> = sampler.collect(cfg.paths, |i| {
                let path = sample_path(&model, cfg.seed, i);
                let e = enlarge_to_unit_variance(&path.bracket, epsilon_n)?;
                Ok(CaseOutcome::of(&e, epsilon_n, template.rho))
            });
            let per_path = per_path.into_iter().collect::<Result<Vec<_>>>()?;
            let dist = sampler.enlarged_distance(&model, epsilon_n, cfg.seed, cfg.paths)?;
            models.push(ModelEnlargement {
                n,
                kind: template.kind,
                epsilon_n,
                check: summarize(&per_path),
                distance: DistanceRecord::new(n as u64, &dist),
            });
        }
    }
    let report = EnlargementReport {
        seed: cfg.seed,
        brackets: summarize(&outcomes),
        models,
        examples,
    };
    out.json("enlargement.json", &report)?;
    Ok(Report {
        enlargement: Some(report),
        ..Report::default()
    })
}

/// Method a grid point will use, for display.
pub fn planned_method(cfg: &ExperimentConfig, n: usize) -> DistanceMethod {
    if cfg.uses_monte_carlo(n) {
        DistanceMethod::MonteCarlo
    } else if cfg.model.is_some_and(|t| t.is_rademacher()) {
        DistanceMethod::ExactBinomial
    } else {
        DistanceMethod::ExactEnumeration
    }
}
