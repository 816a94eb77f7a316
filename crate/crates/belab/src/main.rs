use std::path::PathBuf;
use std::process::ExitCode;

use belab::output::DistanceRecord;
use belab::{run_experiment, CliError, ExperimentConfig};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "belab",
    version,
    about = "Numerical checks of martingale Berry-Esseen rates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Worker threads (results do not depend on it).
        #[arg(long, env = "BELAB_WORKERS")]
        workers: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory, overriding `output_dir`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print an exact distance as JSON.
    Oracle {
        #[command(subcommand)]
        which: Oracle,
    },
}

#[derive(Subcommand)]
enum Oracle {
    /// Distance of the normalized Rademacher sum from the binomial lattice.
    Rademacher {
        #[arg(long)]
        n: u64,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run {
            config,
            workers,
            seed,
            out,
        } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if workers.is_some() {
                cfg.workers = workers;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(o) = out {
                cfg.output_dir = o;
            }
            let report = run_experiment(&cfg)?;
            let files: Vec<_> = report
                .files
                .iter()
                .map(|p| p.display().to_string())
                .collect();
            let mut summary = serde_json::json!({
                "experiment": cfg.experiment,
                "seed": cfg.seed,
                "workers": report.workers,
                "files": files,
            });
            if let Some(fit) = &report.fit {
                summary["fit"] = serde_json::to_value(fit)?;
            }
            if let Some(e) = &report.enlargement {
                summary["max_abs_bracket_error"] = e.brackets.max_abs_bracket_error.into();
            }
            println!("{}", serde_json::to_string_pretty(&summary)?);
        }
        Command::Oracle {
            which: Oracle::Rademacher { n },
        } => {
            let r = belab_core::exact_rademacher_distance(n)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&DistanceRecord::new(n, &r))?
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
