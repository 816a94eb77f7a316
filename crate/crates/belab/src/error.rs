use std::path::PathBuf;

use serde_json::json;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] belab_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("writing csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("writing json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("Monte Carlo distance is 0 at n = {n}; it cannot enter a log-log fit (raise paths)")]
    ZeroDistance { n: usize },
    #[error("worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

pub type Result<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) | CliError::Core(_) => "invalid-config",
            CliError::Io { .. } | CliError::Csv(_) | CliError::Json(_) => "io",
            CliError::ZeroDistance { .. } => "zero-distance",
            CliError::Pool(_) => "runtime",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind() {
            "invalid-config" => 2,
            "io" => 3,
            "zero-distance" => 4,
            _ => 1,
        }
    }

    /// The machine-readable form printed by the CLI.
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = json!({
            "error": {
                "kind": self.kind(),
                "message": self.to_string(),
            }
        });
        if let CliError::Io { path, .. } = self {
            v["error"]["path"] = json!(path);
        }
        if let CliError::ZeroDistance { n } = self {
            v["error"]["n"] = json!(n);
        }
        v
    }
}
