//! Library side of the `cuspwave` command-line tool. Each subcommand is a
//! function taking a resolved [`RunConfig`] and writing its artifacts into
//! the configured output directory.

pub mod config;
pub mod data_cmd;
pub mod opalg_cmd;
pub mod probe_cmd;
pub mod rates;
pub mod solve;

use thiserror::Error;

pub use config::RunConfig;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] cuspwave::Error),
    #[error(transparent)]
    Opalg(#[from] cuspwave_opalg::OpalgError),
    #[error("no convergence: {0}")]
    NonConvergence(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        use cuspwave::Error as E;
        match self {
            CliError::Config(_) | CliError::Opalg(_) | CliError::Io { .. } => 2,
            CliError::Core(e) => match e {
                E::Kummer(_) | E::Quadrature(_) | E::UndefinedRatio => 3,
                _ => 2,
            },
            CliError::NonConvergence(_) => 3,
            CliError::Verification(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        use cuspwave::Error as E;
        match self {
            CliError::Config(_) => "config",
            CliError::Opalg(_) => "opalg",
            CliError::Io { .. } => "io",
            CliError::NonConvergence(_) => "non-convergence",
            CliError::Verification(_) => "verification",
            CliError::Core(e) => match e {
                E::Kummer(_) => "kummer",
                E::Parameter(_) => "parameter",
                E::Domain(_) => "domain",
                E::GridMismatch(_) => "grid-mismatch",
                E::Dimension(_) => "dimension",
                E::Quadrature(_) => "quadrature",
                E::UndefinedRatio => "undefined-ratio",
                E::Format(_) => "format",
                E::Io(_) => "io",
            },
        }
    }

    /// One JSON object on a single line.
    pub fn json_line(&self, command: &str) -> String {
        serde_json::json!({
            "level": "error",
            "command": command,
            "kind": self.kind(),
            "exit_code": self.exit_code(),
            "message": self.to_string(),
        })
        .to_string()
    }
}

pub fn warning_line(command: &str, message: &str) -> String {
    serde_json::json!({
        "level": "warning",
        "command": command,
        "message": message,
    })
    .to_string()
}

/// Print warnings to stderr as JSON lines.
pub fn emit_warnings(command: &str, warnings: &[String]) {
    for w in warnings {
        eprintln!("{}", warning_line(command, w));
    }
}

pub(crate) fn write_file(path: &std::path::Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

pub(crate) fn create_dir(path: &std::path::Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Config("x".into()).exit_code(), 2);
        assert_eq!(CliError::Core(cuspwave::Error::Parameter("m".into())).exit_code(), 2);
        assert_eq!(CliError::Core(cuspwave::Error::UndefinedRatio).exit_code(), 3);
        assert_eq!(CliError::NonConvergence("x".into()).exit_code(), 3);
        assert_eq!(CliError::Verification("x".into()).exit_code(), 4);
    }

    #[test]
    fn error_record_is_one_json_line() {
        let e = CliError::Core(cuspwave::Error::Parameter("m must be at least 1".into()));
        let line = e.json_line("solve");
        assert!(!line.contains('\n'));
        let v: serde_json::Value = serde_json::from_str(&line).unwrap();
        assert_eq!(v["kind"], "parameter");
        assert_eq!(v["exit_code"], 2);
        assert_eq!(v["command"], "solve");
    }
}
