use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}", config_message(.line, .message))]
    Config { line: Option<usize>, message: String },
    #[error(transparent)]
    Core(#[from] afc_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{} design warning(s) escalated by --strict", .0.len())]
    Strict(Vec<String>),
}

fn config_message(line: &Option<usize>, message: &str) -> String {
    match line {
        Some(n) => format!("config line {n}: {message}"),
        None => format!("config: {message}"),
    }
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Core(afc_core::Error::Convergence { .. }) => 3,
            CliError::Core(_) => 2,
            CliError::Io { .. } => 1,
            CliError::Strict(_) => 4,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let conv = afc_core::Error::Convergence { iterations: 5, best: vec![1.0], best_objective: 0.1 };
        assert_eq!(CliError::from(conv).exit_code(), 3);
        assert_eq!(CliError::from(afc_core::Error::Domain("x".into())).exit_code(), 2);
        assert_eq!(CliError::Config { line: Some(3), message: "m".into() }.exit_code(), 2);
        assert_eq!(CliError::Strict(vec!["w".into()]).exit_code(), 4);
        let io = CliError::io("p", std::io::Error::other("no"));
        assert_eq!(io.exit_code(), 1);
        assert_eq!(CliError::Config { line: Some(3), message: "m".into() }.to_string(), "config line 3: m");
    }
}
