use engine::{EngineError, ValidationError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{origin}:{line}:{col}: {msg}")]
    Parse {
        origin: String,
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("--set {arg}: {msg}")]
    Override { arg: String, msg: String },
    #[error("--sweep {arg}: {msg}")]
    Sweep { arg: String, msg: String },
    #[error("no scenario file or built-in named '{0}'")]
    NotFound(String),
    #[error("{}: {}", .0.assumption(), .0)]
    Validation(#[from] ValidationError),
    #[error("agent {agent}: {msg}")]
    Agent { agent: usize, msg: String },
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_DIVERGENCE: i32 = 3;
pub const EXIT_NOT_PASSIVE: i32 = 4;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Engine(EngineError::Divergence { .. }) => EXIT_DIVERGENCE,
            _ => EXIT_VALIDATION,
        }
    }

    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
