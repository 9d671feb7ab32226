use std::fmt;
use std::path::{Path, PathBuf};

use gazeforge_core::ConfigViolation;

/// Pipeline stage an error is attributed to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Extraction,
    Calibration,
    Resampling,
    Normalization,
    Slicing,
    Export,
    Evaluation,
    Matched,
    Schedule,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Stage::Config => "config",
            Stage::Extraction => "extraction",
            Stage::Calibration => "calibration",
            Stage::Resampling => "resampling",
            Stage::Normalization => "normalization",
            Stage::Slicing => "slicing",
            Stage::Export => "export",
            Stage::Evaluation => "evaluation",
            Stage::Matched => "matched",
            Stage::Schedule => "schedule",
        };
        f.write_str(name)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Bad or missing input file, malformed rows, invalid flags.
    #[error("[{stage}] {}: {message}", path.display())]
    Input { stage: Stage, path: PathBuf, message: String },

    #[error("[config] {}: {}", path.display(), join_violations(violations))]
    Config { path: PathBuf, violations: Vec<ConfigViolation> },

    /// A processing stage rejected its input.
    #[error("[{stage}] {}: {source}", path.display())]
    Pipeline {
        stage: Stage,
        path: PathBuf,
        #[source]
        source: gazeforge_core::Error,
    },

    #[error("[{stage}] {}: {source}", path.display())]
    Io {
        stage: Stage,
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn join_violations(v: &[ConfigViolation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

impl Error {
    pub fn input(stage: Stage, path: impl AsRef<Path>, message: impl Into<String>) -> Self {
        Error::Input { stage, path: path.as_ref().to_path_buf(), message: message.into() }
    }

    pub fn pipeline(stage: Stage, path: impl AsRef<Path>, source: gazeforge_core::Error) -> Self {
        Error::Pipeline { stage, path: path.as_ref().to_path_buf(), source }
    }

    pub fn io(stage: Stage, path: impl AsRef<Path>, source: std::io::Error) -> Self {
        Error::Io { stage, path: path.as_ref().to_path_buf(), source }
    }

    /// 1 input/config, 2 pipeline, 3 I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Input { .. } | Error::Config { .. } => 1,
            Error::Pipeline { .. } => 2,
            Error::Io { .. } => 3,
        }
    }

    pub fn stage(&self) -> Stage {
        match self {
            Error::Config { .. } => Stage::Config,
            Error::Input { stage, .. } | Error::Pipeline { stage, .. } | Error::Io { stage, .. } => *stage,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
