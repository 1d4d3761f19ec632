use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, PipelineError>;

/// Pipeline stage an error came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Ingest,
    Benchmark,
    Featurize,
    Select,
    Train,
    Rank,
    Evaluate,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Ingest => "ingest",
            Stage::Benchmark => "benchmark",
            Stage::Featurize => "featurize",
            Stage::Select => "feature-selection",
            Stage::Train => "train",
            Stage::Rank => "rank",
            Stage::Evaluate => "evaluate",
        })
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{}:{line}: {reason}", path.display())]
    Parse {
        path: PathBuf,
        line: u64,
        reason: String,
    },

    #[error("config: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{stage}: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: lpu_core::Error,
    },
}

impl PipelineError {
    pub(crate) fn parse(path: impl Into<PathBuf>, line: u64, reason: impl Into<String>) -> Self {
        PipelineError::Parse {
            path: path.into(),
            line,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        PipelineError::Io {
            path: path.into(),
            source,
        }
    }

    /// 1 for bad input or configuration, 2 for failures while running.
    pub fn exit_code(&self) -> i32 {
        use lpu_core::Error as E;
        match self {
            PipelineError::Parse { .. } | PipelineError::Config(_) => 1,
            PipelineError::Io { .. } => 2,
            PipelineError::Stage { source, .. } => match source {
                E::DimensionMismatch { .. }
                | E::InvalidParameter { .. }
                | E::EmptyInput(_)
                | E::DegenerateLabels(_)
                | E::UnknownId(_)
                | E::InvalidData(_) => 1,
                E::NotConverged(_) | E::Numerical(_) | E::SelectionAborted { .. } | E::Io(_) => 2,
            },
        }
    }
}

/// Tags a core error with the stage it surfaced in.
pub(crate) trait StageExt<T> {
    fn stage(self, stage: Stage) -> Result<T>;
}

impl<T> StageExt<T> for lpu_core::Result<T> {
    fn stage(self, stage: Stage) -> Result<T> {
        self.map_err(|source| PipelineError::Stage { stage, source })
    }
}
