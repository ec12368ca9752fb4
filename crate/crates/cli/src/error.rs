use std::fmt;
use std::process::ExitCode;

use collarwave::features::FeatureError;
use collarwave::ingest::IngestError;
use collarwave::models::ModelError;
use collarwave::pipeline::PipelineError;
use collarwave::preprocess::PreprocessError;
use collarwave::stream::StreamError;

/// Process exit status. Every error path maps to exactly one of these.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    Usage = 1,
    Input = 2,
    Validation = 3,
    Internal = 4,
}

impl From<ExitStatus> for ExitCode {
    fn from(s: ExitStatus) -> Self {
        ExitCode::from(s as u8)
    }
}

#[derive(Debug)]
pub struct CliError {
    pub status: ExitStatus,
    pub message: String,
}

impl CliError {
    pub fn new(status: ExitStatus, message: impl Into<String>) -> Self {
        Self {
            status,
            message: message.into(),
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new(ExitStatus::Usage, message)
    }

    pub fn input(message: impl Into<String>) -> Self {
        Self::new(ExitStatus::Input, message)
    }

    pub fn validation(message: impl Into<String>) -> Self {
        Self::new(ExitStatus::Validation, message)
    }

    /// Prefixes the message with the file or stage it came from.
    pub fn context(mut self, what: impl fmt::Display) -> Self {
        self.message = format!("{what}: {}", self.message);
        self
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::input(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::new(ExitStatus::Internal, e.to_string())
    }
}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        Self::input(e.to_string())
    }
}

impl From<PreprocessError> for CliError {
    fn from(e: PreprocessError) -> Self {
        let status = match e {
            PreprocessError::InvalidWindowSpec(_) => ExitStatus::Usage,
            _ => ExitStatus::Validation,
        };
        Self::new(status, e.to_string())
    }
}

impl From<FeatureError> for CliError {
    fn from(e: FeatureError) -> Self {
        let status = match e {
            FeatureError::Csv { .. } | FeatureError::DimensionMismatch { .. } => ExitStatus::Input,
            FeatureError::InvalidConfig(_) => ExitStatus::Usage,
            FeatureError::Inconsistent(_) => ExitStatus::Internal,
            _ => ExitStatus::Validation,
        };
        Self::new(status, e.to_string())
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::CorruptArtifact(_) | ModelError::VersionMismatch(_) => Self::input(e.to_string()),
            ModelError::InvalidConfig(_) => Self::usage(e.to_string()),
            ModelError::Feature(f) => f.into(),
            _ => Self::validation(e.to_string()),
        }
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Ingest(id, err) => CliError::from(err).context(id),
            PipelineError::Preprocess(id, err) => CliError::from(err).context(id),
            PipelineError::Feature(err) => err.into(),
            PipelineError::Empty => Self::usage(e.to_string()),
        }
    }
}

impl From<StreamError> for CliError {
    fn from(e: StreamError) -> Self {
        match e {
            StreamError::NonMonotonicTimestamp { .. } | StreamError::BadLine { .. } => Self::input(e.to_string()),
            StreamError::SchemaMismatch { .. } => Self::validation(e.to_string()),
            StreamError::InvalidConfig(_) => Self::usage(e.to_string()),
            StreamError::Model(m) => m.into(),
            StreamError::Feature(f) => f.into(),
            StreamError::Preprocess(p) => p.into(),
        }
    }
}
