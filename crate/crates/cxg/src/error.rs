use std::io;
use std::path::PathBuf;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Invalid {
        line: usize,
        source: cxg_core::Error,
    },
    #[error(transparent)]
    Core(#[from] cxg_core::Error),
    #[error("template not found: {}", .0.display())]
    TemplateNotFound(PathBuf),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: {msg}", path.display())]
    Format { path: PathBuf, msg: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("duplicate speaker_id {0} in manifest")]
    DuplicateSpeaker(String),
    #[error("{}: {source}", path.display())]
    InFile {
        path: PathBuf,
        source: Box<CliError>,
    },
}

impl CliError {
    /// Short machine-readable category, printed with every failure.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Parse { .. } => "parse",
            CliError::Invalid { .. } => "validation",
            CliError::Core(_) => "analysis",
            CliError::TemplateNotFound(_) => "template",
            CliError::Io { .. } => "io",
            CliError::Format { .. } => "format",
            CliError::Config(_) => "config",
            CliError::DuplicateSpeaker(_) => "validation",
            CliError::InFile { source, .. } => source.kind(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, msg: impl std::fmt::Display) -> CliError {
        CliError::Format {
            path: path.into(),
            msg: msg.to_string(),
        }
    }
}
