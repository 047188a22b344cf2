use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("duplicate seed id {0:?}")]
    DuplicateId(String),

    #[error("corpus has no seeds")]
    EmptyCorpus,

    #[error("seed {0:?} has no usable data (needs source, ast, cfg, coverage or embedding)")]
    EmptySeed(String),

    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot parse {context}: {message}")]
    Parse { context: String, message: String },

    #[error("seed {seed:?} has no {repr}")]
    MissingRepresentation { seed: String, repr: &'static str },

    #[error("syntax error in {seed:?} at {line}:{column}: {message}")]
    Syntax {
        seed: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{0}")]
    Validation(String),

    #[error("{0}")]
    Parameter(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(context: impl Into<String>, message: impl ToString) -> Self {
        Error::Parse {
            context: context.into(),
            message: message.to_string(),
        }
    }

    /// Stable short tag used in diagnostics (`error[<code>]: ...`).
    pub fn code(&self) -> &'static str {
        match self {
            Error::DuplicateId(_) => "duplicate-id",
            Error::EmptyCorpus => "empty-corpus",
            Error::EmptySeed(_) => "empty-seed",
            Error::Io { .. } => "io",
            Error::Parse { .. } => "parse",
            Error::MissingRepresentation { .. } => "missing-representation",
            Error::Syntax { .. } => "syntax",
            Error::Validation(_) => "validation",
            Error::Parameter(_) => "parameter",
        }
    }

    /// Numeric status shared by the CLI exit code and the C ABI.
    pub fn status(&self) -> i32 {
        match self {
            Error::Parameter(_) => 2,
            Error::Io { .. } => 3,
            Error::Parse { .. } | Error::Syntax { .. } => 4,
            Error::DuplicateId(_) | Error::EmptyCorpus | Error::EmptySeed(_) => 5,
            Error::MissingRepresentation { .. } => 6,
            Error::Validation(_) => 7,
        }
    }
}
