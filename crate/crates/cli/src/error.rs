use std::fmt;
use std::io::ErrorKind;
use std::path::Path;

use pdsphere::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    NotFound,
    Parse,
    Parameter,
    Other,
}

impl Kind {
    pub fn exit_code(self) -> u8 {
        match self {
            Kind::Other => 1,
            Kind::NotFound => 2,
            Kind::Parse => 3,
            Kind::Parameter => 4,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Kind::NotFound => "file-not-found",
            Kind::Parse => "parse",
            Kind::Parameter => "parameter",
            Kind::Other => "other",
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub kind: Kind,
    pub message: String,
}

impl CliError {
    pub fn new(kind: Kind, message: impl Into<String>) -> Self {
        CliError {
            kind,
            message: message.into(),
        }
    }

    pub fn param(message: impl Into<String>) -> Self {
        Self::new(Kind::Parameter, message)
    }

    /// One JSON object on one line.
    pub fn to_line(&self) -> String {
        serde_json::json!({
            "error": self.kind.tag(),
            "code": self.kind.exit_code(),
            "message": self.message,
        })
        .to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind.tag(), self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let kind = match &e {
            Error::Io(io) if io.kind() == ErrorKind::NotFound => Kind::NotFound,
            Error::Io(_) | Error::Structural(_) => Kind::Other,
            Error::Parse { .. } => Kind::Parse,
            Error::Parameter(_)
            | Error::SeriesTooShort { .. }
            | Error::NonFinite(_)
            | Error::Empty(_)
            | Error::EmptyDiagram
            | Error::Shape { .. }
            | Error::Range { .. }
            | Error::Config(_) => Kind::Parameter,
        };
        CliError::new(kind, e.to_string())
    }
}

/// Attaches the offending path to I/O failures.
pub fn at(path: &Path) -> impl Fn(Error) -> CliError + '_ {
    move |e| {
        let mut err = CliError::from(e);
        if matches!(err.kind, Kind::NotFound | Kind::Other)
            && !err.message.contains(&*path.to_string_lossy())
        {
            err.message = format!("{}: {}", path.display(), err.message);
        }
        err
    }
}

pub type CliResult<T> = Result<T, CliError>;
