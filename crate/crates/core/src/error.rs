use thiserror::Error;

/// Failure to read one of the input documents (fact file, annotations, config).
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },
}

impl ParseError {
    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        ParseError::Schema {
            path: path.into(),
            message: message.into(),
        }
    }

    pub(crate) fn from_json(err: serde_path_to_error::Error<serde_json::Error>) -> Self {
        let path = err.path().to_string();
        let inner = err.into_inner();
        match inner.classify() {
            serde_json::error::Category::Data => ParseError::Schema {
                path,
                message: inner.to_string(),
            },
            _ => ParseError::Syntax {
                line: inner.line(),
                column: inner.column(),
                message: inner.to_string(),
            },
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AreaMapError {
    #[error("syntax error at line {line}: {message}")]
    Syntax { line: u64, message: String },
    #[error("area map has no assignments")]
    EmptyMap,
    #[error("table `{0}` is listed as a control table and under a business area")]
    ControlConflict(String),
}

/// Errors raised by the analysis steps themselves.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("unknown subsystem `{0}`")]
    UnknownSubsystem(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("callable `{0}` has no signature")]
    MissingSignature(String),
    #[error("facade `{facade}` is not a source facade of candidate `{candidate}`")]
    NotASourceFacade { facade: String, candidate: String },
}
