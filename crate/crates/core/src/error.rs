use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} qubits, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("index {index} out of range (max {max})")]
    Index { index: usize, max: usize },

    /// `line` is 1-based when the text came from a file, `column` is 1-based
    /// within the line.
    #[error("{}", format_parse(*.line, *.column, .message))]
    Parse {
        line: Option<usize>,
        column: usize,
        message: String,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid state: {0}")]
    State(String),

    #[error("{what} requires {requested} qubits but the cap is {cap}")]
    Capacity {
        what: &'static str,
        requested: usize,
        cap: usize,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn format_parse(line: Option<usize>, column: usize, message: &str) -> String {
    match line {
        Some(line) => format!("parse error at line {line}, column {column}: {message}"),
        None => format!("parse error at column {column}: {message}"),
    }
}

impl Error {
    pub(crate) fn parse(column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line: None,
            column,
            message: message.into(),
        }
    }

    /// Attach a line number to a parse error produced for a single line.
    pub(crate) fn at_line(self, line_no: usize) -> Self {
        match self {
            Error::Parse {
                column, message, ..
            } => Error::Parse {
                line: Some(line_no),
                column,
                message,
            },
            other => other,
        }
    }

    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse { .. })
    }

    pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
        if expected == found {
            Ok(())
        } else {
            Err(Error::Dimension { expected, found })
        }
    }
}
