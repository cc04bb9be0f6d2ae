use std::path::PathBuf;

use thiserror::Error;

use crate::netstore::{NodeId, NodeKind, RelationCategory};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown relation {name:?}")]
    UnknownRelation { name: String },

    #[error("invalid label: labels must be non-empty")]
    InvalidLabel,

    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),

    #[error("relation {relation:?} ({category:?}) cannot connect {src:?} to {dst:?}")]
    EndpointKindMismatch {
        relation: String,
        category: RelationCategory,
        src: NodeKind,
        dst: NodeKind,
    },

    #[error("invalid node id {0}")]
    InvalidNode(NodeId),

    #[error("word {0:?} is not in the network")]
    WordNotInNetwork(String),

    #[error("phrase is empty")]
    EmptyPhrase,

    #[error("no vectors to compose")]
    EmptyInput,

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("training data must contain both positive and negative instances")]
    DegenerateTraining,

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("{}line {line}: {msg}", source_name(.path))]
    Parse {
        path: Option<PathBuf>,
        line: usize,
        msg: String,
    },

    #[error("{}line {line}: {source}", source_name(.path))]
    AtLine {
        path: Option<PathBuf>,
        line: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn source_name(path: &Option<PathBuf>) -> String {
    match path {
        Some(p) => format!("{}: ", p.display()),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: None,
            line,
            msg: msg.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// The underlying error, looking through any line-number wrapper.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtLine { source, .. } => source.root(),
            other => other,
        }
    }

    /// Attaches a file path to a parse error raised while reading it.
    pub(crate) fn in_file(self, file: impl Into<PathBuf>) -> Self {
        match self {
            Error::Parse {
                path: None,
                line,
                msg,
            } => Error::Parse {
                path: Some(file.into()),
                line,
                msg,
            },
            Error::AtLine {
                path: None,
                line,
                source,
            } => Error::AtLine {
                path: Some(file.into()),
                line,
                source,
            },
            other => other,
        }
    }

    /// Wraps an error with the line number it occurred on, if it does not
    /// already carry one.
    pub(crate) fn at_line(self, line: usize) -> Self {
        match self {
            e @ (Error::Parse { .. } | Error::AtLine { .. } | Error::Io { .. }) => e,
            other => Error::AtLine {
                path: None,
                line,
                source: Box::new(other),
            },
        }
    }
}
