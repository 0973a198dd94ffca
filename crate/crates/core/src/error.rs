use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("FASTA input is empty")]
    EmptyFasta,

    #[error("FASTA line {line}: sequence data before the first '>' header")]
    OrphanSequence { line: usize },

    #[error("FASTA record {id:?} has an empty sequence")]
    EmptySequence { id: String },

    #[error("FASTA line {line}: header has no identifier")]
    EmptyIdentifier { line: usize },

    #[error("sequence identifier {0:?} contains whitespace")]
    InvalidIdentifier(String),

    #[error("sequence {id:?}: byte 0x{byte:02x} at position {position} is not a residue symbol")]
    InvalidResidue { id: String, position: usize, byte: u8 },

    #[error("duplicate sequence identifier {0:?}")]
    DuplicateId(String),

    #[error("label manifest line {line}: {message}")]
    Manifest { line: usize, message: String },

    #[error("sequence {0:?} has no label in the manifest")]
    MissingLabel(String),

    #[error("manifest lists {0:?} but no such sequence was loaded")]
    UnknownManifestId(String),

    #[error("requires ≥ 2 classes, found {0}")]
    TooFewClasses(usize),

    #[error("class {0:?} has no members")]
    EmptyClass(String),

    #[error("unknown class label {0:?}")]
    UnknownClass(String),

    #[error("invalid k = {0}: must lie in [1, 31]")]
    InvalidK(usize),

    #[error("sequence of length {len} is shorter than k = {k}")]
    SequenceTooShort { len: usize, k: usize },

    #[error("item {id:?}: {source}")]
    Item {
        id: String,
        #[source]
        source: Box<Error>,
    },

    #[error("k-mer spec mismatch: model uses k = {model}, input uses k = {input}")]
    SpecMismatch { model: usize, input: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("class {class:?} has zero total k-mer counts")]
    ZeroCounts { class: String },

    #[error("non-finite feature value in row {row}")]
    NonFinite { row: usize },

    #[error("{n_folds} folds requested but class {class:?} has only {size} members; use {size} folds")]
    ClassTooSmallForFolds {
        class: String,
        size: usize,
        n_folds: usize,
    },

    #[error("profile dump line {line}: {message}")]
    ProfileDump { line: usize, message: String },

    #[error("model container: {0}")]
    Serialization(#[from] serde_json::Error),

    #[error("unsupported model container version {0}")]
    UnsupportedVersion(u32),

    #[error("class {class:?}: {source}")]
    ClassFit {
        class: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Attaches the id of the record that caused the error.
    pub fn for_item(self, id: &str) -> Self {
        Error::Item {
            id: id.to_string(),
            source: Box::new(self),
        }
    }
}
