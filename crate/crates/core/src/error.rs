//! Error types shared across the crate.

use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DspError {
    #[error("no window exceeds the silence threshold")]
    AllSilent,
    #[error("waveform too short: {got} samples, need at least {need}")]
    TooShort { got: usize, need: usize },
    #[error("invalid spectrogram config: {0}")]
    InvalidConfig(String),
    #[error("expected {expected} features, got {got}")]
    WrongKind { expected: String, got: String },
}

#[derive(Debug, Error)]
pub enum TextError {
    #[error("jamo indices out of range: onset {onset}, nucleus {nucleus}, coda {coda}")]
    OutOfRange { onset: u32, nucleus: u32, coda: u32 },
    #[error("symbol not in vocabulary: {0:?}")]
    UnknownSymbol(String),
    #[error("malformed vocabulary file: {0}")]
    BadVocabulary(String),
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("style id {0} out of range ({1} styles)")]
    InvalidStyle(usize, usize),
    #[error("corpus too small: {0}")]
    CorpusTooSmall(String),
    #[error("articulator config invalid: {0}")]
    BadArticulator(String),
    #[error("manifest parse error at line {line}: {msg}")]
    BadManifest { line: usize, msg: String },
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("shape mismatch in {place}: expected {expected}, got {got}")]
    Shape { place: String, expected: String, got: String },
    #[error("token id {id} out of range for vocabulary of {vocab}")]
    TokenOutOfRange { id: usize, vocab: usize },
    #[error("xor routing: both linguistic encodings present")]
    BothPresent,
    #[error("xor routing: neither linguistic encoding present")]
    NeitherPresent,
    #[error("empty input to {0}")]
    EmptyInput(String),
    #[error("teacher forcing requires a ground-truth mel target")]
    MissingTarget,
    #[error("checkpoint error: {0}")]
    Checkpoint(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("non-finite loss at step {step}")]
    NonFiniteLoss { step: u64 },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("run directory is locked (another writer?): {0}")]
    Locked(PathBuf),
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("reference token sequence is empty")]
    EmptyReference,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("bad magic in {path}")]
    BadMagic { path: PathBuf },
    #[error("unsupported version {version} in {path}")]
    BadVersion { path: PathBuf, version: u32 },
    #[error("corrupt file {path}: {msg}")]
    Corrupt { path: PathBuf, msg: String },
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
