use std::path::PathBuf;

use thiserror::Error;

/// Crate-wide error type. Variants map one-to-one onto the failure modes of
/// the public operations; the payload carries whatever is needed to act on
/// the error (field name, record index, violated invariant).
#[derive(Debug, Error)]
pub enum Error {
    #[error("config file not found: {0}")]
    MissingFile(PathBuf),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("field `{field}` out of range: {detail}")]
    Range { field: &'static str, detail: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("dataset format version mismatch: expected `{expected}`, found `{found}`")]
    FormatVersionMismatch { expected: String, found: String },

    #[error("corrupt dataset record at line {index}: {detail}")]
    CorruptRecord { index: usize, detail: String },

    #[error("invalid initial state: {0}")]
    InvalidInitState(String),

    #[error("step() called on a finished episode; call reset() first")]
    SteppedAfterDone,

    #[error("distance must be non-negative, got {0}")]
    NegativeDistance(f64),

    #[error("reward/task mismatch: {0}")]
    TaskStateMismatch(String),

    #[error("sampling constraint unsatisfiable after {attempts} attempts: {detail}")]
    RegionTooSmall { attempts: usize, detail: String },

    #[error("scripted expert failed {failures}/{attempts} attempts; env/controller pairing broken")]
    ExpertFailureRate { failures: usize, attempts: usize },

    #[error("trajectory contains no grasp/contact event")]
    NoEventsFound,

    #[error("transformed waypoint outside workspace: ({0:.4}, {1:.4})")]
    OutOfWorkspace(f64, f64),

    #[error("generation stalled: acceptance {accepted}/{attempts} below 5% over the last window")]
    GenerationStalled { accepted: usize, attempts: usize },

    #[error("observation history has length {got}, expected {expected}")]
    BadHistoryLength { expected: usize, got: usize },

    #[error("empty batch")]
    EmptyBatch,

    #[error("empty dataset: {0}")]
    EmptyDataset(&'static str),

    #[error("training diverged: {0}")]
    DivergenceDetected(String),

    #[error("non-finite loss: {0}")]
    NonFiniteLoss(String),

    #[error("env builder produced a {got:?}-tagged env where {expected:?} was required")]
    EnvBuilderMismatch {
        expected: crate::types::DomainTag,
        got: crate::types::DomainTag,
    },

    #[error("generalization mode undefined for task: {0}")]
    ModeTaskMismatch(String),

    #[error("report schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("checkpoint error: {0}")]
    Checkpoint(String),
}

pub type Result<T> = std::result::Result<T, Error>;
