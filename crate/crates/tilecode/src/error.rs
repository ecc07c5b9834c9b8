//! Crate-wide error type.

use thiserror::Error;

/// Per-iteration counts recorded while pruning a tile collection.
///
/// Attached to [`Error::ElaborationFailed`] so a caller can see how the
/// sets shrank before they emptied.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElaborationStep {
    pub iteration: usize,
    pub tiles: usize,
    pub horizontal: usize,
    pub vertical: usize,
}

impl std::fmt::Display for ElaborationStep {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "iter {}: tiles={} |H|={} |V|={}",
            self.iteration, self.tiles, self.horizontal, self.vertical
        )
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("work limit exceeded: {nodes} nodes visited (limit {limit})")]
    WorkLimit { nodes: u64, limit: u64 },

    #[error("elaboration failed: {reason}")]
    ElaborationFailed {
        reason: String,
        trace: Vec<ElaborationStep>,
    },

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("unknown overlap: {0}")]
    UnknownOverlap(String),

    #[error("incompatible context: {0}")]
    IncompatibleContext(String),

    #[error("corrupt matrix at tile position (row {row}, col {col}): {reason}")]
    Corruption {
        row: usize,
        col: usize,
        reason: String,
    },

    #[error("frame error: {0}")]
    Frame(String),

    #[error("empty collection: {0}")]
    EmptyCollection(String),

    #[error("search failed: {0}")]
    SearchFailed(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("internal consistency error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
