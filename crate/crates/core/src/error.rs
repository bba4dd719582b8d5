use thiserror::Error;

use crate::pamap::Diagnostic;

/// Errors reported by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid map: {}", join(.0))]
    InvalidMap(Vec<Diagnostic>),
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("invalid segment: {0}")]
    InvalidSegment(String),
    #[error("reach of the line region did not stabilize within {cap} rounds")]
    InexactReach { cap: usize },
    #[error("map is not Markov: {}", .0.join("; "))]
    NotMarkov(Vec<String>),
    #[error("partition scan failed: {0}")]
    Partition(String),
    #[error("chain error: {0}")]
    Chain(String),
    #[error("pullback became empty at step {step}")]
    EmptyPullback { step: usize },
    #[error("no covering: {0}")]
    NoCovering(String),
    #[error("not found: {0}")]
    NotFound(String),
    #[error("stage error: {0}")]
    Stage(String),
    #[error("certificate failed: {0}")]
    Certificate(String),
}

fn join(d: &[Diagnostic]) -> String {
    d.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
