//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid density matrix: {0}")]
    InvalidMatrix(String),
    #[error("Kraus set is not trace preserving (completeness residual {residual:.3e})")]
    IncompleteChannel { residual: f64 },
    #[error("matrix is not a diagonal unitary: {0}")]
    NotDiagonalUnitary(String),
    #[error("region degenerates to a segment (source has no coherence)")]
    DegenerateRegion,
    #[error("class {0} has no transformation region")]
    UnsupportedClass(String),
    #[error("target ({z:.6}, {r:.6}) is outside the reachable region (margin {margin:.3e})")]
    TargetUnreachable { z: f64, r: f64, margin: f64 },
    #[error("source has no coherence; targets with r != 0 are unreachable")]
    DegenerateSource,
    #[error("channel is not incoherent: {0}")]
    NotIncoherent(String),
    #[error("sampler exhausted after {0} rejected draws")]
    SamplerExhausted(usize),
    #[error("extremum search did not reach stationarity (best residual {0:.3e})")]
    NonConvergence(f64),
    #[error("unusable channel document: {0}")]
    UnsupportedDocument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
