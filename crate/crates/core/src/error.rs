use thiserror::Error;

/// Crate-wide error type; variants name the contract that was violated.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("action not free within the independence window: n = {n:?} returns within {dist:e} of the identity")]
    NotFree { n: Vec<i64>, dist: f64 },

    #[error("marker radius too large: a unit lattice step lands within 2*r_outer of the center")]
    MarkerRadiusTooLarge,

    #[error("covering cap exceeded: no L <= {cap} covers the torus with balls of radius {r_inner}")]
    CoveringCapExceeded { cap: u32, r_inner: f64 },

    #[error("separation scan cap {cap} exceeded")]
    SeparationCapExceeded { cap: u32 },

    #[error("exact boundary distance supports dimension <= 2, got {d}")]
    BoundaryDistanceUnsupported { d: usize },

    #[error("svg rendering supports d = 2 only, got d = {d}")]
    RenderUnsupported { d: usize },

    #[error("cell is unbounded in direction {0}")]
    UnboundedCell(String),

    #[error("marker/tiling inconsistency: no active center within the truncation window of the origin")]
    TilingInconsistency,

    #[error("orbit-density ratio not certified below window cap {m_cap}")]
    DensityNotCertified { m_cap: u64 },

    #[error("increase M/H: tiles guarantee interior radius {guaranteed:.6} but the construction needs {required:.6}")]
    IncreaseMarkerScale { required: f64, guaranteed: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
