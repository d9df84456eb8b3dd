use thiserror::Error;

use crate::expr::ParseError;

/// Errors raised by the geometry engine.
#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),

    #[error("vector is not in the {subspace} subspace (off-subspace norm {norm:.3e})")]
    NotInSubspace { subspace: &'static str, norm: f64 },

    #[error("algebra is not of Heisenberg type")]
    NotHeisenbergType,

    #[error("frame is not orthonormal (Gram residual {residual:.3e})")]
    FrameNotOrthonormal { residual: f64 },

    #[error("frame is not in the required basis: {0}")]
    WrongBasis(String),

    #[error("immersion is rank deficient at {u:?} (smallest singular value {sigma_min:.3e})")]
    RankDeficient { u: Vec<f64>, sigma_min: f64 },

    #[error("point {u:?} is too close to the domain boundary for a stencil of reach {reach:.3e}")]
    StencilOutOfDomain { u: Vec<f64>, reach: f64 },

    #[error("frame does not match the surface normal (mismatch {mismatch:.3e})")]
    FrameMismatch { mismatch: f64 },

    #[error("singular matrix encountered: {0}")]
    Singular(&'static str),

    #[error("non-finite value encountered at {u:?}")]
    NonFinite { u: Vec<f64> },

    #[error("degenerate cylinder profile: (f1')^2 + (f2')^2 = {speed2:.3e} at s = {s}")]
    DegenerateProfile { s: f64, speed2: f64 },

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, GeometryError>;
