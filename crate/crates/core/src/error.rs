use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate simplex: {0}")]
    Degenerate(String),

    #[error("non-manifold complex: face {face:?} has {cofaces} cofaces (at most 2 allowed)")]
    NonManifold { face: Vec<usize>, cofaces: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension {p} out of range 0..={max}")]
    DimensionOutOfRange { p: usize, max: usize },

    #[error("query point lies outside the affine hull (residual {residual:.3e}, tolerance {tolerance:.3e})")]
    OutsideAffineHull { residual: f64, tolerance: f64 },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("mesh validation failed: {0}")]
    Validation(String),

    #[error("fixture generation failed: {0}")]
    Fixture(String),

    #[error("ill-posed problem: {0}")]
    Problem(String),

    #[error("linear solve failed: {0}")]
    Solve(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
