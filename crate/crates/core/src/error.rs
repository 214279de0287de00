use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate triangle: vertices {0:?} are collinear")]
    DegenerateTriangle([usize; 3]),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("no patch available for element {element}: {reason}")]
    PatchUnavailable { element: usize, reason: String },

    #[error("unsupported grid: {0}")]
    UnsupportedGrid(String),

    /// A pivot fell below the relative singularity threshold during factorization.
    #[error(
        "singular system: pivot {ratio:.3e} (relative) at unknown {index}; \
         pressure constraints are missing (each element with two boundary sides \
         makes its constant and corner-vertex continuity rows linearly dependent)"
    )]
    SingularSystem { index: usize, ratio: f64 },

    #[error("solve inaccurate: relative residual {residual:.3e} after refinement")]
    InaccurateSolve { residual: f64 },

    #[error("degenerate patch: {0}")]
    DegeneratePatch(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
