use thiserror::Error;

/// Errors produced by the Talbot-qudit toolkit.
///
/// Variants fall into two groups: parameter validation failures (bad
/// wavelengths, non-coprime Gauss-sum arguments, malformed tables) and
/// numerical guards that trip when a grid cannot faithfully represent the
/// requested computation. [`Error::is_numerical_guard`] tells them apart.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid propagation spec: {0}")]
    InvalidSpec(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("aliasing risk: transfer-function phase step {phase_step:.4} rad exceeds pi at the grid edge (need lambda*z <= N*dx^2)")]
    AliasingRisk { phase_step: f64 },

    #[error("under-resolved grid: {0}")]
    UnderResolved(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("q={q} and r={r} are not coprime")]
    NotCoprime { q: i64, r: i64 },

    #[error("detector bins do not align with the grid: {0}")]
    BinMisalignment(String),

    #[error("probability table is not normalized: {0}")]
    NonNormalized(String),

    #[error("matrix is not unitary (max |U^dag U - I| = {0:.3e})")]
    NotUnitary(f64),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures caused by grid resolution, aliasing or binning
    /// rather than by invalid input values.
    pub fn is_numerical_guard(&self) -> bool {
        matches!(
            self,
            Error::AliasingRisk { .. } | Error::UnderResolved(_) | Error::BinMisalignment(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
