use thiserror::Error;

use crate::schur_state::SchurStateTrace;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("point or parameter {value} not strictly inside the unit disc (|.| = {modulus:.3e})")]
    DiscViolation { value: String, modulus: f64 },

    #[error("terminal constant is not unimodular (|.| = {modulus:.17})")]
    UnitViolation { modulus: f64 },

    #[error("evaluation too close to a pole (pivot modulus {modulus:.3e})")]
    NearPole { modulus: f64 },

    #[error("Schur recursion terminated at step {step}: |s| = {modulus:.17} is not below 1")]
    Terminal { step: usize, modulus: f64 },

    #[error("Schur transform failed to drop the degree: expected {expected}, found {found}")]
    DegreeDropFailure { expected: usize, found: usize },

    #[error("matrix is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },

    #[error("colligation is not simple (rank {rank} < {n})")]
    NotSimple { rank: usize, n: usize },

    #[error(
        "colligation is not minimal: recursion stopped at step {step} with |s| = {modulus:.17}"
    )]
    NotMinimal {
        step: usize,
        modulus: f64,
        partial: Box<SchurStateTrace>,
    },

    #[error("B row is not in normalized form (residual {residual:.3e})")]
    NotNormalized { residual: f64 },

    #[error("row vectors have different norms ({left} vs {right})")]
    NormMismatch { left: f64, right: f64 },

    #[error("zero row vector")]
    ZeroVector,

    #[error("feedback loop is singular (|1 - a22 alpha| = {modulus:.3e})")]
    FeedbackSingular { modulus: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("zeros {i} and {j} are too close (distance {distance:.3e})")]
    ZerosTooClose { i: usize, j: usize, distance: f64 },

    #[error("Pick matrix is not positive definite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("function is not inner (disc excess {disc_excess:.3e}, circle deviation {circle_deviation:.3e})")]
    NotInner {
        disc_excess: f64,
        circle_deviation: f64,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
}

impl Error {
    /// Errors caused by inputs that violate a type invariant, as opposed to
    /// numerical breakdown during a computation.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::DiscViolation { .. }
                | Error::UnitViolation { .. }
                | Error::NotUnitary { .. }
                | Error::NormMismatch { .. }
                | Error::ZeroVector
                | Error::DimensionMismatch { .. }
                | Error::ZerosTooClose { .. }
                | Error::NotInner { .. }
                | Error::InvalidInput(_)
        )
    }
}
