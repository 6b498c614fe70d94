//! Shared error type for the numeric kernels.

use num_complex::Complex64;
use thiserror::Error;

/// Failures surfaced by the linear-algebra and dynamics kernels.
///
/// Every variant has a stable machine-readable name (see [`DynError::name`])
/// so callers can map failures to exit codes and JSON error reports without
/// string-matching display text.
#[derive(Debug, Clone, Error)]
pub enum DynError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A pivot fell below the singularity floor during LU factorization.
    #[error("matrix is numerically singular")]
    SingularMatrix,

    /// QR iteration stalled; `partial` holds the eigenvalues deflated so far.
    #[error("eigenvalue iteration did not converge ({} of the eigenvalues were recovered)", partial.len())]
    NoConvergence { partial: Vec<Complex64> },

    /// Eigenvalue clusters are too close together to place disjoint contours.
    #[error("eigenvalue clusters overlap: gap {gap:.3e} is not larger than 10x diameter {diameter:.3e}")]
    ClusterOverlap { gap: f64, diameter: f64 },

    /// An integration circle passes too close to an eigenvalue.
    #[error("contour passes within {dist:.3e} of an eigenvalue")]
    ContourTooClose { dist: f64 },

    /// The contour does not wind exactly once around every eigenvalue.
    #[error("contour does not enclose every eigenvalue exactly once")]
    ContourNotEnclosing,

    /// Two supposedly distinct eigenvalues coincide to working precision.
    #[error("eigenvalues {i} and {j} are closer than {min_gap:.1e}; the divided-difference formula is singular")]
    DegenerateSpectrum { i: usize, j: usize, min_gap: f64 },

    /// A Taylor-jet coefficient exceeded the overflow guard.
    #[error("jet coefficient exceeded the overflow guard")]
    JetOverflow,

    /// A scalar intermediate exceeded the overflow guard.
    #[error("overflow while evaluating {0}")]
    Overflow(&'static str),

    /// Exact inversion failed: the matrix is singular over the rationals.
    #[error("matrix is not invertible over the rationals")]
    NotInvertible,
}

impl DynError {
    /// Stable identifier used by CLI error reports.
    pub fn name(&self) -> &'static str {
        match self {
            DynError::DimensionMismatch(_) => "DimensionMismatch",
            DynError::SingularMatrix => "SingularMatrix",
            DynError::NoConvergence { .. } => "NoConvergence",
            DynError::ClusterOverlap { .. } => "ClusterOverlap",
            DynError::ContourTooClose { .. } => "ContourTooClose",
            DynError::ContourNotEnclosing => "ContourNotEnclosing",
            DynError::DegenerateSpectrum { .. } => "DegenerateSpectrum",
            DynError::JetOverflow => "JetOverflow",
            DynError::Overflow(_) => "Overflow",
            DynError::NotInvertible => "NotInvertible",
        }
    }
}
