//! Error type shared by all modules.

use crate::geometry::ProductPoint;

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// A vector meant to lie on the unit sphere could not be normalized.
    #[error("vector of norm {norm:.3e} cannot be renormalized to the unit sphere")]
    NotNormalizable { norm: f64 },

    /// A tangent vector fails ⟨u, p⟩ = 0 beyond the operation precondition.
    #[error("tangency violated: |<u, p>| = {residual:.3e} exceeds {limit:.1e}")]
    TangencyViolation { residual: f64, limit: f64 },

    /// A pulled-back 2-form is degenerate at a sample point.
    #[error("pulled-back form degenerate at sample (|det| = {det:.3e})")]
    NondegeneracyFail { det: f64, at: ProductPoint },

    /// The twist extension over the caps requires an even twisting number.
    #[error("twist construction unavailable: m = {m} must be even")]
    ConstructionUnavailable { m: i64 },

    /// A quadrature degree did not settle near an integer at the grid cap.
    #[error("degree rounding ambiguous: residue {residue:.3} at grid {grid}")]
    RoundingAmbiguous { residue: f64, grid: usize },

    /// A pushed curve left the equatorial torus.
    #[error("curve image leaves the torus: max |x3|,|y3| = {off:.3e}")]
    LeavesTorus { off: f64 },

    /// The involution has no fixed torus to push curves on.
    #[error("{sigma} has empty fixed locus: no torus to push curves on")]
    EmptyFixedLocus { sigma: String },

    /// Angle unwrapping failed even at the refinement cap.
    #[error("angle unwrap failed: jump {jump:.3} rad persists at {samples} samples")]
    UnwrapFail { jump: f64, samples: usize },

    /// A winding sum did not land near an integer.
    #[error("winding sum {value:.6} is not within {limit:.1e} of an integer")]
    WindingNotIntegral { value: f64, limit: f64 },

    /// A metric is too ill-conditioned to solve against.
    #[error("metric condition number {cond:.3e} exceeds {limit:.1e}")]
    IllConditioned { cond: f64, limit: f64 },

    /// The operator handed to the square root has non-positive spectrum.
    #[error("square root rejected: min eigenvalue {min_eig:.3e} not positive")]
    NegativeSpectrum { min_eig: f64 },

    /// An evaluated metric is not positive-definite.
    #[error("metric not positive-definite: min eigenvalue {min_eig:.3e}")]
    MetricNotPositive { min_eig: f64 },

    /// Ring elements from different graded rings were combined.
    #[error("elements belong to different rings")]
    RingMismatch,

    /// A bundle operation received an operand of unsupported rank.
    #[error("{op} requires rank {expected}, got {got}")]
    RankMismatch {
        op: &'static str,
        expected: u32,
        got: u32,
    },

    /// The splitting-principle reduction left a non-symmetric residue.
    #[error("symmetric-function reduction failed: non-symmetric residue {detail}")]
    NonSymmetricResidue { detail: String },

    /// A textual ring/bundle/map descriptor could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    /// A run configuration is invalid.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
