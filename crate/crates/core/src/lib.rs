//! Numerical and exact verification toolkit for the equivariant geometry of
//! S² × S².
//!
//! The library has two halves. The numerical half works on the product of two
//! unit spheres in ℝ³ × ℝ³: anti-symplectic involutions, an equivariant twist
//! diffeomorphism built from a quaternion belt-trick extension, pullback and
//! pushforward of the product symplectic form in pointwise orthonormal frames,
//! the metric → compatible-almost-complex-structure retraction
//! J_g = (−A_g²)^{−1/2} A_g, mapping degrees on H₂ by spherical quadrature,
//! and integer winding classes of curves on the fixed torus. The exact half is
//! an 𝔽₂ graded-ring engine for Stiefel–Whitney calculus: Whitney sums, line
//! bundle twists with a splitting-principle oracle, and the mapping-torus w₃
//! computation over ℝP² × S¹ together with the homology bookkeeping for the
//! quotient Gr(2,4).
//!
//! Every check is a pure function; suites aggregate them into deterministic,
//! seedable reports (see [`report`] and [`suites`]).

pub mod charclass;
pub mod error;
pub mod geometry;
pub mod maps;
pub mod report;
pub mod retraction;
pub mod sample;
pub mod suites;
pub mod tol;
pub mod winding;

pub use error::Error;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;
