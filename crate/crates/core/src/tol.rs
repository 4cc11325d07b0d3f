//! The tolerance ladder.
//!
//! Every threshold used by the checks is defined here. The ladder has three
//! rungs: machine-precision identities (algebraic formulas evaluated once),
//! structural identities (a handful of 4×4 factorizations and solves), and
//! finite-difference comparisons (dominated by the truncation of the
//! fourth-order central stencil at step [`FD_STEP`]).

/// Unit-norm residual |x·x − 1| accepted after renormalization.
pub const UNIT_NORM: f64 = 1e-12;

/// Tangency residual |⟨u, p⟩| accepted by the tangent-pair invariant.
pub const TANGENT: f64 = 1e-10;

/// Tangency residual beyond which bilinear-form operations reject their input.
pub const TANGENT_PRE: f64 = 1e-8;

/// Chart round-trip residual (stereographic ↔ Cartesian) away from poles.
pub const CHART_ROUNDTRIP: f64 = 1e-10;

/// Pole-neighborhood radius excluded from chart round-trip sampling.
pub const POLE_EXCLUSION: f64 = 1e-3;

/// Central-difference step for numerical differentials (fourth-order
/// stencil at ±FD_STEP, ±2·FD_STEP).
pub const FD_STEP: f64 = 1e-5;

/// Agreement between analytic and finite-difference differentials on unit
/// tangents. The twist ramp concentrates third derivatives near 1e5, so a
/// second-order stencil would already exhaust this budget; the
/// fourth-order one leaves orders of margin.
pub const FD_AGREEMENT: f64 = 1e-6;

/// Residual for identities evaluated through analytic differentials.
pub const ANALYTIC_RESIDUAL: f64 = 1e-9;

/// Residual for σ∘σ = id and other closed-form involution identities.
pub const INVOLUTION: f64 = 1e-12;

/// Residual for σ*ω = −ω with analytic differentials.
pub const ANTISYMPLECTIC_ANALYTIC: f64 = 1e-8;

/// Residual for pullback/pushforward identities with finite differences.
pub const ANTISYMPLECTIC_FD: f64 = 1e-5;

/// |det| below which a pulled-back 2-form is flagged degenerate.
pub const NONDEGENERATE_DET: f64 = 1e-10;

/// Linear-solve residuals (defining identity of A_g, S² − P).
pub const LINSOLVE: f64 = 1e-10;

/// Structural identities of the retraction: J² + I, ω(J·,J·) − ω, scale
/// invariance, retraction identity.
pub const STRUCTURAL: f64 = 1e-8;

/// Cross-point identities that transport a field through dσ.
pub const CROSS_POINT: f64 = 1e-7;

/// Condition number of a metric above which A_g is not solved for.
pub const CONDITION_MAX: f64 = 1e8;

/// Smallest eigenvalue accepted by the g-self-adjoint square root.
pub const SQRT_MIN_EIG: f64 = 1e-10;

/// Smallest eigenvalue accepted of an evaluated metric.
pub const METRIC_MIN_EIG: f64 = 1e-8;

/// Jacobian determinant lower bound certifying local diffeomorphism.
pub const JACOBIAN_MIN: f64 = 1e-3;

/// Distance from the equatorial torus beyond which a pushed curve errors.
pub const TORUS: f64 = 1e-8;

/// Distance of a winding sum from the nearest integer before rounding.
pub const WINDING_INT: f64 = 1e-6;

/// Residue of a quadrature degree from the nearest integer.
pub const DEGREE_RESIDUE: f64 = 0.1;

/// Pairwise minimum displacement certifying a fixed-point-free involution.
pub const FREE_ACTION_MIN: f64 = 1.9;
