//! Points, tangent vectors, and charts on S² × S².
//!
//! Both factors are unit spheres in ℝ³. The stereographic chart follows the
//! convention z = (x₁ + i·x₂)/(1 − x₃), so z = 0 is the south pole,
//! z = ∞ the north pole, and |z| = 1 the equator x₃ = 0. With this choice the
//! chart formula (z, w) ↦ (z̄⁻¹, w̄⁻¹) is the Cartesian reflection
//! (x₁, x₂, x₃) ↦ (x₁, x₂, −x₃) and (z, w) ↦ (−z̄⁻¹, −w̄⁻¹) the antipodal
//! map; a dedicated chart-consistency test pins this down rather than
//! assuming it.

mod differential;
mod frame;

pub use differential::{differential, differential_matrix, pullback_form, DiffMode};
pub use frame::{product_form, round_metric, tangent_basis, Frame, FrameMatrices};

use nalgebra::Vector3;
use num_complex::Complex64;

use crate::error::Error;
use crate::tol;
use crate::Result;

/// A point on the unit sphere. Constructors renormalize and reject inputs
/// that are too short to carry a direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitVec3(Vector3<f64>);

impl UnitVec3 {
    pub fn new(x1: f64, x2: f64, x3: f64) -> Result<Self> {
        Self::from_vector(Vector3::new(x1, x2, x3))
    }

    pub fn from_vector(v: Vector3<f64>) -> Result<Self> {
        let norm = v.norm();
        if !norm.is_finite() || norm < 1e-8 {
            return Err(Error::NotNormalizable { norm });
        }
        // Skip the division inside a few-ulp band: already-unit inputs pass
        // through bitwise, so exact identities (σ∘σ, the twist at the
        // poles) stay exact.
        if (norm - 1.0).abs() <= 4.0 * f64::EPSILON {
            return Ok(UnitVec3(v));
        }
        Ok(UnitVec3(v / norm))
    }

    /// North pole (0, 0, 1).
    pub fn north() -> Self {
        UnitVec3(Vector3::new(0.0, 0.0, 1.0))
    }

    /// South pole (0, 0, −1).
    pub fn south() -> Self {
        UnitVec3(Vector3::new(0.0, 0.0, -1.0))
    }

    /// Point on the equator at azimuth `angle`.
    pub fn equator(angle: f64) -> Self {
        UnitVec3(Vector3::new(angle.cos(), angle.sin(), 0.0))
    }

    pub fn coords(&self) -> Vector3<f64> {
        self.0
    }

    pub fn x1(&self) -> f64 {
        self.0.x
    }

    pub fn x2(&self) -> f64 {
        self.0.y
    }

    pub fn x3(&self) -> f64 {
        self.0.z
    }

    pub fn antipode(&self) -> Self {
        UnitVec3(-self.0)
    }

    /// Mirror through the equatorial plane, (x₁, x₂, x₃) ↦ (x₁, x₂, −x₃).
    pub fn mirror_x3(&self) -> Self {
        UnitVec3(Vector3::new(self.0.x, self.0.y, -self.0.z))
    }

    pub fn unit_norm_residual(&self) -> f64 {
        (self.0.norm_squared() - 1.0).abs()
    }

    pub fn distance(&self, other: &Self) -> f64 {
        (self.0 - other.0).norm()
    }
}

/// A point of S² × S² as a pair of unit vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductPoint {
    pub p: UnitVec3,
    pub q: UnitVec3,
}

impl ProductPoint {
    pub fn new(p: UnitVec3, q: UnitVec3) -> Self {
        ProductPoint { p, q }
    }

    /// Point of the torus L = {x₃ = 0} × {y₃ = 0} at angles (α, β).
    pub fn on_torus(alpha: f64, beta: f64) -> Self {
        ProductPoint::new(UnitVec3::equator(alpha), UnitVec3::equator(beta))
    }

    pub fn distance(&self, other: &Self) -> f64 {
        (self.p.distance(&other.p).powi(2) + self.q.distance(&other.q).powi(2)).sqrt()
    }
}

/// A tangent vector to the product: `u` at the first factor, `v` at the
/// second.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentPair {
    pub u: Vector3<f64>,
    pub v: Vector3<f64>,
}

impl TangentPair {
    pub fn new(u: Vector3<f64>, v: Vector3<f64>) -> Self {
        TangentPair { u, v }
    }

    pub fn zero() -> Self {
        TangentPair::new(Vector3::zeros(), Vector3::zeros())
    }

    /// Max of |⟨u, p⟩| and |⟨v, q⟩|.
    pub fn tangency_residual(&self, at: &ProductPoint) -> f64 {
        self.u
            .dot(&at.p.coords())
            .abs()
            .max(self.v.dot(&at.q.coords()).abs())
    }

    /// Orthogonal projection onto the tangent space at `at`.
    pub fn projected(&self, at: &ProductPoint) -> Self {
        let p = at.p.coords();
        let q = at.q.coords();
        TangentPair::new(self.u - p * self.u.dot(&p), self.v - q * self.v.dot(&q))
    }

    pub fn scaled(&self, a: f64) -> Self {
        TangentPair::new(self.u * a, self.v * a)
    }

    pub fn add(&self, other: &Self) -> Self {
        TangentPair::new(self.u + other.u, self.v + other.v)
    }

    pub fn norm(&self) -> f64 {
        (self.u.norm_squared() + self.v.norm_squared()).sqrt()
    }
}

/// Stereographic coordinate of a point on one sphere factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StereoCoord {
    Finite(Complex64),
    Infinity,
}

impl StereoCoord {
    pub fn finite(re: f64, im: f64) -> Self {
        StereoCoord::Finite(Complex64::new(re, im))
    }

    /// z ↦ z̄⁻¹, with 0 ↔ ∞. Fixes the unit circle pointwise.
    pub fn conj_inverse(&self) -> Self {
        match self {
            StereoCoord::Infinity => StereoCoord::Finite(Complex64::new(0.0, 0.0)),
            StereoCoord::Finite(z) if z.norm_sqr() == 0.0 => StereoCoord::Infinity,
            StereoCoord::Finite(z) => StereoCoord::Finite(z / z.norm_sqr()),
        }
    }

    /// z ↦ −z̄⁻¹, the antipodal map in the chart.
    pub fn neg_conj_inverse(&self) -> Self {
        match self.conj_inverse() {
            StereoCoord::Infinity => StereoCoord::Infinity,
            StereoCoord::Finite(z) => StereoCoord::Finite(-z),
        }
    }
}

/// Inverse stereographic projection; z = 0 is the south pole, ∞ the north.
pub fn stereo_to_cartesian(z: StereoCoord) -> UnitVec3 {
    match z {
        StereoCoord::Infinity => UnitVec3::north(),
        StereoCoord::Finite(z) => {
            let r2 = z.norm_sqr();
            if !r2.is_finite() {
                return UnitVec3::north();
            }
            let denom = r2 + 1.0;
            // Exact on the nose; renormalization only scrubs roundoff.
            UnitVec3::new(2.0 * z.re / denom, 2.0 * z.im / denom, (r2 - 1.0) / denom)
                .expect("stereographic image is never degenerate")
        }
    }
}

/// Stereographic projection, z = (x₁ + i·x₂)/(1 − x₃).
pub fn cartesian_to_stereo(x: &UnitVec3) -> StereoCoord {
    let denom = 1.0 - x.x3();
    if denom <= tol::UNIT_NORM {
        StereoCoord::Infinity
    } else {
        StereoCoord::finite(x.x1() / denom, x.x2() / denom)
    }
}

/// Chordal distance on the chart domain ℂ ∪ {∞}: the ambient distance of
/// the stereographic images, 2|z − w|/√((1+|z|²)(1+|w|²)). The Euclidean
/// |z − w| is not uniformly meaningful near ∞, where f64 coordinates of the
/// underlying point cannot resolve it to any fixed absolute accuracy.
pub fn chordal_distance(a: StereoCoord, b: StereoCoord) -> f64 {
    match (a, b) {
        (StereoCoord::Infinity, StereoCoord::Infinity) => 0.0,
        (StereoCoord::Infinity, StereoCoord::Finite(z))
        | (StereoCoord::Finite(z), StereoCoord::Infinity) => 2.0 / (1.0 + z.norm_sqr()).sqrt(),
        (StereoCoord::Finite(z), StereoCoord::Finite(w)) => {
            2.0 * (z - w).norm() / ((1.0 + z.norm_sqr()) * (1.0 + w.norm_sqr())).sqrt()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn pole_conventions() {
        let south = stereo_to_cartesian(StereoCoord::finite(0.0, 0.0));
        assert_eq!(south.coords(), Vector3::new(0.0, 0.0, -1.0));
        let north = stereo_to_cartesian(StereoCoord::Infinity);
        assert_eq!(north.coords(), Vector3::new(0.0, 0.0, 1.0));
    }

    #[test]
    fn equator_point() {
        let x = stereo_to_cartesian(StereoCoord::finite(1.0, 0.0));
        assert_abs_diff_eq!(x.coords(), Vector3::new(1.0, 0.0, 0.0), epsilon = 1e-15);
    }

    // z = 2: solving x1/(1 − x3) = 2 with x1² + x3² = 1 gives (4/5, 0, 3/5);
    // the round trip below confirms it independently of the algebra.
    #[test]
    fn z_two_lands_on_four_fifths() {
        let x = stereo_to_cartesian(StereoCoord::finite(2.0, 0.0));
        assert_abs_diff_eq!(x.coords(), Vector3::new(0.8, 0.0, 0.6), epsilon = 1e-15);
        match cartesian_to_stereo(&x) {
            StereoCoord::Finite(z) => {
                assert_abs_diff_eq!(z.re, 2.0, epsilon = tol::CHART_ROUNDTRIP);
                assert_abs_diff_eq!(z.im, 0.0, epsilon = tol::CHART_ROUNDTRIP);
            }
            StereoCoord::Infinity => panic!("finite point projected to infinity"),
        }
    }

    // Round trips hold in the chordal metric right up to the sampling
    // exclusion radius, including points whose |z| is in the thousands.
    #[test]
    fn chart_round_trip_survives_near_poles() {
        for one_minus_x3 in [5e-7f64, 1e-5, 1e-3, 0.5] {
            let x3 = 1.0 - one_minus_x3;
            let planar = (1.0 - x3 * x3).sqrt();
            let x = UnitVec3::new(planar * 0.6, planar * 0.8, x3).unwrap();
            let z = cartesian_to_stereo(&x);
            assert!(stereo_to_cartesian(z).distance(&x) < tol::CHART_ROUNDTRIP);
            let again = cartesian_to_stereo(&stereo_to_cartesian(z));
            assert!(chordal_distance(z, again) < tol::CHART_ROUNDTRIP);
        }
    }

    #[test]
    fn chordal_metric_matches_ambient_distance() {
        for (a, b) in [
            (StereoCoord::finite(0.0, 0.0), StereoCoord::Infinity),
            (StereoCoord::finite(1.0, 0.0), StereoCoord::finite(0.0, 1.0)),
            (StereoCoord::finite(250.0, -4.0), StereoCoord::Infinity),
            (StereoCoord::finite(3.0, 2.0), StereoCoord::finite(3.0, 2.5)),
        ] {
            let ambient = stereo_to_cartesian(a).distance(&stereo_to_cartesian(b));
            assert_abs_diff_eq!(chordal_distance(a, b), ambient, epsilon = 1e-9);
        }
    }

    #[test]
    fn unit_circle_is_equator() {
        for k in 0..16 {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / 16.0;
            let x = stereo_to_cartesian(StereoCoord::finite(theta.cos(), theta.sin()));
            assert!(x.x3().abs() < 1e-15);
        }
    }

    #[test]
    fn degenerate_vector_rejected() {
        assert!(UnitVec3::new(0.0, 0.0, 0.0).is_err());
        assert!(UnitVec3::new(f64::NAN, 0.0, 0.0).is_err());
    }

    #[test]
    fn tangent_projection_kills_normal_component() {
        let at = ProductPoint::new(UnitVec3::north(), UnitVec3::equator(0.3));
        let raw = TangentPair::new(Vector3::new(1.0, 2.0, 3.0), Vector3::new(-1.0, 0.5, 2.0));
        let t = raw.projected(&at);
        assert!(t.tangency_residual(&at) < tol::TANGENT);
    }
}
