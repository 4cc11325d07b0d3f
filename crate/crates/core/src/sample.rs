//! Seeded random sampling of points and tangent vectors.
//!
//! All suites draw from [`rand_chacha::ChaCha8Rng`], a portable counter-based
//! generator, so reports are reproducible byte-for-byte from the recorded
//! seed.

use nalgebra::Vector3;
use rand::Rng;

use crate::geometry::{ProductPoint, TangentPair, UnitVec3};

/// Name of the generator recorded in reports.
pub const GENERATOR: &str = "chacha8";

fn gaussian3<R: Rng>(rng: &mut R) -> Vector3<f64> {
    // Box-Muller; two calls give three normals with one spare draw.
    let mut normals = [0.0f64; 4];
    for pair in normals.chunks_mut(2) {
        let u1: f64 = rng.random::<f64>().max(1e-300);
        let u2: f64 = rng.random();
        let r = (-2.0 * u1.ln()).sqrt();
        let phi = 2.0 * std::f64::consts::PI * u2;
        pair[0] = r * phi.cos();
        if pair.len() > 1 {
            pair[1] = r * phi.sin();
        }
    }
    Vector3::new(normals[0], normals[1], normals[2])
}

/// Uniform point on the unit sphere.
pub fn unit_vec<R: Rng>(rng: &mut R) -> UnitVec3 {
    loop {
        if let Ok(v) = UnitVec3::from_vector(gaussian3(rng)) {
            return v;
        }
    }
}

/// Uniform point on the product of spheres.
pub fn product_point<R: Rng>(rng: &mut R) -> ProductPoint {
    ProductPoint::new(unit_vec(rng), unit_vec(rng))
}

/// Uniform point with both factors at least `radius` away from the poles
/// x₃ = ±1 (chordal distance).
pub fn product_point_off_poles<R: Rng>(rng: &mut R, radius: f64) -> ProductPoint {
    loop {
        let pt = product_point(rng);
        let clear = |x: &UnitVec3| (1.0 - x.x3().abs()) > radius * radius / 2.0;
        if clear(&pt.p) && clear(&pt.q) {
            return pt;
        }
    }
}

/// Random unit tangent pair at `at` (round-metric norm 1).
pub fn unit_tangent<R: Rng>(rng: &mut R, at: &ProductPoint) -> TangentPair {
    loop {
        let raw = TangentPair::new(gaussian3(rng), gaussian3(rng)).projected(at);
        let n = raw.norm();
        if n > 1e-6 {
            return raw.scaled(1.0 / n);
        }
    }
}
