//! Gauss–Legendre nodes and mapping degrees of sphere maps.
//!
//! The degree of a smooth F: S² → S² is (1/4π)∫ F*(area). In colatitude and
//! longitude (ϑ, λ) the integrand is ⟨F, dF(∂ϑ) × dF(∂λ)⟩; the quadrature is
//! Gauss–Legendre in ϑ and trapezoid in λ, which is spectrally accurate in
//! the periodic direction.

use nalgebra::Vector3;

use crate::geometry::{ProductPoint, TangentPair, UnitVec3};
use crate::maps::MapSpec;

/// Gauss–Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Bonnet recurrence for P_n(x) and P'_n(x).
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        weights[i] = w;
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Which factor of the product a sphere map reads from or writes to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Factor {
    First,
    Second,
}

/// Degree integral of y ↦ project(f(include(y))) where `include` pins the
/// other factor at `anchor`.
pub(crate) fn sphere_map_degree(
    f: &MapSpec,
    include: Factor,
    project: Factor,
    anchor: &UnitVec3,
    grid: usize,
) -> f64 {
    let (nodes, weights) = gauss_legendre(grid);
    let mut total = 0.0;
    let lambda_w = 2.0 * std::f64::consts::PI / grid as f64;
    for (node, w_theta) in nodes.iter().zip(&weights) {
        // Map [-1, 1] to colatitude [0, π].
        let theta = (node + 1.0) * std::f64::consts::FRAC_PI_2;
        let (sin_t, cos_t) = theta.sin_cos();
        for j in 0..grid {
            let lambda = lambda_w * j as f64;
            let (sin_l, cos_l) = lambda.sin_cos();
            let y = UnitVec3::new(sin_t * cos_l, sin_t * sin_l, cos_t).expect("grid point is unit");
            let t_theta = Vector3::new(cos_t * cos_l, cos_t * sin_l, -sin_t);
            let t_lambda = Vector3::new(-sin_t * sin_l, sin_t * cos_l, 0.0);

            let (at, s_theta, s_lambda) = match include {
                Factor::First => (
                    ProductPoint::new(y, *anchor),
                    TangentPair::new(t_theta, Vector3::zeros()),
                    TangentPair::new(t_lambda, Vector3::zeros()),
                ),
                Factor::Second => (
                    ProductPoint::new(*anchor, y),
                    TangentPair::new(Vector3::zeros(), t_theta),
                    TangentPair::new(Vector3::zeros(), t_lambda),
                ),
            };
            let (image, d_theta) = f.differential_analytic(&at, &s_theta);
            let (_, d_lambda) = f.differential_analytic(&at, &s_lambda);
            let (fx, du, dv) = match project {
                Factor::First => (image.p.coords(), d_theta.u, d_lambda.u),
                Factor::Second => (image.q.coords(), d_theta.v, d_lambda.v),
            };
            total += w_theta * std::f64::consts::FRAC_PI_2 * lambda_w * fx.dot(&du.cross(&dv));
        }
    }
    total / (4.0 * std::f64::consts::PI)
}
