//! Differentials of maps of S² × S² and pullbacks of the product form.

use nalgebra::{Matrix4, Vector3};

use super::{Frame, ProductPoint, TangentPair, UnitVec3};
use crate::error::Error;
use crate::maps::MapSpec;
use crate::tol;
use crate::Result;

/// How a differential is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffMode {
    Analytic,
    /// Fourth-order central differences at step [`tol::FD_STEP`] along
    /// sphere geodesics, with tangential projection of the result. The
    /// second-order stencil is not accurate enough where the twist ramp
    /// concentrates third derivatives (~1e5), which would leave O(2e−6)
    /// truncation at step 1e−5.
    FiniteDifference,
}

/// Geodesic step on one sphere: exp_p(w) for w ⊥ p.
fn sphere_exp(p: &UnitVec3, w: &Vector3<f64>) -> UnitVec3 {
    let r = w.norm();
    if r == 0.0 {
        return *p;
    }
    UnitVec3::from_vector(p.coords() * r.cos() + w * (r.sin() / r))
        .expect("geodesic step stays on the sphere")
}

fn product_exp(at: &ProductPoint, t: &TangentPair) -> ProductPoint {
    ProductPoint::new(sphere_exp(&at.p, &t.u), sphere_exp(&at.q, &t.v))
}

/// Differential of `map` at `at` applied to the tangent pair `s`.
pub fn differential(
    map: &MapSpec,
    at: &ProductPoint,
    s: &TangentPair,
    mode: DiffMode,
) -> Result<TangentPair> {
    match mode {
        DiffMode::Analytic => Ok(map.differential_analytic(at, s).1),
        DiffMode::FiniteDifference => {
            let h = tol::FD_STEP;
            let at_step = |t: f64| map.eval(&product_exp(at, &s.scaled(t)));
            let p2 = at_step(2.0 * h);
            let p1 = at_step(h);
            let m1 = at_step(-h);
            let m2 = at_step(-2.0 * h);
            let image = map.eval(at);
            // (−f(2h) + 8f(h) − 8f(−h) + f(−2h)) / 12h.
            let stencil =
                |a2: Vector3<f64>, a1: Vector3<f64>, b1: Vector3<f64>, b2: Vector3<f64>| {
                    (-a2 + 8.0 * a1 - 8.0 * b1 + b2) / (12.0 * h)
                };
            let raw = TangentPair::new(
                stencil(p2.p.coords(), p1.p.coords(), m1.p.coords(), m2.p.coords()),
                stencil(p2.q.coords(), p1.q.coords(), m1.q.coords(), m2.q.coords()),
            );
            Ok(raw.projected(&image))
        }
    }
}

/// Image point and the 4×4 matrix of the differential from the standard
/// frame at `at` to the standard frame at the image.
pub fn differential_matrix(
    map: &MapSpec,
    at: &ProductPoint,
    mode: DiffMode,
) -> Result<(ProductPoint, Matrix4<f64>)> {
    let frame = Frame::standard(at);
    let image = map.eval(at);
    let image_frame = Frame::standard(&image);
    let mut d = Matrix4::zeros();
    for (i, b) in frame.basis.iter().enumerate() {
        let db = differential(map, at, b, mode)?;
        d.set_column(i, &image_frame.coords_of(&db));
    }
    Ok((image, d))
}

/// Matrix of (map*ω) at `at` in the standard frame:
/// Ω'ᵢⱼ = ω_{map(at)}(df bᵢ, df bⱼ).
///
/// Errors with [`Error::NondegeneracyFail`] when the result is degenerate,
/// which signals that a pushed-forward form failed to be symplectic at the
/// sample.
pub fn pullback_form(map: &MapSpec, at: &ProductPoint, mode: DiffMode) -> Result<Matrix4<f64>> {
    let frame = Frame::standard(at);
    let image = map.eval(at);
    let mut images = Vec::with_capacity(4);
    for b in &frame.basis {
        images.push(differential(map, at, b, mode)?);
    }
    let mut out = Matrix4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            // The differential of a smooth map is exactly tangent; projection
            // already happened, so evaluate the form directly.
            out[(i, j)] = image.p.coords().dot(&images[i].u.cross(&images[j].u))
                + image.q.coords().dot(&images[i].v.cross(&images[j].v));
        }
    }
    let det = out.determinant();
    if det.abs() < tol::NONDEGENERATE_DET {
        return Err(Error::NondegeneracyFail { det, at: *at });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::FrameMatrices;
    use crate::sample;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn max_abs(m: &Matrix4<f64>) -> f64 {
        m.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
    }

    #[test]
    fn identity_differential_is_identity() {
        let map = MapSpec::Compose(vec![]);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let at = sample::product_point(&mut rng);
            let s = sample::unit_tangent(&mut rng, &at);
            let ds = differential(&map, &at, &s, DiffMode::Analytic).unwrap();
            assert!(ds.add(&s.scaled(-1.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn antipodal_differential_transports_negated() {
        let map = MapSpec::SigmaQ40;
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let at = sample::product_point(&mut rng);
        let s = sample::unit_tangent(&mut rng, &at);
        let ds = differential(&map, &at, &s, DiffMode::Analytic).unwrap();
        assert!((ds.u + s.u).norm() < 1e-15 && (ds.v + s.v).norm() < 1e-15);
    }

    #[test]
    fn finite_difference_matches_analytic_on_all_builtins() {
        let atomic = [
            MapSpec::SigmaQ22,
            MapSpec::SigmaQ40,
            MapSpec::ReflectF,
            MapSpec::twist(2, 0.5).unwrap(),
            MapSpec::twist(4, 0.5).unwrap(),
        ];
        let composite = [
            MapSpec::Power {
                base: Box::new(MapSpec::twist(2, 0.5).unwrap()),
                k: 3,
            },
            MapSpec::Compose(vec![MapSpec::SigmaQ22, MapSpec::twist(2, 0.5).unwrap()]),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (map, limit) in atomic
            .iter()
            .chain(composite.iter())
            .map(|m| (m, tol::FD_AGREEMENT))
        {
            for _ in 0..50 {
                let at = sample::product_point(&mut rng);
                let s = sample::unit_tangent(&mut rng, &at);
                let a = differential(map, &at, &s, DiffMode::Analytic).unwrap();
                let f = differential(map, &at, &s, DiffMode::FiniteDifference).unwrap();
                assert!(
                    a.add(&f.scaled(-1.0)).norm() < limit,
                    "map {map:?} disagrees by {}",
                    a.add(&f.scaled(-1.0)).norm()
                );
            }
        }
    }

    // Band point sanity for the twist, against the finite-difference oracle.
    #[test]
    fn twist_band_differential_against_fd() {
        let map = MapSpec::twist(2, 0.5).unwrap();
        let at = ProductPoint::on_torus(0.4, 1.1);
        let frame = Frame::standard(&at);
        for b in &frame.basis {
            let a = differential(&map, &at, b, DiffMode::Analytic).unwrap();
            let f = differential(&map, &at, b, DiffMode::FiniteDifference).unwrap();
            assert!(a.add(&f.scaled(-1.0)).norm() < tol::FD_AGREEMENT);
        }
    }

    // Directed probes at the ramp seams, where the third derivative jumps
    // (the construction is only C²). The fourth-order stencil cancels the
    // f''' term on each side separately, so seam-straddling differences stay
    // accurate.
    #[test]
    fn twist_differential_at_zone_seams() {
        let delta = 0.5f64;
        let map = MapSpec::twist(2, delta).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let seams = [
            (delta / 2.0).tanh(),
            delta.tanh(),
            -(delta / 2.0).tanh(),
            -delta.tanh(),
        ];
        for seam in seams {
            for offset in [-tol::FD_STEP / 2.0, 0.0, tol::FD_STEP / 2.0] {
                let z = (seam + offset).clamp(-1.0, 1.0);
                let r = (1.0 - z * z).sqrt();
                let q = UnitVec3::new(r * 0.6, r * 0.8, z).unwrap();
                let at = ProductPoint::new(sample::unit_vec(&mut rng), q);
                let s = sample::unit_tangent(&mut rng, &at);
                let a = differential(&map, &at, &s, DiffMode::Analytic).unwrap();
                let f = differential(&map, &at, &s, DiffMode::FiniteDifference).unwrap();
                assert!(
                    a.add(&f.scaled(-1.0)).norm() < tol::FD_AGREEMENT,
                    "seam {seam} offset {offset}: {}",
                    a.add(&f.scaled(-1.0)).norm()
                );
            }
        }
    }

    // Analytic differentials land exactly in the tangent space of the image.
    #[test]
    fn analytic_differentials_are_tangent() {
        let maps = [
            MapSpec::SigmaQ22,
            MapSpec::SigmaQ40,
            MapSpec::ReflectF,
            MapSpec::twist(4, 0.5).unwrap(),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for map in &maps {
            for _ in 0..100 {
                let at = sample::product_point(&mut rng);
                let s = sample::unit_tangent(&mut rng, &at);
                let (image, ds) = map.differential_analytic(&at, &s);
                assert!(ds.tangency_residual(&image) < tol::TANGENT);
            }
        }
    }

    #[test]
    fn differential_is_linear() {
        let map = MapSpec::twist(2, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..30 {
            let at = sample::product_point(&mut rng);
            let s = sample::unit_tangent(&mut rng, &at);
            let t = sample::unit_tangent(&mut rng, &at);
            let a = 1.7;
            let lhs = differential(&map, &at, &s.scaled(a).add(&t), DiffMode::Analytic).unwrap();
            let rhs = differential(&map, &at, &s, DiffMode::Analytic)
                .unwrap()
                .scaled(a)
                .add(&differential(&map, &at, &t, DiffMode::Analytic).unwrap());
            assert!(lhs.add(&rhs.scaled(-1.0)).norm() < tol::ANALYTIC_RESIDUAL);
        }
    }

    #[test]
    fn chain_rule_in_finite_differences() {
        let f = MapSpec::twist(2, 0.5).unwrap();
        let g = MapSpec::SigmaQ22;
        let composed = MapSpec::Compose(vec![f.clone(), g.clone()]);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let at = sample::product_point(&mut rng);
            let s = sample::unit_tangent(&mut rng, &at);
            let direct = differential(&composed, &at, &s, DiffMode::FiniteDifference).unwrap();
            let df = differential(&f, &at, &s, DiffMode::FiniteDifference).unwrap();
            let mid = f.eval(&at);
            let dgf = differential(&g, &mid, &df, DiffMode::FiniteDifference).unwrap();
            assert!(direct.add(&dgf.scaled(-1.0)).norm() < tol::FD_AGREEMENT);
        }
    }

    #[test]
    fn pullback_by_identity_is_omega() {
        let at = ProductPoint::on_torus(0.2, -0.7);
        let fm = FrameMatrices::round_product(&at).unwrap();
        let pulled = pullback_form(&MapSpec::Compose(vec![]), &at, DiffMode::Analytic).unwrap();
        assert_abs_diff_eq!(pulled, fm.omega, epsilon = 1e-12);
    }

    #[test]
    fn pullback_by_reflection_negates_omega() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..50 {
            let at = sample::product_point(&mut rng);
            let fm = FrameMatrices::round_product(&at).unwrap();
            let pulled = pullback_form(&MapSpec::SigmaQ22, &at, DiffMode::Analytic).unwrap();
            assert!(max_abs(&(pulled + fm.omega)) < 1e-9);
        }
    }

    #[test]
    fn pullback_by_twist_nondegenerate_but_not_plus_minus_omega() {
        let map = MapSpec::twist(2, 0.5).unwrap();
        let at = ProductPoint::new(
            UnitVec3::new(0.6, 0.3, 0.74).unwrap(),
            UnitVec3::new(0.4, -0.8, 0.45).unwrap(),
        );
        let fm = FrameMatrices::round_product(&at).unwrap();
        let pulled = pullback_form(&map, &at, DiffMode::Analytic).unwrap();
        assert!((pulled + pulled.transpose()).norm() < 1e-9);
        assert!(pulled.determinant().abs() > tol::NONDEGENERATE_DET);
        let diff_plus = max_abs(&(pulled - fm.omega));
        let diff_minus = max_abs(&(pulled + fm.omega));
        assert!(diff_plus > 1e-3 && diff_minus > 1e-3);
    }
}
