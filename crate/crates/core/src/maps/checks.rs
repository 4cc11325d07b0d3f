//! Verification operations on maps: equivariance, anti-symplecticity,
//! pushforward forms, the H₂ action, and fixed-locus scans.

use nalgebra::Matrix4;
use rand::Rng;

use super::quadrature::{sphere_map_degree, Factor};
use super::MapSpec;
use crate::error::Error;
use crate::geometry::{pullback_form, DiffMode, FrameMatrices, ProductPoint, UnitVec3};
use crate::sample;
use crate::tol;
use crate::Result;

fn max_abs(m: &Matrix4<f64>) -> f64 {
    m.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
}

/// Max-error scan over random samples.
#[derive(Debug, Clone)]
pub struct MaxErrorReport {
    pub samples: u64,
    pub max_error: f64,
    pub tolerance: f64,
    pub worst: Option<ProductPoint>,
}

impl MaxErrorReport {
    pub fn pass(&self) -> bool {
        self.max_error <= self.tolerance
    }
}

/// Max over samples of distance(f(σ(pt)), σ(f(pt))).
pub fn check_equivariance<R: Rng>(
    f: &MapSpec,
    sigma: &MapSpec,
    samples: u64,
    rng: &mut R,
) -> MaxErrorReport {
    let mut max_error = 0.0f64;
    let mut worst = None;
    for _ in 0..samples {
        let pt = sample::product_point(rng);
        let err = f.eval(&sigma.eval(&pt)).distance(&sigma.eval(&f.eval(&pt)));
        if err > max_error {
            max_error = err;
            worst = Some(pt);
        }
    }
    MaxErrorReport {
        samples,
        max_error,
        tolerance: tol::ANALYTIC_RESIDUAL,
        worst,
    }
}

/// Max over samples of ‖(σ*ω) + ω‖ in the standard frame.
pub fn check_antisymplectic<R: Rng>(
    sigma: &MapSpec,
    samples: u64,
    mode: DiffMode,
    rng: &mut R,
) -> Result<MaxErrorReport> {
    let tolerance = match mode {
        DiffMode::Analytic => tol::ANTISYMPLECTIC_ANALYTIC,
        DiffMode::FiniteDifference => tol::ANTISYMPLECTIC_FD,
    };
    let mut max_error = 0.0f64;
    let mut worst = None;
    for _ in 0..samples {
        let pt = sample::product_point(rng);
        let fm = FrameMatrices::round_product(&pt)?;
        let pulled = pullback_form(sigma, &pt, mode)?;
        let err = max_abs(&(pulled + fm.omega));
        if err > max_error {
            max_error = err;
            worst = Some(pt);
        }
    }
    Ok(MaxErrorReport {
        samples,
        max_error,
        tolerance,
        worst,
    })
}

/// Pointwise verification that (f^k)_*ω is symplectic and σ-anti-invariant.
#[derive(Debug, Clone)]
pub struct PushforwardReport {
    pub k: u32,
    pub samples: u64,
    pub equivariance: MaxErrorReport,
    pub max_antisymmetry: f64,
    pub min_abs_det: f64,
    pub max_anti_invariance: f64,
    pub tolerance: f64,
}

impl PushforwardReport {
    pub fn pass(&self) -> bool {
        self.equivariance.pass()
            && self.max_antisymmetry <= self.tolerance
            && self.min_abs_det > tol::NONDEGENERATE_DET
            && self.max_anti_invariance <= self.tolerance
    }
}

/// Checks (f^k)_*ω at random samples. The pushforward is evaluated as the
/// pullback under the exact inverse, (f^k)_*ω = ((f⁻¹)^k)*ω, and the
/// anti-invariance σ*η = −η as a pullback under σ followed by the inverse.
pub fn pushforward_form_check<R: Rng>(
    f: &MapSpec,
    k: u32,
    sigma: &MapSpec,
    samples: u64,
    mode: DiffMode,
    rng: &mut R,
) -> Result<PushforwardReport> {
    // Precondition: f must be σ-equivariant, otherwise the pushforward is
    // not anti-invariant to begin with.
    let equivariance = check_equivariance(f, sigma, samples.min(200), rng);
    let tolerance = match mode {
        DiffMode::Analytic => tol::ANTISYMPLECTIC_ANALYTIC,
        DiffMode::FiniteDifference => tol::ANTISYMPLECTIC_FD,
    };
    let inv_k = MapSpec::power(f.inverse(), k);
    let sigma_then_inv = MapSpec::Compose(vec![sigma.clone(), inv_k.clone()]);
    let mut max_antisymmetry = 0.0f64;
    let mut min_abs_det = f64::INFINITY;
    let mut max_anti_invariance = 0.0f64;
    for _ in 0..samples {
        let pt = sample::product_point(rng);
        let eta = pullback_form(&inv_k, &pt, mode)?;
        let pulled_back = pullback_form(&sigma_then_inv, &pt, mode)?;
        max_antisymmetry = max_antisymmetry.max(max_abs(&(eta + eta.transpose())));
        min_abs_det = min_abs_det.min(eta.determinant().abs());
        max_anti_invariance = max_anti_invariance.max(max_abs(&(pulled_back + eta)));
    }
    Ok(PushforwardReport {
        k,
        samples,
        equivariance,
        max_antisymmetry,
        min_abs_det,
        max_anti_invariance,
        tolerance,
    })
}

/// The matrix of f_* on H₂ in the basis A = [{z₀} × S²], B = [S² × {w₀}],
/// by numerical mapping degrees.
#[derive(Debug, Clone)]
pub struct DegreeReport {
    /// Columns are f_*A and f_*B in the (A, B) basis.
    pub matrix: [[i64; 2]; 2],
    pub max_residue: f64,
    pub grid: usize,
}

impl DegreeReport {
    pub fn is_identity(&self) -> bool {
        self.matrix == [[1, 0], [0, 1]]
    }
}

/// Generic anchors for the two fibers; nothing in the checks depends on the
/// choice.
fn anchors() -> (UnitVec3, UnitVec3) {
    (
        UnitVec3::new(0.36, 0.48, 0.8).expect("unit"),
        UnitVec3::new(0.48, -0.64, 0.6).expect("unit"),
    )
}

/// Computes the four degrees on a grid, refining ×2 until the rounded
/// matrix agrees on two consecutive grids with residue below
/// [`tol::DEGREE_RESIDUE`], or the cap is reached. A single grid is not
/// trusted: a coarse quadrature can converge-look near a wrong integer.
pub fn h2_action_degrees(f: &MapSpec, grid_start: usize, grid_cap: usize) -> Result<DegreeReport> {
    let (z0, w0) = anchors();
    let mut grid = grid_start.max(8);
    let mut previous: Option<[[i64; 2]; 2]> = None;
    loop {
        // Degrees of the projections of f restricted to the two fibers:
        // f_*A coefficients come from the fiber {z₀} × S², f_*B from
        // S² × {w₀}; the coefficient of A is the degree of the w-projection
        // and the coefficient of B the degree of the z-projection.
        let raw = [
            [
                sphere_map_degree(f, Factor::Second, Factor::Second, &z0, grid),
                sphere_map_degree(f, Factor::First, Factor::Second, &w0, grid),
            ],
            [
                sphere_map_degree(f, Factor::Second, Factor::First, &z0, grid),
                sphere_map_degree(f, Factor::First, Factor::First, &w0, grid),
            ],
        ];
        let mut matrix = [[0i64; 2]; 2];
        let mut max_residue = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                let rounded = raw[i][j].round();
                matrix[i][j] = rounded as i64;
                max_residue = max_residue.max((raw[i][j] - rounded).abs());
            }
        }
        if max_residue < tol::DEGREE_RESIDUE && previous == Some(matrix) {
            return Ok(DegreeReport {
                matrix,
                max_residue,
                grid,
            });
        }
        previous = (max_residue < tol::DEGREE_RESIDUE).then_some(matrix);
        if grid * 2 > grid_cap {
            return Err(Error::RoundingAmbiguous {
                residue: max_residue,
                grid,
            });
        }
        grid *= 2;
    }
}

/// Fixed-locus description of an involution over a deterministic grid.
#[derive(Debug, Clone)]
pub struct FixedLocusReport {
    pub sigma: String,
    pub grid_points: usize,
    /// Minimum displacement over the product grid.
    pub min_displacement: f64,
    /// Number of grid points displaced by less than [`tol::TORUS`].
    pub fixed_count: usize,
    /// Max of |x₃|, |y₃| over those fixed points (None when there are none).
    pub max_off_torus: Option<f64>,
    /// Max displacement over an explicit torus grid.
    pub torus_max_displacement: f64,
}

/// Displacement as the larger of the two factor displacements, so the
/// antipodal map displaces by exactly 2 and the reflection by 2|x₃|.
fn sup_displacement(a: &ProductPoint, b: &ProductPoint) -> f64 {
    a.p.distance(&b.p).max(a.q.distance(&b.q))
}

/// Spherical Fibonacci point set.
fn fibonacci_sphere(n: usize) -> Vec<UnitVec3> {
    let golden = std::f64::consts::PI * (3.0 - 5.0f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = golden * i as f64;
            UnitVec3::new(r * phi.cos(), r * phi.sin(), z).expect("unit")
        })
        .collect()
}

/// Scans σ over a per-factor grid of size `n` (n² product points) plus an
/// n² grid on the torus.
pub fn fixed_locus_scan(sigma: &MapSpec, n: usize) -> FixedLocusReport {
    let sphere = fibonacci_sphere(n);
    let mut min_displacement = f64::INFINITY;
    let mut fixed_count = 0usize;
    let mut max_off_torus: Option<f64> = None;
    for p in &sphere {
        for q in &sphere {
            let pt = ProductPoint::new(*p, *q);
            let d = sup_displacement(&sigma.eval(&pt), &pt);
            min_displacement = min_displacement.min(d);
            if d < tol::TORUS {
                fixed_count += 1;
                let off = p.x3().abs().max(q.x3().abs());
                max_off_torus = Some(max_off_torus.map_or(off, |m: f64| m.max(off)));
            }
        }
    }
    let mut torus_max_displacement = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let alpha = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            let beta = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
            let pt = ProductPoint::on_torus(alpha, beta);
            torus_max_displacement =
                torus_max_displacement.max(sup_displacement(&sigma.eval(&pt), &pt));
        }
    }
    FixedLocusReport {
        sigma: sigma.name(),
        grid_points: n * n,
        min_displacement,
        fixed_count,
        max_off_torus,
        torus_max_displacement,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn twist_commutes_with_q22() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let f = MapSpec::twist(2, 0.5).unwrap();
        let report = check_equivariance(&f, &MapSpec::SigmaQ22, 2000, &mut rng);
        assert!(report.pass(), "max error {}", report.max_error);
    }

    #[test]
    fn reflect_commutes_with_q40() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let report = check_equivariance(&MapSpec::ReflectF, &MapSpec::SigmaQ40, 2000, &mut rng);
        assert!(report.pass(), "max error {}", report.max_error);
    }

    // The reflection map commutes with any diagonal isometry, so it also
    // commutes with the torus involution: ⟨Mx, My⟩ = ⟨x, y⟩.
    #[test]
    fn reflect_commutes_with_q22_too() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let report = check_equivariance(&MapSpec::ReflectF, &MapSpec::SigmaQ22, 2000, &mut rng);
        assert!(report.pass(), "max error {}", report.max_error);
    }

    // Counterexample search: the twist does commute with the band rotation
    // of the free involution (m is even) but the cap interpolation breaks
    // antipodal symmetry, so equivariance against σ_Q40 fails by O(1).
    #[test]
    fn twist_does_not_commute_with_q40() {
        let mut rng = ChaCha8Rng::seed_from_u64(48);
        let f = MapSpec::twist(2, 0.5).unwrap();
        let report = check_equivariance(&f, &MapSpec::SigmaQ40, 2000, &mut rng);
        assert!(!report.pass());
        assert!(report.max_error > 0.5, "max error {}", report.max_error);
    }

    #[test]
    fn both_involutions_are_antisymplectic() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        for sigma in [MapSpec::SigmaQ22, MapSpec::SigmaQ40] {
            let analytic = check_antisymplectic(&sigma, 500, DiffMode::Analytic, &mut rng).unwrap();
            assert!(analytic.pass(), "analytic residual {}", analytic.max_error);
            let fd =
                check_antisymplectic(&sigma, 200, DiffMode::FiniteDifference, &mut rng).unwrap();
            assert!(fd.pass(), "fd residual {}", fd.max_error);
        }
    }

    // The twist is a diffeomorphism but not an involution and not
    // anti-symplectic.
    #[test]
    fn twist_is_not_antisymplectic() {
        let mut rng = ChaCha8Rng::seed_from_u64(45);
        let f = MapSpec::twist(2, 0.5).unwrap();
        let report = check_antisymplectic(&f, 500, DiffMode::Analytic, &mut rng).unwrap();
        assert!(!report.pass());
    }

    #[test]
    fn pushforward_reduces_to_antisymplectic_at_k_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(46);
        let f = MapSpec::twist(2, 0.5).unwrap();
        let report =
            pushforward_form_check(&f, 0, &MapSpec::SigmaQ22, 300, DiffMode::Analytic, &mut rng)
                .unwrap();
        assert!(report.pass());
    }

    #[test]
    fn pushforward_anti_invariant_for_k_one_and_three() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let f = MapSpec::twist(2, 0.5).unwrap();
        for k in [1u32, 3] {
            let report = pushforward_form_check(
                &f,
                k,
                &MapSpec::SigmaQ22,
                300,
                DiffMode::FiniteDifference,
                &mut rng,
            )
            .unwrap();
            assert!(
                report.pass(),
                "k = {k}: anti-invariance {}",
                report.max_anti_invariance
            );
        }
    }

    #[test]
    fn degrees_of_identity() {
        let report = h2_action_degrees(&MapSpec::identity(), 32, 64).unwrap();
        assert!(report.is_identity());
    }

    #[test]
    fn degree_needs_two_agreeing_grids() {
        // With the cap below the second level there is nothing to confirm
        // against.
        let err = h2_action_degrees(&MapSpec::identity(), 16, 16);
        assert!(matches!(err, Err(Error::RoundingAmbiguous { .. })));
    }

    #[test]
    fn degrees_of_twist_and_reflection_are_identity() {
        for f in [MapSpec::twist(2, 0.5).unwrap(), MapSpec::ReflectF] {
            let report = h2_action_degrees(&f, 64, 1024).unwrap();
            assert!(
                report.is_identity(),
                "matrix {:?} residue {}",
                report.matrix,
                report.max_residue
            );
        }
    }

    #[test]
    fn fixed_locus_of_q22_is_the_torus() {
        let report = fixed_locus_scan(&MapSpec::SigmaQ22, 60);
        assert!(report.torus_max_displacement < tol::TORUS);
        if let Some(off) = report.max_off_torus {
            assert!(off < tol::TORUS);
        }
        // An off-torus point is displaced by 2|x₃| in the first factor.
        let pt = ProductPoint::new(
            UnitVec3::new(0.8, 0.0, 0.6).unwrap(),
            UnitVec3::equator(0.4),
        );
        let d = MapSpec::SigmaQ22.eval(&pt).distance(&pt);
        approx::assert_abs_diff_eq!(d, 2.0 * 0.6, epsilon = 1e-14);
    }

    #[test]
    fn fixed_locus_of_q40_is_empty() {
        let report = fixed_locus_scan(&MapSpec::SigmaQ40, 60);
        assert_eq!(report.fixed_count, 0);
        approx::assert_abs_diff_eq!(report.min_displacement, 2.0, epsilon = 1e-12);
        assert!(report.torus_max_displacement > 1.9);
    }
}
