//! The retraction from invariant metrics to anti-invariant compatible
//! almost-complex structures, pointwise in 4×4 frame matrices.
//!
//! For a metric g and the product form ω there is a unique endomorphism A
//! with ω(·,·) = g(A·,·); it is g-skew, so −A² is g-self-adjoint with
//! positive spectrum, and
//!
//! ```text
//! J = (−A²)^{−1/2} · A
//! ```
//!
//! with the unique g-self-adjoint positive root squares to −id, commutes
//! with the root, and is ω-compatible. When g is invariant under an
//! anti-symplectic involution σ, the field A anticommutes with dσ, the root
//! commutes with it, and J anticommutes; [`check_anti_invariance`]
//! verifies all three sample-wise. Applying the recipe to
//! g = ω(·, J·) returns J itself, making the map a retraction.
//!
//! The square root is computed by a Cholesky congruence to a symmetric
//! standard eigenproblem: with g = LLᵀ, the operator B = LᵀPL⁻ᵀ is
//! symmetric, and the positive eigenvalue root transforms back to the unique
//! g-self-adjoint positive root. A Denman–Beavers iteration lives in the
//! test suite as an independent oracle.

use std::sync::Arc;

use nalgebra::{Matrix4, SymmetricEigen};
use rand::Rng;

use crate::error::Error;
use crate::geometry::{differential_matrix, DiffMode, FrameMatrices, ProductPoint};
use crate::maps::MapSpec;
use crate::tol;
use crate::Result;

fn max_abs(m: &Matrix4<f64>) -> f64 {
    m.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
}

/// The unique A with ωᵢⱼ = (A bᵢ)ᵀ G bⱼ, i.e. A = −G⁻¹Ω.
pub fn endomorphism_a(g: &Matrix4<f64>, omega: &Matrix4<f64>) -> Result<Matrix4<f64>> {
    let eigen = SymmetricEigen::new(0.5 * (g + g.transpose()));
    let min = eigen.eigenvalues.min();
    let max = eigen.eigenvalues.max();
    if min <= 0.0 {
        return Err(Error::MetricNotPositive { min_eig: min });
    }
    let cond = max / min;
    if cond > tol::CONDITION_MAX {
        return Err(Error::IllConditioned {
            cond,
            limit: tol::CONDITION_MAX,
        });
    }
    let chol = nalgebra::Cholesky::new(*g).ok_or(Error::MetricNotPositive { min_eig: min })?;
    Ok(-chol.solve(omega))
}

/// Unique g-self-adjoint positive square root of a g-self-adjoint positive
/// operator, via Cholesky congruence and symmetric eigendecomposition.
pub fn g_selfadjoint_sqrt(p: &Matrix4<f64>, g: &Matrix4<f64>) -> Result<Matrix4<f64>> {
    let chol = nalgebra::Cholesky::new(*g).ok_or(Error::MetricNotPositive { min_eig: f64::NAN })?;
    let l = chol.l();
    let l_inv = l
        .try_inverse()
        .ok_or(Error::MetricNotPositive { min_eig: 0.0 })?;
    let b = l.transpose() * p * l_inv.transpose();
    let b_sym = 0.5 * (b + b.transpose());
    let eigen = SymmetricEigen::new(b_sym);
    let min_eig = eigen.eigenvalues.min();
    if min_eig <= tol::SQRT_MIN_EIG {
        return Err(Error::NegativeSpectrum { min_eig });
    }
    let sqrt_diag = Matrix4::from_diagonal(&eigen.eigenvalues.map(f64::sqrt));
    let root_std = eigen.eigenvectors * sqrt_diag * eigen.eigenvectors.transpose();
    Ok(l_inv.transpose() * root_std * l.transpose())
}

/// J = (−A²)^{−1/2}·A for the metric g and form ω.
pub fn retract_j(g: &Matrix4<f64>, omega: &Matrix4<f64>) -> Result<Matrix4<f64>> {
    let a = endomorphism_a(g, omega)?;
    let root = g_selfadjoint_sqrt(&(-a * a), g)?;
    let j = root
        .lu()
        .solve(&a)
        .ok_or(Error::NegativeSpectrum { min_eig: 0.0 })?;
    Ok(j)
}

/// Matrix of the compatibility pairing ω(·, J·).
pub fn compatibility_metric(omega: &Matrix4<f64>, j: &Matrix4<f64>) -> Matrix4<f64> {
    omega * j
}

type MetricRule = Arc<dyn Fn(&ProductPoint) -> Matrix4<f64> + Send + Sync>;

/// A metric field: a rule assigning a frame matrix G to each point, with an
/// optional record of the involution it is invariant under.
#[derive(Clone)]
pub struct MetricField {
    rule: MetricRule,
    invariant_under: Option<MapSpec>,
}

impl std::fmt::Debug for MetricField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MetricField")
            .field("invariant_under", &self.invariant_under)
            .finish_non_exhaustive()
    }
}

impl MetricField {
    pub fn from_rule<F>(rule: F) -> Self
    where
        F: Fn(&ProductPoint) -> Matrix4<f64> + Send + Sync + 'static,
    {
        MetricField {
            rule: Arc::new(rule),
            invariant_under: None,
        }
    }

    /// The round product metric; the identity matrix in every standard frame
    /// and invariant under both involutions (they act by isometries).
    pub fn round() -> Self {
        MetricField::from_rule(|_| Matrix4::identity())
    }

    /// Constant frame-matrix field G = I + ε·SᵀS with S a random 4×4 draw.
    /// Mildly conditioned and generically not σ-invariant.
    pub fn random_spd<R: Rng>(rng: &mut R, eps: f64) -> Self {
        let mut s = Matrix4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                s[(i, j)] = rng.random_range(-1.0..1.0);
            }
        }
        let g = Matrix4::identity() + eps * s.transpose() * s;
        MetricField::from_rule(move |_| g)
    }

    pub fn eval(&self, pt: &ProductPoint) -> Matrix4<f64> {
        (self.rule)(pt)
    }

    /// Evaluation plus the SPD invariant (min eigenvalue > 1e−8).
    pub fn eval_checked(&self, pt: &ProductPoint) -> Result<Matrix4<f64>> {
        let g = self.eval(pt);
        let min_eig = SymmetricEigen::new(0.5 * (g + g.transpose()))
            .eigenvalues
            .min();
        if min_eig <= tol::METRIC_MIN_EIG {
            return Err(Error::MetricNotPositive { min_eig });
        }
        Ok(g)
    }

    pub fn invariant_under(&self) -> Option<&MapSpec> {
        self.invariant_under.as_ref()
    }

    /// Max over samples of ‖Dᵀ·G(σpt)·D − G(pt)‖, the invariance residual.
    pub fn invariance_residual<R: Rng>(
        &self,
        sigma: &MapSpec,
        samples: u64,
        rng: &mut R,
    ) -> Result<f64> {
        let mut max = 0.0f64;
        for _ in 0..samples {
            let pt = crate::sample::product_point(rng);
            let (image, d) = differential_matrix(sigma, &pt, DiffMode::Analytic)?;
            let pulled = d.transpose() * self.eval(&image) * d;
            max = max.max(max_abs(&(pulled - self.eval(&pt))));
        }
        Ok(max)
    }
}

/// Convex average ḡ = ½(g + σ*g); invariant because σ is an involution.
pub fn symmetrize_metric(g: &MetricField, sigma: &MapSpec) -> MetricField {
    let inner = g.clone();
    let sigma_owned = sigma.clone();
    let sigma_tag = sigma.clone();
    let rule = move |pt: &ProductPoint| {
        let (image, d) = differential_matrix(&sigma_owned, pt, DiffMode::Analytic)
            .expect("analytic differential of an involution");
        let pulled = d.transpose() * inner.eval(&image) * d;
        0.5 * (inner.eval(pt) + pulled)
    };
    MetricField {
        rule: Arc::new(rule),
        invariant_under: Some(sigma_tag),
    }
}

/// Role tag of an endomorphism field derived from a metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EndoRole {
    /// A_g; anticommutes with dσ.
    SkewA,
    /// J_g; anticommutes with dσ.
    ComplexJ,
    /// (−A_g²)^{1/2}; commutes with dσ.
    SqrtRoot,
}

/// A field of frame-matrix endomorphisms derived pointwise from a metric
/// field.
#[derive(Clone)]
pub struct EndoField {
    metric: MetricField,
    pub role: EndoRole,
}

impl EndoField {
    pub fn skew_a(metric: &MetricField) -> Self {
        EndoField {
            metric: metric.clone(),
            role: EndoRole::SkewA,
        }
    }

    pub fn complex_j(metric: &MetricField) -> Self {
        EndoField {
            metric: metric.clone(),
            role: EndoRole::ComplexJ,
        }
    }

    pub fn sqrt_root(metric: &MetricField) -> Self {
        EndoField {
            metric: metric.clone(),
            role: EndoRole::SqrtRoot,
        }
    }

    pub fn eval(&self, pt: &ProductPoint) -> Result<Matrix4<f64>> {
        let g = self.metric.eval_checked(pt)?;
        let omega = FrameMatrices::round_product(pt)?.omega;
        match self.role {
            EndoRole::SkewA => endomorphism_a(&g, &omega),
            EndoRole::ComplexJ => retract_j(&g, &omega),
            EndoRole::SqrtRoot => {
                let a = endomorphism_a(&g, &omega)?;
                g_selfadjoint_sqrt(&(-a * a), &g)
            }
        }
    }
}

/// Sample-wise transport residual of an endomorphism field through dσ:
/// ‖dσ∘E + E∘dσ‖ for the anticommuting roles, ‖dσ∘E − E∘dσ‖ for the root.
#[derive(Debug, Clone)]
pub struct AntiInvarianceReport {
    pub role: EndoRole,
    pub samples: u64,
    pub max_residual: f64,
    pub tolerance: f64,
}

impl AntiInvarianceReport {
    pub fn pass(&self) -> bool {
        self.max_residual <= self.tolerance
    }
}

pub fn check_anti_invariance<R: Rng>(
    field: &EndoField,
    sigma: &MapSpec,
    samples: u64,
    rng: &mut R,
) -> Result<AntiInvarianceReport> {
    let mut max_residual = 0.0f64;
    for _ in 0..samples {
        let pt = crate::sample::product_point(rng);
        let (image, d) = differential_matrix(sigma, &pt, DiffMode::Analytic)?;
        let here = field.eval(&pt)?;
        let there = field.eval(&image)?;
        let residual = match field.role {
            EndoRole::SkewA | EndoRole::ComplexJ => d * here + there * d,
            EndoRole::SqrtRoot => d * here - there * d,
        };
        max_residual = max_residual.max(max_abs(&residual));
    }
    Ok(AntiInvarianceReport {
        role: field.role,
        samples,
        max_residual,
        tolerance: tol::CROSS_POINT,
    })
}

/// Random ω-compatible complex structure at a point: conjugate
/// J₀ = −G⁻¹Ω by the random symplectic matrix exp(Ω·S), S symmetric.
pub fn random_compatible_j<R: Rng>(
    rng: &mut R,
    g: &Matrix4<f64>,
    omega: &Matrix4<f64>,
) -> Result<(Matrix4<f64>, Matrix4<f64>)> {
    let j0 = endomorphism_a(g, omega)?;
    let mut s = Matrix4::zeros();
    for i in 0..4 {
        for j in 0..=i {
            let v = rng.random_range(-0.35..0.35);
            s[(i, j)] = v;
            s[(j, i)] = v;
        }
    }
    let phi = (omega * s).exp();
    let phi_inv = phi.try_inverse().ok_or(Error::IllConditioned {
        cond: f64::INFINITY,
        limit: tol::CONDITION_MAX,
    })?;
    Ok((phi * j0 * phi_inv, phi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn standard_omega() -> Matrix4<f64> {
        let mut omega = Matrix4::zeros();
        omega[(0, 1)] = 1.0;
        omega[(1, 0)] = -1.0;
        omega[(2, 3)] = 1.0;
        omega[(3, 2)] = -1.0;
        omega
    }

    fn g_adjoint(a: &Matrix4<f64>, g: &Matrix4<f64>) -> Matrix4<f64> {
        g.try_inverse().unwrap() * a.transpose() * g
    }

    /// Denman–Beavers iteration: Y → P^{1/2}. Independent of the
    /// eigendecomposition route.
    fn denman_beavers_sqrt(p: &Matrix4<f64>) -> Matrix4<f64> {
        let mut y = *p;
        let mut z = Matrix4::identity();
        for _ in 0..60 {
            let y_next = 0.5 * (y + z.try_inverse().unwrap());
            let z_next = 0.5 * (z + y.try_inverse().unwrap());
            if max_abs(&(y_next - y)) < 1e-14 {
                return y_next;
            }
            y = y_next;
            z = z_next;
        }
        y
    }

    #[test]
    fn round_metric_gives_product_complex_structure() {
        let g = Matrix4::identity();
        let omega = standard_omega();
        let a = endomorphism_a(&g, &omega).unwrap();
        assert_abs_diff_eq!(a * a, -Matrix4::identity(), epsilon = 1e-14);
        // A = J₀ already, so the retraction returns it unchanged.
        let j = retract_j(&g, &omega).unwrap();
        assert_abs_diff_eq!(j, a, epsilon = 1e-12);
    }

    #[test]
    fn endomorphism_scales_inversely_with_metric() {
        let omega = standard_omega();
        let g = Matrix4::identity();
        let a1 = endomorphism_a(&g, &omega).unwrap();
        let a2 = endomorphism_a(&(4.0 * g), &omega).unwrap();
        assert_abs_diff_eq!(a2, a1 / 4.0, epsilon = 1e-13);
    }

    #[test]
    fn endomorphism_defining_identity_and_skewness() {
        let omega = standard_omega();
        let g = Matrix4::from_diagonal(&nalgebra::Vector4::new(4.0, 1.0, 1.0, 1.0));
        let a = endomorphism_a(&g, &omega).unwrap();
        // Dense-solve oracle through the plain inverse.
        let oracle = -g.try_inverse().unwrap() * omega;
        assert_abs_diff_eq!(a, oracle, epsilon = 1e-12);
        assert!(max_abs(&(a.transpose() * g - omega)) < 1e-12);
        assert!(max_abs(&(g_adjoint(&a, &g) + a)) < 1e-10);
    }

    #[test]
    fn ill_conditioned_metric_rejected() {
        let omega = standard_omega();
        let g = Matrix4::from_diagonal(&nalgebra::Vector4::new(1e9, 1.0, 1.0, 1.0));
        assert!(matches!(
            endomorphism_a(&g, &omega),
            Err(Error::IllConditioned { .. })
        ));
    }

    #[test]
    fn sqrt_of_identity_and_scalings() {
        let g = Matrix4::identity();
        let s = g_selfadjoint_sqrt(&Matrix4::identity(), &g).unwrap();
        assert_abs_diff_eq!(s, Matrix4::identity(), epsilon = 1e-13);
        let c = 7.3f64;
        let s = g_selfadjoint_sqrt(&(c * Matrix4::identity()), &g).unwrap();
        assert_abs_diff_eq!(s, c.sqrt() * Matrix4::identity(), epsilon = 1e-12);
    }

    #[test]
    fn sqrt_rejects_negative_spectrum() {
        let g = Matrix4::identity();
        let p = Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, 1.0, 1.0, -0.5));
        assert!(matches!(
            g_selfadjoint_sqrt(&p, &g),
            Err(Error::NegativeSpectrum { .. })
        ));
    }

    #[test]
    fn sqrt_agrees_with_denman_beavers() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        for _ in 0..30 {
            let field = MetricField::random_spd(&mut rng, 0.3);
            let g = field.eval(&ProductPoint::on_torus(0.0, 0.0));
            let omega = standard_omega();
            let a = endomorphism_a(&g, &omega).unwrap();
            let p = -a * a;
            let s = g_selfadjoint_sqrt(&p, &g).unwrap();
            assert!(max_abs(&(s * s - p)) < 1e-9);
            let db = denman_beavers_sqrt(&p);
            assert!(
                max_abs(&(s - db)) < 1e-8,
                "sqrt routes disagree by {}",
                max_abs(&(s - db))
            );
        }
    }

    #[test]
    fn retraction_output_is_compatible_complex_structure() {
        let mut rng = ChaCha8Rng::seed_from_u64(52);
        let omega = standard_omega();
        for _ in 0..50 {
            let g = MetricField::random_spd(&mut rng, 0.3).eval(&ProductPoint::on_torus(0.0, 0.0));
            let j = retract_j(&g, &omega).unwrap();
            assert!(max_abs(&(j * j + Matrix4::identity())) < 1e-10);
            // Commutation of the root with A.
            let a = endomorphism_a(&g, &omega).unwrap();
            let root = g_selfadjoint_sqrt(&(-a * a), &g).unwrap();
            assert!(max_abs(&(root * a - a * root)) < 1e-9);
            // Compatibility: ω(J·,J·) = ω and ω(·,J·) positive-definite.
            assert!(max_abs(&(j.transpose() * omega * j - omega)) < 1e-9);
            let gj = compatibility_metric(&omega, &j);
            let min = SymmetricEigen::new(0.5 * (gj + gj.transpose()))
                .eigenvalues
                .min();
            assert!(min > 0.0);
        }
    }

    #[test]
    fn retraction_is_scale_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let omega = standard_omega();
        let g = MetricField::random_spd(&mut rng, 0.3).eval(&ProductPoint::on_torus(0.0, 0.0));
        let j = retract_j(&g, &omega).unwrap();
        for c in [1e-3, 1e3] {
            let jc = retract_j(&(c * g), &omega).unwrap();
            assert!(max_abs(&(jc - j)) < 1e-8);
        }
    }

    #[test]
    fn diagonal_perturbation_example() {
        let omega = standard_omega();
        let g = Matrix4::from_diagonal(&nalgebra::Vector4::new(4.0, 1.0, 1.0, 1.0));
        let j = retract_j(&g, &omega).unwrap();
        assert!(max_abs(&(j * j + Matrix4::identity())) < 1e-8);
        let gj = compatibility_metric(&omega, &j);
        let min = SymmetricEigen::new(0.5 * (gj + gj.transpose()))
            .eigenvalues
            .min();
        assert!(min > 0.0);
    }

    // Retraction identity u ∘ i = id: feeding ω(·, J·) back recovers J.
    #[test]
    fn retraction_identity_on_compatible_structures() {
        let mut rng = ChaCha8Rng::seed_from_u64(54);
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let pt = sample::product_point(&mut rng);
            let fm = FrameMatrices::round_product(&pt).unwrap();
            let (j, _) = random_compatible_j(&mut rng, &fm.g, &fm.omega).unwrap();
            let g_j = compatibility_metric(&fm.omega, &j);
            let back = retract_j(&g_j, &fm.omega).unwrap();
            worst = worst.max(max_abs(&(back - j)));
        }
        assert!(worst < 1e-8, "retraction identity residual {worst}");
    }

    #[test]
    fn symmetrized_random_metric_is_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        for sigma in [MapSpec::SigmaQ22, MapSpec::SigmaQ40] {
            let raw = MetricField::random_spd(&mut rng, 0.3);
            let raw_residual = raw.invariance_residual(&sigma, 50, &mut rng).unwrap();
            assert!(raw_residual > 1e-3, "raw field accidentally invariant");
            let symmetrized = symmetrize_metric(&raw, &sigma);
            let residual = symmetrized
                .invariance_residual(&sigma, 100, &mut rng)
                .unwrap();
            assert!(residual < 1e-8, "residual {residual}");
            assert_eq!(symmetrized.invariant_under(), Some(&sigma));
        }
    }

    #[test]
    fn symmetrizing_an_invariant_metric_changes_nothing() {
        let mut rng = ChaCha8Rng::seed_from_u64(56);
        let round = MetricField::round();
        for sigma in [MapSpec::SigmaQ22, MapSpec::SigmaQ40] {
            let symmetrized = symmetrize_metric(&round, &sigma);
            for _ in 0..50 {
                let pt = sample::product_point(&mut rng);
                assert!(max_abs(&(symmetrized.eval(&pt) - round.eval(&pt))) < 1e-12);
            }
        }
    }

    #[test]
    fn round_metric_j_is_anti_invariant_under_q22() {
        let mut rng = ChaCha8Rng::seed_from_u64(57);
        let field = EndoField::complex_j(&MetricField::round());
        let report = check_anti_invariance(&field, &MapSpec::SigmaQ22, 200, &mut rng).unwrap();
        assert!(
            report.max_residual < tol::ANALYTIC_RESIDUAL,
            "residual {}",
            report.max_residual
        );
    }

    #[test]
    fn symmetrized_metric_fields_are_anti_invariant_q40() {
        let mut rng = ChaCha8Rng::seed_from_u64(58);
        let raw = MetricField::random_spd(&mut rng, 0.3);
        let metric = symmetrize_metric(&raw, &MapSpec::SigmaQ40);
        for field in [
            EndoField::skew_a(&metric),
            EndoField::complex_j(&metric),
            EndoField::sqrt_root(&metric),
        ] {
            let report = check_anti_invariance(&field, &MapSpec::SigmaQ40, 100, &mut rng).unwrap();
            assert!(
                report.pass(),
                "role {:?} residual {}",
                report.role,
                report.max_residual
            );
        }
    }

    // A non-symmetrized field generically fails; reported, not an error.
    #[test]
    fn raw_random_metric_fails_anti_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        let metric = MetricField::random_spd(&mut rng, 0.3);
        let field = EndoField::complex_j(&metric);
        let report = check_anti_invariance(&field, &MapSpec::SigmaQ22, 100, &mut rng).unwrap();
        assert!(!report.pass());
    }

    // Weak connectivity witness: the straight-line path between two
    // invariant metrics stays SPD and J varies continuously along it.
    #[test]
    fn convex_path_keeps_j_continuous() {
        let mut rng = ChaCha8Rng::seed_from_u64(60);
        let pt = sample::product_point(&mut rng);
        let fm = FrameMatrices::round_product(&pt).unwrap();
        let sigma = MapSpec::SigmaQ22;
        let g0 = symmetrize_metric(&MetricField::random_spd(&mut rng, 0.3), &sigma).eval(&pt);
        let g1 = symmetrize_metric(&MetricField::random_spd(&mut rng, 0.3), &sigma).eval(&pt);
        let steps = 100;
        let dt = 1.0 / steps as f64;
        let mut prev = retract_j(&g0, &fm.omega).unwrap();
        let mut max_step = 0.0f64;
        for i in 1..=steps {
            let t = i as f64 * dt;
            let gt = (1.0 - t) * g0 + t * g1;
            let min = SymmetricEigen::new(0.5 * (gt + gt.transpose()))
                .eigenvalues
                .min();
            assert!(min > 0.0, "convex path left the SPD cone");
            let jt = retract_j(&gt, &fm.omega).unwrap();
            max_step = max_step.max(max_abs(&(jt - prev)));
            prev = jt;
        }
        // Lipschitz-type bound ‖ΔJ‖ ≤ C·dt with an empirically generous C.
        assert!(max_step < 100.0 * dt, "max step {max_step}");
    }
}
