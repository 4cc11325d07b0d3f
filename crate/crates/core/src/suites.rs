//! Check suites: the batch runs behind the CLI, assembled into
//! deterministic [`Report`]s.

use nalgebra::{Matrix4, SymmetricEigen};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::charclass::{
    homology_checks, mapping_torus_w3, splitting_oracle, tensor_by_line, w3_identity_torus,
    HomologyTable, Ring, SWClass,
};
use crate::error::Error;
use crate::geometry::{
    cartesian_to_stereo, chordal_distance, differential, differential_matrix, stereo_to_cartesian,
    DiffMode, FrameMatrices, ProductPoint, StereoCoord, UnitVec3,
};
use crate::maps::{
    check_antisymplectic, check_equivariance, descend_g, fixed_locus_scan, h2_action_degrees,
    pushforward_form_check, quotient_map, MapSpec,
};
use crate::report::{CheckEntry, Report, RunConfig};
use crate::retraction::{
    check_anti_invariance, compatibility_metric, endomorphism_a, g_selfadjoint_sqrt,
    random_compatible_j, retract_j, symmetrize_metric, EndoField, MetricField,
};
use crate::sample;
use crate::tol;
use crate::winding::{push_curve, push_curve_on_fixed_torus, winding_class, H1Class, TorusCurve};
use crate::Result;

/// Named check suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    All,
    Geometry,
    Maps,
    Retraction,
    Charclass,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Geometry => "geometry",
            Suite::Maps => "maps",
            Suite::Retraction => "retraction",
            Suite::Charclass => "charclass",
        }
    }

    pub fn parse(text: &str) -> Result<Suite> {
        match text {
            "all" => Ok(Suite::All),
            "geometry" => Ok(Suite::Geometry),
            "maps" => Ok(Suite::Maps),
            "retraction" => Ok(Suite::Retraction),
            "charclass" => Ok(Suite::Charclass),
            other => Err(Error::InvalidConfig(format!(
                "unknown suite '{other}' (expected all|geometry|maps|retraction|charclass)"
            ))),
        }
    }
}

/// Runs a suite and assembles the report. Each sub-suite reseeds its own
/// generator from the config, so `all` matches the individual runs entry
/// for entry.
pub fn run_suite(suite: Suite, cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let entries = match suite {
        Suite::Geometry => geometry_entries(cfg)?,
        Suite::Maps => maps_entries(cfg)?,
        Suite::Retraction => retraction_entries(cfg)?,
        Suite::Charclass => charclass_entries(cfg)?,
        Suite::All => {
            let mut all = geometry_entries(cfg)?;
            all.extend(maps_entries(cfg)?);
            all.extend(retraction_entries(cfg)?);
            all.extend(charclass_entries(cfg)?);
            all
        }
    };
    Ok(Report::new(suite.name(), cfg, entries))
}

/// The invariant run: winding classes of pushed curves across the k-range,
/// plus the two side conditions (equivariance and trivial H₂ action).
pub fn invariant_report(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    Ok(Report::new("invariant", cfg, invariant_entries(cfg)?))
}

fn max_abs(m: &Matrix4<f64>) -> f64 {
    m.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
}

fn min_sym_eigenvalue(m: &Matrix4<f64>) -> f64 {
    SymmetricEigen::new(0.5 * (m + m.transpose()))
        .eigenvalues
        .min()
}

fn pfaffian4(m: &Matrix4<f64>) -> f64 {
    m[(0, 1)] * m[(2, 3)] - m[(0, 2)] * m[(1, 3)] + m[(0, 3)] * m[(1, 2)]
}

// ---------------------------------------------------------------------------
// geometry
// ---------------------------------------------------------------------------

fn geometry_entries(cfg: &RunConfig) -> Result<Vec<CheckEntry>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut entries = Vec::new();
    let n = cfg.samples;

    // Chart round trips away from the poles. The chart-side residual is
    // measured in the chordal metric of ℂ ∪ {∞}; near ∞ the Euclidean
    // |Δz| cannot be resolved to a fixed absolute accuracy by the f64
    // coordinates of the underlying point.
    let mut max_rt = 0.0f64;
    for _ in 0..n {
        let pt = sample::product_point_off_poles(&mut rng, tol::POLE_EXCLUSION);
        for x in [pt.p, pt.q] {
            let z = cartesian_to_stereo(&x);
            let back = stereo_to_cartesian(z);
            max_rt = max_rt.max(back.distance(&x));
            let again = cartesian_to_stereo(&stereo_to_cartesian(z));
            max_rt = max_rt.max(chordal_distance(z, again));
        }
    }
    entries.push(
        CheckEntry::new("geometry", "chart_round_trip")
            .samples(n)
            .residual(max_rt, tol::CHART_ROUNDTRIP),
    );

    // Pole and equator conventions.
    let south = stereo_to_cartesian(StereoCoord::finite(0.0, 0.0));
    let north = stereo_to_cartesian(StereoCoord::Infinity);
    let equator = stereo_to_cartesian(StereoCoord::finite(1.0, 0.0));
    let two = stereo_to_cartesian(StereoCoord::finite(2.0, 0.0));
    let conv = south.distance(&UnitVec3::south())
        + north.distance(&UnitVec3::north())
        + equator.distance(&UnitVec3::equator(0.0))
        + two.distance(&UnitVec3::new(0.8, 0.0, 0.6).expect("unit"));
    entries.push(
        CheckEntry::new("geometry", "chart_conventions")
            .residual(conv, 1e-12)
            .note("z = 0 south pole, z = infinity north pole, |z| = 1 equator, z = 2 lands on (4/5, 0, 3/5)"),
    );

    // The chart formulas of both involutions agree with the Cartesian ones.
    let mut max_chart = 0.0f64;
    for _ in 0..n.min(2000) {
        let pt = sample::product_point_off_poles(&mut rng, tol::POLE_EXCLUSION);
        let q22 = MapSpec::SigmaQ22.eval(&pt);
        let via22 = ProductPoint::new(
            stereo_to_cartesian(cartesian_to_stereo(&pt.p).conj_inverse()),
            stereo_to_cartesian(cartesian_to_stereo(&pt.q).conj_inverse()),
        );
        let q40 = MapSpec::SigmaQ40.eval(&pt);
        let via40 = ProductPoint::new(
            stereo_to_cartesian(cartesian_to_stereo(&pt.p).neg_conj_inverse()),
            stereo_to_cartesian(cartesian_to_stereo(&pt.q).neg_conj_inverse()),
        );
        max_chart = max_chart
            .max(q22.distance(&via22))
            .max(q40.distance(&via40));
    }
    entries.push(
        CheckEntry::new("geometry", "involution_chart_consistency")
            .samples(n.min(2000))
            .residual(max_chart, tol::CHART_ROUNDTRIP)
            .note("(z,w) -> (conj(z)^-1, conj(w)^-1) is the x3-reflection; the negated form is the antipodal map"),
    );

    // Product form: antisymmetry and frame nondegeneracy.
    let mut max_antisym = 0.0f64;
    let mut min_pf = f64::INFINITY;
    for _ in 0..n.min(2000) {
        let pt = sample::product_point(&mut rng);
        let s = sample::unit_tangent(&mut rng, &pt);
        let t = sample::unit_tangent(&mut rng, &pt);
        let fwd = crate::geometry::product_form(&pt, &s, &t)?;
        let bwd = crate::geometry::product_form(&pt, &t, &s)?;
        max_antisym = max_antisym.max((fwd + bwd).abs());
        let fm = FrameMatrices::round_product(&pt)?;
        min_pf = min_pf.min(pfaffian4(&fm.omega).abs());
    }
    let pass = max_antisym <= 1e-12 && min_pf > 0.5;
    entries.push(
        CheckEntry::new("geometry", "form_antisymmetric_nondegenerate")
            .samples(n.min(2000))
            .residual(max_antisym, 1e-12)
            .param("min_abs_pfaffian", min_pf)
            .verdict(pass),
    );

    // Differential linearity (analytic).
    let twist = MapSpec::twist(cfg.m, cfg.delta)?;
    let mut max_lin = 0.0f64;
    for _ in 0..n.min(500) {
        let pt = sample::product_point(&mut rng);
        let s = sample::unit_tangent(&mut rng, &pt);
        let t = sample::unit_tangent(&mut rng, &pt);
        let a = 1.0 + rng.random::<f64>();
        let lhs = differential(&twist, &pt, &s.scaled(a).add(&t), DiffMode::Analytic)?;
        let rhs = differential(&twist, &pt, &s, DiffMode::Analytic)?
            .scaled(a)
            .add(&differential(&twist, &pt, &t, DiffMode::Analytic)?);
        max_lin = max_lin.max(lhs.add(&rhs.scaled(-1.0)).norm());
    }
    entries.push(
        CheckEntry::new("geometry", "differential_linearity")
            .samples(n.min(500))
            .residual(max_lin, tol::ANALYTIC_RESIDUAL),
    );

    // Chain rule in finite differences.
    let composed = MapSpec::Compose(vec![twist.clone(), MapSpec::SigmaQ22]);
    let mut max_chain = 0.0f64;
    for _ in 0..n.min(300) {
        let pt = sample::product_point(&mut rng);
        let s = sample::unit_tangent(&mut rng, &pt);
        let direct = differential(&composed, &pt, &s, DiffMode::FiniteDifference)?;
        let inner = differential(&twist, &pt, &s, DiffMode::FiniteDifference)?;
        let outer = differential(
            &MapSpec::SigmaQ22,
            &twist.eval(&pt),
            &inner,
            DiffMode::FiniteDifference,
        )?;
        max_chain = max_chain.max(direct.add(&outer.scaled(-1.0)).norm());
    }
    entries.push(
        CheckEntry::new("geometry", "chain_rule_fd")
            .samples(n.min(300))
            .residual(max_chain, tol::FD_AGREEMENT),
    );

    // Analytic vs finite-difference differentials on the atomic maps.
    let mut max_fd = 0.0f64;
    for map in [
        MapSpec::SigmaQ22,
        MapSpec::SigmaQ40,
        MapSpec::ReflectF,
        twist.clone(),
    ] {
        for _ in 0..n.min(500) {
            let pt = sample::product_point(&mut rng);
            let s = sample::unit_tangent(&mut rng, &pt);
            let a = differential(&map, &pt, &s, DiffMode::Analytic)?;
            let f = differential(&map, &pt, &s, DiffMode::FiniteDifference)?;
            max_fd = max_fd.max(a.add(&f.scaled(-1.0)).norm());
        }
    }
    entries.push(
        CheckEntry::new("geometry", "analytic_vs_finite_difference")
            .samples(4 * n.min(500))
            .residual(max_fd, tol::FD_AGREEMENT),
    );

    Ok(entries)
}

// ---------------------------------------------------------------------------
// maps
// ---------------------------------------------------------------------------

fn maps_entries(cfg: &RunConfig) -> Result<Vec<CheckEntry>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut entries = Vec::new();
    let n = cfg.samples;
    let twist = MapSpec::twist(cfg.m, cfg.delta)?;
    let tols = &cfg.tolerances;

    // Involutions square to the identity.
    for sigma in [MapSpec::SigmaQ22, MapSpec::SigmaQ40] {
        let mut max_err = 0.0f64;
        for _ in 0..n {
            let pt = sample::product_point(&mut rng);
            max_err = max_err.max(sigma.eval(&sigma.eval(&pt)).distance(&pt));
        }
        entries.push(
            CheckEntry::new("maps", "involution_squared")
                .param("sigma", sigma.name())
                .samples(n)
                .residual(max_err, tols.involution),
        );
    }

    // Anti-symplecticity with analytic differentials, and once through the
    // finite-difference path.
    for sigma in [MapSpec::SigmaQ22, MapSpec::SigmaQ40] {
        let report = check_antisymplectic(&sigma, n, DiffMode::Analytic, &mut rng)?;
        entries.push(
            CheckEntry::new("maps", "anti_symplectic_analytic")
                .param("sigma", sigma.name())
                .samples(n)
                .residual(report.max_error, tols.analytic),
        );
    }
    let fd_report = check_antisymplectic(
        &MapSpec::SigmaQ22,
        n.min(1000),
        DiffMode::FiniteDifference,
        &mut rng,
    )?;
    entries.push(
        CheckEntry::new("maps", "anti_symplectic_fd")
            .param("sigma", "sigma_q22")
            .samples(n.min(1000))
            .residual(fd_report.max_error, tols.fd),
    );

    // The free involution never comes close to a fixed point.
    let mut min_disp = f64::INFINITY;
    for _ in 0..n {
        let pt = sample::product_point(&mut rng);
        let image = MapSpec::SigmaQ40.eval(&pt);
        min_disp = min_disp.min(pt.p.distance(&image.p).max(pt.q.distance(&image.q)));
    }
    entries.push(
        CheckEntry::new("maps", "q40_fixed_point_free")
            .samples(n)
            .param("min_displacement", min_disp)
            .value(format!("{min_disp:.6}"), min_disp >= tol::FREE_ACTION_MIN),
    );

    // The torus involution fixes its torus pointwise.
    let scan = fixed_locus_scan(&MapSpec::SigmaQ22, 100);
    entries.push(
        CheckEntry::new("maps", "q22_fixed_locus_is_torus")
            .samples(scan.grid_points as u64)
            .residual(
                scan.torus_max_displacement
                    .max(scan.max_off_torus.unwrap_or(0.0)),
                tol::TORUS,
            ),
    );

    // Twist: equivariance, torus restriction, pole behavior, Jacobian.
    let equi = check_equivariance(&twist, &MapSpec::SigmaQ22, n, &mut rng);
    entries.push(
        CheckEntry::new("maps", "twist_equivariance_q22")
            .param("m", cfg.m)
            .param("delta", cfg.delta)
            .samples(n)
            .residual(equi.max_error, tol::ANALYTIC_RESIDUAL)
            .note("the twist rotates the first factor by e^{i m Arg(w)}; the exponent is read as imaginary since a real exponent would rescale |z| rather than rotate the fiber"),
    );

    let mut max_torus = 0.0f64;
    for _ in 0..n {
        let alpha = rng.random_range(0.0..std::f64::consts::TAU);
        let beta = rng.random_range(0.0..std::f64::consts::TAU);
        let image = twist.eval(&ProductPoint::on_torus(alpha, beta));
        let expect = ProductPoint::on_torus(alpha + cfg.m as f64 * beta, beta);
        max_torus = max_torus.max(image.distance(&expect));
    }
    entries.push(
        CheckEntry::new("maps", "twist_restricts_to_dehn_twist")
            .param("m", cfg.m)
            .samples(n)
            .residual(max_torus, tol::ANALYTIC_RESIDUAL),
    );

    let mut max_pole = 0.0f64;
    for _ in 0..200 {
        let x = sample::unit_vec(&mut rng);
        for pole in [UnitVec3::north(), UnitVec3::south()] {
            let pt = ProductPoint::new(x, pole);
            max_pole = max_pole.max(twist.eval(&pt).distance(&pt));
        }
    }
    entries.push(
        CheckEntry::new("maps", "twist_identity_at_poles")
            .samples(400)
            .residual(max_pole, 1e-15),
    );

    let mut min_det = f64::INFINITY;
    for _ in 0..n {
        let pt = sample::product_point(&mut rng);
        let (_, d) = differential_matrix(&twist, &pt, DiffMode::Analytic)?;
        min_det = min_det.min(d.determinant());
    }
    entries.push(
        CheckEntry::new("maps", "twist_jacobian_positive")
            .samples(n)
            .param("min_determinant", min_det)
            .value(format!("{min_det:.6}"), min_det > tol::JACOBIAN_MIN),
    );

    // Iterates restrict to iterated Dehn twists.
    let mut max_power = 0.0f64;
    for k in 0..=cfg.k_max {
        let fk = MapSpec::power(twist.clone(), k);
        for _ in 0..200 {
            let alpha = rng.random_range(0.0..std::f64::consts::TAU);
            let beta = rng.random_range(0.0..std::f64::consts::TAU);
            let image = fk.eval(&ProductPoint::on_torus(alpha, beta));
            let expect = ProductPoint::on_torus(alpha + (k as i64 * cfg.m) as f64 * beta, beta);
            max_power = max_power.max(image.distance(&expect));
        }
    }
    entries.push(
        CheckEntry::new("maps", "twist_power_torus_formula")
            .param("k_max", cfg.k_max)
            .samples(200 * (cfg.k_max as u64 + 1))
            .residual(max_power, tol::ANALYTIC_RESIDUAL),
    );

    // The twist itself is not anti-symplectic; the check must fail.
    let not_anti = check_antisymplectic(&twist, n.min(500), DiffMode::Analytic, &mut rng)?;
    entries.push(
        CheckEntry::new("maps", "twist_not_anti_symplectic")
            .samples(n.min(500))
            .param("max_error", not_anti.max_error)
            .value(format!("{:.3}", not_anti.max_error), not_anti.max_error > 1e-3)
            .note("expected failure: the twist is a diffeomorphism, not an anti-symplectic involution"),
    );

    // Equivariance counterexample: the cap interpolation is not antipodally
    // symmetric, so the twist does not commute with the free involution.
    let counter = check_equivariance(&twist, &MapSpec::SigmaQ40, n.min(2000), &mut rng);
    entries.push(
        CheckEntry::new("maps", "twist_q40_equivariance_fails")
            .samples(n.min(2000))
            .param("max_error", counter.max_error)
            .value(format!("{:.3}", counter.max_error), counter.max_error > 0.5)
            .note("expected failure: the belt-trick caps break antipodal symmetry"),
    );

    // Pushforward forms along the iterates.
    let pf_samples = (n / (cfg.k_max as u64).max(1)).clamp(200, 2000);
    for k in 1..=cfg.k_max {
        let report = pushforward_form_check(
            &twist,
            k,
            &MapSpec::SigmaQ22,
            pf_samples,
            DiffMode::FiniteDifference,
            &mut rng,
        )?;
        entries.push(
            CheckEntry::new("maps", "pushforward_anti_invariant")
                .param("k", k)
                .param("min_abs_det", report.min_abs_det)
                .samples(pf_samples)
                .residual(
                    report.max_anti_invariance.max(report.max_antisymmetry),
                    tols.fd,
                )
                .verdict(report.pass()),
        );
    }

    // H₂ action by quadrature degrees. The cap leaves room for at least one
    // confirming refinement above the starting grid.
    for f in [twist.clone(), MapSpec::ReflectF] {
        let report = h2_action_degrees(&f, cfg.grid, (cfg.grid * 2).max(1024))?;
        entries.push(
            CheckEntry::new("maps", "h2_action_identity")
                .param("map", f.name())
                .param("grid", report.grid as u64)
                .residual(report.max_residue, tol::DEGREE_RESIDUE)
                .value(format!("{:?}", report.matrix), report.is_identity()),
        );
    }

    // Reflection map: involution, equivariance with both involutions.
    let ff = MapSpec::power(MapSpec::ReflectF, 2);
    let mut max_reflect = 0.0f64;
    for _ in 0..n {
        let pt = sample::product_point(&mut rng);
        max_reflect = max_reflect.max(ff.eval(&pt).distance(&pt));
    }
    entries.push(
        CheckEntry::new("maps", "reflect_is_involution")
            .samples(n)
            .residual(max_reflect, tols.involution),
    );
    let reflect_equi = check_equivariance(&MapSpec::ReflectF, &MapSpec::SigmaQ40, n, &mut rng);
    entries.push(
        CheckEntry::new("maps", "reflect_equivariance_q40")
            .samples(n)
            .residual(reflect_equi.max_error, tol::ANALYTIC_RESIDUAL),
    );
    let reflect_equi22 = check_equivariance(
        &MapSpec::ReflectF,
        &MapSpec::SigmaQ22,
        n.min(2000),
        &mut rng,
    );
    entries.push(
        CheckEntry::new("maps", "reflect_equivariance_q22")
            .samples(n.min(2000))
            .residual(reflect_equi22.max_error, tol::ANALYTIC_RESIDUAL)
            .note("the reflection commutes with every diagonal isometry, this involution included"),
    );

    // Quotient: well-definedness, diagram commutation, fixed diagonal.
    let mut max_well = 0.0f64;
    let mut max_diagram = 0.0f64;
    let mut max_diag_fixed = 0.0f64;
    for _ in 0..n {
        let pt = sample::product_point(&mut rng);
        let neg = ProductPoint::new(pt.p.antipode(), pt.q.antipode());
        max_well = max_well.max(quotient_map(&pt).distance(&quotient_map(&neg)));
        let upper = quotient_map(&MapSpec::ReflectF.eval(&pt));
        let lower = descend_g(&quotient_map(&pt));
        max_diagram = max_diagram.max(upper.distance(&lower));
        let x = pt.p;
        let diag = quotient_map(&ProductPoint::new(x, x));
        max_diag_fixed = max_diag_fixed.max(diag.distance(&descend_g(&diag)));
    }
    entries.push(
        CheckEntry::new("maps", "quotient_well_defined")
            .samples(n)
            .residual(max_well, 1e-15),
    );
    entries.push(
        CheckEntry::new("maps", "quotient_diagram_commutes")
            .samples(n)
            .residual(max_diagram, 1e-15),
    );
    entries.push(
        CheckEntry::new("maps", "descended_map_fixes_diagonal")
            .samples(n)
            .residual(max_diag_fixed, 1e-15),
    );

    // Fixed-locus scan of the free involution.
    let scan40 = fixed_locus_scan(&MapSpec::SigmaQ40, 100);
    entries.push(
        CheckEntry::new("maps", "q40_fixed_locus_empty")
            .samples(scan40.grid_points as u64)
            .param("min_displacement", scan40.min_displacement)
            .value(
                format!("fixed points: {}", scan40.fixed_count),
                scan40.fixed_count == 0 && scan40.min_displacement >= tol::FREE_ACTION_MIN,
            ),
    );

    Ok(entries)
}

// ---------------------------------------------------------------------------
// retraction
// ---------------------------------------------------------------------------

fn retraction_entries(cfg: &RunConfig) -> Result<Vec<CheckEntry>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut entries = Vec::new();
    let tols = &cfg.tolerances;
    let metrics_total = 500u64;

    let mut max_j_squared = 0.0f64;
    let mut min_compat_eig = f64::INFINITY;
    let mut max_omega_preserved = 0.0f64;
    let mut max_scale = 0.0f64;
    let mut max_defining = 0.0f64;
    let mut max_skew = 0.0f64;
    let mut max_sqrt = 0.0f64;
    let mut max_metric_invariance = 0.0f64;
    let mut max_anti_j = 0.0f64;
    let mut max_anti_a = 0.0f64;
    let mut max_sqrt_commute = 0.0f64;

    for i in 0..metrics_total {
        let sigma = if i < metrics_total / 2 {
            MapSpec::SigmaQ22
        } else {
            MapSpec::SigmaQ40
        };
        let metric = symmetrize_metric(&MetricField::random_spd(&mut rng, 0.3), &sigma);
        let pt = sample::product_point(&mut rng);
        let fm = FrameMatrices::round_product(&pt)?;
        let g = metric.eval_checked(&pt)?;

        let a = endomorphism_a(&g, &fm.omega)?;
        max_defining = max_defining.max(max_abs(&(a.transpose() * g - fm.omega)));
        let g_inv = g.try_inverse().expect("checked SPD");
        max_skew = max_skew.max(max_abs(&(g_inv * a.transpose() * g + a)));

        let p = -a * a;
        let root = g_selfadjoint_sqrt(&p, &g)?;
        max_sqrt = max_sqrt.max(max_abs(&(root * root - p)));

        let j = retract_j(&g, &fm.omega)?;
        max_j_squared = max_j_squared.max(max_abs(&(j * j + Matrix4::identity())));
        min_compat_eig =
            min_compat_eig.min(min_sym_eigenvalue(&compatibility_metric(&fm.omega, &j)));
        max_omega_preserved =
            max_omega_preserved.max(max_abs(&(j.transpose() * fm.omega * j - fm.omega)));
        for c in [1e-3f64, 1e3] {
            let jc = retract_j(&(c * g), &fm.omega)?;
            max_scale = max_scale.max(max_abs(&(jc - j)));
        }

        // Transport through dσ at this sample point.
        let (image, d) = differential_matrix(&sigma, &pt, DiffMode::Analytic)?;
        let g_there = metric.eval_checked(&image)?;
        max_metric_invariance =
            max_metric_invariance.max(max_abs(&(d.transpose() * g_there * d - g)));
        let fm_there = FrameMatrices::round_product(&image)?;
        let a_there = endomorphism_a(&g_there, &fm_there.omega)?;
        let j_there = retract_j(&g_there, &fm_there.omega)?;
        let root_there = g_selfadjoint_sqrt(&(-a_there * a_there), &g_there)?;
        max_anti_a = max_anti_a.max(max_abs(&(d * a + a_there * d)));
        max_anti_j = max_anti_j.max(max_abs(&(d * j + j_there * d)));
        max_sqrt_commute = max_sqrt_commute.max(max_abs(&(d * root - root_there * d)));
    }

    let half = metrics_total / 2;
    let base = CheckEntry::new("retraction", "j_squares_to_minus_identity")
        .param("metrics", metrics_total)
        .param("per_sigma", half)
        .samples(metrics_total)
        .residual(max_j_squared, tols.structural);
    entries.push(base);
    entries.push(
        CheckEntry::new("retraction", "compatibility_positive_definite")
            .samples(metrics_total)
            .param("min_eigenvalue", min_compat_eig)
            .value(format!("{min_compat_eig:.6}"), min_compat_eig > 0.0),
    );
    entries.push(
        CheckEntry::new("retraction", "omega_preserved_by_j")
            .samples(metrics_total)
            .residual(max_omega_preserved, tol::ANALYTIC_RESIDUAL),
    );
    entries.push(
        CheckEntry::new("retraction", "scale_invariance")
            .samples(metrics_total)
            .param("scales", "1e-3, 1e3")
            .residual(max_scale, tols.structural),
    );
    entries.push(
        CheckEntry::new("retraction", "defining_identity_of_a")
            .samples(metrics_total)
            .residual(max_defining, tol::LINSOLVE),
    );
    entries.push(
        CheckEntry::new("retraction", "a_is_g_skew")
            .samples(metrics_total)
            .residual(max_skew, tol::LINSOLVE),
    );
    entries.push(
        CheckEntry::new("retraction", "sqrt_squares_back")
            .samples(metrics_total)
            .residual(max_sqrt, tol::ANALYTIC_RESIDUAL),
    );
    entries.push(
        CheckEntry::new("retraction", "symmetrized_metric_invariant")
            .samples(metrics_total)
            .residual(max_metric_invariance, tols.structural),
    );
    entries.push(
        CheckEntry::new("retraction", "a_anticommutes_with_dsigma")
            .samples(metrics_total)
            .residual(max_anti_a, tols.cross_point),
    );
    entries.push(
        CheckEntry::new("retraction", "j_anticommutes_with_dsigma")
            .samples(metrics_total)
            .residual(max_anti_j, tols.cross_point),
    );
    entries.push(
        CheckEntry::new("retraction", "sqrt_commutes_with_dsigma")
            .samples(metrics_total)
            .residual(max_sqrt_commute, tols.cross_point),
    );

    // Retraction identity on random compatible structures.
    let mut max_retract = 0.0f64;
    for _ in 0..100 {
        let pt = sample::product_point(&mut rng);
        let fm = FrameMatrices::round_product(&pt)?;
        let (j, _) = random_compatible_j(&mut rng, &fm.g, &fm.omega)?;
        let back = retract_j(&compatibility_metric(&fm.omega, &j), &fm.omega)?;
        max_retract = max_retract.max(max_abs(&(back - j)));
    }
    entries.push(
        CheckEntry::new("retraction", "retraction_identity")
            .samples(100)
            .residual(max_retract, tols.structural)
            .note("feeding omega(., J.) back through the retraction recovers J"),
    );

    // A non-symmetrized random metric must fail anti-invariance; recorded,
    // not an error.
    let raw = MetricField::random_spd(&mut rng, 0.3);
    let raw_report = check_anti_invariance(
        &EndoField::complex_j(&raw),
        &MapSpec::SigmaQ22,
        50,
        &mut rng,
    )?;
    entries.push(
        CheckEntry::new("retraction", "raw_metric_fails_anti_invariance")
            .samples(50)
            .param("max_residual", raw_report.max_residual)
            .value(
                format!("{:.3e}", raw_report.max_residual),
                raw_report.max_residual > tols.cross_point,
            )
            .note("expected failure: without symmetrization the field is not invariant"),
    );

    // Convexity-path witness: SPD along the segment, J continuous.
    let pt = sample::product_point(&mut rng);
    let fm = FrameMatrices::round_product(&pt)?;
    let g0 =
        symmetrize_metric(&MetricField::random_spd(&mut rng, 0.3), &MapSpec::SigmaQ22).eval(&pt);
    let g1 =
        symmetrize_metric(&MetricField::random_spd(&mut rng, 0.3), &MapSpec::SigmaQ22).eval(&pt);
    let steps = 100usize;
    let dt = 1.0 / steps as f64;
    let mut prev = retract_j(&g0, &fm.omega)?;
    let mut min_eig_path = f64::INFINITY;
    let mut max_step = 0.0f64;
    for i in 1..=steps {
        let t = i as f64 * dt;
        let gt = (1.0 - t) * g0 + t * g1;
        min_eig_path = min_eig_path.min(min_sym_eigenvalue(&gt));
        let jt = retract_j(&gt, &fm.omega)?;
        max_step = max_step.max(max_abs(&(jt - prev)));
        prev = jt;
    }
    entries.push(
        CheckEntry::new("retraction", "convex_path_continuity")
            .param("steps", steps as u64)
            .param("min_eigenvalue_on_path", min_eig_path)
            .param("max_step", max_step)
            .value(
                format!("max step {max_step:.3e} over dt {dt:.0e}"),
                min_eig_path > 0.0 && max_step < 100.0 * dt,
            )
            .note("weak connectivity witness; full contractibility is not checked numerically"),
    );

    Ok(entries)
}

// ---------------------------------------------------------------------------
// charclass
// ---------------------------------------------------------------------------

fn charclass_entries(cfg: &RunConfig) -> Result<Vec<CheckEntry>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut entries = Vec::new();

    // Ring arithmetic spot checks in Z2[a,b]/(a^3, b^2).
    let ring = Ring::rp2_x_s1();
    let a = ring.generator("a")?;
    let b = ring.generator("b")?;
    let ring_ok = a.mul(&a.pow(2)?)?.is_zero()
        && !a.pow(2)?.mul(&b)?.is_zero()
        && a.add(&b)?.pow(2)? == a.pow(2)?;
    entries.push(
        CheckEntry::new("charclass", "quotient_ring_arithmetic")
            .value("a.a^2 = 0, a^2 b != 0, (a+b)^2 = a^2", ring_ok),
    );

    let one_plus_a_cubed = ring.one().add(&a)?.pow(3)?;
    let tangent_total = ring.one().add(&a)?.add(&a.pow(2)?)?;
    entries.push(CheckEntry::new("charclass", "tangent_class_input").value(
        one_plus_a_cubed.to_string(),
        one_plus_a_cubed == tangent_total,
    ));

    let torus = mapping_torus_w3()?;
    entries.push(
        CheckEntry::new("charclass", "w3_mapping_torus").value(torus.w3.to_string(), torus.pass()),
    );
    entries.push(
        CheckEntry::new("charclass", "w3_untwisted_mapping_torus")
            .value(torus.w3_untwisted.to_string(), torus.w3_untwisted.is_zero()),
    );

    let identity = w3_identity_torus();
    entries.push(
        CheckEntry::new("charclass", "w3_identity_torus")
            .param("chi_product", identity.chi_product)
            .param("chi_quotient", identity.chi_quotient)
            .value(
                format!("{}", identity.w3_pairing),
                identity.chi_product == 4 && identity.chi_quotient == 2 && identity.w3_pairing == 0,
            ),
    );
    entries.push(
        CheckEntry::new("charclass", "obstruction_pair")
            .value(
                format!("twisted w3 = {}, untwisted pairing = {}", torus.w3, identity.w3_pairing),
                !torus.w3.is_zero() && identity.w3_pairing == 0,
            )
            .note("a nonzero twisted class against a vanishing untwisted one obstructs any homotopy of the descended map to the identity"),
    );

    // Closed twist formula against the splitting-principle oracle.
    let oracle_rings = [
        Ring::rp2_x_s1(),
        Ring::new(&[("a", 1, 4), ("b", 1, 3)])?,
        Ring::new(&[("u", 1, 3), ("v", 2, 3)])?,
        Ring::new(&[("x", 1, 5)])?,
    ];
    let mut oracle_cases = 0u64;
    let mut oracle_agree = true;
    let mut spec_top_first = true;
    while oracle_cases < 200 {
        let ring = &oracle_rings[(oracle_cases % oracle_rings.len() as u64) as usize];
        let rank = 1 + (oracle_cases % 4) as u32;
        let e = random_sw_class(ring, rank, &mut rng)?;
        let line_gen = ring.generators()[0].name.clone();
        let ell = ring.generator(&line_gen)?.homogeneous_part(1);
        let line = SWClass::new(ring, 1, vec![ring.one(), ell.clone()])?;
        let fast = tensor_by_line(&e, &line)?;
        let slow = splitting_oracle(&e, &line)?;
        oracle_agree &= fast == slow;

        // Top-class and first-class specializations, coded independently.
        let mut top = ring.zero();
        for i in 0..=rank {
            top = top.add(&e.w(i).mul(&ell.pow(rank - i)?)?)?;
        }
        spec_top_first &= fast.w(rank) == top;
        let mut first = e.w(1);
        if rank % 2 == 1 {
            first = first.add(&ell)?;
        }
        spec_top_first &= fast.w(1) == first;
        oracle_cases += 1;
    }
    entries.push(
        CheckEntry::new("charclass", "tensor_formula_vs_splitting_oracle")
            .samples(oracle_cases)
            .value("exact equality on all instances", oracle_agree),
    );
    entries.push(
        CheckEntry::new("charclass", "top_and_first_class_specializations")
            .samples(oracle_cases)
            .value(
                "w_n(EL) = sum w_i(E) w1(L)^{n-i}; w_1(EL) = w_1(E) + n w_1(L)",
                spec_top_first,
            ),
    );

    // The rank-2 tangent specialization over the product ring.
    let t_q = SWClass::new(&ring, 2, vec![ring.one(), a.clone(), a.pow(2)?])?;
    let l_s1 = SWClass::new(&ring, 1, vec![ring.one(), b.clone()])?;
    let tql = tensor_by_line(&t_q, &l_s1)?;
    let w2_expect = a.pow(2)?.add(&a.mul(&b)?)?;
    entries.push(
        CheckEntry::new("charclass", "rank_two_twist_specialization").value(
            format!("w1 = {}, w2 = {}", tql.w(1), tql.w(2)),
            tql.w(1) == a && tql.w(2) == w2_expect,
        ),
    );

    // Homology of the quotient.
    let homology = homology_checks(&HomologyTable::quotient_gr24());
    entries.push(
        CheckEntry::new("charclass", "homology_pairing")
            .value(
                format!(
                    "F.F = {}, F.Q = {}, Q.Q = {}",
                    homology.pairing_values.0, homology.pairing_values.1, homology.pairing_values.2
                ),
                homology.pairing_symmetric && homology.pairing_expected,
            )
            .note("Q.Q = 1 is a derived input (Euler class of the normal bundle mod 2); the distinctness argument never uses it"),
    );
    entries.push(
        CheckEntry::new("charclass", "homology_classes_distinct").value(
            "F != 0, Q != 0, F != Q from the pairing axioms",
            homology.classes_distinct,
        ),
    );
    entries.push(
        CheckEntry::new("charclass", "homology_betti_consistency")
            .param("euler_characteristic", homology.euler_characteristic)
            .value(
                "Z2 Betti (1,1,2,1,1); Poincare symmetric; bounded by Schubert cells; universal coefficients match the integral table",
                homology.betti_expected
                    && homology.betti_poincare_symmetric
                    && homology.betti_bounded_by_cells
                    && homology.universal_coefficients_consistent
                    && homology.g_star_identity_on_h2,
            ),
    );

    Ok(entries)
}

fn random_sw_class<R: Rng>(ring: &Ring, rank: u32, rng: &mut R) -> Result<SWClass> {
    let gens: Vec<_> = ring
        .generators()
        .iter()
        .map(|g| ring.generator(&g.name))
        .collect::<Result<_>>()?;
    let mut w = vec![ring.one()];
    for d in 1..=rank {
        let mut wd = ring.zero();
        for _ in 0..4 {
            let mut mono = ring.one();
            let mut degree = 0;
            let mut guard = 0;
            while degree < d && guard < 16 {
                let g = &gens[rng.random_range(0..gens.len())];
                mono = mono.mul(g)?;
                degree += ring.generators()[0].degree.max(1);
                guard += 1;
            }
            if rng.random::<bool>() {
                wd = wd.add(&mono)?;
            }
        }
        w.push(wd.homogeneous_part(d));
    }
    SWClass::new(ring, rank, w)
}

// ---------------------------------------------------------------------------
// invariant
// ---------------------------------------------------------------------------

/// Entries for the invariant run: classes of pushed curves for each
/// iterate, distinctness, and the two side conditions.
pub fn invariant_entries(cfg: &RunConfig) -> Result<Vec<CheckEntry>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut entries = Vec::new();
    let twist = MapSpec::twist(cfg.m, cfg.delta)?;
    let basis_note = "basis: gamma_B = z-circle = (1,0), gamma_A = w-circle = (0,1), oriented by increasing angle; the twist then acts by gamma_A -> gamma_A + m gamma_B";

    let mut classes = Vec::new();
    for k in 0..=cfg.k_max {
        let fk = MapSpec::power(twist.clone(), k);
        let pushed =
            push_curve_on_fixed_torus(&MapSpec::SigmaQ22, &fk, &TorusCurve::gamma_a(0.0, 256))?;
        let class = winding_class(&pushed)?;
        let expected = H1Class {
            p: cfg.m * k as i64,
            q: 1,
        };
        let refined = push_curve(&fk, &TorusCurve::gamma_a(0.0, 512))?;
        let stable = winding_class(&refined)? == class;
        let mut entry = CheckEntry::new("invariant", "pushed_class")
            .param("k", k)
            .param("m", cfg.m)
            .value(
                format!("({}, {})", class.p, class.q),
                class == expected && stable,
            );
        if k == 0 {
            entry = entry.note(basis_note);
        }
        entries.push(entry);
        classes.push(class);
    }

    let mut distinct = true;
    for i in 0..classes.len() {
        for j in 0..i {
            distinct &= classes[i] != classes[j];
        }
    }
    entries.push(
        CheckEntry::new("invariant", "classes_pairwise_distinct")
            .param("count", classes.len() as u64)
            .value(
                classes
                    .iter()
                    .map(|c| format!("({}, {})", c.p, c.q))
                    .collect::<Vec<_>>()
                    .join(" "),
                distinct,
            ),
    );

    let b_pushed = push_curve(&twist, &TorusCurve::gamma_b(0.7, 256))?;
    let b_class = winding_class(&b_pushed)?;
    entries.push(CheckEntry::new("invariant", "gamma_b_fixed").value(
        format!("({}, {})", b_class.p, b_class.q),
        b_class == H1Class { p: 1, q: 0 },
    ));

    let reversed = winding_class(&TorusCurve::gamma_a(0.0, 256).reversed())?;
    entries.push(CheckEntry::new("invariant", "orientation_reversal").value(
        format!("({}, {})", reversed.p, reversed.q),
        reversed == H1Class { p: 0, q: -1 },
    ));

    // Side condition: equivariance of the twist. The map descriptor is
    // embedded so the report pins down exactly which map was run.
    let equi = check_equivariance(&twist, &MapSpec::SigmaQ22, cfg.samples.min(2000), &mut rng);
    entries.push(
        CheckEntry::new("invariant", "equivariance_condition")
            .param(
                "map",
                serde_json::to_value(&twist).expect("map descriptor serializes"),
            )
            .samples(cfg.samples.min(2000))
            .residual(equi.max_error, tol::ANALYTIC_RESIDUAL),
    );

    // Side condition: trivial action on H₂.
    let degrees = h2_action_degrees(&twist, cfg.grid, (cfg.grid * 2).max(1024))?;
    entries.push(
        CheckEntry::new("invariant", "h2_action_condition")
            .param("grid", degrees.grid as u64)
            .residual(degrees.max_residue, tol::DEGREE_RESIDUE)
            .value(format!("{:?}", degrees.matrix), degrees.is_identity()),
    );

    Ok(entries)
}
