//! Generative property tests for the spec-level invariants that hold over
//! whole input families rather than at fixed samples.

use proptest::prelude::*;

use nalgebra::Vector3;
use rsk_core::charclass::{tensor_by_line, whitney_sum, Ring, SWClass};
use rsk_core::geometry::{differential, DiffMode, ProductPoint, TangentPair, UnitVec3};
use rsk_core::maps::{quotient_map, MapSpec};
use rsk_core::winding::{push_curve, winding_class, H1Class, TorusCurve};

fn unit_vec_strategy() -> impl Strategy<Value = UnitVec3> {
    (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0)
        .prop_filter_map("vector long enough to normalize", |(x, y, z)| {
            UnitVec3::new(x, y, z).ok()
        })
}

fn product_point_strategy() -> impl Strategy<Value = ProductPoint> {
    (unit_vec_strategy(), unit_vec_strategy()).prop_map(|(p, q)| ProductPoint::new(p, q))
}

fn tangent_strategy() -> impl Strategy<Value = (ProductPoint, TangentPair, TangentPair)> {
    (
        product_point_strategy(),
        prop::array::uniform3(-1.0f64..1.0),
        prop::array::uniform3(-1.0f64..1.0),
        prop::array::uniform3(-1.0f64..1.0),
        prop::array::uniform3(-1.0f64..1.0),
    )
        .prop_map(|(at, u1, v1, u2, v2)| {
            let s = TangentPair::new(Vector3::from(u1), Vector3::from(v1)).projected(&at);
            let t = TangentPair::new(Vector3::from(u2), Vector3::from(v2)).projected(&at);
            (at, s, t)
        })
}

proptest! {
    // Bilinearity and antisymmetry of the product form on arbitrary
    // tangent vectors.
    #[test]
    fn form_is_antisymmetric_and_bilinear((at, s, t) in tangent_strategy(), a in -3.0f64..3.0) {
        let fwd = rsk_core::geometry::product_form(&at, &s, &t).unwrap();
        let bwd = rsk_core::geometry::product_form(&at, &t, &s).unwrap();
        prop_assert!((fwd + bwd).abs() < 1e-12);
        let scaled = rsk_core::geometry::product_form(&at, &s.scaled(a), &t).unwrap();
        prop_assert!((scaled - a * fwd).abs() < 1e-11);
        prop_assert!(rsk_core::geometry::product_form(&at, &s, &s).unwrap().abs() < 1e-12);
    }

    // The analytic differential is linear in the tangent argument for every
    // built-in map.
    #[test]
    fn differential_linearity((at, s, t) in tangent_strategy(), a in -2.0f64..2.0) {
        for map in [
            MapSpec::SigmaQ22,
            MapSpec::SigmaQ40,
            MapSpec::ReflectF,
            MapSpec::twist(2, 0.5).unwrap(),
        ] {
            let lhs = differential(&map, &at, &s.scaled(a).add(&t), DiffMode::Analytic).unwrap();
            let rhs = differential(&map, &at, &s, DiffMode::Analytic).unwrap().scaled(a)
                .add(&differential(&map, &at, &t, DiffMode::Analytic).unwrap());
            prop_assert!(lhs.add(&rhs.scaled(-1.0)).norm() < 1e-9);
        }
    }

    // Canonicalization of quotient points is idempotent and lift-independent.
    #[test]
    fn quotient_canonicalization(pt in product_point_strategy()) {
        let class = quotient_map(&pt);
        let neg = ProductPoint::new(pt.p.antipode(), pt.q.antipode());
        let from_other_lift = quotient_map(&neg);
        prop_assert_eq!(from_other_lift.representative(), class.representative());
        let again = quotient_map(class.representative());
        prop_assert_eq!(again.representative(), class.representative());
    }

    // Winding classes depend only on the homotopy class of the curve:
    // perturbed (p, q) lines keep their class, and pushing through the
    // twist acts by (p, q) -> (p + m q, q).
    #[test]
    fn twist_acts_linearly_on_h1(
        p in -3i64..4,
        q in -3i64..4,
        eps1 in -0.9f64..0.9,
        eps2 in -0.9f64..0.9,
        phase in 0.0f64..6.0,
    ) {
        let n = 512usize;
        let samples: Vec<(f64, f64)> = (0..=n)
            .map(|i| {
                let t = std::f64::consts::TAU * i as f64 / n as f64;
                (
                    p as f64 * t + eps1 * (t + phase).sin(),
                    q as f64 * t + eps2 * (2.0 * t).sin(),
                )
            })
            .collect();
        let curve = TorusCurve::new(samples, true).unwrap();
        prop_assert_eq!(winding_class(&curve).unwrap(), H1Class { p, q });
        let m = 2i64;
        let pushed = push_curve(&MapSpec::twist(m, 0.5).unwrap(), &curve).unwrap();
        prop_assert_eq!(winding_class(&pushed).unwrap(), H1Class { p: p + m * q, q });
    }

    // Refinement stability: doubling the sampling never changes a class.
    #[test]
    fn winding_refinement_stability(k in 0u32..6, z0 in 0.0f64..6.0) {
        let f = MapSpec::power(MapSpec::twist(2, 0.5).unwrap(), k);
        let coarse = winding_class(&push_curve(&f, &TorusCurve::gamma_a(z0, 128)).unwrap()).unwrap();
        let fine = winding_class(&push_curve(&f, &TorusCurve::gamma_a(z0, 256)).unwrap()).unwrap();
        prop_assert_eq!(coarse, fine);
    }
}

fn small_ring_strategy() -> impl Strategy<Value = Ring> {
    prop_oneof![
        Just(Ring::rp2_x_s1()),
        Just(Ring::new(&[("a", 1, 4), ("b", 1, 3)]).unwrap()),
        Just(Ring::new(&[("u", 1, 3), ("v", 2, 3)]).unwrap()),
    ]
}

/// An element recipe: sums of generator powers, interpreted in a ring.
type Recipe = Vec<(usize, u32)>;

fn recipe_strategy() -> impl Strategy<Value = Recipe> {
    prop::collection::vec((0usize..2, 0u32..3), 0..5)
}

fn build_element(ring: &Ring, recipe: &Recipe) -> rsk_core::charclass::F2Element {
    let names: Vec<String> = ring.generators().iter().map(|g| g.name.clone()).collect();
    let mut out = ring.zero();
    for &(idx, pow) in recipe {
        let name = &names[idx % names.len()];
        let term = ring.generator(name).unwrap().pow(pow).unwrap();
        out = out.add(&term).unwrap();
    }
    out
}

proptest! {
    // Ring laws: commutativity, associativity, distributivity, and the
    // Frobenius square over 𝔽₂.
    #[test]
    fn ring_laws(
        ring in small_ring_strategy(),
        rx in recipe_strategy(),
        ry in recipe_strategy(),
        rz in recipe_strategy(),
    ) {
        let x = build_element(&ring, &rx);
        let y = build_element(&ring, &ry);
        let z = build_element(&ring, &rz);
        prop_assert_eq!(x.mul(&y).unwrap(), y.mul(&x).unwrap());
        prop_assert_eq!(
            x.mul(&y).unwrap().mul(&z).unwrap(),
            x.mul(&y.mul(&z).unwrap()).unwrap()
        );
        prop_assert_eq!(
            x.mul(&y.add(&z).unwrap()).unwrap(),
            x.mul(&y).unwrap().add(&x.mul(&z).unwrap()).unwrap()
        );
        let sq = x.add(&y).unwrap().pow(2).unwrap();
        prop_assert_eq!(sq, x.pow(2).unwrap().add(&y.pow(2).unwrap()).unwrap());
    }

    // Whitney sums: rank additivity, total-class multiplicativity, and
    // associativity on trivial-extended random classes.
    #[test]
    fn whitney_sum_laws(ring in small_ring_strategy(), r1 in 1u32..3, r2 in 1u32..3) {
        let e = SWClass::trivial(&ring, r1);
        let ell = ring.generator(&ring.generators()[0].name).unwrap().homogeneous_part(1);
        let line = SWClass::new(&ring, 1, vec![ring.one(), ell]).unwrap();
        let f = whitney_sum(&line, &SWClass::trivial(&ring, r2 - 1)).unwrap();
        let sum = whitney_sum(&e, &f).unwrap();
        prop_assert_eq!(sum.rank(), r1 + r2);
        prop_assert_eq!(sum.total(), e.total().mul(&f.total()).unwrap());
        let assoc_left = whitney_sum(&whitney_sum(&e, &f).unwrap(), &line).unwrap();
        let assoc_right = whitney_sum(&e, &whitney_sum(&f, &line).unwrap()).unwrap();
        prop_assert_eq!(assoc_left, assoc_right);
    }

    // Twisting by the trivial line is the identity for every rank.
    #[test]
    fn trivial_twist_is_identity(ring in small_ring_strategy(), rank in 1u32..5) {
        let ell = ring.generator(&ring.generators()[0].name).unwrap().homogeneous_part(1);
        let mut w = vec![ring.one()];
        for d in 1..=rank {
            w.push(ell.pow(d).unwrap().homogeneous_part(d));
        }
        let e = match SWClass::new(&ring, rank, w) {
            Ok(e) => e,
            Err(_) => return Ok(()),
        };
        let trivial_line = SWClass::trivial(&ring, 1);
        prop_assert_eq!(tensor_by_line(&e, &trivial_line).unwrap(), e);
    }
}
