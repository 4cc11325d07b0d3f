//! The involutions and diffeomorphisms of S² × S² as evaluable maps.
//!
//! Two anti-symplectic involutions are built in. In the stereographic chart
//! they read (z, w) ↦ (z̄⁻¹, w̄⁻¹) and (z, w) ↦ (−z̄⁻¹, −w̄⁻¹); in Cartesian
//! coordinates the first reflects x₃ on both factors and fixes the torus
//! {x₃ = 0} × {y₃ = 0}, the second is the free double-antipodal map. The
//! twist rotates the first factor by e^{i·m·Arg(w)} over an equatorial band
//! of the second and extends over the caps by the belt trick (see the
//! `twist` module); the exponent is read as imaginary, since a real
//! exponent would rescale |z| instead of rotating and never preserve the
//! torus. The reflection map sends (x, y) to (−x + 2⟨x,y⟩y, y): a half-turn
//! of the first sphere about the axis through ±y.

mod checks;
mod descriptor;
mod quadrature;
mod quotient;
mod twist;

pub use checks::{
    check_antisymplectic, check_equivariance, fixed_locus_scan, h2_action_degrees,
    pushforward_form_check, DegreeReport, FixedLocusReport, MaxErrorReport, PushforwardReport,
};
pub use quadrature::gauss_legendre;
pub use quotient::{descend_g, quotient_map, QuotientPoint};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::geometry::{ProductPoint, TangentPair, UnitVec3};
use crate::Result;

/// A named smooth map of S² × S² with exact evaluation, analytic
/// differential, and inverse.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "descriptor::Descriptor", into = "descriptor::Descriptor")]
pub enum MapSpec {
    /// (z, w) ↦ (z̄⁻¹, w̄⁻¹): reflect x₃ on both factors; fixes the torus.
    SigmaQ22,
    /// (z, w) ↦ (−z̄⁻¹, −w̄⁻¹): antipodal on both factors; fixed-point free.
    SigmaQ40,
    /// Fiberwise rotation (x, y) ↦ (G(y)·x, y); `m` must be even.
    Twist { m: i64, delta: f64 },
    /// (x, y) ↦ (−x + 2⟨x,y⟩y, y).
    ReflectF,
    /// k-fold iterate of `base`.
    Power { base: Box<MapSpec>, k: u32 },
    /// Composition applied left to right; the empty list is the identity.
    Compose(Vec<MapSpec>),
}

impl MapSpec {
    pub fn identity() -> Self {
        MapSpec::Compose(Vec::new())
    }

    /// Twist constructor; rejects odd `m` (the cap extension needs an even
    /// number of half-turns) and non-positive band widths.
    pub fn twist(m: i64, delta: f64) -> Result<Self> {
        if m.rem_euclid(2) != 0 {
            return Err(Error::ConstructionUnavailable { m });
        }
        if delta <= 0.0 || !delta.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "twist band half-width must be positive, got {delta}"
            )));
        }
        Ok(MapSpec::Twist { m, delta })
    }

    pub fn power(base: MapSpec, k: u32) -> Self {
        MapSpec::Power {
            base: Box::new(base),
            k,
        }
    }

    /// Every built-in map carries an analytic differential; composites
    /// inherit it.
    pub fn has_analytic_differential(&self) -> bool {
        match self {
            MapSpec::Power { base, .. } => base.has_analytic_differential(),
            MapSpec::Compose(list) => list.iter().all(|m| m.has_analytic_differential()),
            _ => true,
        }
    }

    pub fn eval(&self, pt: &ProductPoint) -> ProductPoint {
        match self {
            MapSpec::SigmaQ22 => ProductPoint::new(pt.p.mirror_x3(), pt.q.mirror_x3()),
            MapSpec::SigmaQ40 => ProductPoint::new(pt.p.antipode(), pt.q.antipode()),
            MapSpec::Twist { m, delta } => {
                let jet = twist::rotation_jet(*m, *delta, &pt.q);
                let image = UnitVec3::from_vector(jet.rot * pt.p.coords())
                    .expect("rotation preserves the sphere");
                ProductPoint::new(image, pt.q)
            }
            MapSpec::ReflectF => {
                let x = pt.p.coords();
                let y = pt.q.coords();
                let image = UnitVec3::from_vector(-x + y * (2.0 * x.dot(&y)))
                    .expect("axis reflection preserves the sphere");
                ProductPoint::new(image, pt.q)
            }
            MapSpec::Power { base, k } => {
                let mut cur = *pt;
                for _ in 0..*k {
                    cur = base.eval(&cur);
                }
                cur
            }
            MapSpec::Compose(list) => {
                let mut cur = *pt;
                for m in list {
                    cur = m.eval(&cur);
                }
                cur
            }
        }
    }

    /// Image point and pushed tangent pair.
    pub fn differential_analytic(
        &self,
        at: &ProductPoint,
        s: &TangentPair,
    ) -> (ProductPoint, TangentPair) {
        match self {
            MapSpec::SigmaQ22 => {
                let mirror = |v: &Vector3<f64>| Vector3::new(v.x, v.y, -v.z);
                (self.eval(at), TangentPair::new(mirror(&s.u), mirror(&s.v)))
            }
            MapSpec::SigmaQ40 => (self.eval(at), TangentPair::new(-s.u, -s.v)),
            MapSpec::Twist { m, delta } => {
                let jet = twist::rotation_jet(*m, *delta, &at.q);
                let gx = jet.rot * at.p.coords();
                let du = jet.rot * s.u + (jet.omega * s.v).cross(&gx);
                let image = ProductPoint::new(
                    UnitVec3::from_vector(gx).expect("rotation preserves the sphere"),
                    at.q,
                );
                (image, TangentPair::new(du, s.v))
            }
            MapSpec::ReflectF => {
                let x = at.p.coords();
                let y = at.q.coords();
                let du = -s.u + y * (2.0 * (s.u.dot(&y) + x.dot(&s.v))) + s.v * (2.0 * x.dot(&y));
                (self.eval(at), TangentPair::new(du, s.v))
            }
            MapSpec::Power { base, k } => {
                let mut cur = (*at, *s);
                for _ in 0..*k {
                    cur = base.differential_analytic(&cur.0, &cur.1);
                }
                cur
            }
            MapSpec::Compose(list) => {
                let mut cur = (*at, *s);
                for m in list {
                    cur = m.differential_analytic(&cur.0, &cur.1);
                }
                cur
            }
        }
    }

    /// Exact inverse. Involutions invert to themselves and the twist to the
    /// twist with the opposite twisting number.
    pub fn inverse(&self) -> MapSpec {
        match self {
            MapSpec::SigmaQ22 => MapSpec::SigmaQ22,
            MapSpec::SigmaQ40 => MapSpec::SigmaQ40,
            MapSpec::ReflectF => MapSpec::ReflectF,
            MapSpec::Twist { m, delta } => MapSpec::Twist {
                m: -m,
                delta: *delta,
            },
            MapSpec::Power { base, k } => MapSpec::Power {
                base: Box::new(base.inverse()),
                k: *k,
            },
            MapSpec::Compose(list) => {
                MapSpec::Compose(list.iter().rev().map(|m| m.inverse()).collect())
            }
        }
    }

    /// Short display name used in reports.
    pub fn name(&self) -> String {
        match self {
            MapSpec::SigmaQ22 => "sigma_q22".into(),
            MapSpec::SigmaQ40 => "sigma_q40".into(),
            MapSpec::Twist { m, delta } => format!("twist(m={m},delta={delta})"),
            MapSpec::ReflectF => "reflect_f".into(),
            MapSpec::Power { base, k } => format!("{}^{k}", base.name()),
            MapSpec::Compose(list) => {
                if list.is_empty() {
                    "id".into()
                } else {
                    list.iter()
                        .map(|m| m.name())
                        .collect::<Vec<_>>()
                        .join(" then ")
                }
            }
        }
    }
}
