//! The product symplectic form, the round metric, and pointwise orthonormal
//! frames.
//!
//! The form is ω((u,v),(u',v')) = ⟨p, u × u'⟩ + ⟨q, v × v'⟩, the equal-area
//! product of the two sphere area forms. The reference metric is the flat
//! restriction ⟨u,u'⟩ + ⟨v,v'⟩. Frames are built per point and never assumed
//! smooth across points; every check that compares different points goes
//! through explicit frame coordinates.

use nalgebra::{Matrix4, Vector3, Vector4};

use super::{ProductPoint, TangentPair, UnitVec3};
use crate::error::Error;
use crate::tol;
use crate::Result;

/// Deterministic orthonormal tangent basis (t₁, t₂) at `p` with
/// t₁ × t₂ = p, so the sphere area form evaluates to +1 on (t₁, t₂).
pub fn tangent_basis(p: &UnitVec3) -> (Vector3<f64>, Vector3<f64>) {
    let n = p.coords();
    // Seed axis: the coordinate direction most transverse to p.
    let seed = if n.x.abs() <= n.y.abs() && n.x.abs() <= n.z.abs() {
        Vector3::x()
    } else if n.y.abs() <= n.z.abs() {
        Vector3::y()
    } else {
        Vector3::z()
    };
    let t1 = seed.cross(&n).normalize();
    let t2 = n.cross(&t1);
    (t1, t2)
}

fn checked(at: &ProductPoint, t: &TangentPair) -> Result<()> {
    let residual = t.tangency_residual(at);
    if residual > tol::TANGENT_PRE {
        return Err(Error::TangencyViolation {
            residual,
            limit: tol::TANGENT_PRE,
        });
    }
    Ok(())
}

/// Product symplectic form ⟨p, u×u'⟩ + ⟨q, v×v'⟩.
pub fn product_form(at: &ProductPoint, s: &TangentPair, t: &TangentPair) -> Result<f64> {
    checked(at, s)?;
    checked(at, t)?;
    Ok(at.p.coords().dot(&s.u.cross(&t.u)) + at.q.coords().dot(&s.v.cross(&t.v)))
}

/// Round product metric ⟨u,u'⟩ + ⟨v,v'⟩.
pub fn round_metric(at: &ProductPoint, s: &TangentPair, t: &TangentPair) -> Result<f64> {
    checked(at, s)?;
    checked(at, t)?;
    Ok(s.u.dot(&t.u) + s.v.dot(&t.v))
}

/// Orthonormal frame for the round metric at a point of the product.
#[derive(Debug, Clone)]
pub struct Frame {
    pub at: ProductPoint,
    pub basis: [TangentPair; 4],
}

impl Frame {
    pub fn standard(at: &ProductPoint) -> Self {
        let (a1, a2) = tangent_basis(&at.p);
        let (b1, b2) = tangent_basis(&at.q);
        let z = Vector3::zeros();
        Frame {
            at: *at,
            basis: [
                TangentPair::new(a1, z),
                TangentPair::new(a2, z),
                TangentPair::new(z, b1),
                TangentPair::new(z, b2),
            ],
        }
    }

    /// Frame coordinates of a tangent pair (round-metric orthonormal
    /// expansion).
    pub fn coords_of(&self, t: &TangentPair) -> Vector4<f64> {
        Vector4::new(
            t.u.dot(&self.basis[0].u),
            t.u.dot(&self.basis[1].u),
            t.v.dot(&self.basis[2].v),
            t.v.dot(&self.basis[3].v),
        )
    }

    /// Tangent pair with the given frame coordinates.
    pub fn tangent_from(&self, c: &Vector4<f64>) -> TangentPair {
        let mut out = TangentPair::zero();
        for (i, b) in self.basis.iter().enumerate() {
            out = out.add(&b.scaled(c[i]));
        }
        out
    }
}

/// A metric and a 2-form as matrices in an orthonormal frame at a point.
#[derive(Debug, Clone)]
pub struct FrameMatrices {
    pub frame: Frame,
    pub g: Matrix4<f64>,
    pub omega: Matrix4<f64>,
}

impl FrameMatrices {
    /// Round metric and product form in the standard frame. The metric
    /// matrix is the identity and the form matrix is the standard block
    /// `[[0,1],[−1,0]] ⊕ [[0,1],[−1,0]]` up to roundoff; both are computed
    /// honestly from the bilinear forms.
    pub fn round_product(at: &ProductPoint) -> Result<Self> {
        let frame = Frame::standard(at);
        let mut g = Matrix4::zeros();
        let mut omega = Matrix4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                g[(i, j)] = round_metric(at, &frame.basis[i], &frame.basis[j])?;
                omega[(i, j)] = product_form(at, &frame.basis[i], &frame.basis[j])?;
            }
        }
        Ok(FrameMatrices { frame, g, omega })
    }
}
