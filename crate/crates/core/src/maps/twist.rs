//! The fiberwise rotation field of the twist map.
//!
//! The twist acts on (x, y) by (G(y)·x, y) where G: S² → SO(3). Writing
//! ρ = artanh(y₃) and θ = atan2(y₂, y₁) (so ρ = log|w| and θ = Arg w in the
//! stereographic chart of the second factor), the field has three zones for
//! band half-width δ:
//!
//! * equatorial band |ρ| ≤ δ/2: G = R_{e₃}(m·θ), the plain rotation about
//!   the third axis;
//! * lower cap −δ < ρ < −δ/2 (|w| < 1): a belt-trick interpolation. With
//!   n = m/2, tilt s ∈ [0, π/2] a quintic smoothstep in |ρ| from the band
//!   edge δ/2 to the cap radius δ, and axes a± = k̂·cos s ± î·sin s, the
//!   unit quaternion Q(s, θ) = [exp((θ/2)·a₊) · exp((θ/2)·a₋)]ⁿ
//!   is 2π-periodic in θ for every s (each factor picks up −1 at θ + 2π)
//!   and collapses to 1 at s = π/2, so G extends by the identity through
//!   the pole w = 0;
//! * upper cap ρ > δ/2: G(y) := M·G(My)·M with M = diag(1, 1, −1), which
//!   makes equivariance against (z, w) ↦ (z̄⁻¹, w̄⁻¹) hold by construction.
//!
//! At s = 0 the quaternion is exp(nθk̂), the rotation by mθ about e₃, so the
//! zones agree on their edges. Everything here also returns the derivative
//! of G as an angular-velocity field, which the analytic differential of the
//! twist consumes.

use nalgebra::{Matrix3, Vector3};

use crate::geometry::UnitVec3;

use std::f64::consts::FRAC_PI_2;

/// Quaternion w + x·î + y·ĵ + z·k̂.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Quat {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

pub(crate) const QUAT_ONE: Quat = Quat {
    w: 1.0,
    x: 0.0,
    y: 0.0,
    z: 0.0,
};

const QUAT_ZERO: Quat = Quat {
    w: 0.0,
    x: 0.0,
    y: 0.0,
    z: 0.0,
};

impl Quat {
    pub fn mul(self, o: Quat) -> Quat {
        Quat {
            w: self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            x: self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            y: self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            z: self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        }
    }

    pub fn add(self, o: Quat) -> Quat {
        Quat {
            w: self.w + o.w,
            x: self.x + o.x,
            y: self.y + o.y,
            z: self.z + o.z,
        }
    }

    pub fn scale(self, a: f64) -> Quat {
        Quat {
            w: a * self.w,
            x: a * self.x,
            y: a * self.y,
            z: a * self.z,
        }
    }

    pub fn conj(self) -> Quat {
        Quat {
            w: self.w,
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }

    pub fn vector_part(self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.z)
    }

    /// Rotation action v ↦ q·v·q̄ for unit q.
    pub fn rotate(self, v: &Vector3<f64>) -> Vector3<f64> {
        let p = Quat {
            w: 0.0,
            x: v.x,
            y: v.y,
            z: v.z,
        };
        self.mul(p).mul(self.conj()).vector_part()
    }

    pub fn rotation_matrix(self) -> Matrix3<f64> {
        Matrix3::from_columns(&[
            self.rotate(&Vector3::x()),
            self.rotate(&Vector3::y()),
            self.rotate(&Vector3::z()),
        ])
    }

    #[cfg(test)]
    pub fn norm(self) -> f64 {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }
}

/// exp((θ/2)·a) = cos(θ/2) + a·sin(θ/2) for the tilted axis
/// a = k̂·cos s + sign·î·sin s, together with its θ- and s-partials.
fn belt_factor(theta: f64, s: f64, sign: f64) -> (Quat, Quat, Quat) {
    let (half_sin, half_cos) = (theta / 2.0).sin_cos();
    let (s_sin, s_cos) = s.sin_cos();
    let axis = Quat {
        w: 0.0,
        x: sign * s_sin,
        y: 0.0,
        z: s_cos,
    };
    let axis_ds = Quat {
        w: 0.0,
        x: sign * s_cos,
        y: 0.0,
        z: -s_sin,
    };
    let f = Quat {
        w: half_cos,
        ..axis.scale(half_sin)
    };
    let f_dtheta = Quat {
        w: -half_sin / 2.0,
        ..axis.scale(half_cos / 2.0)
    };
    let f_ds = axis_ds.scale(half_sin);
    (f, f_dtheta, f_ds)
}

/// Q(s, θ)ⁿ together with (∂Q/∂θ, ∂Q/∂s). Handles negative n through the
/// unit-quaternion conjugate.
pub(crate) fn belt_quaternion(n: i64, theta: f64, s: f64) -> (Quat, Quat, Quat) {
    let (fp, fp_dt, fp_ds) = belt_factor(theta, s, 1.0);
    let (fm, fm_dt, fm_ds) = belt_factor(theta, s, -1.0);
    let base = fp.mul(fm);
    let base_dt = fp_dt.mul(fm).add(fp.mul(fm_dt));
    let base_ds = fp_ds.mul(fm).add(fp.mul(fm_ds));
    // The base stays unit for all (θ, s), so its inverse is the conjugate
    // and d(conj) = conj(d).
    let (b, b_dt, b_ds) = if n >= 0 {
        (base, base_dt, base_ds)
    } else {
        (base.conj(), base_dt.conj(), base_ds.conj())
    };
    let mut q = QUAT_ONE;
    let mut q_dt = QUAT_ZERO;
    let mut q_ds = QUAT_ZERO;
    for _ in 0..n.unsigned_abs() {
        q_dt = q_dt.mul(b).add(q.mul(b_dt));
        q_ds = q_ds.mul(b).add(q.mul(b_ds));
        q = q.mul(b);
    }
    (q, q_dt, q_ds)
}

/// Quintic smoothstep and its derivative on [0, 1].
fn smoothstep5(u: f64) -> (f64, f64) {
    if u <= 0.0 {
        (0.0, 0.0)
    } else if u >= 1.0 {
        (1.0, 0.0)
    } else {
        let u2 = u * u;
        (
            u2 * u * (10.0 - 15.0 * u + 6.0 * u2),
            30.0 * u2 * (u - 1.0) * (u - 1.0),
        )
    }
}

/// The rotation G(y) and its derivative.
///
/// `omega` maps a tangent direction v at y to the angular velocity vector
/// ω(v) with D_vG·x = ω(v) × (G·x).
#[derive(Debug, Clone)]
pub(crate) struct RotationJet {
    pub rot: Matrix3<f64>,
    pub omega: Matrix3<f64>,
}

impl RotationJet {
    fn identity() -> Self {
        RotationJet {
            rot: Matrix3::identity(),
            omega: Matrix3::zeros(),
        }
    }
}

pub(crate) fn rotation_jet(m: i64, delta: f64, y: &UnitVec3) -> RotationJet {
    let t_band = (delta / 2.0).tanh();
    let t_cap = delta.tanh();
    let y3 = y.x3();

    if y3.abs() >= t_cap {
        // Beyond the cap radius the tilt sits at π/2 and the quaternion is
        // identically 1; this also covers both poles where θ is undefined.
        return RotationJet::identity();
    }

    let planar2 = y.x1() * y.x1() + y.x2() * y.x2();
    let theta = y.x2().atan2(y.x1());
    let grad_theta = Vector3::new(-y.x2(), y.x1(), 0.0) / planar2;

    if y3.abs() <= t_band {
        // Band: G = R_{e3}(mθ).
        let angle = m as f64 * theta;
        let (sin, cos) = angle.sin_cos();
        let rot = Matrix3::new(cos, -sin, 0.0, sin, cos, 0.0, 0.0, 0.0, 1.0);
        let omega = Vector3::z() * m as f64 * grad_theta.transpose();
        return RotationJet { rot, omega };
    }

    if y3 < 0.0 {
        // Lower cap: belt-trick interpolation.
        let rho = y3.atanh();
        let u = (rho.abs() - delta / 2.0) / (delta / 2.0);
        let (step, step_du) = smoothstep5(u);
        let s = FRAC_PI_2 * step;
        // d|ρ|/dy₃ = −1/(1−y₃²) on the lower cap.
        let ds_dy3 = -FRAC_PI_2 * step_du * (2.0 / delta) / (1.0 - y3 * y3);
        let grad_s = Vector3::new(0.0, 0.0, ds_dy3);

        let (q, q_dt, q_ds) = belt_quaternion(m / 2, theta, s);
        let rot = q.rotation_matrix();
        // D_vG·x = [dq q̄, Gx] = 2·vect(dq q̄) × Gx for unit q.
        let p_theta = q_dt.mul(q.conj()).vector_part() * 2.0;
        let p_s = q_ds.mul(q.conj()).vector_part() * 2.0;
        let omega = p_theta * grad_theta.transpose() + p_s * grad_s.transpose();
        return RotationJet { rot, omega };
    }

    // Upper cap: conjugate the lower-cap field through M = diag(1,1,−1).
    // With G = M·G'(My)·M one gets ω(v) = −M·ω'(Mv), since M reverses
    // cross products.
    let mirrored = UnitVec3::new(y.x1(), y.x2(), -y3).expect("mirror of a unit vector");
    let inner = rotation_jet(m, delta, &mirrored);
    let mm = Matrix3::new(1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, -1.0);
    RotationJet {
        rot: mm * inner.rot * mm,
        omega: -mm * inner.omega * mm,
    }
}
