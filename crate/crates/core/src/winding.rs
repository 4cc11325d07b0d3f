//! Integer winding classes of closed curves on the fixed torus
//! L = {x₃ = 0} × {y₃ = 0}.
//!
//! Basis convention: γ_B is the z-circle t ↦ (t, w₀) with class (1, 0) and
//! γ_A the w-circle t ↦ (z₀, t) with class (0, 1), oriented by increasing
//! angle. With this labeling the twist acts on classes by
//! (p, q) ↦ (p + m·q, q), i.e. the matrix [[1, m], [0, 1]] on (γ_B, γ_A).
//! Classes are computed by unwrapping angle increments and demanding the
//! total be within [`tol::WINDING_INT`] of 2π times an integer.

use std::io::Write;

use crate::error::Error;
use crate::geometry::ProductPoint;
use crate::maps::MapSpec;
use crate::tol;
use crate::Result;

use std::f64::consts::{PI, TAU};

/// Refinement cap for adaptive resampling (samples per curve).
const MAX_SAMPLES: usize = 1 << 16;

/// A sampled closed curve on the torus, stored as (α, β) angle pairs.
#[derive(Debug, Clone)]
pub struct TorusCurve {
    samples: Vec<(f64, f64)>,
    closed: bool,
}

/// An H₁ class of the torus: windings in (Arg z, Arg w).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct H1Class {
    pub p: i64,
    pub q: i64,
}

fn wrap_diff(a: f64, b: f64) -> f64 {
    // Difference a − b reduced to (−π, π].
    let mut d = (a - b) % TAU;
    if d > PI {
        d -= TAU;
    } else if d <= -PI {
        d += TAU;
    }
    d
}

impl TorusCurve {
    /// Validates the unwrap-safety invariant: consecutive jumps < π in each
    /// coordinate.
    pub fn new(samples: Vec<(f64, f64)>, closed: bool) -> Result<Self> {
        for window in samples.windows(2) {
            let da = wrap_diff(window[1].0, window[0].0).abs();
            let db = wrap_diff(window[1].1, window[0].1).abs();
            if da >= PI || db >= PI {
                return Err(Error::UnwrapFail {
                    jump: da.max(db),
                    samples: samples.len(),
                });
            }
        }
        Ok(TorusCurve { samples, closed })
    }

    /// γ_A: t ↦ (z₀, t), the w-circle through angle `z0`; class (0, 1).
    pub fn gamma_a(z0: f64, n: usize) -> Self {
        let n = n.max(64);
        let samples = (0..=n).map(|i| (z0, TAU * i as f64 / n as f64)).collect();
        TorusCurve {
            samples,
            closed: true,
        }
    }

    /// γ_B: t ↦ (t, w₀), the z-circle through angle `w0`; class (1, 0).
    pub fn gamma_b(w0: f64, n: usize) -> Self {
        let n = n.max(64);
        let samples = (0..=n).map(|i| (TAU * i as f64 / n as f64, w0)).collect();
        TorusCurve {
            samples,
            closed: true,
        }
    }

    pub fn reversed(&self) -> Self {
        let mut samples = self.samples.clone();
        samples.reverse();
        TorusCurve {
            samples,
            closed: self.closed,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    /// The curve as points of the product, on the torus.
    pub fn points(&self) -> impl Iterator<Item = ProductPoint> + '_ {
        self.samples
            .iter()
            .map(|&(a, b)| ProductPoint::on_torus(a, b))
    }

    /// Largest wrapped jump between consecutive samples.
    fn max_jump(&self) -> f64 {
        self.samples
            .windows(2)
            .map(|w| {
                wrap_diff(w[1].0, w[0].0)
                    .abs()
                    .max(wrap_diff(w[1].1, w[0].1).abs())
            })
            .fold(0.0f64, f64::max)
    }

    /// Summed wrapped increments in each coordinate.
    fn total_increments(&self) -> (f64, f64) {
        self.samples.windows(2).fold((0.0, 0.0), |acc, w| {
            (
                acc.0 + wrap_diff(w[1].0, w[0].0),
                acc.1 + wrap_diff(w[1].1, w[0].1),
            )
        })
    }

    /// Doubled sampling by torus-geodesic midpoints.
    fn refined(&self) -> Self {
        let mut samples = Vec::with_capacity(self.samples.len() * 2);
        for window in self.samples.windows(2) {
            let (a0, b0) = window[0];
            let (a1, b1) = window[1];
            samples.push((a0, b0));
            samples.push((a0 + wrap_diff(a1, a0) / 2.0, b0 + wrap_diff(b1, b0) / 2.0));
        }
        if let Some(&last) = self.samples.last() {
            samples.push(last);
        }
        TorusCurve {
            samples,
            closed: self.closed,
        }
    }

    /// CSV export with columns t, alpha, beta.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t,alpha,beta")?;
        let n = self.samples.len().max(2) - 1;
        for (i, (alpha, beta)) in self.samples.iter().enumerate() {
            writeln!(out, "{},{alpha},{beta}", i as f64 / n as f64)?;
        }
        Ok(())
    }
}

/// Pushes a curve through a torus-preserving map, refining the source
/// sampling until the image is unwrap-safe.
///
/// A wrapped jump below π alone cannot certify the unwrap branch, since a
/// true increment of 2π − ε aliases to −ε. Acceptance therefore requires
/// image jumps below π/2 *and* agreement of the summed increments with one
/// further doubling (refinement stability).
///
/// Errors with [`Error::LeavesTorus`] when any image point has |x₃| or |y₃|
/// beyond [`tol::TORUS`] (the signature of a non-equivariant or broken map)
/// and with [`Error::UnwrapFail`] if refinement hits the cap.
pub fn push_curve(map: &MapSpec, curve: &TorusCurve) -> Result<TorusCurve> {
    let mut source = curve.clone();
    let mut last_jump;
    let mut prev_totals: Option<(f64, f64)> = None;
    loop {
        match push_once(map, &source) {
            Ok(image) => {
                last_jump = image.max_jump();
                if last_jump < PI / 2.0 {
                    let totals = image.total_increments();
                    if let Some(prev) = prev_totals {
                        if (totals.0 - prev.0).abs() < 0.1 && (totals.1 - prev.1).abs() < 0.1 {
                            return Ok(image);
                        }
                    }
                    prev_totals = Some(totals);
                } else {
                    prev_totals = None;
                }
            }
            Err(Error::UnwrapFail { jump, .. }) => {
                last_jump = jump;
                prev_totals = None;
            }
            Err(other) => return Err(other),
        }
        if source.len() * 2 > MAX_SAMPLES {
            return Err(Error::UnwrapFail {
                jump: last_jump,
                samples: source.len(),
            });
        }
        source = source.refined();
    }
}

fn push_once(map: &MapSpec, curve: &TorusCurve) -> Result<TorusCurve> {
    project_to_angles(curve.points().map(|pt| map.eval(&pt)), curve.is_closed())
}

/// Converts points near the torus back to angle pairs, rejecting any point
/// with |x₃| or |y₃| above [`tol::TORUS`].
fn project_to_angles(
    points: impl Iterator<Item = ProductPoint>,
    closed: bool,
) -> Result<TorusCurve> {
    let mut samples = Vec::new();
    for image in points {
        let off = image.p.x3().abs().max(image.q.x3().abs());
        if off > tol::TORUS {
            return Err(Error::LeavesTorus { off });
        }
        samples.push((
            image.p.x2().atan2(image.p.x1()),
            image.q.x2().atan2(image.q.x1()),
        ));
    }
    TorusCurve::new(samples, closed)
}

/// Pushes a curve on the fixed torus of `sigma`; rejects involutions with
/// empty fixed locus up front.
pub fn push_curve_on_fixed_torus(
    sigma: &MapSpec,
    map: &MapSpec,
    curve: &TorusCurve,
) -> Result<TorusCurve> {
    if matches!(sigma, MapSpec::SigmaQ40) {
        return Err(Error::EmptyFixedLocus {
            sigma: sigma.name(),
        });
    }
    push_curve(map, curve)
}

/// Winding class (p, q) = (Σ unwrapped Δα, Σ unwrapped Δβ)/2π.
pub fn winding_class(curve: &TorusCurve) -> Result<H1Class> {
    if !curve.is_closed() || curve.len() < 2 {
        return Err(Error::Parse("winding class requires a closed curve".into()));
    }
    let first = curve.samples()[0];
    let last = *curve.samples().last().expect("nonempty");
    let closure = wrap_diff(last.0, first.0)
        .abs()
        .max(wrap_diff(last.1, first.1).abs());
    if closure > 1e-9 {
        return Err(Error::Parse(format!(
            "curve endpoints differ by {closure:.2e} mod 2π"
        )));
    }
    let mut total = (0.0f64, 0.0f64);
    for window in curve.samples().windows(2) {
        let da = wrap_diff(window[1].0, window[0].0);
        let db = wrap_diff(window[1].1, window[0].1);
        if da.abs() >= PI || db.abs() >= PI {
            return Err(Error::UnwrapFail {
                jump: da.abs().max(db.abs()),
                samples: curve.len(),
            });
        }
        total.0 += da;
        total.1 += db;
    }
    let to_int = |sum: f64| -> Result<i64> {
        let value = sum / TAU;
        let rounded = value.round();
        if (value - rounded).abs() > tol::WINDING_INT {
            return Err(Error::WindingNotIntegral {
                value,
                limit: tol::WINDING_INT,
            });
        }
        Ok(rounded as i64)
    };
    Ok(H1Class {
        p: to_int(total.0)?,
        q: to_int(total.1)?,
    })
}
