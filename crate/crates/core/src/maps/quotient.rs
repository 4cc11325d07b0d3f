//! The quotient Z = (S² × S²)/(x, y) ∼ (−x, −y) and the descent of the
//! reflection map.
//!
//! Points of Z are stored through a canonical lift: of the two lifts
//! ±(x, y), keep the one whose concatenated coordinate 6-tuple has positive
//! first significant entry. The reflection map commutes with the deck
//! transformation componentwise, f(−x, −y) = −f(x, y), so it descends to a
//! self-map g of Z, and g fixes the image of the diagonal pointwise since
//! f(x, x) = (−x + 2x, x) = (x, x).

use super::MapSpec;
use crate::geometry::ProductPoint;
use crate::tol;

/// A point of the quotient, held by its canonical lift.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuotientPoint {
    rep: ProductPoint,
}

impl QuotientPoint {
    pub fn new(pt: &ProductPoint) -> Self {
        QuotientPoint {
            rep: canonicalize(pt),
        }
    }

    pub fn representative(&self) -> &ProductPoint {
        &self.rep
    }

    /// Distance between classes: minimum over the two lifts.
    pub fn distance(&self, other: &QuotientPoint) -> f64 {
        let negated = ProductPoint::new(other.rep.p.antipode(), other.rep.q.antipode());
        self.rep
            .distance(&other.rep)
            .min(self.rep.distance(&negated))
    }
}

fn canonicalize(pt: &ProductPoint) -> ProductPoint {
    let coords = [
        pt.p.x1(),
        pt.p.x2(),
        pt.p.x3(),
        pt.q.x1(),
        pt.q.x2(),
        pt.q.x3(),
    ];
    for c in coords {
        // Coordinates within UNIT_NORM of zero do not decide the sign; move
        // on to the next one.
        if c.abs() <= tol::UNIT_NORM {
            continue;
        }
        if c < 0.0 {
            return ProductPoint::new(pt.p.antipode(), pt.q.antipode());
        }
        return *pt;
    }
    // Unreachable for genuine unit vectors; keep the input as given.
    *pt
}

/// The covering map X → Z.
pub fn quotient_map(pt: &ProductPoint) -> QuotientPoint {
    QuotientPoint::new(pt)
}

/// The descended self-map g([x, y]) = [f(x, y)] with f the reflection map.
pub fn descend_g(q: &QuotientPoint) -> QuotientPoint {
    QuotientPoint::new(&MapSpec::ReflectF.eval(q.representative()))
}
