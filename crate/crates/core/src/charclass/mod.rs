//! Exact 𝔽₂ graded-ring arithmetic and Stiefel–Whitney calculus.
//!
//! Rings are quotients ℤ₂[g₁, …, g_r]/(g₁^{p₁}, …, g_r^{p_r}) with graded
//! generators and pure-power relations only, which keeps normal-form
//! rewriting trivially confluent: a monomial is zero exactly when some
//! exponent reaches its generator's nilpotency or its degree exceeds the
//! ring's top degree. The ring of interest is
//! H*(ℝP² × S¹; ℤ₂) = ℤ₂[a, b]/(a³, b²) with a = w₁(ℝP²) and
//! b = w₁(L_{S¹}), but the bundle operations and their oracle run over any
//! such ring.

mod bundles;
mod homology;
mod parse;

pub use bundles::{
    mapping_torus_total, mapping_torus_w3, splitting_oracle, tensor_by_line, w3_identity_torus,
    whitney_sum, IdentityTorusReport, MappingTorusReport, SWClass,
};
pub use homology::{homology_checks, HomologyReport, HomologyTable, IntegralGroup};
pub use parse::{parse_bundle, parse_element, parse_ring};

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::error::Error;
use crate::Result;

/// A graded generator with a pure-power relation g^nilpotency = 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub degree: u32,
    pub nilpotency: u32,
}

/// The ring data: generators, relations, top degree.
#[derive(Debug, PartialEq, Eq)]
pub struct RingSpec {
    gens: Vec<Generator>,
    top_degree: u32,
}

/// Shared handle to a ring; elements hold one and refuse to mix rings.
#[derive(Debug, Clone)]
pub struct Ring(Arc<RingSpec>);

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for Ring {}

impl Ring {
    /// Builds a ring from (name, degree, nilpotency) triples. The top degree
    /// is Σ (nilpotency − 1)·degree, the degree of the socle monomial.
    pub fn new(gens: &[(&str, u32, u32)]) -> Result<Ring> {
        let mut seen = BTreeSet::new();
        let mut top = 0u32;
        let mut out = Vec::with_capacity(gens.len());
        for &(name, degree, nilpotency) in gens {
            if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(Error::Parse(format!("bad generator name '{name}'")));
            }
            if !seen.insert(name.to_string()) {
                return Err(Error::Parse(format!("duplicate generator '{name}'")));
            }
            if degree == 0 || nilpotency < 2 {
                return Err(Error::Parse(format!(
                    "generator '{name}' needs degree ≥ 1 and nilpotency ≥ 2"
                )));
            }
            top += (nilpotency - 1) * degree;
            out.push(Generator {
                name: name.to_string(),
                degree,
                nilpotency,
            });
        }
        Ok(Ring(Arc::new(RingSpec {
            gens: out,
            top_degree: top,
        })))
    }

    /// H*(ℝP² × S¹; ℤ₂) = ℤ₂[a, b]/(a³, b²).
    pub fn rp2_x_s1() -> Ring {
        Ring::new(&[("a", 1, 3), ("b", 1, 2)]).expect("static ring is well formed")
    }

    pub fn generators(&self) -> &[Generator] {
        &self.0.gens
    }

    pub fn top_degree(&self) -> u32 {
        self.0.top_degree
    }

    pub fn zero(&self) -> F2Element {
        F2Element {
            ring: self.clone(),
            monos: BTreeSet::new(),
        }
    }

    pub fn one(&self) -> F2Element {
        let mut monos = BTreeSet::new();
        monos.insert(vec![0u16; self.0.gens.len()]);
        F2Element {
            ring: self.clone(),
            monos,
        }
    }

    pub fn generator(&self, name: &str) -> Result<F2Element> {
        let idx = self
            .0
            .gens
            .iter()
            .position(|g| g.name == name)
            .ok_or_else(|| Error::Parse(format!("unknown generator '{name}'")))?;
        let mut exp = vec![0u16; self.0.gens.len()];
        exp[idx] = 1;
        let mut monos = BTreeSet::new();
        monos.insert(exp);
        Ok(F2Element {
            ring: self.clone(),
            monos,
        })
    }

    fn mono_degree(&self, exp: &[u16]) -> u32 {
        exp.iter()
            .zip(&self.0.gens)
            .map(|(&e, g)| e as u32 * g.degree)
            .sum()
    }

    /// Normal form: None when the monomial is annihilated by a relation or
    /// exceeds the top degree.
    fn normalize(&self, exp: &[u16]) -> Option<Vec<u16>> {
        for (&e, g) in exp.iter().zip(&self.0.gens) {
            if e as u32 >= g.nilpotency {
                return None;
            }
        }
        if self.mono_degree(exp) > self.0.top_degree {
            return None;
        }
        Some(exp.to_vec())
    }
}

/// An element of the graded ring: the set of normal-form monomials with
/// coefficient 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct F2Element {
    ring: Ring,
    monos: BTreeSet<Vec<u16>>,
}

impl F2Element {
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.monos.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.monos.len() == 1
            && self
                .monos
                .iter()
                .next()
                .is_some_and(|m| m.iter().all(|&e| e == 0))
    }

    fn check_ring(&self, other: &F2Element) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch);
        }
        Ok(())
    }

    /// Sum over 𝔽₂: symmetric difference of monomial sets.
    pub fn add(&self, other: &F2Element) -> Result<F2Element> {
        self.check_ring(other)?;
        let monos = self
            .monos
            .symmetric_difference(&other.monos)
            .cloned()
            .collect();
        Ok(F2Element {
            ring: self.ring.clone(),
            monos,
        })
    }

    /// Product reduced to normal form; degree-additive.
    pub fn mul(&self, other: &F2Element) -> Result<F2Element> {
        self.check_ring(other)?;
        let mut monos = BTreeSet::new();
        for m1 in &self.monos {
            for m2 in &other.monos {
                let summed: Vec<u16> = m1.iter().zip(m2).map(|(a, b)| a + b).collect();
                if let Some(normal) = self.ring.normalize(&summed) {
                    // Coefficients live in 𝔽₂: collisions cancel.
                    if !monos.remove(&normal) {
                        monos.insert(normal);
                    }
                }
            }
        }
        Ok(F2Element {
            ring: self.ring.clone(),
            monos,
        })
    }

    pub fn pow(&self, k: u32) -> Result<F2Element> {
        let mut out = self.ring.one();
        for _ in 0..k {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// The part of the element in the given degree.
    pub fn homogeneous_part(&self, degree: u32) -> F2Element {
        let monos = self
            .monos
            .iter()
            .filter(|m| self.ring.mono_degree(m) == degree)
            .cloned()
            .collect();
        F2Element {
            ring: self.ring.clone(),
            monos,
        }
    }

    pub fn is_homogeneous(&self, degree: u32) -> bool {
        self.monos
            .iter()
            .all(|m| self.ring.mono_degree(m) == degree)
    }

    /// Largest degree carrying a monomial; None for the zero element.
    pub fn degree(&self) -> Option<u32> {
        self.monos.iter().map(|m| self.ring.mono_degree(m)).max()
    }
}

impl fmt::Display for F2Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.monos.is_empty() {
            return write!(f, "0");
        }
        let mut terms = Vec::new();
        for mono in &self.monos {
            let factors: Vec<String> = mono
                .iter()
                .zip(self.ring.generators())
                .filter(|(&e, _)| e > 0)
                .map(|(&e, g)| {
                    if e == 1 {
                        g.name.clone()
                    } else {
                        format!("{}^{e}", g.name)
                    }
                })
                .collect();
            terms.push(if factors.is_empty() {
                "1".to_string()
            } else {
                factors.join(" ")
            });
        }
        // Sort by degree, then by the monomial text, for stable output.
        terms.sort();
        write!(f, "{}", terms.join(" + "))
    }
}
