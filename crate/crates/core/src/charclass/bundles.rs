//! Total Stiefel–Whitney classes, Whitney sums, line-bundle twists, and the
//! mapping-torus w₃ computation.
//!
//! The closed twist formula is wₖ(E ⊗ L) = Σᵢ C(n−i, k−i)·wᵢ(E)·w₁(L)^{k−i}
//! with n = rank E and binomials mod 2 by Lucas' theorem. Its independent
//! oracle adjoins formal degree-1 roots t₁, …, t_n with elementary symmetric
//! functions equal to the wᵢ(E), expands Π(1 + tᵢ + w₁(L)), and eliminates
//! the roots by greedy symmetric-function reduction; any non-symmetric
//! residue trips an internal error rather than being absorbed.

use std::collections::BTreeMap;

use super::{F2Element, Ring};
use crate::error::Error;
use crate::Result;

/// C(n, k) mod 2 by Lucas: odd exactly when k's bits are a subset of n's.
fn binom_mod2(n: u32, k: u32) -> bool {
    k <= n && (k & !n) == 0
}

/// A total Stiefel–Whitney class with rank: w₀ = 1, wᵢ homogeneous of
/// degree i, wᵢ = 0 beyond the rank.
#[derive(Debug, Clone, PartialEq)]
pub struct SWClass {
    ring: Ring,
    rank: u32,
    w: Vec<F2Element>,
}

impl SWClass {
    pub fn new(ring: &Ring, rank: u32, w: Vec<F2Element>) -> Result<Self> {
        if w.len() != rank as usize + 1 {
            return Err(Error::Parse(format!(
                "total class needs rank+1 = {} entries, got {}",
                rank + 1,
                w.len()
            )));
        }
        if !w[0].is_one() {
            return Err(Error::Parse("w0 must be 1".into()));
        }
        for (i, wi) in w.iter().enumerate() {
            if wi.ring() != ring {
                return Err(Error::RingMismatch);
            }
            if !wi.is_homogeneous(i as u32) {
                return Err(Error::Parse(format!(
                    "w{i} is not homogeneous of degree {i}"
                )));
            }
        }
        Ok(SWClass {
            ring: ring.clone(),
            rank,
            w,
        })
    }

    /// Rank-r bundle with total class 1.
    pub fn trivial(ring: &Ring, rank: u32) -> Self {
        let mut w = vec![ring.zero(); rank as usize + 1];
        w[0] = ring.one();
        SWClass {
            ring: ring.clone(),
            rank,
            w,
        }
    }

    /// Splits a total-class element into homogeneous parts. Parts beyond the
    /// rank must vanish.
    pub fn from_total(ring: &Ring, rank: u32, total: &F2Element) -> Result<Self> {
        if total.ring() != ring {
            return Err(Error::RingMismatch);
        }
        for d in (rank + 1)..=ring.top_degree() {
            if !total.homogeneous_part(d).is_zero() {
                return Err(Error::Parse(format!(
                    "total class has degree-{d} part beyond rank {rank}"
                )));
            }
        }
        let w = (0..=rank).map(|d| total.homogeneous_part(d)).collect();
        SWClass::new(ring, rank, w)
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    /// wᵢ, taking wᵢ = 0 above the rank.
    pub fn w(&self, i: u32) -> F2Element {
        self.w
            .get(i as usize)
            .cloned()
            .unwrap_or_else(|| self.ring.zero())
    }

    /// The total class w₀ + w₁ + … as one ring element.
    pub fn total(&self) -> F2Element {
        let mut out = self.ring.zero();
        for wi in &self.w {
            out = out.add(wi).expect("same ring");
        }
        out
    }
}

/// Whitney sum: ranks add, total classes multiply.
pub fn whitney_sum(e: &SWClass, f: &SWClass) -> Result<SWClass> {
    if e.ring != f.ring {
        return Err(Error::RingMismatch);
    }
    let total = e.total().mul(&f.total())?;
    SWClass::from_total(&e.ring, e.rank + f.rank, &total)
}

/// wₖ(E ⊗ L) by the closed formula; `line` must have rank 1.
pub fn tensor_by_line(e: &SWClass, line: &SWClass) -> Result<SWClass> {
    if e.ring != line.ring {
        return Err(Error::RingMismatch);
    }
    if line.rank != 1 {
        return Err(Error::RankMismatch {
            op: "tensor_by_line",
            expected: 1,
            got: line.rank,
        });
    }
    let t = line.w(1);
    let n = e.rank;
    let mut w = Vec::with_capacity(n as usize + 1);
    for k in 0..=n {
        let mut wk = e.ring.zero();
        for i in 0..=k {
            if binom_mod2(n - i, k - i) {
                let term = e.w(i).mul(&t.pow(k - i)?)?;
                wk = wk.add(&term)?;
            }
        }
        w.push(wk);
    }
    SWClass::new(&e.ring, n, w)
}

/// Polynomial in the formal roots with ring coefficients.
struct RootPoly {
    vars: usize,
    ring: Ring,
    terms: BTreeMap<Vec<u16>, F2Element>,
}

impl RootPoly {
    fn zero(ring: &Ring, vars: usize) -> Self {
        RootPoly {
            vars,
            ring: ring.clone(),
            terms: BTreeMap::new(),
        }
    }

    fn constant(ring: &Ring, vars: usize, c: F2Element) -> Self {
        let mut poly = RootPoly::zero(ring, vars);
        poly.add_term(vec![0; vars], c);
        poly
    }

    fn add_term(&mut self, exp: Vec<u16>, c: F2Element) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&exp) {
            None => {
                self.terms.insert(exp, c);
            }
            Some(existing) => {
                let sum = existing.add(&c).expect("same ring");
                if !sum.is_zero() {
                    self.terms.insert(exp, sum);
                }
            }
        }
    }

    fn add_assign(&mut self, other: &RootPoly) {
        for (exp, c) in &other.terms {
            self.add_term(exp.clone(), c.clone());
        }
    }

    fn mul(&self, other: &RootPoly) -> RootPoly {
        let mut out = RootPoly::zero(&self.ring, self.vars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let exp: Vec<u16> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                let c = c1.mul(c2).expect("same ring");
                out.add_term(exp, c);
            }
        }
        out
    }

    /// Multiply by the root factor (1 + tᵢ + ℓ).
    fn mul_root_factor(&self, i: usize, ell: &F2Element) -> RootPoly {
        let mut out = RootPoly::zero(&self.ring, self.vars);
        for (exp, c) in &self.terms {
            out.add_term(exp.clone(), c.clone());
            let mut shifted = exp.clone();
            shifted[i] += 1;
            out.add_term(shifted, c.clone());
            out.add_term(exp.clone(), c.mul(ell).expect("same ring"));
        }
        out
    }

    /// Elementary symmetric polynomial e_k(t₁, …, t_n).
    fn elementary(ring: &Ring, vars: usize, k: usize) -> RootPoly {
        let mut out = RootPoly::zero(ring, vars);
        let mut subset = vec![0usize; k];
        fn rec(
            out: &mut RootPoly,
            subset: &mut Vec<usize>,
            depth: usize,
            start: usize,
            vars: usize,
            one: &F2Element,
        ) {
            if depth == subset.len() {
                let mut exp = vec![0u16; vars];
                for &v in subset.iter() {
                    exp[v] = 1;
                }
                out.add_term(exp, one.clone());
                return;
            }
            for v in start..vars {
                subset[depth] = v;
                rec(out, subset, depth + 1, v + 1, vars, one);
            }
        }
        let one = ring.one();
        rec(&mut out, &mut subset, 0, 0, vars, &one);
        out
    }
}

/// Brute-force twist total class through formal roots and symmetric-function
/// reduction. Kept deliberately independent of [`tensor_by_line`].
pub fn splitting_oracle(e: &SWClass, line: &SWClass) -> Result<SWClass> {
    if e.ring != line.ring {
        return Err(Error::RingMismatch);
    }
    if line.rank != 1 {
        return Err(Error::RankMismatch {
            op: "splitting_oracle",
            expected: 1,
            got: line.rank,
        });
    }
    if e.rank > 4 {
        return Err(Error::RankMismatch {
            op: "splitting_oracle",
            expected: 4,
            got: e.rank,
        });
    }
    let ring = &e.ring;
    let n = e.rank as usize;
    let ell = line.w(1);

    // Π (1 + tᵢ + ℓ).
    let mut product = RootPoly::constant(ring, n, ring.one());
    for i in 0..n {
        product = product.mul_root_factor(i, &ell);
    }

    // Greedy reduction: cancel the lex-leading root monomial λ against
    // e₁^{λ₁−λ₂}…e_n^{λ_n}, substituting wᵢ(E) for eᵢ in the result.
    let elementaries: Vec<RootPoly> = (1..=n).map(|k| RootPoly::elementary(ring, n, k)).collect();
    let mut result = ring.zero();
    while let Some((lead, coeff)) = product
        .terms
        .iter()
        .next_back()
        .map(|(k, v)| (k.clone(), v.clone()))
    {
        if lead.iter().all(|&e| e == 0) {
            result = result.add(&coeff)?;
            product.add_term(lead, coeff);
            continue;
        }
        if !lead.windows(2).all(|w| w[0] >= w[1]) {
            return Err(Error::NonSymmetricResidue {
                detail: format!("leading root monomial {lead:?}"),
            });
        }
        let mut basis_poly = RootPoly::constant(ring, n, coeff.clone());
        let mut substituted = coeff.clone();
        for i in 0..n {
            let fi = lead[i] - if i + 1 < n { lead[i + 1] } else { 0 };
            for _ in 0..fi {
                basis_poly = basis_poly.mul(&elementaries[i]);
                substituted = substituted.mul(&e.w(i as u32 + 1))?;
            }
        }
        // Subtracting equals adding over 𝔽₂; the leading term cancels.
        product.add_assign(&basis_poly);
        if product.terms.contains_key(&lead) {
            return Err(Error::NonSymmetricResidue {
                detail: format!("leading term {lead:?} failed to cancel"),
            });
        }
        result = result.add(&substituted)?;
    }
    SWClass::from_total(ring, e.rank, &result)
}

/// w(T_Q), w(L_{S¹}) and the trivial line over H*(ℝP² × S¹; ℤ₂).
fn standard_bundles(ring: &Ring) -> Result<(SWClass, SWClass, SWClass)> {
    let a = ring.generator("a")?;
    let b = ring.generator("b")?;
    // w(T_{ℝP²}) = (1+a)³ = 1 + a + a² after a³ = 0 and 3 ≡ 1 mod 2.
    let t_q = SWClass::new(ring, 2, vec![ring.one(), a.clone(), a.pow(2)?])?;
    let l_s1 = SWClass::new(ring, 1, vec![ring.one(), b])?;
    let trivial_line = SWClass::trivial(ring, 1);
    Ok((t_q, l_s1, trivial_line))
}

/// Total class of T_Q ⊕ ℝ ⊕ (T_Q ⊗ L) for a given twisting line L.
pub fn mapping_torus_total(ring: &Ring, twist_line: &SWClass) -> Result<SWClass> {
    let (t_q, _, _) = standard_bundles(ring)?;
    let twisted = tensor_by_line(&t_q, twist_line)?;
    let with_line = whitney_sum(&t_q, &SWClass::trivial(ring, 1))?;
    whitney_sum(&with_line, &twisted)
}

/// The mapping-torus w₃ computation over ℝP² × S¹.
#[derive(Debug, Clone)]
pub struct MappingTorusReport {
    pub ring: Ring,
    /// Degree-3 part of w(T_Q ⊕ ℝ ⊕ (T_Q ⊗ L_{S¹})).
    pub w3: F2Element,
    /// Same pipeline with the trivial line in place of L_{S¹}.
    pub w3_untwisted: F2Element,
    /// w₁(Q)·w₂(Q), which must vanish since dim Q = 2.
    pub w1_w2: F2Element,
    /// Cross-term route w₁(Q)w₂(T_Q⊗L) + w₂(Q)w₁(T_Q⊗L).
    pub w3_cross_terms: F2Element,
}

impl MappingTorusReport {
    /// The computation certifies the twisted obstruction class iff the
    /// twisted w₃ is the socle a²b, the untwisted one vanishes, and the two
    /// routes agree.
    pub fn pass(&self) -> bool {
        let ring = &self.ring;
        let expected =
            (|| -> Result<F2Element> { ring.generator("a")?.pow(2)?.mul(&ring.generator("b")?) })();
        match expected {
            Ok(a2b) => {
                self.w3 == a2b
                    && self.w3_untwisted.is_zero()
                    && self.w1_w2.is_zero()
                    && self.w3_cross_terms == a2b
            }
            Err(_) => false,
        }
    }
}

/// Degree-3 class of the mapping-torus restriction bundle, the two-route
/// check, and the untwisted comparison.
pub fn mapping_torus_w3() -> Result<MappingTorusReport> {
    let ring = Ring::rp2_x_s1();
    let (t_q, l_s1, trivial_line) = standard_bundles(&ring)?;
    let twisted_total = mapping_torus_total(&ring, &l_s1)?;
    let untwisted_total = mapping_torus_total(&ring, &trivial_line)?;
    let tql = tensor_by_line(&t_q, &l_s1)?;
    let cross = t_q.w(1).mul(&tql.w(2))?.add(&t_q.w(2).mul(&tql.w(1))?)?;
    Ok(MappingTorusReport {
        w3: twisted_total.w(3),
        w3_untwisted: untwisted_total.w(3),
        w1_w2: t_q.w(1).mul(&t_q.w(2))?,
        w3_cross_terms: cross,
        ring,
    })
}

/// The Euler-characteristic side: w₃ of the untwisted mapping torus pairs
/// with the fundamental class as χ mod 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IdentityTorusReport {
    /// χ(S² × S²) from the Betti numbers 1, 0, 2, 0, 1.
    pub chi_product: i64,
    /// χ of the double quotient.
    pub chi_quotient: i64,
    /// χ(quotient) mod 2, the value of the w₃ pairing with the
    /// fundamental class.
    pub w3_pairing: u8,
}

pub fn w3_identity_torus() -> IdentityTorusReport {
    let product_betti = [1i64, 0, 2, 0, 1];
    let chi_product = product_betti
        .iter()
        .enumerate()
        .map(|(k, &b)| if k % 2 == 0 { b } else { -b })
        .sum::<i64>();
    let chi_quotient = chi_product / 2;
    IdentityTorusReport {
        chi_product,
        chi_quotient,
        w3_pairing: (chi_quotient.rem_euclid(2)) as u8,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ab_ring() -> Ring {
        Ring::rp2_x_s1()
    }

    #[test]
    fn lucas_binomials() {
        // Rows 0..8 of Pascal's triangle mod 2.
        let expect = [
            [true, false, false, false, false],
            [true, true, false, false, false],
            [true, false, true, false, false],
            [true, true, true, true, false],
            [true, false, false, false, true],
        ];
        for (n, row) in expect.iter().enumerate() {
            for (k, &e) in row.iter().enumerate() {
                assert_eq!(binom_mod2(n as u32, k as u32), e, "C({n},{k})");
            }
        }
    }

    #[test]
    fn trivial_sum_is_trivial() {
        let ring = ab_ring();
        let sum = whitney_sum(&SWClass::trivial(&ring, 2), &SWClass::trivial(&ring, 3)).unwrap();
        assert_eq!(sum.rank(), 5);
        assert!(sum.total().is_one());
    }

    #[test]
    fn adding_a_trivial_line_keeps_classes() {
        let ring = ab_ring();
        let (t_q, _, trivial_line) = standard_bundles(&ring).unwrap();
        let sum = whitney_sum(&t_q, &trivial_line).unwrap();
        assert_eq!(sum.rank(), 3);
        for i in 0..=2 {
            assert_eq!(sum.w(i), t_q.w(i));
        }
        assert!(sum.w(3).is_zero());
    }

    #[test]
    fn tangent_class_input_check() {
        // (1+a)³ reduces to 1 + a + a² mod (2, a³).
        let ring = ab_ring();
        let one_plus_a = ring.one().add(&ring.generator("a").unwrap()).unwrap();
        let cubed = one_plus_a.pow(3).unwrap();
        let (t_q, _, _) = standard_bundles(&ring).unwrap();
        assert_eq!(cubed, t_q.total());
    }

    #[test]
    fn twist_formula_on_t_q() {
        let ring = ab_ring();
        let (t_q, l_s1, trivial_line) = standard_bundles(&ring).unwrap();
        let a = ring.generator("a").unwrap();
        let b = ring.generator("b").unwrap();
        let twisted = tensor_by_line(&t_q, &l_s1).unwrap();
        // w₁ → w₁(Q) (the 2·w₁(L) term cancels mod 2), w₂ → w₂ + w₁·w₁(L)
        // (the w₁(L)² term dies on b² = 0).
        assert_eq!(twisted.w(1), a);
        assert_eq!(
            twisted.w(2),
            a.pow(2).unwrap().add(&a.mul(&b).unwrap()).unwrap()
        );
        // Twisting by the trivial line changes nothing.
        let untwisted = tensor_by_line(&t_q, &trivial_line).unwrap();
        assert_eq!(untwisted, t_q);
    }

    #[test]
    fn rank_one_twist_is_single_root() {
        let ring = ab_ring();
        let (_, l_s1, _) = standard_bundles(&ring).unwrap();
        let a = ring.generator("a").unwrap();
        let e = SWClass::new(&ring, 1, vec![ring.one(), a.clone()]).unwrap();
        let twisted = splitting_oracle(&e, &l_s1).unwrap();
        // 1 + (w₁(E) + w₁(L)).
        assert_eq!(twisted.w(1), a.add(&ring.generator("b").unwrap()).unwrap());
    }

    #[test]
    fn tensor_rejects_non_line() {
        let ring = ab_ring();
        let (t_q, _, _) = standard_bundles(&ring).unwrap();
        let err = tensor_by_line(&t_q, &t_q);
        assert!(matches!(err, Err(Error::RankMismatch { .. })));
    }

    fn random_class<R: Rng>(ring: &Ring, rank: u32, rng: &mut R) -> SWClass {
        let gens: Vec<F2Element> = ring
            .generators()
            .iter()
            .map(|g| ring.generator(&g.name).unwrap())
            .collect();
        let mut w = vec![ring.one()];
        for d in 1..=rank {
            // Random homogeneous degree-d element: toggle random products.
            let mut wd = ring.zero();
            for _ in 0..4 {
                let mut mono = ring.one();
                let mut degree = 0;
                while degree < d {
                    let g = &gens[rng.random_range(0..gens.len())];
                    mono = mono.mul(g).unwrap();
                    degree += 1;
                }
                if rng.random::<bool>() {
                    wd = wd.add(&mono).unwrap();
                }
            }
            w.push(wd.homogeneous_part(d));
        }
        SWClass::new(ring, rank, w).unwrap()
    }

    #[test]
    fn oracle_matches_closed_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        let rings = [
            Ring::rp2_x_s1(),
            Ring::new(&[("a", 1, 4), ("b", 1, 3)]).unwrap(),
            Ring::new(&[("u", 1, 3), ("v", 2, 3)]).unwrap(),
        ];
        for ring in &rings {
            let line_gen = ring.generators()[0].name.clone();
            for rank in 1..=4u32 {
                for _ in 0..6 {
                    let e = random_class(ring, rank, &mut rng);
                    let degree_one = ring.generator(&line_gen).unwrap().homogeneous_part(1);
                    let line = SWClass::new(ring, 1, vec![ring.one(), degree_one]).unwrap();
                    let fast = tensor_by_line(&e, &line).unwrap();
                    let slow = splitting_oracle(&e, &line).unwrap();
                    assert_eq!(fast, slow, "rank {rank}");
                }
            }
        }
    }

    #[test]
    fn mapping_torus_w3_is_the_socle_class() {
        let report = mapping_torus_w3().unwrap();
        assert_eq!(report.w3.to_string(), "a^2 b");
        assert!(report.w3_untwisted.is_zero());
        assert!(report.w1_w2.is_zero());
        assert_eq!(report.w3_cross_terms, report.w3);
        assert!(report.pass());
    }

    #[test]
    fn mapping_torus_w3_stable_under_trivial_summands() {
        let ring = ab_ring();
        let (_, l_s1, _) = standard_bundles(&ring).unwrap();
        let base = mapping_torus_total(&ring, &l_s1).unwrap();
        for extra in 1..=3 {
            let padded = whitney_sum(&base, &SWClass::trivial(&ring, extra)).unwrap();
            assert_eq!(padded.w(3), base.w(3));
        }
    }

    #[test]
    fn identity_torus_obstruction_vanishes() {
        let report = w3_identity_torus();
        assert_eq!(report.chi_product, 4);
        assert_eq!(report.chi_quotient, 2);
        assert_eq!(report.w3_pairing, 0);
        // The pair (twisted ≠ 0, untwisted = 0) is the obstruction.
        let twisted = mapping_torus_w3().unwrap();
        assert!(!twisted.w3.is_zero() && report.w3_pairing == 0);
    }
}
