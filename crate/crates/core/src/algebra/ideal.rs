use std::fmt;

use super::{AlgebraElement, AlgebraError, Monomial, TruncatedAlgebra};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Generators {
    Zero,
    /// Reduced, nonempty, sorted in graded-lexicographic order.
    Monomials(Vec<Monomial>),
}

/// A monomial ideal of a [`TruncatedAlgebra`], kept as its reduced
/// generating set.
#[derive(Clone)]
pub struct MonomialIdeal {
    alg: TruncatedAlgebra,
    gens: Generators,
}

impl MonomialIdeal {
    /// Ideal generated by the given monomials; monomials that vanish in the
    /// algebra are dropped before reduction.
    pub fn new(alg: &TruncatedAlgebra, gens: impl IntoIterator<Item = Monomial>) -> Self {
        let mut ms: Vec<Monomial> = gens
            .into_iter()
            .filter(|m| alg.index_of(m).is_some())
            .collect();
        ms.sort_by(|a, b| a.grlex_cmp(b));
        ms.dedup();
        // a generator is redundant iff a different generator divides it;
        // after sorting by degree only earlier entries can divide later ones
        let mut reduced: Vec<Monomial> = Vec::with_capacity(ms.len());
        for m in ms {
            if !reduced.iter().any(|g| g.divides(&m)) {
                reduced.push(m);
            }
        }
        let gens = if reduced.is_empty() {
            Generators::Zero
        } else {
            Generators::Monomials(reduced)
        };
        Self {
            alg: alg.clone(),
            gens,
        }
    }

    pub fn zero(alg: &TruncatedAlgebra) -> Self {
        Self {
            alg: alg.clone(),
            gens: Generators::Zero,
        }
    }

    /// The whole algebra, `𝔪⁰`.
    pub fn unit(alg: &TruncatedAlgebra) -> Self {
        Self::new(alg, [Monomial::one(alg.rank())])
    }

    /// `𝔪 = (x₁,…,x_r)`.
    pub fn maximal(alg: &TruncatedAlgebra) -> Self {
        Self::new(alg, (0..alg.rank()).map(|i| Monomial::var(alg.rank(), i)))
    }

    /// `𝔪^k`.
    pub fn maximal_power(alg: &TruncatedAlgebra, k: usize) -> Self {
        Self::maximal(alg).power(k)
    }

    pub fn algebra(&self) -> &TruncatedAlgebra {
        &self.alg
    }

    pub fn generators(&self) -> &[Monomial] {
        match &self.gens {
            Generators::Zero => &[],
            Generators::Monomials(v) => v,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.gens, Generators::Zero)
    }

    pub fn checked_product(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.alg.check_same(&other.alg)?;
        let a = self.generators();
        let b = other.generators();
        Ok(Self::new(
            &self.alg,
            a.iter().flat_map(|x| b.iter().map(move |y| x.mul(y))),
        ))
    }

    pub fn product(&self, other: &Self) -> Self {
        self.checked_product(other)
            .expect("ideals belong to different algebras")
    }

    pub fn power(&self, k: usize) -> Self {
        let mut acc = Self::unit(&self.alg);
        for _ in 0..k {
            if acc.is_zero() {
                break;
            }
            acc = acc.product(self);
        }
        acc
    }

    pub fn contains_monomial(&self, m: &Monomial) -> bool {
        self.generators().iter().any(|g| g.divides(m))
    }

    /// For a monomial ideal, an element is a member iff each monomial of its
    /// support is.
    pub fn contains(&self, a: &AlgebraElement) -> bool {
        a.coeffs()
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .all(|(i, _)| self.contains_monomial(self.alg.monomial_at(i)))
    }

    /// `other ⊆ self`.
    pub fn contains_ideal(&self, other: &Self) -> bool {
        other.generators().iter().all(|g| self.contains_monomial(g))
    }

    /// Dimension over the coefficient field: the number of basis monomials in
    /// the ideal.
    pub fn dimension(&self) -> usize {
        (0..self.alg.dim())
            .filter(|&i| self.contains_monomial(self.alg.monomial_at(i)))
            .count()
    }
}

impl PartialEq for MonomialIdeal {
    fn eq(&self, other: &Self) -> bool {
        self.alg.same_as(&other.alg) && self.gens == other.gens
    }
}

impl Eq for MonomialIdeal {}

impl fmt::Display for MonomialIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.gens {
            Generators::Zero => f.write_str("(0)"),
            Generators::Monomials(v) => {
                let parts: Vec<String> = v.iter().map(|m| m.to_string()).collect();
                write!(f, "({})", parts.join(", "))
            }
        }
    }
}

impl fmt::Debug for MonomialIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn require_char_2(alg: &TruncatedAlgebra) -> Result<(), AlgebraError> {
    match alg.characteristic() {
        2 => Ok(()),
        p => Err(AlgebraError::UnsupportedCharacteristic(p)),
    }
}

/// The ideal `²𝔪` generated by squares of elements of `𝔪`. In characteristic
/// 2 squaring is additive, so this is `(x₁², …, x_r²)`.
pub fn squares_ideal(alg: &TruncatedAlgebra) -> Result<MonomialIdeal, AlgebraError> {
    require_char_2(alg)?;
    let r = alg.rank();
    Ok(MonomialIdeal::new(
        alg,
        (0..r).map(|i| {
            let mut m = Monomial::one(r);
            m.0[i] = 2;
            m
        }),
    ))
}

/// The pair `(I_r, J_r)` with `I₀ = J₀ = 𝔪`, `I_r = (²𝔪)^r·𝔪` and
/// `J_r = (²𝔪)^{r−1}·𝔪²` for `r ≥ 1`.
pub fn lemma38_ideals(
    alg: &TruncatedAlgebra,
    r: usize,
) -> Result<(MonomialIdeal, MonomialIdeal), AlgebraError> {
    let sq = squares_ideal(alg)?;
    let m = MonomialIdeal::maximal(alg);
    if r == 0 {
        return Ok((m.clone(), m));
    }
    let i_r = sq.power(r).product(&m);
    let j_r = sq.power(r - 1).product(&m.power(2));
    Ok((i_r, j_r))
}

/// Minimal `n ≥ 1` with `(²𝔪)^{n−1}·𝔪² = 0`.
pub fn unusual_class_invariant(alg: &TruncatedAlgebra) -> Result<usize, AlgebraError> {
    let sq = squares_ideal(alg)?;
    let mut j = MonomialIdeal::maximal(alg).power(2);
    // J_n ⊆ 𝔪^{n+1}, so the loop ends by n = nilpotency_index − 1
    for n in 1..=alg.nilpotency_index() {
        if j.is_zero() {
            return Ok(n);
        }
        j = sq.product(&j);
    }
    unreachable!("J_n vanishes once n + 1 reaches the nilpotency index")
}

impl TruncatedAlgebra {
    /// Nilpotency index of `𝔪` computed by multiplying out ideal powers.
    pub fn nilpotency_index_by_powers(&self) -> usize {
        let m = MonomialIdeal::maximal(self);
        let mut power = m.clone();
        let mut n = 1;
        while !power.is_zero() {
            power = power.product(&m);
            n += 1;
        }
        n
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{CoefficientField, ExtensionSpec};
    use proptest::prelude::*;

    fn alg(s: &str) -> TruncatedAlgebra {
        TruncatedAlgebra::new(s.parse().unwrap()).unwrap()
    }

    fn mono(v: &[u32]) -> Monomial {
        Monomial(v.to_vec())
    }

    /// Every `ExtensionSpec` with `p ∈ {2,3,5}` and degree at most `max`.
    fn specs_up_to(max: u64) -> Vec<ExtensionSpec> {
        fn rec(p: u32, prefix: &mut Vec<u32>, deg: u64, max: u64, out: &mut Vec<ExtensionSpec>) {
            if !prefix.is_empty() {
                out.push(ExtensionSpec::new(p, prefix.clone()).unwrap());
            }
            let mut e = 1;
            while deg * (p as u64).pow(e) <= max {
                prefix.push(e);
                rec(p, prefix, deg * (p as u64).pow(e), max, out);
                prefix.pop();
                e += 1;
            }
        }
        let mut out = Vec::new();
        for p in [2, 3, 5] {
            rec(p, &mut Vec::new(), 1, max, &mut out);
        }
        out
    }

    /// Independent oracle for ℓ: the largest r with J_r ≠ 0 is one more than
    /// the largest Σγ over exponent choices x^{2γ+δ} inside the basis with δ a
    /// sum of two unit vectors; ℓ is one past that, or 1 if 𝔪² = 0.
    fn ell_by_maximization(qs: &[u32]) -> usize {
        let r = qs.len();
        let mut best: Option<usize> = None;
        for a in 0..r {
            for b in a..r {
                let mut delta = vec![0u32; r];
                delta[a] += 1;
                delta[b] += 1;
                if (0..r).any(|i| delta[i] > qs[i] - 1) {
                    continue;
                }
                let gamma: usize = (0..r).map(|i| ((qs[i] - 1 - delta[i]) / 2) as usize).sum();
                best = Some(best.map_or(gamma, |g: usize| g.max(gamma)));
            }
        }
        match best {
            None => 1,
            Some(g) => g + 2,
        }
    }

    #[test]
    fn nilpotency_index_examples() {
        assert_eq!(alg("p=2;e=1").nilpotency_index_by_powers(), 2);
        assert_eq!(alg("p=2;e=2").nilpotency_index_by_powers(), 4);
        let a = alg("p=2;e=1,1");
        assert_eq!(a.nilpotency_index_by_powers(), 3);
        assert_eq!(
            MonomialIdeal::maximal_power(&a, 2),
            MonomialIdeal::new(&a, [mono(&[1, 1])])
        );
        assert!(MonomialIdeal::maximal_power(&a, 3).is_zero());
    }

    #[test]
    fn nilpotency_index_closed_form_matches_powers() {
        let specs = specs_up_to(256);
        assert!(specs.len() > 40);
        for s in specs {
            let a = TruncatedAlgebra::new(s.clone()).unwrap();
            assert_eq!(a.nilpotency_index(), a.nilpotency_index_by_powers(), "{s}");
        }
    }

    #[test]
    fn squares_ideal_examples() {
        assert!(squares_ideal(&alg("p=2;e=1,1")).unwrap().is_zero());
        assert!(squares_ideal(&alg("p=2;e=1")).unwrap().is_zero());
        let a = alg("p=2;e=2");
        assert_eq!(
            squares_ideal(&a).unwrap(),
            MonomialIdeal::new(&a, [mono(&[2])])
        );
        assert_eq!(
            squares_ideal(&alg("p=3;e=1")).unwrap_err(),
            AlgebraError::UnsupportedCharacteristic(3)
        );
    }

    #[test]
    fn squares_ideal_matches_enumerated_squares() {
        // span of {f² : f ∈ 𝔪} over F₂ and F₄, enumerated, generates the same
        // monomial ideal
        for (s, d) in [
            ("p=2;e=2", 1),
            ("p=2;e=2", 2),
            ("p=2;e=2,1", 1),
            ("p=2;e=1,1", 2),
            ("p=2;e=3", 1),
        ] {
            let ext: ExtensionSpec = s.parse().unwrap();
            let a =
                TruncatedAlgebra::with_field(ext, CoefficientField::new(2, d).unwrap()).unwrap();
            let q = a.field().order() as usize;
            let mut support = std::collections::BTreeSet::new();
            let n = a.dim() - 1;
            for idx in 0..q.pow(n as u32) {
                let mut c = vec![0u8; a.dim()];
                let mut t = idx;
                for slot in c.iter_mut().skip(1) {
                    *slot = (t % q) as u8;
                    t /= q;
                }
                let f = a.from_coeffs(c);
                for (m, _) in (&f * &f).terms() {
                    support.insert(m);
                }
            }
            let from_squares = MonomialIdeal::new(&a, support);
            // every square lies in ²𝔪, and each generator x_i² of ²𝔪 is a square
            let sq = squares_ideal(&a).unwrap();
            assert!(sq.contains_ideal(&from_squares), "{s}");
            assert!(from_squares.contains_ideal(&sq), "{s}");
        }
    }

    #[test]
    fn ideal_product_examples() {
        let a = alg("p=2;e=1,1");
        let m = MonomialIdeal::maximal(&a);
        assert_eq!(m.product(&m), MonomialIdeal::new(&a, [mono(&[1, 1])]));
        assert!(m.product(&MonomialIdeal::zero(&a)).is_zero());
        let b = alg("p=2;e=2");
        let x2 = MonomialIdeal::new(&b, [mono(&[2])]);
        let x1 = MonomialIdeal::new(&b, [mono(&[1])]);
        assert_eq!(x2.product(&x1), MonomialIdeal::new(&b, [mono(&[3])]));
        assert!(x1.checked_product(&MonomialIdeal::maximal(&a)).is_err());
    }

    #[test]
    fn unusual_invariant_examples() {
        assert_eq!(unusual_class_invariant(&alg("p=2;e=1")).unwrap(), 1);
        assert_eq!(unusual_class_invariant(&alg("p=2;e=1,1")).unwrap(), 2);
        for k in 1..=8 {
            let a = TruncatedAlgebra::new(ExtensionSpec::primitive(2, k).unwrap()).unwrap();
            assert_eq!(
                unusual_class_invariant(&a).unwrap(),
                1 << (k - 1),
                "q=2^{k}"
            );
        }
        assert!(unusual_class_invariant(&alg("p=3;e=1")).is_err());
    }

    #[test]
    fn unusual_invariant_matches_maximization() {
        for s in specs_up_to(256).into_iter().filter(|s| s.p() == 2) {
            let a = TruncatedAlgebra::new(s.clone()).unwrap();
            let qs: Vec<u32> = a.qs().to_vec();
            assert_eq!(
                unusual_class_invariant(&a).unwrap(),
                ell_by_maximization(&qs),
                "{s}"
            );
        }
    }

    #[test]
    fn primitive_unusual_vs_nilpotency() {
        for k in 2..=8 {
            let a = TruncatedAlgebra::new(ExtensionSpec::primitive(2, k).unwrap()).unwrap();
            let q = 1usize << k;
            assert_eq!(unusual_class_invariant(&a).unwrap(), q / 2);
            assert_eq!(a.nilpotency_index() - 1, q - 1);
        }
    }

    #[test]
    fn lemma38_examples() {
        let a = alg("p=2;e=1,1");
        let (i0, j0) = lemma38_ideals(&a, 0).unwrap();
        assert_eq!(i0, MonomialIdeal::maximal(&a));
        assert_eq!(j0, MonomialIdeal::maximal(&a));
        let (i1, j1) = lemma38_ideals(&a, 1).unwrap();
        assert!(i1.is_zero());
        assert_eq!(j1, MonomialIdeal::new(&a, [mono(&[1, 1])]));
        let b = alg("p=2;e=2");
        let (i1, j1) = lemma38_ideals(&b, 1).unwrap();
        assert_eq!(i1, MonomialIdeal::new(&b, [mono(&[3])]));
        assert_eq!(j1, MonomialIdeal::new(&b, [mono(&[2])]));
        assert!(lemma38_ideals(&alg("p=3;e=1"), 1).is_err());
    }

    #[test]
    fn lemma38_inclusions() {
        for s in specs_up_to(256).into_iter().filter(|s| s.p() == 2) {
            let a = TruncatedAlgebra::new(s.clone()).unwrap();
            let sq = squares_ideal(&a).unwrap();
            let m = MonomialIdeal::maximal(&a);
            for r in 0..=a.nilpotency_index() {
                let (i_r, j_r) = lemma38_ideals(&a, r).unwrap();
                let (i_next, j_next) = lemma38_ideals(&a, r + 1).unwrap();
                if r >= 1 {
                    assert!(j_r.contains_ideal(&i_r), "{s} r={r}");
                }
                assert!(i_next.contains_ideal(&sq.product(&i_r)), "{s} r={r}");
                assert!(j_next.contains_ideal(&sq.product(&j_r)), "{s} r={r}");
                assert!(j_next.contains_ideal(&m.product(&i_r)), "{s} r={r}");
            }
        }
    }

    #[test]
    fn membership() {
        let a = alg("p=2;e=2,1");
        let j = MonomialIdeal::new(&a, [mono(&[2, 0]), mono(&[1, 1])]);
        assert!(j.contains(&a.parse_element("x1^2 + x1*x2 + x1^3*x2").unwrap()));
        assert!(!j.contains(&a.parse_element("x1^2 + x2").unwrap()));
        assert!(j.contains(&a.zero()));
        // x1², x1³, x1x2, x1²x2, x1³x2
        assert_eq!(j.dimension(), 5);
    }

    proptest! {
        #[test]
        fn reduction_is_canonical(gens in prop::collection::vec((0u32..5, 0u32..3), 1..6), extra in prop::collection::vec((0u32..5, 0u32..3), 0..4)) {
            let a = alg("p=2;e=2,1");
            let base: Vec<Monomial> = gens.iter().map(|&(x, y)| mono(&[x, y])).collect();
            let i1 = MonomialIdeal::new(&a, base.clone());
            // add redundant multiples of existing generators in a different order
            let mut shuffled: Vec<Monomial> = base.iter().rev().cloned().collect();
            for (k, &(x, y)) in extra.iter().enumerate() {
                let g = &base[k % base.len()];
                shuffled.push(g.mul(&mono(&[x, y])));
            }
            let i2 = MonomialIdeal::new(&a, shuffled);
            prop_assert_eq!(i1.generators(), i2.generators());
        }
    }
}
