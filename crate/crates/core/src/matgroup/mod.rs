//! Matrices over a truncated algebra and the unipotent groups
//! `ker(G(B̄) → G(F))` for the matrix models GL(n), SL₂, PGL₂, diagonal tori
//! and the 2×2 Borel subgroup.

mod enumerate;
mod filtration;
mod matrix;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::algebra::{AlgebraElement, AlgebraError, TruncatedAlgebra};

pub use enumerate::{
    group_order, random_element, random_element_in_level, standard_generators, UnipotentEnumeration,
};
pub use filtration::{filtration_member, reduce_mod_power, sl2_filtration_member, FiltrationLevel};
pub use matrix::{AlgebraMatrix, MatrixJson};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatGroupError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("matrix is not in the unipotent radical of {tag}: {reason}")]
    NotInGroup { tag: GroupTag, reason: String },
    #[error("group tags differ: {0} vs {1}")]
    TagMismatch(GroupTag, GroupTag),
    #[error("filtration level {level} out of range 1..={max}")]
    InvalidLevel { level: usize, max: usize },
    #[error("group has {count} points, over the budget of {budget}")]
    BudgetExceeded { count: u128, budget: u128 },
    #[error("invalid group tag: {0}")]
    InvalidTag(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// Which matrix model a [`UnipotentElement`] lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupTag {
    Gl(usize),
    Sl2,
    Pgl2,
    Torus(usize),
    Borel2,
}

impl GroupTag {
    pub fn matrix_size(&self) -> usize {
        match *self {
            GroupTag::Gl(n) => n,
            GroupTag::Torus(r) => r,
            GroupTag::Sl2 | GroupTag::Pgl2 | GroupTag::Borel2 => 2,
        }
    }

    pub fn validate(&self) -> Result<(), MatGroupError> {
        match *self {
            GroupTag::Gl(n) if n < 1 => Err(MatGroupError::InvalidTag("GL0".into())),
            GroupTag::Torus(0) => Err(MatGroupError::InvalidTag("T0".into())),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for GroupTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupTag::Gl(n) => write!(f, "GL{n}"),
            GroupTag::Sl2 => f.write_str("SL2"),
            GroupTag::Pgl2 => f.write_str("PGL2"),
            GroupTag::Torus(r) => write!(f, "T{r}"),
            GroupTag::Borel2 => f.write_str("Borel2"),
        }
    }
}

impl FromStr for GroupTag {
    type Err = MatGroupError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || MatGroupError::InvalidTag(s.to_string());
        let tag = match s {
            "SL2" => GroupTag::Sl2,
            "PGL2" => GroupTag::Pgl2,
            "Borel2" => GroupTag::Borel2,
            _ => {
                if let Some(n) = s.strip_prefix("GL") {
                    GroupTag::Gl(n.parse().map_err(|_| bad())?)
                } else if let Some(r) = s.strip_prefix('T') {
                    GroupTag::Torus(r.parse().map_err(|_| bad())?)
                } else {
                    return Err(bad());
                }
            }
        };
        tag.validate().map_err(|_| bad())?;
        Ok(tag)
    }
}

/// A point of the unipotent radical of one of the matrix models over `B̄`.
/// PGL₂ points are stored by the representative whose `(1,1)` entry is 1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct UnipotentElement {
    tag: GroupTag,
    matrix: AlgebraMatrix,
}

impl UnipotentElement {
    pub fn new(tag: GroupTag, matrix: AlgebraMatrix) -> Result<Self, MatGroupError> {
        tag.validate()?;
        let not_in = |reason: &str| MatGroupError::NotInGroup {
            tag,
            reason: reason.to_string(),
        };
        if matrix.size() != tag.matrix_size() {
            return Err(not_in("wrong matrix size"));
        }
        let matrix = if tag == GroupTag::Pgl2 {
            let c = matrix.entry(0, 0);
            let inv = c
                .inverse()
                .map_err(|_| not_in("(1,1) entry is not a unit"))?;
            matrix.scale(&inv)
        } else {
            matrix
        };
        if !matrix.truncate_degree(1).is_identity() {
            return Err(not_in(
                "reduction modulo the maximal ideal is not the identity",
            ));
        }
        let n = matrix.size();
        match tag {
            GroupTag::Sl2 if !matrix.det().is_one() => return Err(not_in("determinant is not 1")),
            GroupTag::Torus(_) => {
                if (0..n).any(|i| (0..n).any(|j| i != j && !matrix.entry(i, j).is_zero())) {
                    return Err(not_in("off-diagonal entry"));
                }
            }
            GroupTag::Borel2 if !matrix.entry(1, 0).is_zero() => {
                return Err(not_in("lower-left entry is nonzero"))
            }
            _ => {}
        }
        Ok(Self { tag, matrix })
    }

    /// Wraps a matrix already known to satisfy the tag's invariants.
    pub(crate) fn new_unchecked(tag: GroupTag, matrix: AlgebraMatrix) -> Self {
        debug_assert!(Self::new(tag, matrix.clone()).is_ok(), "{tag}: {matrix}");
        Self { tag, matrix }
    }

    pub fn identity(tag: GroupTag, alg: &TruncatedAlgebra) -> Self {
        Self {
            tag,
            matrix: AlgebraMatrix::identity(alg, tag.matrix_size()),
        }
    }

    pub fn tag(&self) -> GroupTag {
        self.tag
    }

    pub fn matrix(&self) -> &AlgebraMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> AlgebraMatrix {
        self.matrix
    }

    pub fn algebra(&self) -> &TruncatedAlgebra {
        self.matrix.algebra()
    }

    pub fn is_identity(&self) -> bool {
        self.matrix.is_identity()
    }

    fn normalize(tag: GroupTag, m: AlgebraMatrix) -> AlgebraMatrix {
        if tag == GroupTag::Pgl2 {
            let inv = m
                .entry(0, 0)
                .inverse()
                .expect("(1,1) entry of a PGL2 kernel element is a unit");
            m.scale(&inv)
        } else {
            m
        }
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, MatGroupError> {
        if self.tag != other.tag {
            return Err(MatGroupError::TagMismatch(self.tag, other.tag));
        }
        let m = self.matrix.checked_mul(&other.matrix)?;
        Ok(Self {
            tag: self.tag,
            matrix: Self::normalize(self.tag, m),
        })
    }

    pub fn inverse(&self) -> Self {
        let m = self
            .matrix
            .inverse()
            .expect("kernel elements are invertible");
        Self {
            tag: self.tag,
            matrix: Self::normalize(self.tag, m),
        }
    }

    pub fn pow(&self, k: u64) -> Self {
        Self {
            tag: self.tag,
            matrix: Self::normalize(self.tag, self.matrix.pow(k)),
        }
    }

    /// `g h g⁻¹`.
    pub fn conjugate_by(&self, h: &Self) -> Result<Self, MatGroupError> {
        h.checked_mul(self)?.checked_mul(&h.inverse())
    }
}

impl std::ops::Mul for &UnipotentElement {
    type Output = UnipotentElement;
    fn mul(self, rhs: &UnipotentElement) -> UnipotentElement {
        self.checked_mul(rhs).expect("elements are not compatible")
    }
}

impl fmt::Display for UnipotentElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.tag, self.matrix)
    }
}

impl fmt::Debug for UnipotentElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// `[g, h] = g h g⁻¹ h⁻¹`.
pub fn commutator(
    g: &UnipotentElement,
    h: &UnipotentElement,
) -> Result<UnipotentElement, MatGroupError> {
    g.checked_mul(h)?
        .checked_mul(&g.inverse())?
        .checked_mul(&h.inverse())
}

/// Left-nested commutator `[x₁, [x₂, … [x_k, g]]]`.
pub fn iterated_commutator(
    xs: &[UnipotentElement],
    g: &UnipotentElement,
) -> Result<UnipotentElement, MatGroupError> {
    xs.iter()
        .rev()
        .try_fold(g.clone(), |acc, x| commutator(x, &acc))
}

/// Minimal `s ≥ 0` with `g^{p^s} = 1`.
pub fn p_power_order(g: &UnipotentElement) -> u32 {
    let p = g.algebra().characteristic() as u64;
    let mut cur = g.clone();
    let mut s = 0;
    while !cur.is_identity() {
        cur = cur.pow(p);
        s += 1;
    }
    s
}

/// True iff `a = λ·b` for a unit `λ` of the algebra.
pub fn proportional(a: &AlgebraMatrix, b: &AlgebraMatrix) -> bool {
    if a.size() != b.size() || !a.algebra().same_as(b.algebra()) {
        return false;
    }
    let n = b.size();
    let Some((i, j)) = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .find(|&(i, j)| b.entry(i, j).is_unit())
    else {
        return false;
    };
    let Ok(binv) = b.entry(i, j).inverse() else {
        return false;
    };
    let lambda: AlgebraElement = &a.entry(i, j) * &binv;
    lambda.is_unit() && &b.scale(&lambda) == a
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn alg(s: &str) -> TruncatedAlgebra {
        TruncatedAlgebra::new(s.parse().unwrap()).unwrap()
    }

    fn el(tag: GroupTag, a: &TruncatedAlgebra, s: &str) -> UnipotentElement {
        UnipotentElement::new(tag, AlgebraMatrix::parse(a, s).unwrap()).unwrap()
    }

    #[test]
    fn tag_text() {
        for t in ["GL2", "GL3", "SL2", "PGL2", "T1", "T3", "Borel2"] {
            assert_eq!(t.parse::<GroupTag>().unwrap().to_string(), t);
        }
        for t in ["GL0", "T0", "SL3", "gl2", ""] {
            assert!(t.parse::<GroupTag>().is_err(), "{t}");
        }
    }

    #[test]
    fn validation() {
        let a = alg("p=2;e=1,1");
        let parse = |s| AlgebraMatrix::parse(&a, s).unwrap();
        assert!(UnipotentElement::new(GroupTag::Gl(2), parse("1, 1; 0, 1")).is_err());
        assert!(UnipotentElement::new(GroupTag::Sl2, parse("1 + x1, 0; 0, 1")).is_err());
        assert!(UnipotentElement::new(GroupTag::Sl2, parse("1 + x1, 0; 0, 1 + x1")).is_ok());
        assert!(UnipotentElement::new(GroupTag::Torus(2), parse("1, x1; 0, 1")).is_err());
        assert!(UnipotentElement::new(GroupTag::Borel2, parse("1, 0; x1, 1")).is_err());
        assert!(UnipotentElement::new(GroupTag::Gl(3), parse("1, 0; 0, 1")).is_err());
        let p = UnipotentElement::new(GroupTag::Pgl2, parse("1 + x1, x2; 0, 1 + x1")).unwrap();
        assert!(p.is_identity() || p.matrix().entry(0, 0).is_one());
    }

    #[test]
    fn commutator_with_identity_is_identity() {
        let a = alg("p=3;e=1,1");
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for tag in [
            GroupTag::Gl(2),
            GroupTag::Sl2,
            GroupTag::Pgl2,
            GroupTag::Borel2,
            GroupTag::Gl(3),
        ] {
            let g = random_element(tag, &a, &mut rng);
            let e = UnipotentElement::identity(tag, &a);
            assert!(commutator(&g, &e).unwrap().is_identity());
            assert!(commutator(&e, &g).unwrap().is_identity());
        }
    }

    #[test]
    fn commutator_upper_with_diagonal() {
        // GL₂: [(1,x;0,1), diag(1+x,1)] = (1, x²; 0, 1)
        let a = alg("p=2;e=2");
        let m1 = el(GroupTag::Gl(2), &a, "1, x1; 0, 1");
        let m = el(GroupTag::Gl(2), &a, "1 + x1, 0; 0, 1");
        assert_eq!(
            commutator(&m1, &m).unwrap().matrix().to_string(),
            "1, x1^2; 0, 1"
        );
        // SL₂ with M = diag(1+x, (1+x)⁻¹): entry m·m₁² = x³
        let inv = a.parse_element("1 + x1").unwrap().inverse().unwrap();
        let mut d = AlgebraMatrix::parse(&a, "1 + x1, 0; 0, 1").unwrap();
        d.set(1, 1, &inv);
        let m = UnipotentElement::new(GroupTag::Sl2, d).unwrap();
        let m1 = el(GroupTag::Sl2, &a, "1, x1; 0, 1");
        assert_eq!(
            commutator(&m1, &m).unwrap().matrix().to_string(),
            "1, x1^3; 0, 1"
        );
    }

    #[test]
    fn sl2_commutator_formula() {
        // [M₁, M] for M = (1+m₁, m₂; m₃, 1+m₄) ∈ SL₂ in characteristic 2
        let a = alg("p=2;e=2,2");
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let m = random_element(GroupTag::Sl2, &a, &mut rng);
            let mm = random_element(GroupTag::Gl(1), &a, &mut rng)
                .matrix()
                .entry(0, 0);
            let mm = &mm - &a.one();
            let mut z = AlgebraMatrix::identity(&a, 2);
            z.set(0, 1, &mm);
            let z = UnipotentElement::new(GroupTag::Sl2, z).unwrap();
            let c = commutator(&z, &m).unwrap();
            let one = a.one();
            let m1 = &m.matrix().entry(0, 0) - &one;
            let m3 = m.matrix().entry(1, 0);
            let sq = |x: &AlgebraElement| x * x;
            let e00 = &(&(&one + &(&mm * &m3)) + &(&(&mm * &m1) * &m3)) + &(&sq(&mm) * &sq(&m3));
            let e01 = &(&(&mm * &sq(&m1)) + &(&sq(&mm) * &m3)) + &(&(&sq(&mm) * &m1) * &m3);
            let e10 = &mm * &sq(&m3);
            let e11 = &(&one + &(&mm * &m3)) + &(&(&mm * &m1) * &m3);
            let expect =
                AlgebraMatrix::from_rows(&a, vec![vec![e00, e01], vec![e10, e11]]).unwrap();
            assert_eq!(c.matrix(), &expect);
        }
    }

    #[test]
    fn pgl2_products_are_proportional_to_gl2_products() {
        let a = alg("p=3;e=1,1");
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let g = random_element(GroupTag::Gl(2), &a, &mut rng);
            let h = random_element(GroupTag::Gl(2), &a, &mut rng);
            let pg = UnipotentElement::new(GroupTag::Pgl2, g.matrix().clone()).unwrap();
            let ph = UnipotentElement::new(GroupTag::Pgl2, h.matrix().clone()).unwrap();
            let gl = commutator(&g, &h).unwrap();
            let pgl = commutator(&pg, &ph).unwrap();
            assert!(proportional(pgl.matrix(), gl.matrix()));
            assert!(proportional(gl.matrix(), pgl.matrix()));
            assert!(proportional((&pg * &ph).matrix(), (&g * &h).matrix()));
        }
    }

    #[test]
    fn proportionality_is_an_equivalence_and_congruence() {
        let a = alg("p=2;e=1,1");
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let x = random_element(GroupTag::Gl(2), &a, &mut rng).into_matrix();
            let l1 = random_element(GroupTag::Gl(1), &a, &mut rng)
                .matrix()
                .entry(0, 0);
            let l2 = random_element(GroupTag::Gl(1), &a, &mut rng)
                .matrix()
                .entry(0, 0);
            let y = x.scale(&l1);
            let z = y.scale(&l2);
            assert!(proportional(&x, &x));
            assert!(proportional(&x, &y) && proportional(&y, &x));
            assert!(proportional(&x, &z));
            let w = random_element(GroupTag::Gl(2), &a, &mut rng).into_matrix();
            assert!(proportional(&(&x * &w), &(&y * &w)));
            assert!(proportional(&(&w * &x), &(&w * &z)));
        }
    }

    #[test]
    fn p_power_order_examples() {
        let a = alg("p=2;e=2");
        assert_eq!(
            p_power_order(&UnipotentElement::identity(GroupTag::Gl(2), &a)),
            0
        );
        assert_eq!(p_power_order(&el(GroupTag::Torus(1), &a, "1 + x1")), 2);
        let b = alg("p=3;e=1");
        assert_eq!(p_power_order(&el(GroupTag::Gl(2), &b, "1, x1; 0, 1")), 1);
    }

    #[test]
    fn order_invariant_under_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for s in ["p=2;e=1,1", "p=2;e=2", "p=3;e=1"] {
            let a = alg(s);
            for tag in [
                GroupTag::Gl(2),
                GroupTag::Sl2,
                GroupTag::Pgl2,
                GroupTag::Borel2,
                GroupTag::Gl(3),
            ] {
                for _ in 0..30 {
                    let g = random_element(tag, &a, &mut rng);
                    let h = random_element(tag, &a, &mut rng);
                    assert_eq!(
                        p_power_order(&g),
                        p_power_order(&g.conjugate_by(&h).unwrap())
                    );
                }
            }
        }
    }

    #[test]
    fn sl2_closed_under_operations() {
        let a = alg("p=3;e=1,1");
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let g = random_element(GroupTag::Sl2, &a, &mut rng);
            let h = random_element(GroupTag::Sl2, &a, &mut rng);
            for x in [&g * &h, g.inverse(), commutator(&g, &h).unwrap()] {
                assert!(UnipotentElement::new(GroupTag::Sl2, x.into_matrix()).is_ok());
            }
        }
    }

    #[test]
    fn mismatched_tags_rejected() {
        let a = alg("p=2;e=1");
        let g = UnipotentElement::identity(GroupTag::Gl(2), &a);
        let h = UnipotentElement::identity(GroupTag::Sl2, &a);
        assert_eq!(
            g.checked_mul(&h).unwrap_err(),
            MatGroupError::TagMismatch(GroupTag::Gl(2), GroupTag::Sl2)
        );
    }
}
