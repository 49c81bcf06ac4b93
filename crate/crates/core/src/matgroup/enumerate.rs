use rand::Rng;

use super::{AlgebraMatrix, FiltrationLevel, GroupTag, MatGroupError, UnipotentElement};
use crate::algebra::{AlgebraElement, Coeff, Monomial, TruncatedAlgebra};

/// Number of free entries from `𝔪` that parametrize the group.
fn free_entries(tag: GroupTag) -> usize {
    match tag {
        GroupTag::Gl(n) => n * n,
        GroupTag::Torus(r) => r,
        GroupTag::Sl2 | GroupTag::Pgl2 | GroupTag::Borel2 => 3,
    }
}

/// Number of points of the unipotent radical over the algebra's coefficient
/// field, saturating at `u128::MAX`.
pub fn group_order(tag: GroupTag, alg: &TruncatedAlgebra) -> u128 {
    let m = alg.maximal_ideal_size();
    (0..free_entries(tag)).fold(1u128, |acc, _| acc.saturating_mul(m))
}

/// Assembles the group element from its free entries `ms`, all in `𝔪`.
fn assemble(tag: GroupTag, alg: &TruncatedAlgebra, ms: &[AlgebraElement]) -> UnipotentElement {
    let one = alg.one();
    let n = tag.matrix_size();
    let mut m = AlgebraMatrix::identity(alg, n);
    match tag {
        GroupTag::Gl(_) => {
            for i in 0..n {
                for j in 0..n {
                    let e = &ms[i * n + j];
                    m.set(i, j, &if i == j { &one + e } else { e.clone() });
                }
            }
        }
        GroupTag::Torus(_) => {
            for (i, e) in ms.iter().enumerate() {
                m.set(i, i, &(&one + e));
            }
        }
        GroupTag::Sl2 => {
            let a = &one + &ms[0];
            // (1 + m₄) = (1 + m₂m₃)(1 + m₁)⁻¹ forces det = 1
            let d = &(&one + &(&ms[1] * &ms[2])) * &a.inverse().expect("1 + m is a unit");
            m.set(0, 0, &a);
            m.set(0, 1, &ms[1]);
            m.set(1, 0, &ms[2]);
            m.set(1, 1, &d);
        }
        GroupTag::Pgl2 => {
            m.set(0, 1, &ms[0]);
            m.set(1, 0, &ms[1]);
            m.set(1, 1, &(&one + &ms[2]));
        }
        GroupTag::Borel2 => {
            m.set(0, 0, &(&one + &ms[0]));
            m.set(0, 1, &ms[1]);
            m.set(1, 1, &(&one + &ms[2]));
        }
    }
    UnipotentElement::new_unchecked(tag, m)
}

/// Exhaustive, duplicate-free enumeration of the unipotent radical's points,
/// addressable by index so that workers can split index ranges.
#[derive(Clone, Debug)]
pub struct UnipotentEnumeration {
    tag: GroupTag,
    alg: TruncatedAlgebra,
    len: u64,
}

impl UnipotentEnumeration {
    /// Refuses with the exact count when the group has more than `budget`
    /// points.
    pub fn new(tag: GroupTag, alg: &TruncatedAlgebra, budget: u128) -> Result<Self, MatGroupError> {
        tag.validate()?;
        let count = group_order(tag, alg);
        if count > budget || count > u64::MAX as u128 {
            return Err(MatGroupError::BudgetExceeded { count, budget });
        }
        Ok(Self {
            tag,
            alg: alg.clone(),
            len: count as u64,
        })
    }

    pub fn tag(&self) -> GroupTag {
        self.tag
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Element number `idx`: the free entries are read off as base-`|F|`
    /// digits, `dim − 1` digits per entry.
    pub fn get(&self, mut idx: u64) -> UnipotentElement {
        assert!(idx < self.len, "index {idx} out of range");
        let q = self.alg.field().order() as u64;
        let dim = self.alg.dim();
        let ms: Vec<AlgebraElement> = (0..free_entries(self.tag))
            .map(|_| {
                let mut c = vec![0 as Coeff; dim];
                for slot in c.iter_mut().skip(1) {
                    *slot = (idx % q) as Coeff;
                    idx /= q;
                }
                self.alg.from_coeffs(c)
            })
            .collect();
        assemble(self.tag, &self.alg, &ms)
    }

    pub fn iter(&self) -> impl Iterator<Item = UnipotentElement> + '_ {
        (0..self.len).map(|i| self.get(i))
    }

    pub fn range(&self, r: std::ops::Range<u64>) -> impl Iterator<Item = UnipotentElement> + '_ {
        r.map(|i| self.get(i))
    }
}

/// Uniform element of `𝔪^i` (coefficients of monomials of degree `≥ i`).
fn random_in_power<R: Rng + ?Sized>(alg: &TruncatedAlgebra, i: u32, rng: &mut R) -> AlgebraElement {
    let q = alg.field().order();
    let coeffs = (0..alg.dim())
        .map(|k| {
            if alg.degree_at(k) >= i {
                rng.gen_range(0..q) as Coeff
            } else {
                0
            }
        })
        .collect();
    alg.from_coeffs(coeffs)
}

/// Uniformly random point of the unipotent radical.
pub fn random_element<R: Rng + ?Sized>(
    tag: GroupTag,
    alg: &TruncatedAlgebra,
    rng: &mut R,
) -> UnipotentElement {
    let ms: Vec<_> = (0..free_entries(tag))
        .map(|_| random_in_power(alg, 1, rng))
        .collect();
    assemble(tag, alg, &ms)
}

/// Uniformly random point of the congruence subgroup `Uᵢ`.
pub fn random_element_in_level<R: Rng + ?Sized>(
    tag: GroupTag,
    alg: &TruncatedAlgebra,
    level: FiltrationLevel,
    rng: &mut R,
) -> UnipotentElement {
    let ms: Vec<_> = (0..free_entries(tag))
        .map(|_| random_in_power(alg, level.index() as u32, rng))
        .collect();
    assemble(tag, alg, &ms)
}

/// Generators of the form `1 + c·x^α` placed in each elementary position,
/// with `c` running over an F_p-basis of the coefficient field and `x^α`
/// over the nonconstant basis monomials.
pub fn standard_generators(tag: GroupTag, alg: &TruncatedAlgebra) -> Vec<UnipotentElement> {
    let one = alg.one();
    let n = tag.matrix_size();
    let mut out = Vec::new();
    for c in alg.field().prime_basis() {
        for idx in 1..alg.dim() {
            let mono: &Monomial = alg.monomial_at(idx);
            let t = alg.monomial(mono, c);
            let unit = &one + &t;
            let with = |cells: &[(usize, usize, &AlgebraElement)]| {
                let mut m = AlgebraMatrix::identity(alg, n);
                for (i, j, e) in cells {
                    m.set(*i, *j, e);
                }
                m
            };
            let mats: Vec<AlgebraMatrix> = match tag {
                GroupTag::Gl(_) => (0..n)
                    .flat_map(|i| (0..n).map(move |j| (i, j)))
                    .map(|(i, j)| with(&[(i, j, if i == j { &unit } else { &t })]))
                    .collect(),
                GroupTag::Torus(_) => (0..n).map(|i| with(&[(i, i, &unit)])).collect(),
                GroupTag::Sl2 => {
                    let inv = unit.inverse().expect("1 + m is a unit");
                    vec![
                        with(&[(0, 1, &t)]),
                        with(&[(1, 0, &t)]),
                        with(&[(0, 0, &unit), (1, 1, &inv)]),
                    ]
                }
                GroupTag::Pgl2 => vec![
                    with(&[(0, 1, &t)]),
                    with(&[(1, 0, &t)]),
                    with(&[(1, 1, &unit)]),
                ],
                GroupTag::Borel2 => vec![
                    with(&[(0, 1, &t)]),
                    with(&[(0, 0, &unit)]),
                    with(&[(1, 1, &unit)]),
                ],
            };
            out.extend(
                mats.into_iter()
                    .map(|m| UnipotentElement::new_unchecked(tag, m)),
            );
        }
    }
    out
}
