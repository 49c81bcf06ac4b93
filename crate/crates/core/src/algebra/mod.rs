//! Exact arithmetic in the truncated algebra
//! `B̄ = F[x₁,…,x_r]/(x₁^{q₁},…,x_r^{q_r})` and its monomial ideals.
//!
//! For a modular extension `k' = k(t₁,…,t_r)` the algebra `k'⊗_k k'` is
//! isomorphic to this quotient with `xᵢ = 1⊗tᵢ − tᵢ⊗1`; the maximal ideal
//! `𝔪 = (x₁,…,x_r)` is nilpotent and every invariant computed here depends
//! only on its monomial structure.

mod element;
mod extension;
mod field;
mod ideal;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub use element::AlgebraElement;
pub use extension::ExtensionSpec;
pub use field::{parse_field, Coeff, CoefficientField, MAX_FIELD_ORDER};
pub use ideal::{lemma38_ideals, squares_ideal, unusual_class_invariant, MonomialIdeal};

/// Largest algebra dimension handled by the dense representation.
pub const MAX_ALGEBRA_DIM: u64 = 1 << 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported coefficient field: {0}")]
    UnsupportedField(String),
    #[error("too large: {0}")]
    TooLarge(String),
    #[error("operands belong to different algebras")]
    MismatchedAlgebra,
    #[error(
        "coefficient field characteristic {field} does not match extension characteristic {ext}"
    )]
    CharacteristicMismatch { field: u32, ext: u32 },
    #[error("operation only defined in characteristic 2, got p={0}")]
    UnsupportedCharacteristic(u32),
    #[error("element is not a unit")]
    NotAUnit,
}

/// Exponent vector of a monomial `x₁^{α₁}⋯x_r^{α_r}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(rank: usize) -> Self {
        Monomial(vec![0; rank])
    }

    /// The generator `x_{i+1}`.
    pub fn var(rank: usize, i: usize) -> Self {
        let mut v = vec![0; rank];
        v[i] = 1;
        Monomial(v)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Graded-lexicographic comparison: total degree first, then the
    /// exponent of `x1`, `x2`, … with larger exponents first.
    pub fn grlex_cmp(&self, other: &Monomial) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "x{}", i + 1)?;
            } else {
                write!(f, "x{}^{}", i + 1, e)?;
            }
        }
        if first {
            f.write_str("1")?;
        }
        Ok(())
    }
}

/// The algebra `F[x₁..x_r]/(xᵢ^{qᵢ})`. Cheap to clone; clones share the
/// multiplication tables.
#[derive(Clone)]
pub struct TruncatedAlgebra {
    inner: Arc<AlgebraInner>,
}

struct AlgebraInner {
    ext: ExtensionSpec,
    field: CoefficientField,
    qs: Vec<u32>,
    dim: usize,
    strides: Vec<usize>,
    exps: Vec<Monomial>,
    degrees: Vec<u32>,
    /// Exponents packed into bit fields with a guard bit per variable, so
    /// that `packed[a] + packed[b] + carry` has a guard bit set exactly when
    /// some exponent of the product reaches `qᵢ`.
    packed: Vec<u64>,
    carry: u64,
    guard: u64,
    grlex: Vec<usize>,
}

impl TruncatedAlgebra {
    /// The algebra over the prime field `F_p`.
    pub fn new(ext: ExtensionSpec) -> Result<Self, AlgebraError> {
        let field = CoefficientField::prime(ext.p())?;
        Self::with_field(ext, field)
    }

    pub fn with_field(ext: ExtensionSpec, field: CoefficientField) -> Result<Self, AlgebraError> {
        if field.characteristic() != ext.p() {
            return Err(AlgebraError::CharacteristicMismatch {
                field: field.characteristic(),
                ext: ext.p(),
            });
        }
        if ext.degree() > MAX_ALGEBRA_DIM {
            return Err(AlgebraError::TooLarge(format!(
                "algebra of dimension {} exceeds {MAX_ALGEBRA_DIM}",
                ext.degree()
            )));
        }
        let qs: Vec<u32> = ext.qs().into_iter().map(|q| q as u32).collect();
        let rank = qs.len();
        let dim = ext.degree() as usize;
        let mut strides = Vec::with_capacity(rank);
        let mut s = 1;
        for &q in &qs {
            strides.push(s);
            s *= q as usize;
        }
        // field widths: 2^{w-1} >= q
        let widths: Vec<u32> = qs
            .iter()
            .map(|&q| 32 - (q - 1).leading_zeros() + 1)
            .collect();
        let mut shifts = Vec::with_capacity(rank);
        let mut acc = 0;
        for &w in &widths {
            shifts.push(acc);
            acc += w;
        }
        assert!(acc <= 64, "packed exponent layout overflows u64");
        let mut carry = 0u64;
        let mut guard = 0u64;
        for i in 0..rank {
            let half = 1u64 << (widths[i] - 1);
            carry += (half - qs[i] as u64) << shifts[i];
            guard |= half << shifts[i];
        }
        let mut exps = Vec::with_capacity(dim);
        let mut packed = Vec::with_capacity(dim);
        for idx in 0..dim {
            let alpha: Vec<u32> = (0..rank)
                .map(|i| ((idx / strides[i]) % qs[i] as usize) as u32)
                .collect();
            packed.push(
                alpha
                    .iter()
                    .zip(&shifts)
                    .map(|(&a, &sh)| (a as u64) << sh)
                    .sum(),
            );
            exps.push(Monomial(alpha));
        }
        let degrees = exps.iter().map(Monomial::degree).collect();
        let mut grlex: Vec<usize> = (0..dim).collect();
        grlex.sort_by(|&a, &b| exps[a].grlex_cmp(&exps[b]));
        Ok(Self {
            inner: Arc::new(AlgebraInner {
                ext,
                field,
                qs,
                dim,
                strides,
                exps,
                degrees,
                packed,
                carry,
                guard,
                grlex,
            }),
        })
    }

    pub fn extension(&self) -> &ExtensionSpec {
        &self.inner.ext
    }

    pub fn field(&self) -> &CoefficientField {
        &self.inner.field
    }

    pub fn characteristic(&self) -> u32 {
        self.inner.ext.p()
    }

    pub fn rank(&self) -> usize {
        self.inner.qs.len()
    }

    pub fn qs(&self) -> &[u32] {
        &self.inner.qs
    }

    /// Dimension over the coefficient field, `∏ qᵢ`.
    pub fn dim(&self) -> usize {
        self.inner.dim
    }

    /// Number of elements of `𝔪` over the coefficient field.
    pub fn maximal_ideal_size(&self) -> u128 {
        (self.inner.field.order() as u128).pow(self.inner.dim as u32 - 1)
    }

    pub fn same_as(&self, other: &TruncatedAlgebra) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.ext == other.inner.ext && self.inner.field == other.inner.field)
    }

    pub(crate) fn check_same(&self, other: &TruncatedAlgebra) -> Result<(), AlgebraError> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(AlgebraError::MismatchedAlgebra)
        }
    }

    /// Basis monomial at a dense index.
    pub fn monomial_at(&self, idx: usize) -> &Monomial {
        &self.inner.exps[idx]
    }

    /// Total degree of the basis monomial at `idx`.
    pub fn degree_at(&self, idx: usize) -> u32 {
        self.inner.degrees[idx]
    }

    /// Dense index of a monomial, `None` if it is truncated to zero.
    pub fn index_of(&self, m: &Monomial) -> Option<usize> {
        if m.0.len() != self.rank() {
            return None;
        }
        let mut idx = 0;
        for (i, &a) in m.0.iter().enumerate() {
            if a >= self.inner.qs[i] {
                return None;
            }
            idx += a as usize * self.inner.strides[i];
        }
        Some(idx)
    }

    /// Basis indices in graded-lexicographic order.
    pub fn grlex_indices(&self) -> &[usize] {
        &self.inner.grlex
    }

    /// `∏ xᵢ^{qᵢ−1}`, the unique monomial of maximal degree.
    pub fn top_monomial(&self) -> Monomial {
        Monomial(self.inner.qs.iter().map(|q| q - 1).collect())
    }

    /// Minimal `n` with `𝔪ⁿ = 0`, in closed form `1 + Σ(qᵢ − 1)`.
    pub fn nilpotency_index(&self) -> usize {
        1 + self
            .inner
            .qs
            .iter()
            .map(|&q| (q - 1) as usize)
            .sum::<usize>()
    }

    /// Product of two basis monomials, `None` when it vanishes.
    #[inline]
    pub(crate) fn product_index(&self, a: usize, b: usize) -> Option<usize> {
        let inner = &*self.inner;
        ((inner.packed[a] + inner.packed[b] + inner.carry) & inner.guard == 0).then_some(a + b)
    }

    /// `out += a·b` on dense coefficient slices.
    pub(crate) fn mul_acc(&self, a: &[Coeff], b: &[Coeff], out: &mut [Coeff]) {
        let f = &self.inner.field;
        for (i, &ca) in a.iter().enumerate() {
            if ca == 0 {
                continue;
            }
            for (j, &cb) in b[..self.inner.dim - i].iter().enumerate() {
                if cb == 0 {
                    continue;
                }
                if let Some(k) = self.product_index(i, j) {
                    out[k] = f.add(out[k], f.mul(ca, cb));
                }
            }
        }
    }

    pub(crate) fn add_into(&self, a: &[Coeff], out: &mut [Coeff]) {
        let f = &self.inner.field;
        for (o, &c) in out.iter_mut().zip(a) {
            if c != 0 {
                *o = f.add(*o, c);
            }
        }
    }
}

impl fmt::Debug for TruncatedAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "TruncatedAlgebra({} over {})",
            self.inner.ext, self.inner.field
        )
    }
}

impl PartialEq for TruncatedAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

impl Eq for TruncatedAlgebra {}
