use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};

use super::{AlgebraError, Coeff, Monomial, TruncatedAlgebra};

/// An element of a [`TruncatedAlgebra`], stored densely over the monomial
/// basis. Monomials outside the basis never appear: products are reduced as
/// they are formed.
#[derive(Clone)]
pub struct AlgebraElement {
    alg: TruncatedAlgebra,
    coeffs: Vec<Coeff>,
}

impl TruncatedAlgebra {
    pub fn zero(&self) -> AlgebraElement {
        AlgebraElement {
            alg: self.clone(),
            coeffs: vec![0; self.dim()],
        }
    }

    pub fn one(&self) -> AlgebraElement {
        self.constant(1)
    }

    pub fn constant(&self, c: Coeff) -> AlgebraElement {
        let mut z = self.zero();
        z.coeffs[0] = c;
        z
    }

    /// The generator `x_{i+1}` (zero-based `i`).
    pub fn generator(&self, i: usize) -> AlgebraElement {
        self.monomial(&Monomial::var(self.rank(), i), 1)
    }

    /// `c·x^α`; zero if the monomial is truncated.
    pub fn monomial(&self, m: &Monomial, c: Coeff) -> AlgebraElement {
        let mut z = self.zero();
        if let Some(idx) = self.index_of(m) {
            z.coeffs[idx] = c;
        }
        z
    }

    /// Element from a dense coefficient vector in basis-index order.
    pub fn from_coeffs(&self, coeffs: Vec<Coeff>) -> AlgebraElement {
        assert_eq!(
            coeffs.len(),
            self.dim(),
            "coefficient vector has wrong length"
        );
        AlgebraElement {
            alg: self.clone(),
            coeffs,
        }
    }

    /// Parses the canonical printing, e.g. `1 + x1 + (a+1)*x1*x2^3`.
    pub fn parse_element(&self, s: &str) -> Result<AlgebraElement, AlgebraError> {
        let mut out = self.zero();
        let s = s.trim();
        if s == "0" {
            return Ok(out);
        }
        let f = self.field();
        for term in split_top_level(s, '+') {
            let term = term.trim();
            if term.is_empty() {
                return Err(AlgebraError::Parse(format!("empty term in `{s}`")));
            }
            let mut exps = vec![0u32; self.rank()];
            let mut coeff_parts = Vec::new();
            for factor in split_top_level(term, '*') {
                let factor = factor.trim();
                if let Some(rest) = factor.strip_prefix('x') {
                    let (var, pow) = match rest.split_once('^') {
                        Some((v, e)) => (v, e),
                        None => (rest, "1"),
                    };
                    let bad = || AlgebraError::Parse(format!("bad variable `{factor}`"));
                    let var: usize = var.parse().map_err(|_| bad())?;
                    let pow: u32 = pow.parse().map_err(|_| bad())?;
                    if var == 0 || var > self.rank() {
                        return Err(bad());
                    }
                    exps[var - 1] += pow;
                } else {
                    coeff_parts.push(factor);
                }
            }
            let c = if coeff_parts.is_empty() {
                1
            } else {
                f.parse_coeff(&coeff_parts.join("*"))?
            };
            if let Some(idx) = self.index_of(&Monomial(exps)) {
                out.coeffs[idx] = f.add(out.coeffs[idx], c);
            }
        }
        Ok(out)
    }
}

fn split_top_level(s: &str, sep: char) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                parts.push(&s[start..i]);
                start = i + ch.len_utf8();
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

impl AlgebraElement {
    pub fn algebra(&self) -> &TruncatedAlgebra {
        &self.alg
    }

    pub fn coeffs(&self) -> &[Coeff] {
        &self.coeffs
    }

    pub fn coeff(&self, m: &Monomial) -> Coeff {
        self.alg.index_of(m).map_or(0, |i| self.coeffs[i])
    }

    pub fn constant_term(&self) -> Coeff {
        self.coeffs[0]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0] == 1 && self.coeffs[1..].iter().all(|&c| c == 0)
    }

    /// Units are exactly the elements with nonzero constant term.
    pub fn is_unit(&self) -> bool {
        self.coeffs[0] != 0
    }

    /// Membership in `𝔪`, equivalently nilpotency.
    pub fn in_maximal_ideal(&self) -> bool {
        self.coeffs[0] == 0
    }

    /// Smallest total degree in the support (`None` for zero). The element
    /// lies in `𝔪^i` iff this is at least `i`.
    pub fn order(&self) -> Option<u32> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, _)| self.alg.degree_at(i))
            .min()
    }

    /// Nonzero terms in graded-lexicographic order.
    pub fn terms(&self) -> Vec<(Monomial, Coeff)> {
        self.alg
            .grlex_indices()
            .iter()
            .filter(|&&i| self.coeffs[i] != 0)
            .map(|&i| (self.alg.monomial_at(i).clone(), self.coeffs[i]))
            .collect()
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.alg.check_same(&other.alg)?;
        let mut out = self.clone();
        self.alg.add_into(&other.coeffs, &mut out.coeffs);
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.checked_add(&other.neg_ref())
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.alg.check_same(&other.alg)?;
        let mut out = self.alg.zero();
        self.alg
            .mul_acc(&self.coeffs, &other.coeffs, &mut out.coeffs);
        Ok(out)
    }

    fn neg_ref(&self) -> Self {
        let f = self.alg.field();
        AlgebraElement {
            alg: self.alg.clone(),
            coeffs: self.coeffs.iter().map(|&c| f.neg(c)).collect(),
        }
    }

    pub fn scale(&self, c: Coeff) -> Self {
        let f = self.alg.field();
        AlgebraElement {
            alg: self.alg.clone(),
            coeffs: self.coeffs.iter().map(|&x| f.mul(x, c)).collect(),
        }
    }

    pub fn pow(&self, mut k: u64) -> Self {
        let mut acc = self.alg.one();
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// `a^p`.
    pub fn frobenius(&self) -> Self {
        self.pow(self.alg.characteristic() as u64)
    }

    /// Inverse of a unit `c(1 + m)` as `c⁻¹ Σ_{k<n} (−m)^k`, where `n` is the
    /// nilpotency index of `𝔪`.
    pub fn inverse(&self) -> Result<Self, AlgebraError> {
        let f = self.alg.field();
        let c_inv = f.inv(self.coeffs[0]).ok_or(AlgebraError::NotAUnit)?;
        let normalized = self.scale(c_inv);
        let mut minus_m = normalized.neg_ref();
        minus_m.coeffs[0] = 0;
        let mut sum = self.alg.one();
        let mut term = self.alg.one();
        for _ in 1..self.alg.nilpotency_index() {
            term = &term * &minus_m;
            if term.is_zero() {
                break;
            }
            sum = &sum + &term;
        }
        Ok(sum.scale(c_inv))
    }

    /// Drops every monomial of total degree `>= i`, i.e. reduces modulo `𝔪^i`.
    pub fn truncate_degree(&self, i: u32) -> Self {
        let mut out = self.clone();
        for (idx, c) in out.coeffs.iter_mut().enumerate() {
            if self.alg.degree_at(idx) >= i {
                *c = 0;
            }
        }
        out
    }
}

impl PartialEq for AlgebraElement {
    fn eq(&self, other: &Self) -> bool {
        self.alg.same_as(&other.alg) && self.coeffs == other.coeffs
    }
}

impl Eq for AlgebraElement {}

impl Hash for AlgebraElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait for &AlgebraElement {
            type Output = AlgebraElement;
            fn $method(self, rhs: &AlgebraElement) -> AlgebraElement {
                self.$checked(rhs)
                    .expect("operands belong to different algebras")
            }
        }
        impl $trait for AlgebraElement {
            type Output = AlgebraElement;
            fn $method(self, rhs: AlgebraElement) -> AlgebraElement {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl Neg for &AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        self.neg_ref()
    }
}

impl Neg for AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        self.neg_ref()
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let field = self.alg.field();
        let terms = self.terms();
        if terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            let mut cs = field.format_coeff(*c);
            if cs.contains('+') {
                cs = format!("({cs})");
            }
            if m.degree() == 0 {
                f.write_str(&cs)?;
            } else if *c == 1 {
                write!(f, "{m}")?;
            } else {
                write!(f, "{cs}*{m}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
