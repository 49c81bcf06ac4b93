//! Small finite fields `F_{p^d}` with table-driven arithmetic.
//!
//! Elements are encoded as `u8` indices: the index `Σ cₖ pᵏ` stands for the
//! residue class of `Σ cₖ aᵏ` modulo the defining polynomial, where `a` is the
//! distinguished generator. Every operation is a single table lookup, which is
//! what the exhaustive group enumerations need.

use std::fmt;
use std::sync::Arc;

use super::AlgebraError;

/// Largest supported field order. Keeps elements in a `u8`.
pub const MAX_FIELD_ORDER: u32 = 256;

/// An element of a [`CoefficientField`], stored as its table index.
pub type Coeff = u8;

#[derive(Clone)]
pub struct CoefficientField {
    inner: Arc<FieldTables>,
}

struct FieldTables {
    p: u32,
    degree: u32,
    order: u32,
    /// Monic defining polynomial, low degree first (empty when `degree == 1`).
    modulus: Vec<u32>,
    add: Vec<Coeff>,
    mul: Vec<Coeff>,
    neg: Vec<Coeff>,
    inv: Vec<Coeff>,
}

pub(crate) fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

// Polynomials over F_p as coefficient vectors, low degree first.

fn poly_trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    // m is monic
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (k, &mk) in m.iter().enumerate() {
                let idx = shift + k;
                r[idx] = (r[idx] + p - (lead * mk) % p) % p;
            }
        }
        r.pop();
    }
    poly_trim(r)
}

fn poly_mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    poly_trim(out)
}

fn decode(mut idx: u32, p: u32, d: u32) -> Vec<u32> {
    let mut v = Vec::with_capacity(d as usize);
    for _ in 0..d {
        v.push(idx % p);
        idx /= p;
    }
    poly_trim(v)
}

fn encode(v: &[u32], p: u32) -> u32 {
    v.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// True iff the monic polynomial `f` (degree ≥ 1) has no monic factor of
/// degree between 1 and deg(f)/2.
fn is_irreducible(f: &[u32], p: u32) -> bool {
    let deg = f.len() - 1;
    for k in 1..=deg / 2 {
        // every monic polynomial of degree k
        for low in 0..p.pow(k as u32) {
            let mut g = decode(low, p, k as u32);
            g.resize(k, 0);
            g.push(1);
            if poly_rem(f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

fn first_irreducible(p: u32, d: u32) -> Vec<u32> {
    for low in 0..p.pow(d) {
        let mut f = decode(low, p, d);
        f.resize(d as usize, 0);
        f.push(1);
        if f[0] != 0 && is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl CoefficientField {
    /// The prime field `F_p`.
    pub fn prime(p: u32) -> Result<Self, AlgebraError> {
        Self::new(p, 1)
    }

    /// `F_{p^d}` defined by the first monic irreducible polynomial of degree
    /// `d` in lexicographic order of its coefficients.
    pub fn new(p: u32, d: u32) -> Result<Self, AlgebraError> {
        if !is_prime(p) {
            return Err(AlgebraError::NotPrime(p));
        }
        if d == 0 {
            return Err(AlgebraError::UnsupportedField(format!("F{p}^0")));
        }
        let order = (p as u64).checked_pow(d).unwrap_or(u64::MAX);
        if order > MAX_FIELD_ORDER as u64 {
            return Err(AlgebraError::UnsupportedField(format!(
                "field of order {p}^{d} exceeds {MAX_FIELD_ORDER}"
            )));
        }
        let modulus = if d == 1 {
            Vec::new()
        } else {
            first_irreducible(p, d)
        };
        Ok(Self::build(p, d, modulus))
    }

    /// `F_p[a]/(f)` for an explicit monic irreducible `f`, coefficients low
    /// degree first.
    pub fn with_modulus(p: u32, modulus: &[u32]) -> Result<Self, AlgebraError> {
        if !is_prime(p) {
            return Err(AlgebraError::NotPrime(p));
        }
        let f: Vec<u32> = modulus.iter().map(|c| c % p).collect();
        let f = poly_trim(f);
        if f.len() < 2 || *f.last().unwrap() != 1 {
            return Err(AlgebraError::UnsupportedField(
                "defining polynomial must be monic of degree >= 1".into(),
            ));
        }
        if !is_irreducible(&f, p) {
            return Err(AlgebraError::UnsupportedField(format!(
                "defining polynomial {f:?} is reducible over F{p}"
            )));
        }
        let d = (f.len() - 1) as u32;
        if (p as u64).pow(d) > MAX_FIELD_ORDER as u64 {
            return Err(AlgebraError::UnsupportedField(format!(
                "field of order {p}^{d} exceeds {MAX_FIELD_ORDER}"
            )));
        }
        if d == 1 {
            return Ok(Self::build(p, 1, Vec::new()));
        }
        Ok(Self::build(p, d, f))
    }

    fn build(p: u32, d: u32, modulus: Vec<u32>) -> Self {
        let order = p.pow(d);
        let n = order as usize;
        let mut add = vec![0; n * n];
        let mut mul = vec![0; n * n];
        let mut neg = vec![0; n];
        let mut inv = vec![0; n];
        let polys: Vec<Vec<u32>> = (0..order).map(|i| decode(i, p, d)).collect();
        for a in 0..n {
            let pa = &polys[a];
            let mut na = pa.iter().map(|&c| (p - c) % p).collect::<Vec<_>>();
            na = poly_trim(na);
            neg[a] = encode(&na, p) as Coeff;
            for b in 0..n {
                let pb = &polys[b];
                let len = pa.len().max(pb.len());
                let sum: Vec<u32> = (0..len)
                    .map(|k| (pa.get(k).unwrap_or(&0) + pb.get(k).unwrap_or(&0)) % p)
                    .collect();
                add[a * n + b] = encode(&poly_trim(sum), p) as Coeff;
                let prod = poly_mul(pa, pb, p);
                let prod = if d == 1 {
                    prod
                } else {
                    poly_rem(&prod, &modulus, p)
                };
                mul[a * n + b] = encode(&prod, p) as Coeff;
            }
        }
        for a in 1..n {
            inv[a] = (1..n)
                .find(|&b| mul[a * n + b] == 1)
                .expect("nonzero element of a field is invertible") as Coeff;
        }
        Self {
            inner: Arc::new(FieldTables {
                p,
                degree: d,
                order,
                modulus,
                add,
                mul,
                neg,
                inv,
            }),
        }
    }

    pub fn characteristic(&self) -> u32 {
        self.inner.p
    }

    /// Degree over the prime field.
    pub fn degree(&self) -> u32 {
        self.inner.degree
    }

    pub fn order(&self) -> u32 {
        self.inner.order
    }

    pub fn modulus(&self) -> &[u32] {
        &self.inner.modulus
    }

    #[inline]
    pub fn add(&self, a: Coeff, b: Coeff) -> Coeff {
        self.inner.add[a as usize * self.inner.order as usize + b as usize]
    }

    #[inline]
    pub fn mul(&self, a: Coeff, b: Coeff) -> Coeff {
        self.inner.mul[a as usize * self.inner.order as usize + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: Coeff) -> Coeff {
        self.inner.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: Coeff, b: Coeff) -> Coeff {
        self.add(a, self.neg(b))
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: Coeff) -> Option<Coeff> {
        (a != 0).then(|| self.inner.inv[a as usize])
    }

    pub fn pow(&self, a: Coeff, mut k: u64) -> Coeff {
        let mut base = a;
        let mut acc: Coeff = 1;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    pub fn frobenius(&self, a: Coeff) -> Coeff {
        self.pow(a, self.inner.p as u64)
    }

    /// All elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = Coeff> {
        (0..self.inner.order).map(|i| i as Coeff)
    }

    /// The generators `1, a, …, a^{d-1}` of the field as an `F_p`-vector space.
    pub fn prime_basis(&self) -> Vec<Coeff> {
        (0..self.inner.degree)
            .map(|k| self.inner.p.pow(k) as Coeff)
            .collect()
    }

    /// Name in the `F<order>` notation, e.g. `F4`.
    pub fn name(&self) -> String {
        format!("F{}", self.inner.order)
    }

    /// Canonical text for a coefficient: an integer for prime-field elements,
    /// otherwise a polynomial in `a` such as `a^2+1`.
    pub fn format_coeff(&self, c: Coeff) -> String {
        let p = self.inner.p;
        if (c as u32) < p {
            return c.to_string();
        }
        let digits = decode(c as u32, p, self.inner.degree);
        let mut terms = Vec::new();
        for (k, &d) in digits.iter().enumerate().rev() {
            if d == 0 {
                continue;
            }
            let var = match k {
                0 => String::new(),
                1 => "a".to_string(),
                _ => format!("a^{k}"),
            };
            terms.push(match (d, k) {
                (_, 0) => d.to_string(),
                (1, _) => var,
                _ => format!("{d}*{var}"),
            });
        }
        terms.join("+")
    }

    /// Inverse of [`format_coeff`](Self::format_coeff); surrounding
    /// parentheses are accepted.
    pub fn parse_coeff(&self, s: &str) -> Result<Coeff, AlgebraError> {
        let p = self.inner.p;
        let d = self.inner.degree;
        let bad = || AlgebraError::Parse(format!("bad coefficient `{s}` for {}", self.name()));
        let t = s.trim();
        let t = t
            .strip_prefix('(')
            .and_then(|x| x.strip_suffix(')'))
            .unwrap_or(t);
        let mut digits = vec![0u32; d as usize];
        for term in t.split('+') {
            let term = term.trim();
            if term.is_empty() {
                return Err(bad());
            }
            let (c, var) = match term.split_once('*') {
                Some((c, v)) => (c.trim().parse::<u32>().map_err(|_| bad())?, Some(v.trim())),
                None if term.starts_with('a') => (1, Some(term)),
                None => (term.parse::<u32>().map_err(|_| bad())?, None),
            };
            let k = match var {
                None => 0,
                Some("a") => 1,
                Some(v) => v
                    .strip_prefix("a^")
                    .and_then(|e| e.parse::<u32>().ok())
                    .ok_or_else(bad)?,
            };
            if k >= d {
                return Err(bad());
            }
            digits[k as usize] = (digits[k as usize] + c % p) % p;
        }
        Ok(encode(&digits, p) as Coeff)
    }
}

impl PartialEq for CoefficientField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.p == other.inner.p
                && self.inner.degree == other.inner.degree
                && self.inner.modulus == other.inner.modulus)
    }
}

impl Eq for CoefficientField {}

impl fmt::Debug for CoefficientField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())?;
        if self.inner.degree > 1 {
            write!(f, " mod {:?}", self.inner.modulus)?;
        }
        Ok(())
    }
}

impl fmt::Display for CoefficientField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Parses `F<order>`, e.g. `F2`, `F4`, `F9`.
pub fn parse_field(s: &str) -> Result<CoefficientField, AlgebraError> {
    let bad = || AlgebraError::Parse(format!("expected F<p^d>, got `{s}`"));
    let order: u32 = s
        .trim()
        .strip_prefix('F')
        .and_then(|n| n.parse().ok())
        .ok_or_else(bad)?;
    let p = (2..=order)
        .find(|q| order.is_multiple_of(*q))
        .ok_or_else(bad)?;
    let mut d = 0;
    let mut rest = order;
    while rest.is_multiple_of(p) {
        rest /= p;
        d += 1;
    }
    if rest != 1 {
        return Err(bad());
    }
    CoefficientField::new(p, d)
}
