use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::Mul;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::MatGroupError;
use crate::algebra::{AlgebraElement, AlgebraError, Coeff, TruncatedAlgebra};

/// Square matrix over a [`TruncatedAlgebra`], stored as one flat coefficient
/// buffer: entry `(i, j)` occupies `[(i·n + j)·dim, (i·n + j + 1)·dim)`.
#[derive(Clone)]
pub struct AlgebraMatrix {
    alg: TruncatedAlgebra,
    n: usize,
    data: Vec<Coeff>,
}

/// JSON mirror of the text format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub n: usize,
    pub entries: Vec<Vec<String>>,
}

impl AlgebraMatrix {
    pub fn zero(alg: &TruncatedAlgebra, n: usize) -> Self {
        Self {
            alg: alg.clone(),
            n,
            data: vec![0; n * n * alg.dim()],
        }
    }

    pub fn identity(alg: &TruncatedAlgebra, n: usize) -> Self {
        let mut m = Self::zero(alg, n);
        let d = alg.dim();
        for i in 0..n {
            m.data[(i * n + i) * d] = 1;
        }
        m
    }

    /// Diagonal matrix `c·I` for an algebra element `c`.
    pub fn scalar(c: &AlgebraElement, n: usize) -> Self {
        let mut m = Self::zero(c.algebra(), n);
        for i in 0..n {
            m.set(i, i, c);
        }
        m
    }

    pub fn from_rows(
        alg: &TruncatedAlgebra,
        rows: Vec<Vec<AlgebraElement>>,
    ) -> Result<Self, MatGroupError> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(MatGroupError::Shape(format!(
                "expected a nonempty square array, got {} rows",
                n
            )));
        }
        let mut m = Self::zero(alg, n);
        for (i, row) in rows.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                alg.check_same(e.algebra())?;
                m.set(i, j, e);
            }
        }
        Ok(m)
    }

    /// Builds a matrix from a flat coefficient buffer in the internal layout.
    pub fn from_raw(alg: &TruncatedAlgebra, n: usize, data: Vec<Coeff>) -> Self {
        assert_eq!(data.len(), n * n * alg.dim(), "buffer has wrong length");
        Self {
            alg: alg.clone(),
            n,
            data,
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn algebra(&self) -> &TruncatedAlgebra {
        &self.alg
    }

    /// The flat coefficient buffer; two matrices over the same algebra are
    /// equal iff their buffers are.
    pub fn raw(&self) -> &[Coeff] {
        &self.data
    }

    fn range(&self, i: usize, j: usize) -> std::ops::Range<usize> {
        let d = self.alg.dim();
        let start = (i * self.n + j) * d;
        start..start + d
    }

    pub(crate) fn entry_slice(&self, i: usize, j: usize) -> &[Coeff] {
        &self.data[self.range(i, j)]
    }

    pub fn entry(&self, i: usize, j: usize) -> AlgebraElement {
        self.alg.from_coeffs(self.entry_slice(i, j).to_vec())
    }

    pub fn set(&mut self, i: usize, j: usize, e: &AlgebraElement) {
        let r = self.range(i, j);
        self.data[r].copy_from_slice(e.coeffs());
    }

    pub fn rows(&self) -> Vec<Vec<AlgebraElement>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.entry(i, j)).collect())
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        let d = self.alg.dim();
        self.data.iter().enumerate().all(|(k, &c)| {
            let (cell, off) = (k / d, k % d);
            let diag = cell / self.n == cell % self.n;
            c == if diag && off == 0 { 1 } else { 0 }
        })
    }

    /// True iff the matrix is `c·I` for some algebra element `c`.
    pub fn is_scalar(&self) -> bool {
        let first = self.entry_slice(0, 0);
        (0..self.n).all(|i| {
            (0..self.n).all(|j| {
                let e = self.entry_slice(i, j);
                if i == j {
                    e == first
                } else {
                    e.iter().all(|&c| c == 0)
                }
            })
        })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, MatGroupError> {
        self.alg.check_same(&other.alg)?;
        if self.n != other.n {
            return Err(MatGroupError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.n, self.n, other.n, other.n
            )));
        }
        let n = self.n;
        let mut out = Self::zero(&self.alg, n);
        for i in 0..n {
            for j in 0..n {
                let r = out.range(i, j);
                let cell = &mut out.data[r];
                for k in 0..n {
                    self.alg
                        .mul_acc(self.entry_slice(i, k), other.entry_slice(k, j), cell);
                }
            }
        }
        Ok(out)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, MatGroupError> {
        self.alg.check_same(&other.alg)?;
        if self.n != other.n {
            return Err(MatGroupError::Shape("size mismatch in addition".into()));
        }
        let mut out = self.clone();
        self.alg.add_into(&other.data, &mut out.data);
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let f = self.alg.field();
        Self {
            alg: self.alg.clone(),
            n: self.n,
            data: self.data.iter().map(|&c| f.neg(c)).collect(),
        }
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, MatGroupError> {
        self.checked_add(&other.neg())
    }

    /// Multiplies every entry by the algebra element `c`.
    pub fn scale(&self, c: &AlgebraElement) -> Self {
        let mut out = Self::zero(&self.alg, self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                let r = out.range(i, j);
                self.alg
                    .mul_acc(c.coeffs(), self.entry_slice(i, j), &mut out.data[r]);
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zero(&self.alg, self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                let src = self.range(j, i);
                let dst = out.range(i, j);
                out.data[dst].copy_from_slice(&self.data[src]);
            }
        }
        out
    }

    pub fn pow(&self, mut k: u64) -> Self {
        let mut acc = Self::identity(&self.alg, self.n);
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

    /// Determinant by the Leibniz expansion.
    pub fn det(&self) -> AlgebraElement {
        leibniz_det(&self.rows(), &self.alg)
    }

    /// Exact inverse; `None` when the determinant is not a unit. Uses the
    /// adjugate for `n ≤ 3` and Gauss–Jordan elimination otherwise.
    pub fn inverse(&self) -> Option<Self> {
        if self.n <= 3 {
            self.inverse_adjugate()
        } else {
            self.inverse_elimination()
        }
    }

    pub fn inverse_adjugate(&self) -> Option<Self> {
        let det_inv = self.det().inverse().ok()?;
        let n = self.n;
        let rows = self.rows();
        let mut out = Self::zero(&self.alg, n);
        for i in 0..n {
            for j in 0..n {
                // adj(A)_{ij} = (−1)^{i+j} det(A with row j and column i removed)
                let minor: Vec<Vec<AlgebraElement>> = rows
                    .iter()
                    .enumerate()
                    .filter(|&(r, _)| r != j)
                    .map(|(_, row)| {
                        row.iter()
                            .enumerate()
                            .filter(|&(c, _)| c != i)
                            .map(|(_, e)| e.clone())
                            .collect()
                    })
                    .collect();
                let mut cof = leibniz_det(&minor, &self.alg);
                if (i + j) % 2 == 1 {
                    cof = -cof;
                }
                out.set(i, j, &(&cof * &det_inv));
            }
        }
        Some(out)
    }

    /// Gauss–Jordan elimination over the local ring: in each column some entry
    /// of an invertible matrix is a unit and serves as pivot.
    pub fn inverse_elimination(&self) -> Option<Self> {
        let n = self.n;
        let mut a = self.rows();
        let mut b = Self::identity(&self.alg, n).rows();
        for col in 0..n {
            let piv = (col..n).find(|&r| a[r][col].is_unit())?;
            a.swap(col, piv);
            b.swap(col, piv);
            let inv = a[col][col].inverse().ok()?;
            for k in 0..n {
                a[col][k] = &a[col][k] * &inv;
                b[col][k] = &b[col][k] * &inv;
            }
            for r in 0..n {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let factor = a[r][col].clone();
                for k in 0..n {
                    a[r][k] = &a[r][k] - &(&factor * &a[col][k]);
                    b[r][k] = &b[r][k] - &(&factor * &b[col][k]);
                }
            }
        }
        Self::from_rows(&self.alg, b).ok()
    }

    /// Entries reduced modulo `𝔪^i`.
    pub fn truncate_degree(&self, i: u32) -> Self {
        let d = self.alg.dim();
        let mut out = self.clone();
        for (k, c) in out.data.iter_mut().enumerate() {
            if self.alg.degree_at(k % d) >= i {
                *c = 0;
            }
        }
        out
    }

    /// Parses `row;row;…` with entries separated by `,`.
    pub fn parse(alg: &TruncatedAlgebra, s: &str) -> Result<Self, MatGroupError> {
        let rows = s
            .split(';')
            .map(|row| {
                row.split(',')
                    .map(|e| alg.parse_element(e))
                    .collect::<Result<Vec<_>, AlgebraError>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_rows(alg, rows)
    }

    pub fn to_json(&self) -> MatrixJson {
        MatrixJson {
            n: self.n,
            entries: self
                .rows()
                .iter()
                .map(|r| r.iter().map(|e| e.to_string()).collect())
                .collect(),
        }
    }

    pub fn from_json(alg: &TruncatedAlgebra, j: &MatrixJson) -> Result<Self, MatGroupError> {
        let rows = j
            .entries
            .iter()
            .map(|r| {
                r.iter()
                    .map(|e| alg.parse_element(e))
                    .collect::<Result<Vec<_>, AlgebraError>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let m = Self::from_rows(alg, rows)?;
        if m.n != j.n {
            return Err(MatGroupError::Shape(format!(
                "declared n={} but got {}",
                j.n, m.n
            )));
        }
        Ok(m)
    }
}

fn leibniz_det(rows: &[Vec<AlgebraElement>], alg: &TruncatedAlgebra) -> AlgebraElement {
    let n = rows.len();
    if n == 0 {
        return alg.one();
    }
    let mut det = alg.zero();
    for perm in (0..n).permutations(n) {
        let inversions = (0..n)
            .tuple_combinations()
            .filter(|&(a, b)| perm[a] > perm[b])
            .count();
        let mut term = alg.one();
        for (i, &j) in perm.iter().enumerate() {
            term = &term * &rows[i][j];
            if term.is_zero() {
                break;
            }
        }
        det = if inversions % 2 == 0 {
            &det + &term
        } else {
            &det - &term
        };
    }
    det
}

impl Mul for &AlgebraMatrix {
    type Output = AlgebraMatrix;
    fn mul(self, rhs: &AlgebraMatrix) -> AlgebraMatrix {
        self.checked_mul(rhs).expect("matrices are not compatible")
    }
}

impl PartialEq for AlgebraMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.alg.same_as(&other.alg) && self.data == other.data
    }
}

impl Eq for AlgebraMatrix {}

impl Hash for AlgebraMatrix {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.n.hash(state);
        self.data.hash(state);
    }
}

impl fmt::Display for AlgebraMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows()
            .iter()
            .map(|r| r.iter().map(|e| e.to_string()).join(", "))
            .collect();
        f.write_str(&rows.join("; "))
    }
}

impl fmt::Debug for AlgebraMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}
