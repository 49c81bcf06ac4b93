use serde::{Deserialize, Serialize};

use super::{FibreKind, FibreSpec, InvariantError};
use crate::algebra::{unusual_class_invariant, AlgebraElement, TruncatedAlgebra};
use crate::matgroup::{iterated_commutator, AlgebraMatrix, GroupTag, MatrixJson, UnipotentElement};

/// `x₁` repeated `q₁ − 1` times, then `x₂` repeated `q₂ − 1` times, and so on:
/// the factors of the top monomial.
pub fn top_monomial_factors(alg: &TruncatedAlgebra) -> Vec<AlgebraElement> {
    alg.qs()
        .iter()
        .enumerate()
        .flat_map(|(i, &q)| std::iter::repeat_with(move || i).take(q as usize - 1))
        .map(|i| alg.generator(i))
        .collect()
}

fn upper(alg: &TruncatedAlgebra, m: &AlgebraElement) -> AlgebraMatrix {
    let mut z = AlgebraMatrix::identity(alg, 2);
    z.set(0, 1, m);
    z
}

fn lower(alg: &TruncatedAlgebra, m: &AlgebraElement) -> AlgebraMatrix {
    let mut z = AlgebraMatrix::identity(alg, 2);
    z.set(1, 0, m);
    z
}

fn diag(alg: &TruncatedAlgebra, a: &AlgebraElement, d: &AlgebraElement) -> AlgebraMatrix {
    let mut z = AlgebraMatrix::identity(alg, 2);
    z.set(0, 0, a);
    z.set(1, 1, d);
    z
}

fn product(alg: &TruncatedAlgebra, xs: &[AlgebraElement]) -> AlgebraElement {
    xs.iter().fold(alg.one(), |acc, x| &acc * x)
}

/// Chain `z, y₁, …, y_{n−2}` for GL₂ with `[y_{n−2}, …, [y₁, z]] = (1, m·m₁⋯m_{n−2}; 0, 1)`.
#[derive(Clone, Debug)]
pub struct Gl2Witness {
    pub z: AlgebraMatrix,
    pub ys: Vec<AlgebraMatrix>,
    pub result: AlgebraMatrix,
}

pub fn gl2_witness(alg: &TruncatedAlgebra) -> Result<Gl2Witness, InvariantError> {
    let factors = top_monomial_factors(alg);
    let (m, rest) = factors
        .split_first()
        .ok_or_else(|| InvariantError::NoWitness("maximal ideal is zero".into()))?;
    let one = alg.one();
    let z = upper(alg, m);
    let ys: Vec<_> = rest
        .iter()
        .map(|mi| diag(alg, &(&one + mi), &one))
        .collect();
    let result = upper(alg, &product(alg, &factors));
    Ok(Gl2Witness { z, ys, result })
}

/// SL₂ analogue for odd `p`: `yᵢ = diag(1+mᵢ, (1+mᵢ)⁻¹)`, and the chain ends
/// at `(1, m·∏((1+mᵢ)² − 1); 0, 1)`.
pub fn sl2_odd_witness(alg: &TruncatedAlgebra) -> Result<Gl2Witness, InvariantError> {
    if alg.characteristic() == 2 {
        return Err(InvariantError::Unsupported(
            "odd-characteristic SL2 witness requested with p=2".into(),
        ));
    }
    let factors = top_monomial_factors(alg);
    let (m, rest) = factors
        .split_first()
        .ok_or_else(|| InvariantError::NoWitness("maximal ideal is zero".into()))?;
    let one = alg.one();
    let z = upper(alg, m);
    let mut entry = m.clone();
    let mut ys = Vec::new();
    for mi in rest {
        let u = &one + mi;
        let uinv = u.inverse().expect("1 + m is a unit");
        entry = &entry * &(&(&u * &u) - &one);
        ys.push(diag(alg, &u, &uinv));
    }
    Ok(Gl2Witness {
        z,
        ys,
        result: upper(alg, &entry),
    })
}

/// Exponent choice for the characteristic-2 SL₂ witness: `m = x_a`,
/// `m′ = x_b` and `x_i` repeated `gammas[i]` times, maximizing `Σγᵢ` subject
/// to `2γ + δ ≤ q − 1` with `δ = e_a + e_b`. `None` when `𝔪² = 0`.
pub fn unusual_selection(alg: &TruncatedAlgebra) -> Option<(usize, usize, Vec<u32>)> {
    let qs = alg.qs();
    let r = qs.len();
    let mut best: Option<(u32, usize, usize, Vec<u32>)> = None;
    for a in 0..r {
        for b in a..r {
            let mut delta = vec![0u32; r];
            delta[a] += 1;
            delta[b] += 1;
            if (0..r).any(|i| delta[i] > qs[i] - 1) {
                continue;
            }
            let gammas: Vec<u32> = (0..r).map(|i| (qs[i] - 1 - delta[i]) / 2).collect();
            let total: u32 = gammas.iter().sum();
            if best.as_ref().is_none_or(|(t, ..)| total > *t) {
                best = Some((total, a, b, gammas));
            }
        }
    }
    best.map(|(_, a, b, g)| (a, b, g))
}

/// Chain for SL₂ in characteristic 2: `w = [y_{n−2}, …, [y₁, z]]` and the
/// final commutator `[z′, w]`, whose diagonal entries are `1 + π`. It is the
/// scalar `(1+π)·I` exactly when `π` annihilates `m`, `m′` and itself.
#[derive(Clone, Debug)]
pub struct Sl2Char2Witness {
    pub z: AlgebraMatrix,
    pub z_prime: AlgebraMatrix,
    pub ys: Vec<AlgebraMatrix>,
    pub w: AlgebraMatrix,
    pub final_commutator: AlgebraMatrix,
    pub pi: AlgebraElement,
}

pub fn sl2_char2_witness(alg: &TruncatedAlgebra) -> Result<Sl2Char2Witness, InvariantError> {
    let n = unusual_class_invariant(alg)?;
    if n < 2 {
        return Err(InvariantError::NoWitness(
            "class is 1; no nontrivial commutator exists".into(),
        ));
    }
    let (a, b, gammas) = unusual_selection(alg)
        .ok_or_else(|| InvariantError::Internal("no feasible exponent selection".into()))?;
    let ms: Vec<AlgebraElement> = gammas
        .iter()
        .enumerate()
        .flat_map(|(i, &g)| std::iter::repeat_with(move || i).take(g as usize))
        .map(|i| alg.generator(i))
        .collect();
    if ms.len() + 2 != n {
        return Err(InvariantError::Internal(format!(
            "selection has {} factors, expected {}",
            ms.len(),
            n - 2
        )));
    }
    let one = alg.one();
    let m = alg.generator(a);
    let m_prime = alg.generator(b);
    let z = upper(alg, &m);
    let z_prime = lower(alg, &m_prime);
    let ys: Vec<_> = ms
        .iter()
        .map(|mi| {
            let u = &one + mi;
            let uinv = u.inverse().expect("1 + m is a unit");
            diag(alg, &u, &uinv)
        })
        .collect();
    let squares: Vec<_> = ms.iter().map(|x| x * x).collect();
    let w_entry = &product(alg, &squares) * &m;
    let pi = &w_entry * &m_prime;
    let w = upper(alg, &w_entry);
    // [z′, w] = (1+π, bπ; m′π, 1+π+π²) with b the upper entry of w
    let mut final_commutator = AlgebraMatrix::identity(alg, 2);
    final_commutator.set(0, 0, &(&one + &pi));
    final_commutator.set(0, 1, &(&w_entry * &pi));
    final_commutator.set(1, 0, &(&m_prime * &pi));
    final_commutator.set(1, 1, &(&(&one + &pi) + &(&pi * &pi)));
    Ok(Sl2Char2Witness {
        z,
        z_prime,
        ys,
        w,
        final_commutator,
        pi,
    })
}

/// A nontrivial left-nested commutator of `elements` (outermost first),
/// certifying that the class is at least `lower_bound = elements.len()`.
#[derive(Clone, Debug)]
pub struct ClassCertificate {
    pub tag: GroupTag,
    pub construction: &'static str,
    pub elements: Vec<UnipotentElement>,
    pub intermediate: Option<AlgebraMatrix>,
    pub result: AlgebraMatrix,
    pub lower_bound: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub group: String,
    pub construction: String,
    pub elements: Vec<MatrixJson>,
    pub intermediate: Option<MatrixJson>,
    pub result: MatrixJson,
    pub lower_bound: usize,
}

impl ClassCertificate {
    /// Recomputes the iterated commutator through the group operations and
    /// checks it against the closed-form result.
    pub fn verify(&self) -> Result<(), InvariantError> {
        let (inner, outer) = self
            .elements
            .split_last()
            .ok_or_else(|| InvariantError::Internal("empty certificate".into()))?;
        let c = iterated_commutator(outer, inner)?;
        if c.matrix() != &self.result {
            return Err(InvariantError::Internal(format!(
                "recomputed commutator {} differs from {}",
                c.matrix(),
                self.result
            )));
        }
        if c.is_identity() {
            return Err(InvariantError::Internal(
                "witness commutator is trivial".into(),
            ));
        }
        Ok(())
    }

    pub fn to_json(&self) -> CertificateJson {
        CertificateJson {
            group: self.tag.to_string(),
            construction: self.construction.to_string(),
            elements: self.elements.iter().map(|e| e.matrix().to_json()).collect(),
            intermediate: self.intermediate.as_ref().map(|m| m.to_json()),
            result: self.result.to_json(),
            lower_bound: self.lower_bound,
        }
    }
}

fn embed(m: &AlgebraMatrix, n: usize) -> AlgebraMatrix {
    let alg = m.algebra();
    let mut out = AlgebraMatrix::identity(alg, n);
    for i in 0..m.size() {
        for j in 0..m.size() {
            out.set(i, j, &m.entry(i, j));
        }
    }
    out
}

fn element(tag: GroupTag, m: AlgebraMatrix) -> Result<UnipotentElement, InvariantError> {
    Ok(UnipotentElement::new(tag, m)?)
}

/// Witness that the unipotent radical for the fibre has class at least the
/// fibre's ℓ. The result is verified by recomputation before it is returned.
pub fn class_certificate(f: &FibreSpec) -> Result<ClassCertificate, InvariantError> {
    let alg = TruncatedAlgebra::new(f.ext.clone())?;
    let x = alg.generator(0);
    let one = alg.one();
    let cert = match f.kind {
        FibreKind::Torus(rank) => {
            let mut m = AlgebraMatrix::identity(&alg, rank);
            m.set(0, 0, &(&one + &x));
            let g = element(GroupTag::Torus(rank), m.clone())?;
            ClassCertificate {
                tag: GroupTag::Torus(rank),
                construction: "nonidentity",
                elements: vec![g],
                intermediate: None,
                result: m,
                lower_bound: 1,
            }
        }
        FibreKind::Sl2PowerTimesTorus { .. } if f.ext.p() == 2 => match sl2_char2_witness(&alg) {
            Ok(w) => {
                let tag = GroupTag::Sl2;
                let mut elements = vec![element(tag, w.z_prime.clone())?];
                for y in w.ys.iter().rev() {
                    elements.push(element(tag, y.clone())?);
                }
                elements.push(element(tag, w.z.clone())?);
                let lower_bound = elements.len();
                ClassCertificate {
                    tag,
                    construction: "sl2-char2",
                    elements,
                    intermediate: Some(w.w),
                    result: w.final_commutator,
                    lower_bound,
                }
            }
            Err(InvariantError::NoWitness(_)) => {
                let m = upper(&alg, &x);
                ClassCertificate {
                    tag: GroupTag::Sl2,
                    construction: "nonidentity",
                    elements: vec![element(GroupTag::Sl2, m.clone())?],
                    intermediate: None,
                    result: m,
                    lower_bound: 1,
                }
            }
            Err(e) => return Err(e),
        },
        FibreKind::Sl2PowerTimesTorus { .. } => {
            chain_certificate(GroupTag::Sl2, "sl2-diagonal", sl2_odd_witness(&alg)?, 2)?
        }
        FibreKind::Gl(n) => {
            chain_certificate(GroupTag::Gl(n), "gl2-diagonal", gl2_witness(&alg)?, n)?
        }
        FibreKind::Pgl2 => {
            chain_certificate(GroupTag::Pgl2, "gl2-diagonal", gl2_witness(&alg)?, 2)?
        }
        FibreKind::Borel2 => {
            return Err(InvariantError::Unsupported(
                "class certificates are defined for reductive fibres only".into(),
            ))
        }
    };
    cert.verify()?;
    Ok(cert)
}

fn chain_certificate(
    tag: GroupTag,
    construction: &'static str,
    w: Gl2Witness,
    size: usize,
) -> Result<ClassCertificate, InvariantError> {
    let mut elements = Vec::new();
    for y in w.ys.iter().rev() {
        elements.push(element(tag, embed(y, size))?);
    }
    elements.push(element(tag, embed(&w.z, size))?);
    let lower_bound = elements.len();
    let result = element(tag, embed(&w.result, size))?.into_matrix();
    Ok(ClassCertificate {
        tag,
        construction,
        elements,
        intermediate: None,
        result,
        lower_bound,
    })
}
