use serde::{Deserialize, Serialize};

use super::{FibreKind, InvariantError};
use crate::algebra::{ExtensionSpec, TruncatedAlgebra};
use crate::matgroup::{AlgebraMatrix, GroupTag, UnipotentElement};

/// Minimal `s` with `p^s ≥ n`.
pub fn min_p_power_at_least(p: u32, n: u64) -> u32 {
    let mut s = 0;
    let mut pow: u64 = 1;
    while pow < n {
        pow = pow.saturating_mul(p as u64);
        s += 1;
    }
    s
}

/// Exponent bound from the nilpotency index: minimal `s` with `p^s ≥ n`.
pub fn lemma41_exponent_bound(alg: &TruncatedAlgebra) -> u32 {
    min_p_power_at_least(alg.characteristic(), alg.nilpotency_index() as u64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankBound {
    /// Minimal `s` with `p^s ≥ r²(p^e − 1)`.
    pub literal: u32,
    /// `max(literal, e)`; the torus already attains exponent `e`.
    pub effective: u32,
}

/// Exponent bound for `r × r` matrices from the extension exponent `e`.
pub fn lemma44_exponent_bound(spec: &ExtensionSpec, r: usize) -> RankBound {
    let p = spec.p();
    let e = spec.extension_exponent();
    let target = (r as u64 * r as u64).saturating_mul((p as u64).pow(e) - 1);
    let literal = min_p_power_at_least(p, target);
    RankBound {
        literal,
        effective: literal.max(e),
    }
}

/// `I + X` in GL(n), `n` the nilpotency index, with `X` strictly upper
/// triangular carrying the top-monomial factors on the superdiagonal, so the
/// corner entry of `X^{n−1}` is the top monomial.
#[derive(Clone, Debug)]
pub struct SuperdiagonalWitness {
    pub nilpotent: AlgebraMatrix,
    pub element: UnipotentElement,
}

pub fn gln_superdiagonal_witness(alg: &TruncatedAlgebra) -> SuperdiagonalWitness {
    let n = alg.nilpotency_index();
    let factors = super::witness::top_monomial_factors(alg);
    let mut x = AlgebraMatrix::zero(alg, n);
    for (i, m) in factors.iter().enumerate() {
        x.set(i, i + 1, m);
    }
    let id = AlgebraMatrix::identity(alg, n);
    let element = UnipotentElement::new(GroupTag::Gl(n), id.checked_add(&x).expect("same shape"))
        .expect("identity plus a matrix over the maximal ideal");
    SuperdiagonalWitness {
        nilpotent: x,
        element,
    }
}

/// `(1 + x_i, x_j; 0, 1)` with `e_i` maximal and `j ≠ i`; its `p^e`-th power
/// is `(1, x_j·x_i^{p^e−1}; 0, 1) ≠ 1`.
pub fn imprimitive_borel_witness(
    alg: &TruncatedAlgebra,
) -> Result<UnipotentElement, InvariantError> {
    let ext = alg.extension();
    if ext.is_primitive() {
        return Err(InvariantError::NoWitness(
            "primitive extension: the Borel radical has exponent e".into(),
        ));
    }
    let e = ext.extension_exponent();
    let i = ext.exponents().iter().position(|&x| x == e).unwrap();
    let j = (0..ext.rank()).find(|&j| j != i).unwrap();
    let mut m = AlgebraMatrix::identity(alg, 2);
    m.set(0, 0, &(&alg.one() + &alg.generator(i)));
    m.set(0, 1, &alg.generator(j));
    Ok(UnipotentElement::new(GroupTag::Borel2, m)?)
}

/// Inputs and prediction of the open question relating the Borel-radical
/// exponent to Coxeter numbers of Levi subgroups. Never used as an
/// assertion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoxeterData {
    pub label: String,
    pub coxeter_number: u32,
    pub r_q: i64,
    pub levi_s: u32,
    pub predicted_exponent: u32,
    /// Exponent of the unipotent radical of the Borel of the split form:
    /// minimal `s` with `p^s > h − 1`.
    pub unipotent_s: u32,
    pub e_plus_s_bound: u32,
    pub applies: bool,
}

fn ceil_log(p: u32, x: u64) -> u32 {
    min_p_power_at_least(p, x)
}

pub fn coxeter_question_data(
    kind: &FibreKind,
    spec: &ExtensionSpec,
) -> Result<CoxeterData, InvariantError> {
    let h: u32 = match kind {
        FibreKind::Gl(2) | FibreKind::Sl2PowerTimesTorus { r: 1, s: 0 } => 2,
        other => {
            return Err(InvariantError::Unsupported(format!(
                "Coxeter data only for GL2 and SL2, got {other}"
            )))
        }
    };
    let p = spec.p();
    let e = spec.extension_exponent();
    // [k' : k(k')^p] = p^r for a modular presentation with r generators
    let r_q = spec.rank() as i64 - 1;
    // Levi subgroups of rank ≤ r_q: the torus contributes nothing, and GL₂
    // or SL₂ itself (rank 1) contributes ⌈log_p(h − 1)⌉ = 0.
    let levi_s = if r_q >= 1 {
        ceil_log(p, (h - 1) as u64)
    } else {
        0
    };
    let predicted_exponent = (e + levi_s).max(ceil_log(p, (h - 1) as u64));
    let unipotent_s = min_p_power_at_least(p, h as u64);
    let unusual = p == 2 && matches!(kind, FibreKind::Sl2PowerTimesTorus { .. });
    Ok(CoxeterData {
        label: "CONJECTURAL".into(),
        coxeter_number: h,
        r_q,
        levi_s,
        predicted_exponent,
        unipotent_s,
        e_plus_s_bound: e + unipotent_s,
        applies: !unusual,
    })
}
