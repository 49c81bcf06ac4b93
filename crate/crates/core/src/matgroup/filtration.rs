use super::{AlgebraMatrix, GroupTag, MatGroupError, UnipotentElement};
use crate::algebra::{lemma38_ideals, AlgebraError, TruncatedAlgebra};

/// Index `i` of the congruence subgroup `Uᵢ = ker(G(B̄) → G(B̄/𝔪^i))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FiltrationLevel(usize);

impl FiltrationLevel {
    pub fn new(i: usize, alg: &TruncatedAlgebra) -> Result<Self, MatGroupError> {
        let max = alg.nilpotency_index();
        if i == 0 || i > max {
            return Err(MatGroupError::InvalidLevel { level: i, max });
        }
        Ok(Self(i))
    }

    pub fn index(&self) -> usize {
        self.0
    }
}

/// Entries of `g` reduced modulo `𝔪^i`.
pub fn reduce_mod_power(g: &UnipotentElement, i: FiltrationLevel) -> AlgebraMatrix {
    g.matrix().truncate_degree(i.0 as u32)
}

/// `g ∈ Uᵢ`.
pub fn filtration_member(g: &UnipotentElement, i: FiltrationLevel) -> bool {
    reduce_mod_power(g, i).is_identity()
}

/// Membership in `R_r`: diagonal entries in `1 + J_r`, off-diagonal entries
/// in `I_r`. Only defined for SL₂ in characteristic 2.
pub fn sl2_filtration_member(g: &UnipotentElement, r: usize) -> Result<bool, MatGroupError> {
    if g.tag() != GroupTag::Sl2 {
        return Err(MatGroupError::TagMismatch(g.tag(), GroupTag::Sl2));
    }
    let alg = g.algebra();
    if alg.characteristic() != 2 {
        return Err(AlgebraError::UnsupportedCharacteristic(alg.characteristic()).into());
    }
    let (i_r, j_r) = lemma38_ideals(alg, r)?;
    let m = g.matrix();
    let one = alg.one();
    Ok(j_r.contains(&(&m.entry(0, 0) - &one))
        && j_r.contains(&(&m.entry(1, 1) - &one))
        && i_r.contains(&m.entry(0, 1))
        && i_r.contains(&m.entry(1, 0)))
}
