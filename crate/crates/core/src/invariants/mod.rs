//! Fibre-level class invariants, their certificates and exponent bounds.
//!
//! For a fibre `G′` over `k′` with local algebra `B̄`, the class of the
//! geometric unipotent radical is `ℓ = 1` for a torus, `n − 1` when `G′` is
//! not unusual (`n` the nilpotency index of `𝔪`), and the minimal `n` with
//! `(²𝔪)^{n−1}·𝔪² = 0` for `SL₂^r × torus` in characteristic 2. The class of
//! the whole group is `N = max ℓᵢ`.

mod exponent;
mod witness;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{unusual_class_invariant, AlgebraError, ExtensionSpec, TruncatedAlgebra};
use crate::matgroup::{GroupTag, MatGroupError};

pub use exponent::{
    coxeter_question_data, gln_superdiagonal_witness, imprimitive_borel_witness,
    lemma41_exponent_bound, lemma44_exponent_bound, min_p_power_at_least, CoxeterData, RankBound,
    SuperdiagonalWitness,
};
pub use witness::{
    class_certificate, gl2_witness, sl2_char2_witness, sl2_odd_witness, top_monomial_factors,
    unusual_selection, CertificateJson, ClassCertificate, Gl2Witness, Sl2Char2Witness,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvariantError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    MatGroup(#[from] MatGroupError),
    #[error("theorem hypothesis not satisfied: {0}")]
    HypothesisUnmet(String),
    #[error("no witness: {0}")]
    NoWitness(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// Reductive fibre types, plus the 2×2 Borel model used by the exponent
/// experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FibreKind {
    Torus(usize),
    Sl2PowerTimesTorus { r: usize, s: usize },
    Gl(usize),
    Pgl2,
    Borel2,
}

impl FibreKind {
    /// Matrix model whose kernel has the same class as the fibre's radical.
    /// `SL₂^r × T` uses a single SL₂ factor.
    pub fn group_tag(&self) -> GroupTag {
        match *self {
            FibreKind::Torus(rank) => GroupTag::Torus(rank),
            FibreKind::Sl2PowerTimesTorus { .. } => GroupTag::Sl2,
            FibreKind::Gl(n) => GroupTag::Gl(n),
            FibreKind::Pgl2 => GroupTag::Pgl2,
            FibreKind::Borel2 => GroupTag::Borel2,
        }
    }

    pub fn is_commutative(&self) -> bool {
        matches!(self, FibreKind::Torus(_))
    }
}

impl fmt::Display for FibreKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            FibreKind::Torus(r) => write!(f, "T{r}"),
            FibreKind::Sl2PowerTimesTorus { r: 1, s: 0 } => f.write_str("SL2"),
            FibreKind::Sl2PowerTimesTorus { r, s } => write!(f, "SL2^{r}*T{s}"),
            FibreKind::Gl(n) => write!(f, "GL{n}"),
            FibreKind::Pgl2 => f.write_str("PGL2"),
            FibreKind::Borel2 => f.write_str("Borel2"),
        }
    }
}

impl FromStr for FibreKind {
    type Err = InvariantError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |why: &str| InvariantError::Parse(format!("fibre kind `{s}`: {why}"));
        let num = |t: &str| t.parse::<usize>().map_err(|_| bad("expected a number"));
        let kind = match s {
            "SL2" => FibreKind::Sl2PowerTimesTorus { r: 1, s: 0 },
            "PGL2" => FibreKind::Pgl2,
            "Borel2" => FibreKind::Borel2,
            _ if s.starts_with("SL2") => {
                let rest = &s[3..];
                let (r_part, t_part) = match rest.split_once('*') {
                    Some((a, b)) => (a, Some(b)),
                    None => (rest, None),
                };
                let r = match r_part {
                    "" => 1,
                    _ => num(r_part
                        .strip_prefix('^')
                        .ok_or_else(|| bad("expected `^r`"))?)?,
                };
                let t = match t_part {
                    None => 0,
                    Some(t) => num(t.strip_prefix('T').ok_or_else(|| bad("expected `T<s>`"))?)?,
                };
                if r == 0 {
                    return Err(bad("SL2 power must be at least 1"));
                }
                FibreKind::Sl2PowerTimesTorus { r, s: t }
            }
            _ if s.starts_with("GL") => {
                let n = num(&s[2..])?;
                if n < 2 {
                    return Err(bad("GL(n) needs n >= 2"));
                }
                FibreKind::Gl(n)
            }
            _ if s.starts_with('T') => {
                let r = num(&s[1..])?;
                if r == 0 {
                    return Err(bad("torus rank must be at least 1"));
                }
                FibreKind::Torus(r)
            }
            _ => return Err(bad("unknown kind")),
        };
        Ok(kind)
    }
}

/// One fibre: group kind, extension, and whether the injectivity hypothesis
/// on the centre holds (only consulted for unusual fibres).
///
/// Text form: `<KIND>@p=<p>;e=<e1,...>`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FibreSpec {
    pub kind: FibreKind,
    pub ext: ExtensionSpec,
    pub phi_injective: bool,
}

impl FibreSpec {
    pub fn new(kind: FibreKind, ext: ExtensionSpec) -> Self {
        Self {
            kind,
            ext,
            phi_injective: false,
        }
    }

    pub fn with_phi_injective(mut self, flag: bool) -> Self {
        self.phi_injective = flag;
        self
    }

    pub fn algebra(&self) -> Result<TruncatedAlgebra, InvariantError> {
        Ok(TruncatedAlgebra::new(self.ext.clone())?)
    }
}

impl fmt::Display for FibreSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.kind, self.ext)
    }
}

impl FromStr for FibreSpec {
    type Err = InvariantError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, ext) = s.trim().split_once('@').ok_or_else(|| {
            InvariantError::Parse(format!("expected `<KIND>@p=<p>;e=<...>`, got `{s}`"))
        })?;
        Ok(Self::new(kind.trim().parse()?, ext.parse()?))
    }
}

/// `p = 2` and the fibre is `SL₂^r × torus`.
pub fn is_unusual(f: &FibreSpec) -> bool {
    f.ext.p() == 2 && matches!(f.kind, FibreKind::Sl2PowerTimesTorus { .. })
}

fn reductive(f: &FibreSpec) -> Result<(), InvariantError> {
    if f.kind == FibreKind::Borel2 {
        return Err(InvariantError::Unsupported(
            "Borel2 is not a reductive fibre".into(),
        ));
    }
    Ok(())
}

/// `ℓ` for one fibre. Unusual fibres require the injectivity hypothesis.
pub fn fibre_ell(f: &FibreSpec) -> Result<usize, InvariantError> {
    reductive(f)?;
    if f.kind.is_commutative() {
        return Ok(1);
    }
    let alg = f.algebra()?;
    if is_unusual(f) {
        if !f.phi_injective {
            return Err(InvariantError::HypothesisUnmet(format!(
                "unusual fibre {f} needs --phi-injective"
            )));
        }
        return Ok(unusual_class_invariant(&alg)?);
    }
    Ok(alg.nilpotency_index() - 1)
}

/// Where an upper bound on the class comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UpperBoundSource {
    /// A torus: the radical is commutative.
    Commutative,
    /// `[U₁, Uᵢ] ⊆ U_{i+1}` for the `𝔪`-adic filtration.
    MaximalIdealFiltration,
    /// The `R_r` filtration cut out by `I_r`, `J_r`.
    SquaresIdealFiltration,
}

/// Upper bound on the class and its source. Unlike [`fibre_ell`] this does
/// not consult the injectivity flag.
pub fn class_upper_bound(f: &FibreSpec) -> Result<(usize, UpperBoundSource), InvariantError> {
    reductive(f)?;
    if f.kind.is_commutative() {
        return Ok((1, UpperBoundSource::Commutative));
    }
    let alg = f.algebra()?;
    if is_unusual(f) {
        Ok((
            unusual_class_invariant(&alg)?,
            UpperBoundSource::SquaresIdealFiltration,
        ))
    } else {
        Ok((
            alg.nilpotency_index() - 1,
            UpperBoundSource::MaximalIdealFiltration,
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassBounds {
    pub upper: usize,
    pub upper_source: UpperBoundSource,
    pub witness_lower: usize,
    /// Lower and upper bounds coincide.
    pub proved: bool,
}

/// Ideal-theoretic upper bound together with a verified commutator witness.
pub fn class_bounds(f: &FibreSpec) -> Result<(ClassBounds, ClassCertificate), InvariantError> {
    let (upper, upper_source) = class_upper_bound(f)?;
    let cert = class_certificate(f)?;
    let witness_lower = cert.lower_bound;
    if witness_lower > upper {
        return Err(InvariantError::Internal(format!(
            "witness lower bound {witness_lower} exceeds upper bound {upper} for {f}"
        )));
    }
    Ok((
        ClassBounds {
            upper,
            upper_source,
            witness_lower,
            proved: witness_lower == upper,
        },
        cert,
    ))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentBounds {
    pub lemma41: u32,
    /// Only for matrix models GL(r), tori and SL₂/PGL₂ via their 2×2 shape.
    pub lemma44: Option<RankBound>,
}

pub fn exponent_bounds(f: &FibreSpec) -> Result<ExponentBounds, InvariantError> {
    let alg = f.algebra()?;
    let size = f.kind.group_tag().matrix_size();
    let lemma44 = match f.kind {
        FibreKind::Gl(_) | FibreKind::Torus(_) => Some(lemma44_exponent_bound(&f.ext, size)),
        _ => None,
    };
    Ok(ExponentBounds {
        lemma41: lemma41_exponent_bound(&alg),
        lemma44,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FibreReport {
    pub kind: String,
    pub ext: String,
    pub phi_injective: bool,
    pub commutative: bool,
    pub unusual: bool,
    pub ell: usize,
    pub class_bounds: ClassBounds,
    pub exponent_bounds: ExponentBounds,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AggregateBounds {
    pub class_upper: usize,
    pub class_lower: usize,
    pub proved: bool,
}

/// The computed invariants for a list of fibres.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub fibres: Vec<FibreReport>,
    #[serde(rename = "N")]
    pub n: usize,
    /// Certificate for a fibre attaining `N`.
    pub witness: CertificateJson,
    pub bounds: AggregateBounds,
    pub conjectural: Vec<CoxeterData>,
}

/// `N = max ℓᵢ` with per-fibre breakdown, certificates and bounds.
pub fn predict_class(fibres: &[FibreSpec]) -> Result<InvariantReport, InvariantError> {
    if fibres.iter().all(|f| f.kind.is_commutative()) {
        return Err(InvariantError::HypothesisUnmet(
            "non-commutative hypothesis: at least one non-torus fibre is required".into(),
        ));
    }
    let mut reports = Vec::with_capacity(fibres.len());
    let mut best: Option<(usize, ClassCertificate)> = None;
    let mut conjectural = Vec::new();
    for f in fibres {
        let ell = fibre_ell(f)?;
        let (bounds, cert) = class_bounds(f)?;
        if bounds.upper != ell || bounds.witness_lower != ell {
            return Err(InvariantError::Internal(format!(
                "{f}: bounds {}..={} do not pin ell={ell}",
                bounds.witness_lower, bounds.upper
            )));
        }
        if best.as_ref().is_none_or(|(n, _)| ell > *n) {
            best = Some((ell, cert));
        }
        if let Ok(d) = coxeter_question_data(&f.kind, &f.ext) {
            conjectural.push(d);
        }
        reports.push(FibreReport {
            kind: f.kind.to_string(),
            ext: f.ext.to_string(),
            phi_injective: f.phi_injective,
            commutative: f.kind.is_commutative(),
            unusual: is_unusual(f),
            ell,
            class_bounds: bounds,
            exponent_bounds: exponent_bounds(f)?,
        });
    }
    let (n, cert) = best.expect("at least one fibre");
    let class_upper = reports.iter().map(|r| r.class_bounds.upper).max().unwrap();
    let class_lower = reports
        .iter()
        .map(|r| r.class_bounds.witness_lower)
        .max()
        .unwrap();
    Ok(InvariantReport {
        fibres: reports,
        n,
        witness: cert.to_json(),
        bounds: AggregateBounds {
            class_upper,
            class_lower,
            proved: class_upper == class_lower,
        },
        conjectural,
    })
}
