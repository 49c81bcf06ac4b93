//! Brute-force oracles over finite coefficient fields.
//!
//! Over `F_{p^d}` the unipotent radical becomes a finite `p`-group. These
//! routines compute its lower central series and element orders directly, as
//! data to compare with the closed-form invariants.

mod count;
mod grid;

use std::collections::HashSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, CoefficientField, ExtensionSpec, TruncatedAlgebra};
use crate::invariants::{
    coxeter_question_data, imprimitive_borel_witness, lemma41_exponent_bound, CoxeterData,
    FibreKind, InvariantError,
};
use crate::matgroup::{
    commutator, group_order, p_power_order, random_element, standard_generators, GroupTag,
    MatGroupError, UnipotentElement, UnipotentEnumeration,
};

pub use grid::{default_grid, parse_grid, run_grid, run_row, GridRow, RowReport, RowStatus};

/// Default cap on the number of group points enumerated.
pub const DEFAULT_BUDGET: u128 = 1 << 20;
/// Default number of sampled points when a group exceeds the budget.
pub const DEFAULT_SAMPLES: u64 = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    MatGroup(#[from] MatGroupError),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
    #[error("group has {count} points, over the budget of {budget}")]
    BudgetExceeded { count: u128, budget: u128 },
    #[error("usage: {0}")]
    Usage(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl From<ExperimentError> for MatGroupError {
    fn from(e: ExperimentError) -> Self {
        MatGroupError::Internal(e.to_string())
    }
}

fn budget_error(e: MatGroupError) -> ExperimentError {
    match e {
        MatGroupError::BudgetExceeded { count, budget } => {
            ExperimentError::BudgetExceeded { count, budget }
        }
        other => other.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExponentMode {
    /// Exhaustive within budget, sampled otherwise.
    Auto,
    Exhaustive,
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub group: String,
    pub ext: ExtensionSpec,
    pub field_degree: u32,
    #[serde(with = "count")]
    pub budget: u128,
    pub seed: u64,
    pub samples: u64,
    pub mode: ExponentMode,
    /// Coefficient-field degrees compared by [`stabilization_check`].
    pub stabilization_degrees: Vec<u32>,
}

impl ExperimentConfig {
    pub fn new(tag: GroupTag, ext: ExtensionSpec) -> Self {
        Self {
            group: tag.to_string(),
            ext,
            field_degree: 1,
            budget: DEFAULT_BUDGET,
            seed: 0,
            samples: DEFAULT_SAMPLES,
            mode: ExponentMode::Auto,
            stabilization_degrees: vec![1, 2],
        }
    }

    pub fn field_degree(mut self, d: u32) -> Self {
        self.field_degree = d;
        self
    }

    pub fn budget(mut self, b: u128) -> Self {
        self.budget = b;
        self
    }

    pub fn seed(mut self, s: u64) -> Self {
        self.seed = s;
        self
    }

    pub fn samples(mut self, n: u64) -> Self {
        self.samples = n;
        self
    }

    pub fn mode(mut self, m: ExponentMode) -> Self {
        self.mode = m;
        self
    }

    pub fn stabilization_degrees(mut self, ds: Vec<u32>) -> Self {
        self.stabilization_degrees = ds;
        self
    }

    pub fn tag(&self) -> Result<GroupTag, ExperimentError> {
        Ok(self.group.parse()?)
    }

    pub fn algebra(&self) -> Result<TruncatedAlgebra, ExperimentError> {
        let field = CoefficientField::new(self.ext.p(), self.field_degree)?;
        Ok(TruncatedAlgebra::with_field(self.ext.clone(), field)?)
    }

    /// Number of group points over `F_{p^d}`.
    pub fn group_order(&self) -> Result<u128, ExperimentError> {
        Ok(group_order(self.tag()?, &self.algebra()?))
    }
}

/// A subgroup kept as its generators and full element set.
struct Subgroup {
    gens: Vec<UnipotentElement>,
    elements: HashSet<UnipotentElement>,
}

impl Subgroup {
    fn trivial(tag: GroupTag, alg: &TruncatedAlgebra) -> Self {
        Self {
            gens: Vec::new(),
            elements: HashSet::from([UnipotentElement::identity(tag, alg)]),
        }
    }

    /// Adds generators one at a time, skipping those already inside. Old
    /// elements only need multiplying by the new generator; fresh elements
    /// are multiplied by every generator.
    fn extend(&mut self, new: Vec<UnipotentElement>, cap: u128) -> Result<(), ExperimentError> {
        for s in new {
            if self.elements.contains(&s) {
                continue;
            }
            self.gens.push(s);
            let s = self.gens.last().unwrap();
            let mut frontier = Vec::new();
            for g in &self.elements {
                let h = g * s;
                if !self.elements.contains(&h) {
                    frontier.push(h);
                }
            }
            let mut fresh: HashSet<UnipotentElement> = frontier.iter().cloned().collect();
            while let Some(g) = frontier.pop() {
                for t in &self.gens {
                    let h = &g * t;
                    if !self.elements.contains(&h) && fresh.insert(h.clone()) {
                        frontier.push(h);
                    }
                }
            }
            self.elements.extend(fresh);
            if self.elements.len() as u128 > cap {
                return Err(ExperimentError::Internal(
                    "subgroup closure outgrew the ambient group".into(),
                ));
            }
        }
        Ok(())
    }

    fn contains(&self, g: &UnipotentElement) -> bool {
        self.elements.contains(g)
    }

    fn order(&self) -> u128 {
        self.elements.len() as u128
    }
}

/// Normal closure in `G = ⟨g_gens⟩` of the subgroup generated by `seeds`.
fn normal_closure(
    g_gens: &[UnipotentElement],
    seeds: Vec<UnipotentElement>,
    tag: GroupTag,
    alg: &TruncatedAlgebra,
    cap: u128,
) -> Result<Subgroup, ExperimentError> {
    let mut h = Subgroup::trivial(tag, alg);
    h.extend(seeds, cap)?;
    loop {
        let mut fresh = Vec::new();
        for t in &h.gens {
            for g in g_gens {
                let c = t.conjugate_by(g)?;
                if !h.contains(&c) && !fresh.contains(&c) {
                    fresh.push(c);
                }
            }
        }
        if fresh.is_empty() {
            return Ok(h);
        }
        h.extend(fresh, cap)?;
    }
}

/// Lower central series of the finite group of points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesResult {
    /// `|D₀| = |G|, |D₁|, …`, ending with 1.
    pub sizes: Vec<u128>,
    /// Number of nontrivial terms.
    pub class: usize,
    /// One nontrivial generator of each `D_m`, `m ≥ 1`, as matrix text.
    pub level_witnesses: Vec<String>,
    /// Every term's order divides `|G|`.
    pub lagrange_ok: bool,
}

/// `D₀ = G`, `D_{m+1}` the normal closure of `[g, t]` over generators `g` of
/// `G` and `t` of `D_m`; the class is the number of nontrivial terms.
pub fn brute_class(cfg: &ExperimentConfig) -> Result<SeriesResult, ExperimentError> {
    let tag = cfg.tag()?;
    let alg = cfg.algebra()?;
    let count = group_order(tag, &alg);
    if count > cfg.budget {
        return Err(ExperimentError::BudgetExceeded {
            count,
            budget: cfg.budget,
        });
    }
    let g_gens = standard_generators(tag, &alg);
    let mut g = Subgroup::trivial(tag, &alg);
    g.extend(g_gens.clone(), count)?;
    if g.order() != count {
        return Err(ExperimentError::Internal(format!(
            "standard generators span {} of {count} points",
            g.order()
        )));
    }
    let mut sizes = vec![count];
    let mut level_witnesses = Vec::new();
    let mut current = g.gens.clone();
    while !current.is_empty() {
        let mut seeds: Vec<UnipotentElement> = Vec::new();
        for x in &g_gens {
            for t in &current {
                let c = commutator(x, t)?;
                if !c.is_identity() && !seeds.contains(&c) {
                    seeds.push(c);
                }
            }
        }
        if seeds.is_empty() {
            sizes.push(1);
            break;
        }
        let d = normal_closure(&g_gens, seeds, tag, &alg, count)?;
        level_witnesses.push(d.gens[0].matrix().to_string());
        sizes.push(d.order());
        current = d.gens;
    }
    if count == 1 {
        sizes = vec![1];
    }
    let class = sizes.iter().filter(|&&s| s > 1).count();
    let lagrange_ok = sizes.iter().all(|&s| count.is_multiple_of(s))
        && sizes.windows(2).all(|w| w[1] < w[0] || w[0] == 1);
    Ok(SeriesResult {
        sizes,
        class,
        level_witnesses,
        lagrange_ok,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentResult {
    /// `s` with `p^s` the largest element order found.
    pub max_order_exponent: u32,
    pub max_order: u64,
    /// A point attaining the maximum, as matrix text.
    pub witness: String,
    pub exhaustive: bool,
    pub examined: u64,
    #[serde(with = "count")]
    pub group_order: u128,
    /// `examined / group_order`.
    pub coverage: f64,
}

/// Largest `p`-power element order, exhaustively when the group fits the
/// budget and by seeded sampling otherwise (unless the mode forbids it).
pub fn brute_exponent(cfg: &ExperimentConfig) -> Result<ExponentResult, ExperimentError> {
    let tag = cfg.tag()?;
    let alg = cfg.algebra()?;
    let count = group_order(tag, &alg);
    let p = alg.characteristic() as u64;
    let exhaustive = match cfg.mode {
        ExponentMode::Exhaustive => true,
        ExponentMode::Sampled => false,
        ExponentMode::Auto => count <= cfg.budget,
    };
    let (best_s, witness, examined) = if exhaustive {
        let e = UnipotentEnumeration::new(tag, &alg, cfg.budget).map_err(budget_error)?;
        // ties resolve to the smallest index so that the witness is deterministic
        let (s, idx) = (0..e.len())
            .into_par_iter()
            .map(|i| (p_power_order(&e.get(i)), i))
            .reduce(
                || (0, 0),
                |a, b| {
                    if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                        b
                    } else {
                        a
                    }
                },
            );
        (s, e.get(idx), e.len())
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let points: Vec<UnipotentElement> = (0..cfg.samples.max(1))
            .map(|_| random_element(tag, &alg, &mut rng))
            .collect();
        let orders: Vec<u32> = points.par_iter().map(p_power_order).collect();
        let (i, &s) = orders
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
            .unwrap();
        (s, points[i].clone(), points.len() as u64)
    };
    Ok(ExponentResult {
        max_order_exponent: best_s,
        max_order: p.pow(best_s),
        witness: witness.matrix().to_string(),
        exhaustive,
        examined,
        group_order: count,
        coverage: examined as f64 / count as f64,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BorelRecord {
    pub ext: String,
    pub field_degree: u32,
    pub primitive: bool,
    pub extension_exponent: u32,
    /// Brute-forced exponent `s` of the Borel-model radical.
    pub exponent: u32,
    pub max_order: u64,
    /// `e` for primitive extensions, `e + 1` otherwise.
    pub expected: u32,
    pub dichotomy_holds: bool,
    /// `p`-power order of the explicit imprimitive witness.
    pub witness_order: Option<u32>,
    pub witness: Option<String>,
    pub lemma41: u32,
    pub coxeter: CoxeterData,
    /// GL₂ radical exponent over the same field when it fits the budget.
    pub gl2_exponent: Option<u32>,
    pub discrepancies: Vec<String>,
    pub brute: ExponentResult,
}

/// Exponent of the 2×2 Borel-model radical compared with `e` / `e + 1`, the
/// `e + s` bound and the conjectural Coxeter prediction.
pub fn borel_exponent_experiment(cfg: &ExperimentConfig) -> Result<BorelRecord, ExperimentError> {
    if cfg.tag()? != GroupTag::Borel2 {
        return Err(ExperimentError::Usage(format!(
            "Borel experiment needs group Borel2, got {}",
            cfg.group
        )));
    }
    let alg = cfg.algebra()?;
    let brute = brute_exponent(cfg)?;
    let e = cfg.ext.extension_exponent();
    let primitive = cfg.ext.is_primitive();
    let expected = if primitive { e } else { e + 1 };
    let (witness_order, witness) = match imprimitive_borel_witness(&alg) {
        Ok(w) => (Some(p_power_order(&w)), Some(w.matrix().to_string())),
        Err(_) => (None, None),
    };
    let coxeter = coxeter_question_data(&FibreKind::Gl(2), &cfg.ext)?;
    let gl2_cfg = ExperimentConfig {
        group: GroupTag::Gl(2).to_string(),
        mode: ExponentMode::Exhaustive,
        ..cfg.clone()
    };
    let gl2_exponent = brute_exponent(&gl2_cfg).ok().map(|r| r.max_order_exponent);
    let mut discrepancies = Vec::new();
    if brute.max_order_exponent != coxeter.predicted_exponent {
        discrepancies.push(format!(
            "conjectural prediction {} vs brute force {}",
            coxeter.predicted_exponent, brute.max_order_exponent
        ));
    }
    if brute.max_order_exponent > coxeter.e_plus_s_bound {
        discrepancies.push(format!(
            "e+s bound {} exceeded by brute force {}",
            coxeter.e_plus_s_bound, brute.max_order_exponent
        ));
    }
    if let Some(g) = gl2_exponent {
        if g != brute.max_order_exponent {
            discrepancies.push(format!(
                "GL2 radical exponent {g} differs from Borel radical exponent {}",
                brute.max_order_exponent
            ));
        }
    }
    let dichotomy_holds =
        brute.max_order_exponent == expected && witness_order.is_none_or(|w| w == expected);
    Ok(BorelRecord {
        ext: cfg.ext.to_string(),
        field_degree: cfg.field_degree,
        primitive,
        extension_exponent: e,
        exponent: brute.max_order_exponent,
        max_order: brute.max_order,
        expected,
        dichotomy_holds,
        witness_order,
        witness,
        lemma41: lemma41_exponent_bound(&alg),
        coxeter,
        gl2_exponent,
        discrepancies,
        brute,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizationResult {
    pub degrees: Vec<u32>,
    /// Class per degree, `None` when that degree exceeds the budget.
    pub classes: Vec<Option<usize>>,
    /// Exhaustive exponent per degree, `None` when over budget.
    pub exponents: Vec<Option<u32>>,
    pub compared: usize,
    pub stabilized: bool,
}

/// Compares brute-force class and exponent across coefficient-field degrees.
/// Degrees over budget are skipped; at least two must fit.
pub fn stabilization_check(cfg: &ExperimentConfig) -> Result<StabilizationResult, ExperimentError> {
    let degrees = cfg.stabilization_degrees.clone();
    if degrees.len() < 2 {
        return Err(ExperimentError::Usage(
            "stabilization needs at least two coefficient-field degrees".into(),
        ));
    }
    let mut classes = Vec::new();
    let mut exponents = Vec::new();
    let mut first_refusal = None;
    for &d in &degrees {
        let c = cfg.clone().field_degree(d).mode(ExponentMode::Exhaustive);
        match brute_class(&c) {
            Ok(r) => {
                classes.push(Some(r.class));
                exponents.push(Some(brute_exponent(&c)?.max_order_exponent));
            }
            Err(e @ ExperimentError::BudgetExceeded { .. }) => {
                first_refusal.get_or_insert(e);
                classes.push(None);
                exponents.push(None);
            }
            Err(e) => return Err(e),
        }
    }
    let present: Vec<_> = classes
        .iter()
        .zip(&exponents)
        .filter(|(c, _)| c.is_some())
        .collect();
    if present.len() < 2 {
        return Err(first_refusal.expect("a degree was refused"));
    }
    let stabilized = present.windows(2).all(|w| w[0] == w[1]);
    Ok(StabilizationResult {
        degrees,
        compared: present.len(),
        classes,
        exponents,
        stabilized,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(tag: &str, ext: &str) -> ExperimentConfig {
        ExperimentConfig::new(tag.parse().unwrap(), ext.parse().unwrap())
    }

    #[test]
    fn class_examples() {
        let r = brute_class(&cfg("SL2", "p=2;e=1")).unwrap();
        assert_eq!(r.class, 1);
        assert_eq!(r.sizes, vec![8, 1]);
        let r = brute_class(&cfg("SL2", "p=2;e=1,1")).unwrap();
        assert_eq!(r.class, 2);
        assert!(r.lagrange_ok);
        assert_eq!(r.level_witnesses.len(), 1);
        assert_eq!(brute_class(&cfg("GL2", "p=2;e=2")).unwrap().class, 3);
        assert_eq!(brute_class(&cfg("T1", "p=2;e=2")).unwrap().class, 1);
        assert_eq!(brute_class(&cfg("GL2", "p=3;e=1")).unwrap().class, 2);
        assert_eq!(brute_class(&cfg("PGL2", "p=2;e=2")).unwrap().class, 3);
    }

    #[test]
    fn class_refuses_over_budget() {
        let c = cfg("GL2", "p=2;e=1,1").field_degree(2);
        assert_eq!(
            brute_class(&c).unwrap_err(),
            ExperimentError::BudgetExceeded {
                count: 1 << 24,
                budget: DEFAULT_BUDGET
            }
        );
    }

    #[test]
    fn exponent_examples() {
        let r = brute_exponent(&cfg("GL2", "p=2;e=1,1")).unwrap();
        assert_eq!(r.max_order, 4);
        assert!(r.exhaustive);
        assert_eq!(r.examined, 4096);
        assert_eq!(brute_exponent(&cfg("T1", "p=2;e=2")).unwrap().max_order, 4);
        assert_eq!(brute_exponent(&cfg("T1", "p=2;e=1")).unwrap().max_order, 2);
        assert_eq!(brute_exponent(&cfg("GL2", "p=2;e=1")).unwrap().max_order, 2);
    }

    #[test]
    fn sampling_never_exceeds_exhaustive() {
        for (tag, ext) in [
            ("GL2", "p=2;e=1,1"),
            ("Borel2", "p=2;e=2"),
            ("SL2", "p=3;e=1"),
        ] {
            let full = brute_exponent(&cfg(tag, ext)).unwrap();
            for seed in 0..4 {
                let s = brute_exponent(
                    &cfg(tag, ext)
                        .mode(ExponentMode::Sampled)
                        .samples(64)
                        .seed(seed),
                )
                .unwrap();
                assert!(!s.exhaustive);
                assert!(s.max_order <= full.max_order);
            }
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let c = cfg("GL2", "p=2;e=1,1,1").samples(200).seed(3);
        let a = brute_exponent(&c).unwrap();
        let b = brute_exponent(&c).unwrap();
        assert_eq!(a, b);
        assert!(!a.exhaustive);
        assert_eq!(
            brute_exponent(&c.clone().mode(ExponentMode::Exhaustive)).unwrap_err(),
            ExperimentError::BudgetExceeded {
                count: 1 << 28,
                budget: DEFAULT_BUDGET
            }
        );
    }

    #[test]
    fn borel_examples() {
        let r = borel_exponent_experiment(&cfg("Borel2", "p=2;e=1")).unwrap();
        assert_eq!((r.exponent, r.expected), (1, 1));
        assert!(r.dichotomy_holds);
        let r = borel_exponent_experiment(&cfg("Borel2", "p=2;e=1,1")).unwrap();
        assert_eq!((r.exponent, r.max_order), (2, 4));
        assert_eq!(r.witness_order, Some(2));
        assert!(r.dichotomy_holds);
        assert!(borel_exponent_experiment(&cfg("GL2", "p=2;e=1")).is_err());
    }

    #[test]
    fn stabilization_examples() {
        let r = stabilization_check(&cfg("SL2", "p=2;e=1")).unwrap();
        assert!(r.stabilized);
        assert_eq!(r.classes, vec![Some(1), Some(1)]);
        let r = stabilization_check(&cfg("T1", "p=2;e=1,1")).unwrap();
        assert!(r.stabilized);
        assert!(matches!(
            stabilization_check(&cfg("SL2", "p=2;e=1").stabilization_degrees(vec![1])),
            Err(ExperimentError::Usage(_))
        ));
    }
}
