//! Grid rows: one fibre, its predictions and the finite-field oracle data.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize};

use super::{
    borel_exponent_experiment, brute_class, brute_exponent, BorelRecord, ExperimentConfig,
    ExperimentError, ExponentResult, DEFAULT_BUDGET,
};
use crate::invariants::{
    class_bounds, exponent_bounds, fibre_ell, is_unusual, CertificateJson, ClassBounds,
    ExponentBounds, FibreKind, FibreSpec, InvariantError,
};

/// Shipped default grid, also installed at `grids/default.json`.
pub fn default_grid() -> &'static str {
    include_str!("../../grids/default.json")
}

fn fibre_from_text<'de, D: Deserializer<'de>>(d: D) -> Result<FibreSpec, D::Error> {
    let s = String::deserialize(d)?;
    s.parse().map_err(serde::de::Error::custom)
}

fn fibre_to_text<S: serde::Serializer>(f: &FibreSpec, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&f.to_string())
}

fn default_degrees() -> Vec<u32> {
    vec![1, 2]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridRow {
    #[serde(deserialize_with = "fibre_from_text", serialize_with = "fibre_to_text")]
    pub fibre: FibreSpec,
    #[serde(default)]
    pub phi_injective: bool,
    /// Coefficient-field degrees `d` of `F_{p^d}` for the oracles.
    #[serde(default = "default_degrees")]
    pub field_degrees: Vec<u32>,
    /// Per-row budget; the global budget when absent.
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        with = "super::count::option"
    )]
    pub budget: Option<u128>,
}

impl GridRow {
    pub fn spec(&self) -> FibreSpec {
        self.fibre.clone().with_phi_injective(self.phi_injective)
    }
}

/// Parses a grid document (a JSON list of rows). Errors carry the line and
/// column reported by the JSON parser.
pub fn parse_grid(text: &str) -> Result<Vec<GridRow>, serde_json::Error> {
    let rows: Vec<GridRow> = serde_json::from_str(text)?;
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum RowStatus {
    Ok,
    HypothesisUnmet,
    BudgetExceeded,
    Inconclusive,
    Mismatch,
}

impl std::fmt::Display for RowStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            RowStatus::Ok => "OK",
            RowStatus::HypothesisUnmet => "HYPOTHESIS-UNMET",
            RowStatus::BudgetExceeded => "BUDGET-EXCEEDED",
            RowStatus::Inconclusive => "INCONCLUSIVE",
            RowStatus::Mismatch => "MISMATCH",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowConfig {
    pub fibre: String,
    pub phi_injective: bool,
    pub field_degrees: Vec<u32>,
    #[serde(with = "super::count")]
    pub budget: u128,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub ell: usize,
    pub unusual: bool,
    pub class_bounds: ClassBounds,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeClass {
    pub field_degree: u32,
    pub class: Option<usize>,
    pub sizes: Option<Vec<u128>>,
    /// Group order when refused for exceeding the budget.
    #[serde(with = "super::count::option")]
    pub refused_count: Option<u128>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentRow {
    pub field_degree: u32,
    pub result: ExponentResult,
    pub bounds: ExponentBounds,
    /// The observed exponent is at most every applicable bound.
    pub bounds_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowReport {
    pub config: RowConfig,
    pub status: RowStatus,
    pub prediction: Option<Prediction>,
    pub class: Vec<DegreeClass>,
    pub exponent: Option<ExponentRow>,
    pub borel: Option<BorelRecord>,
    pub stabilized: Option<bool>,
    pub witness: Option<CertificateJson>,
    pub notes: Vec<String>,
    pub wall_ms: Option<u64>,
}

fn experiment_config(row: &GridRow, budget: u128, seed: u64) -> ExperimentConfig {
    ExperimentConfig::new(row.fibre.kind.group_tag(), row.fibre.ext.clone())
        .budget(budget)
        .seed(seed)
        .stabilization_degrees(row.field_degrees.clone())
}

/// Evaluates one row. Hypothesis failures and budget refusals become row
/// statuses; other errors propagate.
pub fn run_row(
    row: &GridRow,
    budget: u128,
    seed: u64,
    timings: bool,
) -> Result<RowReport, ExperimentError> {
    let start = Instant::now();
    let budget = row.budget.unwrap_or(budget);
    let spec = row.spec();
    let cfg = experiment_config(row, budget, seed);
    let mut report = RowReport {
        config: RowConfig {
            fibre: row.fibre.to_string(),
            phi_injective: row.phi_injective,
            field_degrees: row.field_degrees.clone(),
            budget,
            seed,
        },
        status: RowStatus::Ok,
        prediction: None,
        class: Vec::new(),
        exponent: None,
        borel: None,
        stabilized: None,
        witness: None,
        notes: Vec::new(),
        wall_ms: None,
    };
    if spec.kind == FibreKind::Borel2 {
        run_borel_row(&mut report, row, &cfg)?;
    } else {
        run_class_row(&mut report, &spec, row, &cfg)?;
    }
    if timings {
        report.wall_ms = Some(start.elapsed().as_millis() as u64);
    }
    Ok(report)
}

fn run_borel_row(
    report: &mut RowReport,
    row: &GridRow,
    cfg: &ExperimentConfig,
) -> Result<(), ExperimentError> {
    let d = row.field_degrees.first().copied().unwrap_or(1);
    match borel_exponent_experiment(&cfg.clone().field_degree(d)) {
        Ok(rec) => {
            if !rec.dichotomy_holds {
                report.status = RowStatus::Mismatch;
                report.notes.push(format!(
                    "exponent {} where {} was expected",
                    rec.exponent, rec.expected
                ));
            }
            report.notes.extend(rec.discrepancies.iter().cloned());
            report.borel = Some(rec);
        }
        Err(ExperimentError::BudgetExceeded { count, budget }) => {
            report.status = RowStatus::BudgetExceeded;
            report
                .notes
                .push(format!("{count} points over budget {budget}"));
        }
        Err(e) => return Err(e),
    }
    Ok(())
}

fn run_class_row(
    report: &mut RowReport,
    spec: &FibreSpec,
    row: &GridRow,
    cfg: &ExperimentConfig,
) -> Result<(), ExperimentError> {
    let ell = match fibre_ell(spec) {
        Ok(ell) => ell,
        Err(InvariantError::HypothesisUnmet(msg)) => {
            report.status = RowStatus::HypothesisUnmet;
            report.notes.push(msg);
            return Ok(());
        }
        Err(e) => return Err(e.into()),
    };
    let (bounds, cert) = class_bounds(spec)?;
    report.witness = Some(cert.to_json());
    report.prediction = Some(Prediction {
        ell,
        unusual: is_unusual(spec),
        class_bounds: bounds,
    });

    let per_degree: Vec<Result<DegreeClass, ExperimentError>> = row
        .field_degrees
        .par_iter()
        .map(|&d| match brute_class(&cfg.clone().field_degree(d)) {
            Ok(r) => Ok(DegreeClass {
                field_degree: d,
                class: Some(r.class),
                sizes: Some(r.sizes),
                refused_count: None,
            }),
            Err(ExperimentError::BudgetExceeded { count, .. }) => Ok(DegreeClass {
                field_degree: d,
                class: None,
                sizes: None,
                refused_count: Some(count),
            }),
            Err(e) => Err(e),
        })
        .collect();
    report.class = per_degree.into_iter().collect::<Result<_, _>>()?;

    let computed: Vec<usize> = report.class.iter().filter_map(|c| c.class).collect();
    if computed.len() >= 2 {
        report.stabilized = Some(computed.windows(2).all(|w| w[0] == w[1]));
    }

    let ebounds = exponent_bounds(spec)?;
    let d = row.field_degrees.first().copied().unwrap_or(1);
    let exp = brute_exponent(&cfg.clone().field_degree(d))?;
    let s = exp.max_order_exponent;
    let bounds_ok = s <= ebounds.lemma41 && ebounds.lemma44.is_none_or(|b| s <= b.effective);
    if !bounds_ok {
        report
            .notes
            .push(format!("exponent {s} exceeds a lemma bound"));
    }
    report.exponent = Some(ExponentRow {
        field_degree: d,
        result: exp,
        bounds: ebounds,
        bounds_ok,
    });

    report.status = if computed.is_empty() {
        report
            .notes
            .push("no coefficient field fits the budget".into());
        RowStatus::BudgetExceeded
    } else if report.stabilized == Some(false) {
        report
            .notes
            .push("class differs across coefficient fields".into());
        RowStatus::Inconclusive
    } else if computed[0] != ell {
        report.notes.push(format!(
            "brute-force class {} vs predicted {ell}",
            computed[0]
        ));
        RowStatus::Mismatch
    } else if !bounds_ok {
        RowStatus::Mismatch
    } else {
        RowStatus::Ok
    };
    Ok(())
}

/// Runs every row concurrently; the result keeps grid order.
pub fn run_grid(
    rows: &[GridRow],
    budget: Option<u128>,
    seed: u64,
    timings: bool,
) -> Result<Vec<RowReport>, ExperimentError> {
    let budget = budget.unwrap_or(DEFAULT_BUDGET);
    rows.par_iter()
        .map(|r| run_row(r, budget, seed, timings))
        .collect()
}
