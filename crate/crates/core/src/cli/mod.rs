//! Command-line front end.
//!
//! Exit codes: 0 success, 1 internal failure, 2 usage error, 3 theorem
//! hypothesis violated, 4 budget refusal.

mod render;

use std::ffi::OsString;
use std::io::Write;
use std::time::Instant;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::algebra::{AlgebraError, ExtensionSpec, TruncatedAlgebra};
use crate::experiments::{
    borel_exponent_experiment, brute_class, brute_exponent, parse_grid, run_grid,
    stabilization_check, BorelRecord, ExperimentConfig, ExperimentError, ExponentMode,
    ExponentResult, RowReport, RowStatus, SeriesResult, StabilizationResult, DEFAULT_BUDGET,
    DEFAULT_SAMPLES,
};
use crate::invariants::{
    class_bounds, exponent_bounds, gln_superdiagonal_witness, imprimitive_borel_witness,
    is_unusual, predict_class, ClassBounds, ExponentBounds, FibreSpec, InvariantError,
};
use crate::matgroup::{p_power_order, GroupTag, MatGroupError, MatrixJson};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_HYPOTHESIS: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

/// Environment variable overriding the enumeration budget.
pub const BUDGET_ENV: &str = "WEILRAD_BUDGET";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Tsv,
    Pretty,
}

#[derive(Debug, Parser)]
#[command(
    name = "weilrad",
    version,
    about = "Class and exponent of unipotent radicals of Weil restrictions"
)]
struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for every sampled path.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Enumeration budget in group points (overrides WEILRAD_BUDGET).
    #[arg(long, global = true)]
    budget: Option<u128>,
    /// Record wall-clock times in the output.
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct FibreArgs {
    /// `<KIND>@p=<p>;e=<e1,...>`, KIND one of SL2, SL2^r*T<s>, GL<n>, PGL2, T<rank>.
    #[arg(long = "fibre", required = true, value_parser = parse_fibre)]
    fibres: Vec<FibreSpec>,
    /// Asserts the injectivity hypothesis for the nearest preceding unusual fibre.
    #[arg(long, action = ArgAction::Count)]
    phi_injective: u8,
}

#[derive(Debug, Args)]
struct GroupArgs {
    /// GL<n>, SL2, PGL2, T<rank> or Borel2.
    #[arg(long, value_parser = parse_tag)]
    group: GroupTag,
    /// `p=<p>;e=<e1,...>`.
    #[arg(long, value_parser = parse_ext)]
    ext: ExtensionSpec,
    /// Degree `d` of the coefficient field `F_{p^d}`.
    #[arg(long, default_value_t = 1)]
    field_degree: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WitnessKind {
    Class,
    Superdiagonal,
    Borel,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Nilpotency class N = max ℓ over the fibres, with certificates.
    Predict(FibreArgs),
    /// Class and exponent bounds per fibre.
    Bounds(FibreArgs),
    /// An explicit witness matrix or commutator chain.
    Witness {
        #[command(flatten)]
        fibre: FibreArgs,
        #[arg(long, value_enum, default_value_t = WitnessKind::Class)]
        kind: WitnessKind,
    },
    /// Lower central series of the finite group of points.
    BruteClass {
        #[command(flatten)]
        group: GroupArgs,
        /// Also compare against these field degrees (comma separated).
        #[arg(long, value_delimiter = ',')]
        stabilize: Vec<u32>,
    },
    /// Largest element order of the finite group of points.
    Exponent {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
        mode: ModeArg,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: u64,
    },
    /// Exponent of the 2×2 Borel-model radical against e / e+1.
    Borel {
        #[arg(long, value_parser = parse_ext)]
        ext: ExtensionSpec,
        #[arg(long, default_value_t = 1)]
        field_degree: u32,
    },
    /// Runs a grid of configurations (the shipped default grid if omitted).
    Report {
        #[arg(long)]
        grid: Option<std::path::PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Auto,
    Exhaustive,
    Sampled,
}

fn parse_fibre(s: &str) -> Result<FibreSpec, String> {
    s.parse().map_err(|e: InvariantError| e.to_string())
}

fn parse_tag(s: &str) -> Result<GroupTag, String> {
    s.parse().map_err(|e: MatGroupError| e.to_string())
}

fn parse_ext(s: &str) -> Result<ExtensionSpec, String> {
    s.parse().map_err(|e: AlgebraError| e.to_string())
}

/// A failed command: exit code and diagnostic.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<AlgebraError> for Failure {
    fn from(e: AlgebraError) -> Self {
        let code = match e {
            AlgebraError::Parse(_)
            | AlgebraError::NotPrime(_)
            | AlgebraError::UnsupportedField(_)
            | AlgebraError::TooLarge(_)
            | AlgebraError::UnsupportedCharacteristic(_) => EXIT_USAGE,
            _ => EXIT_INTERNAL,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<MatGroupError> for Failure {
    fn from(e: MatGroupError) -> Self {
        match e {
            MatGroupError::Algebra(a) => a.into(),
            MatGroupError::BudgetExceeded { .. } => Self {
                code: EXIT_BUDGET,
                message: e.to_string(),
            },
            MatGroupError::InvalidTag(_) | MatGroupError::Shape(_) => Failure::usage(e.to_string()),
            other => Self {
                code: EXIT_INTERNAL,
                message: other.to_string(),
            },
        }
    }
}

impl From<InvariantError> for Failure {
    fn from(e: InvariantError) -> Self {
        match e {
            InvariantError::Algebra(a) => a.into(),
            InvariantError::MatGroup(m) => m.into(),
            InvariantError::HypothesisUnmet(_) => Self {
                code: EXIT_HYPOTHESIS,
                message: e.to_string(),
            },
            InvariantError::Parse(_)
            | InvariantError::Unsupported(_)
            | InvariantError::NoWitness(_) => Failure::usage(e.to_string()),
            InvariantError::Internal(_) => Self {
                code: EXIT_INTERNAL,
                message: e.to_string(),
            },
        }
    }
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Algebra(a) => a.into(),
            ExperimentError::MatGroup(m) => m.into(),
            ExperimentError::Invariant(i) => i.into(),
            ExperimentError::BudgetExceeded { .. } => Self {
                code: EXIT_BUDGET,
                message: e.to_string(),
            },
            ExperimentError::Usage(_) => Failure::usage(e.to_string()),
            ExperimentError::Internal(_) => Self {
                code: EXIT_INTERNAL,
                message: e.to_string(),
            },
        }
    }
}

/// Attaches each `--phi-injective` to the nearest preceding unusual fibre,
/// scanning the raw arguments in order.
fn attach_phi_injective(args: &[OsString], fibres: &mut [FibreSpec]) -> Result<(), Failure> {
    let mut seen = 0usize;
    let mut last_unusual: Option<usize> = None;
    let mut iter = args.iter().map(|a| a.to_string_lossy());
    while let Some(a) = iter.next() {
        if a == "--" {
            break;
        }
        let is_fibre = if a == "--fibre" {
            iter.next();
            true
        } else {
            a.starts_with("--fibre=")
        };
        if is_fibre {
            if seen < fibres.len() && is_unusual(&fibres[seen]) {
                last_unusual = Some(seen);
            }
            seen += 1;
        } else if a == "--phi-injective" {
            let i = last_unusual.ok_or_else(|| {
                Failure::usage("--phi-injective must follow an unusual fibre (SL2^r*T<s> with p=2)")
            })?;
            fibres[i].phi_injective = true;
        }
    }
    Ok(())
}

fn resolve_budget(flag: Option<u128>, env: Option<&str>) -> Result<u128, Failure> {
    if let Some(b) = flag {
        return Ok(b);
    }
    match env {
        Some(v) => v.trim().parse().map_err(|_| {
            Failure::usage(format!(
                "{BUDGET_ENV} must be a non-negative integer, got `{v}`"
            ))
        }),
        None => Ok(DEFAULT_BUDGET),
    }
}

#[derive(Debug, Serialize)]
struct BoundsLine {
    fibre: String,
    phi_injective: bool,
    #[serde(flatten)]
    class: ClassBounds,
    exponent: ExponentBounds,
}

#[derive(Debug, Serialize)]
struct WitnessLine {
    fibre: String,
    kind: &'static str,
    matrix: MatrixJson,
    text: String,
    order_exponent: u32,
}

/// Experiment output line.
#[derive(Debug, Serialize)]
struct ExperimentLine {
    config: ExperimentConfig,
    class: Option<SeriesResult>,
    exponent: Option<ExponentResult>,
    stabilized: Option<StabilizationResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    borel: Option<BorelRecord>,
    witness: Option<String>,
    wall_ms: Option<u64>,
}

#[derive(Debug, Serialize)]
pub(crate) struct ReportDocument {
    rows: Vec<RowReport>,
    summary: Summary,
}

#[derive(Debug, Default, Serialize)]
struct Summary {
    rows: usize,
    ok: usize,
    hypothesis_unmet: usize,
    budget_exceeded: usize,
    inconclusive: usize,
    mismatch: usize,
}

impl Summary {
    fn of(rows: &[RowReport]) -> Self {
        let mut s = Summary {
            rows: rows.len(),
            ..Default::default()
        };
        for r in rows {
            match r.status {
                RowStatus::Ok => s.ok += 1,
                RowStatus::HypothesisUnmet => s.hypothesis_unmet += 1,
                RowStatus::BudgetExceeded => s.budget_exceeded += 1,
                RowStatus::Inconclusive => s.inconclusive += 1,
                RowStatus::Mismatch => s.mismatch += 1,
            }
        }
        s
    }
}

/// Runs the CLI with the budget override read from the environment.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let env = std::env::var(BUDGET_ENV).ok();
    run_with_env(args, env.as_deref(), out, err)
}

/// Like [`run`] with the `WEILRAD_BUDGET` value passed explicitly.
pub fn run_with_env<I, T>(
    args: I,
    budget_env: Option<&str>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(rendered.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = err.write_all(rendered.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(cli, &args, budget_env) {
        Ok(text) => {
            if out.write_all(text.as_bytes()).is_err() {
                return EXIT_INTERNAL;
            }
            EXIT_OK
        }
        Err(f) => {
            let _ = writeln!(err, "weilrad: {}", f.message);
            f.code
        }
    }
}

fn experiment_config(g: &GroupArgs, budget: u128, seed: u64) -> ExperimentConfig {
    ExperimentConfig::new(g.group, g.ext.clone())
        .field_degree(g.field_degree)
        .budget(budget)
        .seed(seed)
}

fn execute(cli: Cli, args: &[OsString], budget_env: Option<&str>) -> Result<String, Failure> {
    let budget = resolve_budget(cli.budget, budget_env)?;
    let format = cli.format;
    let seed = cli.seed;
    let start = Instant::now();
    let wall = |timings: bool| timings.then(|| start.elapsed().as_millis() as u64);
    match cli.command {
        Command::Predict(mut f) => {
            attach_phi_injective(args, &mut f.fibres)?;
            let report = predict_class(&f.fibres)?;
            render::value(&report, format)
        }
        Command::Bounds(mut f) => {
            attach_phi_injective(args, &mut f.fibres)?;
            let mut lines = Vec::new();
            for spec in &f.fibres {
                let (class, _) = class_bounds(spec)?;
                lines.push(BoundsLine {
                    fibre: spec.to_string(),
                    phi_injective: spec.phi_injective,
                    class,
                    exponent: exponent_bounds(spec)?,
                });
            }
            render::lines(&lines, format)
        }
        Command::Witness { mut fibre, kind } => {
            attach_phi_injective(args, &mut fibre.fibres)?;
            let mut text = String::new();
            for spec in &fibre.fibres {
                text.push_str(&witness(spec, kind, format)?);
            }
            Ok(text)
        }
        Command::BruteClass { group, stabilize } => {
            let cfg = experiment_config(&group, budget, seed);
            let class = brute_class(&cfg)?;
            let stabilized = if stabilize.is_empty() {
                None
            } else {
                let mut degrees = vec![group.field_degree];
                degrees.extend(stabilize.iter().filter(|&&d| d != group.field_degree));
                Some(stabilization_check(
                    &cfg.clone().stabilization_degrees(degrees),
                )?)
            };
            let witness = class.level_witnesses.first().cloned();
            let line = ExperimentLine {
                config: cfg,
                class: Some(class),
                exponent: None,
                stabilized,
                borel: None,
                witness,
                wall_ms: wall(cli.timings),
            };
            render::lines(&[line], format)
        }
        Command::Exponent {
            group,
            mode,
            samples,
        } => {
            let mode = match mode {
                ModeArg::Auto => ExponentMode::Auto,
                ModeArg::Exhaustive => ExponentMode::Exhaustive,
                ModeArg::Sampled => ExponentMode::Sampled,
            };
            let cfg = experiment_config(&group, budget, seed)
                .mode(mode)
                .samples(samples);
            let exp = brute_exponent(&cfg)?;
            let line = ExperimentLine {
                config: cfg,
                class: None,
                witness: Some(exp.witness.clone()),
                exponent: Some(exp),
                stabilized: None,
                borel: None,
                wall_ms: wall(cli.timings),
            };
            render::lines(&[line], format)
        }
        Command::Borel { ext, field_degree } => {
            let cfg = ExperimentConfig::new(GroupTag::Borel2, ext)
                .field_degree(field_degree)
                .budget(budget)
                .seed(seed);
            let rec = borel_exponent_experiment(&cfg)?;
            let line = ExperimentLine {
                config: cfg,
                class: None,
                exponent: Some(rec.brute.clone()),
                stabilized: None,
                witness: rec.witness.clone(),
                borel: Some(rec),
                wall_ms: wall(cli.timings),
            };
            render::lines(&[line], format)
        }
        Command::Report { grid } => {
            let text = match &grid {
                Some(path) => std::fs::read_to_string(path)
                    .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?,
                None => crate::experiments::default_grid().to_string(),
            };
            let name = grid
                .as_ref()
                .map_or_else(|| "default grid".to_string(), |p| p.display().to_string());
            let rows = parse_grid(&text).map_err(|e| {
                Failure::usage(format!(
                    "malformed grid {name} at line {}, column {}: {e}",
                    e.line(),
                    e.column()
                ))
            })?;
            let rows = run_grid(&rows, Some(budget), seed, cli.timings)?;
            let doc = ReportDocument {
                summary: Summary::of(&rows),
                rows,
            };
            render::report(&doc, format)
        }
    }
}

fn witness(spec: &FibreSpec, kind: WitnessKind, format: Format) -> Result<String, Failure> {
    let alg = TruncatedAlgebra::new(spec.ext.clone())?;
    let (label, element) = match kind {
        WitnessKind::Class => {
            let (_, cert) = class_bounds(spec)?;
            cert.verify()?;
            return render::value(&cert.to_json(), format);
        }
        WitnessKind::Superdiagonal => ("superdiagonal", gln_superdiagonal_witness(&alg).element),
        WitnessKind::Borel => ("borel", imprimitive_borel_witness(&alg)?),
    };
    let line = WitnessLine {
        fibre: spec.to_string(),
        kind: label,
        matrix: element.matrix().to_json(),
        text: element.matrix().to_string(),
        order_exponent: p_power_order(&element),
    };
    render::value(&line, format)
}
