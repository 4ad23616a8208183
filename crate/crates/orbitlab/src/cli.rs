//! Argument parsing and dispatch. Each subcommand reads a JSON input (file
//! or standard input), writes a JSON result, and maps the outcome to an exit
//! code.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use orbitlab_core::experiments::{lookup, scenario_catalog, ExperimentConfig, ExperimentKind, Outcome, Scenario};
use orbitlab_core::kempfness::{ClosednessStatus, FlowConfig, KempfNess};
use orbitlab_core::subalgebra::{reductivity_verdict, ReductivityStatus};
use orbitlab_core::{
    lie_algebra_basis, orbit_dimension, stabilizer_subalgebra, GroupSpec, LieAlgebraBasis, RepVector,
    Representation, Tolerances,
};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::io::{self, IoError};
use crate::runner::{run_parallel, Metadata, RunError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Ok = 0,
    /// A mathematical assertion or prevalence bar failed.
    MathFailure = 1,
    /// Bad arguments, unreadable input, or an invalid configuration.
    ConfigError = 2,
    /// Too many (or, for single computations, any) inconclusive verdicts.
    Inconclusive = 3,
}

#[derive(Debug, Parser)]
#[command(name = "orbitlab", version, about = "Orbit closedness and stabilizer experiments for reductive group actions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether the orbit through a vector is closed
    Closedness(PointArgs),
    /// Check whether a vector is minimal (vanishing moment)
    Minimal(PointArgs),
    /// Stabilizer subalgebra of a vector
    Stabilizer(PointArgs),
    /// Reductivity of a subalgebra, given by a basis or as a stabilizer
    Reductive(PointArgs),
    /// Orbit dimension at a vector
    OrbitDim(PointArgs),
    /// Run a randomized experiment or the example pipeline
    Experiment(ExperimentArgs),
    /// List the built-in scenarios
    Catalog(CommonArgs),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub spread: Option<f64>,
    /// Relative moment tolerance of the flow
    #[arg(long)]
    pub moment_tol: Option<f64>,
    /// Relative singular-value cutoff for rank decisions
    #[arg(long)]
    pub rank_tol: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Output path (standard output when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads for experiment trials (0 = one per core)
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

#[derive(Debug, Clone, Args)]
pub struct PointArgs {
    /// JSON input (standard input when omitted or `-`)
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ExperimentArgs {
    /// Built-in scenario name (see `catalog`)
    #[arg(long)]
    pub scenario: Option<String>,
    /// Experiment kind, defaulting to the scenario's own
    #[arg(long)]
    pub kind: Option<String>,
    /// Experiment configuration file; command-line flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Core(#[from] orbitlab_core::Error),
    #[error(transparent)]
    Run(#[from] RunError),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Io(IoError::Parse { .. }) => "parse",
            CliError::Io(_) => "io",
            CliError::Core(orbitlab_core::Error::Config(_)) | CliError::Run(RunError::Core(orbitlab_core::Error::Config(_))) => {
                "config"
            }
            CliError::Core(_) | CliError::Run(RunError::Core(_)) => "invalid_argument",
            CliError::Run(RunError::Pool(_)) => "runtime",
        }
    }
}

fn report_error(kind: &str, message: &str) {
    let obj = json!({ "error": { "kind": kind, "message": message } });
    eprintln!("{obj}");
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_cli<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::Ok;
            }
            let text = e.render().to_string();
            report_error("usage", text.trim());
            return ExitCode::ConfigError;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            report_error(e.kind(), &e.to_string());
            ExitCode::ConfigError
        }
    }
}

/// Input of the point-based subcommands.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PointInput {
    representation: Representation,
    /// Defaults to the representation's group.
    #[serde(default)]
    acting_group: Option<GroupSpec>,
    vector: RepVector,
    #[serde(default)]
    flow: FlowConfig,
    #[serde(default)]
    tolerances: Tolerances,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BasisInput {
    basis: LieAlgebraBasis,
    #[serde(default)]
    tolerances: Tolerances,
}

fn apply_tolerances(common: &CommonArgs, flow: &mut FlowConfig, tol: &mut Tolerances) {
    if let Some(x) = common.moment_tol {
        flow.moment_tolerance = x;
    }
    if let Some(x) = common.max_iters {
        flow.max_iterations = x;
    }
    if let Some(x) = common.rank_tol {
        tol.rank = x;
    }
}

fn check_tolerances(tol: &Tolerances) -> Result<(), CliError> {
    if !(tol.rank > 0.0 && tol.rank < 1.0) {
        return Err(CliError::Usage(format!("rank tolerance must lie in (0, 1), got {}", tol.rank)));
    }
    Ok(())
}

fn read_point(args: &PointArgs) -> Result<PointInput, CliError> {
    let mut input: PointInput = io::read_json(args.input.as_deref())?;
    apply_tolerances(&args.common, &mut input.flow, &mut input.tolerances);
    check_tolerances(&input.tolerances)?;
    input.flow.validate()?;
    input.representation.validate(&input.tolerances)?;
    input.representation.check_vector(&input.vector, &input.tolerances)?;
    Ok(input)
}

fn acting_group(input: &PointInput) -> &GroupSpec {
    input.acting_group.as_ref().unwrap_or(&input.representation.group)
}

fn emit_json<T: Serialize>(common: &CommonArgs, value: &T) -> Result<(), CliError> {
    if common.format == Format::Csv {
        return Err(CliError::Usage(String::from("--format csv is only available for experiment reports")));
    }
    io::write_text(common.out.as_deref(), &io::to_pretty_json(value))?;
    Ok(())
}

fn dispatch(command: Command) -> Result<ExitCode, CliError> {
    match command {
        Command::Closedness(args) => closedness(&args),
        Command::Minimal(args) => minimal(&args),
        Command::Stabilizer(args) => stabilizer(&args),
        Command::Reductive(args) => reductive(&args),
        Command::OrbitDim(args) => orbit_dim(&args),
        Command::Experiment(args) => experiment(&args),
        Command::Catalog(args) => catalog(&args),
    }
}

fn closedness(args: &PointArgs) -> Result<ExitCode, CliError> {
    let input = read_point(args)?;
    let group = acting_group(&input);
    let kn = KempfNess::new(&input.representation, group, &input.tolerances)?;
    let verdict = kn.verdict(&input.vector, &input.flow);
    emit_json(
        &args.common,
        &json!({
            "command": "closedness",
            "acting_group": group,
            "flow": input.flow,
            "tolerances": input.tolerances,
            "verdict": verdict,
        }),
    )?;
    Ok(match verdict.status {
        ClosednessStatus::Inconclusive => ExitCode::Inconclusive,
        _ => ExitCode::Ok,
    })
}

fn minimal(args: &PointArgs) -> Result<ExitCode, CliError> {
    let input = read_point(args)?;
    let group = acting_group(&input);
    let kn = KempfNess::new(&input.representation, group, &input.tolerances)?;
    let moment = kn.moment(&input.vector);
    let relative = kn.relative_moment(&input.vector);
    let threshold = input.flow.moment_tolerance;
    emit_json(
        &args.common,
        &json!({
            "command": "minimal",
            "acting_group": group,
            "minimal": relative <= threshold,
            "relative_moment": relative,
            "threshold": threshold,
            "moment": moment,
            "tolerances": input.tolerances,
        }),
    )?;
    Ok(ExitCode::Ok)
}

fn stabilizer(args: &PointArgs) -> Result<ExitCode, CliError> {
    let input = read_point(args)?;
    let group = acting_group(&input);
    let algebra = lie_algebra_basis(group)?;
    let stab = stabilizer_subalgebra(&input.representation, &algebra, &input.vector, &input.tolerances)?;
    emit_json(
        &args.common,
        &json!({
            "command": "stabilizer",
            "acting_group": group,
            "dim": stab.algebra.dim(),
            "ambiguous": stab.ambiguous,
            "basis": stab.algebra,
            "tolerances": input.tolerances,
        }),
    )?;
    Ok(if stab.ambiguous { ExitCode::Inconclusive } else { ExitCode::Ok })
}

fn orbit_dim(args: &PointArgs) -> Result<ExitCode, CliError> {
    let input = read_point(args)?;
    let group = acting_group(&input);
    let algebra = lie_algebra_basis(group)?;
    let od = orbit_dimension(&input.representation, &algebra, &input.vector, &input.tolerances)?;
    let ambiguous = od.ambiguous;
    emit_json(
        &args.common,
        &json!({
            "command": "orbit-dim",
            "acting_group": group,
            "orbit": od,
            "tolerances": input.tolerances,
        }),
    )?;
    Ok(if ambiguous { ExitCode::Inconclusive } else { ExitCode::Ok })
}

fn reductive(args: &PointArgs) -> Result<ExitCode, CliError> {
    let value: serde_json::Value = io::read_json(args.input.as_deref())?;
    let origin = || args.input.as_deref().map_or_else(|| String::from("standard input"), |p| p.display().to_string());
    let (basis, mut tol, source) = if value.get("basis").is_some() {
        let input: BasisInput =
            serde_json::from_value(value).map_err(|source| IoError::Parse { origin: origin(), source })?;
        (input.basis, input.tolerances, "basis")
    } else {
        let mut input: PointInput =
            serde_json::from_value(value).map_err(|source| IoError::Parse { origin: origin(), source })?;
        apply_tolerances(&args.common, &mut input.flow, &mut input.tolerances);
        check_tolerances(&input.tolerances)?;
        input.representation.validate(&input.tolerances)?;
        input.representation.check_vector(&input.vector, &input.tolerances)?;
        let algebra = lie_algebra_basis(acting_group(&input))?;
        let stab = stabilizer_subalgebra(&input.representation, &algebra, &input.vector, &input.tolerances)?;
        (stab.algebra, input.tolerances, "stabilizer")
    };
    if let Some(x) = args.common.rank_tol {
        tol.rank = x;
    }
    check_tolerances(&tol)?;
    let report = reductivity_verdict(&basis, &tol);
    let code = match report.verdict {
        ReductivityStatus::Inconclusive => ExitCode::Inconclusive,
        _ => ExitCode::Ok,
    };
    emit_json(
        &args.common,
        &json!({
            "command": "reductive",
            "source": source,
            "report": report,
            "tolerances": tol,
        }),
    )?;
    Ok(code)
}

/// Configuration file contents: a full configuration whose scenario may be
/// given by catalog name.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum ScenarioRef {
    Named(String),
    Inline(Box<Scenario>),
}

fn load_config_file(path: &Path) -> Result<ExperimentConfig, CliError> {
    let mut value: serde_json::Value = io::read_json(Some(path))?;
    let origin = path.display().to_string();
    if let Some(obj) = value.as_object_mut() {
        if let Some(s) = obj.get("scenario").cloned() {
            let scenario = match serde_json::from_value::<ScenarioRef>(s)
                .map_err(|source| IoError::Parse { origin: origin.clone(), source })?
            {
                ScenarioRef::Named(name) => lookup(&name)
                    .ok_or_else(|| CliError::Usage(format!("unknown scenario {name:?}")))?
                    .scenario,
                ScenarioRef::Inline(s) => *s,
            };
            obj.insert(String::from("scenario"), serde_json::to_value(scenario).expect("scenario serializes"));
        }
    }
    Ok(serde_json::from_value(value).map_err(|source| IoError::Parse { origin, source })?)
}

/// Builds the effective configuration: catalog or file, then flags.
pub fn experiment_config(args: &ExperimentArgs) -> Result<ExperimentConfig, String> {
    experiment_config_inner(args).map_err(|e| e.to_string())
}

fn experiment_config_inner(args: &ExperimentArgs) -> Result<ExperimentConfig, CliError> {
    let mut config = match (&args.config, &args.scenario) {
        (Some(path), _) => {
            let mut c = load_config_file(path)?;
            if let Some(name) = &args.scenario {
                c.scenario = lookup(name)
                    .ok_or_else(|| CliError::Usage(format!("unknown scenario {name:?}")))?
                    .scenario;
            }
            c
        }
        (None, Some(name)) => ExperimentConfig::from_catalog(name)
            .ok_or_else(|| CliError::Usage(format!("unknown scenario {name:?}")))?,
        (None, None) => return Err(CliError::Usage(String::from("experiment needs --scenario or --config"))),
    };
    if let Some(k) = &args.kind {
        config.kind = ExperimentKind::parse(k).ok_or_else(|| {
            let names: Vec<&str> = ExperimentKind::ALL.iter().map(|k| k.name()).collect();
            CliError::Usage(format!("unknown kind {k:?}; expected one of {}", names.join(", ")))
        })?;
    }
    let c = &args.common;
    if let Some(x) = c.seed {
        config.seed = x;
    }
    if let Some(x) = c.trials {
        config.trials = x;
    }
    if let Some(x) = c.spread {
        config.spread = x;
    }
    apply_tolerances(c, &mut config.flow, &mut config.tolerances);
    check_tolerances(&config.tolerances)?;
    Ok(config)
}

#[derive(Serialize)]
struct Envelope<'a, T> {
    #[serde(flatten)]
    body: &'a T,
    metadata: &'a Metadata,
}

fn csv_path(out: &Path) -> PathBuf {
    out.with_extension("csv")
}

fn experiment(args: &ExperimentArgs) -> Result<ExitCode, CliError> {
    let config = experiment_config_inner(args)?;
    let (report, meta) = run_parallel(config, args.common.workers)?;
    let json = io::to_pretty_json(&Envelope { body: &report, metadata: &meta });
    match (args.common.format, &args.common.out) {
        (Format::Json, out) => io::write_text(out.as_deref(), &json)?,
        (Format::Csv, Some(out)) => {
            io::write_text(Some(out), &json)?;
            io::write_text(Some(&csv_path(out)), &io::trials_csv(&report.trials)?)?;
        }
        (Format::Csv, None) => io::write_text(None, &io::trials_csv(&report.trials)?)?,
    }
    Ok(match report.summary.outcome {
        Outcome::Pass => ExitCode::Ok,
        Outcome::MathFailure => ExitCode::MathFailure,
        Outcome::ExcessiveInconclusive => ExitCode::Inconclusive,
    })
}

fn catalog(args: &CommonArgs) -> Result<ExitCode, CliError> {
    let entries: Vec<serde_json::Value> = scenario_catalog()
        .into_iter()
        .map(|e| {
            json!({
                "name": e.name,
                "default_kind": e.default_kind,
                "description": e.description,
                "scenario": e.scenario,
            })
        })
        .collect();
    emit_json(args, &entries)?;
    Ok(ExitCode::Ok)
}
