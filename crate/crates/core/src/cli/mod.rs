//! The `bellkit` command line: `analyze`, `fit`, `verify-paper` and `schmidt`.
//!
//! Exit codes: 0 success, 2 parse error, 3 validation error, 4 golden-check
//! failure, 5 non-convergence under `--strict-converge`.

pub mod report;
pub mod schema;
pub mod verify;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::bellstats::{chsh, singles_factorization, Experiment, ExperimentDataset};
use crate::entanglement::{
    canonical_iso_of, evolution_between, operator_schmidt, operator_schmidt_general, schmidt_state_with_tol,
    EntanglementError, Isomorphism, RANK_TOL,
};
use crate::modelfit::{
    animal_acts_counts_json, animal_acts_json, animal_acts_model_json, fit_basis, fit_state, paper_fixture,
    probabilities_from_model, FitConfig, ModelError, ObservableModel, Provenance, StateVector,
};
use report::{
    EvolutionVerdict, FitSummary, InputDigest, MeasurementVerdict, Report, ReportProvenance, SchmidtListing,
    SinglesCheck, StateFitSummary,
};
use schema::{to_canonical_json, DatasetFile, MeasurementBlock, ModelFile, OperatorFile, SchemaError, StateFile};

pub const DEFAULT_SEED: u64 = 20_160_131;

/// Input token naming the embedded count tables (or the embedded model).
pub const PAPER_TOKEN: &str = "paper";
/// Input token naming the embedded three-decimal probability tables.
pub const PAPER_ROUNDED_TOKEN: &str = "paper-rounded";

#[derive(Debug, Parser)]
#[command(name = "bellkit", version, about = "Bell-test statistics and entanglement analysis for coincidence data")]
pub struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Relative singular-value threshold for Schmidt ranks.
    #[arg(long, global = true, default_value_t = RANK_TOL)]
    pub tolerance: f64,
    /// Reject unknown fields in input files.
    #[arg(long, global = true)]
    pub strict: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Expectation values, CHSH and marginal-law rows for a dataset.
    Analyze(AnalyzeArgs),
    /// Fit eigenbases (and, without --state, a state) to a dataset.
    Fit(FitArgs),
    /// Run the golden checks against the embedded data.
    VerifyPaper(VerifyArgs),
    /// Schmidt decomposition of a state or operator.
    Schmidt(SchmidtArgs),
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Dataset file, or `paper` / `paper-rounded`.
    pub file: String,
    /// Model file (or `paper`) for entanglement verdicts.
    #[arg(long)]
    pub model: Option<String>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Dataset file, or `paper` / `paper-rounded`.
    pub file: String,
    /// State file, model file, or `paper`; omitted means fit the state too.
    #[arg(long)]
    pub state: Option<String>,
    #[arg(long, env = "BELLKIT_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = 64)]
    pub restarts: usize,
    /// Sweeps per restart.
    #[arg(long, default_value_t = 2000)]
    pub max_iterations: usize,
    /// Write the fitted model here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Exit with code 5 if any eigenbasis fit fails to converge.
    #[arg(long)]
    pub strict_converge: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Check this dataset instead of the embedded one.
    #[arg(long)]
    pub dataset: Option<String>,
    #[arg(long, env = "BELLKIT_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("subject").required(true).args(["state", "operator"])))]
pub struct SchmidtArgs {
    /// State file, model file, or `paper`.
    #[arg(long)]
    pub state: Option<String>,
    /// Operator file, or `paper` for the embedded operator of --experiment.
    #[arg(long)]
    pub operator: Option<String>,
    #[arg(long, value_enum, default_value_t = IsoChoice::Canonical)]
    pub iso: IsoChoice,
    /// Experiment whose model defines `--iso from-model` and `--operator paper`.
    #[arg(long, default_value = "AB")]
    pub experiment: Experiment,
    /// Model file (or `paper`) for `--iso from-model`.
    #[arg(long, default_value = PAPER_TOKEN)]
    pub model: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum IsoChoice {
    Canonical,
    FromModel,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Schema(#[from] SchemaError),
    #[error("{0}")]
    Invalid(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Schema(e) if e.is_parse_error() => 2,
            CliError::Io { .. } => 2,
            _ => 3,
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<EntanglementError> for CliError {
    fn from(e: EntanglementError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

/// A finished command: the report and the exit code it implies.
#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub exit_code: u8,
    /// Outcome labels per experiment, for text rendering.
    pub labels: Option<[[String; 4]; 4]>,
}

impl Outcome {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => to_canonical_json(&self.report),
            Format::Text => self.report.to_text(self.labels.as_ref()),
        }
    }
}

struct Input {
    text: String,
    digest: InputDigest,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Reads a file, or an embedded text when `token` names one; embedded inputs
/// are recorded as `embedded:<file name>`.
fn read_input(token: &str, embedded: &[(&str, &str, &'static str)]) -> Result<Input, CliError> {
    let (path, text) = match embedded.iter().find(|(name, _, _)| *name == token) {
        Some((_, file, text)) => (format!("embedded:{file}"), text.to_string()),
        None => (
            token.to_string(),
            std::fs::read_to_string(token).map_err(|source| CliError::Io {
                path: token.to_string(),
                source,
            })?,
        ),
    };
    Ok(Input {
        digest: InputDigest {
            path,
            sha256: sha256_hex(text.as_bytes()),
        },
        text,
    })
}

fn load_dataset(token: &str, strict: bool, warnings: &mut Vec<String>) -> Result<(ExperimentDataset, InputDigest), CliError> {
    let input = read_input(
        token,
        &[
            (PAPER_TOKEN, "animal_acts_counts.json", animal_acts_counts_json()),
            (PAPER_ROUNDED_TOKEN, "animal_acts.json", animal_acts_json()),
        ],
    )?;
    let (file, w) = DatasetFile::parse(&input.text, token, strict)?;
    warnings.extend(w);
    Ok((file.to_dataset(token)?, input.digest))
}

struct LoadedModel {
    state: StateVector,
    models: Vec<(Experiment, ObservableModel)>,
}

impl LoadedModel {
    fn get(&self, exp: Experiment) -> Option<&ObservableModel> {
        self.models.iter().find(|(e, _)| *e == exp).map(|(_, m)| m)
    }
}

fn load_model(token: &str, strict: bool, warnings: &mut Vec<String>) -> Result<(LoadedModel, InputDigest), CliError> {
    let input = read_input(token, &[(PAPER_TOKEN, "animal_acts_model.json", animal_acts_model_json())])?;
    if token == PAPER_TOKEN {
        let f = paper_fixture();
        let models = Experiment::ALL.iter().map(|&e| (e, f.model(e).clone())).collect();
        return Ok((LoadedModel { state: f.state, models }, input.digest));
    }
    let (raw, w) = ModelFile::parse(&input.text, token, strict)?;
    warnings.extend(w);
    let file = raw.with_errata_applied().map_err(|e| CliError::Invalid(format!("{token}: {e}")))?;
    let state = file.state(Provenance::User)?;
    let models = file.models(token)?;
    Ok((LoadedModel { state, models }, input.digest))
}

/// A state from a state file, a model file, or the embedded model.
fn load_state(token: &str, strict: bool, warnings: &mut Vec<String>) -> Result<(StateVector, InputDigest), CliError> {
    if token == PAPER_TOKEN {
        let (m, digest) = load_model(token, strict, warnings)?;
        return Ok((m.state, digest));
    }
    let input = read_input(token, &[])?;
    let looks_like_model = serde_json::from_str::<serde_json::Value>(&input.text)
        .map(|v| v.get("measurements").is_some())
        .unwrap_or(false);
    if looks_like_model {
        let (m, digest) = load_model(token, strict, warnings)?;
        return Ok((m.state, digest));
    }
    let (file, w): (StateFile, _) = schema::parse_json(&input.text, token, strict)?;
    warnings.extend(w);
    Ok((file.to_state(Provenance::User)?, input.digest))
}

fn dataset_labels(ds: &ExperimentDataset) -> [[String; 4]; 4] {
    Experiment::ALL.map(|e| ds.table(e).labels().clone())
}

fn provenance(inputs: Vec<InputDigest>, seed: Option<u64>, rank_tol: f64) -> ReportProvenance {
    ReportProvenance {
        tool: report::TOOL.into(),
        version: report::VERSION.into(),
        inputs,
        seed,
        rank_tol,
    }
}

fn check_tolerance(tol: f64) -> Result<(), CliError> {
    if tol > 0.0 && tol < 1.0 {
        Ok(())
    } else {
        Err(CliError::Invalid(format!("--tolerance must lie in (0, 1), got {tol}")))
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    check_tolerance(cli.tolerance)?;
    match &cli.command {
        Command::Analyze(a) => analyze(a, cli),
        Command::Fit(a) => fit(a, cli),
        Command::VerifyPaper(a) => verify_paper(a, cli),
        Command::Schmidt(a) => schmidt(a, cli),
    }
}

fn analyze(args: &AnalyzeArgs, cli: &Cli) -> Result<Outcome, CliError> {
    let mut warnings = Vec::new();
    let (ds, digest) = load_dataset(&args.file, cli.strict, &mut warnings)?;
    let mut inputs = vec![digest];
    let mut measurements = Vec::new();
    let mut evolutions = Vec::new();
    if let Some(token) = &args.model {
        let (model, digest) = load_model(token, cli.strict, &mut warnings)?;
        inputs.push(digest);
        (measurements, evolutions) = entanglement_verdicts(&model, cli.tolerance)?;
    }
    let mut report = Report::new("analyze", provenance(inputs, None, cli.tolerance));
    report.dataset = Some(ds.name.clone());
    report.chsh = Some(chsh(&ds));
    if ds.singles().is_some() {
        for exp in Experiment::ALL {
            let rows = singles_factorization(&ds, exp).map_err(|e| CliError::Invalid(e.to_string()))?;
            report.singles.push(SinglesCheck { experiment: exp, rows });
        }
    }
    report.measurements = measurements;
    report.evolutions = evolutions;
    report.warnings = warnings;
    Ok(Outcome {
        report,
        exit_code: 0,
        labels: Some(dataset_labels(&ds)),
    })
}

fn entanglement_verdicts(
    model: &LoadedModel,
    rank_tol: f64,
) -> Result<(Vec<MeasurementVerdict>, Vec<EvolutionVerdict>), CliError> {
    let canonical = Isomorphism::canonical();
    let mut measurements = Vec::new();
    for (exp, m) in &model.models {
        let own = canonical_iso_of(m)?;
        for (iso, name) in [(&canonical, "canonical".to_string()), (&own, format!("from-model {exp}"))] {
            let d = operator_schmidt(m.operator(), iso, rank_tol)?;
            measurements.push(MeasurementVerdict {
                experiment: *exp,
                isomorphism: name,
                coefficients: d.coefficients.to_vec(),
                rank: d.rank,
                product: d.is_product(),
                degree: d.degree(),
            });
        }
    }
    let mut evolutions = Vec::new();
    for (i, (src_exp, src)) in model.models.iter().enumerate() {
        for (dst_exp, dst) in &model.models[i + 1..] {
            let u = evolution_between(src, dst)?;
            let own = canonical_iso_of(src)?;
            for (iso, name) in [(&canonical, "canonical".to_string()), (&own, format!("from-model {src_exp}"))] {
                let d = operator_schmidt_general(&u.matrix, iso, rank_tol)?;
                evolutions.push(EvolutionVerdict {
                    source: *src_exp,
                    target: *dst_exp,
                    isomorphism: name,
                    rank: d.rank,
                    product: d.is_product(),
                });
            }
        }
    }
    Ok((measurements, evolutions))
}

fn fit(args: &FitArgs, cli: &Cli) -> Result<Outcome, CliError> {
    let mut warnings = Vec::new();
    let (ds, digest) = load_dataset(&args.file, cli.strict, &mut warnings)?;
    let mut inputs = vec![digest];
    let cfg = FitConfig {
        seed: args.seed,
        restarts: args.restarts,
        max_iterations: args.max_iterations,
        ..FitConfig::default()
    };
    let mut report = Report::new("fit", provenance(Vec::new(), Some(args.seed), cli.tolerance));
    let state = match &args.state {
        Some(token) => {
            let (s, digest) = load_state(token, cli.strict, &mut warnings)?;
            inputs.push(digest);
            s
        }
        None => {
            let sf = fit_state(&ds, &cfg)?;
            report.state_fit = Some(StateFitSummary {
                objective: sf.objective,
                table_misfits: sf.table_misfits,
                converged: sf.converged,
                iterations: sf.iterations,
                restart: sf.restart,
                restarts_run: sf.restarts_run,
                state: sf.state.vector().to_polar_deg().iter().map(|p| [p.amplitude, p.phase_deg]).collect(),
            });
            if !sf.converged {
                warnings.push(format!(
                    "no product representation found: best objective {:.6e} exceeds {:e}",
                    sf.objective, cfg.target_misfit
                ));
            }
            sf.state
        }
    };
    let mut fitted = Vec::new();
    for exp in Experiment::ALL {
        let table = ds.table(exp);
        let r = fit_basis(&state, table, &cfg)?;
        let model = r.model.with_labels(table.labels().clone());
        report.fits.push(FitSummary {
            experiment: exp,
            misfit: r.misfit,
            converged: r.converged,
            iterations: r.iterations,
            restart: r.restart,
            restarts_run: r.restarts_run,
            target: table.normalized(),
            fitted: probabilities_from_model(&state, &model).probs(),
        });
        if !r.converged {
            warnings.push(format!("{exp}: no eigenbasis reached misfit {:e}", cfg.target_misfit));
        }
        fitted.push((exp, model));
    }
    if let Some(path) = &args.out {
        let file = ModelFile {
            schema_version: schema::SCHEMA_VERSION,
            name: format!("{}-fit", ds.name),
            rounded: false,
            state: StateFile::from_vector(state.vector()),
            measurements: fitted
                .iter()
                .map(|(e, m)| (e.label().to_string(), MeasurementBlock::from_model(m)))
                .collect(),
            errata: Vec::new(),
        };
        std::fs::write(path, to_canonical_json(&file)).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
    }
    let all_converged = report.fits.iter().all(|f| f.converged);
    report.provenance.inputs = inputs;
    report.dataset = Some(ds.name.clone());
    report.warnings = warnings;
    Ok(Outcome {
        report,
        exit_code: if args.strict_converge && !all_converged { 5 } else { 0 },
        labels: Some(dataset_labels(&ds)),
    })
}

fn verify_paper(args: &VerifyArgs, cli: &Cli) -> Result<Outcome, CliError> {
    let mut warnings = Vec::new();
    let fixture = paper_fixture();
    let token = args.dataset.as_deref().unwrap_or(PAPER_TOKEN);
    let (ds, digest) = load_dataset(token, cli.strict, &mut warnings)?;
    let rows = verify::golden_checks(&ds, &fixture, cli.tolerance, args.seed);
    let failed = rows.iter().any(|r| !r.passed());
    let mut report = Report::new("verify-paper", provenance(vec![digest], Some(args.seed), cli.tolerance));
    report.dataset = Some(ds.name.clone());
    report.checks = rows;
    report.warnings = warnings;
    Ok(Outcome {
        report,
        exit_code: if failed { 4 } else { 0 },
        labels: None,
    })
}

fn schmidt(args: &SchmidtArgs, cli: &Cli) -> Result<Outcome, CliError> {
    let mut warnings = Vec::new();
    let mut inputs = Vec::new();
    let iso = match args.iso {
        IsoChoice::Canonical => Isomorphism::canonical(),
        IsoChoice::FromModel => {
            let (m, digest) = load_model(&args.model, cli.strict, &mut warnings)?;
            inputs.push(digest);
            let model = m
                .get(args.experiment)
                .ok_or_else(|| CliError::Invalid(format!("{}: no experiment {}", args.model, args.experiment)))?;
            let basis = canonical_iso_of(model)?.matrix().clone();
            Isomorphism::from_unitary(format!("from-model {}", args.experiment), basis)?
        }
    };
    let listing = if let Some(token) = &args.state {
        let (s, digest) = load_state(token, cli.strict, &mut warnings)?;
        inputs.insert(0, digest);
        let d = schmidt_state_with_tol(s.vector(), &iso, cli.tolerance)?;
        SchmidtListing {
            subject: format!("state {token}"),
            isomorphism: iso.name().to_string(),
            coefficients: d.coefficients.to_vec(),
            rank: d.rank,
            product: d.is_product(),
            degree: None,
        }
    } else {
        let token = args.operator.as_deref().expect("clap enforces one subject");
        let (op, digest, subject) = if token == PAPER_TOKEN {
            let (m, digest) = load_model(token, cli.strict, &mut warnings)?;
            let op = m.get(args.experiment).expect("embedded model is complete").operator().clone();
            (op, digest, format!("operator {} ({})", token, args.experiment))
        } else {
            let input = read_input(token, &[])?;
            let (file, w): (OperatorFile, _) = schema::parse_json(&input.text, token, cli.strict)?;
            warnings.extend(w);
            let op = file.to_matrix().map_err(|e| CliError::Invalid(format!("{token}: {e}")))?;
            (op, input.digest, format!("operator {token}"))
        };
        if !inputs.contains(&digest) {
            inputs.insert(0, digest);
        }
        let d = operator_schmidt(&op, &iso, cli.tolerance)?;
        SchmidtListing {
            subject,
            isomorphism: iso.name().to_string(),
            coefficients: d.coefficients.to_vec(),
            rank: d.rank,
            product: d.is_product(),
            degree: Some(d.degree()),
        }
    };
    let mut report = Report::new("schmidt", provenance(inputs, None, cli.tolerance));
    report.decompositions.push(listing);
    report.warnings = warnings;
    Ok(Outcome {
        report,
        exit_code: 0,
        labels: None,
    })
}

/// Parses `args` (program name first) and runs the command, returning the
/// rendered output and exit code. Usage errors yield code 2.
pub fn run_args<I, T>(args: I) -> (String, String, u8)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 { (text, String::new(), 0) } else { (String::new(), text, 2) };
        }
    };
    match run(&cli) {
        Ok(outcome) => (outcome.render(cli.format), String::new(), outcome.exit_code),
        Err(e) => (String::new(), format!("error: {e}\n"), e.exit_code()),
    }
}

pub fn main() -> ExitCode {
    let (out, err, code) = run_args(std::env::args_os());
    print!("{out}");
    eprint!("{err}");
    ExitCode::from(code)
}
