//! Machine-readable reports and their text rendering.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::bellstats::{ChshReport, Experiment, FactorizationRow};

pub const TOOL: &str = "bellkit";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportProvenance {
    pub tool: String,
    pub version: String,
    pub inputs: Vec<InputDigest>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub rank_tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SinglesCheck {
    pub experiment: Experiment,
    pub rows: Vec<FactorizationRow>,
}

/// Operator Schmidt verdict for one measurement under one isomorphism.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementVerdict {
    pub experiment: Experiment,
    pub isomorphism: String,
    pub coefficients: Vec<f64>,
    pub rank: usize,
    pub product: bool,
    pub degree: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolutionVerdict {
    pub source: Experiment,
    pub target: Experiment,
    pub isomorphism: String,
    pub rank: usize,
    pub product: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub experiment: Experiment,
    pub misfit: f64,
    pub converged: bool,
    pub iterations: usize,
    pub restart: usize,
    pub restarts_run: usize,
    pub target: [f64; 4],
    pub fitted: [f64; 4],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateFitSummary {
    pub objective: f64,
    pub table_misfits: [f64; 4],
    pub converged: bool,
    pub iterations: usize,
    pub restart: usize,
    pub restarts_run: usize,
    /// `[amplitude, phase in degrees]`.
    pub state: Vec<[f64; 2]>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Info,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub id: String,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measured: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub status: CheckStatus,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
}

impl CheckRow {
    /// Passes iff `|measured - expected| <= tolerance`.
    pub fn near(id: &str, name: impl Into<String>, measured: f64, expected: f64, tolerance: f64) -> Self {
        let ok = (measured - expected).abs() <= tolerance;
        CheckRow {
            id: id.into(),
            name: name.into(),
            measured: Some(measured),
            expected: Some(expected),
            tolerance: Some(tolerance),
            status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
            note: String::new(),
        }
    }

    /// Passes iff `measured <= bound`.
    pub fn at_most(id: &str, name: impl Into<String>, measured: f64, bound: f64) -> Self {
        CheckRow {
            id: id.into(),
            name: name.into(),
            measured: Some(measured),
            expected: None,
            tolerance: Some(bound),
            status: if measured <= bound { CheckStatus::Pass } else { CheckStatus::Fail },
            note: String::new(),
        }
    }

    pub fn flag(id: &str, name: impl Into<String>, ok: bool, note: impl Into<String>) -> Self {
        CheckRow {
            id: id.into(),
            name: name.into(),
            measured: None,
            expected: None,
            tolerance: None,
            status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
            note: note.into(),
        }
    }

    pub fn info(id: &str, name: impl Into<String>, note: impl Into<String>) -> Self {
        CheckRow {
            id: id.into(),
            name: name.into(),
            measured: None,
            expected: None,
            tolerance: None,
            status: CheckStatus::Info,
            note: note.into(),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    pub fn passed(&self) -> bool {
        self.status != CheckStatus::Fail
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchmidtListing {
    pub subject: String,
    pub isomorphism: String,
    pub coefficients: Vec<f64>,
    pub rank: usize,
    pub product: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub provenance: ReportProvenance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dataset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chsh: Option<ChshReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub singles: Vec<SinglesCheck>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub measurements: Vec<MeasurementVerdict>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub evolutions: Vec<EvolutionVerdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state_fit: Option<StateFitSummary>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fits: Vec<FitSummary>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckRow>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub decompositions: Vec<SchmidtListing>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl Report {
    pub fn new(command: &str, provenance: ReportProvenance) -> Self {
        Report {
            command: command.into(),
            provenance,
            dataset: None,
            chsh: None,
            singles: Vec::new(),
            measurements: Vec::new(),
            evolutions: Vec::new(),
            state_fit: None,
            fits: Vec::new(),
            checks: Vec::new(),
            decompositions: Vec::new(),
            warnings: Vec::new(),
        }
    }

    /// Text rendering. `labels` gives outcome names per experiment, if known.
    pub fn to_text(&self, labels: Option<&[[String; 4]; 4]>) -> String {
        let mut out = String::new();
        let p = &self.provenance;
        let _ = writeln!(out, "{} {} {}", p.tool, p.version, self.command);
        for input in &p.inputs {
            let _ = writeln!(out, "input   {} sha256:{}", input.path, input.sha256);
        }
        if let Some(seed) = p.seed {
            let _ = writeln!(out, "seed    {seed}");
        }
        if let Some(name) = &self.dataset {
            let _ = writeln!(out, "dataset {name}");
        }
        if let Some(c) = &self.chsh {
            render_chsh(&mut out, c);
        }
        if !self.singles.is_empty() {
            let _ = writeln!(out, "\njoint vs product of single-measurement probabilities");
            for s in &self.singles {
                for r in &s.rows {
                    let name = labels
                        .map(|l| l[s.experiment.index()][2 * (r.outcome.0 as usize - 1) + r.outcome.1 as usize - 1].clone())
                        .unwrap_or_else(|| format!("{}{}", r.outcome.0, r.outcome.1));
                    let _ = writeln!(
                        out,
                        "  {:<5} {:<16} {:.4} vs {:.4}  |diff| {:.4}",
                        s.experiment.label(),
                        name,
                        r.joint,
                        r.product_of_singles,
                        r.deviation
                    );
                }
            }
        }
        if !self.measurements.is_empty() {
            let _ = writeln!(out, "\nmeasurements (operator Schmidt)");
            for m in &self.measurements {
                let _ = writeln!(
                    out,
                    "  {:<5} under {:<12} rank {}  {:<9} degree {:.4}  coefficients {}",
                    m.experiment.label(),
                    m.isomorphism,
                    m.rank,
                    verdict(m.product),
                    m.degree,
                    fmt_list(&m.coefficients)
                );
            }
        }
        if !self.evolutions.is_empty() {
            let _ = writeln!(out, "\nevolutions");
            for e in &self.evolutions {
                let _ = writeln!(
                    out,
                    "  {} -> {} under {}: rank {}  {}",
                    e.source.label(),
                    e.target.label(),
                    e.isomorphism,
                    e.rank,
                    verdict(e.product)
                );
            }
        }
        if let Some(s) = &self.state_fit {
            let _ = writeln!(
                out,
                "\nstate fit (product measurements, one isomorphism): objective {:.6e}  converged {}  restart {} of {}",
                s.objective, s.converged, s.restart, s.restarts_run
            );
            let _ = writeln!(out, "  table misfits {}", fmt_list(&s.table_misfits));
            let amps: Vec<String> = s.state.iter().map(|p| format!("{:.4}∠{:.2}°", p[0], p[1])).collect();
            let _ = writeln!(out, "  state ({})", amps.join(", "));
        }
        if !self.fits.is_empty() {
            let _ = writeln!(out, "\neigenbasis fits");
            for f in &self.fits {
                let _ = writeln!(
                    out,
                    "  {:<5} misfit {:.3e}  converged {:<5}  restart {} of {}  iterations {}",
                    f.experiment.label(),
                    f.misfit,
                    f.converged,
                    f.restart,
                    f.restarts_run,
                    f.iterations
                );
            }
        }
        if !self.decompositions.is_empty() {
            for d in &self.decompositions {
                let _ = writeln!(out, "\n{} under {}", d.subject, d.isomorphism);
                let _ = writeln!(out, "  coefficients {}", fmt_list(&d.coefficients));
                let _ = writeln!(out, "  rank {}  {}", d.rank, verdict(d.product));
                if let Some(g) = d.degree {
                    let _ = writeln!(out, "  entanglement degree {g:.6}");
                }
            }
        }
        if !self.checks.is_empty() {
            render_checks(&mut out, &self.checks);
        }
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        out
    }
}

fn verdict(product: bool) -> &'static str {
    if product {
        "product"
    } else {
        "entangled"
    }
}

fn fmt_list(xs: &[f64]) -> String {
    let parts: Vec<String> = xs.iter().map(|x| format!("{x:.6}")).collect();
    format!("[{}]", parts.join(", "))
}

fn render_chsh(out: &mut String, c: &ChshReport) {
    let _ = writeln!(out, "\nexpectation values (E = p11 + p22 - p12 - p21)");
    for exp in Experiment::ALL {
        let (a, b) = exp.sides();
        let _ = writeln!(out, "  E({a},{b}) = {:+.4}", c.expectation(exp));
    }
    let _ = writeln!(out, "CHSH = E(A',B') + E(A',B) + E(A,B') - E(A,B) = {:.4}", c.chsh);
    let _ = writeln!(
        out,
        "  violates |CHSH| <= 2: {}   distance to 2√2: {:.4}",
        c.violates, c.tsirelson_gap
    );
    let _ = writeln!(out, "\nmarginal law");
    for r in &c.marginal_deviations {
        let _ = writeln!(
            out,
            "  P({}{}) from {:<4} {:.4}  from {:<4} {:.4}  |diff| {:.4}",
            r.measurement.label(),
            r.outcome,
            r.experiments.0.label(),
            r.lhs,
            r.experiments.1.label(),
            r.rhs,
            r.deviation
        );
    }
}

fn fmt_num(v: f64) -> String {
    if v != 0.0 && v.abs() < 1e-3 {
        format!("{v:.2e}")
    } else {
        format!("{v:.6}")
    }
}

fn render_checks(out: &mut String, rows: &[CheckRow]) {
    let _ = writeln!(out, "\n{:<6} {:<64} {:>12} {:>12} {:>10}  status", "id", "check", "measured", "expected", "tol");
    let num = |x: Option<f64>| x.map_or_else(|| "-".to_string(), fmt_num);
    let tol = |x: Option<f64>| x.map_or_else(|| "-".to_string(), fmt_num);
    for r in rows {
        let status = match r.status {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Info => "INFO",
        };
        let _ = writeln!(
            out,
            "{:<6} {:<64} {:>12} {:>12} {:>10}  {status}",
            r.id,
            r.name,
            num(r.measured),
            num(r.expected),
            tol(r.tolerance)
        );
        if !r.note.is_empty() {
            let _ = writeln!(out, "       {}", r.note);
        }
    }
    let failed = rows.iter().filter(|r| !r.passed()).count();
    let _ = writeln!(out, "\n{} checks, {} failed", rows.len(), failed);
}
