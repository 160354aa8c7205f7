//! Run configuration, self-contained run reports and replay.
//!
//! A run report is a JSON document holding the schema version, an echo of
//! the configuration, any fixture matrices, the suite report body and the
//! wall time. Replay rebuilds the configuration from the report alone and
//! compares bodies byte for byte; wall time is excluded.

use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::catalog::lookup_selector;
use crate::error::{Error, Result};
use crate::matrix_json::Fixture;
use crate::report::{SuiteReport, SCHEMA_VERSION};
use crate::suites::{run_suite, SuiteConfig, SUITES};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURES: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "text" => Ok(Format::Text),
            _ => Err(Error::Parameter(format!(
                "unknown format `{s}`; valid formats: json, csv, text"
            ))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Text => "text",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub suite: String,
    pub dim: usize,
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    /// Selectors such as `power:p=0.5`.
    #[serde(default)]
    pub functions: Vec<String>,
    #[serde(default)]
    pub input: Option<PathBuf>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            suite: "thm-subadd-fwd".into(),
            dim: 4,
            trials: 100,
            seed: 0,
            tol: 1e-8,
            functions: Vec::new(),
            input: None,
            out: None,
            format: Format::Json,
        }
    }
}

impl RunConfig {
    /// Validates every field and resolves it into a suite configuration.
    pub fn validate(&self, fixture: Option<Fixture>) -> Result<SuiteConfig> {
        if !SUITES.contains(&self.suite.as_str()) {
            return Err(Error::UnknownSuite {
                name: self.suite.clone(),
                valid: SUITES.join(", "),
            });
        }
        if self.dim == 0 || self.dim > crate::sampler::MAX_DIM {
            return Err(Error::Parameter(format!("--dim must be in [1, 64], got {}", self.dim)));
        }
        if self.trials == 0 {
            return Err(Error::Parameter("--trials must be >= 1".into()));
        }
        if !(self.tol >= 0.0 && self.tol.is_finite()) {
            return Err(Error::Parameter(format!(
                "--tol must be a finite value >= 0, got {}",
                self.tol
            )));
        }
        let functions = if self.functions.is_empty() {
            None
        } else {
            Some(
                self.functions
                    .iter()
                    .map(|s| lookup_selector(s))
                    .collect::<Result<Vec<_>>>()?,
            )
        };
        if let Some(f) = &fixture {
            // Surface malformed matrices as configuration errors up front.
            f.matrices()?;
        }
        Ok(SuiteConfig {
            dim: self.dim,
            trials: self.trials,
            seed: self.seed,
            tol: self.tol,
            functions,
            fixture,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub trials: usize,
    pub failures: usize,
    pub in_hypothesis_failures: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub config: RunConfig,
    #[serde(default)]
    pub fixtures: Option<Fixture>,
    pub summary: Summary,
    pub body: SuiteReport,
    pub wall_time_ms: f64,
}

impl RunReport {
    pub fn exit_code(&self) -> i32 {
        if self.body.passed() {
            EXIT_OK
        } else {
            EXIT_FAILURES
        }
    }
}

/// Exit status for an error raised before or during a run.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::NoConvergence { .. } | Error::Generation { .. } | Error::Inconclusive { .. } => EXIT_FAILURES,
        _ => EXIT_USAGE,
    }
}

fn execute(config: &RunConfig, fixture: Option<Fixture>) -> Result<RunReport> {
    let suite_cfg = config.validate(fixture.clone())?;
    let start = Instant::now();
    let body = run_suite(&config.suite, &suite_cfg)?;
    let wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    let in_hyp = body.in_hypothesis_failures();
    Ok(RunReport {
        schema_version: SCHEMA_VERSION,
        config: config.clone(),
        fixtures: fixture,
        summary: Summary {
            trials: body.trials,
            failures: body.total_failures(),
            in_hypothesis_failures: in_hyp,
            passed: in_hyp == 0,
        },
        body,
        wall_time_ms,
    })
}

/// Executes `config` and, when `config.out` is set, writes the report there
/// in `config.format`.
pub fn run(config: &RunConfig) -> Result<RunReport> {
    let fixture = config.input.as_deref().map(Fixture::load).transpose()?;
    let report = execute(config, fixture)?;
    if let Some(path) = &config.out {
        std::fs::write(path, render(&report, config.format)?)?;
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplayOutcome {
    pub matches: bool,
    pub replayed: RunReport,
}

/// Checks the schema version of a parsed report.
fn check_schema(value: &Value) -> Result<()> {
    match value.get("schema_version").and_then(Value::as_u64) {
        Some(v) if v == u64::from(SCHEMA_VERSION) => Ok(()),
        Some(v) => Err(Error::Schema(format!(
            "report has schema version {v}, this build reads version {SCHEMA_VERSION}"
        ))),
        None => Err(Error::Schema("report has no schema_version".into())),
    }
}

/// Re-executes a report's configuration (fixtures come from the report, not
/// from the original input path) and compares the serialized bodies.
pub fn replay_value(value: &Value) -> Result<ReplayOutcome> {
    check_schema(value)?;
    let original: RunReport = serde_json::from_value(value.clone())
        .map_err(|e| Error::Schema(format!("report does not match schema: {e}")))?;
    let mut config = original.config.clone();
    config.out = None;
    let replayed = execute(&config, original.fixtures.clone())?;
    let before = serde_json::to_string(&value["body"])?;
    let after = serde_json::to_string(&serde_json::to_value(&replayed.body)?)?;
    Ok(ReplayOutcome {
        matches: before == after,
        replayed,
    })
}

pub fn replay(path: &Path) -> Result<ReplayOutcome> {
    let text = std::fs::read_to_string(path)?;
    let value: Value = serde_json::from_str(&text)?;
    replay_value(&value)
}

pub fn render(report: &RunReport, format: Format) -> Result<String> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(report)? + "\n"),
        Format::Csv => render_csv(&report.body),
        Format::Text => Ok(render_text(report)),
    }
}

fn collect_rows(report: &SuiteReport, out: &mut Vec<(String, bool, crate::report::Record)>) {
    for r in &report.records {
        out.push((report.suite.clone(), report.in_hypothesis, r.clone()));
    }
    for c in &report.children {
        collect_rows(c, out);
    }
}

/// One row per `(trial, check)` margin, children included.
pub fn render_csv(report: &SuiteReport) -> Result<String> {
    let mut rows = Vec::new();
    collect_rows(report, &mut rows);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "suite",
        "in_hypothesis",
        "trial",
        "label",
        "min_eigenvalue",
        "passed",
        "value",
    ])?;
    for (suite, in_hyp, r) in rows {
        w.write_record([
            suite,
            in_hyp.to_string(),
            r.trial.to_string(),
            r.label,
            format!("{:e}", r.min_eigenvalue),
            r.passed.to_string(),
            r.value.map(|v| v.to_string()).unwrap_or_default(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parameter(e.to_string()))
}

fn text_lines(report: &SuiteReport, depth: usize, out: &mut String) {
    let status = match (report.failures.is_empty(), report.in_hypothesis) {
        (true, _) => "pass",
        (false, true) => "FAIL",
        (false, false) => "explore",
    };
    let worst = report
        .stats
        .get("worst_margin")
        .or_else(|| report.stats.get("worst_min_eigenvalue"))
        .and_then(Value::as_f64)
        .map(|w| format!("{w:>12.3e}"))
        .unwrap_or_else(|| format!("{:>12}", "-"));
    // Children that test one function are named after it.
    let label = report
        .params
        .get("function")
        .and_then(Value::as_str)
        .filter(|_| depth > 0)
        .unwrap_or(&report.suite);
    let name = format!("{}{label}", "  ".repeat(depth));
    let _ = writeln!(
        out,
        "{name:<44} {:>7} {:>9} {worst} {status}",
        report.trials,
        report.failures.len(),
    );
    if depth == 0 || report.children.len() <= 16 {
        for c in &report.children {
            text_lines(c, depth + 1, out);
        }
    }
}

pub fn render_text(report: &RunReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "suite {} (dim {}, trials {}, seed {}, tol {:e})",
        report.config.suite, report.config.dim, report.config.trials, report.config.seed, report.config.tol
    );
    let _ = writeln!(
        out,
        "{:<44} {:>7} {:>9} {:>12} status",
        "suite", "trials", "failures", "worst"
    );
    text_lines(&report.body, 0, &mut out);
    for note in &report.body.notes {
        let _ = writeln!(out, "note: {note}");
    }
    let _ = writeln!(
        out,
        "{} in-hypothesis failure(s); wall time {:.1} ms",
        report.summary.in_hypothesis_failures, report.wall_time_ms
    );
    out
}
