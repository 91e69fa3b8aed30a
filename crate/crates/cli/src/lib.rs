//! Library side of the `heights` binary: configuration, the subcommand
//! runners and output rendering.
//!
//! Exit codes: 0 success, 2 invalid input, 3 numeric failure.

pub mod config;
pub mod report;
mod run;

use std::io::Write;

pub use config::{Cli, CommandConfig, Emit, RunConfig, ScanKind, Source};
pub use report::{Report, Row};
pub use run::{run_balanced, run_bp, run_compute, run_faltings, run_scan, run_validate};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Numeric(_) => EXIT_NUMERIC,
        }
    }
}

impl From<heightnum::HeightError> for CliError {
    fn from(e: heightnum::HeightError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<isect::IsectError> for CliError {
    fn from(e: isect::IsectError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<metrics::MetricsError> for CliError {
    fn from(e: metrics::MetricsError) -> Self {
        match e {
            metrics::MetricsError::NonKahler { .. } => CliError::Numeric(e.to_string()),
            metrics::MetricsError::Isect(e) => e.into(),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<quantized::QuantizedError> for CliError {
    fn from(e: quantized::QuantizedError) -> Self {
        use quantized::QuantizedError as E;
        match e {
            E::NonPositiveDefinite | E::NonSymmetric => CliError::Numeric(e.to_string()),
            E::Metrics(e) => e.into(),
            E::Isect(e) => e.into(),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<families::FamiliesError> for CliError {
    fn from(e: families::FamiliesError) -> Self {
        use families::FamiliesError as E;
        match e {
            E::Height(e) => e.into(),
            E::Isect(e) => e.into(),
            E::Quantized(e) => e.into(),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

/// What a subcommand hands back: the report for stdout and any files it wants written.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub report: Report,
    /// (path, contents), written in order
    pub files: Vec<(std::path::PathBuf, String)>,
    /// printed verbatim instead of the report when set
    pub stdout_override: Option<String>,
}

pub fn execute(cfg: &RunConfig) -> Result<Outcome, CliError> {
    match &cfg.command {
        CommandConfig::Compute(c) => run_compute(c),
        CommandConfig::Scan(c) => run_scan(c),
        CommandConfig::Balanced(c) => run_balanced(c),
        CommandConfig::Bp(c) => run_bp(c),
        CommandConfig::Faltings(c) => run_faltings(c),
        CommandConfig::Validate(c) => run_validate(c),
    }
}

/// Runs `cfg`, writes files and stdout, and returns the exit code.
pub fn run(cfg: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let outcome = match execute(cfg) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return e.exit_code();
        }
    };
    for (path, contents) in &outcome.files {
        if let Err(e) = std::fs::write(path, contents) {
            let _ = writeln!(stderr, "error: Io: {}: {e}", path.display());
            return EXIT_VALIDATION;
        }
    }
    let text = outcome.stdout_override.clone().unwrap_or_else(|| outcome.report.render(cfg.emit));
    if stdout.write_all(text.as_bytes()).is_err() {
        return EXIT_VALIDATION;
    }
    EXIT_OK
}

/// Applies HEIGHTS_THREADS to the global rayon pool.
pub fn configure_threads(value: Option<&str>) -> Result<(), CliError> {
    let Some(v) = value else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Validation(format!("InvalidThreads: HEIGHTS_THREADS = {v:?} must be a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Validation(format!("InvalidThreads: {e}")))
}
