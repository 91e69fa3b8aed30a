//! Command-line arguments, the optional TOML config file, and the resolved
//! [`RunConfig`]. Precedence: flags, then the config file, then defaults.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use families::FamilyId;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Emit {
    #[default]
    Table,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanKind {
    #[default]
    Dequantization,
    HilbertSamuel,
}

#[derive(Debug, Parser)]
#[command(name = "heights", version, about = "Arakelov heights, K-stability functionals and balanced metrics")]
pub struct Cli {
    /// TOML file with one table per subcommand; flags override it
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub emit: Option<Emit>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate functionals on a model file or a built-in family
    Compute(ComputeArgs),
    /// Dequantization or Hilbert–Samuel scan over m = 1..=m_max
    Scan(ScanArgs),
    /// Iterate the balancing map from a perturbed Fubini–Study Gram matrix
    Balanced(BalancedArgs),
    /// Brieskorn–Pham multiplicity and log-discrepancy report
    Bp(BpArgs),
    /// Faltings height of an elliptic curve by both routes
    Faltings(FaltingsArgs),
    /// Load and validate a model file (and optionally a potential)
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct ComputeArgs {
    #[arg(long, conflicts_with = "family")]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long, value_delimiter = ',')]
    pub primes: Option<Vec<u64>>,
    /// hk, energy, ricci, entropy, I, J, snA, ndf, calabi, slope
    #[arg(long, value_delimiter = ',')]
    pub functional: Option<Vec<String>>,
    /// only `base` is understood
    #[arg(long)]
    pub relative_to: Option<String>,
    /// grid potential CSV for the archimedean metric change
    #[arg(long)]
    pub potential: Option<PathBuf>,
    /// a1,a2,a3,a4,a6 for the elliptic family
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub curve: Option<Vec<i64>>,
    /// polarization degree for the elliptic family
    #[arg(long)]
    pub degree: Option<u32>,
    #[arg(long)]
    pub cover_degree: Option<u32>,
    #[arg(long)]
    pub dump_model: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct ScanArgs {
    #[arg(long, conflicts_with = "family")]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long, value_enum)]
    pub kind: Option<ScanKind>,
    #[arg(long)]
    pub m_max: Option<u32>,
    /// scan CSV; stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// fit JSON; defaults to the CSV path with extension .fit.json
    #[arg(long)]
    pub fit_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct BalancedArgs {
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub m: Option<u32>,
    /// relative perturbation of the two extreme diagonal entries
    #[arg(long, allow_hyphen_values = true)]
    pub perturb: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// number of latitudes of the quadrature grid
    #[arg(long)]
    pub grid: Option<usize>,
    /// trace CSV; stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct BpArgs {
    #[arg(long, value_delimiter = ',')]
    pub weights: Option<Vec<u32>>,
    #[arg(long)]
    pub prime: Option<u64>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct FaltingsArgs {
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub curve: Option<Vec<i64>>,
    #[arg(long)]
    pub degree: Option<u32>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct ValidateArgs {
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub potential: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct FileConfig {
    emit: Option<Emit>,
    compute: ComputeArgs,
    scan: ScanArgs,
    balanced: BalancedArgs,
    bp: BpArgs,
    faltings: FaltingsArgs,
    validate: ValidateArgs,
}

/// 11a1, the default curve.
pub const DEFAULT_CURVE: [i64; 5] = [0, -1, 1, -10, -20];

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Model(PathBuf),
    Family(FamilyId),
}

#[derive(Debug, Clone)]
pub struct ComputeConfig {
    pub source: Source,
    pub primes: Option<Vec<u64>>,
    pub functionals: Vec<String>,
    pub relative_to_base: bool,
    pub potential: Option<PathBuf>,
    pub curve: [i64; 5],
    pub degree: u32,
    pub cover_degree: u32,
    pub dump_model: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct ScanConfig {
    pub source: Source,
    pub kind: ScanKind,
    pub m_max: u32,
    pub out: Option<PathBuf>,
    pub fit_out: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct BalancedConfig {
    pub m: u32,
    pub perturb: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub grid: Option<usize>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct BpConfig {
    pub weights: Vec<u32>,
    pub prime: u64,
}

#[derive(Debug, Clone)]
pub struct FaltingsConfig {
    pub curve: [i64; 5],
    pub degree: u32,
}

#[derive(Debug, Clone)]
pub struct ValidateConfig {
    pub model: Option<PathBuf>,
    pub potential: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub enum CommandConfig {
    Compute(ComputeConfig),
    Scan(ScanConfig),
    Balanced(BalancedConfig),
    Bp(BpConfig),
    Faltings(FaltingsConfig),
    Validate(ValidateConfig),
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandConfig,
    pub emit: Emit,
}

pub const FUNCTIONALS: [&str; 10] = ["hk", "energy", "ricci", "entropy", "I", "J", "snA", "ndf", "calabi", "slope"];

fn read_file_config(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Validation(format!("Io: {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Validation(format!("ConfigParse: {}: {e}", path.display())))
}

/// The model/family choice is one setting: a flag for either replaces both
/// config entries, so the two sources can only collide within one layer.
fn source(
    flag: (Option<PathBuf>, Option<String>),
    file: (Option<PathBuf>, Option<String>),
    default: Option<FamilyId>,
) -> Result<Source, CliError> {
    let (model, family) = if flag.0.is_some() || flag.1.is_some() { flag } else { file };
    match (model, family) {
        (Some(_), Some(_)) => Err(CliError::Validation("ExclusiveSource: give either a model path or a family id, not both".into())),
        (Some(p), None) => Ok(Source::Model(p)),
        (None, Some(f)) => Ok(Source::Family(f.parse().map_err(|e: families::FamiliesError| CliError::Validation(e.to_string()))?)),
        (None, None) => default
            .map(Source::Family)
            .ok_or_else(|| CliError::Validation("MissingSource: one of --model or --family is required".into())),
    }
}

fn curve(v: Option<Vec<i64>>) -> Result<[i64; 5], CliError> {
    match v {
        None => Ok(DEFAULT_CURVE),
        Some(v) => v
            .try_into()
            .map_err(|v: Vec<i64>| CliError::Validation(format!("CurveArity: expected a1,a2,a3,a4,a6, got {} values", v.len()))),
    }
}

fn positive(name: &str, x: f64) -> Result<f64, CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::Validation(format!("NonPositiveTolerance: {name} = {x} must be > 0")))
    }
}

impl RunConfig {
    /// Merges flags over the config file named by `--config` and checks the result.
    pub fn from_cli(cli: Cli) -> Result<Self, CliError> {
        let file = match &cli.config {
            Some(p) => read_file_config(p)?,
            None => FileConfig::default(),
        };
        let emit = cli.emit.or(file.emit).unwrap_or_default();
        let command = match cli.command {
            Command::Compute(a) => {
                let f = file.compute;
                let functionals = a.functional.or(f.functional).unwrap_or_else(|| vec!["hk".into()]);
                let relative = a.relative_to.or(f.relative_to);
                let relative_to_base = match relative.as_deref() {
                    None => false,
                    Some("base") => true,
                    Some(other) => {
                        return Err(CliError::Validation(format!("UnknownReference: --relative-to {other:?}; only `base` is supported")))
                    }
                };
                CommandConfig::Compute(ComputeConfig {
                    source: source((a.model, a.family), (f.model, f.family), None)?,
                    primes: a.primes.or(f.primes),
                    functionals,
                    relative_to_base,
                    potential: a.potential.or(f.potential),
                    curve: curve(a.curve.or(f.curve))?,
                    degree: a.degree.or(f.degree).unwrap_or(1),
                    cover_degree: a.cover_degree.or(f.cover_degree).unwrap_or(1),
                    dump_model: a.dump_model.or(f.dump_model),
                })
            }
            Command::Scan(a) => {
                let f = file.scan;
                CommandConfig::Scan(ScanConfig {
                    source: source((a.model, a.family), (f.model, f.family), Some(FamilyId::P1Fs))?,
                    kind: a.kind.or(f.kind).unwrap_or_default(),
                    m_max: a.m_max.or(f.m_max).unwrap_or(200),
                    out: a.out.or(f.out),
                    fit_out: a.fit_out.or(f.fit_out),
                })
            }
            Command::Balanced(a) => {
                let f = file.balanced;
                let fam = a.family.or(f.family).unwrap_or_else(|| "p1".into());
                let id: FamilyId = fam.parse().map_err(|e: families::FamiliesError| CliError::Validation(e.to_string()))?;
                if id != FamilyId::P1Fs {
                    return Err(CliError::Validation(format!("UnsupportedFamily: balanced metrics are implemented for p1, not {fam}")));
                }
                CommandConfig::Balanced(BalancedConfig {
                    m: a.m.or(f.m).unwrap_or(5),
                    perturb: a.perturb.or(f.perturb).unwrap_or(0.1),
                    tol: a.tol.or(f.tol).unwrap_or(1e-10),
                    max_iter: a.max_iter.or(f.max_iter).unwrap_or(200),
                    grid: a.grid.or(f.grid),
                    out: a.out.or(f.out),
                })
            }
            Command::Bp(a) => {
                let f = file.bp;
                CommandConfig::Bp(BpConfig {
                    weights: a.weights.or(f.weights).ok_or_else(|| CliError::Validation("MissingWeights: --weights is required".into()))?,
                    prime: a.prime.or(f.prime).ok_or_else(|| CliError::Validation("MissingPrime: --prime is required".into()))?,
                })
            }
            Command::Faltings(a) => {
                let f = file.faltings;
                CommandConfig::Faltings(FaltingsConfig { curve: curve(a.curve.or(f.curve))?, degree: a.degree.or(f.degree).unwrap_or(1) })
            }
            Command::Validate(a) => {
                let f = file.validate;
                CommandConfig::Validate(ValidateConfig { model: a.model.or(f.model), potential: a.potential.or(f.potential) })
            }
        };
        let cfg = RunConfig { command, emit };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        match &self.command {
            CommandConfig::Compute(c) => {
                if let Some(bad) = c.functionals.iter().find(|f| !FUNCTIONALS.contains(&f.as_str())) {
                    return Err(CliError::Validation(format!("UnknownFunctional: {bad}; expected one of {}", FUNCTIONALS.join(", "))));
                }
                if c.degree == 0 {
                    return Err(CliError::Validation("ZeroDegree: polarization degree must be ≥ 1".into()));
                }
                if c.cover_degree == 0 {
                    return Err(CliError::Validation("ZeroCoverDegree".into()));
                }
            }
            CommandConfig::Scan(s) => {
                if s.m_max == 0 {
                    return Err(CliError::Validation("InvalidArgument: m_max must be positive".into()));
                }
            }
            CommandConfig::Balanced(b) => {
                positive("tol", b.tol)?;
                if b.m == 0 {
                    return Err(CliError::Validation("InvalidArgument: m must be positive".into()));
                }
                if !(b.perturb > -1.0) || !b.perturb.is_finite() {
                    return Err(CliError::Validation(format!("InvalidArgument: perturb = {} must be > −1", b.perturb)));
                }
                if b.grid.is_some_and(|n| n < 2) {
                    return Err(CliError::Validation("InvalidArgument: grid needs at least 2 latitudes".into()));
                }
            }
            CommandConfig::Faltings(f) => {
                if f.degree == 0 {
                    return Err(CliError::Validation("ZeroDegree: polarization degree must be ≥ 1".into()));
                }
            }
            CommandConfig::Validate(v) => {
                if v.model.is_none() && v.potential.is_none() {
                    return Err(CliError::Validation("MissingSource: give --model and/or --potential".into()));
                }
            }
            CommandConfig::Bp(_) => {}
        }
        Ok(())
    }
}
