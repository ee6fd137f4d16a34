//! Library side of the `jsrkit` command: input parsing, the pipelines behind
//! each subcommand, and report writing.

pub mod io;
pub mod report;
pub mod run;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use jsrkit_core::bounds::DEFAULT_BUDGET;
use jsrkit_core::symbolic::Rational;
use jsrkit_core::Word;

pub use run::{execute, run, Outcome};

/// Environment variable that overrides the multiplication budget.
pub const BUDGET_ENV: &str = "JSRKIT_BUDGET";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("value error: {0}")]
    Value(String),
    #[error("io error: {0}")]
    Io(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] jsrkit_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use jsrkit_core::Error as E;
        match self {
            Self::Core(E::BudgetExceeded { .. } | E::Ambiguous { .. } | E::DegenerateSplitting(_)) => 3,
            Self::Core(E::Invariant(_) | E::Singular | E::NoConvergence(_)) => 4,
            _ => 2,
        }
    }

    /// Short machine-readable class for the stderr line.
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Parse { .. } => "parse",
            Self::Schema(_) => "schema",
            Self::Value(_) => "value",
            Self::Io(_) => "io",
            Self::Config(_) => "config",
            Self::Core(_) => match self.exit_code() {
                3 => "inconclusive",
                4 => "internal",
                _ => "input",
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Bounds,
    Pruned,
    Splitting,
    Sturmian,
    Epsilon,
    Convergence,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Self::Bounds,
        Self::Pruned,
        Self::Splitting,
        Self::Sturmian,
        Self::Epsilon,
        Self::Convergence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Bounds => "bounds",
            Self::Pruned => "pruned",
            Self::Splitting => "splitting",
            Self::Sturmian => "sturmian",
            Self::Epsilon => "epsilon",
            Self::Convergence => "convergence",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| CliError::Config(format!("unknown command {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    Euclidean,
    Adapted,
}

impl NormKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Euclidean => "euclidean",
            Self::Adapted => "adapted",
        }
    }
}

/// Everything a run depends on. Echoed into the metadata file.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub input: Option<PathBuf>,
    pub out: PathBuf,
    pub max_depth: usize,
    pub norm: NormKind,
    pub adapted_depth: usize,
    pub rho_hat: Option<f64>,
    pub delta: f64,
    pub gamma: Option<Vec<Rational>>,
    pub seed: u64,
    pub workers: Option<usize>,
    pub word: Option<Word>,
    pub svg: Option<PathBuf>,
    pub budget: u64,
}

impl RunConfig {
    pub fn new(command: Command, input: Option<PathBuf>, out: PathBuf) -> Self {
        Self {
            command,
            input,
            out,
            max_depth: 10,
            norm: NormKind::Euclidean,
            adapted_depth: 6,
            rho_hat: None,
            delta: 0.01,
            gamma: None,
            seed: 0,
            workers: None,
            word: None,
            svg: None,
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.out.as_os_str().is_empty() {
            return Err(CliError::Config("output path is empty".into()));
        }
        if self.input.as_ref().is_some_and(|p| p.as_os_str().is_empty()) {
            return Err(CliError::Config("input path is empty".into()));
        }
        let needs_input = !(matches!(self.command, Command::Sturmian | Command::Epsilon) && self.gamma.is_some());
        if needs_input && self.input.is_none() {
            return Err(CliError::Config(format!("{} needs --input", self.command)));
        }
        if self.max_depth == 0 {
            return Err(CliError::Config("max depth must be at least 1".into()));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(CliError::Config(format!("delta must be positive, got {}", self.delta)));
        }
        if let Some(r) = self.rho_hat {
            if !(r > 0.0 && r.is_finite()) {
                return Err(CliError::Config(format!("rho-hat must be positive, got {r}")));
            }
        }
        if self.workers == Some(0) {
            return Err(CliError::Config("workers must be at least 1".into()));
        }
        if self.budget == 0 {
            return Err(CliError::Config("budget must be at least 1".into()));
        }
        Ok(())
    }
}

/// Reads the budget override, if set.
pub fn budget_from_env() -> Result<Option<u64>, CliError> {
    match std::env::var(BUDGET_ENV) {
        Ok(v) => v
            .trim()
            .parse::<u64>()
            .map(Some)
            .map_err(|_| CliError::Config(format!("{BUDGET_ENV}={v:?} is not a nonnegative integer"))),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(CliError::Config(format!("{BUDGET_ENV}: {e}"))),
    }
}
