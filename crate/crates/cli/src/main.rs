use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use jsrkit::run::golden;
use jsrkit::{budget_from_env, execute, CliError, Command, NormKind, RunConfig};
use jsrkit_core::symbolic::Rational;
use jsrkit_core::Word;

/// Number of golden-mean convergents behind `--gamma golden`.
const GOLDEN_COUNT: usize = 40;

#[derive(Clone, Copy, ValueEnum)]
enum Cmd {
    Bounds,
    Pruned,
    Splitting,
    Sturmian,
    Epsilon,
    Convergence,
}

#[derive(Clone, Copy, ValueEnum)]
enum Norm {
    Euclidean,
    Adapted,
}

/// Joint spectral radius bounds, cocycle splittings and periodic
/// approximation experiments.
#[derive(Parser)]
#[command(name = "jsrkit", version)]
struct Args {
    command: Cmd,
    /// Matrix set JSON, or an orbit closure JSON for sturmian/epsilon.
    #[arg(long)]
    input: Option<PathBuf>,
    /// CSV report path; metadata goes to `<out>.meta.json`.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 10)]
    max_depth: usize,
    #[arg(long, value_enum, default_value_t = Norm::Euclidean)]
    norm: Norm,
    #[arg(long, default_value_t = 6)]
    adapted_depth: usize,
    #[arg(long)]
    rho_hat: Option<f64>,
    #[arg(long, default_value_t = 0.01)]
    delta: f64,
    /// Comma-separated convergents p/q, or `golden`.
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    workers: Option<usize>,
    /// Periodic word for `splitting`, as hyphen-joined symbol indices.
    #[arg(long)]
    word: Option<String>,
    /// Also write a log-log gap plot here.
    #[arg(long)]
    svg: Option<PathBuf>,
}

fn config(a: Args) -> Result<RunConfig, CliError> {
    let command = match a.command {
        Cmd::Bounds => Command::Bounds,
        Cmd::Pruned => Command::Pruned,
        Cmd::Splitting => Command::Splitting,
        Cmd::Sturmian => Command::Sturmian,
        Cmd::Epsilon => Command::Epsilon,
        Cmd::Convergence => Command::Convergence,
    };
    let mut c = RunConfig::new(command, a.input, a.out);
    c.max_depth = a.max_depth;
    c.norm = match a.norm {
        Norm::Euclidean => NormKind::Euclidean,
        Norm::Adapted => NormKind::Adapted,
    };
    c.adapted_depth = a.adapted_depth;
    c.rho_hat = a.rho_hat;
    c.delta = a.delta;
    c.seed = a.seed;
    c.workers = a.workers;
    c.svg = a.svg;
    c.gamma = match a.gamma.as_deref() {
        None => None,
        Some("golden") => Some(golden(GOLDEN_COUNT)),
        Some(s) => Some(
            s.split(',')
                .map(|t| t.parse::<Rational>())
                .collect::<Result<Vec<_>, _>>()?,
        ),
    };
    c.word = a.word.as_deref().map(str::parse::<Word>).transpose()?;
    if let Some(b) = budget_from_env()? {
        c.budget = b;
    }
    Ok(c)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let code = match config(args) {
        Ok(c) => execute(&c),
        Err(e) => {
            eprintln!("jsrkit: {}: {e}", e.kind());
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
