//! `paracover` — compare excess-of-loss and parametric insurance for a
//! scenario under a mean-variance criterion.
//!
//! Exit codes: 0 success, 2 parse error (flags or scenario file), 3 model
//! invariant violation, 4 no root in a bracketed search.

mod commands;
mod scenario_file;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use paracover::comparison::{IndifferenceMode, SurfaceKind};

#[derive(Parser)]
#[command(
    name = "paracover",
    version,
    about = "Compare excess-of-loss and parametric insurance under a mean-variance criterion"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal contracts, premiums, objective values, and the duality gap
    Optimize(OptimizeArgs),
    /// Indemnity friction level at which both covers are equally attractive
    Indifference(IndifferenceArgs),
    /// Welfare-dominance surface over a parameter grid, exported as CSV
    Surface(SurfaceArgs),
    /// Best contract choice within a premium budget
    Budget(BudgetArgs),
    /// Seeded Monte Carlo cross-check of the closed-form objectives
    Simulate(SimulateArgs),
}

/// Where the scenario comes from: a TOML file (missing keys default to the
/// built-in baseline) or the baseline itself.
#[derive(Args)]
#[group(required = true, multiple = false)]
struct ScenarioSource {
    /// Path to a scenario file (TOML)
    #[arg(value_name = "SCENARIO")]
    scenario: Option<PathBuf>,
    /// Use the built-in baseline scenario
    #[arg(long)]
    baseline: bool,
}

/// Scenario selection plus cross-cutting interpretation flags.
#[derive(Args)]
struct ScenarioArgs {
    #[command(flatten)]
    source: ScenarioSource,
    /// Interpret fixed costs gamma_d/gamma_p as per-event amounts; they are
    /// scaled by the mean event count before pricing (default: per-period)
    #[arg(long)]
    gamma_per_event: bool,
}

#[derive(Args)]
struct OptimizeArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Also write the report as JSON
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TargetArg {
    /// Fixed cost gamma_d
    Gamma,
    /// Loading theta_d
    Theta,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    /// Both contracts at their own optima
    Optimal,
    /// Parametric premium-matched to the indemnity contract
    Matched,
}

impl From<ModeArg> for IndifferenceMode {
    fn from(mode: ModeArg) -> Self {
        match mode {
            ModeArg::Optimal => IndifferenceMode::OptimalBoth,
            ModeArg::Matched => IndifferenceMode::PremiumMatched,
        }
    }
}

#[derive(Args)]
struct IndifferenceArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Which indemnity friction to solve for
    #[arg(long, value_enum)]
    target: TargetArg,
    #[arg(long, value_enum, default_value = "optimal")]
    mode: ModeArg,
    /// Also write the report as JSON
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    /// Premium-matched comparison over (deductible, gamma_d)
    Dgamma,
    /// Premium-matched comparison over (theta_d, gamma_d)
    Thetagamma,
    /// Budget-constrained comparison over (budget, gamma_d)
    Budget,
}

impl From<KindArg> for SurfaceKind {
    fn from(kind: KindArg) -> Self {
        match kind {
            KindArg::Dgamma => SurfaceKind::DeductibleGamma,
            KindArg::Thetagamma => SurfaceKind::ThetaGamma,
            KindArg::Budget => SurfaceKind::BudgetGamma,
        }
    }
}

#[derive(Args)]
struct SurfaceArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Grid override as a1min:a1max:a1steps,a2min:a2max:a2steps
    #[arg(long, value_name = "SPEC")]
    grid: Option<String>,
    /// Export the positive part of delta_mv instead of the raw value
    #[arg(long)]
    truncate_zero: bool,
    /// Write the CSV here instead of stdout
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
#[group(id = "budget_input", required = true, multiple = false)]
struct BudgetSelector {
    /// A single premium budget
    #[arg(long)]
    budget: Option<f64>,
    /// Budget sweep as min:max:steps
    #[arg(long, value_name = "SPEC")]
    sweep: Option<String>,
}

#[derive(Args)]
struct BudgetArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[command(flatten)]
    selector: BudgetSelector,
    /// Write the sweep table (or single-budget report as JSON) here
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Contract design: none, indemnity:D, or parametric:K
    #[arg(long, value_name = "DESIGN")]
    design: String,
    #[arg(long, default_value_t = 1_000_000)]
    years: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Also write the report as JSON
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

/// Command-level error carrying the scripted exit code.
#[derive(Debug)]
enum CliError {
    /// Unreadable or malformed inputs (exit 2).
    Parse(String),
    /// Inputs that violate a model invariant (exit 3).
    Invariant(String),
    /// A bracketed search found no root (exit 4).
    NoRoot(String),
    /// Filesystem failure (exit 1).
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Invariant(_) => 3,
            CliError::NoRoot(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Parse(m) | CliError::Invariant(m) | CliError::NoRoot(m) | CliError::Io(m) => {
                m
            }
        }
    }
}

impl From<paracover::Error> for CliError {
    fn from(err: paracover::Error) -> Self {
        match err {
            paracover::Error::NoRoot { .. } | paracover::Error::RootNotConverged { .. } => {
                CliError::NoRoot(err.to_string())
            }
            _ => CliError::Invariant(err.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Io(err.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Optimize(args) => {
            let scenario = scenario_file::load(&args.scenario)?;
            commands::optimize(&scenario, args.out.as_deref())
        }
        Command::Indifference(args) => {
            let scenario = scenario_file::load(&args.scenario)?;
            commands::indifference(
                &scenario,
                args.target,
                args.mode.into(),
                args.out.as_deref(),
            )
        }
        Command::Surface(args) => {
            let scenario = scenario_file::load(&args.scenario)?;
            commands::surface(
                &scenario,
                args.kind.into(),
                args.grid.as_deref(),
                args.truncate_zero,
                args.out.as_deref(),
            )
        }
        Command::Budget(args) => {
            let scenario = scenario_file::load(&args.scenario)?;
            match (args.selector.budget, args.selector.sweep) {
                (Some(budget), None) => {
                    commands::budget_single(&scenario, budget, args.out.as_deref())
                }
                (None, Some(spec)) => commands::budget_sweep(&scenario, &spec, args.out.as_deref()),
                _ => unreachable!("clap enforces exactly one of --budget/--sweep"),
            }
        }
        Command::Simulate(args) => {
            let scenario = scenario_file::load(&args.scenario)?;
            commands::simulate(
                &scenario,
                &args.design,
                args.years,
                args.seed,
                args.out.as_deref(),
            )
        }
    }
}
