//! `lis-crlb`: sweeps, deployment studies and validation from the command
//! line. Sweeps write CSV; `validate` writes a JSON report.

mod context;
mod deploy;
mod sweeps;
mod table;
mod validate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use context::{Context, Preset, UsageError};

#[derive(Debug, Parser)]
#[command(name = "lis-crlb", version, about = "Positioning bounds for disk-shaped large intelligent surfaces")]
struct Cli {
    /// Scenario file (TOML) supplying lambda, n0, terminal and panel radius.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output path, or `stdout`.
    #[arg(long, global = true, default_value = "stdout")]
    out: String,
    /// Relative quadrature tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Monte Carlo seed; required when sampling terminals.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Named parameter set; selects the command when none
    /// is given.
    #[arg(long, global = true, value_enum)]
    preset: Option<Preset>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Bounds along the panel axis versus τ, closed form and quadrature.
    CplSweep(sweeps::CplArgs),
    /// Quadrature bounds off the axis versus τ, with local slopes.
    OffcplSweep(sweeps::OffCplArgs),
    /// Near-axis approximation against quadrature for diagonal offsets.
    ApproxError(sweeps::ApproxArgs),
    /// Bounds for terminals on a circle parallel to the panel.
    RingSweep(sweeps::RingArgs),
    /// Known- and unknown-phase bounds with small-τ approximations.
    PhaseSweep(sweeps::PhaseArgs),
    /// Single, four- and sixteen-panel deployments over the radius.
    Deploy(deploy::DeployArgs),
    /// Run the acceptance checks and write a JSON report.
    Validate,
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let command = match (cli.command, cli.preset) {
        (Some(c), None) => c,
        (Some(c), Some(p)) => {
            let expected = p.command_name();
            let given = command_name(&c);
            if expected != given {
                return Err(UsageError(format!("preset {} belongs to `{expected}`, not `{given}`", p.name())).into());
            }
            c
        }
        (None, Some(p)) => {
            let argv = std::env::args_os().chain([p.command_name().into()]);
            let reparsed = Cli::try_parse_from(argv).map_err(|e| UsageError(e.to_string()))?;
            reparsed.command.expect("subcommand appended")
        }
        (None, None) => return Err(UsageError("a command or --preset is required".into()).into()),
    };
    let ctx = Context::new(cli.config.as_deref(), &cli.out, cli.tol, cli.seed, cli.preset)?;
    match command {
        Command::CplSweep(a) => sweeps::cpl_sweep(&ctx, a),
        Command::OffcplSweep(a) => sweeps::offcpl_sweep(&ctx, a),
        Command::ApproxError(a) => sweeps::approx_error(&ctx, a),
        Command::RingSweep(a) => sweeps::ring_sweep(&ctx, a),
        Command::PhaseSweep(a) => sweeps::phase_sweep(&ctx, a),
        Command::Deploy(a) => deploy::deploy(&ctx, a),
        Command::Validate => return validate::validate(&ctx),
    }?;
    Ok(true)
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::CplSweep(_) => "cpl-sweep",
        Command::OffcplSweep(_) => "offcpl-sweep",
        Command::ApproxError(_) => "approx-error",
        Command::RingSweep(_) => "ring-sweep",
        Command::PhaseSweep(_) => "phase-sweep",
        Command::Deploy(_) => "deploy",
        Command::Validate => "validate",
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) if e.is::<UsageError>() => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
