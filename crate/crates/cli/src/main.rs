//! Batch front end: scenario execution with deterministic reports.
//!
//! `hpflow <command> --config <path> [--out <dir>] [--seed <u64>]`

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use report::{PhaseClock, RunReport, Timing, write_curve};

#[derive(Parser)]
#[command(
    name = "hpflow",
    version,
    about = "Verification runner for quantum stochastic flow models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Flow unitarity plus independence/stationarity of correlations.
    Simulate(CommonArgs),
    /// Kernel reconstruction of couplings and Hamiltonian.
    Reconstruct(CommonArgs),
    /// Full equivalence certificate with sensitivity probe.
    Roundtrip(CommonArgs),
    /// Weak-convergence curve of the vacuum compression (writes a CSV).
    Converge(CommonArgs),
    /// Structural property batteries (Lindblad, kernel, Gram, probes).
    Props(CommonArgs),
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Scenario configuration file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for report files.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Overrides the seed from the configuration.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    // Die quietly when stdout is closed mid-stream (e.g. piped into head).
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    let (name, args) = match &cli.command {
        Command::Simulate(a) => ("simulate", a),
        Command::Reconstruct(a) => ("reconstruct", a),
        Command::Roundtrip(a) => ("roundtrip", a),
        Command::Converge(a) => ("converge", a),
        Command::Props(a) => ("props", a),
    };
    match execute(name, args) {
        Ok(passed) => {
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(err) => {
            eprintln!("error: {:#}", err);
            ExitCode::from(2)
        }
    }
}

fn execute(command: &str, args: &CommonArgs) -> anyhow::Result<bool> {
    let load_clock = PhaseClock::start();
    let scenario = config::load_scenario(&args.config, args.seed)?;
    let load_ms = load_clock.elapsed_ms();

    let run_clock = PhaseClock::start();
    let output = commands::run_command(command, &scenario)?;
    let run_ms = run_clock.elapsed_ms();

    let report = RunReport {
        command: command.to_string(),
        scenario: scenario.name.clone(),
        model_label: scenario.model_label.clone(),
        seed: scenario.run.seed,
        config_echo: scenario.echo.clone(),
        checks: output.checks,
        extra: output.extra,
        timing: Timing { load_ms, run_ms },
    };
    report.print_summary();
    let report_path = report.write(&args.out)?;
    println!("report written to {}", report_path.display());
    if let Some(rows) = output.curve {
        let curve_path = write_curve(&args.out, &scenario.name, &rows)?;
        println!("curve written to {}", curve_path.display());
    }
    Ok(report.passed())
}
