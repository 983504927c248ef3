use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use tswitch_cli::commands::{cmd_converge, cmd_simulate, cmd_timebin, cmd_verify, Failure, Output};
use tswitch_cli::{resolve_config, Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.exit_code as u8)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Simulate(args) => {
            let cfg = resolve_config(&args.common, args.dt, None, None).map_err(Failure::config)?;
            let output = cmd_simulate(&cfg)?;
            emit(args.common.out, output)
        }
        Command::Converge(args) => {
            let cfg = resolve_config(&args.common, None, None, None).map_err(Failure::config)?;
            let mut cfg = cfg;
            if cfg.format == tswitch_cli::config::ReportFormat::Json && args.common.format.is_none()
            {
                // Tables default to CSV unless explicitly asked otherwise.
                cfg.format = tswitch_cli::config::ReportFormat::Csv;
            }
            let output = cmd_converge(&cfg, &args.dt)?;
            emit(args.common.out, output)
        }
        Command::Timebin(args) => {
            let cfg = resolve_config(&args.common, args.dt, args.t_early, args.t_late)
                .map_err(Failure::config)?;
            let output = cmd_timebin(&cfg)?;
            emit(args.common.out, output)
        }
        Command::Verify(args) => {
            let cfg = resolve_config(&args.common, args.dt, None, None).map_err(Failure::config)?;
            let output = cmd_verify(&cfg)?;
            emit(args.common.out, output)
        }
    }
}

/// Write the report to the requested sink. The human summary (with its
/// wall-clock time) never goes into the report file, so report bytes are a
/// pure function of config and seed.
fn emit(out: Option<PathBuf>, output: Output) -> Result<(), Failure> {
    match out {
        Some(path) => {
            std::fs::write(&path, output.report.as_bytes()).map_err(|e| {
                Failure::config(format!("cannot write report to {}: {e}", path.display()))
            })?;
            println!("{}", output.summary);
            println!("report written to {}", path.display());
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(output.report.as_bytes())
                .map_err(|e| Failure::config(format!("cannot write report: {e}")))?;
            eprintln!("{}", output.summary);
        }
    }
    Ok(())
}
