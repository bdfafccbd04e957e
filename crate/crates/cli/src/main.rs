mod args;
mod commands;

use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command, Format};
use commands::Outcome;

const EXIT_ERROR: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;

fn json_output(cmd: &Command) -> bool {
    let format = match cmd {
        Command::Solve(a) => a.format,
        Command::Size(a) => a.format,
        Command::Compare(a) => a.format,
        Command::Emit(_) => Format::Text,
    };
    format == Format::Json
}

/// The status line goes to stdout, or to stderr when stdout carries JSON.
fn status_line(status: &str, to_stderr: bool) {
    let line = format!("STATUS: {status}");
    if to_stderr {
        eprintln!("{line}");
    } else {
        let mut out = std::io::stdout().lock();
        let _ = writeln!(out, "{line}");
        let _ = out.flush();
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).format_timestamp(None).init();
    if let Ok(seed) = std::env::var("PLAN_SEED") {
        log::debug!("PLAN_SEED={seed} ignored; the pipeline is deterministic");
    }

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            status_line("error", false);
            return ExitCode::from(EXIT_ERROR);
        }
    };

    let to_stderr = json_output(&cli.command);
    let result = match &cli.command {
        Command::Solve(a) => commands::solve(a),
        Command::Size(a) => commands::size(a),
        Command::Compare(a) => commands::compare(a),
        Command::Emit(a) => commands::emit(a),
    };
    match result {
        Ok(Outcome::Optimal) => {
            status_line("optimal", to_stderr);
            ExitCode::SUCCESS
        }
        Ok(Outcome::Done) => {
            status_line("ok", to_stderr);
            ExitCode::SUCCESS
        }
        Ok(Outcome::Infeasible) => {
            status_line("infeasible", to_stderr);
            ExitCode::from(EXIT_INFEASIBLE)
        }
        Err(e) => {
            if e.is::<commands::UsageError>() {
                eprintln!("usage error: {e}");
            } else {
                eprintln!("error: {e:#}");
            }
            status_line("error", to_stderr);
            ExitCode::from(EXIT_ERROR)
        }
    }
}
