//! `emosent` command-line front end. Payloads go to stdout as JSON
//! (`{"manifest": ..., "result": ...}`); diagnostics go to stderr.

mod args;
mod commands;
mod config;
mod error;
mod manifest;
mod model;

use std::ffi::OsString;
use std::io::Write;
use std::process::ExitCode;

use clap::{CommandFactory, FromArgMatches};
use emosent::Execution;
use serde_json::json;

use crate::args::{Cli, Command};
use crate::error::{CliError, CliResult};
use crate::manifest::RunContext;

fn command() -> clap::Command {
    // later occurrences of a flag replace earlier ones (config values come first)
    Cli::command()
        .args_override_self(true)
        .mut_subcommands(|s| s.args_override_self(true))
}

fn run(raw: Vec<OsString>) -> CliResult<()> {
    let cmd = command();
    let (args, config_path) = config::expand(raw, &cmd)?;
    let matches = match cmd.try_get_matches_from(&args) {
        Ok(m) => m,
        Err(e) => {
            // --help / --version print and exit 0; real usage errors exit 2
            let _ = e.print();
            std::process::exit(e.exit_code());
        }
    };
    let cli = Cli::from_arg_matches(&matches).map_err(|e| CliError::Usage(e.to_string()))?;

    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let mut ctx = RunContext::new(exec);
    if let Some(path) = &config_path {
        ctx.input(path)?;
    }
    let result = commands::run(&cli.command, &mut ctx)?;
    let (seed, parameters) = commands::describe_command(&cli.command)?;
    let command_line = args
        .iter()
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    let manifest = ctx.finish(cli.command.name(), command_line, parameters, seed);

    if let Command::Prepare(a) = &cli.command {
        let path = a.out.join("manifest.json");
        let text = serde_json::to_string_pretty(&manifest)? + "\n";
        std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
    }
    let payload = json!({ "manifest": manifest, "result": result });
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{}", serde_json::to_string_pretty(&payload)?) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::io("<stdout>", e)),
        _ => Ok(()),
    }
}

fn main() -> ExitCode {
    match run(std::env::args_os().collect()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("emosent: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
