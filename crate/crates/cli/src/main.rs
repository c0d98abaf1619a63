//! `qlab` command-line front end.

mod args;
mod commands;
mod error;
mod output;

use std::process::ExitCode;

use clap::{CommandFactory, FromArgMatches};

use args::{Cli, Command, FileConfig};
use error::{CliError, CliResult};

fn long_version() -> String {
    let constants = match std::env::var_os(commands::chain::CONSTANTS_ENV) {
        Some(path) => format!("{}, overridden from {}", qlab::constants::PROVENANCE, path.to_string_lossy()),
        None => qlab::constants::PROVENANCE.to_string(),
    };
    format!("{}\nconstants: {constants}", output::VERSION)
}

fn load_config(cli: &Cli) -> CliResult<FileConfig> {
    let Some(path) = &cli.config else {
        return Ok(FileConfig::default());
    };
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> CliResult<()> {
    let file = load_config(&cli)?;
    let seed = cli.seed.or(file.seed).unwrap_or(0);
    let format = cli.format.or(file.format);
    let out = cli.out.clone().or(file.out.clone());

    let text = match cli.command {
        Command::Zeno(p) => commands::zeno::run(p.over(file.zeno.unwrap_or_default()), seed, format)?,
        Command::Estimate(p) => commands::estimate::run(p.over(file.estimate.unwrap_or_default()), seed, format)?,
        Command::Channel(p) => commands::channel::run(p.over(file.channel.unwrap_or_default()), seed, format)?,
        Command::Chain(p) => commands::chain::run(p.over(file.chain.unwrap_or_default()), seed, format)?,
        Command::Rabi(p) => commands::rabi::run(p.over(file.rabi.unwrap_or_default()), seed, format)?,
    };
    output::emit(out.as_deref(), &text)
}

fn main() -> ExitCode {
    let matches = Cli::command().long_version(long_version()).get_matches();
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qlab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
