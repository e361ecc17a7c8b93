mod args;
mod commands;
mod config;
mod error;
mod identifier;
mod inputs;
mod output;

use std::process::ExitCode;

use clap::Parser;
use wdcprod_core::domains::UreqTransport;

use args::{Cli, Command};
use commands::CleanTargets;
use error::CliError;

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Profile(run) => commands::analyse("profile", run.resolve()?),
        Command::Validate { run, verdicts } => commands::validate(run.resolve()?, verdicts),
        Command::Languages(run) => commands::analyse("languages", run.resolve()?),
        Command::Windows(run) => commands::analyse("windows", run.resolve()?),
        Command::Domains { run, ranks, trust, top } => {
            let mut c = run.resolve()?;
            ranks.apply(&mut c);
            trust.apply(&mut c)?;
            if let Some(top) = top {
                c.domains.top = top;
            }
            commands::domains(c)
        }
        Command::Clean { run, ranks, trust, cleaned, exclusions, no_property_filter, no_node_filter, language_filter } => {
            let mut c = run.resolve()?;
            ranks.apply(&mut c);
            trust.apply(&mut c)?;
            c.clean.property_filter &= !no_property_filter;
            c.clean.node_filter &= !no_node_filter;
            c.clean.language_filter |= language_filter;
            commands::clean(c, CleanTargets { cleaned, exclusions })
        }
        Command::Normalize { run, map, cleaned } => commands::normalize(run.resolve()?, map, cleaned),
        Command::Generate(args) => commands::generate_corpus(args),
        Command::RefreshPsl { url, out } => commands::refresh_psl(&url, &out, &UreqTransport::default()),
        Command::Config(run) => commands::print_config(run.resolve()?),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("wdcprod: {e}");
            e.exit_code()
        }
    }
}
