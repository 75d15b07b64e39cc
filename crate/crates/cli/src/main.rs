mod analysis;
mod args;
mod error;
mod network;
mod output;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use crate::args::{Cli, Command};
use crate::error::{CliError, Result};
use crate::output::Run;

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Stats(_) => "stats",
        Command::H0Test(_) => "h0-test",
        Command::FitH1(_) => "fit-h1",
        Command::SelectBeta(_) => "select-beta",
        Command::Likelihood(_) => "likelihood",
        Command::Features(_) => "features",
        Command::Synth(_) => "synth",
        Command::ServeMock(_) => "serve-mock",
        Command::Detect(_) => "detect",
        Command::Sample(_) => "sample",
    }
}

fn execute(cli: &Cli) -> Result<()> {
    if cli.global.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.global.threads)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let config = serde_json::to_value(cli)?;
    let mut run = Run::new(&cli.global.out_dir, command_name(&cli.command), config, cli.global.seed, rayon::current_num_threads())?;
    let outcome = match &cli.command {
        Command::Stats(a) => analysis::stats(a, &mut run),
        Command::H0Test(a) => analysis::h0_test(a, &mut run),
        Command::FitH1(a) => analysis::fit_h1(a, &mut run),
        Command::SelectBeta(a) => analysis::select(a, &mut run),
        Command::Likelihood(a) => analysis::likelihood(a, &mut run),
        Command::Features(a) => analysis::features(a, &mut run),
        Command::Synth(a) => network::synth(a, &mut run),
        Command::ServeMock(a) => network::serve(a, &mut run),
        Command::Detect(a) => network::detect(a, &mut run),
        Command::Sample(a) => network::sample(a, &mut run),
    };
    // Partial outputs of a failed run still get their metadata.
    run.finish()?;
    outcome
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("banscope: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
