//! `impact`: command-line front end for the impact-dynamics library.
//!
//! Subcommands: `iim`, `impulse`, `simulate`, `identify`, `sweep`. Exit
//! codes: 0 on success, 2 on input or parse errors, 3 on numerical failures.

use clap::Parser;

mod args;
mod commands;
mod errors;

use args::{Cli, Command};
use errors::CliError;

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Iim(args) => commands::iim::run(&args),
        Command::Impulse(args) => commands::impulse::run(&args),
        Command::Simulate(args) => commands::simulate::run(&args),
        Command::Identify(args) => commands::identify::run(&args),
        Command::Sweep(args) => commands::sweep::run(&args),
    };
    match result {
        Ok(()) => {}
        Err(CliError::Input(err)) => {
            eprintln!("error: {err:#}");
            std::process::exit(2);
        }
        Err(CliError::Numerical(err)) => {
            eprintln!("numerical failure: {err:#}");
            std::process::exit(3);
        }
    }
}
