//! Thin binary wrapper; the real logic lives in the library crate.

use clap::Parser;

use qksvm_cli::args::{Cli, Command};
use qksvm_cli::commands;

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Kernel(args) => commands::cmd_kernel(&args),
        Command::Run(args) => commands::cmd_run(&args),
        Command::Cv(args) => commands::cmd_cv(&args),
        Command::Predict(args) => commands::cmd_predict(&args),
        Command::Report(args) => commands::cmd_report(&args),
    };
    match result {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
