use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = testevo::Cli::parse();
    match testevo::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
