use clap::Parser;

use equilens::app::{self, Cli};

/// Exit codes: 0 success, 1 a verification ran and failed, 2 invalid or
/// unsupported request, 3 exceeded search budget. Argument-parse errors
/// from clap also exit 2.
fn main() {
    let cli = Cli::parse();
    match app::run(cli) {
        Ok(out) => {
            print!("{}", out.text);
            if !out.passed {
                std::process::exit(1);
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(app::exit_code(&err));
        }
    }
}
