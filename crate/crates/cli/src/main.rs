use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use frcode_cli::args::Cli;
use frcode_cli::{run, EXIT_VALIDATION};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Usage errors count as validation failures; 2 is reserved for budget exhaustion.
            return if e.use_stderr() {
                ExitCode::from(EXIT_VALIDATION as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let mut err = io::stderr();
    let result = run(&cli, &mut out, &mut err);
    let _ = out.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let _ = writeln!(err, "error: {f}");
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
