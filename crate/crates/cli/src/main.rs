use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use pca_cli::{dispatch, render, Cli, CliError};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(&cli) {
        Ok(doc) => {
            let text = render(&doc);
            match &cli.config.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, &text) {
                        eprintln!("{}", CliError::Io { path: path.display().to_string(), source: e });
                        return ExitCode::from(2);
                    }
                }
                // a closed pipe only means nobody is reading
                None => {
                    let _ = std::io::stdout().write_all(text.as_bytes());
                }
            }
            ExitCode::from(doc.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("pca: {e}");
            ExitCode::from(2)
        }
    }
}
