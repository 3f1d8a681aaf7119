use std::process::ExitCode;

use clap::Parser;
use png_sources_cli::{commands, RunConfig};

fn main() -> ExitCode {
    let cfg = RunConfig::parse();
    match commands::run(&cfg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pngsrc: {e}");
            ExitCode::from(e.code())
        }
    }
}
