use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use panel_lattices_cli::{run, Cli, Format, RunConfig, CACHE_ENV};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cache = std::env::var_os(CACHE_ENV).map(Into::into);
    let config = match RunConfig::from_cli(cli, cache) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(jobs) = config.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let report = match run(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let body = match config.format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
    };
    let written = match &config.output {
        Some(path) => std::fs::write(path, body),
        None => std::io::stdout().write_all(body.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        for r in report.records.iter().filter(|r| r.status == panel_lattices_cli::Status::Fail) {
            eprintln!("failed: {} ({})", r.name, r.data);
        }
        ExitCode::FAILURE
    }
}
