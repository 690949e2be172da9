use std::path::PathBuf;
use std::process::ExitCode;

use afc_cli::{config, run_config, CliError};
use clap::Parser;

/// Reproduce AFC memory figure data and run parameter sweeps.
#[derive(Parser, Debug)]
#[command(name = "afc", version)]
struct Args {
    /// Experiment config; defaults are used for every missing key.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, overriding `[output] dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Treat design warnings as errors (exit code 4).
    #[arg(long)]
    strict: bool,
    /// Worker threads for sweeps and the time-domain solver.
    #[arg(long)]
    threads: Option<usize>,
    /// Print a commented config template with all defaults and exit.
    #[arg(long)]
    emit_template: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    if args.emit_template {
        print!("{}", config::template());
        return ExitCode::SUCCESS;
    }
    if let Some(n) = args.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start {n} threads: {e}");
            return ExitCode::from(1);
        }
    }
    let text = match &args.config {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => return fail(&CliError::io(path, e)),
        },
        None => String::new(),
    };
    match run_config(&text, args.out.as_deref(), args.strict) {
        Ok(warnings) => {
            for w in warnings {
                eprintln!("warning: {w}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}

fn fail(e: &CliError) -> ExitCode {
    if let CliError::Strict(warnings) = e {
        for w in warnings {
            eprintln!("warning: {w}");
        }
    }
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}
