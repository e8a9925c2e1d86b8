use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use dfourier_cli::{run, Command, RunConfig};

/// Distorted Fourier transform and spectral kernels for -d²/dx² + V.
#[derive(Parser, Debug)]
#[command(name = "dfourier", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// Flat key=value run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for CSV artifacts and report.json.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads (0 = one per core).
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

fn main() -> ExitCode {
    // clap exits with status 2 on bad arguments.
    let args = Args::parse();
    if args.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(args.threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let cfg = match RunConfig::from_file(&args.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}: {e}", args.config.display());
            return ExitCode::from(2);
        }
    };
    match run(args.command, &cfg, &args.out) {
        Ok(outcome) => {
            for c in &outcome.report.checks {
                println!(
                    "{:<20} {:>12.3e}  tol {:>8.1e}  {}",
                    c.name,
                    c.value,
                    c.tolerance,
                    if c.passed { "ok" } else { "FAIL" }
                );
            }
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            if outcome.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
