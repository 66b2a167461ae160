use std::path::PathBuf;
use std::process::ExitCode;

use bloch_fiber_cli::{run, thread_cap, CliError, Command, RunConfig};
use clap::Parser;

/// Bloch-Floquet fibering of lattice models: verification suites, band
/// tables, Chern numbers, butterfly spectra and finite-group decompositions.
#[derive(Parser, Debug)]
#[command(name = "bloch-fiber", version, about)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// JSON run configuration.
    config: PathBuf,
    /// Output directory; overrides `output_dir` from the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for randomized probes; overrides `seed` from the config.
    #[arg(long)]
    seed: Option<u64>,
}

fn load(args: &Args) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Config(format!("{}: {e}", args.config.display())))?;
    let mut cfg = RunConfig::from_json(&text)?;
    if let Some(out) = &args.out {
        cfg.output_dir = Some(out.clone());
    }
    if let Some(seed) = args.seed {
        cfg.seed = Some(seed);
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap() {
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("cannot start worker pool: {e}");
            return ExitCode::from(1);
        }
    };
    let result = load(&args).and_then(|cfg| pool.install(|| run(args.command, &cfg)));
    match result {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("bloch-fiber: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
