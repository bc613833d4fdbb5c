//! Command-line entry point of the capillary-gravity Whitham prover.

use std::path::PathBuf;
use std::process::ExitCode;

use capwhitham::cli::{load_config, run};
use clap::Parser;

/// Computer-assisted existence and stability proofs for capillary-gravity
/// Whitham solitary waves.
#[derive(Debug, Parser)]
#[command(version, about)]
struct Args {
    /// Flat `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Stage: solve, constants, prove, spectrum, stability, recheck or export.
    #[arg(long)]
    mode: Option<String>,
    /// Worker threads.
    #[arg(long, env = "CAPWHITHAM_THREADS")]
    threads: Option<usize>,
    /// Parameter preset: whitham-small, thm-T0 or thm-T05.
    #[arg(long)]
    preset: Option<String>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = load_config(args.preset.as_deref(), args.config.as_deref(), args.mode.as_deref(), args.threads).and_then(|cfg| {
        if let Some(k) = cfg.threads {
            rayon::ThreadPoolBuilder::new().num_threads(k).build_global().ok();
        }
        run(&cfg)
    });
    match result {
        Ok(report) => {
            print!("{report}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
