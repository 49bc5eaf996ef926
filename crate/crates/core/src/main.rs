use clap::{Parser, ValueEnum};
use fracbubble::cli::{run, Invocation, WORKERS_ENV};
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    Constants,
    Lattice,
    Interactions,
    Energy,
    Reduce,
    Residual,
    Pohozaev,
    All,
}

/// Numerical checks for concentrating solutions of the fractional
/// Schrödinger equation.
#[derive(Debug, Parser)]
#[command(version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// JSON run configuration; defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Monte Carlo seed (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated suites for `all`.
    #[arg(long)]
    suite: Option<String>,
}

fn main() {
    let args = Args::parse();
    if let Some(n) = std::env::var(WORKERS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let command = format!("{:?}", args.command).to_lowercase();
    let inv = Invocation { command, config: args.config, out: args.out, seed: args.seed, suite: args.suite };
    std::process::exit(run(&inv));
}
