//! Command-line front end: each subcommand runs the pipeline up to its stage
//! and writes the corresponding tables plus `manifest.json`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use stocknet::pipeline::{run_command, Command, RunConfig};
use stocknet::Error;

#[derive(Parser)]
#[command(name = "stocknet", version, about = "Stock correlation and causality network analysis")]
struct Cli {
    /// RunConfig JSON file.
    #[arg(long, global = true, default_value = "stocknet.json")]
    config: PathBuf,
    /// Output directory (overrides the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for parallel sections.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Seed for permutation tests (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Load and filter prices, write exclusions and log returns.
    Ingest,
    /// Per-stage correlation matrices and their summaries.
    Correlate,
    /// Threshold search (or the fixed override).
    Threshold,
    /// Edge lists of the per-stage networks.
    Network,
    /// Topology, centralities, centralizations, degree distributions.
    Metrics,
    /// Per-sector statistics.
    Sectors,
    /// Granger causality p-values and alpha sweeps.
    Granger,
    /// Permutation regressions of centrality on fundamentals.
    Qap,
    /// SVG plots from the degree-distribution tables in the output directory.
    Report,
    /// Everything above.
    All,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Ingest => Command::Ingest,
            Cmd::Correlate => Command::Correlate,
            Cmd::Threshold => Command::Threshold,
            Cmd::Network => Command::Network,
            Cmd::Metrics => Command::Metrics,
            Cmd::Sectors => Command::Sectors,
            Cmd::Granger => Command::Granger,
            Cmd::Qap => Command::Qap,
            Cmd::Report => Command::Report,
            Cmd::All => Command::All,
        }
    }
}

fn run(cli: &Cli) -> Result<(), Error> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(Error::config("--jobs must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Error::config(format!("thread pool: {e}")))?;
    }
    let mut cfg = RunConfig::load(&cli.config)?;
    if let Some(out) = &cli.out {
        cfg.output_dir = std::env::current_dir()
            .map_err(|e| Error::io(".", e))?
            .join(out);
    }
    if let Some(seed) = cli.seed {
        cfg.qap.seed = seed;
    }
    let manifest = run_command(&cfg, cli.command.into())?;
    let dir = cfg.output_path();
    for f in &manifest.files {
        println!("{}  {}", f.sha256, dir.join(&f.path).display());
    }
    if let Some(theta) = manifest.theta0 {
        println!("theta0 = {theta}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
