//! `zlab`: command-line driver for the experiment harness.
//!
//! Exit codes: 0 on success, 2 on configuration errors, 3 on numerical or
//! runtime aborts. A blow-up inside a simulated trajectory is outcome data
//! and still exits 0.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use zlab_core::harness::{run, ExperimentKind, Overrides, RunConfig};
use zlab_core::ZlabError;

#[derive(Parser)]
#[command(
    name = "zlab",
    version,
    about = "Stochastic Zakharov simulation and diagnostics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One trajectory with diagnostics.
    Simulate(Common),
    /// Monte-Carlo ensemble of trajectories.
    Montecarlo(Common),
    /// Scattering probability over a sweep of noise strengths.
    Scatterprob(Common),
    /// Direct versus rescaled schemes under time-step refinement.
    Equivalence(Common),
    /// Ground-state constant table.
    Groundstate(Common),
    /// Adapted norms of a space-time block, or an estimate-constant sweep.
    Norms(Common),
    /// Path variation, Hölder and Besov statistics.
    Variation(Common),
}

#[derive(Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `output` in the configuration).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    paths: Option<usize>,
    /// Worker threads; the ZLAB_THREADS environment variable takes precedence.
    #[arg(long)]
    threads: Option<usize>,
}

fn split(cmd: Command) -> (ExperimentKind, Common) {
    match cmd {
        Command::Simulate(c) => (ExperimentKind::Simulate, c),
        Command::Montecarlo(c) => (ExperimentKind::Montecarlo, c),
        Command::Scatterprob(c) => (ExperimentKind::Scatterprob, c),
        Command::Equivalence(c) => (ExperimentKind::Equivalence, c),
        Command::Groundstate(c) => (ExperimentKind::Groundstate, c),
        Command::Norms(c) => (ExperimentKind::Norms, c),
        Command::Variation(c) => (ExperimentKind::Variation, c),
    }
}

fn threads(flag: Option<usize>) -> Result<Option<usize>, ZlabError> {
    match std::env::var("ZLAB_THREADS") {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| ZlabError::Config {
            path: "ZLAB_THREADS".into(),
            message: format!("`{v}` is not a thread count"),
        }),
        Err(_) => Ok(flag),
    }
}

fn execute(kind: ExperimentKind, args: Common) -> Result<(), ZlabError> {
    let text = std::fs::read_to_string(&args.config).map_err(|e| ZlabError::Config {
        path: "<file>".into(),
        message: format!("{}: {e}", args.config.display()),
    })?;
    let mut cfg = RunConfig::from_toml_str_as(&text, kind)?;
    Overrides {
        seed: args.seed,
        paths: args.paths,
        threads: None,
    }
    .apply(&mut cfg)?;
    if let Some(out) = args.out {
        cfg.output = Some(out);
    }
    let out_dir = cfg.output.clone().ok_or_else(|| ZlabError::Config {
        path: "output".into(),
        message: "no output directory (set `output` or pass --out)".into(),
    })?;
    let output = run(&cfg, threads(args.threads)?)?;
    output.write(&out_dir)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&output.result.aggregates)?
    );
    eprintln!("results written to {}", out_dir.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = split(cli.command);
    match execute(kind, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ ZlabError::Config { .. }) => {
            eprintln!("zlab: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("zlab: {e}");
            ExitCode::from(3)
        }
    }
}
