use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use aggnash::harness::checks::{assumption_suite, CheckOptions};
use aggnash::harness::{compare, write_results, Experiment, ExperimentConfig};
use aggnash::{Algorithm, Error};

#[derive(Parser)]
#[command(name = "aggnash", version, about = "Distributed Nash-equilibrium seeking experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment config (JSON); built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    iters: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one algorithm and write the aggregate CSV.
    Run {
        #[command(flatten)]
        common: Common,
        /// oe, pga or extrag.
        #[arg(long)]
        algo: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve for the equilibrium and print it.
    Oracle {
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Run all three algorithms and emit a comparison plot script.
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
    /// Check the standing assumptions on the configured instance.
    Validate {
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

/// Failures that should exit with the usage code.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct Usage(String);

fn load_config(path: Option<&Path>) -> anyhow::Result<ExperimentConfig> {
    match path {
        None => Ok(ExperimentConfig::default()),
        Some(p) => ExperimentConfig::load(p).map_err(|e| Usage(e.to_string()).into()),
    }
}

fn apply(common: &Common) -> anyhow::Result<ExperimentConfig> {
    let mut cfg = load_config(common.config.as_deref())?;
    if let Some(t) = common.iters {
        cfg.iterations = t;
    }
    if let Some(t) = common.trials {
        cfg.trials = t;
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    cfg.validate().map_err(|e| Usage(e.to_string()))?;
    Ok(cfg)
}

fn prepare(cfg: ExperimentConfig) -> anyhow::Result<Experiment> {
    Experiment::prepare(cfg).map_err(|e| match e {
        Error::Config(_) | Error::Parse { .. } => Usage(e.to_string()).into(),
        other => anyhow::Error::new(other).context("preparing experiment"),
    })
}

fn fmt_point(x: &[Vec<f64>]) -> String {
    let parts: Vec<String> = x.iter().flatten().map(|v| v.to_string()).collect();
    format!("({})", parts.join(", "))
}

fn execute(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Run { common, algo, out } => {
            let mut cfg = apply(&common)?;
            if let Some(name) = algo {
                cfg.algorithm = name.parse::<Algorithm>().map_err(|e| Usage(e.to_string()))?;
            }
            let out = out.or_else(|| cfg.output.csv.clone()).unwrap_or_else(|| PathBuf::from(format!("{}.csv", cfg.algorithm)));
            let exp = prepare(cfg)?;
            let outcome = exp.run(exp.config.algorithm)?;
            write_results(&outcome.result, &out)?;
            let last = outcome.result.rows.last().context("no rows recorded")?;
            println!(
                "{}: k = {}, mean |x - x*|^2 = {:e}, max tracking drift = {:e}, samples = {}",
                outcome.algorithm, last.k, last.mean_sq_err, outcome.max_tracking_drift, outcome.total_samples
            );
            println!("wrote {}", out.display());
        }
        Command::Oracle { config } => {
            let exp = prepare(load_config(config.as_deref())?)?;
            println!("x* = {}", fmt_point(&exp.solution.x_star));
            println!("residual = {:e}, iterations = {}", exp.solution.residual, exp.solution.iterations_used);
        }
        Command::Compare { common, out } => {
            let cfg = apply(&common)?;
            let res = compare(&cfg, &out)?;
            for (o, (_, path)) in res.outcomes.iter().zip(&res.csvs) {
                let last = o.result.rows.last().context("no rows recorded")?;
                println!("{:>6}: final mean |x - x*|^2 = {:e} -> {}", o.algorithm.name(), last.mean_sq_err, path.display());
            }
            println!("plot script: {}", res.script.display());
        }
        Command::Validate { config } => {
            let exp = prepare(load_config(config.as_deref())?)?;
            let opts = CheckOptions {
                graph_seed: exp.graph_seed(0),
                seed: exp.config.seed,
                ..CheckOptions::default()
            };
            let suite = assumption_suite(&exp.game, &exp.noise, &exp.constants, &exp.graphs, &opts)?;
            for c in &suite {
                println!("{c}");
            }
            let failed = suite.iter().filter(|c| !c.passed).count();
            if failed > 0 {
                anyhow::bail!("{failed} assumption check(s) failed");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<Usage>() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
