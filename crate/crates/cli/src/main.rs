use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use minimax_dsac::env::AdversaryMode;
use minimax_dsac::eval::evaluate_detailed;
use minimax_dsac::report::{self, aggregate_runs, save_run};
use minimax_dsac::stats::{mean, welch_t_test};
use minimax_dsac::{train, Algo, Checkpoint, TrainConfig};

#[derive(Parser)]
#[command(name = "mdsac", version, about = "Minimax distributional soft actor-critic for an unsignalized intersection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train an agent and write its run directory.
    Train {
        /// `key = value` config file; defaults are used for missing keys.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_parser = parse_algo)]
        algo: Option<Algo>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate a checkpoint's protagonist against a scripted adversary.
    Eval {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long, value_parser = parse_mode)]
        mode: AdversaryMode,
        #[arg(long, default_value_t = 20)]
        episodes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Config whose `env.*` keys describe the evaluation environment.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Aggregate several run directories into bands, box plots and a comparison table.
    Report {
        #[arg(long, num_args = 1.., required = true)]
        runs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Welch t-test on the returns of two evaluation CSVs.
    Compare {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
}

fn parse_algo(s: &str) -> Result<Algo, String> {
    s.parse().map_err(|e: minimax_dsac::Error| e.to_string())
}

fn parse_mode(s: &str) -> Result<AdversaryMode, String> {
    let mode: AdversaryMode = s.parse().map_err(|e: minimax_dsac::Error| e.to_string())?;
    if !AdversaryMode::EVAL_MODES.contains(&mode) {
        return Err(format!("`{s}` is not an evaluation mode (aggressive, conservative, random)"));
    }
    Ok(mode)
}

fn load_config(path: Option<&PathBuf>) -> Result<TrainConfig> {
    match path {
        Some(p) => TrainConfig::load(p).with_context(|| format!("loading config {}", p.display())),
        None => Ok(TrainConfig::default()),
    }
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Train { config, algo, seed, out } => {
            let mut cfg = load_config(config.as_ref())?;
            if let Some(algo) = algo {
                cfg.algo = algo;
            }
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            cfg.validate()?;
            eprintln!("training {} (seed {}) for {} steps", cfg.algo, cfg.seed, cfg.total_steps);
            let artifacts = train(cfg)?;
            if let Some(row) = artifacts.log.last() {
                eprintln!("final average return {:.2}", row.avg_return);
            }
            for e in &artifacts.evals {
                eprintln!("{:>13}: mean {:.2}, pass rate {:.2}", e.mode.name(), e.mean, e.pass_rate);
            }
            save_run(&artifacts, &out)?;
            println!("{}", out.display());
        }
        Command::Eval { checkpoint, mode, episodes, seed, config, out } => {
            if episodes == 0 {
                bail!("--episodes must be positive");
            }
            let env = load_config(config.as_ref())?.env;
            let ckpt = Checkpoint::load(&checkpoint)?;
            let policy = ckpt.protagonist()?;
            let (summary, records) = evaluate_detailed(&policy, mode, episodes, &env, seed)?;
            std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            let name = mode.name();
            report::write_eval_csv(&out.join(format!("eval_{name}.csv")), &summary, env.dt)?;
            report::write_trajectory_csv(&out.join(format!("trajectory_{name}.csv")), &records[0])?;
            report::write_summary_csv(&out.join("eval_summary.csv"), std::slice::from_ref(&summary))?;
            report::plot_trajectory(&out.join(format!("trajectory_{name}.svg")), name, &records[0].rows)?;
            println!(
                "{name}: mean {:.3}, std {:.3}, pass rate {:.3}, collision rate {:.3}",
                summary.mean, summary.std, summary.pass_rate, summary.collision_rate
            );
        }
        Command::Report { runs, out } => {
            for path in aggregate_runs(&runs, &out)? {
                println!("{}", path.display());
            }
        }
        Command::Compare { a, b } => {
            let ra = report::read_eval_returns(&a)?;
            let rb = report::read_eval_returns(&b)?;
            let w = welch_t_test(&ra, &rb)?;
            println!("mean_a {:.6} mean_b {:.6}", mean(&ra), mean(&rb));
            println!("t {:.6} df {:.3} p {:.6e}", w.t, w.df, w.p);
        }
    }
    Ok(())
}
