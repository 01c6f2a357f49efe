use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use tolerant_cli::config::Config;
use tolerant_cli::report::{write_bound_rows, write_result_rows};
use tolerant_cli::scenarios;
use tolerant_cli::verify::run_verification_suite;

/// Seeded experiment harness for tolerant adversarially robust learning.
#[derive(Parser)]
#[command(name = "tolerant-cli", version, about)]
struct Cli {
    /// Path to a `key = value` config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed (overrides the config file).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output path for CSV or artifact files (overrides the config file).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Replicate count (overrides the config file).
    #[arg(long, global = true)]
    replicates: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the two-arm failure demo: tolerant perturb-and-smooth against
    /// non-tolerant perturb-only on the two-point distribution.
    DemoCounterexample,
    /// Compare the learners over an m x gamma grid with certified test losses.
    Compare,
    /// Emit the sample-size bound tables.
    Bounds,
    /// Run every brute-force oracle check; exits 1 on any failure.
    Verify,
    /// Train one perturb-and-smooth classifier and report certified losses.
    TpasRun,
    /// Compress a sample into a block file (also writes `<out>.sample`).
    CompressRun,
    /// Decode a block file; optionally evaluate against a sample file.
    Decompress {
        /// The block file to decode.
        #[arg(long)]
        blocks: PathBuf,
        /// Optional sample file to evaluate the decoded classifier on.
        #[arg(long)]
        data: Option<PathBuf>,
    },
}

fn load_config(cli: &Cli) -> Result<Config> {
    let mut cfg = match &cli.config {
        Some(path) => Config::from_path(path)?,
        None => Config::empty(),
    };
    if let Some(seed) = cli.seed {
        cfg.set("seed", seed.to_string());
    }
    if let Some(out) = &cli.out {
        cfg.set("out", out.display().to_string());
    }
    if let Some(replicates) = cli.replicates {
        cfg.set("replicates", replicates.to_string());
    }
    Ok(cfg)
}

fn out_path(cfg: &Config, default: &str) -> PathBuf {
    cfg.path("out").unwrap_or_else(|| PathBuf::from(default))
}

/// Runs the selected command; the returned flag is false when a check failed.
fn run(cli: &Cli, cfg: &Config) -> Result<bool> {
    match &cli.command {
        Command::DemoCounterexample => {
            let outcome = scenarios::run_counterexample(cfg)?;
            let path = out_path(cfg, "counterexample.csv");
            let mut rows = outcome.rows.clone();
            write_result_rows(&mut rows, &path)?;
            println!(
                "tolerant arm: certified robust loss 0 in {}/{} replicates",
                outcome.tolerant_successes, outcome.replicates
            );
            println!(
                "perturb-only arm: certified robust loss >= 0.5 in {}/{} replicates",
                outcome.perturb_only_failures, outcome.replicates
            );
            println!(
                "binary loss zero in all replicates: {}",
                outcome.binary_always_zero
            );
            println!("wrote {}", path.display());
            Ok(true)
        }
        Command::Compare => {
            let outcome = scenarios::run_compare(cfg)?;
            let path = out_path(cfg, "compare.csv");
            let mut rows = outcome.rows.clone();
            write_result_rows(&mut rows, &path)?;
            let mut all_ok = true;
            for trend in &outcome.trends {
                println!(
                    "trend {} gamma={}: mean loss {:.4} -> {:.4} (z = {:.2}) {}",
                    trend.learner,
                    trend.gamma,
                    trend.mean_first,
                    trend.mean_last,
                    trend.z,
                    if trend.passed { "ok" } else { "FAILED" }
                );
                all_ok &= trend.passed;
            }
            println!("wrote {}", path.display());
            Ok(all_ok)
        }
        Command::Bounds => {
            let rows = scenarios::run_bounds(cfg)?;
            let path = out_path(cfg, "bounds.csv");
            write_bound_rows(&rows, &path)?;
            for row in rows.iter().filter(|row| {
                (row.kind == "tpas_factor" || row.kind == "compression_factor")
                    && row.zeta_d == Some(5.0)
                    && row.gamma == Some(0.1)
            }) {
                println!("{} at zeta*d=5, gamma=0.1: {}", row.kind, row.value);
            }
            println!("wrote {}", path.display());
            Ok(true)
        }
        Command::Verify => {
            let report = run_verification_suite(cfg)?;
            for check in &report.checks {
                println!(
                    "{} {}: {}",
                    if check.passed { "PASS" } else { "FAIL" },
                    check.name,
                    check.detail
                );
            }
            Ok(report.all_passed())
        }
        Command::TpasRun => {
            let outcome = scenarios::run_tpas(cfg)?;
            let path = out_path(cfg, "classifier.txt");
            std::fs::write(&path, &outcome.classifier_text)
                .with_context(|| format!("writing {}", path.display()))?;
            println!(
                "certified train robust loss: {} (certified: {})",
                outcome.train_robust_loss, outcome.certified
            );
            println!("train binary loss: {}", outcome.train_binary_loss);
            println!(
                "oracle queries: {}, learner calls: {}",
                outcome.counters.oracle_queries, outcome.counters.learner_calls
            );
            println!("wrote {}", path.display());
            Ok(true)
        }
        Command::CompressRun => {
            let outcome = scenarios::run_compress(cfg)?;
            let path = out_path(cfg, "blocks.txt");
            outcome.run.output.write_file(&path)?;
            let sample_path = cfg
                .path("data_out")
                .unwrap_or_else(|| PathBuf::from(format!("{}.sample", path.display())));
            std::fs::write(&sample_path, &outcome.sample_text)
                .with_context(|| format!("writing {}", sample_path.display()))?;
            println!(
                "compressed {} points into k={} over T={} rounds (n={}, attempts={})",
                outcome.sample_text.lines().count(),
                outcome.run.output.total_points(),
                outcome.run.output.meta.rounds,
                outcome.run.net_size,
                outcome.run.attempts
            );
            println!(
                "final training error {} (target {}), certified: {:?}",
                outcome.run.final_error, outcome.run.target_error, outcome.run.verified
            );
            println!(
                "approximation: materialized {} points (theory-faithful size {:.3e})",
                outcome.run.approx_size, outcome.theoretical_approx_size
            );
            println!("wrote {} and {}", path.display(), sample_path.display());
            Ok(outcome.run.verified != Some(false))
        }
        Command::Decompress { blocks, data } => {
            let outcome = scenarios::run_decompress(cfg, blocks, data.as_deref())?;
            for line in &outcome.hypothesis_lines {
                println!("{line}");
            }
            println!("{}", outcome.meta_line);
            match outcome.data_robust_loss {
                Some((loss, certified)) => {
                    println!("robust loss on data: {loss} (certified: {certified})");
                    Ok(loss == 0.0)
                }
                None => Ok(true),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match load_config(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("configuration error: {e:#}");
            return ExitCode::from(2);
        }
    };
    match run(&cli, &cfg) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
