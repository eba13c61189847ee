use anyhow::Result;
use clap::{Parser, Subcommand};
use std::path::PathBuf;
use stylebandit::defense::StyleModelKind;
use stylebandit_cli::config::ExperimentConfig;
use stylebandit_cli::{
    cmd_analyze, cmd_attack, cmd_defend, cmd_fingerprint, cmd_regret, load_sweep_config, TrainOn,
};

/// Bandit-guided style-manipulation attacks on LLM judges: run attacks,
/// analyze logs, fit vulnerability fingerprints, evaluate style-control
/// defenses, and validate regret behavior on planted environments.
#[derive(Parser)]
#[command(name = "stylebandit", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured attack policies over a dataset, one run log per
    /// (judge, question, policy).
    Attack {
        /// Experiment config (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Line-delimited dataset of {question_id, question, a0, reference?}.
        #[arg(long)]
        dataset: PathBuf,
        /// Output directory for run logs.
        #[arg(long)]
        out: PathBuf,
    },
    /// Replay run logs, verify logged metrics, and emit metrics,
    /// trajectories, fingerprints, and (with a config) the transfer matrix.
    Analyze {
        #[arg(long)]
        logs: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Config used for the runs; enables transfer analysis across its
        /// synthetic judges.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Fit fingerprints per (judge, question) instead of pooled per judge.
        #[arg(long)]
        per_question: bool,
    },
    /// Fit regression fingerprints only.
    Fingerprint {
        #[arg(long)]
        logs: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        per_question: bool,
    },
    /// Fit a style-control model on the logs and report bias-stripped
    /// scores for base vs attacked answers.
    Defend {
        #[arg(long)]
        logs: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Style model kind: linear or kernel.
        #[arg(long, default_value = "linear")]
        model: String,
        /// Training corpus: pooled, base, or attacked.
        #[arg(long, default_value = "pooled")]
        train_on: String,
    },
    /// Run the misspecified-bandit regret sweep.
    Regret {
        #[arg(long)]
        out: PathBuf,
        /// Sweep grid config (JSON); defaults to the built-in grid.
        #[arg(long)]
        grid: Option<PathBuf>,
    },
    /// Write a ready-to-use offline dataset drawn from the built-in corpus.
    Dataset {
        #[arg(long)]
        out: PathBuf,
        /// Number of questions.
        #[arg(long, default_value_t = 10)]
        n: usize,
        /// Include each answer as its own pairwise reference.
        #[arg(long)]
        with_reference: bool,
    },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Attack {
            config,
            dataset,
            out,
        } => {
            let cfg = ExperimentConfig::load(&config)?;
            let summary = cmd_attack(&cfg, &dataset, &out)?;
            println!(
                "{} runs completed, {} failed, {} dataset lines skipped",
                summary.runs_ok,
                summary.runs_failed.len(),
                summary.dataset_lines_skipped.len()
            );
            if !summary.runs_failed.is_empty() {
                std::process::exit(1);
            }
        }
        Command::Analyze {
            logs,
            out,
            config,
            per_question,
        } => {
            let cfg = config.map(|p| ExperimentConfig::load(&p)).transpose()?;
            let outputs = cmd_analyze(&logs, &out, cfg.as_ref(), per_question)?;
            println!(
                "replayed {} runs; wrote {} report files to {}",
                outputs.replays.len(),
                outputs.files.len(),
                out.display()
            );
        }
        Command::Fingerprint {
            logs,
            out,
            per_question,
        } => {
            let files = cmd_fingerprint(&logs, &out, per_question)?;
            println!(
                "wrote {} fingerprint files to {}",
                files.len(),
                out.display()
            );
        }
        Command::Defend {
            logs,
            out,
            model,
            train_on,
        } => {
            let kind = match model.as_str() {
                "linear" => StyleModelKind::Linear,
                "kernel" => StyleModelKind::Kernel,
                other => anyhow::bail!("unknown model kind {other:?} (linear|kernel)"),
            };
            let outputs = cmd_defend(&logs, &out, kind, TrainOn::parse(&train_on)?)?;
            println!(
                "evaluated defense for {} judges; wrote {} files to {}",
                outputs.reports.len(),
                outputs.files.len(),
                out.display()
            );
        }
        Command::Regret { out, grid } => {
            let cfg = load_sweep_config(grid.as_deref())?;
            let outputs = cmd_regret(&cfg, &out)?;
            println!(
                "swept {} zeta levels; wrote {} files to {}",
                outputs.cells.len(),
                outputs.files.len(),
                out.display()
            );
        }
        Command::Dataset {
            out,
            n,
            with_reference,
        } => {
            stylebandit_cli::dataset::write_sample_dataset(&out, n, with_reference)?;
            println!("wrote {n} questions to {}", out.display());
        }
    }
    Ok(())
}
