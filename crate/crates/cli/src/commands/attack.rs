//! `attack`: run the configured policies over a dataset and write one
//! run log per (judge, question, policy).

use crate::config::{BanditScope, ExperimentConfig};
use crate::dataset::load_dataset;
use anyhow::{Context, Result};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use stylebandit::attack::{run_attack, AttackInput, AttackRunConfig, Policy, RunDeps};
use stylebandit::bandit::ArmState;
use stylebandit::hash::fnv1a_str;
use stylebandit::runlog::{records_for_run, save_jsonl, LogOptions};

#[derive(Debug, Default)]
pub struct AttackSummary {
    pub log_files: Vec<PathBuf>,
    pub runs_ok: usize,
    /// (run stem, error message) for runs that aborted.
    pub runs_failed: Vec<(String, String)>,
    /// (line number, error) for dataset lines that were skipped.
    pub dataset_lines_skipped: Vec<(usize, String)>,
}

fn sanitize(id: &str) -> String {
    id.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '-'
            }
        })
        .collect()
}

/// Seed for one run: the experiment seed mixed with the question id, shared
/// across policies and judges so paired comparisons see identical draws.
fn run_seed(base: u64, question_id: &str) -> u64 {
    base ^ fnv1a_str(question_id)
}

pub fn cmd_attack(
    config: &ExperimentConfig,
    dataset_path: &Path,
    out_dir: &Path,
) -> Result<AttackSummary> {
    config.validate()?;
    // Remote credentials and templates resolve before any run starts.
    let judges = config.build_judges()?;
    let editor = config.build_editor()?;
    let embedder = config.build_embedder()?;
    let (actions, rewrite) = config.build_actions()?;
    let dataset = load_dataset(dataset_path)?;
    std::fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;

    let mut summary = AttackSummary {
        dataset_lines_skipped: dataset.skipped.clone(),
        ..AttackSummary::default()
    };
    for (lineno, err) in &dataset.skipped {
        eprintln!("dataset line {lineno}: {err} (skipped)");
    }

    let log_opts = LogOptions {
        hash_only: config.hash_only,
        include_arms: config.log_arms,
        fixed_timestamp_ms: None,
    };

    struct Job<'a> {
        judge_idx: usize,
        policy: Policy,
        input: &'a AttackInput,
    }
    let mut jobs = Vec::new();
    for (judge_idx, _) in judges.iter().enumerate() {
        for &policy in &config.policies {
            for input in &dataset.inputs {
                jobs.push(Job {
                    judge_idx,
                    policy,
                    input,
                });
            }
        }
    }

    let results: Mutex<Vec<(String, Result<PathBuf, String>)>> = Mutex::new(Vec::new());
    let run_job = |job: &Job| {
        let judge = judges[job.judge_idx].as_ref();
        let stem = format!(
            "{}__{}__{}",
            sanitize(judge.id()),
            sanitize(&job.input.question_id),
            job.policy.name()
        );
        let cfg = AttackRunConfig {
            rounds: config.rounds,
            pool_capacity: config.pool_capacity,
            policy: job.policy,
            seed: run_seed(config.seed, &job.input.question_id),
            alpha: config.alpha,
            semantic_gate: config.semantic_gate,
            reject_low_similarity: config.reject_low_similarity,
        };
        let deps = RunDeps {
            judge,
            editor: editor.as_ref(),
            embedder: embedder.as_ref(),
            actions: &actions,
            rewrite: &rewrite,
        };
        let outcome = run_attack(&cfg, job.input, &deps, None)
            .map_err(|e| e.to_string())
            .and_then(|run| {
                let path = out_dir.join(format!("{stem}.jsonl"));
                let records = records_for_run(&run, &stem, &log_opts);
                save_jsonl(&records, &path).map_err(|e| e.to_string())?;
                Ok(path)
            });
        results.lock().unwrap().push((stem, outcome));
    };

    if config.bandit_scope == BanditScope::Shared {
        // Shared-bandit training is a sequential protocol: arms persist
        // across questions per (judge, policy).
        for judge_arc in &judges {
            for &policy in &config.policies {
                let mut arms: Vec<ArmState<f64>> = Vec::new();
                for input in &dataset.inputs {
                    let judge = judge_arc.as_ref();
                    let stem = format!(
                        "{}__{}__{}",
                        sanitize(judge.id()),
                        sanitize(&input.question_id),
                        policy.name()
                    );
                    let cfg = AttackRunConfig {
                        rounds: config.rounds,
                        pool_capacity: config.pool_capacity,
                        policy,
                        seed: run_seed(config.seed, &input.question_id),
                        alpha: config.alpha,
                        semantic_gate: config.semantic_gate,
                        reject_low_similarity: config.reject_low_similarity,
                    };
                    let deps = RunDeps {
                        judge,
                        editor: editor.as_ref(),
                        embedder: embedder.as_ref(),
                        actions: &actions,
                        rewrite: &rewrite,
                    };
                    let shared = (policy == Policy::Bite).then_some(&mut arms);
                    let outcome = run_attack(&cfg, input, &deps, shared)
                        .map_err(|e| e.to_string())
                        .and_then(|run| {
                            let path = out_dir.join(format!("{stem}.jsonl"));
                            save_jsonl(&records_for_run(&run, &stem, &log_opts), &path)
                                .map_err(|e| e.to_string())?;
                            Ok(path)
                        });
                    results.lock().unwrap().push((stem, outcome));
                }
            }
        }
    } else {
        // Independent runs execute on a bounded worker pool.
        let next = AtomicUsize::new(0);
        let workers = config.max_in_flight.clamp(1, 64);
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    if i >= jobs.len() {
                        break;
                    }
                    run_job(&jobs[i]);
                });
            }
        });
    }

    let mut results = results.into_inner().unwrap();
    results.sort_by(|a, b| a.0.cmp(&b.0));
    for (stem, outcome) in results {
        match outcome {
            Ok(path) => {
                summary.runs_ok += 1;
                summary.log_files.push(path);
            }
            Err(err) => {
                eprintln!("run {stem} failed: {err}");
                summary.runs_failed.push((stem, err));
            }
        }
    }
    Ok(summary)
}
