//! `analyze`: replay run logs (verifying every logged metric bit-for-bit),
//! then emit metrics tables, score-trajectory plots, per-judge regression
//! fingerprints, and — when the config defines several synthetic judges —
//! the transfer-ASR matrix.

use crate::config::ExperimentConfig;
use crate::report::{fmt_f64, fmt_opt, Table};
use crate::svg;
use anyhow::{Context, Result};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use stylebandit::analysis::{
    build_transfer_matrix, fit_fingerprint_pruned, FingerprintRecord, TransferCase,
};
use stylebandit::attack::{unbeaten_rate, Policy};
use stylebandit::judges::Judge;
use stylebandit::runlog::{load_log_dir, replay_run, ReplayedRun};
use stylebandit::stylometry::{Feature, FeatureVector};

pub struct AnalyzeOutputs {
    pub replays: Vec<ReplayedRun>,
    pub files: Vec<PathBuf>,
}

pub fn cmd_analyze(
    logs_dir: &Path,
    out_dir: &Path,
    config: Option<&ExperimentConfig>,
    per_question: bool,
) -> Result<AnalyzeOutputs> {
    let logs = load_log_dir(logs_dir)?;
    let mut replays = Vec::with_capacity(logs.len());
    for (name, records) in &logs {
        let replayed = replay_run(records).with_context(|| format!("replaying log {name}"))?;
        replays.push(replayed);
    }
    std::fs::create_dir_all(out_dir)?;
    let mut files = Vec::new();

    files.push(write_metrics(&replays, out_dir)?);
    files.push(write_unbeaten(&replays, out_dir)?);
    files.extend(write_trajectories(&replays, out_dir)?);
    files.extend(write_fingerprints(&replays, out_dir, per_question)?);
    if let Some(cfg) = config {
        let judges = cfg.synthetic_judges()?;
        if judges.len() >= 2 {
            files.extend(write_transfer(&replays, &judges, out_dir)?);
        }
    }
    Ok(AnalyzeOutputs { replays, files })
}

fn group_key(r: &ReplayedRun) -> (String, Policy) {
    (r.judge_id.clone(), r.policy)
}

fn write_metrics(replays: &[ReplayedRun], out_dir: &Path) -> Result<PathBuf> {
    let mut groups: BTreeMap<(String, Policy), Vec<&ReplayedRun>> = BTreeMap::new();
    for r in replays {
        groups.entry(group_key(r)).or_default().push(r);
    }
    let mut table = Table::new(&[
        "judge",
        "policy",
        "runs",
        "mean_initial",
        "mean_best_final",
        "mean_score_lift",
        "attack_success_rate",
    ]);
    table.comment("per-(judge, policy) aggregates recomputed from raw run logs");
    table.comment(
        "attack success: strictly higher best score (pointwise) or flipped verdict (pairwise)",
    );
    for ((judge, policy), runs) in &groups {
        let n = runs.len() as f64;
        let mean = |f: &dyn Fn(&ReplayedRun) -> f64| runs.iter().map(|r| f(r)).sum::<f64>() / n;
        table.row(vec![
            judge.clone(),
            policy.name().to_string(),
            runs.len().to_string(),
            fmt_f64(mean(&|r| r.initial_score)),
            fmt_f64(mean(&|r| r.best_final_score)),
            fmt_f64(mean(&|r| r.score_lift)),
            fmt_f64(mean(&|r| if r.attack_success { 1.0 } else { 0.0 })),
        ]);
    }
    let path = out_dir.join("metrics.tsv");
    table.write(&path)?;
    Ok(path)
}

fn write_unbeaten(replays: &[ReplayedRun], out_dir: &Path) -> Result<PathBuf> {
    // bite vs each baseline, paired on (judge, question)
    let mut by_jq: BTreeMap<(String, String), BTreeMap<Policy, f64>> = BTreeMap::new();
    for r in replays {
        by_jq
            .entry((r.judge_id.clone(), r.question_id.clone()))
            .or_default()
            .insert(r.policy, r.best_final_score);
    }
    let mut table = Table::new(&["judge", "baseline", "pairs", "unbeaten_rate"]);
    table.comment("fraction of paired questions where bite's final answer wins or ties");
    let mut judges: Vec<String> = replays
        .iter()
        .map(|r| r.judge_id.clone())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    judges.dedup();
    for judge in judges {
        for baseline in [
            Policy::Random,
            Policy::IterativeRewrite,
            Policy::HolisticRewrite,
        ] {
            let mut ours = Vec::new();
            let mut theirs = Vec::new();
            for ((j, _q), finals) in &by_jq {
                if *j != judge {
                    continue;
                }
                if let (Some(&a), Some(&b)) = (finals.get(&Policy::Bite), finals.get(&baseline)) {
                    ours.push(a);
                    theirs.push(b);
                }
            }
            if ours.is_empty() {
                continue;
            }
            table.row(vec![
                judge.clone(),
                baseline.name().to_string(),
                ours.len().to_string(),
                fmt_f64(unbeaten_rate(&ours, &theirs)),
            ]);
        }
    }
    let path = out_dir.join("unbeaten.tsv");
    table.write(&path)?;
    Ok(path)
}

type PolicySeries = Vec<(String, Vec<(f64, f64)>)>;

fn mean_series(series: Vec<&[f64]>) -> Vec<f64> {
    let max_len = series.iter().map(|s| s.len()).max().unwrap_or(0);
    (0..max_len)
        .map(|i| {
            let vals: Vec<f64> = series.iter().filter_map(|s| s.get(i).copied()).collect();
            vals.iter().sum::<f64>() / vals.len().max(1) as f64
        })
        .collect()
}

fn write_trajectories(replays: &[ReplayedRun], out_dir: &Path) -> Result<Vec<PathBuf>> {
    let mut groups: BTreeMap<(String, Policy), Vec<&ReplayedRun>> = BTreeMap::new();
    for r in replays {
        groups.entry(group_key(r)).or_default().push(r);
    }
    let mut table = Table::new(&[
        "judge",
        "policy",
        "round",
        "best_so_far_mean",
        "pool_mean_mean",
    ]);
    table.comment("mean trajectories across runs; round is 1-based");
    let mut by_judge: BTreeMap<String, PolicySeries> = BTreeMap::new();
    for ((judge, policy), runs) in &groups {
        let best = mean_series(
            runs.iter()
                .map(|r| r.best_so_far_series.as_slice())
                .collect(),
        );
        let pool = mean_series(runs.iter().map(|r| r.pool_mean_series.as_slice()).collect());
        for (i, (b, p)) in best.iter().zip(&pool).enumerate() {
            table.row(vec![
                judge.clone(),
                policy.name().to_string(),
                (i + 1).to_string(),
                fmt_f64(*b),
                fmt_f64(*p),
            ]);
        }
        by_judge.entry(judge.clone()).or_default().push((
            policy.name().to_string(),
            best.iter()
                .enumerate()
                .map(|(i, &b)| ((i + 1) as f64, b))
                .collect(),
        ));
    }
    let mut files = Vec::new();
    let path = out_dir.join("trajectories.tsv");
    table.write(&path)?;
    files.push(path);
    for (judge, series) in by_judge {
        let path = out_dir.join(format!("best_so_far_{judge}.svg"));
        svg::line_chart(
            &path,
            &format!("best-so-far score — judge {judge}"),
            "round",
            "score",
            &series,
        )?;
        files.push(path);
    }
    Ok(files)
}

pub(crate) fn write_fingerprints(
    replays: &[ReplayedRun],
    out_dir: &Path,
    per_question: bool,
) -> Result<Vec<PathBuf>> {
    let mut groups: BTreeMap<String, Vec<FingerprintRecord>> = BTreeMap::new();
    for r in replays {
        let key = if per_question {
            format!("{}__{}", r.judge_id, r.question_id)
        } else {
            r.judge_id.clone()
        };
        let bucket = groups.entry(key).or_default();
        for (ds, dmap) in &r.fingerprint_records {
            bucket.push((*ds, FeatureVector::from_map(dmap)?));
        }
    }
    let mut files = Vec::new();
    for (key, records) in &groups {
        let mut table = Table::new(&["feature", "beta", "std_error", "p_value", "significant"]);
        match fit_fingerprint_pruned(key, records, &Feature::regression_default()) {
            Ok((report, pruned)) => {
                table.comment(format!(
                    "n={} r_squared={} intercept={}",
                    report.n_observations,
                    fmt_f64(report.r_squared),
                    fmt_f64(report.intercept)
                ));
                if !report.dropped_zero_variance.is_empty() {
                    table.comment(format!(
                        "dropped zero-variance: {}",
                        report
                            .dropped_zero_variance
                            .iter()
                            .map(|f| f.name())
                            .collect::<Vec<_>>()
                            .join(", ")
                    ));
                }
                if !pruned.is_empty() {
                    table.comment(format!(
                        "pruned collinear: {}",
                        pruned
                            .iter()
                            .map(|f| f.name())
                            .collect::<Vec<_>>()
                            .join(", ")
                    ));
                }
                for (i, f) in report.features.iter().enumerate() {
                    table.row(vec![
                        f.name().to_string(),
                        fmt_f64(report.coefficients[i]),
                        fmt_f64(report.std_errors[i]),
                        fmt_f64(report.p_values[i]),
                        report.significant[i].to_string(),
                    ]);
                }
            }
            Err(e) => {
                table.comment(format!("fingerprint unavailable: {e}"));
            }
        }
        let path = out_dir.join(format!("fingerprint_{key}.tsv"));
        table.write(&path)?;
        files.push(path);
    }
    Ok(files)
}

fn write_transfer(
    replays: &[ReplayedRun],
    judges: &[std::sync::Arc<dyn Judge>],
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    // bite runs that succeeded on their source judge, with texts available
    let mut cases: BTreeMap<String, Vec<TransferCase>> = BTreeMap::new();
    for r in replays {
        if r.policy != Policy::Bite || !r.attack_success {
            continue;
        }
        let (Some(initial), Some(final_answer)) =
            (r.initial_text.clone(), r.best_final_text.clone())
        else {
            continue; // hash-only logs cannot be re-scored
        };
        cases
            .entry(r.judge_id.clone())
            .or_default()
            .push(TransferCase {
                question: r.question.clone().unwrap_or_else(|| r.question_id.clone()),
                initial_answer: initial,
                final_answer,
            });
    }
    let judge_refs: Vec<&dyn Judge> = judges.iter().map(|j| j.as_ref()).collect();
    let matrix = build_transfer_matrix(&cases, &judge_refs)?;

    let mut table = Table::new(&["source", "target", "transfer_asr"]);
    table.comment("fraction of source-successful attacks also successful on the target");
    for (i, source) in matrix.judge_ids.iter().enumerate() {
        for (j, target) in matrix.judge_ids.iter().enumerate() {
            table.row(vec![
                source.clone(),
                target.clone(),
                fmt_opt(matrix.cells[i][j]),
            ]);
        }
    }
    let tsv = out_dir.join("transfer.tsv");
    table.write(&tsv)?;
    let heat = out_dir.join("transfer.svg");
    svg::heatmap(
        &heat,
        "transfer attack success rate (source row → target column)",
        &matrix.judge_ids,
        &matrix.judge_ids,
        &matrix.cells,
    )?;
    Ok(vec![tsv, heat])
}
