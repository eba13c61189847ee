//! `defend`: fit a style-control model on logged (features, score) records
//! and report base-vs-attacked score summaries before and after stripping.

use crate::report::{fmt_f64, Table};
use crate::svg;
use anyhow::{Context, Result};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use stylebandit::defense::{
    evaluate_defense, fit_style_model_pruned, DefenseReport, ScoreSummary, StyleModelKind,
    StyleRecord,
};
use stylebandit::runlog::{load_log_dir, replay_run, ReplayedRun};
use stylebandit::stylometry::{Feature, FeatureVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrainOn {
    /// Base and attacked records together (default).
    Pooled,
    Base,
    Attacked,
}

impl TrainOn {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "pooled" => Ok(TrainOn::Pooled),
            "base" => Ok(TrainOn::Base),
            "attacked" => Ok(TrainOn::Attacked),
            other => anyhow::bail!("unknown training corpus {other:?} (pooled|base|attacked)"),
        }
    }
}

pub struct DefendOutputs {
    pub reports: BTreeMap<String, DefenseReport>,
    pub files: Vec<PathBuf>,
}

fn to_style_records(maps: &[(BTreeMap<String, f64>, f64)]) -> Result<Vec<StyleRecord>> {
    maps.iter()
        .map(|(m, s)| Ok((FeatureVector::from_map(m)?, *s)))
        .collect::<stylebandit::Result<_>>()
        .map_err(Into::into)
}

pub fn cmd_defend(
    logs_dir: &Path,
    out_dir: &Path,
    kind: StyleModelKind,
    train_on: TrainOn,
) -> Result<DefendOutputs> {
    let logs = load_log_dir(logs_dir)?;
    let mut by_judge: BTreeMap<String, Vec<ReplayedRun>> = BTreeMap::new();
    for (name, records) in &logs {
        let r = replay_run(records).with_context(|| format!("replaying log {name}"))?;
        by_judge.entry(r.judge_id.clone()).or_default().push(r);
    }
    std::fs::create_dir_all(out_dir)?;

    let mut reports = BTreeMap::new();
    let mut files = Vec::new();
    for (judge, runs) in &by_judge {
        // base = every initial answer; attacked = every best final answer
        let base_maps: Vec<(BTreeMap<String, f64>, f64)> = runs
            .iter()
            .filter_map(|r| r.style_records.first().cloned())
            .collect();
        let attacked_maps: Vec<(BTreeMap<String, f64>, f64)> = runs
            .iter()
            .filter_map(|r| r.best_final_style.clone())
            .collect();
        let pooled_maps: Vec<(BTreeMap<String, f64>, f64)> = runs
            .iter()
            .flat_map(|r| r.style_records.iter().cloned())
            .collect();

        let base = to_style_records(&base_maps)?;
        let attacked = to_style_records(&attacked_maps)?;
        let pooled = to_style_records(&pooled_maps)?;
        let train: &[StyleRecord] = match train_on {
            TrainOn::Pooled => &pooled,
            TrainOn::Base => &base,
            TrainOn::Attacked => &attacked,
        };

        let mut table = Table::new(&["population", "phase", "mean", "sd", "n"]);
        match fit_style_model_pruned(train, kind, &Feature::regression_default()) {
            Ok((model, pruned)) => {
                let report = evaluate_defense(&attacked, &base, &model);
                table.comment(format!(
                    "style control for judge {judge}: {kind:?} model, trained on {} records",
                    model.n_train()
                ));
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
                if let Some((before, after)) = report.gaps() {
                    table.comment(format!(
                        "attacked-vs-base mean gap: before={} after={}",
                        fmt_f64(before),
                        fmt_f64(after)
                    ));
                }
                let mut push = |pop: &str, phase: &str, s: Option<ScoreSummary>| {
                    if let Some(s) = s {
                        table.row(vec![
                            pop.to_string(),
                            phase.to_string(),
                            fmt_f64(s.mean),
                            fmt_f64(s.sd),
                            s.n.to_string(),
                        ]);
                    }
                };
                push("base", "before", report.base_before);
                push("base", "after", report.base_after);
                push("attacked", "before", report.attacked_before);
                push("attacked", "after", report.attacked_after);

                let svg_path = out_dir.join(format!("defense_{judge}.svg"));
                let bar = |s: Option<ScoreSummary>| s.map(|v| v.mean).unwrap_or(0.0);
                svg::grouped_bars(
                    &svg_path,
                    &format!("style control — judge {judge}"),
                    &["before".into(), "after".into()],
                    &[
                        (
                            "base".into(),
                            vec![bar(report.base_before), bar(report.base_after)],
                        ),
                        (
                            "attacked".into(),
                            vec![bar(report.attacked_before), bar(report.attacked_after)],
                        ),
                    ],
                )?;
                files.push(svg_path);
                reports.insert(judge.clone(), report);
            }
            Err(e) => {
                table.comment(format!("style model unavailable: {e}"));
            }
        }
        let path = out_dir.join(format!("defense_{judge}.tsv"));
        table.write(&path)?;
        files.push(path);
    }
    Ok(DefendOutputs { reports, files })
}
