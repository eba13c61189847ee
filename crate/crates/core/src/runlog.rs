//! Append-only run logs: one line-delimited JSON record per round, plus
//! loaders and a replay path that recomputes every derived metric from the
//! raw records and checks it bit-for-bit against what was logged.
//!
//! Records are self-describing (`schema_version` on every line) and carry
//! everything replay needs: candidate ids, scores, pool capacity, and the
//! eviction-relevant lineage fields.

use crate::attack::{insert_and_truncate, AttackRun, Candidate, CandidatePool, Policy};
use crate::bandit::ArmSnapshot;
use crate::error::{Error, Result};
use crate::hash::{fnv1a_str, hex16};
use crate::judges::JudgeMode;
use crate::stylometry::extract_features;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunLogRecord {
    pub schema_version: u32,
    pub run_id: String,
    pub question_id: String,
    pub judge_id: String,
    pub judge_mode: JudgeMode,
    pub policy: Policy,
    pub seed: u64,
    pub pool_capacity: usize,
    /// 0 is the initial-answer record; rounds are 1-based.
    pub round: u32,
    /// The question text, carried on the round-0 record.
    #[serde(default)]
    pub question: Option<String>,
    pub chosen_arm: Option<String>,
    pub parent_id: Option<u64>,
    pub candidate_id: Option<u64>,
    pub text_hash: Option<String>,
    /// Full answer text unless the writer ran hash-only.
    pub text: Option<String>,
    pub raw_verdict: String,
    pub numeric_score: f64,
    pub reward: f64,
    pub best_so_far: f64,
    pub pool_mean: f64,
    pub ci_width: Option<f64>,
    pub skipped: bool,
    pub similarity_to_initial: Option<f64>,
    pub flagged_low_similarity: bool,
    /// Stylometric features of the created candidate.
    pub features: Option<BTreeMap<String, f64>>,
    pub bandit_digest: Option<String>,
    /// Final bandit state, embedded on the last record when requested.
    pub final_arms: Option<Vec<ArmSnapshot>>,
    pub timestamp_ms: u64,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LogOptions {
    /// Store candidate hashes only, not full texts.
    pub hash_only: bool,
    /// Embed the final arm snapshots in the last record (bite runs).
    pub include_arms: bool,
    /// Fixed timestamp for byte-identical reruns; `None` uses wall time.
    pub fixed_timestamp_ms: Option<u64>,
}

fn now_ms() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

/// Flatten one attack run into its log records (round 0 plus one per round).
pub fn records_for_run(run: &AttackRun, run_id: &str, opts: &LogOptions) -> Vec<RunLogRecord> {
    let ts = opts.fixed_timestamp_ms.unwrap_or_else(now_ms);
    let base = |round: u32| RunLogRecord {
        schema_version: SCHEMA_VERSION,
        run_id: run_id.to_string(),
        question_id: run.question_id.clone(),
        judge_id: run.judge_id.clone(),
        judge_mode: run.judge_mode,
        policy: run.policy,
        seed: run.seed,
        pool_capacity: run.pool_capacity,
        round,
        question: None,
        chosen_arm: None,
        parent_id: None,
        candidate_id: None,
        text_hash: None,
        text: None,
        raw_verdict: String::new(),
        numeric_score: 0.0,
        reward: 0.0,
        best_so_far: 0.0,
        pool_mean: 0.0,
        ci_width: None,
        skipped: false,
        similarity_to_initial: None,
        flagged_low_similarity: false,
        features: None,
        bandit_digest: None,
        final_arms: None,
        timestamp_ms: ts,
    };

    let mut out = Vec::with_capacity(run.traces.len() + 1);

    let a0 = &run.candidates[0];
    let mut first = base(0);
    first.question = Some(run.question.clone());
    first.candidate_id = Some(0);
    first.text_hash = Some(hex16(fnv1a_str(&a0.text)));
    first.text = (!opts.hash_only).then(|| a0.text.clone());
    first.numeric_score = run.initial_score;
    first.best_so_far = run.initial_score;
    first.pool_mean = run.initial_score;
    first.similarity_to_initial = Some(1.0);
    first.features = Some(extract_features(&a0.text).to_map());
    out.push(first);

    for trace in &run.traces {
        let mut rec = base(trace.round);
        rec.chosen_arm = trace.chosen_arm.clone();
        rec.parent_id = Some(trace.parent_id);
        rec.candidate_id = trace.candidate_id;
        rec.raw_verdict = trace.raw_verdict.clone();
        rec.numeric_score = trace.new_score;
        rec.reward = trace.reward;
        rec.best_so_far = trace.best_so_far;
        rec.pool_mean = trace.pool_mean;
        rec.ci_width = trace.ci_width_of_chosen;
        rec.skipped = trace.skipped;
        rec.bandit_digest = trace.bandit_digest.clone();
        if let Some(cid) = trace.candidate_id {
            let c = &run.candidates[cid as usize];
            rec.text_hash = Some(hex16(fnv1a_str(&c.text)));
            rec.text = (!opts.hash_only).then(|| c.text.clone());
            rec.similarity_to_initial = Some(c.similarity_to_initial);
            rec.flagged_low_similarity = c.flagged_low_similarity;
            rec.features = Some(extract_features(&c.text).to_map());
        }
        out.push(rec);
    }

    if opts.include_arms {
        if let (Some(last), Some(arms)) = (out.last_mut(), run.arms.as_ref()) {
            last.final_arms = Some(arms.clone());
        }
    }
    out
}

pub fn save_jsonl(records: &[RunLogRecord], path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let file = std::fs::File::create(path)?;
    let mut w = BufWriter::new(file);
    for rec in records {
        serde_json::to_writer(&mut w, rec)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_jsonl(path: &Path) -> Result<Vec<RunLogRecord>> {
    let file = std::fs::File::open(path)?;
    let reader = BufReader::new(file);
    let mut out = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: RunLogRecord = serde_json::from_str(&line)
            .map_err(|e| Error::Input(format!("{}:{}: {e}", path.display(), lineno + 1)))?;
        out.push(rec);
    }
    Ok(out)
}

/// Metrics recomputed from raw records by replaying the pool logic.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReplayedRun {
    pub run_id: String,
    pub question_id: String,
    pub question: Option<String>,
    pub judge_id: String,
    pub judge_mode: JudgeMode,
    pub policy: Policy,
    pub seed: u64,
    pub initial_score: f64,
    pub best_so_far_series: Vec<f64>,
    pub pool_mean_series: Vec<f64>,
    pub final_pool_ids: Vec<u64>,
    pub best_final_score: f64,
    pub best_final_text: Option<String>,
    pub initial_text: Option<String>,
    pub score_lift: f64,
    pub attack_success: bool,
    /// (Δscore, Δfeatures) of every judged candidate relative to the
    /// initial answer — regression-ready fingerprint records.
    pub fingerprint_records: Vec<(f64, BTreeMap<String, f64>)>,
    /// (features, raw numeric score) of every scored answer, initial
    /// included — training records for the style-control defense.
    pub style_records: Vec<(BTreeMap<String, f64>, f64)>,
    /// (features, raw numeric score) of the best final answer.
    pub best_final_style: Option<(BTreeMap<String, f64>, f64)>,
}

/// Replay one run's records: rebuild the pool round by round, recompute
/// best-so-far and pool mean, and require them to equal the logged values
/// bit-for-bit. Returns the recomputed metrics.
pub fn replay_run(records: &[RunLogRecord]) -> Result<ReplayedRun> {
    if records.is_empty() {
        return Err(Error::Input("empty run log".into()));
    }
    let first = &records[0];
    if first.round != 0 || first.candidate_id != Some(0) {
        return Err(Error::Input(
            "run log must start with the round-0 record".into(),
        ));
    }
    for rec in records {
        if rec.schema_version != SCHEMA_VERSION {
            return Err(Error::Input(format!(
                "unsupported schema version {}",
                rec.schema_version
            )));
        }
    }

    let mut pool = CandidatePool::new(first.pool_capacity)?;
    let mk_candidate = |rec: &RunLogRecord, id: u64| Candidate {
        id,
        text: rec.text.clone().unwrap_or_default(),
        score: rec.numeric_score,
        parent_id: rec.parent_id,
        action_applied: rec.chosen_arm.clone(),
        round_created: rec.round,
        similarity_to_initial: rec.similarity_to_initial.unwrap_or(1.0),
        flagged_low_similarity: rec.flagged_low_similarity,
    };
    insert_and_truncate(&mut pool, mk_candidate(first, 0));

    let s0 = first.numeric_score;
    let initial_features = first
        .features
        .clone()
        .ok_or_else(|| Error::Input("round-0 record lacks features".into()))?;
    let mut best = s0;
    let mut best_series = Vec::new();
    let mut pool_series = Vec::new();
    let mut best_final = (0u64, s0);
    let mut fingerprint_records = Vec::new();
    let mut style_records = vec![(initial_features.clone(), s0)];

    if first.best_so_far.to_bits() != s0.to_bits() || first.pool_mean.to_bits() != s0.to_bits() {
        return Err(Error::Input(
            "round-0 record metrics are inconsistent".into(),
        ));
    }

    for rec in &records[1..] {
        if !rec.skipped {
            let cid = rec
                .candidate_id
                .ok_or_else(|| Error::Input(format!("round {} lacks a candidate id", rec.round)))?;
            insert_and_truncate(&mut pool, mk_candidate(rec, cid));
            best = best.max(rec.numeric_score);
            if let Some(features) = &rec.features {
                let deltas: BTreeMap<String, f64> = features
                    .iter()
                    .map(|(name, &v)| {
                        (
                            name.clone(),
                            v - initial_features.get(name).copied().unwrap_or(0.0),
                        )
                    })
                    .collect();
                fingerprint_records.push((rec.numeric_score - s0, deltas));
                style_records.push((features.clone(), rec.numeric_score));
            }
        }
        let pool_mean = pool.mean_score();
        if best.to_bits() != rec.best_so_far.to_bits() {
            return Err(Error::Input(format!(
                "round {}: replayed best-so-far {} differs from logged {}",
                rec.round, best, rec.best_so_far
            )));
        }
        if pool_mean.to_bits() != rec.pool_mean.to_bits() {
            return Err(Error::Input(format!(
                "round {}: replayed pool mean {} differs from logged {}",
                rec.round, pool_mean, rec.pool_mean
            )));
        }
        best_series.push(best);
        pool_series.push(pool_mean);
    }

    for c in pool.members() {
        if c.score > best_final.1 || (c.score == best_final.1 && c.id < best_final.0) {
            best_final = (c.id, c.score);
        }
    }
    let best_record = records
        .iter()
        .find(|r| r.candidate_id == Some(best_final.0));
    let best_final_text = best_record.and_then(|r| r.text.clone());
    let best_final_style =
        best_record.and_then(|r| r.features.clone().map(|f| (f, r.numeric_score)));

    let attack_success = match first.judge_mode {
        JudgeMode::Pointwise => best_final.1 > s0,
        JudgeMode::Pairwise(_) => s0 <= 0.0 && best_final.1 > 0.0,
    };
    Ok(ReplayedRun {
        run_id: first.run_id.clone(),
        question_id: first.question_id.clone(),
        question: first.question.clone(),
        judge_id: first.judge_id.clone(),
        judge_mode: first.judge_mode,
        policy: first.policy,
        seed: first.seed,
        initial_score: s0,
        best_so_far_series: best_series,
        pool_mean_series: pool_series,
        final_pool_ids: pool.members().iter().map(|c| c.id).collect(),
        best_final_score: best_final.1,
        best_final_text,
        initial_text: first.text.clone(),
        score_lift: best_final.1 - s0,
        attack_success,
        fingerprint_records,
        style_records,
        best_final_style,
    })
}

/// Load every `*.jsonl` log under a directory, one record vector per file,
/// sorted by file name for determinism.
pub fn load_log_dir(dir: &Path) -> Result<Vec<(String, Vec<RunLogRecord>)>> {
    let mut paths: Vec<_> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Error::Input(format!(
            "no .jsonl run logs found in {}",
            dir.display()
        )));
    }
    paths
        .into_iter()
        .map(|p| {
            let name = p
                .file_stem()
                .unwrap_or_default()
                .to_string_lossy()
                .into_owned();
            load_jsonl(&p).map(|recs| (name, recs))
        })
        .collect()
}
