//! `fingerprint`: the regression-fingerprint slice of `analyze`, for quick
//! re-fits over an existing log directory.

use anyhow::{Context, Result};
use std::path::{Path, PathBuf};
use stylebandit::runlog::{load_log_dir, replay_run};

pub fn cmd_fingerprint(
    logs_dir: &Path,
    out_dir: &Path,
    per_question: bool,
) -> Result<Vec<PathBuf>> {
    let logs = load_log_dir(logs_dir)?;
    let mut replays = Vec::with_capacity(logs.len());
    for (name, records) in &logs {
        replays.push(replay_run(records).with_context(|| format!("replaying log {name}"))?);
    }
    std::fs::create_dir_all(out_dir)?;
    super::analyze::write_fingerprints(&replays, out_dir, per_question)
}
