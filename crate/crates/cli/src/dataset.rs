//! Line-delimited dataset loading: one JSON record per line with
//! `question_id`, `question`, `a0`, and an optional `reference`.
//! Malformed lines are reported with their line number and skipped; the
//! run continues.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use std::io::{BufRead, BufReader};
use std::path::Path;
use stylebandit::attack::AttackInput;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub question_id: String,
    pub question: String,
    pub a0: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<String>,
}

impl DatasetRecord {
    pub fn into_input(self) -> AttackInput {
        AttackInput {
            question_id: self.question_id,
            question: self.question,
            initial_answer: self.a0,
            reference: self.reference,
        }
    }
}

#[derive(Debug)]
pub struct LoadedDataset {
    pub inputs: Vec<AttackInput>,
    /// (line number, error) for every malformed line.
    pub skipped: Vec<(usize, String)>,
}

pub fn load_dataset(path: &Path) -> Result<LoadedDataset> {
    let file =
        std::fs::File::open(path).with_context(|| format!("opening dataset {}", path.display()))?;
    let reader = BufReader::new(file);
    let mut inputs = Vec::new();
    let mut skipped = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<DatasetRecord>(&line) {
            Ok(rec) if rec.a0.trim().is_empty() => {
                skipped.push((lineno, "empty a0".to_string()));
            }
            Ok(rec) => inputs.push(rec.into_input()),
            Err(e) => skipped.push((lineno, e.to_string())),
        }
    }
    if inputs.is_empty() {
        bail!("dataset {} contains no usable records", path.display());
    }
    Ok(LoadedDataset { inputs, skipped })
}

/// Write the first `n` built-in corpus entries as a dataset file. With
/// `self_reference`, each record carries its own answer as the pairwise
/// reference.
pub fn write_sample_dataset(path: &Path, n: usize, self_reference: bool) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let mut out = String::new();
    for (i, (question, answer)) in stylebandit::corpus::sample_qa()
        .into_iter()
        .take(n)
        .enumerate()
    {
        let rec = DatasetRecord {
            question_id: format!("q{i:03}"),
            question,
            reference: self_reference.then(|| answer.clone()),
            a0: answer,
        };
        out.push_str(&serde_json::to_string(&rec)?);
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}
