//! Style-control score calibration.
//!
//! Fits a model predicting the judge's score from stylometric features
//! alone, then reports a bias-stripped score: the raw score minus the
//! predicted style contribution, centered at the corpus mean so calibrated
//! values stay on the raw 1–9 scale. Two model kinds: linear OLS and
//! Gaussian kernel ridge (median-heuristic bandwidth, 1e-6 ridge).

use crate::analysis::fit_ols;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::stats;
use crate::stylometry::{Feature, FeatureVector};
use serde::{Deserialize, Serialize};

pub const KERNEL_RIDGE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StyleModelKind {
    Linear,
    Kernel,
}

/// A record the style model trains on: one answer's features and the raw
/// judge score it received.
pub type StyleRecord = (FeatureVector, f64);

#[derive(Debug, Clone, Serialize, Deserialize)]
enum ModelParams {
    Linear {
        intercept: f64,
        /// One weight per model feature; zero-variance columns fit as 0.
        weights: Vec<f64>,
    },
    Kernel {
        train_points: Vec<Vec<f64>>,
        dual_coefficients: Vec<f64>,
        bandwidth: f64,
    },
}

/// Fitted style-control model.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StyleControlModel {
    pub kind: StyleModelKind,
    pub features: Vec<Feature>,
    params: ModelParams,
    corpus_mean: Vec<f64>,
    n_train: usize,
}

impl StyleControlModel {
    /// Predicted style contribution for one feature vector.
    pub fn predict(&self, features: &FeatureVector) -> f64 {
        let x = features.project(&self.features);
        self.predict_projected(&x)
    }

    fn predict_projected(&self, x: &[f64]) -> f64 {
        match &self.params {
            ModelParams::Linear { intercept, weights } => {
                intercept + x.iter().zip(weights).map(|(xi, wi)| xi * wi).sum::<f64>()
            }
            ModelParams::Kernel {
                train_points,
                dual_coefficients,
                bandwidth,
            } => {
                let two_h2 = 2.0 * bandwidth * bandwidth;
                train_points
                    .iter()
                    .zip(dual_coefficients)
                    .map(|(p, a)| {
                        let d2: f64 = p.iter().zip(x).map(|(pi, xi)| (pi - xi) * (pi - xi)).sum();
                        a * (-d2 / two_h2).exp()
                    })
                    .sum()
            }
        }
    }

    /// Mean feature vector of the training corpus.
    pub fn corpus_mean_style(&self) -> FeatureVector {
        let mut fv = FeatureVector::default();
        for (&f, &v) in self.features.iter().zip(&self.corpus_mean) {
            fv.set(f, v);
        }
        fv
    }

    pub fn n_train(&self) -> usize {
        self.n_train
    }
}

/// Fit a style model of the given kind on (features, score) records.
pub fn fit_style_model(
    records: &[StyleRecord],
    kind: StyleModelKind,
    features: &[Feature],
) -> Result<StyleControlModel> {
    if features.is_empty() {
        return Err(Error::Usage(
            "style model needs at least one feature".into(),
        ));
    }
    let n = records.len();
    let y: Vec<f64> = records.iter().map(|r| r.1).collect();
    let xs: Vec<Vec<f64>> = records.iter().map(|r| r.0.project(features)).collect();
    let k = features.len();
    let corpus_mean: Vec<f64> = (0..k)
        .map(|j| xs.iter().map(|row| row[j]).sum::<f64>() / n.max(1) as f64)
        .collect();

    let params = match kind {
        StyleModelKind::Linear => {
            if n < k + 2 {
                return Err(Error::Usage(format!(
                    "linear style model needs more than {} records, got {n}",
                    k + 1
                )));
            }
            // Zero-variance columns carry no style signal; they fit as 0 so
            // prediction stays defined for any feature vector.
            let mut kept_idx = Vec::new();
            let mut columns = Vec::new();
            for j in 0..k {
                let col: Vec<f64> = xs.iter().map(|row| row[j]).collect();
                if col.iter().any(|&v| v != col[0]) {
                    kept_idx.push(j);
                    columns.push(col);
                }
            }
            let labels: Vec<String> = kept_idx
                .iter()
                .map(|&j| features[j].name().to_string())
                .collect();
            let fit = if columns.is_empty() {
                // constant-score corner: intercept-only model
                crate::analysis::OlsFit {
                    intercept: stats::mean(&y),
                    coefficients: vec![],
                    intercept_std_error: 0.0,
                    std_errors: vec![],
                    p_values: vec![],
                    r_squared: 0.0,
                    residual_dof: n.saturating_sub(1),
                }
            } else {
                fit_ols(&columns, &y, &labels)?
            };
            let mut weights = vec![0.0; k];
            for (slot, &j) in kept_idx.iter().enumerate() {
                weights[j] = fit.coefficients[slot];
            }
            ModelParams::Linear {
                intercept: fit.intercept,
                weights,
            }
        }
        StyleModelKind::Kernel => {
            if n < 10 {
                return Err(Error::Usage(format!(
                    "kernel style model needs at least 10 records, got {n}"
                )));
            }
            // Median-heuristic bandwidth over pairwise distances.
            let mut dists = Vec::with_capacity(n * (n - 1) / 2);
            for i in 0..n {
                for j in (i + 1)..n {
                    let d2: f64 = xs[i]
                        .iter()
                        .zip(&xs[j])
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum();
                    dists.push(d2.sqrt());
                }
            }
            let med = stats::median(&dists);
            let bandwidth = if med > 0.0 { med } else { 1.0 };
            let two_h2 = 2.0 * bandwidth * bandwidth;
            let mut gram = Matrix::<f64>::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    let d2: f64 = xs[i]
                        .iter()
                        .zip(&xs[j])
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum();
                    gram[(i, j)] = (-d2 / two_h2).exp();
                }
                gram[(i, i)] += KERNEL_RIDGE;
            }
            let dual = linalg::solve_spd(&gram, &y)?;
            ModelParams::Kernel {
                train_points: xs,
                dual_coefficients: dual,
                bandwidth,
            }
        }
    };

    Ok(StyleControlModel {
        kind,
        features: features.to_vec(),
        params,
        corpus_mean,
        n_train: n,
    })
}

/// Fit a style model, pruning exactly collinear feature columns the strict
/// fitter rejects. Rule-edit corpora routinely contain such columns (two
/// features only ever moved by the same action); dropping one of them
/// leaves predictions unchanged.
pub fn fit_style_model_pruned(
    records: &[StyleRecord],
    kind: StyleModelKind,
    features: &[Feature],
) -> Result<(StyleControlModel, Vec<Feature>)> {
    let mut active: Vec<Feature> = features.to_vec();
    let mut pruned = Vec::new();
    loop {
        match fit_style_model(records, kind, &active) {
            Ok(model) => return Ok((model, pruned)),
            Err(Error::DegenerateDesign { columns }) => {
                let offender = columns
                    .iter()
                    .rev()
                    .find_map(|name| Feature::from_name(name))
                    .ok_or(Error::DegenerateDesign {
                        columns: columns.clone(),
                    })?;
                active.retain(|&f| f != offender);
                pruned.push(offender);
                if active.is_empty() {
                    return Err(Error::DegenerateDesign { columns });
                }
            }
            Err(e) => return Err(e),
        }
    }
}

/// Bias-stripped score: raw − (predicted style − predicted style at the
/// corpus mean). Centering keeps calibrated scores comparable to raw ones.
pub fn bias_stripped_score(
    model: &StyleControlModel,
    features: &FeatureVector,
    raw_score: f64,
    corpus_mean_style: &FeatureVector,
) -> f64 {
    raw_score - (model.predict(features) - model.predict(corpus_mean_style))
}

/// mean ± sd of one population's scores.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ScoreSummary {
    pub mean: f64,
    pub sd: f64,
    pub n: usize,
}

fn summarize(scores: &[f64]) -> Option<ScoreSummary> {
    if scores.is_empty() {
        return None;
    }
    Some(ScoreSummary {
        mean: stats::mean(scores),
        sd: stats::sample_sd(scores),
        n: scores.len(),
    })
}

/// Before/after calibration table for base vs attacked populations.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DefenseReport {
    pub model_kind: StyleModelKind,
    pub base_before: Option<ScoreSummary>,
    pub base_after: Option<ScoreSummary>,
    pub attacked_before: Option<ScoreSummary>,
    pub attacked_after: Option<ScoreSummary>,
}

impl DefenseReport {
    /// |mean(attacked) − mean(base)| before and after stripping, when both
    /// populations exist.
    pub fn gaps(&self) -> Option<(f64, f64)> {
        let before = (self.attacked_before?.mean - self.base_before?.mean).abs();
        let after = (self.attacked_after?.mean - self.base_after?.mean).abs();
        Some((before, after))
    }
}

/// Evaluate the defense: strip every record's score with the fitted model
/// and summarize both populations before and after.
pub fn evaluate_defense(
    attacked_records: &[StyleRecord],
    base_records: &[StyleRecord],
    model: &StyleControlModel,
) -> DefenseReport {
    let mean_style = model.corpus_mean_style();
    let strip = |records: &[StyleRecord]| -> Vec<f64> {
        records
            .iter()
            .map(|(fv, raw)| bias_stripped_score(model, fv, *raw, &mean_style))
            .collect()
    };
    let base_raw: Vec<f64> = base_records.iter().map(|r| r.1).collect();
    let attacked_raw: Vec<f64> = attacked_records.iter().map(|r| r.1).collect();
    DefenseReport {
        model_kind: model.kind,
        base_before: summarize(&base_raw),
        base_after: summarize(&strip(base_records)),
        attacked_before: summarize(&attacked_raw),
        attacked_after: summarize(&strip(attacked_records)),
    }
}
