//! Post-hoc vulnerability fingerprinting and transfer analysis.
//!
//! A fingerprint is a multivariate OLS of score deltas on stylometric
//! feature deltas: Δs = β₀ + Σ βⱼ·Δfⱼ + ε, with classical standard errors
//! and two-sided Student-t p-values (dof = n − k − 1). The solver uses a
//! Householder QR; a direct normal-equations solve serves as the test
//! oracle. Zero-variance columns are dropped and reported; rank deficiency
//! beyond that is an error naming the offending columns.

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::scalar::Scalar;
use crate::stats;
use crate::stylometry::{Feature, FeatureVector, FEATURE_REGISTRY_VERSION};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub const SIGNIFICANCE_LEVEL: f64 = 0.05;

/// Ordinary least squares with an intercept column.
#[derive(Debug, Clone)]
pub struct OlsFit<S> {
    pub intercept: S,
    pub coefficients: Vec<S>,
    pub intercept_std_error: S,
    pub std_errors: Vec<S>,
    pub p_values: Vec<S>,
    pub r_squared: S,
    pub residual_dof: usize,
}

/// Fit y on the given predictor columns plus an intercept.
///
/// `column_labels` is used only for error reporting on rank deficiency.
pub fn fit_ols<S: Scalar>(
    columns: &[Vec<S>],
    y: &[S],
    column_labels: &[String],
) -> Result<OlsFit<S>> {
    let n = y.len();
    let k = columns.len();
    for c in columns {
        if c.len() != n {
            return Err(Error::Usage("ragged design columns".into()));
        }
    }
    if n < k + 2 {
        return Err(Error::Usage(format!(
            "need more than {} observations for {k} predictors, got {n}",
            k + 1
        )));
    }

    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(k + 1);
        row.push(S::one());
        for col in columns {
            row.push(col[i]);
        }
        rows.push(row);
    }
    let x = Matrix::from_rows(&rows);
    let qr = linalg::householder_qr(&x, y)?;

    // Rank check: a vanishing R pivot marks a dependent column.
    let mut max_pivot = S::zero();
    for j in 0..=k {
        max_pivot = max_pivot.max(qr.r[(j, j)].abs());
    }
    let tol = max_pivot * S::cast(1e-10) * S::from_usize_(n.max(k + 1));
    let offenders: Vec<String> = (0..=k)
        .filter(|&j| qr.r[(j, j)].abs() <= tol)
        .map(|j| {
            if j == 0 {
                "intercept".to_string()
            } else {
                column_labels
                    .get(j - 1)
                    .cloned()
                    .unwrap_or_else(|| format!("column_{}", j - 1))
            }
        })
        .collect();
    if !offenders.is_empty() {
        return Err(Error::DegenerateDesign { columns: offenders });
    }

    // β from back substitution on R β = (Qᵀy)[..k+1].
    let p = k + 1;
    let mut beta = vec![S::zero(); p];
    for i in (0..p).rev() {
        let mut s = qr.qty[i];
        for (j, bj) in beta.iter().enumerate().skip(i + 1) {
            s -= qr.r[(i, j)] * *bj;
        }
        beta[i] = s / qr.r[(i, i)];
    }

    // Residual sum of squares is the tail of Qᵀy.
    let ssr: S = qr.qty[p..].iter().map(|&v| v * v).sum();
    let dof = n - p;
    let sigma2 = if dof > 0 {
        ssr / S::from_usize_(dof)
    } else {
        S::zero()
    };

    // (XᵀX)⁻¹ = R⁻¹ R⁻ᵀ.
    let rinv = linalg::invert_upper(&qr.r)?;
    let cov_diag: Vec<S> = (0..p)
        .map(|j| (0..p).map(|m| rinv[(j, m)] * rinv[(j, m)]).sum())
        .collect();

    let dof_s = S::from_usize_(dof.max(1));
    let mut std_errors = Vec::with_capacity(k);
    let mut p_values = Vec::with_capacity(k);
    for j in 1..p {
        let se = (sigma2 * cov_diag[j]).max(S::zero()).sqrt();
        let pv = if se > S::zero() {
            stats::two_sided_p_value(beta[j] / se, dof_s)
        } else if beta[j].abs() <= S::cast(1e-12) {
            S::one()
        } else {
            S::zero()
        };
        std_errors.push(se);
        p_values.push(pv);
    }

    let y_mean = stats::mean(y);
    let sst: S = y.iter().map(|&v| (v - y_mean) * (v - y_mean)).sum();
    let r_squared = if sst > S::zero() {
        S::one() - ssr / sst
    } else {
        S::zero()
    };

    Ok(OlsFit {
        intercept: beta[0],
        coefficients: beta[1..].to_vec(),
        intercept_std_error: (sigma2 * cov_diag[0]).max(S::zero()).sqrt(),
        std_errors,
        p_values,
        r_squared,
        residual_dof: dof,
    })
}

/// Regression fingerprint of one judge.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FingerprintReport {
    pub judge_id: String,
    pub registry_version: u32,
    /// Features actually fitted, in registry order.
    pub features: Vec<Feature>,
    /// Requested features dropped for having zero variance in the records.
    pub dropped_zero_variance: Vec<Feature>,
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub p_values: Vec<f64>,
    /// pⱼ < 0.05, aligned with `features`.
    pub significant: Vec<bool>,
    pub n_observations: usize,
    pub r_squared: f64,
}

impl FingerprintReport {
    pub fn coefficient(&self, f: Feature) -> Option<f64> {
        self.features
            .iter()
            .position(|&g| g == f)
            .map(|i| self.coefficients[i])
    }

    pub fn p_value(&self, f: Feature) -> Option<f64> {
        self.features
            .iter()
            .position(|&g| g == f)
            .map(|i| self.p_values[i])
    }

    pub fn std_error(&self, f: Feature) -> Option<f64> {
        self.features
            .iter()
            .position(|&g| g == f)
            .map(|i| self.std_errors[i])
    }

    pub fn is_significant(&self, f: Feature) -> bool {
        self.features
            .iter()
            .position(|&g| g == f)
            .map(|i| self.significant[i])
            .unwrap_or(false)
    }

    /// Exactly the features flagged at p < 0.05.
    pub fn significant_set(&self) -> Vec<Feature> {
        self.features
            .iter()
            .zip(&self.significant)
            .filter(|(_, &s)| s)
            .map(|(&f, _)| f)
            .collect()
    }
}

/// One regression record: a score delta and its feature delta.
pub type FingerprintRecord = (f64, FeatureVector);

/// Fit the vulnerability fingerprint of one judge over (Δs, Δf) records,
/// restricted to `features`.
///
/// Records are canonically ordered before fitting, so the report is
/// bit-identical under input permutation.
pub fn fit_fingerprint(
    judge_id: &str,
    records: &[FingerprintRecord],
    features: &[Feature],
) -> Result<FingerprintReport> {
    if records.len() < features.len() + 2 {
        return Err(Error::Usage(format!(
            "{} records cannot support {} features plus an intercept",
            records.len(),
            features.len()
        )));
    }
    let mut ordered: Vec<&FingerprintRecord> = records.iter().collect();
    ordered.sort_by(|a, b| {
        a.0.total_cmp(&b.0).then_with(|| {
            for (&va, &vb) in a.1.values().iter().zip(b.1.values()) {
                let c = va.total_cmp(&vb);
                if c != std::cmp::Ordering::Equal {
                    return c;
                }
            }
            std::cmp::Ordering::Equal
        })
    });

    let y: Vec<f64> = ordered.iter().map(|r| r.0).collect();
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for &f in features {
        let col: Vec<f64> = ordered.iter().map(|r| r.1.get(f)).collect();
        if col.iter().all(|&v| v == col[0]) {
            dropped.push(f);
        } else {
            kept.push(f);
            columns.push(col);
        }
    }
    let labels: Vec<String> = kept.iter().map(|f| f.name().to_string()).collect();
    let fit = fit_ols(&columns, &y, &labels)?;

    let significant: Vec<bool> = fit
        .p_values
        .iter()
        .map(|&p| p < SIGNIFICANCE_LEVEL)
        .collect();
    Ok(FingerprintReport {
        judge_id: judge_id.to_string(),
        registry_version: FEATURE_REGISTRY_VERSION,
        features: kept,
        dropped_zero_variance: dropped,
        intercept: fit.intercept,
        coefficients: fit.coefficients,
        std_errors: fit.std_errors,
        p_values: fit.p_values,
        significant,
        n_observations: records.len(),
        r_squared: fit.r_squared,
    })
}

/// Fit a fingerprint, pruning columns the error path reports as dependent.
/// Rule-based corpora routinely contain exactly collinear feature columns
/// (e.g. a composite equal to the sum of two others); this keeps the
/// analyze pipeline total while `fit_fingerprint` stays strict.
pub fn fit_fingerprint_pruned(
    judge_id: &str,
    records: &[FingerprintRecord],
    features: &[Feature],
) -> Result<(FingerprintReport, Vec<Feature>)> {
    let mut active: Vec<Feature> = features.to_vec();
    let mut pruned = Vec::new();
    loop {
        match fit_fingerprint(judge_id, records, &active) {
            Ok(report) => return Ok((report, pruned)),
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

/// One re-evaluation case for transfer analysis: a source-successful
/// attack's initial and final answers.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransferCase {
    pub question: String,
    pub initial_answer: String,
    pub final_answer: String,
}

/// Fraction of source-successful attacks whose final answer also strictly
/// beats its own initial answer under the target judge. `None` (an absent
/// cell) when there are no cases.
pub fn transfer_asr(
    cases: &[TransferCase],
    target: &dyn crate::judges::Judge,
) -> Result<Option<f64>> {
    if cases.is_empty() {
        return Ok(None);
    }
    let mut hits = 0usize;
    for case in cases {
        let s0 = target
            .score_pointwise(&case.question, &case.initial_answer)?
            .numeric;
        let s1 = target
            .score_pointwise(&case.question, &case.final_answer)?
            .numeric;
        if s1 > s0 {
            hits += 1;
        }
    }
    Ok(Some(hits as f64 / cases.len() as f64))
}

/// Sources × targets grid of transfer ASR values.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransferMatrix {
    pub judge_ids: Vec<String>,
    /// `cells[source][target]`; `None` marks a missing-source cell.
    pub cells: Vec<Vec<Option<f64>>>,
}

impl TransferMatrix {
    pub fn get(&self, source: &str, target: &str) -> Option<f64> {
        let i = self.judge_ids.iter().position(|j| j == source)?;
        let j = self.judge_ids.iter().position(|j| j == target)?;
        self.cells[i][j]
    }
}

/// Build the transfer grid from per-source successful cases. Missing source
/// runs produce absent cells, never imputed values.
pub fn build_transfer_matrix(
    cases_per_source: &BTreeMap<String, Vec<TransferCase>>,
    judges: &[&dyn crate::judges::Judge],
) -> Result<TransferMatrix> {
    let judge_ids: Vec<String> = judges.iter().map(|j| j.id().to_string()).collect();
    let mut cells = Vec::with_capacity(judge_ids.len());
    for source in &judge_ids {
        let mut row = Vec::with_capacity(judge_ids.len());
        for target in judges {
            let cell = match cases_per_source.get(source) {
                Some(cases) => transfer_asr(cases, *target)?,
                None => None,
            };
            row.push(cell);
        }
        cells.push(row);
    }
    Ok(TransferMatrix { judge_ids, cells })
}
