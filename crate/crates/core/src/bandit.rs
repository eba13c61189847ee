//! Disjoint-model LinUCB: one ridge model per arm, upper-confidence-bound
//! selection, sequential rank-1 updates, and confidence-width tracking.
//!
//! Each arm keeps its design matrix A (initialized to the identity) and
//! reward vector v. Fitted parameters are always recomputed from (A, v) via
//! a maintained Cholesky factor of A — never cached — so state cannot drift.
//! The factor is advanced with stable rank-1 updates; accuracy against a
//! dense re-solve is pinned by tests at 1e-9.

use crate::error::{Error, Result};
use crate::hash::{fnv1a, hex16};
use crate::linalg::{self, Matrix};
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};

/// A context vector with finite entries and Euclidean norm ≤ 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ContextVector<S> {
    values: Vec<S>,
}

impl<S: Scalar> ContextVector<S> {
    /// Accepts a vector already inside the unit ball.
    pub fn new(values: Vec<S>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Config("context dimension must be at least 1".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("context entries must be finite".into()));
        }
        let norm = linalg::norm2(&values);
        if norm > S::one() + S::cast(1e-9) {
            return Err(Error::Input(format!("context norm {norm} exceeds 1")));
        }
        Ok(Self { values })
    }

    /// Scales an arbitrary finite vector onto the unit sphere. A zero vector
    /// maps to the first basis vector so downstream math stays defined.
    pub fn normalized(mut values: Vec<S>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Config("context dimension must be at least 1".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("context entries must be finite".into()));
        }
        let norm = linalg::norm2(&values);
        if norm == S::zero() {
            values[0] = S::one();
        } else {
            linalg::scale_in_place(&mut values, S::one() / norm);
        }
        Ok(Self { values })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn as_slice(&self) -> &[S] {
        &self.values
    }
}

/// Configuration for one bandit instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BanditConfig<S> {
    /// Exploration weight α ≥ 0.
    pub alpha: S,
    /// Context dimension d ≥ 1.
    pub dim: usize,
    /// Ordered, duplicate-free arm identifiers; order breaks score ties.
    pub arm_ids: Vec<String>,
    pub seed: u64,
}

impl<S: Scalar> BanditConfig<S> {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Config("dimension d must be at least 1".into()));
        }
        if self.alpha < S::zero() || !self.alpha.is_finite() {
            return Err(Error::Config(
                "alpha must be finite and non-negative".into(),
            ));
        }
        if self.arm_ids.is_empty() {
            return Err(Error::Config("arm_ids must be non-empty".into()));
        }
        for (i, id) in self.arm_ids.iter().enumerate() {
            if self.arm_ids[..i].contains(id) {
                return Err(Error::Config(format!("duplicate arm id {id:?}")));
            }
        }
        Ok(())
    }
}

/// Per-arm ridge statistics.
#[derive(Debug, Clone)]
pub struct ArmState<S> {
    arm_id: String,
    design: Matrix<S>,
    factor: Matrix<S>, // lower Cholesky factor of `design`, kept in lockstep
    rewards: Vec<S>,
    play_count: u64,
}

impl<S: Scalar> ArmState<S> {
    pub fn new(arm_id: impl Into<String>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Config("dimension d must be at least 1".into()));
        }
        Ok(Self {
            arm_id: arm_id.into(),
            design: Matrix::identity(dim),
            factor: Matrix::identity(dim),
            rewards: vec![S::zero(); dim],
            play_count: 0,
        })
    }

    pub fn arm_id(&self) -> &str {
        &self.arm_id
    }

    pub fn dim(&self) -> usize {
        self.rewards.len()
    }

    pub fn design_matrix(&self) -> &Matrix<S> {
        &self.design
    }

    pub fn reward_vector(&self) -> &[S] {
        &self.rewards
    }

    pub fn play_count(&self) -> u64 {
        self.play_count
    }

    /// θ̂ = A⁻¹ v, recomputed from the maintained factor.
    pub fn theta(&self) -> Vec<S> {
        let z = linalg::solve_lower(&self.factor, &self.rewards);
        linalg::solve_lower_transpose(&self.factor, &z)
    }

    /// xᵀ θ̂, computed as (L⁻¹x)·(L⁻¹v) without forming θ̂.
    pub fn mean_estimate(&self, x: &[S]) -> S {
        let lx = linalg::solve_lower(&self.factor, x);
        let lv = linalg::solve_lower(&self.factor, &self.rewards);
        linalg::dot(&lx, &lv)
    }

    /// xᵀ A⁻¹ x = ‖L⁻¹x‖².
    pub fn quad_form_inv(&self, x: &[S]) -> S {
        let lx = linalg::solve_lower(&self.factor, x);
        linalg::dot(&lx, &lx)
    }

    /// Rebuild the Cholesky factor from the design matrix (used after
    /// deserializing a snapshot, or to squash accumulated update error).
    pub fn refresh_factor(&mut self) -> Result<()> {
        self.factor = linalg::cholesky(&self.design)?;
        Ok(())
    }

    pub fn snapshot(&self) -> ArmSnapshot {
        ArmSnapshot {
            arm_id: self.arm_id.clone(),
            dim: self.dim(),
            design_matrix: self.design.as_slice().iter().map(|v| v.as_f64()).collect(),
            reward_vector: self.rewards.iter().map(|v| v.as_f64()).collect(),
            play_count: self.play_count,
        }
    }
}

/// Serialized arm statistics: row-major matrix entries, full double
/// precision. This is the form embedded in run-log records.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArmSnapshot {
    pub arm_id: String,
    pub dim: usize,
    pub design_matrix: Vec<f64>,
    pub reward_vector: Vec<f64>,
    pub play_count: u64,
}

impl ArmSnapshot {
    pub fn restore<S: Scalar>(&self) -> Result<ArmState<S>> {
        if self.design_matrix.len() != self.dim * self.dim || self.reward_vector.len() != self.dim {
            return Err(Error::Input("snapshot dimensions are inconsistent".into()));
        }
        let mut design = Matrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                design[(i, j)] = S::cast(self.design_matrix[i * self.dim + j]);
            }
        }
        let factor = linalg::cholesky(&design)?;
        Ok(ArmState {
            arm_id: self.arm_id.clone(),
            design,
            factor,
            rewards: self.reward_vector.iter().map(|&v| S::cast(v)).collect(),
            play_count: self.play_count,
        })
    }
}

/// Stable digest of a full bandit state, recorded in run logs.
pub fn snapshot_hash(snapshots: &[ArmSnapshot]) -> String {
    let json = serde_json::to_string(snapshots).expect("snapshot serializes");
    hex16(fnv1a(json.as_bytes()))
}

/// Cheap per-round digest over arm ids, play counts, reward vectors, and
/// design-matrix diagonals. Detects state drift without serializing the
/// full d×d matrices every round.
pub fn state_digest<S: Scalar>(arms: &[ArmState<S>]) -> String {
    let mut bytes = Vec::new();
    for arm in arms {
        bytes.extend_from_slice(arm.arm_id.as_bytes());
        bytes.extend_from_slice(&arm.play_count.to_le_bytes());
        for v in &arm.rewards {
            bytes.extend_from_slice(&v.as_f64().to_bits().to_le_bytes());
        }
        for i in 0..arm.dim() {
            bytes.extend_from_slice(&arm.design[(i, i)].as_f64().to_bits().to_le_bytes());
        }
    }
    hex16(fnv1a(&bytes))
}

/// One arm state per action id, in configuration order.
pub fn init_arms<S: Scalar>(config: &BanditConfig<S>) -> Result<Vec<ArmState<S>>> {
    config.validate()?;
    config
        .arm_ids
        .iter()
        .map(|id| ArmState::new(id.clone(), config.dim))
        .collect()
}

fn check_dim<S: Scalar>(arm: &ArmState<S>, x: &ContextVector<S>) -> Result<()> {
    if arm.dim() != x.dim() {
        return Err(Error::Usage(format!(
            "context dimension {} does not match arm dimension {}",
            x.dim(),
            arm.dim()
        )));
    }
    Ok(())
}

/// xᵀθ̂ + α·sqrt(xᵀA⁻¹x). Deterministic for fixed inputs.
pub fn ucb_score<S: Scalar>(arm: &ArmState<S>, x: &ContextVector<S>, alpha: S) -> Result<S> {
    check_dim(arm, x)?;
    let mean = arm.mean_estimate(x.as_slice());
    let quad = arm.quad_form_inv(x.as_slice());
    let score = mean + alpha * quad.max(S::zero()).sqrt();
    if !score.is_finite() {
        return Err(Error::Numeric(format!(
            "non-finite ucb score for arm {}",
            arm.arm_id
        )));
    }
    Ok(score)
}

/// α·sqrt(xᵀA⁻¹x) ≥ 0: the exploration bonus alone.
pub fn ci_width<S: Scalar>(arm: &ArmState<S>, x: &ContextVector<S>, alpha: S) -> Result<S> {
    check_dim(arm, x)?;
    let quad = arm.quad_form_inv(x.as_slice());
    let width = alpha * quad.max(S::zero()).sqrt();
    if !width.is_finite() {
        return Err(Error::Numeric(format!(
            "non-finite ci width for arm {}",
            arm.arm_id
        )));
    }
    Ok(width)
}

/// Index of the arm with maximal UCB score; ties go to the smallest index,
/// i.e. the earliest entry in the configured arm order.
pub fn select_arm<S: Scalar>(
    arms: &[ArmState<S>],
    x: &ContextVector<S>,
    alpha: S,
) -> Result<usize> {
    if arms.is_empty() {
        return Err(Error::Usage("cannot select from an empty arm set".into()));
    }
    let mut best = 0;
    let mut best_score = ucb_score(&arms[0], x, alpha)?;
    for (i, arm) in arms.iter().enumerate().skip(1) {
        let score = ucb_score(arm, x, alpha)?;
        if score > best_score {
            best = i;
            best_score = score;
        }
    }
    Ok(best)
}

/// A ← A + xxᵀ, v ← v + r·x, play count incremented.
pub fn update_arm<S: Scalar>(arm: &mut ArmState<S>, x: &ContextVector<S>, reward: S) -> Result<()> {
    check_dim(arm, x)?;
    if !reward.is_finite() {
        return Err(Error::Input("reward must be finite".into()));
    }
    arm.design.add_outer(x.as_slice(), x.as_slice());
    linalg::cholesky_update(&mut arm.factor, x.as_slice());
    linalg::axpy(&mut arm.rewards, reward, x.as_slice());
    arm.play_count += 1;
    Ok(())
}
