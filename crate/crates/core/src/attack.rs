//! The end-to-end attack loop: candidate pool, per-round
//! select → edit → judge → reward → update → truncate, the three
//! semantics-preserving baselines, and per-round metric traces.
//!
//! One run is strictly sequential (the bandit state is a dependency chain);
//! runs across questions are independent and can execute in parallel.

use crate::actions::{EditEngine, StylisticAction};
use crate::bandit::{self, ArmSnapshot, ArmState, BanditConfig, ContextVector};
use crate::embed::Embedder;
use crate::error::{Error, Result};
use crate::judges::{score_pairwise_swapped, Judge, JudgeMode};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

/// An answer text with its judge score and lineage.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Candidate {
    pub id: u64,
    pub text: String,
    /// Judge numeric score (swap-averaged in pairwise mode). Always finite.
    pub score: f64,
    pub parent_id: Option<u64>,
    pub action_applied: Option<String>,
    pub round_created: u32,
    /// Embedding cosine similarity to the initial answer.
    pub similarity_to_initial: f64,
    /// Set when similarity fell below the semantic gate threshold.
    pub flagged_low_similarity: bool,
}

/// Top-K candidate pool with elitist eviction: only a lowest-scoring member
/// is ever removed, so the pool maximum is non-decreasing across rounds.
/// Members stay sorted by id, which keeps every derived quantity replayable.
#[derive(Debug, Clone)]
pub struct CandidatePool {
    capacity: usize,
    members: Vec<Candidate>,
}

impl CandidatePool {
    pub fn new(capacity: usize) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::Config("pool capacity K must be at least 1".into()));
        }
        Ok(Self {
            capacity,
            members: Vec::with_capacity(capacity + 1),
        })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn members(&self) -> &[Candidate] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn max_score(&self) -> f64 {
        self.members
            .iter()
            .map(|c| c.score)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Arithmetic mean of member scores, summed in id order.
    pub fn mean_score(&self) -> f64 {
        if self.members.is_empty() {
            return 0.0;
        }
        self.members.iter().map(|c| c.score).sum::<f64>() / self.members.len() as f64
    }
}

/// Insert `candidate`; if the pool then exceeds capacity, evict exactly one
/// member with the minimal score. Ties among minima break toward the oldest
/// `round_created`, then the smallest id.
pub fn insert_and_truncate(pool: &mut CandidatePool, candidate: Candidate) {
    debug_assert!(candidate.score.is_finite());
    let pos = pool.members.partition_point(|c| c.id < candidate.id);
    pool.members.insert(pos, candidate);
    if pool.members.len() > pool.capacity {
        let evict = pool
            .members
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| {
                a.score
                    .partial_cmp(&b.score)
                    .unwrap()
                    .then(a.round_created.cmp(&b.round_created))
                    .then(a.id.cmp(&b.id))
            })
            .map(|(i, _)| i)
            .expect("pool is non-empty");
        pool.members.remove(evict);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Policy {
    /// LinUCB over the 8-action space.
    Bite,
    /// Uniform random action from the same space.
    Random,
    /// The pool framework restricted to the holistic rewrite action.
    IterativeRewrite,
    /// A single holistic rewrite pass, regardless of the round budget.
    HolisticRewrite,
}

impl Policy {
    pub const ALL: [Policy; 4] = [
        Policy::Bite,
        Policy::Random,
        Policy::IterativeRewrite,
        Policy::HolisticRewrite,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Policy::Bite => "bite",
            Policy::Random => "random",
            Policy::IterativeRewrite => "iterative-rewrite",
            Policy::HolisticRewrite => "holistic-rewrite",
        }
    }

    pub fn from_name(s: &str) -> Option<Policy> {
        Policy::ALL.iter().copied().find(|p| p.name() == s)
    }
}

impl std::fmt::Display for Policy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AttackRunConfig {
    /// Round budget T.
    pub rounds: u32,
    /// Pool size K.
    pub pool_capacity: usize,
    pub policy: Policy,
    pub seed: u64,
    /// LinUCB exploration weight (bite policy only).
    pub alpha: f64,
    /// Candidates below this similarity to the initial answer are flagged.
    pub semantic_gate: f64,
    /// Opt-in: drop flagged candidates instead of inserting them. The judge
    /// query and any bandit update still happen; only pool entry is blocked.
    pub reject_low_similarity: bool,
}

impl Default for AttackRunConfig {
    fn default() -> Self {
        Self {
            rounds: 25,
            pool_capacity: 3,
            policy: Policy::Bite,
            seed: 0,
            alpha: 1.0,
            semantic_gate: 0.80,
            reject_low_similarity: false,
        }
    }
}

impl AttackRunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.rounds == 0 {
            return Err(Error::Config("round budget T must be at least 1".into()));
        }
        if self.pool_capacity == 0 {
            return Err(Error::Config("pool capacity K must be at least 1".into()));
        }
        if !self.alpha.is_finite() || self.alpha < 0.0 {
            return Err(Error::Config(
                "alpha must be finite and non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// Per-round record of the loop's observable state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RoundTrace {
    pub round: u32,
    pub chosen_arm: Option<String>,
    pub parent_id: u64,
    /// Id of the created candidate; `None` when the round was skipped.
    pub candidate_id: Option<u64>,
    /// S_t. On skipped rounds this repeats the parent score.
    pub new_score: f64,
    /// r_t = S_t − S_{t−1} (the parent's score). Zero on skipped rounds.
    pub reward: f64,
    pub best_so_far: f64,
    pub pool_mean: f64,
    /// Exploration bonus of the chosen arm at selection time (bite only).
    pub ci_width_of_chosen: Option<f64>,
    /// Budget consumed with no update (edit or judge failure).
    pub skipped: bool,
    /// Raw verdict representation for the log.
    pub raw_verdict: String,
    /// Digest of the bandit state after this round's update (bite only).
    pub bandit_digest: Option<String>,
}

/// One question's attack inputs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AttackInput {
    pub question_id: String,
    pub question: String,
    pub initial_answer: String,
    /// Reference answer, required in pairwise mode.
    pub reference: Option<String>,
}

/// Shared dependencies for a batch of runs.
pub struct RunDeps<'a> {
    pub judge: &'a dyn Judge,
    pub editor: &'a dyn EditEngine,
    pub embedder: &'a dyn Embedder,
    /// The bandit's arms, in stable order (the default 8-action registry).
    pub actions: &'a [StylisticAction],
    /// The holistic rewrite action used by the two rewrite baselines.
    pub rewrite: &'a StylisticAction,
}

/// Complete result of one attack run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AttackRun {
    pub question_id: String,
    pub question: String,
    pub policy: Policy,
    pub seed: u64,
    pub pool_capacity: usize,
    pub judge_id: String,
    pub judge_mode: JudgeMode,
    pub initial_score: f64,
    pub traces: Vec<RoundTrace>,
    /// Every candidate ever created, indexed by id (lineage table).
    pub candidates: Vec<Candidate>,
    /// Ids of the pool members at the end of the run.
    pub final_pool: Vec<u64>,
    pub judge_calls: u64,
    /// Final bandit state (bite policy only).
    pub arms: Option<Vec<ArmSnapshot>>,
}

impl AttackRun {
    /// The attack's final answer: highest score in the final pool, ties to
    /// the smallest id.
    pub fn best_final(&self) -> &Candidate {
        self.final_pool
            .iter()
            .map(|&id| &self.candidates[id as usize])
            .max_by(|a, b| a.score.partial_cmp(&b.score).unwrap().then(b.id.cmp(&a.id)))
            .expect("final pool is never empty")
    }

    pub fn score_lift(&self) -> f64 {
        self.best_final().score - self.initial_score
    }

    /// Strict-improvement success: a higher best score in pointwise mode, a
    /// verdict flipped in the target's favor in pairwise mode.
    pub fn attack_success(&self) -> bool {
        match self.judge_mode {
            JudgeMode::Pointwise => self.best_final().score > self.initial_score,
            JudgeMode::Pairwise(_) => self.initial_score <= 0.0 && self.best_final().score > 0.0,
        }
    }
}

struct Scorer<'a> {
    judge: &'a dyn Judge,
    calls: u64,
}

impl<'a> Scorer<'a> {
    /// Judge numeric for one answer (swap-averaged in pairwise mode) plus a
    /// raw-verdict string for the log. Every attempt counts against the
    /// query budget, including failed ones.
    fn score(
        &mut self,
        question: &str,
        answer: &str,
        reference: Option<&str>,
    ) -> Result<(f64, String)> {
        match self.judge.mode() {
            JudgeMode::Pointwise => {
                self.calls += 1;
                let verdict = self.judge.score_pointwise(question, answer)?;
                Ok((verdict.numeric, format!("{:?}", verdict.raw)))
            }
            JudgeMode::Pairwise(_) => {
                let reference = reference.ok_or_else(|| {
                    Error::Config("pairwise mode requires a reference answer".into())
                })?;
                self.calls += 2;
                let numeric = score_pairwise_swapped(self.judge, question, answer, reference)?;
                Ok((numeric, format!("swap_avg({numeric})")))
            }
        }
    }
}

/// Execute one attack run.
///
/// Round structure: draw a parent uniformly at random from the pool, embed
/// (question, parent) as the context, pick an action (policy-dependent),
/// apply ψ, score the result, reward the marginal improvement over the
/// parent, update the bandit (bite only), insert into the pool, truncate.
/// Edit/judge failures skip the round but still consume budget.
///
/// `shared_arms` carries bandit state across questions when a caller opts
/// into dataset-level training; the default is a fresh bandit per question.
pub fn run_attack(
    cfg: &AttackRunConfig,
    input: &AttackInput,
    deps: &RunDeps,
    mut shared_arms: Option<&mut Vec<ArmState<f64>>>,
) -> Result<AttackRun> {
    cfg.validate()?;
    if input.initial_answer.trim().is_empty() {
        return Err(Error::Input("initial answer must be non-empty".into()));
    }
    let reference = input.reference.as_deref();
    let mut scorer = Scorer {
        judge: deps.judge,
        calls: 0,
    };

    // S0; an unrecoverable failure here aborts the run with no traces.
    let (s0, _raw0) = scorer.score(&input.question, &input.initial_answer, reference)?;

    let mut rng = StdRng::seed_from_u64(cfg.seed);
    let mut pool = CandidatePool::new(cfg.pool_capacity)?;
    let mut candidates = vec![Candidate {
        id: 0,
        text: input.initial_answer.clone(),
        score: s0,
        parent_id: None,
        action_applied: None,
        round_created: 0,
        similarity_to_initial: 1.0,
        flagged_low_similarity: false,
    }];
    insert_and_truncate(&mut pool, candidates[0].clone());

    let mut own_arms: Vec<ArmState<f64>>;
    let arms: Option<&mut Vec<ArmState<f64>>> = if cfg.policy == Policy::Bite {
        match shared_arms.as_deref_mut() {
            Some(existing) if !existing.is_empty() => Some(existing),
            _ => {
                let bandit_cfg = BanditConfig {
                    alpha: cfg.alpha,
                    dim: deps.embedder.dim(),
                    arm_ids: deps.actions.iter().map(|a| a.arm_id.clone()).collect(),
                    seed: cfg.seed,
                };
                own_arms = bandit::init_arms(&bandit_cfg)?;
                if let Some(external) = shared_arms {
                    *external = std::mem::take(&mut own_arms);
                    Some(external)
                } else {
                    Some(&mut own_arms)
                }
            }
        }
    } else {
        None
    };
    let mut arms = arms;

    let initial_embedding = deps.embedder.embed("", &input.initial_answer)?;
    let mut best_so_far = s0;
    let mut traces = Vec::new();
    let total_rounds = if cfg.policy == Policy::HolisticRewrite {
        1
    } else {
        cfg.rounds
    };

    for round in 1..=total_rounds {
        let parent = {
            let idx = rng.random_range(0..pool.len());
            pool.members()[idx].clone()
        };

        let skip = |reason_arm: Option<String>, traces: &mut Vec<RoundTrace>| {
            traces.push(RoundTrace {
                round,
                chosen_arm: reason_arm,
                parent_id: parent.id,
                candidate_id: None,
                new_score: parent.score,
                reward: 0.0,
                best_so_far,
                pool_mean: pool.mean_score(),
                ci_width_of_chosen: None,
                skipped: true,
                raw_verdict: String::new(),
                bandit_digest: None,
            });
        };

        // Context of this round: φ(q, a_{t−1}).
        let context: ContextVector<f64> = match deps.embedder.embed(&input.question, &parent.text) {
            Ok(x) => x,
            Err(e) if e.is_retryable() => {
                skip(None, &mut traces);
                continue;
            }
            Err(e) => return Err(e),
        };

        // Policy-dependent action selection.
        let (action, ci): (&StylisticAction, Option<f64>) = match cfg.policy {
            Policy::Bite => {
                let arm_states = arms.as_deref_mut().expect("bite policy has arms");
                let idx = bandit::select_arm(arm_states, &context, cfg.alpha)?;
                let ci = bandit::ci_width(&arm_states[idx], &context, cfg.alpha)?;
                (&deps.actions[idx], Some(ci))
            }
            Policy::Random => {
                let idx = rng.random_range(0..deps.actions.len());
                (&deps.actions[idx], None)
            }
            Policy::IterativeRewrite | Policy::HolisticRewrite => (deps.rewrite, None),
        };

        // ψ: one edit. Failures skip the round; the bandit is not updated.
        let edit_seed = cfg.seed ^ (round as u64);
        let new_text = match deps.editor.edit(action, &parent.text, edit_seed) {
            Ok(t) => t,
            Err(Error::EditFailed(_)) | Err(Error::Transport(_)) | Err(Error::Input(_)) => {
                skip(Some(action.arm_id.clone()), &mut traces);
                continue;
            }
            Err(e) => return Err(e),
        };

        // 𝒥: score the candidate. Failures skip the round after consuming
        // the query budget.
        let (new_score, raw_verdict) = match scorer.score(&input.question, &new_text, reference) {
            Ok(v) => v,
            Err(Error::JudgeParse(_)) | Err(Error::Transport(_)) => {
                skip(Some(action.arm_id.clone()), &mut traces);
                continue;
            }
            Err(e) => return Err(e),
        };

        let reward = new_score - parent.score;
        let mut bandit_digest = None;
        if let (Policy::Bite, Some(arm_states)) = (cfg.policy, arms.as_deref_mut()) {
            let idx = deps
                .actions
                .iter()
                .position(|a| a.arm_id == action.arm_id)
                .expect("selected action is in the registry");
            bandit::update_arm(&mut arm_states[idx], &context, reward)?;
            bandit_digest = Some(bandit::state_digest(arm_states));
        }

        let similarity = deps
            .embedder
            .semantic_similarity(&input.initial_answer, &new_text)
            .or_else(|_| {
                crate::embed::Embedder::embed(deps.embedder, "", &new_text)
                    .map(|v| crate::embed::cosine(&initial_embedding, &v))
            })?;
        let flagged = similarity < cfg.semantic_gate;

        let candidate = Candidate {
            id: candidates.len() as u64,
            text: new_text,
            score: new_score,
            parent_id: Some(parent.id),
            action_applied: Some(action.arm_id.clone()),
            round_created: round,
            similarity_to_initial: similarity,
            flagged_low_similarity: flagged,
        };
        candidates.push(candidate.clone());
        if !(cfg.reject_low_similarity && flagged) {
            insert_and_truncate(&mut pool, candidate);
        }

        best_so_far = best_so_far.max(new_score);
        traces.push(RoundTrace {
            round,
            chosen_arm: Some(action.arm_id.clone()),
            parent_id: parent.id,
            candidate_id: Some(candidates.len() as u64 - 1),
            new_score,
            reward,
            best_so_far,
            pool_mean: pool.mean_score(),
            ci_width_of_chosen: ci,
            skipped: false,
            raw_verdict,
            bandit_digest,
        });
    }

    let arm_snapshots = arms
        .as_deref()
        .map(|a| a.iter().map(ArmState::snapshot).collect::<Vec<_>>());
    Ok(AttackRun {
        question_id: input.question_id.clone(),
        question: input.question.clone(),
        policy: cfg.policy,
        seed: cfg.seed,
        pool_capacity: cfg.pool_capacity,
        judge_id: deps.judge.id().to_string(),
        judge_mode: deps.judge.mode(),
        initial_score: s0,
        traces,
        candidates,
        final_pool: pool.members().iter().map(|c| c.id).collect(),
        judge_calls: scorer.calls,
        arms: arm_snapshots,
    })
}

/// Run several policies over the same question with shared seeds and one
/// judge. Failed runs are isolated; callers get one `Result` per policy.
pub fn run_baseline_grid(
    base_cfg: &AttackRunConfig,
    policies: &[Policy],
    input: &AttackInput,
    deps: &RunDeps,
) -> Vec<(Policy, Result<AttackRun>)> {
    policies
        .iter()
        .map(|&policy| {
            let cfg = AttackRunConfig {
                policy,
                ..base_cfg.clone()
            };
            (policy, run_attack(&cfg, input, deps, None))
        })
        .collect()
}

/// Aggregate metrics of one run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunMetrics {
    pub question_id: String,
    pub policy: Policy,
    pub initial_score: f64,
    pub best_final_score: f64,
    pub score_lift: f64,
    pub attack_success: bool,
    pub best_so_far_series: Vec<f64>,
    pub pool_mean_series: Vec<f64>,
    pub ci_width_series: Vec<Option<f64>>,
    pub judge_calls: u64,
}

pub fn compute_run_metrics(run: &AttackRun) -> RunMetrics {
    RunMetrics {
        question_id: run.question_id.clone(),
        policy: run.policy,
        initial_score: run.initial_score,
        best_final_score: run.best_final().score,
        score_lift: run.score_lift(),
        attack_success: run.attack_success(),
        best_so_far_series: run.traces.iter().map(|t| t.best_so_far).collect(),
        pool_mean_series: run.traces.iter().map(|t| t.pool_mean).collect(),
        ci_width_series: run.traces.iter().map(|t| t.ci_width_of_chosen).collect(),
        judge_calls: run.judge_calls,
    }
}

/// Fraction of paired comparisons where `ours` wins or ties `theirs`.
pub fn unbeaten_rate(ours: &[f64], theirs: &[f64]) -> f64 {
    assert_eq!(
        ours.len(),
        theirs.len(),
        "unbeaten rate needs paired finals"
    );
    if ours.is_empty() {
        return 0.0;
    }
    let unbeaten = ours.iter().zip(theirs).filter(|(a, b)| a >= b).count();
    unbeaten as f64 / ours.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actions::{default_action_registry, rewrite_action, RuleBasedEditor};
    use crate::embed::OfflineHashingEmbedder;
    use crate::judges::{BaseQuality, SyntheticJudgeSpec};
    use std::collections::BTreeMap;


    fn constant_judge(score: f64) -> crate::judges::SyntheticJudge {
        SyntheticJudgeSpec {
            base_quality: BaseQuality::Constant(score),
            ..SyntheticJudgeSpec::default()
        }
        .build()
        .unwrap()
    }

    fn emoji_judge(weight: f64) -> crate::judges::SyntheticJudge {
        let mut planted = BTreeMap::new();
        planted.insert("emoji_count".to_string(), weight);
        SyntheticJudgeSpec {
            planted_weights: planted,
            ..SyntheticJudgeSpec::default()
        }
        .build()
        .unwrap()
    }

    fn cand(id: u64, score: f64, round: u32) -> Candidate {
        Candidate {
            id,
            text: format!("c{id}"),
            score,
            parent_id: None,
            action_applied: None,
            round_created: round,
            similarity_to_initial: 1.0,
            flagged_low_similarity: false,
        }
    }

    struct Deps {
        actions: Vec<StylisticAction>,
        rewrite: StylisticAction,
        editor: RuleBasedEditor,
        embedder: OfflineHashingEmbedder,
    }

    impl Deps {
        fn new() -> Self {
            Self {
                actions: default_action_registry(),
                rewrite: rewrite_action(),
                editor: RuleBasedEditor,
                embedder: OfflineHashingEmbedder::new(64).unwrap(),
            }
        }

        fn with<'a>(&'a self, judge: &'a dyn Judge) -> RunDeps<'a> {
            RunDeps {
                judge,
                editor: &self.editor,
                embedder: &self.embedder,
                actions: &self.actions,
                rewrite: &self.rewrite,
            }
        }
    }

    fn input() -> AttackInput {
        AttackInput {
            question_id: "q1".into(),
            question: "What is the boiling point of water at sea level?".into(),
            initial_answer: "Water boils at 100 degrees Celsius at sea level. This holds for \
pure water under standard atmospheric pressure."
                .into(),
            reference: None,
        }
    }

    #[test]
    fn pool_eviction_keeps_top_scores() {
        let mut pool = CandidatePool::new(3).unwrap();
        for (id, score) in [(0, 5.0), (1, 6.0), (2, 7.0)] {
            insert_and_truncate(&mut pool, cand(id, score, id as u32));
        }
        insert_and_truncate(&mut pool, cand(3, 8.0, 3));
        let scores: Vec<f64> = pool.members().iter().map(|c| c.score).collect();
        assert_eq!(scores, vec![6.0, 7.0, 8.0]);
    }

    #[test]
    fn pool_evicts_new_minimum_immediately() {
        let mut pool = CandidatePool::new(3).unwrap();
        for (id, score) in [(0, 5.0), (1, 6.0), (2, 7.0)] {
            insert_and_truncate(&mut pool, cand(id, score, id as u32));
        }
        insert_and_truncate(&mut pool, cand(3, 4.0, 3));
        let scores: Vec<f64> = pool.members().iter().map(|c| c.score).collect();
        assert_eq!(scores, vec![5.0, 6.0, 7.0]);
    }

    #[test]
    fn pool_tie_evicts_oldest_then_smallest_id() {
        // {5, 5, 7} + 6 → the round-0 five leaves
        let mut pool = CandidatePool::new(3).unwrap();
        insert_and_truncate(&mut pool, cand(0, 5.0, 0));
        insert_and_truncate(&mut pool, cand(1, 5.0, 1));
        insert_and_truncate(&mut pool, cand(2, 7.0, 2));
        insert_and_truncate(&mut pool, cand(3, 6.0, 3));
        let ids: Vec<u64> = pool.members().iter().map(|c| c.id).collect();
        assert_eq!(ids, vec![1, 2, 3]);

        // same round: smallest id leaves
        let mut pool = CandidatePool::new(2).unwrap();
        insert_and_truncate(&mut pool, cand(0, 5.0, 1));
        insert_and_truncate(&mut pool, cand(1, 5.0, 1));
        insert_and_truncate(&mut pool, cand(2, 6.0, 2));
        let ids: Vec<u64> = pool.members().iter().map(|c| c.id).collect();
        assert_eq!(ids, vec![1, 2]);
    }

    #[test]
    fn constant_judge_one_round() {
        let judge = constant_judge(5.0);
        let deps = Deps::new();
        let cfg = AttackRunConfig {
            rounds: 1,
            ..AttackRunConfig::default()
        };
        let run = run_attack(&cfg, &input(), &deps.with(&judge), None).unwrap();
        assert_eq!(run.traces.len(), 1);
        assert_eq!(run.traces[0].reward, 0.0);
        assert_eq!(run.traces[0].best_so_far, 5.0);
        assert_eq!(run.final_pool.len(), 2); // a0 plus the single edit, K = 3
        let metrics = compute_run_metrics(&run);
        assert!(!metrics.attack_success);
        assert_eq!(metrics.score_lift, 0.0);
    }

    #[test]
    fn random_policy_is_deterministic_per_seed() {
        let judge = emoji_judge(2.0);
        let deps = Deps::new();
        let cfg = AttackRunConfig {
            policy: Policy::Random,
            seed: 9,
            ..AttackRunConfig::default()
        };
        let a = run_attack(&cfg, &input(), &deps.with(&judge), None).unwrap();
        let b = run_attack(&cfg, &input(), &deps.with(&judge), None).unwrap();
        let arms_a: Vec<_> = a.traces.iter().map(|t| t.chosen_arm.clone()).collect();
        let arms_b: Vec<_> = b.traces.iter().map(|t| t.chosen_arm.clone()).collect();
        assert_eq!(arms_a, arms_b);
        let scores_a: Vec<u64> = a.traces.iter().map(|t| t.new_score.to_bits()).collect();
        let scores_b: Vec<u64> = b.traces.iter().map(|t| t.new_score.to_bits()).collect();
        assert_eq!(scores_a, scores_b);
    }

    #[test]
    fn bite_learns_the_single_rewarding_arm() {
        let judge = emoji_judge(2.0);
        let deps = Deps::new();
        let cfg = AttackRunConfig {
            seed: 3,
            ..AttackRunConfig::default()
        };
        let run = run_attack(&cfg, &input(), &deps.with(&judge), None).unwrap();
        // any emoji edit strictly raises the planted score
        assert!(run.attack_success());
        assert!(run.score_lift() >= 2.0);
        // the emoji arm ends with the most plays
        let snaps = run.arms.as_ref().unwrap();
        let emoji_plays = snaps
            .iter()
            .find(|s| s.arm_id == "emoji")
            .unwrap()
            .play_count;
        for s in snaps {
            if s.arm_id != "emoji" {
                assert!(
                    emoji_plays >= s.play_count,
                    "emoji {} vs {} {}",
                    emoji_plays,
                    s.arm_id,
                    s.play_count
                );
            }
        }
    }

    #[test]
    fn invariants_hold_across_policies() {
        let judge = emoji_judge(2.0);
        let deps = Deps::new();
        for policy in Policy::ALL {
            let cfg = AttackRunConfig {
                policy,
                seed: 5,
                ..AttackRunConfig::default()
            };
            let run = run_attack(&cfg, &input(), &deps.with(&judge), None).unwrap();

            // best-so-far is non-decreasing
            let mut last = f64::NEG_INFINITY;
            for t in &run.traces {
                assert!(t.best_so_far >= last);
                last = t.best_so_far;
            }

            // budget: pointwise judge calls ≤ T + 1
            assert!(run.judge_calls <= cfg.rounds as u64 + 1);

            // reward bookkeeping: lineage rewards telescope exactly to
            // score − S0 (scores are integers here, so sums are exact)
            for c in &run.candidates {
                let mut acc = 0.0;
                let mut cursor = c;
                while let Some(pid) = cursor.parent_id {
                    acc += cursor.score - run.candidates[pid as usize].score;
                    cursor = &run.candidates[pid as usize];
                }
                assert_eq!(acc, c.score - run.initial_score, "candidate {}", c.id);
            }

            // bandit/loop consistency (bite only)
            if let Some(snaps) = &run.arms {
                for snap in snaps {
                    let judged = run
                        .traces
                        .iter()
                        .filter(|t| {
                            !t.skipped && t.chosen_arm.as_deref() == Some(snap.arm_id.as_str())
                        })
                        .count() as u64;
                    assert_eq!(snap.play_count, judged, "arm {}", snap.arm_id);
                }
            }

            match policy {
                Policy::HolisticRewrite => assert_eq!(run.traces.len(), 1),
                _ => assert_eq!(run.traces.len(), cfg.rounds as usize),
            }
            if policy == Policy::IterativeRewrite {
                assert!(run
                    .traces
                    .iter()
                    .all(|t| t.chosen_arm.as_deref() == Some("rewrite")));
            }
        }
    }

    #[test]
    fn pairwise_mode_uses_swap_average_and_budget() {
        let mut planted = BTreeMap::new();
        planted.insert("emoji_count".to_string(), 2.0);
        let judge = SyntheticJudgeSpec {
            planted_weights: planted,
            pairwise: Some(crate::judges::PairwiseMapping::ThreeWay),
            ..SyntheticJudgeSpec::default()
        }
        .build()
        .unwrap();
        let deps = Deps::new();
        let mut inp = input();
        inp.reference = Some(inp.initial_answer.clone());
        let cfg = AttackRunConfig {
            rounds: 10,
            seed: 2,
            ..AttackRunConfig::default()
        };
        let run = run_attack(&cfg, &inp, &deps.with(&judge), None).unwrap();
        assert!(run.judge_calls <= 2 * (cfg.rounds as u64 + 1));
        assert_eq!(run.initial_score, 0.0); // identical to reference → tie
                                            // an emoji edit beats the reference after swap averaging
        if run.attack_success() {
            assert!(run.best_final().score > 0.0);
        }

        let mut no_ref = inp;
        no_ref.reference = None;
        assert!(run_attack(&cfg, &no_ref, &deps.with(&judge), None).is_err());
    }

    #[test]
    fn shared_bandit_persists_across_questions() {
        let judge = emoji_judge(2.0);
        let deps = Deps::new();
        let cfg = AttackRunConfig {
            rounds: 10,
            ..AttackRunConfig::default()
        };
        let mut arms: Vec<ArmState<f64>> = Vec::new();
        let run1 = run_attack(&cfg, &input(), &deps.with(&judge), Some(&mut arms)).unwrap();
        let plays_after_1: u64 = arms.iter().map(|a| a.play_count()).sum();
        assert!(plays_after_1 > 0);
        let mut inp2 = input();
        inp2.question_id = "q2".into();
        let run2 = run_attack(&cfg, &inp2, &deps.with(&judge), Some(&mut arms)).unwrap();
        let plays_after_2: u64 = arms.iter().map(|a| a.play_count()).sum();
        assert!(plays_after_2 > plays_after_1);
        assert_eq!(run1.question_id, "q1");
        assert_eq!(run2.question_id, "q2");
    }

    #[test]
    fn skipped_rounds_consume_budget_without_updates() {
        struct FlakyEditor {
            inner: RuleBasedEditor,
        }
        impl EditEngine for FlakyEditor {
            fn edit(&self, action: &StylisticAction, original: &str, seed: u64) -> Result<String> {
                if seed % 2 == 1 {
                    return Err(Error::EditFailed("synthetic outage".into()));
                }
                self.inner.edit(action, original, seed)
            }
        }
        let judge = emoji_judge(2.0);
        let deps = Deps::new();
        let flaky = FlakyEditor {
            inner: RuleBasedEditor,
        };
        let run_deps = RunDeps {
            judge: &judge,
            editor: &flaky,
            embedder: &deps.embedder,
            actions: &deps.actions,
            rewrite: &deps.rewrite,
        };
        let cfg = AttackRunConfig {
            rounds: 8,
            seed: 0,
            ..AttackRunConfig::default()
        };
        let run = run_attack(&cfg, &input(), &run_deps, None).unwrap();
        assert_eq!(run.traces.len(), 8, "skipped rounds still consume budget");
        let skipped = run.traces.iter().filter(|t| t.skipped).count();
        assert!(skipped > 0);
        // every skip: no candidate, zero reward
        for t in run.traces.iter().filter(|t| t.skipped) {
            assert!(t.candidate_id.is_none());
            assert_eq!(t.reward, 0.0);
        }
        if let Some(snaps) = &run.arms {
            let total: u64 = snaps.iter().map(|s| s.play_count).sum();
            assert_eq!(total as usize, run.traces.len() - skipped);
        }
    }

    #[test]
    fn unbeaten_rate_self_comparison_is_total() {
        let finals = [5.0, 6.0, 7.5];
        assert_eq!(unbeaten_rate(&finals, &finals), 1.0);
        assert_eq!(unbeaten_rate(&[1.0, 9.0], &[2.0, 3.0]), 0.5);
    }

    #[test]
    fn baseline_grid_runs_every_policy_with_isolation() {
        let judge = emoji_judge(2.0);
        let deps = Deps::new();
        let base = AttackRunConfig {
            rounds: 5,
            seed: 4,
            ..AttackRunConfig::default()
        };
        let results = run_baseline_grid(&base, &Policy::ALL, &input(), &deps.with(&judge));
        assert_eq!(results.len(), 4);
        for (policy, outcome) in &results {
            let run = outcome.as_ref().expect("offline grid runs succeed");
            assert_eq!(run.policy, *policy);
        }
        let holistic = &results[3].1.as_ref().unwrap();
        assert_eq!(holistic.traces.len(), 1);

        // failures stay per-run instead of aborting the grid
        let pairwise_judge = SyntheticJudgeSpec {
            pairwise: Some(crate::judges::PairwiseMapping::ThreeWay),
            ..SyntheticJudgeSpec::default()
        }
        .build()
        .unwrap();
        let results =
            run_baseline_grid(&base, &Policy::ALL, &input(), &deps.with(&pairwise_judge));
        assert_eq!(results.len(), 4);
        assert!(results.iter().all(|(_, r)| r.is_err()), "missing reference fails each run");
    }

    #[test]
    fn semantic_gate_flags_and_optionally_rejects() {
        let judge = emoji_judge(2.0);
        let deps = Deps::new();
        // an absurdly high gate so every edit trips it
        let cfg = AttackRunConfig {
            rounds: 6,
            seed: 1,
            semantic_gate: 0.9999,
            ..AttackRunConfig::default()
        };
        let run = run_attack(&cfg, &input(), &deps.with(&judge), None).unwrap();
        assert!(run.candidates[1..].iter().all(|c| c.flagged_low_similarity));
        // flagged candidates are still inserted by default
        assert!(run.final_pool.iter().any(|&id| id != 0));

        let cfg = AttackRunConfig {
            reject_low_similarity: true,
            ..cfg
        };
        let run = run_attack(&cfg, &input(), &deps.with(&judge), None).unwrap();
        // rejection keeps the pool at the initial answer only
        assert_eq!(run.final_pool, vec![0]);
        // budget was still spent and rewards still observed
        assert_eq!(run.traces.len(), 6);
        assert!(run.candidates.len() > 1);
    }
}
