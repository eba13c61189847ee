//! Declarative experiment configuration.
//!
//! One JSON file drives a whole experiment. Documented keys:
//!   judges        — list of judge specs (synthetic or remote)
//!   editor        — rule_based (offline) or remote chat endpoint
//!   embedder      — offline_hashing {dim} or remote {dim, endpoint}
//!   policies      — subset of [bite, random, iterative-rewrite,
//!                   holistic-rewrite]
//!   rounds (T), pool_capacity (K), alpha, seed
//!   bandit_scope  — per_question (default) or shared
//!   semantic_gate, reject_low_similarity
//!   hash_only     — store answer hashes instead of full texts
//!   log_arms      — embed final bandit snapshots in the last log record
//!   prompt_dir    — directory of prompt-template overrides
//!   max_in_flight — worker cap for parallel runs / remote requests
//!
//! Credentials are only ever named here (environment variable names),
//! never stored.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use stylebandit::actions::{
    default_action_registry, load_action_registry, rewrite_action, EditEngine, LlmEditor,
    RuleBasedEditor, StylisticAction,
};
use stylebandit::attack::Policy;
use stylebandit::embed::{Embedder, OfflineHashingEmbedder, OFFLINE_DEFAULT_DIM};
use stylebandit::judges::{Judge, JudgeMode, JudgePromptSet, PairwiseMapping, SyntheticJudgeSpec};
use stylebandit::remote::{ChatClient, EndpointConfig, RemoteEmbedder, RemoteJudge};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum JudgeSpec {
    Synthetic(SyntheticJudgeSpec),
    Remote {
        id: String,
        #[serde(default)]
        mode: ModeSpec,
        endpoint: EndpointConfig,
        /// Multiple variants switch on randomized prompting at the source.
        #[serde(default)]
        prompt_variants: Option<Vec<String>>,
        #[serde(default)]
        selection_seed: u64,
    },
}

impl JudgeSpec {
    pub fn id(&self) -> &str {
        match self {
            JudgeSpec::Synthetic(s) => &s.id,
            JudgeSpec::Remote { id, .. } => id,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeSpec {
    #[default]
    Pointwise,
    PairwiseThreeWay,
    PairwiseFiveLevel,
}

impl ModeSpec {
    pub fn to_mode(self) -> JudgeMode {
        match self {
            ModeSpec::Pointwise => JudgeMode::Pointwise,
            ModeSpec::PairwiseThreeWay => JudgeMode::Pairwise(PairwiseMapping::ThreeWay),
            ModeSpec::PairwiseFiveLevel => JudgeMode::Pairwise(PairwiseMapping::FiveLevel),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EditorSpec {
    #[default]
    RuleBased,
    Remote {
        endpoint: EndpointConfig,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EmbedderSpec {
    OfflineHashing {
        #[serde(default = "default_offline_dim")]
        dim: usize,
    },
    Remote {
        dim: usize,
        endpoint: EndpointConfig,
    },
}

fn default_offline_dim() -> usize {
    OFFLINE_DEFAULT_DIM
}

impl Default for EmbedderSpec {
    fn default() -> Self {
        EmbedderSpec::OfflineHashing {
            dim: OFFLINE_DEFAULT_DIM,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BanditScope {
    #[default]
    PerQuestion,
    Shared,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub judges: Vec<JudgeSpec>,
    pub editor: EditorSpec,
    pub embedder: EmbedderSpec,
    pub policies: Vec<Policy>,
    pub rounds: u32,
    pub pool_capacity: usize,
    pub alpha: f64,
    pub seed: u64,
    pub bandit_scope: BanditScope,
    pub semantic_gate: f64,
    pub reject_low_similarity: bool,
    pub hash_only: bool,
    pub log_arms: bool,
    pub prompt_dir: Option<PathBuf>,
    /// When set, every remote client mirrors request/response bodies to a
    /// JSONL transcript under this directory (authorization never written).
    pub transcript_dir: Option<PathBuf>,
    pub max_in_flight: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            judges: vec![JudgeSpec::Synthetic(SyntheticJudgeSpec::default())],
            editor: EditorSpec::RuleBased,
            embedder: EmbedderSpec::default(),
            policies: Policy::ALL.to_vec(),
            rounds: 25,
            pool_capacity: 3,
            alpha: 1.0,
            seed: 0,
            bandit_scope: BanditScope::PerQuestion,
            semantic_gate: 0.80,
            reject_low_similarity: false,
            hash_only: false,
            log_arms: false,
            prompt_dir: None,
            transcript_dir: None,
            max_in_flight: 4,
        }
    }
}

impl ExperimentConfig {
    fn chat_client(&self, endpoint: &EndpointConfig, name: &str) -> Result<ChatClient> {
        let client = ChatClient::new(endpoint.clone())?;
        match &self.transcript_dir {
            Some(dir) => Ok(client.with_transcript(&dir.join(format!("{name}.transcript.jsonl")))?),
            None => Ok(client),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg: ExperimentConfig =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.judges.is_empty() {
            bail!("config needs at least one judge");
        }
        if self.policies.is_empty() {
            bail!("config needs at least one policy");
        }
        if self.rounds == 0 || self.pool_capacity == 0 {
            bail!("rounds and pool_capacity must be positive");
        }
        for (i, judge) in self.judges.iter().enumerate() {
            if self.judges[..i].iter().any(|j| j.id() == judge.id()) {
                bail!("duplicate judge id {:?}", judge.id());
            }
        }
        Ok(())
    }

    /// Build every judge. Remote credentials resolve here, so a missing
    /// environment variable aborts before any run starts.
    pub fn build_judges(&self) -> Result<Vec<Arc<dyn Judge>>> {
        self.judges
            .iter()
            .map(|spec| -> Result<Arc<dyn Judge>> {
                match spec {
                    JudgeSpec::Synthetic(s) => Ok(Arc::new(s.clone().build()?)),
                    JudgeSpec::Remote {
                        id,
                        mode,
                        endpoint,
                        prompt_variants,
                        selection_seed,
                    } => {
                        let client = self.chat_client(endpoint, &format!("judge_{id}"))?;
                        let judge = match prompt_variants {
                            Some(variants) if !variants.is_empty() => RemoteJudge::with_prompts(
                                id.clone(),
                                mode.to_mode(),
                                client,
                                JudgePromptSet {
                                    variants: variants.clone(),
                                    selection_seed: *selection_seed,
                                },
                            )?,
                            _ => RemoteJudge::new(id.clone(), mode.to_mode(), client),
                        };
                        Ok(Arc::new(judge))
                    }
                }
            })
            .collect()
    }

    pub fn build_editor(&self) -> Result<Box<dyn EditEngine>> {
        match &self.editor {
            EditorSpec::RuleBased => Ok(Box::new(RuleBasedEditor)),
            EditorSpec::Remote { endpoint } => {
                let client = self.chat_client(endpoint, "editor")?;
                Ok(Box::new(LlmEditor::new(client)))
            }
        }
    }

    pub fn build_embedder(&self) -> Result<Box<dyn Embedder>> {
        match &self.embedder {
            EmbedderSpec::OfflineHashing { dim } => {
                Ok(Box::new(OfflineHashingEmbedder::new(*dim)?))
            }
            EmbedderSpec::Remote { dim, endpoint } => {
                let client = self.chat_client(endpoint, "embedder")?;
                Ok(Box::new(RemoteEmbedder::new(client, *dim)?))
            }
        }
    }

    /// The 8-arm action registry plus the rewrite action, honoring a
    /// prompt-override directory when configured.
    pub fn build_actions(&self) -> Result<(Vec<StylisticAction>, StylisticAction)> {
        match &self.prompt_dir {
            Some(dir) => {
                let mut all = load_action_registry(dir)?;
                let rewrite_pos = all
                    .iter()
                    .position(|a| a.arm_id == "rewrite")
                    .expect("registry loader includes the rewrite action");
                let rewrite = all.remove(rewrite_pos);
                Ok((all, rewrite))
            }
            None => Ok((default_action_registry(), rewrite_action())),
        }
    }

    /// Judges that can be rebuilt offline (used by transfer analysis).
    pub fn synthetic_judges(&self) -> Result<Vec<Arc<dyn Judge>>> {
        self.judges
            .iter()
            .filter_map(|spec| match spec {
                JudgeSpec::Synthetic(s) => Some(s.clone()),
                JudgeSpec::Remote { .. } => None,
            })
            .map(|s| -> Result<Arc<dyn Judge>> { Ok(Arc::new(s.build()?)) })
            .collect()
    }
}
