//! The judge abstraction 𝒥: pointwise grading and pairwise comparison,
//! numeric verdict mappings, position-swap averaging, synthetic planted-bias
//! judges for offline verification, and the randomized-prompting wrapper.
//!
//! Synthetic judges score an answer as
//! `clamp(round(base_quality + Σ wⱼ·fⱼ(answer) + nonlinearity + noise))`
//! over the stylometric feature registry, which gives every analysis in the
//! toolkit a ground truth to recover. Pairwise synthetic judges derive from
//! the pointwise core via a score gap plus thresholds, so one planted-bias
//! spec drives both modes. An optional position bonus on the first-presented
//! answer makes the swap-averaging protocol testable, and an optional
//! substring trigger models score inflation through a channel no registered
//! feature can see.

use crate::error::{Error, Result};
use crate::hash::fnv1a_str;
use crate::stylometry::{extract_features, Feature};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Mutex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairwiseMapping {
    /// win/tie/lose → {+1, 0, −1}
    ThreeWay,
    /// five labels → {+2, +1, 0, −1, −2}
    FiveLevel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JudgeMode {
    Pointwise,
    Pairwise(PairwiseMapping),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairwiseLabel {
    StrongWin,
    Win,
    Tie,
    Lose,
    StrongLose,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RawVerdict {
    /// Pointwise integer grade on the 1–9 scale.
    Score(u8),
    Label(PairwiseLabel),
}

/// Numeric image of a raw verdict under a mapping. Total: every declared
/// label has exactly one image.
pub fn map_raw(mode: JudgeMode, raw: &RawVerdict) -> Result<f64> {
    match (mode, raw) {
        (JudgeMode::Pointwise, RawVerdict::Score(s)) => {
            if (1..=9).contains(s) {
                Ok(*s as f64)
            } else {
                Err(Error::Input(format!("pointwise score {s} outside 1..9")))
            }
        }
        (JudgeMode::Pairwise(PairwiseMapping::ThreeWay), RawVerdict::Label(l)) => match l {
            PairwiseLabel::Win => Ok(1.0),
            PairwiseLabel::Tie => Ok(0.0),
            PairwiseLabel::Lose => Ok(-1.0),
            other => Err(Error::Input(format!(
                "label {other:?} not in the three-way mapping"
            ))),
        },
        (JudgeMode::Pairwise(PairwiseMapping::FiveLevel), RawVerdict::Label(l)) => Ok(match l {
            PairwiseLabel::StrongWin => 2.0,
            PairwiseLabel::Win => 1.0,
            PairwiseLabel::Tie => 0.0,
            PairwiseLabel::Lose => -1.0,
            PairwiseLabel::StrongLose => -2.0,
        }),
        _ => Err(Error::Input("raw verdict does not match judge mode".into())),
    }
}

/// A pointwise score or pairwise preference plus its numeric mapping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JudgeVerdict {
    pub mode: JudgeMode,
    pub raw: RawVerdict,
    pub numeric: f64,
    pub feedback: Option<String>,
}

/// A black-box scorer. One pairwise call scores the *first* answer against
/// the second in presentation order; the position-swap protocol lives in
/// [`score_pairwise_swapped`].
pub trait Judge: Send + Sync {
    fn id(&self) -> &str;
    fn mode(&self) -> JudgeMode;
    fn score_pointwise(&self, question: &str, answer: &str) -> Result<JudgeVerdict>;
    fn score_pairwise(&self, question: &str, first: &str, second: &str) -> Result<JudgeVerdict>;
}

/// Position-debiased pairwise score for `target` vs `reference`:
/// `(numeric(target first) + (−numeric(reference first))) / 2`.
/// Errors in either orientation propagate; there is no single-orientation
/// fallback.
pub fn score_pairwise_swapped(
    judge: &dyn Judge,
    question: &str,
    target: &str,
    reference: &str,
) -> Result<f64> {
    let forward = judge.score_pairwise(question, target, reference)?;
    let reversed = judge.score_pairwise(question, reference, target)?;
    Ok((forward.numeric - reversed.numeric) / 2.0)
}

/// How a synthetic judge maps answer substance to a base score.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseQuality {
    Constant(f64),
    /// Deterministic hash of the answer text mapped into [lo, hi].
    HashRange {
        lo: f64,
        hi: f64,
    },
}

impl BaseQuality {
    fn eval(&self, answer: &str) -> f64 {
        match self {
            BaseQuality::Constant(c) => *c,
            BaseQuality::HashRange { lo, hi } => {
                let h = fnv1a_str(answer) % 10_000;
                lo + (h as f64 / 9_999.0) * (hi - lo)
            }
        }
    }
}

/// Planted-bias judge specification.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticJudgeSpec {
    pub id: String,
    /// Feature name → true weight. Names must exist in the registry.
    pub planted_weights: BTreeMap<String, f64>,
    pub base_quality: BaseQuality,
    /// Scale of a deterministic `sin` distortion of the linear style term.
    pub nonlinearity_scale: f64,
    pub noise_sigma: f64,
    pub clamp: (f64, f64),
    /// Round to integer grades (the 1–9 judge contract). Disable for
    /// analyses that need an exactly linear oracle.
    pub quantize: bool,
    /// Added to the first-presented answer's point score in pairwise mode.
    pub position_bonus: f64,
    /// Score inflation through a channel outside the feature registry:
    /// answers containing the substring get the bonus.
    pub content_trigger: Option<(String, f64)>,
    /// `None` → pointwise judge; `Some` → pairwise with the given mapping.
    pub pairwise: Option<PairwiseMapping>,
    pub seed: u64,
}

impl Default for SyntheticJudgeSpec {
    fn default() -> Self {
        Self {
            id: "synthetic".into(),
            planted_weights: BTreeMap::new(),
            base_quality: BaseQuality::Constant(5.0),
            nonlinearity_scale: 0.0,
            noise_sigma: 0.0,
            clamp: (1.0, 9.0),
            quantize: true,
            position_bonus: 0.0,
            content_trigger: None,
            pairwise: None,
            seed: 0,
        }
    }
}

impl SyntheticJudgeSpec {
    pub fn validate(&self) -> Result<()> {
        if self.noise_sigma < 0.0 {
            return Err(Error::Config("noise_sigma must be non-negative".into()));
        }
        if self.nonlinearity_scale < 0.0 {
            return Err(Error::Config(
                "nonlinearity_scale must be non-negative".into(),
            ));
        }
        if self.clamp.0 >= self.clamp.1 {
            return Err(Error::Config("clamp bounds must be ordered".into()));
        }
        for name in self.planted_weights.keys() {
            if Feature::from_name(name).is_none() {
                return Err(Error::Config(format!("unknown planted feature {name:?}")));
            }
        }
        Ok(())
    }

    pub fn build(self) -> Result<SyntheticJudge> {
        self.validate()?;
        Ok(SyntheticJudge { spec: self })
    }
}

/// Deterministic judge with planted stylistic weights.
#[derive(Debug, Clone)]
pub struct SyntheticJudge {
    spec: SyntheticJudgeSpec,
}

impl SyntheticJudge {
    pub fn spec(&self) -> &SyntheticJudgeSpec {
        &self.spec
    }

    /// Latent (pre-quantization) score of one answer. Noise is a pure
    /// function of (seed, question, answer), so identical calls agree and
    /// calls are freely parallel.
    fn latent(&self, question: &str, answer: &str) -> f64 {
        let fv = extract_features(answer);
        let style: f64 = self
            .spec
            .planted_weights
            .iter()
            .map(|(name, w)| w * fv.get(Feature::from_name(name).expect("validated name")))
            .sum();
        let nonlinearity = self.spec.nonlinearity_scale * style.sin();
        let trigger = match &self.spec.content_trigger {
            Some((needle, bonus)) if answer.contains(needle) => *bonus,
            _ => 0.0,
        };
        let noise = if self.spec.noise_sigma > 0.0 {
            let stream = self.spec.seed ^ fnv1a_str(question) ^ fnv1a_str(answer).rotate_left(17);
            let mut rng = StdRng::seed_from_u64(stream);
            let z: f64 = StandardNormal.sample(&mut rng);
            self.spec.noise_sigma * z
        } else {
            0.0
        };
        self.spec.base_quality.eval(answer) + style + nonlinearity + trigger + noise
    }

    /// Point score after clamping (and rounding when quantized).
    pub fn point_score(&self, question: &str, answer: &str) -> f64 {
        let clamped = self
            .latent(question, answer)
            .clamp(self.spec.clamp.0, self.spec.clamp.1);
        if self.spec.quantize {
            clamped.round()
        } else {
            clamped
        }
    }
}

impl Judge for SyntheticJudge {
    fn id(&self) -> &str {
        &self.spec.id
    }

    fn mode(&self) -> JudgeMode {
        match self.spec.pairwise {
            None => JudgeMode::Pointwise,
            Some(m) => JudgeMode::Pairwise(m),
        }
    }

    fn score_pointwise(&self, question: &str, answer: &str) -> Result<JudgeVerdict> {
        let value = self.point_score(question, answer);
        if self.spec.quantize {
            let raw = RawVerdict::Score(value.clamp(1.0, 9.0) as u8);
            let numeric = map_raw(JudgeMode::Pointwise, &raw)?;
            Ok(JudgeVerdict {
                mode: JudgeMode::Pointwise,
                raw,
                numeric,
                feedback: None,
            })
        } else {
            // Continuous research mode: raw carries the rounded display
            // grade, numeric the exact latent value.
            let raw = RawVerdict::Score(value.round().clamp(1.0, 9.0).max(1.0) as u8);
            Ok(JudgeVerdict {
                mode: JudgeMode::Pointwise,
                raw,
                numeric: value,
                feedback: None,
            })
        }
    }

    fn score_pairwise(&self, question: &str, first: &str, second: &str) -> Result<JudgeVerdict> {
        let mapping = match self.spec.pairwise {
            Some(m) => m,
            None => {
                return Err(Error::Usage(format!(
                    "judge {} is configured for pointwise scoring",
                    self.spec.id
                )))
            }
        };
        let gap = self.point_score(question, first) + self.spec.position_bonus
            - self.point_score(question, second);
        let label = match mapping {
            PairwiseMapping::ThreeWay => {
                if gap > 0.0 {
                    PairwiseLabel::Win
                } else if gap < 0.0 {
                    PairwiseLabel::Lose
                } else {
                    PairwiseLabel::Tie
                }
            }
            PairwiseMapping::FiveLevel => {
                if gap >= 3.0 {
                    PairwiseLabel::StrongWin
                } else if gap >= 1.0 {
                    PairwiseLabel::Win
                } else if gap > -1.0 {
                    PairwiseLabel::Tie
                } else if gap > -3.0 {
                    PairwiseLabel::Lose
                } else {
                    PairwiseLabel::StrongLose
                }
            }
        };
        let mode = JudgeMode::Pairwise(mapping);
        let raw = RawVerdict::Label(label);
        let numeric = map_raw(mode, &raw)?;
        Ok(JudgeVerdict {
            mode,
            raw,
            numeric,
            feedback: None,
        })
    }
}

/// A set of paraphrased judge prompts for the randomized-prompting defense.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JudgePromptSet {
    pub variants: Vec<String>,
    pub selection_seed: u64,
}

impl JudgePromptSet {
    pub fn validate(&self) -> Result<()> {
        if self.variants.is_empty() {
            return Err(Error::Config(
                "prompt set needs at least one variant".into(),
            ));
        }
        for (i, v) in self.variants.iter().enumerate() {
            if !v.contains("{INPUTS}") || !v.contains("{OUTPUT}") {
                return Err(Error::Config(format!(
                    "prompt variant {i} is missing the {{INPUTS}}/{{OUTPUT}} placeholders"
                )));
            }
        }
        Ok(())
    }
}

/// Randomized-prompting defense wrapper: each scoring call first draws a
/// prompt variant uniformly (seeded) and records it, then delegates.
/// Remote judges configure their variant set directly; for judges that do
/// not read the prompt (synthetic ones) scores are unchanged, which is
/// exactly what makes the wrapper's bookkeeping testable offline.
pub struct RandomizedPromptingJudge<J> {
    inner: J,
    prompts: JudgePromptSet,
    state: Mutex<RandomizerState>,
}

#[derive(Debug)]
struct RandomizerState {
    rng: StdRng,
    usage: Vec<u64>,
    log: Vec<usize>,
}

impl<J: Judge> RandomizedPromptingJudge<J> {
    pub fn variant_usage(&self) -> Vec<u64> {
        self.state.lock().unwrap().usage.clone()
    }

    /// Which variant each call used, in call order.
    pub fn variant_log(&self) -> Vec<usize> {
        self.state.lock().unwrap().log.clone()
    }

    fn draw(&self) -> usize {
        let mut st = self.state.lock().unwrap();
        let idx = st.rng.random_range(0..self.prompts.variants.len());
        st.usage[idx] += 1;
        st.log.push(idx);
        idx
    }
}

pub fn wrap_randomized_prompting<J: Judge>(
    inner: J,
    prompts: JudgePromptSet,
) -> Result<RandomizedPromptingJudge<J>> {
    prompts.validate()?;
    let usage = vec![0; prompts.variants.len()];
    let rng = StdRng::seed_from_u64(prompts.selection_seed);
    Ok(RandomizedPromptingJudge {
        inner,
        prompts,
        state: Mutex::new(RandomizerState {
            rng,
            usage,
            log: Vec::new(),
        }),
    })
}

impl<J: Judge> Judge for RandomizedPromptingJudge<J> {
    fn id(&self) -> &str {
        self.inner.id()
    }

    fn mode(&self) -> JudgeMode {
        self.inner.mode()
    }

    fn score_pointwise(&self, question: &str, answer: &str) -> Result<JudgeVerdict> {
        self.draw();
        self.inner.score_pointwise(question, answer)
    }

    fn score_pairwise(&self, question: &str, first: &str, second: &str) -> Result<JudgeVerdict> {
        self.draw();
        self.inner.score_pairwise(question, first, second)
    }
}

/// Parse a remote pointwise response: tolerate surrounding prose, take the
/// last well-formed JSON object carrying a `score` field (string or number),
/// and require an integral grade in 1..9.
pub fn parse_pointwise_response(text: &str) -> Result<JudgeVerdict> {
    let mut last: Option<(f64, Option<String>)> = None;
    for obj in json_object_candidates(text) {
        if let Ok(v) = serde_json::from_str::<serde_json::Value>(&obj) {
            let score = match v.get("score") {
                Some(serde_json::Value::Number(n)) => n.as_f64(),
                Some(serde_json::Value::String(s)) => s.trim().parse::<f64>().ok(),
                _ => None,
            };
            if let Some(score) = score {
                let feedback = v
                    .get("feedback")
                    .and_then(|f| f.as_str())
                    .map(|s| s.to_string());
                last = Some((score, feedback));
            }
        }
    }
    let (score, feedback) =
        last.ok_or_else(|| Error::JudgeParse("no JSON object with a score field".into()))?;
    if !score.is_finite() || (score - score.round()).abs() > 1e-9 {
        return Err(Error::JudgeParse(format!(
            "score {score} is not an integer grade"
        )));
    }
    let raw = RawVerdict::Score(score.round() as u8);
    let numeric =
        map_raw(JudgeMode::Pointwise, &raw).map_err(|e| Error::JudgeParse(e.to_string()))?;
    Ok(JudgeVerdict {
        mode: JudgeMode::Pointwise,
        raw,
        numeric,
        feedback,
    })
}

/// Parse a remote pairwise response: last JSON object with a `verdict`
/// field naming the winner of the presented pair.
pub fn parse_pairwise_response(text: &str, mapping: PairwiseMapping) -> Result<JudgeVerdict> {
    let mut last: Option<(String, Option<String>)> = None;
    for obj in json_object_candidates(text) {
        if let Ok(v) = serde_json::from_str::<serde_json::Value>(&obj) {
            if let Some(verdict) = v.get("verdict").and_then(|s| s.as_str()) {
                let feedback = v
                    .get("feedback")
                    .and_then(|f| f.as_str())
                    .map(|s| s.to_string());
                last = Some((verdict.to_ascii_lowercase(), feedback));
            }
        }
    }
    let (verdict, feedback) =
        last.ok_or_else(|| Error::JudgeParse("no JSON object with a verdict field".into()))?;
    let label = match verdict.trim() {
        "a" | "win" | "first" => PairwiseLabel::Win,
        "b" | "lose" | "second" => PairwiseLabel::Lose,
        "tie" | "draw" => PairwiseLabel::Tie,
        "a>>b" | "strong_win" => PairwiseLabel::StrongWin,
        "b>>a" | "strong_lose" => PairwiseLabel::StrongLose,
        other => return Err(Error::JudgeParse(format!("unrecognized verdict {other:?}"))),
    };
    let label = match (mapping, label) {
        // the three-way mapping folds strong labels onto win/lose
        (PairwiseMapping::ThreeWay, PairwiseLabel::StrongWin) => PairwiseLabel::Win,
        (PairwiseMapping::ThreeWay, PairwiseLabel::StrongLose) => PairwiseLabel::Lose,
        (_, l) => l,
    };
    let mode = JudgeMode::Pairwise(mapping);
    let raw = RawVerdict::Label(label);
    let numeric = map_raw(mode, &raw).map_err(|e| Error::JudgeParse(e.to_string()))?;
    Ok(JudgeVerdict {
        mode,
        raw,
        numeric,
        feedback,
    })
}

/// Balanced `{…}` spans in the text, innermost-to-outermost last occurrence
/// wins via the caller keeping the final parse.
fn json_object_candidates(text: &str) -> Vec<String> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut stack = Vec::new();
    let mut in_string = false;
    let mut escaped = false;
    for (i, &b) in bytes.iter().enumerate() {
        if in_string {
            if escaped {
                escaped = false;
            } else if b == b'\\' {
                escaped = true;
            } else if b == b'"' {
                in_string = false;
            }
            continue;
        }
        match b {
            b'"' => in_string = true,
            b'{' => stack.push(i),
            b'}' => {
                if let Some(start) = stack.pop() {
                    out.push(text[start..=i].to_string());
                }
            }
            _ => {}
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> SyntheticJudgeSpec {
        SyntheticJudgeSpec::default()
    }

    fn weights(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn degenerate_judge_scores_constant() {
        let judge = spec().build().unwrap();
        for answer in [
            "short",
            "a much longer answer with extras 🙂",
            "- list\n- items",
        ] {
            assert_eq!(judge.score_pointwise("q", answer).unwrap().numeric, 5.0);
        }
    }

    #[test]
    fn planted_emoji_weight_moves_score() {
        let judge = SyntheticJudgeSpec {
            planted_weights: weights(&[("emoji_count", 1.0)]),
            ..spec()
        }
        .build()
        .unwrap();
        // derived via the stylometry extractor: two emojis vs none
        assert_eq!(
            judge
                .score_pointwise("q", "The answer. 🙂🙂")
                .unwrap()
                .numeric,
            7.0
        );
        assert_eq!(
            judge.score_pointwise("q", "The answer.").unwrap().numeric,
            5.0
        );
    }

    #[test]
    fn clamp_and_quantize() {
        let judge = SyntheticJudgeSpec {
            planted_weights: weights(&[("emoji_count", 5.0)]),
            ..spec()
        }
        .build()
        .unwrap();
        assert_eq!(
            judge.score_pointwise("q", "🙂🙂🙂 fine").unwrap().numeric,
            9.0
        );

        let continuous = SyntheticJudgeSpec {
            planted_weights: weights(&[("emoji_count", 0.25)]),
            quantize: false,
            ..spec()
        }
        .build()
        .unwrap();
        assert_eq!(
            continuous.score_pointwise("q", "x 🙂").unwrap().numeric,
            5.25
        );
    }

    #[test]
    fn determinism_without_noise_and_with_noise() {
        let noisy = SyntheticJudgeSpec {
            noise_sigma: 0.5,
            ..spec()
        }
        .build()
        .unwrap();
        let a = noisy.score_pointwise("q", "same answer").unwrap();
        let b = noisy.score_pointwise("q", "same answer").unwrap();
        assert_eq!(a, b, "noise must be a pure function of the call");
        let clean = spec().build().unwrap();
        assert_eq!(
            clean.score_pointwise("q", "x").unwrap(),
            clean.score_pointwise("q", "x").unwrap()
        );
    }

    #[test]
    fn pairwise_three_way_from_point_gap() {
        let judge = SyntheticJudgeSpec {
            planted_weights: weights(&[("emoji_count", 2.0)]),
            pairwise: Some(PairwiseMapping::ThreeWay),
            ..spec()
        }
        .build()
        .unwrap();
        // equal answers tie
        let tie = judge.score_pairwise("q", "same.", "same.").unwrap();
        assert_eq!(tie.numeric, 0.0);
        // 7 vs 5 → win → +1 (point oracle: emoji adds 2)
        let win = judge.score_pairwise("q", "yes 🙂", "yes").unwrap();
        assert_eq!(win.numeric, 1.0);
        assert_eq!(win.raw, RawVerdict::Label(PairwiseLabel::Win));
        // antisymmetry without position bias
        let lose = judge.score_pairwise("q", "yes", "yes 🙂").unwrap();
        assert_eq!(lose.numeric, -win.numeric);
    }

    #[test]
    fn pairwise_five_level_thresholds() {
        let judge = SyntheticJudgeSpec {
            planted_weights: weights(&[("emoji_count", 2.0)]),
            pairwise: Some(PairwiseMapping::FiveLevel),
            ..spec()
        }
        .build()
        .unwrap();
        // gap +4 → +2
        let v = judge.score_pairwise("q", "ok 🙂🙂", "ok").unwrap();
        assert_eq!(v.numeric, 2.0);
        // gap +2 → +1
        let v = judge.score_pairwise("q", "ok 🙂", "ok").unwrap();
        assert_eq!(v.numeric, 1.0);
        // gap 0 → 0
        let v = judge.score_pairwise("q", "ok", "ok").unwrap();
        assert_eq!(v.numeric, 0.0);
    }

    #[test]
    fn swap_average_cancels_position_bonus() {
        let judge = SyntheticJudgeSpec {
            position_bonus: 1.0,
            pairwise: Some(PairwiseMapping::ThreeWay),
            ..spec()
        }
        .build()
        .unwrap();
        // equal-quality answers: each orientation says "first wins" (+1);
        // the swap average cancels to 0
        let fwd = judge.score_pairwise("q", "a one", "b two").unwrap();
        let rev = judge.score_pairwise("q", "b two", "a one").unwrap();
        assert_eq!(fwd.numeric, 1.0);
        assert_eq!(rev.numeric, 1.0);
        assert_eq!(
            score_pairwise_swapped(&judge, "q", "a one", "b two").unwrap(),
            0.0
        );
    }

    #[test]
    fn swap_average_equals_plain_numeric_without_position_bias() {
        let judge = SyntheticJudgeSpec {
            planted_weights: weights(&[("emoji_count", 2.0)]),
            pairwise: Some(PairwiseMapping::ThreeWay),
            ..spec()
        }
        .build()
        .unwrap();
        let direct = judge.score_pairwise("q", "hi 🙂", "hi").unwrap().numeric;
        let swapped = score_pairwise_swapped(&judge, "q", "hi 🙂", "hi").unwrap();
        assert_eq!(direct, swapped);
        assert_eq!(
            score_pairwise_swapped(&judge, "q", "same", "same").unwrap(),
            0.0
        );
    }

    #[test]
    fn content_trigger_is_invisible_to_features() {
        let judge = SyntheticJudgeSpec {
            content_trigger: Some(("brick".into(), 2.0)),
            ..spec()
        }
        .build()
        .unwrap();
        assert_eq!(
            judge.score_pointwise("q", "made of stone").unwrap().numeric,
            5.0
        );
        assert_eq!(
            judge.score_pointwise("q", "made of brick").unwrap().numeric,
            7.0
        );
    }

    #[test]
    fn mapping_round_trip_identity() {
        let cases = [
            (JudgeMode::Pointwise, RawVerdict::Score(7)),
            (
                JudgeMode::Pairwise(PairwiseMapping::ThreeWay),
                RawVerdict::Label(PairwiseLabel::Win),
            ),
            (
                JudgeMode::Pairwise(PairwiseMapping::ThreeWay),
                RawVerdict::Label(PairwiseLabel::Tie),
            ),
            (
                JudgeMode::Pairwise(PairwiseMapping::FiveLevel),
                RawVerdict::Label(PairwiseLabel::StrongLose),
            ),
        ];
        for (mode, raw) in cases {
            let numeric = map_raw(mode, &raw).unwrap();
            // invert numerically and compare
            let back = match mode {
                JudgeMode::Pointwise => RawVerdict::Score(numeric as u8),
                JudgeMode::Pairwise(_) => RawVerdict::Label(match numeric as i64 {
                    2 => PairwiseLabel::StrongWin,
                    1 => PairwiseLabel::Win,
                    0 => PairwiseLabel::Tie,
                    -1 => PairwiseLabel::Lose,
                    _ => PairwiseLabel::StrongLose,
                }),
            };
            assert_eq!(raw, back);
        }
        assert!(map_raw(JudgeMode::Pointwise, &RawVerdict::Score(0)).is_err());
        assert!(map_raw(
            JudgeMode::Pairwise(PairwiseMapping::ThreeWay),
            &RawVerdict::Label(PairwiseLabel::StrongWin)
        )
        .is_err());
    }

    #[test]
    fn remote_pointwise_parsing() {
        let v = parse_pointwise_response(r#"{"feedback":"solid","score":"8"}"#).unwrap();
        assert_eq!(v.raw, RawVerdict::Score(8));
        assert_eq!(v.numeric, 8.0);
        assert_eq!(v.feedback.as_deref(), Some("solid"));

        // surrounding prose, score as number, last object wins
        let v = parse_pointwise_response(
            "Reasoning first {\"score\": 3}\nFinal: {\"feedback\":\"ok\",\"score\": 6}",
        )
        .unwrap();
        assert_eq!(v.numeric, 6.0);

        assert!(parse_pointwise_response("no json here").is_err());
        assert!(parse_pointwise_response(r#"{"score":"great"}"#).is_err());
        assert!(parse_pointwise_response(r#"{"score": 12}"#).is_err());
        assert!(parse_pointwise_response(r#"{"score": 6.5}"#).is_err());
    }

    #[test]
    fn remote_pairwise_parsing() {
        let v = parse_pairwise_response(r#"{"verdict":"A"}"#, PairwiseMapping::ThreeWay).unwrap();
        assert_eq!(v.numeric, 1.0);
        let v = parse_pairwise_response(r#"{"verdict":"tie"}"#, PairwiseMapping::ThreeWay).unwrap();
        assert_eq!(v.numeric, 0.0);
        let v =
            parse_pairwise_response(r#"{"verdict":"A>>B"}"#, PairwiseMapping::FiveLevel).unwrap();
        assert_eq!(v.numeric, 2.0);
        // strong labels fold onto win/lose under the three-way mapping
        let v =
            parse_pairwise_response(r#"{"verdict":"A>>B"}"#, PairwiseMapping::ThreeWay).unwrap();
        assert_eq!(v.numeric, 1.0);
        assert!(parse_pairwise_response(r#"{"verdict":"?"}"#, PairwiseMapping::ThreeWay).is_err());
    }

    #[test]
    fn randomized_prompting_wrapper() {
        let variants = |n: usize| JudgePromptSet {
            variants: (0..n)
                .map(|i| format!("v{i}: {{INPUTS}} {{OUTPUT}}"))
                .collect(),
            selection_seed: 42,
        };

        // single variant behaves identically to the unwrapped judge
        let base = spec().build().unwrap();
        let wrapped = wrap_randomized_prompting(base.clone(), variants(1)).unwrap();
        assert_eq!(
            wrapped.score_pointwise("q", "a").unwrap(),
            base.score_pointwise("q", "a").unwrap()
        );

        // three variants over 300 seeded calls: each used 100 ± 30 times
        let wrapped = wrap_randomized_prompting(base.clone(), variants(3)).unwrap();
        for i in 0..300 {
            let answer = format!("answer {i}");
            let w = wrapped.score_pointwise("q", &answer).unwrap();
            let b = base.score_pointwise("q", &answer).unwrap();
            assert_eq!(w, b, "synthetic judge ignores the prompt variant");
        }
        let usage = wrapped.variant_usage();
        assert_eq!(usage.iter().sum::<u64>(), 300);
        for (i, &count) in usage.iter().enumerate() {
            assert!(
                (70..=130).contains(&count),
                "variant {i} used {count} times"
            );
        }
        assert_eq!(wrapped.variant_log().len(), 300);

        // validation failures
        assert!(wrap_randomized_prompting(
            base.clone(),
            JudgePromptSet {
                variants: vec![],
                selection_seed: 0
            }
        )
        .is_err());
        assert!(wrap_randomized_prompting(
            base,
            JudgePromptSet {
                variants: vec!["missing placeholders".into()],
                selection_seed: 0
            }
        )
        .is_err());
    }

    #[test]
    fn spec_validation() {
        assert!(SyntheticJudgeSpec {
            noise_sigma: -1.0,
            ..spec()
        }
        .validate()
        .is_err());
        assert!(SyntheticJudgeSpec {
            clamp: (9.0, 1.0),
            ..spec()
        }
        .validate()
        .is_err());
        assert!(SyntheticJudgeSpec {
            planted_weights: weights(&[("no_such_feature", 1.0)]),
            ..spec()
        }
        .validate()
        .is_err());
    }
}
