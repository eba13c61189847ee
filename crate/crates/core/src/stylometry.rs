//! Deterministic stylometric feature extraction.
//!
//! Fourteen named features computed with transparent, fixed heuristics so
//! planted-bias judges, fingerprint regressions, and the style-control
//! defense all agree on what "style" means. No pretrained models: sentiment
//! and formality use small fixed lexicons, readability uses the
//! Flesch–Kincaid grade formula with a vowel-group syllable heuristic.
//!
//! Definitions (the registry is ordered and versioned; fingerprints record
//! the version):
//! - `token_count`: maximal runs of characters that are neither whitespace
//!   nor ASCII punctuation/symbols. Emoji and other non-ASCII symbols are
//!   token characters, so a free-standing emoji is one token.
//! - `readability_score`: Flesch–Kincaid grade over alphabetic words,
//!   `0.39·(words/sentences) + 11.8·(syllables/words) − 15.59`.
//! - `sentiment_polarity`: signed lexicon hits with single-word negation
//!   flip, normalized to [−1, 1].
//! - `paragraph_count`: non-empty blocks separated by blank lines.
//! - `list_item_count`: lines starting with `*`, `-`, `+`, or `N.` markers.
//! - `markdown_usage`: `bold_count + italic_count`.
//! - `citation_marker`: `[n]` brackets plus name-year parentheticals,
//!   including the fabricated-book shape `(Name, I. (YYYY)…`.
//! - `is_formatted_code`: 1 iff the whole trimmed body is a fenced block.
//! - `emoji_count`: codepoints in common emoji ranges.
//! - `formality_score`: (formal − informal hits) / total hits in [−1, 1].
//! - `bold_count` / `italic_count`: non-overlapping `**…**` / `*…*` pairs
//!   whose span stays on one line.
//! - `header_count`: ATX header lines.
//! - `special_char_count`: non-alphanumeric, non-whitespace characters.

use crate::error::{Error, Result};
use regex::Regex;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::LazyLock;

/// Version tag recorded alongside fingerprints and serialized vectors.
pub const FEATURE_REGISTRY_VERSION: u32 = 1;

pub const FEATURE_COUNT: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Feature {
    TokenCount,
    ReadabilityScore,
    SentimentPolarity,
    ParagraphCount,
    ListItemCount,
    MarkdownUsage,
    CitationMarker,
    IsFormattedCode,
    EmojiCount,
    FormalityScore,
    BoldCount,
    ItalicCount,
    HeaderCount,
    SpecialCharCount,
}

impl Feature {
    pub const ALL: [Feature; FEATURE_COUNT] = [
        Feature::TokenCount,
        Feature::ReadabilityScore,
        Feature::SentimentPolarity,
        Feature::ParagraphCount,
        Feature::ListItemCount,
        Feature::MarkdownUsage,
        Feature::CitationMarker,
        Feature::IsFormattedCode,
        Feature::EmojiCount,
        Feature::FormalityScore,
        Feature::BoldCount,
        Feature::ItalicCount,
        Feature::HeaderCount,
        Feature::SpecialCharCount,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Feature::TokenCount => "token_count",
            Feature::ReadabilityScore => "readability_score",
            Feature::SentimentPolarity => "sentiment_polarity",
            Feature::ParagraphCount => "paragraph_count",
            Feature::ListItemCount => "list_item_count",
            Feature::MarkdownUsage => "markdown_usage",
            Feature::CitationMarker => "citation_marker",
            Feature::IsFormattedCode => "is_formatted_code",
            Feature::EmojiCount => "emoji_count",
            Feature::FormalityScore => "formality_score",
            Feature::BoldCount => "bold_count",
            Feature::ItalicCount => "italic_count",
            Feature::HeaderCount => "header_count",
            Feature::SpecialCharCount => "special_char_count",
        }
    }

    pub fn from_name(name: &str) -> Option<Feature> {
        Feature::ALL.iter().copied().find(|f| f.name() == name)
    }

    pub fn index(self) -> usize {
        Feature::ALL.iter().position(|&f| f == self).unwrap()
    }

    /// Default feature set for regressions. `markdown_usage` is the exact sum
    /// of `bold_count` and `italic_count`, so including all three makes any
    /// design matrix rank deficient; the composite is the one left out.
    pub fn regression_default() -> Vec<Feature> {
        Feature::ALL
            .iter()
            .copied()
            .filter(|&f| f != Feature::MarkdownUsage)
            .collect()
    }

    /// Pure count features (used by the concatenation-monotonicity checks).
    pub fn counts() -> Vec<Feature> {
        vec![
            Feature::TokenCount,
            Feature::ParagraphCount,
            Feature::ListItemCount,
            Feature::MarkdownUsage,
            Feature::CitationMarker,
            Feature::EmojiCount,
            Feature::BoldCount,
            Feature::ItalicCount,
            Feature::HeaderCount,
            Feature::SpecialCharCount,
        ]
    }
}

/// Named stylometric measurements of one answer text.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeatureVector {
    values: [f64; FEATURE_COUNT],
}

impl FeatureVector {
    pub fn get(&self, f: Feature) -> f64 {
        self.values[f.index()]
    }

    pub fn set(&mut self, f: Feature, v: f64) {
        self.values[f.index()] = v;
    }

    pub fn values(&self) -> &[f64; FEATURE_COUNT] {
        &self.values
    }

    /// Project onto a feature subset, in the subset's order.
    pub fn project(&self, features: &[Feature]) -> Vec<f64> {
        features.iter().map(|&f| self.get(f)).collect()
    }

    pub fn to_map(&self) -> BTreeMap<String, f64> {
        Feature::ALL
            .iter()
            .map(|&f| (f.name().to_string(), self.get(f)))
            .collect()
    }

    /// Rebuild from a serialized name→value map. Unknown or missing feature
    /// names are usage errors so logs from a different registry fail loudly.
    pub fn from_map(map: &BTreeMap<String, f64>) -> Result<FeatureVector> {
        let mut fv = FeatureVector::default();
        for (name, &v) in map {
            let f = Feature::from_name(name)
                .ok_or_else(|| Error::Usage(format!("unknown feature name {name:?}")))?;
            fv.set(f, v);
        }
        if map.len() != FEATURE_COUNT {
            let missing: Vec<&str> = Feature::ALL
                .iter()
                .map(|f| f.name())
                .filter(|n| !map.contains_key(*n))
                .collect();
            return Err(Error::Usage(format!("missing feature names {missing:?}")));
        }
        Ok(fv)
    }
}

/// Elementwise `after − before`.
pub fn feature_delta(before: &FeatureVector, after: &FeatureVector) -> FeatureVector {
    let mut out = FeatureVector::default();
    for &f in &Feature::ALL {
        out.set(f, after.get(f) - before.get(f));
    }
    out
}

static LIST_ITEM_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^\s*([*\-+]|\d+\.)\s").unwrap());
static HEADER_RE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^\s{0,3}#{1,6}\s").unwrap());
static BRACKET_CITE_RE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\[\d+\]").unwrap());
// Name-year parentheticals: "(Toro, 2019)" and the fabricated book form
// "(Toro, J. (2019). …" both count.
static NAME_YEAR_CITE_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"\(\s*[A-Z][A-Za-z]+\s*,\s*(?:[A-Z]\.\s*)?\(?\d{4}\)?").unwrap());

const POSITIVE_WORDS: &[&str] = &[
    "good",
    "great",
    "excellent",
    "wonderful",
    "amazing",
    "fantastic",
    "delightful",
    "happy",
    "love",
    "best",
    "superb",
    "success",
    "successful",
    "beautiful",
    "hope",
    "cheerful",
    "brilliant",
    "enjoy",
    "positive",
    "thrilled",
    "terrific",
    "outstanding",
    "remarkable",
];

const NEGATIVE_WORDS: &[&str] = &[
    "bad",
    "terrible",
    "awful",
    "worst",
    "sad",
    "hate",
    "failure",
    "poor",
    "horrible",
    "wrong",
    "negative",
    "dreadful",
    "disappointing",
    "ugly",
    "broken",
    "useless",
    "harmful",
    "painful",
];

const NEGATORS: &[&str] = &[
    "not", "no", "never", "none", "cannot", "nor", "hardly", "without", "n't",
];

const INFORMAL_WORDS: &[&str] = &[
    "gonna", "wanna", "gotta", "kinda", "sorta", "cool", "awesome", "yeah", "yep", "nah", "ok",
    "okay", "stuff", "btw", "lol", "omg", "hey", "guys", "super",
];

const FORMAL_WORDS: &[&str] = &[
    "therefore",
    "moreover",
    "consequently",
    "furthermore",
    "thus",
    "hence",
    "accordingly",
    "nevertheless",
    "nonetheless",
    "whom",
    "herein",
    "wherein",
    "shall",
    "regarding",
    "notwithstanding",
    "pursuant",
];

const EMOJI_RANGES: &[(u32, u32)] = &[
    (0x1F300, 0x1F5FF), // misc symbols & pictographs
    (0x1F600, 0x1F64F), // emoticons
    (0x1F680, 0x1F6FF), // transport & map
    (0x1F900, 0x1F9FF), // supplemental symbols
    (0x1FA70, 0x1FAFF), // symbols extended-A
    (0x2600, 0x26FF),   // misc symbols
    (0x2700, 0x27BF),   // dingbats
    (0x1F1E6, 0x1F1FF), // regional indicators
];

pub fn is_emoji_char(c: char) -> bool {
    let cp = c as u32;
    EMOJI_RANGES.iter().any(|&(lo, hi)| cp >= lo && cp <= hi)
}

fn is_token_char(c: char) -> bool {
    if c.is_whitespace() {
        return false;
    }
    // ASCII punctuation and symbols separate tokens; everything else counts.
    !(c.is_ascii() && !c.is_ascii_alphanumeric())
}

/// Whitespace-and-punctuation tokenization (definition of `token_count`).
pub fn tokens(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices() {
        if is_token_char(c) {
            if start.is_none() {
                start = Some(i);
            }
        } else if let Some(s) = start.take() {
            out.push(&text[s..i]);
        }
    }
    if let Some(s) = start {
        out.push(&text[s..]);
    }
    out
}

/// Whitespace-split words with surrounding (not internal) punctuation
/// trimmed, lowercased. Keeps contractions whole for the lexicon scans.
fn lexicon_words(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|w| {
            w.trim_matches(|c: char| !c.is_alphanumeric() && c != '\'')
                .to_lowercase()
        })
        .filter(|w| !w.is_empty())
        .collect()
}

/// Sentence segments: splits on `.`, `!`, `?` runs; only segments containing
/// a token count as sentences.
pub fn sentences(text: &str) -> Vec<&str> {
    text.split(['.', '!', '?'])
        .filter(|seg| !tokens(seg).is_empty())
        .collect()
}

fn syllables(word: &str) -> usize {
    let w: Vec<char> = word
        .chars()
        .filter(|c| c.is_alphabetic())
        .flat_map(|c| c.to_lowercase())
        .collect();
    if w.is_empty() {
        return 0;
    }
    let is_vowel = |c: char| "aeiouy".contains(c);
    let mut groups = 0usize;
    let mut prev_vowel = false;
    for &c in &w {
        let v = is_vowel(c);
        if v && !prev_vowel {
            groups += 1;
        }
        prev_vowel = v;
    }
    // silent trailing 'e' ("make", not "the" or "able")
    if w.len() > 2 && w[w.len() - 1] == 'e' && !is_vowel(w[w.len() - 2]) && groups > 1 {
        groups -= 1;
    }
    groups.max(1)
}

fn readability(text: &str) -> f64 {
    let words: Vec<&str> = tokens(text)
        .into_iter()
        .filter(|t| t.chars().any(|c| c.is_alphabetic()))
        .collect();
    if words.is_empty() {
        return 0.0;
    }
    let sentence_count = sentences(text).len().max(1) as f64;
    let word_count = words.len() as f64;
    let syllable_count: usize = words.iter().map(|w| syllables(w)).sum();
    0.39 * (word_count / sentence_count) + 11.8 * (syllable_count as f64 / word_count) - 15.59
}

fn sentiment(text: &str) -> f64 {
    let words = lexicon_words(text);
    let mut pos = 0i64;
    let mut neg = 0i64;
    for (i, w) in words.iter().enumerate() {
        let hit = if POSITIVE_WORDS.contains(&w.as_str()) {
            1
        } else if NEGATIVE_WORDS.contains(&w.as_str()) {
            -1
        } else {
            continue;
        };
        let negated =
            i > 0 && (NEGATORS.contains(&words[i - 1].as_str()) || words[i - 1].ends_with("n't"));
        let signed = if negated { -hit } else { hit };
        if signed > 0 {
            pos += 1;
        } else {
            neg += 1;
        }
    }
    if pos + neg == 0 {
        0.0
    } else {
        (pos - neg) as f64 / (pos + neg) as f64
    }
}

fn formality(text: &str) -> f64 {
    let words = lexicon_words(text);
    let mut formal = 0i64;
    let mut informal = 0i64;
    for w in &words {
        if FORMAL_WORDS.contains(&w.as_str()) {
            formal += 1;
        } else if INFORMAL_WORDS.contains(&w.as_str()) || w.contains('\'') {
            informal += 1;
        }
    }
    if formal + informal == 0 {
        0.0
    } else {
        (formal - informal) as f64 / (formal + informal) as f64
    }
}

/// Count non-overlapping emphasis pairs whose span stays on one line.
/// Returns (bold, italic).
fn emphasis_counts(text: &str) -> (usize, usize) {
    let bytes = text.as_bytes();
    let mut bold_markers = Vec::new(); // byte offsets of "**"
    let mut single_markers = Vec::new(); // byte offsets of lone '*'
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'*' {
            if i + 1 < bytes.len() && bytes[i + 1] == b'*' {
                bold_markers.push(i);
                i += 2;
            } else {
                single_markers.push(i);
                i += 1;
            }
        } else {
            i += 1;
        }
    }
    let pair_up = |markers: &[usize], width: usize| -> usize {
        let mut count = 0;
        let mut open: Option<usize> = None;
        for &pos in markers {
            match open {
                None => open = Some(pos),
                Some(start) => {
                    let inner = &text[start + width..pos];
                    if !inner.is_empty() && !inner.contains('\n') {
                        count += 1;
                        open = None;
                    } else {
                        open = Some(pos);
                    }
                }
            }
        }
        count
    };
    (pair_up(&bold_markers, 2), pair_up(&single_markers, 1))
}

fn is_fenced(text: &str) -> bool {
    let trimmed = text.trim();
    let lines: Vec<&str> = trimmed.lines().collect();
    lines.len() >= 2
        && lines
            .first()
            .is_some_and(|l| l.trim_start().starts_with("```"))
        && lines.last().is_some_and(|l| l.trim() == "```")
}

/// Extract the full feature vector from one answer text.
///
/// Total on arbitrary Unicode input: never panics, all invariants hold
/// (counts non-negative, bounded scores in [−1, 1], everything finite).
pub fn extract_features(text: &str) -> FeatureVector {
    let mut fv = FeatureVector::default();
    fv.set(Feature::TokenCount, tokens(text).len() as f64);
    fv.set(Feature::ReadabilityScore, readability(text));
    fv.set(Feature::SentimentPolarity, sentiment(text));
    fv.set(
        Feature::ParagraphCount,
        text.split("\n\n")
            .flat_map(|b| b.split("\r\n\r\n"))
            .filter(|b| !b.trim().is_empty())
            .count() as f64,
    );
    fv.set(
        Feature::ListItemCount,
        text.lines().filter(|l| LIST_ITEM_RE.is_match(l)).count() as f64,
    );
    let (bold, italic) = emphasis_counts(text);
    fv.set(Feature::BoldCount, bold as f64);
    fv.set(Feature::ItalicCount, italic as f64);
    fv.set(Feature::MarkdownUsage, (bold + italic) as f64);
    fv.set(
        Feature::CitationMarker,
        (BRACKET_CITE_RE.find_iter(text).count() + NAME_YEAR_CITE_RE.find_iter(text).count())
            as f64,
    );
    fv.set(
        Feature::IsFormattedCode,
        if is_fenced(text) { 1.0 } else { 0.0 },
    );
    fv.set(
        Feature::EmojiCount,
        text.chars().filter(|&c| is_emoji_char(c)).count() as f64,
    );
    fv.set(Feature::FormalityScore, formality(text));
    fv.set(
        Feature::HeaderCount,
        text.lines().filter(|l| HEADER_RE.is_match(l)).count() as f64,
    );
    fv.set(
        Feature::SpecialCharCount,
        text.chars()
            .filter(|c| !c.is_alphanumeric() && !c.is_whitespace())
            .count() as f64,
    );
    fv
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_text_is_all_zero() {
        let fv = extract_features("");
        for &f in &Feature::ALL {
            assert_eq!(fv.get(f), 0.0, "{}", f.name());
        }
    }

    #[test]
    fn markdown_fixture_hand_counts() {
        let fv = extract_features("- a\n- b\n\n**bold** *it*");
        assert_eq!(fv.get(Feature::ListItemCount), 2.0);
        assert_eq!(fv.get(Feature::BoldCount), 1.0);
        assert_eq!(fv.get(Feature::ItalicCount), 1.0);
        assert_eq!(fv.get(Feature::MarkdownUsage), 2.0);
        assert_eq!(fv.get(Feature::ParagraphCount), 2.0);
    }

    #[test]
    fn citation_fixture() {
        let fv = extract_features("Water boils at 100°C. [1]");
        assert_eq!(fv.get(Feature::CitationMarker), 1.0);
        // name-year and fabricated book forms
        let fv = extract_features("As shown before (Toro, 2019).");
        assert_eq!(fv.get(Feature::CitationMarker), 1.0);
        let fv = extract_features("(Alvarez, R. (2003). *On Heat*. Harcourt, p. 41).");
        assert_eq!(fv.get(Feature::CitationMarker), 1.0);
    }

    #[test]
    fn token_and_emoji_counts() {
        assert_eq!(tokens("The answer is 42.").len(), 4);
        let fv = extract_features("The answer is 42. 🙂");
        assert_eq!(fv.get(Feature::EmojiCount), 1.0);
        assert_eq!(fv.get(Feature::TokenCount), 5.0);
        assert_eq!(extract_features("🙂🙂").get(Feature::EmojiCount), 2.0);
    }

    #[test]
    fn sentiment_and_negation() {
        assert!(
            extract_features("This is a wonderful, excellent result.")
                .get(Feature::SentimentPolarity)
                > 0.99
        );
        assert!(
            extract_features("This is terrible and wrong.").get(Feature::SentimentPolarity) < -0.99
        );
        assert!(extract_features("This is not good.").get(Feature::SentimentPolarity) < 0.0);
        assert_eq!(
            extract_features("Plain facts only.").get(Feature::SentimentPolarity),
            0.0
        );
    }

    #[test]
    fn formality_direction() {
        assert!(
            extract_features("Therefore, moreover, we shall proceed.").get(Feature::FormalityScore)
                > 0.99
        );
        assert!(extract_features("yeah it's gonna be cool").get(Feature::FormalityScore) < 0.0);
    }

    #[test]
    fn fenced_body_flagged() {
        let fv = extract_features("```json\n{\"a\": 1}\n```");
        assert_eq!(fv.get(Feature::IsFormattedCode), 1.0);
        let fv = extract_features("prose\n```\ncode\n```");
        assert_eq!(fv.get(Feature::IsFormattedCode), 0.0);
    }

    #[test]
    fn header_lines() {
        let fv = extract_features("## Overview\n\nBody text # not a header");
        assert_eq!(fv.get(Feature::HeaderCount), 1.0);
    }

    #[test]
    fn delta_is_antisymmetric() {
        let a = extract_features("one two three");
        let b = extract_features("**one** 🙂");
        let d1 = feature_delta(&a, &b);
        let d2 = feature_delta(&b, &a);
        for &f in &Feature::ALL {
            assert_eq!(d1.get(f), -d2.get(f));
        }
        let z = feature_delta(&a, &a);
        assert!(Feature::ALL.iter().all(|&f| z.get(f) == 0.0));
    }

    #[test]
    fn map_round_trip_and_name_validation() {
        let fv = extract_features("Hello **world** [1] 🙂");
        let map = fv.to_map();
        assert_eq!(map.len(), FEATURE_COUNT);
        let back = FeatureVector::from_map(&map).unwrap();
        assert_eq!(fv, back);

        let mut bad = map.clone();
        bad.insert("bogus_feature".into(), 1.0);
        assert!(FeatureVector::from_map(&bad).is_err());
        let mut short = map;
        short.remove("token_count");
        assert!(FeatureVector::from_map(&short).is_err());
    }

    fn assert_invariants(fv: &FeatureVector) {
        for &f in &Feature::ALL {
            let v = fv.get(f);
            assert!(v.is_finite(), "{} not finite", f.name());
        }
        for f in Feature::counts() {
            let v = fv.get(f);
            assert!(v >= 0.0 && v.fract() == 0.0, "{} = {v}", f.name());
        }
        assert!((-1.0..=1.0).contains(&fv.get(Feature::SentimentPolarity)));
        assert!((-1.0..=1.0).contains(&fv.get(Feature::FormalityScore)));
        let code = fv.get(Feature::IsFormattedCode);
        assert!(code == 0.0 || code == 1.0);
        assert_eq!(
            fv.get(Feature::MarkdownUsage),
            fv.get(Feature::BoldCount) + fv.get(Feature::ItalicCount)
        );
    }

    #[test]
    fn concatenation_monotone_and_token_additive() {
        let parts = [
            "Sound travels faster in water. [1]",
            "**Key**: see the *notes* below.\n\n- a\n- b",
            "Great results 🙂 with no caveats.",
            "## Recap\nAll of it holds.",
        ];
        for a in parts {
            for b in parts {
                let joined = format!("{a}\n\n{b}");
                let fa = extract_features(a);
                let fb = extract_features(b);
                let fj = extract_features(&joined);
                for f in Feature::counts() {
                    assert!(fj.get(f) >= fa.get(f), "{} shrank: {a:?}+{b:?}", f.name());
                    assert!(fj.get(f) >= fb.get(f), "{} shrank: {a:?}+{b:?}", f.name());
                }
                assert_eq!(
                    fj.get(Feature::TokenCount),
                    fa.get(Feature::TokenCount) + fb.get(Feature::TokenCount)
                );
                assert_eq!(
                    fj.get(Feature::SpecialCharCount),
                    fa.get(Feature::SpecialCharCount) + fb.get(Feature::SpecialCharCount)
                );
                assert_eq!(
                    fj.get(Feature::EmojiCount),
                    fa.get(Feature::EmojiCount) + fb.get(Feature::EmojiCount)
                );
            }
        }
    }

    proptest! {
        #[test]
        fn total_on_arbitrary_unicode(s in "\\PC*") {
            let fv = extract_features(&s);
            assert_invariants(&fv);
        }

        #[test]
        fn deterministic(s in "\\PC{0,200}") {
            prop_assert_eq!(extract_features(&s), extract_features(&s));
        }
    }
}
