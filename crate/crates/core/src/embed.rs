//! Context featurization φ(q, a) → ℝᵈ.
//!
//! Two embedders behind one trait: a deterministic offline one (signed
//! feature hashing of character trigrams) and a remote embedding-service
//! client. Both emit unit-norm vectors, which keeps ‖x‖ ≤ 1 as the bandit
//! theory assumes. Question and answer are combined as `"Q: {q}\nA: {a}"`.

use crate::bandit::ContextVector;
use crate::error::{Error, Result};
use crate::hash::fnv1a;
use crate::scalar::Scalar;

/// Default dimension of the offline hashing embedder.
pub const OFFLINE_DEFAULT_DIM: usize = 256;
/// Default dimension when a remote sentence embedder is configured.
pub const REMOTE_DEFAULT_DIM: usize = 384;

/// Minimum dimension for the offline embedder; below this, trigram
/// collisions dominate and cosine geometry degrades.
pub const OFFLINE_MIN_DIM: usize = 8;

pub fn combine_texts(question: &str, answer: &str) -> String {
    format!("Q: {question}\nA: {answer}")
}

/// Signed feature hashing of character trigrams into `d` buckets, then
/// L2 normalization. Fully deterministic; texts shorter than one trigram
/// map to the first basis vector.
pub fn hash_embed<S: Scalar>(text: &str, d: usize) -> Result<ContextVector<S>> {
    if d < OFFLINE_MIN_DIM {
        return Err(Error::Config(format!(
            "offline embedder needs d >= {OFFLINE_MIN_DIM}, got {d}"
        )));
    }
    let chars: Vec<char> = text.chars().collect();
    let mut acc = vec![S::zero(); d];
    if chars.len() >= 3 {
        let mut gram = String::with_capacity(12);
        for w in chars.windows(3) {
            gram.clear();
            gram.extend(w);
            let h = fnv1a(gram.as_bytes());
            let bucket = (h % d as u64) as usize;
            let sign = if h >> 63 == 0 { S::one() } else { -S::one() };
            acc[bucket] += sign;
        }
    }
    ContextVector::normalized(acc)
}

pub fn cosine<S: Scalar>(a: &ContextVector<S>, b: &ContextVector<S>) -> S {
    crate::linalg::dot(a.as_slice(), b.as_slice())
}

/// A context featurizer. Implementations must be pure with respect to the
/// `(question, answer)` pair (remote embedders are expected to be
/// deterministic services; responses are used as returned).
pub trait Embedder: Send + Sync {
    fn dim(&self) -> usize;
    fn embed(&self, question: &str, answer: &str) -> Result<ContextVector<f64>>;

    /// Cosine similarity of two answers under this embedder, in [−1, 1].
    /// The question slot is left empty so only answer content is compared.
    fn semantic_similarity(&self, a: &str, b: &str) -> Result<f64> {
        let va = self.embed("", a)?;
        let vb = self.embed("", b)?;
        Ok(cosine(&va, &vb))
    }
}

/// Offline embedder: hashed character trigrams, no network, no model files.
#[derive(Debug, Clone)]
pub struct OfflineHashingEmbedder {
    dim: usize,
}

impl OfflineHashingEmbedder {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < OFFLINE_MIN_DIM {
            return Err(Error::Config(format!(
                "offline embedder needs d >= {OFFLINE_MIN_DIM}, got {dim}"
            )));
        }
        Ok(Self { dim })
    }
}

impl Default for OfflineHashingEmbedder {
    fn default() -> Self {
        Self {
            dim: OFFLINE_DEFAULT_DIM,
        }
    }
}

impl Embedder for OfflineHashingEmbedder {
    fn dim(&self) -> usize {
        self.dim
    }

    fn embed(&self, question: &str, answer: &str) -> Result<ContextVector<f64>> {
        hash_embed(&combine_texts(question, answer), self.dim)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::norm2;

    const LONG_A: &str = "The boiling point of water at standard atmospheric pressure is 100 \
degrees Celsius, a value that drops noticeably at higher altitudes because the ambient \
pressure falls.";
    const LONG_B: &str = "Quarterly revenue grew by eight percent, driven mostly by the new \
subscription tier and a one-off licensing deal that the finance team does not expect to \
repeat next year.";

    #[test]
    fn unit_norm_and_determinism() {
        let e = OfflineHashingEmbedder::default();
        let v1 = e.embed("What is water?", LONG_A).unwrap();
        let v2 = e.embed("What is water?", LONG_A).unwrap();
        assert!((norm2(v1.as_slice()) - 1.0).abs() < 1e-9);
        assert_eq!(v1, v2);
    }

    #[test]
    fn empty_text_maps_to_basis_vector() {
        let v = hash_embed::<f64>("", 16).unwrap();
        assert_eq!(v.as_slice()[0], 1.0);
        assert!(v.as_slice()[1..].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn identical_answers_have_similarity_one() {
        let e = OfflineHashingEmbedder::default();
        assert!((e.semantic_similarity(LONG_A, LONG_A).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn unrelated_texts_are_dissimilar() {
        // Independent oracle: cosine over explicit trigram count maps.
        use std::collections::HashMap;
        let count_grams = |s: &str| {
            let cs: Vec<char> = s.chars().collect();
            let mut m: HashMap<String, f64> = HashMap::new();
            for w in cs.windows(3) {
                *m.entry(w.iter().collect()).or_default() += 1.0;
            }
            m
        };
        let (ga, gb) = (count_grams(LONG_A), count_grams(LONG_B));
        let dot: f64 = ga
            .iter()
            .filter_map(|(k, va)| gb.get(k).map(|vb| va * vb))
            .sum();
        let na: f64 = ga.values().map(|v| v * v).sum::<f64>().sqrt();
        let nb: f64 = gb.values().map(|v| v * v).sum::<f64>().sqrt();
        let oracle = dot / (na * nb);
        assert!(oracle < 0.5, "oracle similarity {oracle}");

        let e = OfflineHashingEmbedder::default();
        let hashed = e.semantic_similarity(LONG_A, LONG_B).unwrap();
        assert!(hashed < 0.5, "hashed similarity {hashed}");
        // hashing only perturbs the exact trigram cosine by collisions
        assert!((hashed - oracle).abs() < 0.25);
    }

    #[test]
    fn locality_under_single_char_edits() {
        let e = OfflineHashingEmbedder::default();
        assert!(LONG_A.len() > 100);
        let edited: String = {
            let mut s: Vec<char> = LONG_A.chars().collect();
            s[40] = 'x';
            s.into_iter().collect()
        };
        let sim = e.semantic_similarity(LONG_A, &edited).unwrap();
        assert!((1.0 - sim).abs() < 0.05, "similarity {sim}");

        let appended = format!("{LONG_A} 🙂");
        let sim = e.semantic_similarity(LONG_A, &appended).unwrap();
        assert!(sim > 0.95, "emoji append similarity {sim}");
    }

    #[test]
    fn rejects_tiny_dimension() {
        assert!(OfflineHashingEmbedder::new(4).is_err());
        assert!(hash_embed::<f64>("abc", 2).is_err());
    }

    #[test]
    fn works_in_f32() {
        let v = hash_embed::<f32>(LONG_A, 64).unwrap();
        assert!((norm2(v.as_slice()) - 1.0).abs() < 1e-5);
    }
}
