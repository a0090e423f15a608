//! Abstract interfaces for every external model the pipeline touches, plus
//! deterministic seeded fakes (`fake`) and disabled-by-default HTTP adapter
//! stubs (`api`).
//!
//! All traits are object-safe and `Send + Sync`: the pipeline fans work out
//! across threads and restores order afterwards. Fakes are pure functions of
//! (seed, input), so any fan-out schedule produces the same bytes.

pub mod api;
pub mod fake;
pub mod retry;

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Mat;

/// Environment variable holding the API credential for real backends.
pub const API_KEY_ENV: &str = "SSP_API_KEY";

/// Token-level features for a batch of texts, shape `[n, l, d]` row-major.
/// `truncated[i]` marks texts that exceeded the token window.
#[derive(Debug, Clone, PartialEq)]
pub struct TokenFeatureTensor {
    n: usize,
    l: usize,
    d: usize,
    data: Vec<f64>,
    truncated: Vec<bool>,
}

impl TokenFeatureTensor {
    pub fn new(n: usize, l: usize, d: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * l * d {
            return Err(Error::invalid(format!(
                "tensor data length {} does not match [{n}, {l}, {d}]",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("non-finite token features".into()));
        }
        Ok(TokenFeatureTensor { n, l, d, data, truncated: vec![false; n] })
    }

    pub fn set_truncated(&mut self, flags: Vec<bool>) {
        assert_eq!(flags.len(), self.n);
        self.truncated = flags;
    }

    pub fn truncated(&self, i: usize) -> bool {
        self.truncated[i]
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn token_len(&self) -> usize {
        self.l
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[(i * self.l + j) * self.d + k]
    }

    /// The `[l, d]` slice for text `i`, flattened row-major.
    pub fn text_slice(&self, i: usize) -> &[f64] {
        &self.data[i * self.l * self.d..(i + 1) * self.l * self.d]
    }
}

/// Handle to a generated image. Safety refusals are data, not errors: they
/// come back as `rejected = true` with no uri so the reject-rate metric can
/// count them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageHandle {
    pub uri: Option<String>,
    pub prompt_id: String,
    pub rejected: bool,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

impl ImageHandle {
    pub fn rejected(prompt_id: impl Into<String>) -> Self {
        ImageHandle {
            uri: None,
            prompt_id: prompt_id.into(),
            rejected: true,
            metadata: BTreeMap::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match (&self.uri, self.rejected) {
            (Some(u), false) if !u.is_empty() => Ok(()),
            (None, true) => Ok(()),
            (Some(_), true) => Err(Error::invalid("rejected handle must not carry a uri")),
            _ => Err(Error::invalid("non-rejected handle needs a non-empty uri")),
        }
    }
}

/// Six-dimension toxicity scores, each in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct ToxicityVector {
    pub toxicity: f64,
    pub severe_toxicity: f64,
    pub obscenity: f64,
    pub threat: f64,
    pub insult: f64,
    pub identity_attack: f64,
}

impl ToxicityVector {
    pub fn components(&self) -> [f64; 6] {
        [
            self.toxicity,
            self.severe_toxicity,
            self.obscenity,
            self.threat,
            self.insult,
            self.identity_attack,
        ]
    }

    /// Mean of the six dimensions.
    pub fn mean(&self) -> f64 {
        self.components().iter().sum::<f64>() / 6.0
    }

    pub fn validate(&self) -> Result<()> {
        if self
            .components()
            .iter()
            .any(|v| !v.is_finite() || *v < 0.0 || *v > 1.0)
        {
            return Err(Error::invalid("toxicity components must lie in [0, 1]"));
        }
        Ok(())
    }
}

/// Sentence-level text encoder. `encode_texts` returns one row per input.
pub trait TextEncoder: Send + Sync {
    /// Embedding dimension d.
    fn dim(&self) -> usize;

    /// Longest text (in characters) the encoder accepts in one pass; longer
    /// texts get segmented by the metrics layer.
    fn max_text_len(&self) -> usize;

    fn encode_texts(&self, texts: &[String]) -> Result<Mat>;

    /// Stable identifier baked into persisted models so a model is never
    /// silently reused with a different encoder.
    fn fingerprint(&self) -> String;
}

/// Token-level encoder producing `[n, l, d]` tensors for feature analysis.
pub trait TokenEncoder: Send + Sync {
    fn token_len(&self) -> usize;
    fn token_dim(&self) -> usize;
    fn encode_tokens(&self, texts: &[String]) -> Result<TokenFeatureTensor>;
}

/// Text-to-image generator. Refusals are returned as rejected handles.
pub trait ImageGenerator: Send + Sync {
    fn generate_image(&self, prompt: &str) -> Result<ImageHandle>;

    /// One-shot regeneration given the previous image and the optimized
    /// prompt. Precondition: `image` is not rejected.
    fn regenerate_image(&self, image: &ImageHandle, optimized_prompt: &str) -> Result<ImageHandle>;
}

/// Answers "does this image match this prompt?".
pub trait AlignmentOracle: Send + Sync {
    fn is_aligned(&self, image: &ImageHandle, prompt: &str) -> Result<bool>;
}

/// Caption / summarize / filter / complete client.
pub trait LlmClient: Send + Sync {
    fn caption(&self, image: &ImageHandle) -> Result<String>;
    fn summarize(&self, texts: &[String]) -> Result<String>;
    fn comprehensible(&self, text: &str) -> Result<bool>;
    fn complete(&self, instruction: &str) -> Result<String>;
}

pub trait ToxicityScorer: Send + Sync {
    fn score_toxicity(&self, text: &str) -> Result<ToxicityVector>;
}

/// Turns an image handle into a feature vector for FID / alignment.
pub trait ImageFeatureExtractor: Send + Sync {
    fn dim(&self) -> usize;
    fn extract(&self, image: &ImageHandle) -> Result<Vec<f64>>;
}

/// Everything the pipeline needs, bundled for fan-out.
#[derive(Clone)]
pub struct Backends {
    pub text_encoder: Arc<dyn TextEncoder>,
    pub generator: Arc<dyn ImageGenerator>,
    pub oracle: Arc<dyn AlignmentOracle>,
    pub llm: Arc<dyn LlmClient>,
    pub toxicity: Arc<dyn ToxicityScorer>,
    pub image_features: Arc<dyn ImageFeatureExtractor>,
    pub retry: retry::RetryPolicy,
}
