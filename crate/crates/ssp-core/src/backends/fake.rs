//! Deterministic fake backends.
//!
//! Every fake is a pure function of (seed, input): same seed, same input,
//! bit-identical output, regardless of thread schedule. That is what lets the
//! whole pipeline run byte-reproducibly without any external model.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use crate::backends::{
    AlignmentOracle, ImageFeatureExtractor, ImageGenerator, ImageHandle, LlmClient, TextEncoder,
    TokenEncoder, TokenFeatureTensor, ToxicityScorer, ToxicityVector,
};
use crate::error::{Error, Result};
use crate::featfile;
use crate::linalg::Mat;

/// Seeded FNV-1a with a splitmix64 finalizer. Stable across platforms.
pub fn det_hash(seed: u64, bytes: &[u8]) -> u64 {
    let mut h = seed ^ 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    // splitmix64 avalanche
    h = h.wrapping_add(0x9e37_79b9_7f4a_7c15);
    h = (h ^ (h >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    h = (h ^ (h >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    h ^ (h >> 31)
}

fn trigrams(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    if chars.len() < 3 {
        return vec![chars.iter().collect()];
    }
    chars.windows(3).map(|w| w.iter().collect()).collect()
}

/// Hashed character-trigram count vector, L2-normalized.
fn trigram_vector(seed: u64, dim: usize, text: &str) -> Vec<f64> {
    let mut counts = vec![0.0_f64; dim];
    for gram in trigrams(text) {
        let bucket = (det_hash(seed, gram.as_bytes()) % dim as u64) as usize;
        counts[bucket] += 1.0;
    }
    let norm = counts.iter().map(|c| c * c).sum::<f64>().sqrt();
    if norm > 0.0 {
        for c in counts.iter_mut() {
            *c /= norm;
        }
    }
    counts
}

/// Hashed character-trigram text encoder.
///
/// Gives related texts (shared substrings) high cosine similarity and
/// unrelated texts near-zero similarity, which is all the downstream metrics
/// need to be exercised without a real model.
#[derive(Debug, Clone)]
pub struct FakeTextEncoder {
    dim: usize,
    seed: u64,
    max_text_len: usize,
    token_len: usize,
    token_dim: usize,
}

impl FakeTextEncoder {
    pub fn new(dim: usize, seed: u64) -> Self {
        FakeTextEncoder {
            dim,
            seed,
            max_text_len: 512,
            token_len: 8,
            token_dim: 16,
        }
    }

    pub fn with_max_text_len(mut self, max_text_len: usize) -> Self {
        self.max_text_len = max_text_len;
        self
    }

    pub fn with_token_shape(mut self, token_len: usize, token_dim: usize) -> Self {
        self.token_len = token_len;
        self.token_dim = token_dim;
        self
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn check_texts(texts: &[String]) -> Result<()> {
        if texts.is_empty() {
            return Err(Error::invalid("encode requires at least one text"));
        }
        if let Some(i) = texts.iter().position(|t| t.is_empty()) {
            return Err(Error::invalid(format!("text at index {i} is empty")));
        }
        Ok(())
    }
}

impl TextEncoder for FakeTextEncoder {
    fn dim(&self) -> usize {
        self.dim
    }

    fn max_text_len(&self) -> usize {
        self.max_text_len
    }

    fn encode_texts(&self, texts: &[String]) -> Result<Mat> {
        Self::check_texts(texts)?;
        let rows: Vec<Vec<f64>> = texts
            .iter()
            .map(|t| trigram_vector(self.seed, self.dim, t))
            .collect();
        Mat::from_rows(&rows)
    }

    fn fingerprint(&self) -> String {
        format!("fake-trigram:d={}:seed={}", self.dim, self.seed)
    }
}

impl TokenEncoder for FakeTextEncoder {
    fn token_len(&self) -> usize {
        self.token_len
    }

    fn token_dim(&self) -> usize {
        self.token_dim
    }

    fn encode_tokens(&self, texts: &[String]) -> Result<TokenFeatureTensor> {
        Self::check_texts(texts)?;
        let l = self.token_len;
        let d = self.token_dim;
        let mut data = vec![0.0_f64; texts.len() * l * d];
        let mut truncated = vec![false; texts.len()];
        for (i, text) in texts.iter().enumerate() {
            let tokens: Vec<&str> = text.split_whitespace().collect();
            if tokens.len() > l {
                truncated[i] = true;
            }
            for (j, token) in tokens.iter().take(l).enumerate() {
                let v = trigram_vector(self.seed, d, token);
                data[(i * l + j) * d..(i * l + j + 1) * d].copy_from_slice(&v);
            }
            // padding positions stay zero
        }
        let mut tensor = TokenFeatureTensor::new(texts.len(), l, d, data)?;
        tensor.set_truncated(truncated);
        Ok(tensor)
    }
}

const REGEN_SALT: u64 = 0x5151_5151_5151_5151;

/// Image generator that derives a synthetic feature vector from the prompt
/// (seeded hash over its trigrams), writes it to a fixture file and returns
/// a handle pointing at it. Never rejects unless the prompt contains the
/// configured trigger token.
///
/// Uris are stored relative to `images_dir` so result files stay byte-stable
/// across working directories.
pub struct FakeImageGenerator {
    seed: u64,
    dim: usize,
    trigger_token: String,
    images_dir: PathBuf,
    generate_calls: AtomicU64,
    regenerate_calls: AtomicU64,
}

impl FakeImageGenerator {
    pub fn new(seed: u64, dim: usize, images_dir: impl Into<PathBuf>) -> Self {
        FakeImageGenerator {
            seed,
            dim,
            trigger_token: "UNSAFE_MARKER".to_string(),
            images_dir: images_dir.into(),
            generate_calls: AtomicU64::new(0),
            regenerate_calls: AtomicU64::new(0),
        }
    }

    pub fn with_trigger_token(mut self, token: impl Into<String>) -> Self {
        self.trigger_token = token.into();
        self
    }

    pub fn generate_calls(&self) -> u64 {
        self.generate_calls.load(Ordering::SeqCst)
    }

    pub fn regenerate_calls(&self) -> u64 {
        self.regenerate_calls.load(Ordering::SeqCst)
    }

    /// Total generator invocations (initial + regenerations).
    pub fn total_calls(&self) -> u64 {
        self.generate_calls() + self.regenerate_calls()
    }

    pub fn images_dir(&self) -> &Path {
        &self.images_dir
    }

    fn prompt_id(&self, prompt: &str) -> String {
        format!("{:016x}", det_hash(self.seed, prompt.as_bytes()))
    }

    fn emit(&self, prompt: &str, feature_seed: u64, file_tag: &str) -> Result<(String, Vec<f64>)> {
        let features = trigram_vector(feature_seed, self.dim, prompt);
        let name = format!(
            "img-{:016x}{}.bin",
            det_hash(feature_seed, prompt.as_bytes()),
            file_tag
        );
        let m = Mat::from_vec(1, self.dim, features.clone())?;
        featfile::write_matrix(&self.images_dir.join(&name), &m)?;
        Ok((name, features))
    }
}

impl ImageGenerator for FakeImageGenerator {
    fn generate_image(&self, prompt: &str) -> Result<ImageHandle> {
        self.generate_calls.fetch_add(1, Ordering::SeqCst);
        if prompt.is_empty() {
            return Err(Error::invalid("prompt must be non-empty"));
        }
        let prompt_id = self.prompt_id(prompt);
        if !self.trigger_token.is_empty() && prompt.contains(&self.trigger_token) {
            let mut handle = ImageHandle::rejected(prompt_id);
            handle
                .metadata
                .insert("rejected_reason".to_string(), "trigger_token".to_string());
            return Ok(handle);
        }
        let (name, _) = self.emit(prompt, self.seed, "")?;
        let mut metadata = BTreeMap::new();
        metadata.insert("generator".to_string(), "fake".to_string());
        Ok(ImageHandle {
            uri: Some(name),
            prompt_id,
            rejected: false,
            metadata,
        })
    }

    fn regenerate_image(&self, image: &ImageHandle, optimized_prompt: &str) -> Result<ImageHandle> {
        self.regenerate_calls.fetch_add(1, Ordering::SeqCst);
        if image.rejected {
            return Err(Error::invalid("cannot regenerate from a rejected handle"));
        }
        if optimized_prompt.is_empty() {
            return Err(Error::invalid("prompt must be non-empty"));
        }
        let (name, _) = self.emit(optimized_prompt, self.seed ^ REGEN_SALT, "-r")?;
        let mut metadata = BTreeMap::new();
        metadata.insert("generator".to_string(), "fake".to_string());
        metadata.insert("regenerated".to_string(), "true".to_string());
        Ok(ImageHandle {
            uri: Some(name),
            prompt_id: image.prompt_id.clone(),
            rejected: false,
            metadata,
        })
    }
}

/// Reads back the feature vectors the fake generator wrote.
pub struct FakeImageFeatureExtractor {
    base_dir: PathBuf,
    dim: usize,
}

impl FakeImageFeatureExtractor {
    pub fn new(base_dir: impl Into<PathBuf>, dim: usize) -> Self {
        FakeImageFeatureExtractor { base_dir: base_dir.into(), dim }
    }
}

impl ImageFeatureExtractor for FakeImageFeatureExtractor {
    fn dim(&self) -> usize {
        self.dim
    }

    fn extract(&self, image: &ImageHandle) -> Result<Vec<f64>> {
        let uri = image
            .uri
            .as_deref()
            .ok_or_else(|| Error::invalid("cannot extract features from a rejected handle"))?;
        let m = featfile::read_matrix(&self.base_dir.join(uri))?;
        if m.rows() != 1 || m.cols() != self.dim {
            return Err(Error::invalid(format!(
                "image feature file has shape {}x{}, expected 1x{}",
                m.rows(),
                m.cols(),
                self.dim
            )));
        }
        Ok(m.row(0).to_vec())
    }
}

/// Scripted alignment oracle: prompts in the misaligned set answer false,
/// everything else answers true.
#[derive(Debug, Default)]
pub struct ScriptedAlignmentOracle {
    misaligned: BTreeSet<String>,
    queries: AtomicU64,
}

impl ScriptedAlignmentOracle {
    pub fn new(misaligned: impl IntoIterator<Item = String>) -> Self {
        ScriptedAlignmentOracle {
            misaligned: misaligned.into_iter().collect(),
            queries: AtomicU64::new(0),
        }
    }

    pub fn queries(&self) -> u64 {
        self.queries.load(Ordering::SeqCst)
    }
}

impl AlignmentOracle for ScriptedAlignmentOracle {
    fn is_aligned(&self, image: &ImageHandle, prompt: &str) -> Result<bool> {
        if image.rejected {
            return Err(Error::invalid("cannot query alignment of a rejected handle"));
        }
        self.queries.fetch_add(1, Ordering::SeqCst);
        Ok(!self.misaligned.contains(prompt))
    }
}

/// Deterministic caption / summarize / filter / complete client.
#[derive(Debug, Clone)]
pub struct FakeLlmClient {
    captions: BTreeMap<String, String>,
    summary_max_len: usize,
    min_comprehensible_len: usize,
}

impl Default for FakeLlmClient {
    fn default() -> Self {
        FakeLlmClient {
            captions: BTreeMap::new(),
            summary_max_len: 300,
            min_comprehensible_len: 10,
        }
    }
}

impl FakeLlmClient {
    pub fn with_captions(mut self, captions: BTreeMap<String, String>) -> Self {
        self.captions = captions;
        self
    }

    pub fn with_summary_max_len(mut self, n: usize) -> Self {
        self.summary_max_len = n;
        self
    }

    pub fn with_min_comprehensible_len(mut self, n: usize) -> Self {
        self.min_comprehensible_len = n;
        self
    }
}

impl LlmClient for FakeLlmClient {
    fn caption(&self, image: &ImageHandle) -> Result<String> {
        let uri = image
            .uri
            .as_deref()
            .ok_or_else(|| Error::invalid("cannot caption a rejected handle"))?;
        Ok(self
            .captions
            .get(uri)
            .cloned()
            .unwrap_or_else(|| format!("an image ({uri})")))
    }

    fn summarize(&self, texts: &[String]) -> Result<String> {
        if texts.is_empty() {
            return Err(Error::invalid("summarize requires at least one text"));
        }
        let joined = texts.join(" ");
        Ok(joined.chars().take(self.summary_max_len).collect())
    }

    fn comprehensible(&self, text: &str) -> Result<bool> {
        let printable = text.chars().all(|c| !c.is_control());
        Ok(printable && text.chars().count() >= self.min_comprehensible_len)
    }

    fn complete(&self, instruction: &str) -> Result<String> {
        if instruction.is_empty() {
            return Err(Error::invalid("instruction must be non-empty"));
        }
        Ok(instruction.to_string())
    }
}

/// Lexicon-driven toxicity scorer: each lexicon word carries a score vector;
/// a text scores the per-dimension max over the words it contains. Texts
/// with no lexicon hits score all zeros.
#[derive(Debug, Clone, Default)]
pub struct LexiconToxicityScorer {
    lexicon: BTreeMap<String, ToxicityVector>,
}

impl LexiconToxicityScorer {
    pub fn new(lexicon: BTreeMap<String, ToxicityVector>) -> Self {
        LexiconToxicityScorer {
            lexicon: lexicon
                .into_iter()
                .map(|(k, v)| (k.to_lowercase(), v))
                .collect(),
        }
    }
}

impl ToxicityScorer for LexiconToxicityScorer {
    fn score_toxicity(&self, text: &str) -> Result<ToxicityVector> {
        if text.is_empty() {
            return Err(Error::invalid("text must be non-empty"));
        }
        let mut score = ToxicityVector::default();
        if self.lexicon.is_empty() {
            return Ok(score);
        }
        for word in text
            .split(|c: char| !c.is_alphanumeric())
            .filter(|w| !w.is_empty())
        {
            if let Some(hit) = self.lexicon.get(&word.to_lowercase()) {
                score.toxicity = score.toxicity.max(hit.toxicity);
                score.severe_toxicity = score.severe_toxicity.max(hit.severe_toxicity);
                score.obscenity = score.obscenity.max(hit.obscenity);
                score.threat = score.threat.max(hit.threat);
                score.insult = score.insult.max(hit.insult);
                score.identity_attack = score.identity_attack.max(hit.identity_attack);
            }
        }
        score.validate()?;
        Ok(score)
    }
}
