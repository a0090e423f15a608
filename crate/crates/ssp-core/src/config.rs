//! Run configuration shared by the CLI and tests: one seed drives every
//! source of randomness, and the backend kind picks between the deterministic
//! fakes and the (disabled) HTTP adapters.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::backends::api::{ApiBackend, ApiBackendConfig};
use crate::backends::fake::{
    FakeImageFeatureExtractor, FakeImageGenerator, FakeLlmClient, FakeTextEncoder,
    LexiconToxicityScorer, ScriptedAlignmentOracle,
};
use crate::backends::retry::RetryPolicy;
use crate::backends::{Backends, ToxicityVector};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    #[default]
    Fake,
    Api,
}

impl FromStr for BackendKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fake" => Ok(BackendKind::Fake),
            "api" => Ok(BackendKind::Api),
            other => Err(Error::invalid(format!("unknown backend {other:?}; expected fake|api"))),
        }
    }
}

/// Knobs for the deterministic fakes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FakeBackendConfig {
    pub encoder_dim: usize,
    pub encoder_max_len: usize,
    pub token_len: usize,
    pub token_dim: usize,
    pub trigger_token: String,
    pub misaligned_prompts: Vec<String>,
    pub toxicity_lexicon: BTreeMap<String, ToxicityVector>,
    pub min_comprehensible_len: usize,
    pub summary_max_len: usize,
    pub captions: BTreeMap<String, String>,
}

impl Default for FakeBackendConfig {
    fn default() -> Self {
        FakeBackendConfig {
            encoder_dim: 256,
            encoder_max_len: 512,
            token_len: 8,
            token_dim: 16,
            trigger_token: "UNSAFE_MARKER".to_string(),
            misaligned_prompts: Vec::new(),
            toxicity_lexicon: BTreeMap::new(),
            min_comprehensible_len: 10,
            summary_max_len: 300,
            captions: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub seed: u64,
    pub backend: BackendKind,
    pub worker_count: usize,
    pub separator: String,
    pub delta: f64,
    pub max_regens: u32,
    pub paths: BTreeMap<String, String>,
    pub fake: FakeBackendConfig,
    pub api: ApiBackendConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 42,
            backend: BackendKind::Fake,
            worker_count: 1,
            separator: ", ".to_string(),
            delta: 0.0,
            max_regens: 1,
            paths: BTreeMap::new(),
            fake: FakeBackendConfig::default(),
            api: ApiBackendConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.worker_count < 1 {
            return Err(Error::invalid("worker_count must be >= 1"));
        }
        if self.delta < 0.0 || self.delta.is_nan() {
            return Err(Error::invalid("delta must be a non-negative number"));
        }
        if self.fake.encoder_dim == 0 || self.fake.token_dim == 0 || self.fake.token_len == 0 {
            return Err(Error::invalid("fake encoder dimensions must be positive"));
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        let config: RunConfig = serde_json::from_str(&fs::read_to_string(path)?)?;
        config.validate()?;
        Ok(config)
    }
}

/// Concrete fake set with the trait bundle plus direct handles, so callers
/// can read call counters after a run.
pub struct FakeBackendSet {
    pub encoder: Arc<FakeTextEncoder>,
    pub generator: Arc<FakeImageGenerator>,
    pub oracle: Arc<ScriptedAlignmentOracle>,
    pub llm: Arc<FakeLlmClient>,
    pub toxicity: Arc<LexiconToxicityScorer>,
    pub extractor: Arc<FakeImageFeatureExtractor>,
}

impl FakeBackendSet {
    pub fn build(config: &RunConfig, images_dir: &Path) -> FakeBackendSet {
        let f = &config.fake;
        let encoder = Arc::new(
            FakeTextEncoder::new(f.encoder_dim, config.seed)
                .with_max_text_len(f.encoder_max_len)
                .with_token_shape(f.token_len, f.token_dim),
        );
        let generator = Arc::new(
            FakeImageGenerator::new(config.seed, f.encoder_dim, images_dir)
                .with_trigger_token(f.trigger_token.clone()),
        );
        let oracle = Arc::new(ScriptedAlignmentOracle::new(f.misaligned_prompts.clone()));
        let llm = Arc::new(
            FakeLlmClient::default()
                .with_captions(f.captions.clone())
                .with_summary_max_len(f.summary_max_len)
                .with_min_comprehensible_len(f.min_comprehensible_len),
        );
        let toxicity = Arc::new(LexiconToxicityScorer::new(f.toxicity_lexicon.clone()));
        let extractor = Arc::new(FakeImageFeatureExtractor::new(images_dir, f.encoder_dim));
        FakeBackendSet { encoder, generator, oracle, llm, toxicity, extractor }
    }

    pub fn backends(&self) -> Backends {
        Backends {
            text_encoder: self.encoder.clone(),
            generator: self.generator.clone(),
            oracle: self.oracle.clone(),
            llm: self.llm.clone(),
            toxicity: self.toxicity.clone(),
            image_features: self.extractor.clone(),
            retry: RetryPolicy::default(),
        }
    }
}

/// Build the backend bundle for a run.
///
/// The api kind wires the disabled HTTP adapter for generation, alignment,
/// LLM and toxicity calls (they fail as transport errors until a transport
/// is linked); encoding and feature extraction stay on the seeded fakes so
/// offline evaluation of stored results keeps working.
pub fn build_backends(config: &RunConfig, images_dir: &Path) -> Result<Backends> {
    config.validate()?;
    match config.backend {
        BackendKind::Fake => Ok(FakeBackendSet::build(config, images_dir).backends()),
        BackendKind::Api => {
            let api = Arc::new(ApiBackend::new(config.api.clone())?);
            let fake = FakeBackendSet::build(config, images_dir);
            Ok(Backends {
                text_encoder: fake.encoder.clone(),
                generator: api.clone(),
                oracle: api.clone(),
                llm: api.clone(),
                toxicity: api,
                image_features: fake.extractor.clone(),
                retry: RetryPolicy::default(),
            })
        }
    }
}
