//! Wire shapes and configuration for real HTTP backends.
//!
//! These adapters ship disabled: the types pin down the request/response
//! contracts (chat-completion style for text, image-generation style for
//! images) and the credential handling, but no transport is linked in. Every
//! trait method returns a retriable transport error explaining how to enable
//! a real adapter.

use serde::{Deserialize, Serialize};

use crate::backends::{
    AlignmentOracle, ImageGenerator, ImageHandle, LlmClient, ToxicityScorer, ToxicityVector,
    API_KEY_ENV,
};
use crate::error::{Error, Result};

/// Chat-completion style request body.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChatCompletionRequest {
    pub model: String,
    pub messages: Vec<ChatMessage>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub temperature: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_tokens: Option<u32>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: String,
    pub content: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChatCompletionResponse {
    pub choices: Vec<ChatChoice>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChatChoice {
    pub message: ChatMessage,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub finish_reason: Option<String>,
}

/// Image-generation style request body.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ImageGenerationRequest {
    pub model: String,
    pub prompt: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub size: Option<String>,
    pub n: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ImageGenerationResponse {
    pub data: Vec<ImageDatum>,
    /// Set when the provider's safety layer refused the prompt.
    #[serde(default)]
    pub refused: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ImageDatum {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub url: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b64_data: Option<String>,
}

/// Adapter configuration. The regeneration instruction is configurable
/// because providers differ on how a "redo this image" request is phrased.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApiBackendConfig {
    pub base_url: String,
    pub chat_model: String,
    pub image_model: String,
    /// Feature extractor the FID path should use; provider-specific.
    pub feature_extractor: String,
    pub regenerate_instruction: String,
}

impl Default for ApiBackendConfig {
    fn default() -> Self {
        ApiBackendConfig {
            base_url: "https://api.example.invalid/v1".to_string(),
            chat_model: "chat-large".to_string(),
            image_model: "image-large".to_string(),
            feature_extractor: "inception-v3".to_string(),
            regenerate_instruction:
                "Regenerate this image so it matches the prompt exactly; keep the style."
                    .to_string(),
        }
    }
}

/// Reads the API credential from the environment, failing with the exact
/// variable name so callers can surface it.
pub fn require_api_key() -> Result<String> {
    std::env::var(API_KEY_ENV)
        .map_err(|_| Error::invalid(format!("{API_KEY_ENV} is not set; the api backend needs it")))
}

/// Disabled HTTP adapter. Constructing it checks credentials; calling it
/// reports that no transport is linked.
pub struct ApiBackend {
    #[allow(dead_code)]
    config: ApiBackendConfig,
    #[allow(dead_code)]
    api_key: String,
}

impl ApiBackend {
    pub fn new(config: ApiBackendConfig) -> Result<Self> {
        let api_key = require_api_key()?;
        Ok(ApiBackend { config, api_key })
    }

    fn disabled<T>(&self) -> Result<T> {
        Err(Error::Transport(
            "api backend ships disabled: no HTTP transport is linked in this build".to_string(),
        ))
    }
}

impl ImageGenerator for ApiBackend {
    fn generate_image(&self, _prompt: &str) -> Result<ImageHandle> {
        self.disabled()
    }

    fn regenerate_image(&self, _image: &ImageHandle, _optimized_prompt: &str) -> Result<ImageHandle> {
        self.disabled()
    }
}

impl AlignmentOracle for ApiBackend {
    fn is_aligned(&self, _image: &ImageHandle, _prompt: &str) -> Result<bool> {
        self.disabled()
    }
}

impl LlmClient for ApiBackend {
    fn caption(&self, _image: &ImageHandle) -> Result<String> {
        self.disabled()
    }

    fn summarize(&self, _texts: &[String]) -> Result<String> {
        self.disabled()
    }

    fn comprehensible(&self, _text: &str) -> Result<bool> {
        self.disabled()
    }

    fn complete(&self, _instruction: &str) -> Result<String> {
        self.disabled()
    }
}

impl ToxicityScorer for ApiBackend {
    fn score_toxicity(&self, _text: &str) -> Result<ToxicityVector> {
        self.disabled()
    }
}
