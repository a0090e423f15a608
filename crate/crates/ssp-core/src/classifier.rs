//! Theme classifier: a trainable nearest-centroid baseline over encoder
//! embeddings, plus a configuration slot for an external fine-tuned
//! transformer served behind an endpoint.

use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::backends::TextEncoder;
use crate::corpus::PromptRecord;
use crate::error::{Error, Result};
use crate::linalg;
use crate::metrics::encode_pooled;
use crate::par;
use crate::registry::Registry;

/// Hyperparameters recorded for the external fine-tuned classifier. The
/// baseline does not use them; they document what a real adapter expects.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BertAdapterConfig {
    pub endpoint: String,
    pub hidden_layers: u32,
    pub hidden_size: u32,
    pub attention_heads: u32,
    pub intermediate_size: u32,
    pub vocab_size: u32,
}

impl Default for BertAdapterConfig {
    fn default() -> Self {
        BertAdapterConfig {
            endpoint: String::new(),
            hidden_layers: 12,
            hidden_size: 768,
            attention_heads: 12,
            intermediate_size: 3072,
            vocab_size: 30522,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClassifierModel {
    CentroidBaseline {
        /// Theme names ordered by label_id.
        themes: Vec<String>,
        /// [K, d] L2-normalized per-theme centroids.
        centroids: Vec<Vec<f64>>,
        encoder_fingerprint: String,
    },
    ExternalAdapter {
        themes: Vec<String>,
        config: BertAdapterConfig,
    },
}

impl ClassifierModel {
    pub fn label_count(&self) -> usize {
        match self {
            ClassifierModel::CentroidBaseline { themes, .. } => themes.len(),
            ClassifierModel::ExternalAdapter { themes, .. } => themes.len(),
        }
    }

    pub fn theme_name(&self, label_id: u32) -> Option<&str> {
        let themes = match self {
            ClassifierModel::CentroidBaseline { themes, .. } => themes,
            ClassifierModel::ExternalAdapter { themes, .. } => themes,
        };
        themes.get(label_id as usize).map(String::as_str)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        let mut json = serde_json::to_string_pretty(self)?;
        json.push('\n');
        fs::write(path, json)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<ClassifierModel> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierReport {
    pub accuracy: f64,
    /// `confusion[true_label][predicted_label]` counts.
    pub confusion: Vec<Vec<u64>>,
}

fn resolve_label(registry: &Registry, record: &PromptRecord) -> Result<u32> {
    let theme = record
        .theme
        .as_deref()
        .ok_or_else(|| Error::MissingField { id: record.id.clone(), field: "theme" })?;
    registry
        .theme_by_name(theme)
        .map(|t| t.label_id)
        .ok_or_else(|| Error::invalid(format!("record {:?}: theme {theme:?} is not in the registry", record.id)))
}

/// Train the nearest-centroid baseline: one L2-normalized mean embedding per
/// registry theme. Every theme needs at least one labeled example.
pub fn train_classifier(
    records: &[PromptRecord],
    registry: &Registry,
    encoder: &dyn TextEncoder,
) -> Result<ClassifierModel> {
    if records.is_empty() {
        return Err(Error::invalid("training set is empty"));
    }
    let k = registry.theme_count();
    if k == 0 {
        return Err(Error::invalid("registry has no themes"));
    }
    let labels: Vec<u32> = records
        .iter()
        .map(|r| resolve_label(registry, r))
        .collect::<Result<_>>()?;
    let embeddings: Vec<Vec<f64>> =
        par::try_map(records, |r| encode_pooled(encoder, &r.original_prompt))?;

    let d = encoder.dim();
    let mut sums = vec![vec![0.0_f64; d]; k];
    let mut counts = vec![0_usize; k];
    for (label, emb) in labels.iter().zip(&embeddings) {
        let label = *label as usize;
        counts[label] += 1;
        for (s, v) in sums[label].iter_mut().zip(emb) {
            *s += v;
        }
    }
    let mut themes = Vec::with_capacity(k);
    let mut centroids = Vec::with_capacity(k);
    for label in 0..k {
        let theme = registry
            .theme(label as u32)
            .expect("contiguous labels validated by registry");
        if counts[label] == 0 {
            return Err(Error::invalid(format!(
                "theme {:?} has no training examples",
                theme.name
            )));
        }
        let mut centroid: Vec<f64> = sums[label].iter().map(|s| s / counts[label] as f64).collect();
        let norm = linalg::norm(&centroid);
        if norm > 0.0 {
            for c in centroid.iter_mut() {
                *c /= norm;
            }
        }
        themes.push(theme.name.clone());
        centroids.push(centroid);
    }
    Ok(ClassifierModel::CentroidBaseline {
        themes,
        centroids,
        encoder_fingerprint: encoder.fingerprint(),
    })
}

/// Argmax of cosine(centroid, embedding); ties break toward the lowest
/// label_id.
pub fn classify_prompt(
    model: &ClassifierModel,
    encoder: &dyn TextEncoder,
    prompt: &str,
) -> Result<u32> {
    if prompt.is_empty() {
        return Err(Error::invalid("prompt must be non-empty"));
    }
    match model {
        ClassifierModel::ExternalAdapter { .. } => Err(Error::Transport(
            "external classifier adapter is not linked in this build".to_string(),
        )),
        ClassifierModel::CentroidBaseline { centroids, .. } => {
            let emb = encode_pooled(encoder, prompt)?;
            let mut best = 0_u32;
            let mut best_score = f64::NEG_INFINITY;
            for (label, centroid) in centroids.iter().enumerate() {
                let score = linalg::cosine(centroid, &emb);
                if score > best_score {
                    best_score = score;
                    best = label as u32;
                }
            }
            Ok(best)
        }
    }
}

/// Accuracy and confusion matrix over a labeled test set.
pub fn evaluate_classifier(
    model: &ClassifierModel,
    registry: &Registry,
    encoder: &dyn TextEncoder,
    test_records: &[PromptRecord],
) -> Result<ClassifierReport> {
    if test_records.is_empty() {
        return Err(Error::invalid("test set is empty"));
    }
    let k = model.label_count();
    let outcomes: Vec<(u32, u32)> = par::try_map(test_records, |r| {
        let truth = resolve_label(registry, r)?;
        let predicted = classify_prompt(model, encoder, &r.original_prompt)?;
        Ok((truth, predicted))
    })?;
    let mut confusion = vec![vec![0_u64; k]; k];
    let mut correct = 0_u64;
    for (truth, predicted) in outcomes {
        confusion[truth as usize][predicted as usize] += 1;
        if truth == predicted {
            correct += 1;
        }
    }
    Ok(ClassifierReport {
        accuracy: correct as f64 / test_records.len() as f64,
        confusion,
    })
}

/// Seeded shuffle-and-split. `train_fraction` in (0, 1); the split mirrors
/// an 80/20 default upstream.
pub fn split_train_test(
    records: &[PromptRecord],
    train_fraction: f64,
    seed: u64,
) -> Result<(Vec<PromptRecord>, Vec<PromptRecord>)> {
    if !(0.0..1.0).contains(&train_fraction) || train_fraction == 0.0 {
        return Err(Error::invalid("train_fraction must lie in (0, 1)"));
    }
    let mut shuffled: Vec<PromptRecord> = records.to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    shuffled.shuffle(&mut rng);
    let cut = ((records.len() as f64) * train_fraction).round() as usize;
    let cut = cut.clamp(1, records.len().saturating_sub(1).max(1));
    let test = shuffled.split_off(cut.min(shuffled.len()));
    Ok((shuffled, test))
}
