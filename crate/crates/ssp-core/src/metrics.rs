//! Quantitative measures: Fréchet distance between feature Gaussians,
//! alignment score with long-text segmentation, prompt consistency,
//! toxicity aggregation, reject rate and the weighted user-study score.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::backends::{TextEncoder, ToxicityVector};
use crate::error::{Error, Result};
use crate::linalg::{self, Mat};
use crate::pipeline::GenerationResult;

/// Eigenvalues this far below zero (relative to the trace) are rounding
/// noise and get clamped; anything worse is a hard error.
const PSD_CLAMP_RATIO: f64 = 1e-6;

/// Gaussian fit to a feature matrix: mean vector and symmetrized unbiased
/// sample covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianSummary {
    pub mean: Vec<f64>,
    pub covariance: Mat,
}

impl GaussianSummary {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

/// Column means and unbiased covariance, symmetrized as (C + C^T)/2.
pub fn fit_gaussian(features: &Mat) -> Result<GaussianSummary> {
    let n = features.rows();
    let d = features.cols();
    if n < 2 {
        return Err(Error::invalid(format!("gaussian fit needs at least 2 samples, got {n}")));
    }
    if !features.is_finite() {
        return Err(Error::Numerical("non-finite feature values".into()));
    }
    let mut mean = vec![0.0; d];
    for r in 0..n {
        for (c, m) in mean.iter_mut().enumerate() {
            *m += features.get(r, c);
        }
    }
    for m in mean.iter_mut() {
        *m /= n as f64;
    }
    let mut cov = Mat::zeros(d, d);
    for r in 0..n {
        let row = features.row(r);
        for i in 0..d {
            let di = row[i] - mean[i];
            for j in i..d {
                let dj = row[j] - mean[j];
                let v = cov.get(i, j) + di * dj;
                cov.set(i, j, v);
            }
        }
    }
    let denom = (n - 1) as f64;
    for i in 0..d {
        for j in i..d {
            let v = cov.get(i, j) / denom;
            cov.set(i, j, v);
            cov.set(j, i, v);
        }
    }
    Ok(GaussianSummary { mean, covariance: cov })
}

/// Fréchet distance between two Gaussians:
/// `||mu1 - mu2||^2 + Tr(S1 + S2 - 2 (S1 S2)^{1/2})`.
///
/// The cross trace is computed by diagonalizing the symmetric form
/// `S1^{1/2} S2 S1^{1/2}`, whose eigenvalues match those of `S1 S2`.
pub fn frechet_distance(g1: &GaussianSummary, g2: &GaussianSummary) -> Result<f64> {
    if g1.dim() != g2.dim() {
        return Err(Error::invalid(format!(
            "dimension mismatch: {} vs {}",
            g1.dim(),
            g2.dim()
        )));
    }
    if g1.mean.iter().chain(&g2.mean).any(|v| !v.is_finite())
        || !g1.covariance.is_finite()
        || !g2.covariance.is_finite()
    {
        return Err(Error::Numerical("non-finite gaussian summary".into()));
    }

    let mean_term: f64 = g1
        .mean
        .iter()
        .zip(&g2.mean)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();

    let sqrt1 = linalg::sqrtm_psd(&g1.covariance, PSD_CLAMP_RATIO)?;
    let inner = sqrt1
        .matmul(&g2.covariance)?
        .matmul(&sqrt1)?
        .symmetrize()?;
    let (eigenvalues, _) = linalg::sym_eigen(&inner)?;
    let scale = inner.trace().abs().max(1.0);
    let floor = -PSD_CLAMP_RATIO * scale;
    let mut cross_trace = 0.0;
    for ev in eigenvalues {
        if ev < floor {
            return Err(Error::Numerical(format!(
                "covariance product is not PSD: eigenvalue {ev}"
            )));
        }
        cross_trace += ev.max(0.0).sqrt();
    }

    let fid = mean_term + g1.covariance.trace() + g2.covariance.trace() - 2.0 * cross_trace;
    if fid < -1e-6 {
        return Err(Error::Numerical(format!("frechet distance came out negative: {fid}")));
    }
    Ok(fid.max(0.0))
}

/// Split `text` into equal-length character segments no longer than `limit`.
/// The final short remainder segment is kept.
pub fn segment_text(text: &str, limit: usize) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let n = chars.len();
    if n == 0 {
        return Vec::new();
    }
    let limit = limit.max(1);
    if n <= limit {
        return vec![text.to_string()];
    }
    let k = n.div_ceil(limit);
    let seg_len = n.div_ceil(k);
    chars
        .chunks(seg_len)
        .map(|c| c.iter().collect())
        .collect()
}

/// Embedding for arbitrarily long text: encode each segment, then average.
/// Texts within the encoder limit reduce to a plain single encode.
pub fn encode_pooled(encoder: &dyn TextEncoder, text: &str) -> Result<Vec<f64>> {
    let segments = segment_text(text, encoder.max_text_len());
    if segments.is_empty() {
        return Err(Error::invalid("cannot encode an empty text"));
    }
    let m = encoder.encode_texts(&segments)?;
    let d = m.cols();
    let mut pooled = vec![0.0; d];
    for r in 0..m.rows() {
        for (c, p) in pooled.iter_mut().enumerate() {
            *p += m.get(r, c);
        }
    }
    for p in pooled.iter_mut() {
        *p /= m.rows() as f64;
    }
    Ok(pooled)
}

/// 100-scaled clamped cosine between the prompt and image features, averaged
/// over equal-length prompt segments. Range [0, 100].
pub fn alignment_score(
    encoder: &dyn TextEncoder,
    prompt: &str,
    image_features: &[f64],
) -> Result<f64> {
    if prompt.is_empty() {
        return Err(Error::invalid("prompt must be non-empty"));
    }
    if image_features.len() != encoder.dim() {
        return Err(Error::invalid(format!(
            "image feature dimension {} does not match encoder dimension {}",
            image_features.len(),
            encoder.dim()
        )));
    }
    let segments = segment_text(prompt, encoder.max_text_len());
    let m = encoder.encode_texts(&segments)?;
    let mut total = 0.0;
    for r in 0..m.rows() {
        total += 100.0 * linalg::cosine(m.row(r), image_features).max(0.0);
    }
    Ok(total / m.rows() as f64)
}

/// Text-to-text cosine between segment-pooled embeddings, unclamped below
/// zero. Range [-1, 1]; identical texts score exactly 1.
pub fn prompt_consistency(encoder: &dyn TextEncoder, original: &str, optimized: &str) -> Result<f64> {
    if original.is_empty() || optimized.is_empty() {
        return Err(Error::invalid("both texts must be non-empty"));
    }
    let a = encode_pooled(encoder, original)?;
    let b = encode_pooled(encoder, optimized)?;
    Ok(linalg::cosine(&a, &b))
}

/// Mean over prompts of the per-prompt mean of the six toxicity dimensions.
pub fn detoxify_mean(vectors: &[ToxicityVector]) -> Result<f64> {
    if vectors.is_empty() {
        return Err(Error::invalid("detoxify_mean needs at least one vector"));
    }
    for v in vectors {
        v.validate()?;
    }
    Ok(vectors.iter().map(ToxicityVector::mean).sum::<f64>() / vectors.len() as f64)
}

/// Fraction of generation results the backend's safety check refused.
pub fn reject_rate(results: &[GenerationResult]) -> Result<f64> {
    if results.is_empty() {
        return Err(Error::invalid("reject_rate needs at least one result"));
    }
    let rejected = results.iter().filter(|r| r.rejected).count();
    Ok(rejected as f64 / results.len() as f64)
}

/// Weighted user-study score `w_Q * Q + w_C * C` with both scores in [0, 10]
/// and non-negative weights summing to 1.
pub fn user_study_score(quality: f64, consistency: f64, w_quality: f64, w_consistency: f64) -> Result<f64> {
    if !(0.0..=10.0).contains(&quality) || !(0.0..=10.0).contains(&consistency) {
        return Err(Error::invalid("scores must lie in [0, 10]"));
    }
    if w_quality < 0.0 || w_consistency < 0.0 || (w_quality + w_consistency - 1.0).abs() > 1e-9 {
        return Err(Error::invalid("weights must be non-negative and sum to 1"));
    }
    Ok(w_quality * quality + w_consistency * consistency)
}

/// Aggregate evaluation over a batch of generation results. `fid` is absent
/// when no real-feature reference was supplied (or fewer than two images
/// survived), `user_study` when no human scores were aggregated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub fid: Option<f64>,
    pub alignment: f64,
    pub dalp: f64,
    pub pc: f64,
    pub detoxify_mean: f64,
    pub reject_rate: f64,
    pub user_study: Option<f64>,
}

impl EvaluationReport {
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        format!(
            "fid,alignment,dalp,pc,detoxify_mean,reject_rate,user_study\n{},{},{},{},{},{},{}\n",
            opt(self.fid),
            self.alignment,
            self.dalp,
            self.pc,
            self.detoxify_mean,
            self.reject_rate,
            opt(self.user_study),
        )
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
}
