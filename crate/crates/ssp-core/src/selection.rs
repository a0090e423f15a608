//! Optimal-camera search: per theme, score every candidate camera by the
//! Fréchet distance of its generations against real images and by the mean
//! alignment with the original prompts, then pick the constrained winner.
//!
//! The selection rule: lowest FID among candidates whose alignment score
//! stays within `delta` of the unaugmented baseline. If nobody passes the
//! constraint, the global FID argmin wins with `constraint_satisfied` unset.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::backends::retry::with_retry;
use crate::backends::Backends;
use crate::corpus::make_optimized;
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::metrics::{alignment_score, fit_gaussian, frechet_distance, GaussianSummary};
use crate::par;
use crate::registry::{CameraProfile, Registry};

pub const BASELINE_ID: &str = "original";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateMetrics {
    pub camera_id: String,
    pub fid: f64,
    pub clip_score: f64,
}

impl CandidateMetrics {
    fn check_finite(&self) -> Result<()> {
        if !self.fid.is_finite() || !self.clip_score.is_finite() {
            return Err(Error::Numerical(format!(
                "candidate {:?} has non-finite metrics",
                self.camera_id
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub theme: u32,
    pub winner: String,
    pub baseline_clip: f64,
    pub constraint_satisfied: bool,
    /// Candidates ranked by (fid asc, clip desc, camera_id asc).
    pub table: Vec<CandidateMetrics>,
    /// Cameras dropped because every generation was rejected (or too few
    /// survived to fit a Gaussian).
    pub excluded: Vec<String>,
}

impl SelectionResult {
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

#[derive(Debug, Clone)]
pub struct CandidateEvaluation {
    pub baseline: CandidateMetrics,
    pub candidates: Vec<CandidateMetrics>,
    pub excluded: Vec<String>,
}

fn rank_key(a: &CandidateMetrics, b: &CandidateMetrics) -> Ordering {
    a.fid
        .partial_cmp(&b.fid)
        .unwrap_or(Ordering::Equal)
        .then(b.clip_score.partial_cmp(&a.clip_score).unwrap_or(Ordering::Equal))
        .then(a.camera_id.cmp(&b.camera_id))
}

/// Pick the winner under the delta-constrained FID argmin rule.
pub fn select_optimal_camera(
    theme: u32,
    baseline: &CandidateMetrics,
    candidates: &[CandidateMetrics],
    excluded: Vec<String>,
    delta: f64,
) -> Result<SelectionResult> {
    if candidates.is_empty() {
        return Err(Error::invalid("no candidates to select from"));
    }
    if delta < 0.0 || delta.is_nan() {
        return Err(Error::invalid("delta must be a non-negative number"));
    }
    baseline.check_finite()?;
    for c in candidates {
        c.check_finite()?;
    }

    let mut table = candidates.to_vec();
    table.sort_by(rank_key);

    let threshold = baseline.clip_score - delta;
    let eligible: Vec<&CandidateMetrics> =
        table.iter().filter(|c| c.clip_score >= threshold).collect();

    let (winner, constraint_satisfied) = match eligible.first() {
        Some(best) => ((*best).clone(), true),
        None => (table[0].clone(), false),
    };

    Ok(SelectionResult {
        theme,
        winner: winner.camera_id,
        baseline_clip: baseline.clip_score,
        constraint_satisfied,
        table,
        excluded,
    })
}

fn score_prompt_set(
    camera_id: &str,
    originals: &[String],
    generation_prompts: &[String],
    real: &GaussianSummary,
    backends: &Backends,
) -> Result<Option<CandidateMetrics>> {
    let images = par::try_map(generation_prompts, |p| {
        with_retry(&backends.retry, || backends.generator.generate_image(p))
    })?;
    let mut feature_rows = Vec::new();
    let mut clip_sum = 0.0;
    for (image, original) in images.iter().zip(originals) {
        if image.rejected {
            continue;
        }
        let features = backends.image_features.extract(image)?;
        clip_sum += alignment_score(backends.text_encoder.as_ref(), original, &features)?;
        feature_rows.push(features);
    }
    if feature_rows.len() < 2 {
        return Ok(None);
    }
    let gen = fit_gaussian(&Mat::from_rows(&feature_rows)?)?;
    Ok(Some(CandidateMetrics {
        camera_id: camera_id.to_string(),
        fid: frechet_distance(&gen, real)?,
        clip_score: clip_sum / feature_rows.len() as f64,
    }))
}

/// Generate images for the unaugmented prompts (the baseline row) and for
/// every camera-augmented variant, scoring each set by FID against the real
/// features and mean alignment against the original prompts.
pub fn evaluate_candidates(
    prompts: &[String],
    cameras: &[CameraProfile],
    real_features: &Mat,
    backends: &Backends,
    separator: &str,
) -> Result<CandidateEvaluation> {
    if prompts.len() < 2 {
        return Err(Error::invalid("candidate evaluation needs at least 2 prompts"));
    }
    if cameras.is_empty() {
        return Err(Error::invalid("no candidate cameras"));
    }
    let real = fit_gaussian(real_features)?;

    let baseline = score_prompt_set(BASELINE_ID, prompts, prompts, &real, backends)?
        .ok_or_else(|| Error::invalid("baseline generation failed: too many rejections"))?;

    let mut candidates = Vec::new();
    let mut excluded = Vec::new();
    for camera in cameras {
        let augmented: Vec<String> = prompts
            .iter()
            .map(|p| make_optimized(p, &camera.description_text, separator))
            .collect();
        match score_prompt_set(&camera.camera_id, prompts, &augmented, &real, backends)? {
            Some(metrics) => candidates.push(metrics),
            None => excluded.push(camera.camera_id.clone()),
        }
    }
    Ok(CandidateEvaluation { baseline, candidates, excluded })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThemeFailure {
    pub theme: u32,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct AssignmentOutcome {
    pub selections: BTreeMap<u32, SelectionResult>,
    pub failures: Vec<ThemeFailure>,
}

impl AssignmentOutcome {
    /// theme label -> winning camera id, for feeding a registry.
    pub fn assignment(&self) -> BTreeMap<u32, String> {
        self.selections
            .iter()
            .map(|(theme, sel)| (*theme, sel.winner.clone()))
            .collect()
    }
}

/// Run evaluate+select for every theme. Failing themes are reported, not
/// fatal, so a batch assignment stays total over the themes that worked.
pub fn assign_all(
    per_theme_prompts: &BTreeMap<u32, Vec<String>>,
    registry: &Registry,
    real_features: &Mat,
    backends: &Backends,
    separator: &str,
    delta: f64,
) -> Result<AssignmentOutcome> {
    let mut selections = BTreeMap::new();
    let mut failures = Vec::new();
    for (&theme, prompts) in per_theme_prompts {
        if registry.theme(theme).is_none() {
            failures.push(ThemeFailure {
                theme,
                message: Error::UnknownLabel(theme).to_string(),
            });
            continue;
        }
        let outcome = evaluate_candidates(prompts, &registry.cameras, real_features, backends, separator)
            .and_then(|eval| {
                select_optimal_camera(theme, &eval.baseline, &eval.candidates, eval.excluded, delta)
            });
        match outcome {
            Ok(sel) => {
                selections.insert(theme, sel);
            }
            Err(e) => failures.push(ThemeFailure { theme, message: e.to_string() }),
        }
    }
    Ok(AssignmentOutcome { selections, failures })
}
