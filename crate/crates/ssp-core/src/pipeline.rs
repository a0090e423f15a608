//! The end-to-end optimization loop: classify the original prompt, append
//! the theme's camera description, generate, query alignment, and
//! conditionally regenerate once.
//!
//! Prompts are independent work items. The batch runner fans them out over
//! the worker pool and restores corpus order afterwards, so outputs are
//! byte-stable regardless of scheduling.

use std::collections::BTreeSet;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::backends::retry::with_retry;
use crate::backends::{Backends, ImageHandle, TextEncoder};
use crate::classifier::{classify_prompt, ClassifierModel};
use crate::corpus::{make_optimized, PromptRecord};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::metrics::{self, EvaluationReport};
use crate::par;
use crate::registry::Registry;

/// Outcome of one prompt's trip through the generation loop.
///
/// Invariants: `regenerated` implies the initial image failed the alignment
/// check; `rejected` handles carry no uri; `optimized_prompt` extends
/// `original_prompt` verbatim.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationResult {
    pub prompt_id: String,
    pub original_prompt: String,
    pub optimized_prompt: String,
    pub image: ImageHandle,
    pub aligned_initial: bool,
    pub regenerated: bool,
    pub rejected: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PromptFailure {
    pub prompt_id: String,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub results: Vec<GenerationResult>,
    pub failures: Vec<PromptFailure>,
    pub report: EvaluationReport,
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub separator: String,
    /// Bounded parallelism for the batch; 1 = sequential.
    pub worker_count: usize,
    /// 0 disables regeneration. Values above 1 behave as 1: alignment is
    /// never re-queried, so further blind regenerations carry no signal.
    pub max_regens: u32,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            separator: ", ".to_string(),
            worker_count: 1,
            max_regens: 1,
        }
    }
}

/// Where each record's optimized prompt comes from.
pub enum PromptSource<'a> {
    /// Classify the original prompt and append the assigned camera text.
    Classify {
        model: &'a ClassifierModel,
        registry: &'a Registry,
    },
    /// Use the `optimized_prompt` already stored on the record.
    Stored,
}

/// Build the optimized prompt: original + separator + camera description of
/// the classified theme. The original text is never edited.
pub fn optimize_prompt(
    prompt: &str,
    model: &ClassifierModel,
    encoder: &dyn TextEncoder,
    registry: &Registry,
    separator: &str,
) -> Result<String> {
    if prompt.is_empty() {
        return Err(Error::invalid("prompt must be non-empty"));
    }
    let label = classify_prompt(model, encoder, prompt)?;
    let description = registry.label_to_text(label)?;
    Ok(make_optimized(prompt, description, separator))
}

/// Optimize every record: fills `theme`, `camera_id` and `optimized_prompt`.
pub fn optimize_corpus(
    records: &[PromptRecord],
    model: &ClassifierModel,
    encoder: &dyn TextEncoder,
    registry: &Registry,
    separator: &str,
    worker_count: usize,
) -> Result<Vec<PromptRecord>> {
    let separator_owned = separator.to_string();
    par::install(Some(worker_count), || {
        par::try_map(records, |record| {
            let label = classify_prompt(model, encoder, &record.original_prompt)
                .map_err(|e| Error::invalid(format!("record {:?}: {e}", record.id)))?;
            let description = registry
                .label_to_text(label)
                .map_err(|e| Error::invalid(format!("record {:?}: {e}", record.id)))?;
            let mut out = record.clone();
            out.theme = registry.theme(label).map(|t| t.name.clone());
            out.camera_id = registry.assignment.get(&label).cloned();
            out.optimized_prompt = Some(make_optimized(
                &record.original_prompt,
                description,
                &separator_owned,
            ));
            Ok(out)
        })
    })
}

/// One prompt through generate -> alignment query -> conditional single
/// regeneration. Safety refusals skip the alignment query entirely.
pub fn generate_with_alignment(
    prompt_id: &str,
    original: &str,
    optimized: &str,
    backends: &Backends,
    max_regens: u32,
) -> Result<GenerationResult> {
    let image = with_retry(&backends.retry, || backends.generator.generate_image(optimized))?;
    if image.rejected {
        return Ok(GenerationResult {
            prompt_id: prompt_id.to_string(),
            original_prompt: original.to_string(),
            optimized_prompt: optimized.to_string(),
            image,
            aligned_initial: false,
            regenerated: false,
            rejected: true,
        });
    }
    let aligned = with_retry(&backends.retry, || backends.oracle.is_aligned(&image, original))?;
    let (image, regenerated) = if aligned || max_regens == 0 {
        (image, false)
    } else {
        let regen = with_retry(&backends.retry, || {
            backends.generator.regenerate_image(&image, optimized)
        })?;
        (regen, true)
    };
    let rejected = image.rejected;
    Ok(GenerationResult {
        prompt_id: prompt_id.to_string(),
        original_prompt: original.to_string(),
        optimized_prompt: optimized.to_string(),
        image,
        aligned_initial: aligned,
        regenerated,
        rejected,
    })
}

/// Run the full loop over a corpus. Results come back in corpus order;
/// per-prompt hard failures are collected, not fatal.
pub fn run_pipeline(
    records: &[PromptRecord],
    source: PromptSource<'_>,
    backends: &Backends,
    config: &PipelineConfig,
    real_features: Option<&Mat>,
) -> Result<PipelineOutput> {
    if records.is_empty() {
        return Err(Error::invalid("corpus is empty"));
    }
    {
        let mut seen = BTreeSet::new();
        for r in records {
            if !seen.insert(&r.id) {
                return Err(Error::invalid(format!("duplicate record id {:?}", r.id)));
            }
        }
    }

    let outcomes: Vec<std::result::Result<GenerationResult, PromptFailure>> =
        par::install(Some(config.worker_count.max(1)), || {
            par::map(records, |record| {
                let optimized = match &source {
                    PromptSource::Classify { model, registry } => optimize_prompt(
                        &record.original_prompt,
                        model,
                        backends.text_encoder.as_ref(),
                        registry,
                        &config.separator,
                    ),
                    PromptSource::Stored => record.optimized_prompt.clone().ok_or_else(|| {
                        Error::MissingField { id: record.id.clone(), field: "optimized_prompt" }
                    }),
                };
                let optimized = match optimized {
                    Ok(o) => o,
                    Err(e) => {
                        return Err(PromptFailure {
                            prompt_id: record.id.clone(),
                            message: e.to_string(),
                        })
                    }
                };
                generate_with_alignment(
                    &record.id,
                    &record.original_prompt,
                    &optimized,
                    backends,
                    config.max_regens,
                )
                .map_err(|e| PromptFailure { prompt_id: record.id.clone(), message: e.to_string() })
            })
        });

    let mut results = Vec::new();
    let mut failures = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(r) => results.push(r),
            Err(f) => failures.push(f),
        }
    }
    if results.is_empty() {
        return Err(Error::invalid(format!(
            "every prompt failed; first failure: {}",
            failures.first().map(|f| f.message.as_str()).unwrap_or("?")
        )));
    }
    let report = evaluate_results(&results, backends, real_features, None)?;
    Ok(PipelineOutput { results, failures, report })
}

/// Aggregate a result batch into an evaluation report.
///
/// Alignment is scored against the original prompt (the human intent);
/// toxicity against the optimized prompt (what actually went to the
/// generator). FID needs a real-feature reference and at least two
/// surviving images, otherwise it is reported as absent.
pub fn evaluate_results(
    results: &[GenerationResult],
    backends: &Backends,
    real_features: Option<&Mat>,
    user_study: Option<f64>,
) -> Result<EvaluationReport> {
    if results.is_empty() {
        return Err(Error::invalid("no results to evaluate"));
    }
    let reject_rate = metrics::reject_rate(results)?;

    let generated: Vec<&GenerationResult> = results.iter().filter(|r| !r.rejected).collect();
    let mut alignment_sum = 0.0;
    let mut feature_rows: Vec<Vec<f64>> = Vec::with_capacity(generated.len());
    for r in &generated {
        let features = backends.image_features.extract(&r.image)?;
        alignment_sum += metrics::alignment_score(
            backends.text_encoder.as_ref(),
            &r.original_prompt,
            &features,
        )?;
        feature_rows.push(features);
    }
    let alignment = if generated.is_empty() {
        0.0
    } else {
        alignment_sum / generated.len() as f64
    };

    let fid = match (real_features, feature_rows.len() >= 2) {
        (Some(real), true) => {
            let gen_mat = Mat::from_rows(&feature_rows)?;
            let g_gen = metrics::fit_gaussian(&gen_mat)?;
            let g_real = metrics::fit_gaussian(real)?;
            Some(metrics::frechet_distance(&g_gen, &g_real)?)
        }
        _ => None,
    };

    let n = results.len() as f64;
    let allp = results
        .iter()
        .map(|r| r.original_prompt.chars().count() as f64)
        .sum::<f64>()
        / n;
    let alhp = results
        .iter()
        .map(|r| r.optimized_prompt.chars().count() as f64)
        .sum::<f64>()
        / n;
    let pc_values = par::try_map(results, |r| {
        metrics::prompt_consistency(
            backends.text_encoder.as_ref(),
            &r.original_prompt,
            &r.optimized_prompt,
        )
    })?;
    let pc = pc_values.iter().sum::<f64>() / n;

    let toxicity = par::try_map(results, |r| backends.toxicity.score_toxicity(&r.optimized_prompt))?;
    let detoxify_mean = metrics::detoxify_mean(&toxicity)?;

    Ok(EvaluationReport {
        fid,
        alignment,
        dalp: alhp - allp,
        pc,
        detoxify_mean,
        reject_rate,
        user_study,
    })
}

/// Write results as JSONL, one per line, in batch order.
pub fn save_results(results: &[GenerationResult], path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut out = BufWriter::new(fs::File::create(path)?);
    for r in results {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn load_results(path: &Path) -> Result<Vec<GenerationResult>> {
    let content = fs::read_to_string(path)?;
    let mut results = Vec::new();
    for (i, line) in content.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let r: GenerationResult = serde_json::from_str(line).map_err(|e| Error::CorpusLine {
            line: i + 1,
            message: e.to_string(),
        })?;
        results.push(r);
    }
    Ok(results)
}
