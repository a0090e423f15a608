//! Prompt corpus: ingestion from caption sources, comprehensibility
//! filtering, JSONL persistence, and corpus statistics.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::backends::retry::{with_retry, RetryPolicy};
use crate::backends::{ImageHandle, LlmClient, TextEncoder};
use crate::error::{Error, Result};
use crate::metrics;
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Mscoco,
    Imagenet,
    Diffusiondb,
    LlmDirect,
    User,
}

impl Source {
    pub fn as_str(&self) -> &'static str {
        match self {
            Source::Mscoco => "mscoco",
            Source::Imagenet => "imagenet",
            Source::Diffusiondb => "diffusiondb",
            Source::LlmDirect => "llm_direct",
            Source::User => "user",
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Source {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mscoco" => Ok(Source::Mscoco),
            "imagenet" => Ok(Source::Imagenet),
            "diffusiondb" => Ok(Source::Diffusiondb),
            "llm_direct" => Ok(Source::LlmDirect),
            "user" => Ok(Source::User),
            other => Err(Error::invalid(format!(
                "unknown source {other:?}; expected mscoco|imagenet|diffusiondb|llm_direct|user"
            ))),
        }
    }
}

/// One prompt with provenance and (once assigned) theme, camera and the
/// optimized text. The optimization is append-only: `optimized_prompt`
/// always starts with `original_prompt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptRecord {
    pub id: String,
    pub source: Source,
    pub original_prompt: String,
    #[serde(default)]
    pub theme: Option<String>,
    #[serde(default)]
    pub camera_id: Option<String>,
    #[serde(default)]
    pub optimized_prompt: Option<String>,
}

impl PromptRecord {
    pub fn new(id: impl Into<String>, source: Source, original_prompt: impl Into<String>) -> Self {
        PromptRecord {
            id: id.into(),
            source,
            original_prompt: original_prompt.into(),
            theme: None,
            camera_id: None,
            optimized_prompt: None,
        }
    }

    /// Append-only construction of the optimized prompt.
    pub fn set_optimized(&mut self, description: &str, separator: &str) {
        self.optimized_prompt = Some(make_optimized(&self.original_prompt, description, separator));
    }

    /// Checks the append-only invariant. `optimized == original` is allowed
    /// as the degenerate no-op optimization.
    pub fn check_optimized(&self, separator: &str) -> Result<()> {
        match &self.optimized_prompt {
            None => Ok(()),
            Some(o) if o == &self.original_prompt => Ok(()),
            Some(o) => {
                let prefix = format!("{}{}", self.original_prompt, separator);
                if o.starts_with(&prefix) {
                    Ok(())
                } else {
                    Err(Error::invalid(format!(
                        "record {:?}: optimized_prompt does not extend original_prompt with separator {separator:?}",
                        self.id
                    )))
                }
            }
        }
    }
}

pub fn make_optimized(original: &str, description: &str, separator: &str) -> String {
    format!("{original}{separator}{description}")
}

/// Table-1 shaped corpus statistics. Lengths are character counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub count: usize,
    pub allp: f64,
    pub alhp: f64,
    pub dalp: f64,
    pub pc: f64,
}

/// Inputs for one ingestion run, shaped per source recipe:
/// mscoco pairs an image with its original caption, imagenet is images only,
/// diffusiondb groups captions that get summarized into one prompt each,
/// llm_direct carries generation instructions and user is a passthrough.
#[derive(Debug, Clone)]
pub enum SourceItems {
    Mscoco(Vec<(ImageHandle, String)>),
    Imagenet(Vec<ImageHandle>),
    Diffusiondb(Vec<Vec<String>>),
    LlmDirect(Vec<String>),
    User(Vec<String>),
}

impl SourceItems {
    pub fn source(&self) -> Source {
        match self {
            SourceItems::Mscoco(_) => Source::Mscoco,
            SourceItems::Imagenet(_) => Source::Imagenet,
            SourceItems::Diffusiondb(_) => Source::Diffusiondb,
            SourceItems::LlmDirect(_) => Source::LlmDirect,
            SourceItems::User(_) => Source::User,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            SourceItems::Mscoco(v) => v.len(),
            SourceItems::Imagenet(v) => v.len(),
            SourceItems::Diffusiondb(v) => v.len(),
            SourceItems::LlmDirect(v) => v.len(),
            SourceItems::User(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IngestFailure {
    pub index: usize,
    pub message: String,
}

/// Partial results plus an error report listing failed items.
#[derive(Debug, Clone, Default)]
pub struct IngestOutcome {
    pub records: Vec<PromptRecord>,
    pub failures: Vec<IngestFailure>,
}

fn ingest_one(
    llm: &dyn LlmClient,
    items: &SourceItems,
    index: usize,
    retry: &RetryPolicy,
) -> Result<String> {
    match items {
        SourceItems::Mscoco(pairs) => {
            let (image, original_caption) = &pairs[index];
            let generated = with_retry(retry, || llm.caption(image))?;
            with_retry(retry, || llm.summarize(&[original_caption.clone(), generated.clone()]))
        }
        SourceItems::Imagenet(images) => with_retry(retry, || llm.caption(&images[index])),
        SourceItems::Diffusiondb(groups) => with_retry(retry, || llm.summarize(&groups[index])),
        SourceItems::LlmDirect(instructions) => {
            with_retry(retry, || llm.complete(&instructions[index]))
        }
        SourceItems::User(prompts) => {
            if prompts[index].is_empty() {
                Err(Error::invalid("user prompt must be non-empty"))
            } else {
                Ok(prompts[index].clone())
            }
        }
    }
}

/// Produce one `PromptRecord` per item, collecting per-item failures instead
/// of aborting the batch. Record ids are deterministic
/// (`<source>-<item index>`). Transient backend failures are retried with
/// the given policy before an item is reported as failed.
pub fn ingest_source_with_retry(
    llm: &dyn LlmClient,
    items: &SourceItems,
    retry: &RetryPolicy,
) -> IngestOutcome {
    let source = items.source();
    let mut outcome = IngestOutcome::default();
    for index in 0..items.len() {
        match ingest_one(llm, items, index, retry) {
            Ok(text) if text.is_empty() => outcome.failures.push(IngestFailure {
                index,
                message: "backend produced an empty prompt".to_string(),
            }),
            Ok(text) => outcome.records.push(PromptRecord::new(
                format!("{source}-{index:06}"),
                source,
                text,
            )),
            Err(e) => outcome.failures.push(IngestFailure { index, message: e.to_string() }),
        }
    }
    outcome
}

/// [`ingest_source_with_retry`] with the default backoff policy.
pub fn ingest_source(llm: &dyn LlmClient, items: &SourceItems) -> IngestOutcome {
    ingest_source_with_retry(llm, items, &RetryPolicy::default())
}

/// Split records into (kept, dropped) by the comprehensibility check.
/// kept and dropped partition the input.
pub fn filter_candidates(
    llm: &dyn LlmClient,
    records: Vec<PromptRecord>,
) -> Result<(Vec<PromptRecord>, Vec<PromptRecord>)> {
    let retry = RetryPolicy::default();
    let verdicts = par::try_map(&records, |r| {
        with_retry(&retry, || llm.comprehensible(&r.original_prompt))
    })?;
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for (record, keep) in records.into_iter().zip(verdicts) {
        if keep {
            kept.push(record);
        } else {
            dropped.push(record);
        }
    }
    Ok((kept, dropped))
}

/// Character-length means and mean per-record prompt consistency. Every
/// record must carry an optimized prompt.
pub fn compute_stats(records: &[PromptRecord], encoder: &dyn TextEncoder) -> Result<CorpusStats> {
    if records.is_empty() {
        return Err(Error::invalid("cannot compute stats for an empty corpus"));
    }
    for r in records {
        if r.optimized_prompt.is_none() {
            return Err(Error::MissingField { id: r.id.clone(), field: "optimized_prompt" });
        }
    }
    let per_record: Vec<(f64, f64, f64)> = par::try_map(records, |r| {
        let optimized = r.optimized_prompt.as_ref().expect("checked above");
        let pc = metrics::prompt_consistency(encoder, &r.original_prompt, optimized)?;
        Ok((
            r.original_prompt.chars().count() as f64,
            optimized.chars().count() as f64,
            pc,
        ))
    })?;
    let n = per_record.len() as f64;
    let allp = per_record.iter().map(|x| x.0).sum::<f64>() / n;
    let alhp = per_record.iter().map(|x| x.1).sum::<f64>() / n;
    let pc = per_record.iter().map(|x| x.2).sum::<f64>() / n;
    Ok(CorpusStats {
        count: records.len(),
        allp,
        alhp,
        dalp: alhp - allp,
        pc,
    })
}

/// Write a corpus as JSONL, one record per line. Fails on duplicate ids.
pub fn save_corpus(records: &[PromptRecord], path: &Path) -> Result<()> {
    let mut seen = BTreeSet::new();
    for (i, r) in records.iter().enumerate() {
        if !seen.insert(&r.id) {
            return Err(Error::DuplicateId { id: r.id.clone(), line: i + 1 });
        }
        if r.original_prompt.is_empty() {
            return Err(Error::invalid(format!("record {:?} has an empty original_prompt", r.id)));
        }
    }
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut out = BufWriter::new(fs::File::create(path)?);
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Load a JSONL corpus. Errors carry the 1-based line number.
pub fn load_corpus(path: &Path) -> Result<Vec<PromptRecord>> {
    let content = fs::read_to_string(path)?;
    let mut records = Vec::new();
    let mut seen = BTreeSet::new();
    for (i, line) in content.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let record: PromptRecord = serde_json::from_str(line).map_err(|e| Error::CorpusLine {
            line: line_no,
            message: e.to_string(),
        })?;
        if record.original_prompt.is_empty() {
            return Err(Error::CorpusLine {
                line: line_no,
                message: "original_prompt is empty".to_string(),
            });
        }
        if !seen.insert(record.id.clone()) {
            return Err(Error::DuplicateId { id: record.id, line: line_no });
        }
        records.push(record);
    }
    Ok(records)
}
