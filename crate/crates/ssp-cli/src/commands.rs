//! Subcommand handlers. Each returns the process exit code on the Ok path;
//! hard failures bubble up as `ssp_core::Error` and exit 1.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use ssp_core::backends::api::ApiBackend;
use ssp_core::backends::{ImageHandle, LlmClient, TokenEncoder};
use ssp_core::classifier::{
    classify_prompt, evaluate_classifier, split_train_test, train_classifier, ClassifierModel,
};
use ssp_core::config::{build_backends, BackendKind, FakeBackendSet, RunConfig};
use ssp_core::corpus::{
    compute_stats, filter_candidates, ingest_source, load_corpus, save_corpus, PromptRecord,
    Source, SourceItems,
};
use ssp_core::error::{Error, Result};
use ssp_core::featfile;
use ssp_core::features::{dispersion_stats, pca_2d, reshape_features, token_features, ReshapeMode};
use ssp_core::metrics::user_study_score;
use ssp_core::pipeline::{
    evaluate_results, load_results, optimize_corpus, run_pipeline, save_results, PipelineConfig,
    PromptSource,
};
use ssp_core::registry::Registry;
use ssp_core::selection::{evaluate_candidates, select_optimal_camera};

use crate::{Command, CommonArgs, RegistryAction};

pub fn run(command: Command) -> Result<u8> {
    match command {
        Command::Ingest { source, input, out, filter, common } => {
            ingest(&source, &input, &out, filter, &common)
        }
        Command::Stats { corpus, report, common } => stats(&corpus, &report, &common),
        Command::Registry { action } => match action {
            RegistryAction::Validate { file } => registry_validate(&file),
        },
        Command::Train { corpus, out, registry, split, eval_report, common } => {
            train(&corpus, &out, registry.as_deref(), split, eval_report.as_deref(), &common)
        }
        Command::Classify { model, prompt, common } => classify(&model, &prompt, &common),
        Command::SelectCamera {
            theme,
            prompts,
            real_features,
            registry,
            delta,
            out,
            update_registry,
            images_dir,
            common,
        } => select_camera(
            &theme,
            &prompts,
            &real_features,
            &registry,
            delta,
            &out,
            update_registry,
            images_dir.as_deref(),
            &common,
        ),
        Command::Optimize { corpus, model, registry, out, common } => {
            optimize(&corpus, &model, &registry, &out, &common)
        }
        Command::Generate {
            corpus,
            backend,
            results,
            report,
            real_features,
            images_dir,
            max_regens,
            common,
        } => generate(
            &corpus,
            backend.as_deref(),
            &results,
            &report,
            real_features.as_deref(),
            images_dir.as_deref(),
            max_regens,
            &common,
        ),
        Command::Evaluate {
            results,
            report,
            real_features,
            images_dir,
            user_study,
            w_quality,
            w_consistency,
            csv,
            common,
        } => evaluate(
            &results,
            &report,
            real_features.as_deref(),
            images_dir.as_deref(),
            user_study.as_deref(),
            w_quality,
            w_consistency,
            csv.as_deref(),
            &common,
        ),
        Command::AnalyzeFeatures { corpora, labels, out, plot, mode, common } => {
            analyze_features(&corpora, &labels, &out, plot.as_deref(), &mode, &common)
        }
    }
}

/// flags > config file > defaults
fn resolve_config(common: &CommonArgs) -> Result<RunConfig> {
    let mut config = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    if let Some(workers) = common.workers {
        config.worker_count = workers;
    }
    if let Some(separator) = &common.separator {
        config.separator = separator.clone();
    }
    config.validate()?;
    Ok(config)
}

fn images_dir(flag: Option<&Path>, config: &RunConfig) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| config.paths.get("images_dir").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("images"))
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn llm_client(config: &RunConfig) -> Result<Arc<dyn LlmClient>> {
    match config.backend {
        BackendKind::Fake => {
            let set = FakeBackendSet::build(config, Path::new("images"));
            Ok(set.llm)
        }
        BackendKind::Api => Ok(Arc::new(ApiBackend::new(config.api.clone())?)),
    }
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    Ok(fs::read_to_string(path)?
        .lines()
        .map(str::trim_end)
        .filter(|l| !l.is_empty())
        .map(String::from)
        .collect())
}

fn parse_source_items(source: Source, path: &Path) -> Result<SourceItems> {
    #[derive(serde::Deserialize)]
    struct ImageLine {
        image_uri: String,
        #[serde(default)]
        caption: Option<String>,
    }

    let lines = read_lines(path)?;
    let handle = |uri: &str| ImageHandle {
        uri: Some(uri.to_string()),
        prompt_id: uri.to_string(),
        rejected: false,
        metadata: BTreeMap::new(),
    };

    match source {
        Source::Mscoco => {
            let mut items = Vec::new();
            for (i, line) in lines.iter().enumerate() {
                let parsed: ImageLine = serde_json::from_str(line).map_err(|e| {
                    Error::CorpusLine { line: i + 1, message: e.to_string() }
                })?;
                let caption = parsed.caption.ok_or(Error::CorpusLine {
                    line: i + 1,
                    message: "mscoco lines need both image_uri and caption".to_string(),
                })?;
                items.push((handle(&parsed.image_uri), caption));
            }
            Ok(SourceItems::Mscoco(items))
        }
        Source::Imagenet => {
            let mut items = Vec::new();
            for (i, line) in lines.iter().enumerate() {
                let parsed: ImageLine = serde_json::from_str(line).map_err(|e| {
                    Error::CorpusLine { line: i + 1, message: e.to_string() }
                })?;
                items.push(handle(&parsed.image_uri));
            }
            Ok(SourceItems::Imagenet(items))
        }
        Source::Diffusiondb => {
            // a line is either a JSON array (one caption group) or a single
            // plain-text caption
            let mut groups = Vec::new();
            for (i, line) in lines.iter().enumerate() {
                if line.starts_with('[') {
                    let group: Vec<String> = serde_json::from_str(line).map_err(|e| {
                        Error::CorpusLine { line: i + 1, message: e.to_string() }
                    })?;
                    groups.push(group);
                } else {
                    groups.push(vec![line.clone()]);
                }
            }
            Ok(SourceItems::Diffusiondb(groups))
        }
        Source::LlmDirect => Ok(SourceItems::LlmDirect(lines)),
        Source::User => Ok(SourceItems::User(lines)),
    }
}

fn ingest(source: &str, input: &Path, out: &Path, filter: bool, common: &CommonArgs) -> Result<u8> {
    let config = resolve_config(common)?;
    let source = Source::from_str(source)?;
    let items = parse_source_items(source, input)?;
    let llm = llm_client(&config)?;

    let outcome = ingest_source(llm.as_ref(), &items);
    let (records, dropped) = if filter {
        filter_candidates(llm.as_ref(), outcome.records)?
    } else {
        (outcome.records, Vec::new())
    };
    save_corpus(&records, out)?;

    println!(
        "{}",
        serde_json::json!({
            "ingested": records.len(),
            "dropped": dropped.len(),
            "failed": outcome.failures.len(),
        })
    );
    if outcome.failures.is_empty() {
        Ok(0)
    } else {
        eprintln!("{}", serde_json::json!({ "failures": outcome.failures }));
        Ok(2)
    }
}

fn stats(corpus: &Path, report: &Path, common: &CommonArgs) -> Result<u8> {
    let config = resolve_config(common)?;
    let records = load_corpus(corpus)?;
    let set = FakeBackendSet::build(&config, Path::new("images"));
    let stats = compute_stats(&records, set.encoder.as_ref())?;
    write_json(report, &serde_json::to_value(&stats)?)?;
    println!("{}", serde_json::to_string(&stats)?);
    Ok(0)
}

fn registry_validate(file: &Path) -> Result<u8> {
    let registry = Registry::load(file)?;
    println!(
        "{}",
        serde_json::json!({
            "valid": true,
            "themes": registry.theme_count(),
            "cameras": registry.cameras.len(),
            "assignments": registry.assignment.len(),
        })
    );
    Ok(0)
}

/// Taxonomy for unlabeled training runs: distinct corpus themes, sorted,
/// labeled 0..K-1.
fn registry_from_corpus(records: &[PromptRecord]) -> Result<Registry> {
    let mut names: Vec<String> = records
        .iter()
        .filter_map(|r| r.theme.clone())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    names.sort();
    if names.is_empty() {
        return Err(Error::invalid(
            "corpus has no theme labels and no --registry was given",
        ));
    }
    Ok(Registry {
        themes: names
            .into_iter()
            .enumerate()
            .map(|(i, name)| ssp_core::registry::ThemeCategory { label_id: i as u32, name })
            .collect(),
        cameras: Vec::new(),
        assignment: BTreeMap::new(),
    })
}

fn train(
    corpus: &Path,
    out: &Path,
    registry: Option<&Path>,
    split: f64,
    eval_report: Option<&Path>,
    common: &CommonArgs,
) -> Result<u8> {
    let config = resolve_config(common)?;
    let records = load_corpus(corpus)?;
    let registry = match registry {
        Some(path) => Registry::load(path)?,
        None => registry_from_corpus(&records)?,
    };
    let set = FakeBackendSet::build(&config, Path::new("images"));

    let (train_set, test_set) = if split >= 1.0 {
        (records.clone(), Vec::new())
    } else {
        split_train_test(&records, split, config.seed)?
    };
    let model = train_classifier(&train_set, &registry, set.encoder.as_ref())?;
    model.save(out)?;

    let mut summary = serde_json::json!({
        "trained": train_set.len(),
        "held_out": test_set.len(),
        "themes": model.label_count(),
    });
    if let Some(report_path) = eval_report {
        if test_set.is_empty() {
            return Err(Error::invalid(
                "--eval-report needs a held-out set; lower --split below 1.0",
            ));
        }
        let report = evaluate_classifier(&model, &registry, set.encoder.as_ref(), &test_set)?;
        write_json(report_path, &serde_json::to_value(&report)?)?;
        summary["accuracy"] = serde_json::json!(report.accuracy);
    }
    println!("{summary}");
    Ok(0)
}

fn classify(model: &Path, prompt: &str, common: &CommonArgs) -> Result<u8> {
    let config = resolve_config(common)?;
    let model = ClassifierModel::load(model)?;
    let set = FakeBackendSet::build(&config, Path::new("images"));
    let label = classify_prompt(&model, set.encoder.as_ref(), prompt)?;
    println!(
        "{}",
        serde_json::json!({
            "label_id": label,
            "theme": model.theme_name(label),
        })
    );
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn select_camera(
    theme: &str,
    prompts: &Path,
    real_features: &Path,
    registry_path: &Path,
    delta: f64,
    out: &Path,
    update_registry: bool,
    images_flag: Option<&Path>,
    common: &CommonArgs,
) -> Result<u8> {
    let config = resolve_config(common)?;
    let mut registry = Registry::load(registry_path)?;
    let theme_entry = registry
        .theme_by_name(theme)
        .ok_or_else(|| Error::invalid(format!("theme {theme:?} is not in the registry")))?;
    let label = theme_entry.label_id;

    let records = load_corpus(prompts)?;
    let labeled: Vec<String> = records
        .iter()
        .filter(|r| r.theme.as_deref() == Some(theme))
        .map(|r| r.original_prompt.clone())
        .collect();
    let prompt_texts: Vec<String> = if labeled.is_empty() {
        records.iter().map(|r| r.original_prompt.clone()).collect()
    } else {
        labeled
    };

    let real = featfile::read_matrix(real_features)?;
    let dir = images_dir(images_flag, &config);
    let backends = build_backends(&config, &dir)?;

    let evaluation = ssp_core::par::install(Some(config.worker_count), || {
        evaluate_candidates(&prompt_texts, &registry.cameras, &real, &backends, &config.separator)
    })?;
    let selection = select_optimal_camera(
        label,
        &evaluation.baseline,
        &evaluation.candidates,
        evaluation.excluded,
        delta,
    )?;
    selection.save(out)?;

    if update_registry {
        registry.set_assignment(label, &selection.winner)?;
        registry.save(registry_path)?;
    }
    println!(
        "{}",
        serde_json::json!({
            "theme": theme,
            "winner": selection.winner,
            "constraint_satisfied": selection.constraint_satisfied,
            "candidates": selection.table.len(),
            "excluded": selection.excluded.len(),
        })
    );
    Ok(0)
}

fn optimize(
    corpus: &Path,
    model: &Path,
    registry: &Path,
    out: &Path,
    common: &CommonArgs,
) -> Result<u8> {
    let config = resolve_config(common)?;
    let records = load_corpus(corpus)?;
    let model = ClassifierModel::load(model)?;
    let registry = Registry::load(registry)?;
    let set = FakeBackendSet::build(&config, Path::new("images"));
    let optimized = optimize_corpus(
        &records,
        &model,
        set.encoder.as_ref(),
        &registry,
        &config.separator,
        config.worker_count,
    )?;
    save_corpus(&optimized, out)?;
    println!("{}", serde_json::json!({ "optimized": optimized.len() }));
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn generate(
    corpus: &Path,
    backend: Option<&str>,
    results_path: &Path,
    report_path: &Path,
    real_features: Option<&Path>,
    images_flag: Option<&Path>,
    max_regens: Option<u32>,
    common: &CommonArgs,
) -> Result<u8> {
    let mut config = resolve_config(common)?;
    if let Some(kind) = backend {
        config.backend = BackendKind::from_str(kind)?;
    }
    if let Some(n) = max_regens {
        config.max_regens = n;
    }
    let records = load_corpus(corpus)?;
    let real = real_features.map(featfile::read_matrix).transpose()?;
    let dir = images_dir(images_flag, &config);
    let backends = build_backends(&config, &dir)?;

    let output = run_pipeline(
        &records,
        PromptSource::Stored,
        &backends,
        &PipelineConfig {
            separator: config.separator.clone(),
            worker_count: config.worker_count,
            max_regens: config.max_regens,
        },
        real.as_ref(),
    )?;
    save_results(&output.results, results_path)?;
    output.report.save(report_path)?;
    println!(
        "{}",
        serde_json::json!({
            "results": output.results.len(),
            "failed": output.failures.len(),
            "reject_rate": output.report.reject_rate,
        })
    );
    if output.failures.is_empty() {
        Ok(0)
    } else {
        eprintln!("{}", serde_json::json!({ "failures": output.failures }));
        Ok(2)
    }
}

fn parse_user_study(path: &Path, w_quality: f64, w_consistency: f64) -> Result<f64> {
    let lines = read_lines(path)?;
    if lines.is_empty() {
        return Err(Error::invalid("user study file is empty"));
    }
    let mut total = 0.0;
    for (i, line) in lines.iter().enumerate() {
        let mut parts = line.split_whitespace();
        let parse = |v: Option<&str>| -> Result<f64> {
            v.and_then(|s| s.parse().ok()).ok_or_else(|| Error::CorpusLine {
                line: i + 1,
                message: "expected two numbers: quality consistency".to_string(),
            })
        };
        let quality = parse(parts.next())?;
        let consistency = parse(parts.next())?;
        total += user_study_score(quality, consistency, w_quality, w_consistency)?;
    }
    Ok(total / lines.len() as f64)
}

#[allow(clippy::too_many_arguments)]
fn evaluate(
    results_path: &Path,
    report_path: &Path,
    real_features: Option<&Path>,
    images_flag: Option<&Path>,
    user_study: Option<&Path>,
    w_quality: f64,
    w_consistency: f64,
    csv: Option<&Path>,
    common: &CommonArgs,
) -> Result<u8> {
    let config = resolve_config(common)?;
    let results = load_results(results_path)?;
    let real = real_features.map(featfile::read_matrix).transpose()?;
    let dir = images_dir(images_flag, &config);
    let backends = build_backends(&config, &dir)?;
    let study = user_study
        .map(|p| parse_user_study(p, w_quality, w_consistency))
        .transpose()?;

    let report = ssp_core::par::install(Some(config.worker_count), || {
        evaluate_results(&results, &backends, real.as_ref(), study)
    })?;
    report.save(report_path)?;
    if let Some(csv_path) = csv {
        if let Some(dir) = csv_path.parent() {
            fs::create_dir_all(dir)?;
        }
        fs::write(csv_path, report.to_csv())?;
    }
    println!("{}", serde_json::to_string(&report)?);
    Ok(0)
}

fn analyze_features(
    corpora: &[PathBuf],
    labels: &[String],
    out: &Path,
    plot: Option<&Path>,
    mode: &str,
    common: &CommonArgs,
) -> Result<u8> {
    let config = resolve_config(common)?;
    if corpora.len() != labels.len() {
        return Err(Error::invalid(format!(
            "{} corpora but {} labels; counts must match",
            corpora.len(),
            labels.len()
        )));
    }
    let mode = ReshapeMode::from_str(mode)?;
    let set = FakeBackendSet::build(&config, Path::new("images"));

    let mut ids = Vec::new();
    let mut groups = Vec::new();
    let mut texts = Vec::new();
    for (path, label) in corpora.iter().zip(labels) {
        for record in load_corpus(path)? {
            // optimized corpora contribute their optimized text, raw
            // corpora their original text
            let text = record
                .optimized_prompt
                .clone()
                .unwrap_or_else(|| record.original_prompt.clone());
            ids.push(record.id);
            groups.push(label.clone());
            texts.push(text);
        }
    }

    let tensor = token_features(set.encoder.as_ref() as &dyn TokenEncoder, &texts)?;
    let rf = reshape_features(&tensor, mode)?;
    let points = pca_2d(&rf, &groups)?;

    let mut csv = String::from("id,group,pc1,pc2\n");
    for (i, id) in ids.iter().enumerate() {
        csv.push_str(&format!(
            "{id},{},{},{}\n",
            groups[i],
            points.coordinates.get(i, 0),
            points.coordinates.get(i, 1)
        ));
    }
    if let Some(dir) = out.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(out, csv)?;

    if let Some(plot_path) = plot {
        let svg = crate::svg::scatter(&points);
        if let Some(dir) = plot_path.parent() {
            fs::create_dir_all(dir)?;
        }
        fs::write(plot_path, svg)?;
    }

    let dispersion = dispersion_stats(&points)?;
    println!(
        "{}",
        serde_json::json!({
            "points": ids.len(),
            "explained_variance": points.explained_variance,
            "dispersion": dispersion,
        })
    );
    Ok(0)
}
