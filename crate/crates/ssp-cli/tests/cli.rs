//! End-to-end tests driving the `ssp` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use ssp_core::backends::TextEncoder;
use ssp_core::corpus::{load_corpus, save_corpus, PromptRecord, Source};
use ssp_core::featfile;
use ssp_core::registry::{CameraProfile, Registry, ThemeCategory};

fn ssp(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ssp"))
        .args(args)
        .current_dir(dir)
        .env_remove("SSP_API_KEY")
        .output()
        .expect("failed to spawn ssp")
}

fn assert_success(out: &Output, context: &str) {
    assert!(
        out.status.success(),
        "{context} failed\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn write_registry(path: &Path) -> Registry {
    let mut registry = Registry {
        themes: vec![
            ThemeCategory { label_id: 0, name: "portrait".into() },
            ThemeCategory { label_id: 1, name: "landscape".into() },
        ],
        cameras: vec![
            CameraProfile::from_display_name("sony_a7r_iv", "Sony A7R IV"),
            CameraProfile::from_display_name("nikon_d6", "Nikon D6"),
        ],
        assignment: Default::default(),
    };
    registry.set_assignment(0, "sony_a7r_iv").unwrap();
    registry.set_assignment(1, "nikon_d6").unwrap();
    registry.save(path).unwrap();
    registry
}

/// Labeled corpus: portrait prompts use face/subject words, landscape
/// prompts use terrain words, so the centroid classifier separates them.
fn write_labeled_corpus(path: &Path, with_marker: bool) -> Vec<PromptRecord> {
    let portrait = [
        "studio portrait of a smiling elder face",
        "close portrait of a painter in her studio",
        "portrait photo of a young violinist posing",
        "headshot portrait of a bearded sailor smiling",
        "window light portrait of a dancer resting",
        "formal portrait of a judge in robes",
    ];
    let landscape = [
        "wide landscape of rolling green hills at dawn",
        "mountain landscape with a mirror lake valley",
        "desert landscape of dunes under a red sky",
        "coastal landscape with cliffs and crashing waves",
        "autumn landscape of birch forest and fog",
        "alpine landscape with glaciers and ridgelines",
    ];
    let mut records = Vec::new();
    for (i, text) in portrait.iter().enumerate() {
        let mut r = PromptRecord::new(format!("p{i}"), Source::User, *text);
        r.theme = Some("portrait".into());
        records.push(r);
    }
    for (i, text) in landscape.iter().enumerate() {
        let mut text = text.to_string();
        if with_marker && i == 5 {
            text.push_str(" UNSAFE_MARKER");
        }
        let mut r = PromptRecord::new(format!("l{i}"), Source::User, text);
        r.theme = Some("landscape".into());
        records.push(r);
    }
    save_corpus(&records, path).unwrap();
    records
}

fn write_real_features(path: &Path, seed: u64, dim: usize) {
    let encoder = ssp_core::backends::fake::FakeTextEncoder::new(dim, seed);
    let texts: Vec<String> = (0..6)
        .map(|i| format!("reference photograph number {i} of a person outdoors"))
        .collect();
    let m = encoder.encode_texts(&texts).unwrap();
    featfile::write_matrix(path, &m).unwrap();
}

#[test]
fn stats_reports_dalp() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.jsonl");
    let mut records = write_labeled_corpus(&corpus, false);
    for r in records.iter_mut() {
        r.set_optimized("shot on Sony A7R IV", ", ");
    }
    save_corpus(&records, &corpus).unwrap();

    let report = dir.path().join("stats.json");
    let out = ssp(dir.path(), &["stats", "--corpus", "corpus.jsonl", "--report", "stats.json"]);
    assert_success(&out, "stats");
    let stats: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert!(stats.get("dalp").is_some(), "stats.json must carry dalp: {stats}");
    assert_eq!(stats["dalp"].as_f64().unwrap(), 21.0);
    assert_eq!(stats["count"].as_u64().unwrap(), 12);
}

#[test]
fn api_backend_without_credential_names_the_variable() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c.jsonl");
    let mut records = write_labeled_corpus(&corpus, false);
    for r in records.iter_mut() {
        r.set_optimized("shot on Sony A7R IV", ", ");
    }
    save_corpus(&records, &corpus).unwrap();

    let out = ssp(
        dir.path(),
        &[
            "generate",
            "--corpus",
            "c.jsonl",
            "--backend",
            "api",
            "--seed",
            "7",
            "--results",
            "r.jsonl",
            "--report",
            "rep.json",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("SSP_API_KEY"), "stderr: {stderr}");
}

#[test]
fn unknown_subcommand_exits_one_with_usage() {
    let dir = tempfile::tempdir().unwrap();
    let out = ssp(dir.path(), &["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("Usage") || stderr.contains("usage"), "stderr: {stderr}");

    let out = ssp(dir.path(), &["--version"]);
    assert_eq!(out.status.code(), Some(0));
    let out = ssp(dir.path(), &["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("ssp"));
}

#[test]
fn registry_validate_reports_all_violations() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    write_registry(&good);
    let out = ssp(dir.path(), &["registry", "validate", "--file", "good.json"]);
    assert_success(&out, "registry validate");
    assert!(String::from_utf8_lossy(&out.stdout).contains("\"valid\":true"));

    let bad = dir.path().join("bad.json");
    fs::write(
        &bad,
        r#"{"themes":[{"label_id":0,"name":"a"},{"label_id":2,"name":"b"}],"cameras":[],"assignment":{"9":"ghost"}}"#,
    )
    .unwrap();
    let out = ssp(dir.path(), &["registry", "validate", "--file", "bad.json"]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("validation"), "stderr: {stderr}");
    assert!(stderr.contains("ghost"), "stderr: {stderr}");
    assert!(stderr.contains("missing 1"), "stderr: {stderr}");
}

/// The full fake-backend pipeline: ingest -> train -> select-camera ->
/// optimize -> generate -> evaluate, then byte-identical reruns.
#[test]
fn full_pipeline_produces_complete_report_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();

    // ingest plain user prompts
    let raw = root.join("raw.txt");
    fs::write(&raw, "a portrait of a friendly barista smiling\nwide landscape of a winding river canyon\n").unwrap();
    let out = ssp(
        root,
        &["ingest", "--source", "user", "--in", "raw.txt", "--out", "ingested.jsonl"],
    );
    assert_success(&out, "ingest");
    let ingested = load_corpus(&root.join("ingested.jsonl")).unwrap();
    assert_eq!(ingested.len(), 2);
    assert_eq!(ingested[0].source, Source::User);

    // labeled training corpus + registry + real features
    write_labeled_corpus(&root.join("labeled.jsonl"), false);
    write_registry(&root.join("registry.json"));
    write_real_features(&root.join("real.bin"), 11, 256);

    // config: scripted misalignment for one prompt, seed, workers
    let config = serde_json::json!({
        "seed": 11,
        "worker_count": 2,
        "fake": {
            "misaligned_prompts": ["close portrait of a painter in her studio"],
        }
    });
    fs::write(root.join("config.json"), serde_json::to_string_pretty(&config).unwrap()).unwrap();

    // train (with held-out evaluation)
    let out = ssp(
        root,
        &[
            "train",
            "--corpus",
            "labeled.jsonl",
            "--out",
            "model.json",
            "--registry",
            "registry.json",
            "--split",
            "0.75",
            "--eval-report",
            "train_eval.json",
            "--config",
            "config.json",
        ],
    );
    assert_success(&out, "train");
    let eval: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(root.join("train_eval.json")).unwrap()).unwrap();
    assert!(eval["accuracy"].as_f64().unwrap() >= 0.5);

    // classify one prompt
    let out = ssp(
        root,
        &[
            "classify",
            "--model",
            "model.json",
            "--prompt",
            "portrait of a chef plating a dish",
            "--config",
            "config.json",
        ],
    );
    assert_success(&out, "classify");
    let verdict: serde_json::Value =
        serde_json::from_str(String::from_utf8_lossy(&out.stdout).trim()).unwrap();
    assert_eq!(verdict["theme"], "portrait");

    // camera selection for the portrait theme, writing the assignment back
    let out = ssp(
        root,
        &[
            "select-camera",
            "--theme",
            "portrait",
            "--prompts",
            "labeled.jsonl",
            "--real-features",
            "real.bin",
            "--registry",
            "registry.json",
            "--delta",
            "1000",
            "--out",
            "selection.json",
            "--update-registry",
            "--images-dir",
            "sel-images",
            "--config",
            "config.json",
        ],
    );
    assert_success(&out, "select-camera");
    let selection: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(root.join("selection.json")).unwrap()).unwrap();
    assert_eq!(selection["table"].as_array().unwrap().len(), 2);
    let registry = Registry::load(&root.join("registry.json")).unwrap();
    assert!(registry.assigned_camera(0).is_some());

    // optimize the labeled corpus
    let out = ssp(
        root,
        &[
            "optimize",
            "--corpus",
            "labeled.jsonl",
            "--model",
            "model.json",
            "--registry",
            "registry.json",
            "--out",
            "optimized.jsonl",
            "--config",
            "config.json",
        ],
    );
    assert_success(&out, "optimize");
    let optimized = load_corpus(&root.join("optimized.jsonl")).unwrap();
    for r in &optimized {
        let o = r.optimized_prompt.as_deref().unwrap();
        assert!(o.starts_with(&r.original_prompt));
        assert!(o.contains("shot on"));
    }

    // optimize reruns are byte-identical
    let out = ssp(
        root,
        &[
            "optimize", "--corpus", "labeled.jsonl", "--model", "model.json", "--registry",
            "registry.json", "--out", "optimized-again.jsonl", "--config", "config.json",
        ],
    );
    assert_success(&out, "optimize rerun");
    assert_eq!(
        fs::read(root.join("optimized.jsonl")).unwrap(),
        fs::read(root.join("optimized-again.jsonl")).unwrap(),
        "optimize output not byte-identical"
    );

    // generate + evaluate
    let generate_args = |results: &str, report: &str, images: &str| {
        vec![
            "generate".to_string(),
            "--corpus".into(),
            "optimized.jsonl".into(),
            "--backend".into(),
            "fake".into(),
            "--results".into(),
            results.into(),
            "--report".into(),
            report.into(),
            "--real-features".into(),
            "real.bin".into(),
            "--images-dir".into(),
            images.into(),
            "--config".into(),
            "config.json".into(),
        ]
    };
    let args1 = generate_args("results.jsonl", "report.json", "gen-images");
    let out = ssp(root, &args1.iter().map(String::as_str).collect::<Vec<_>>());
    assert_success(&out, "generate");

    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(root.join("report.json")).unwrap()).unwrap();
    for field in ["fid", "alignment", "dalp", "pc", "detoxify_mean", "reject_rate"] {
        assert!(report.get(field).is_some(), "report missing {field}: {report}");
    }
    assert!(report["fid"].as_f64().is_some(), "fid must be numeric here");
    assert!(report["pc"].as_f64().unwrap() > 0.5);
    assert_eq!(report["reject_rate"].as_f64().unwrap(), 0.0);
    let results = ssp_core::pipeline::load_results(&root.join("results.jsonl")).unwrap();
    assert_eq!(results.len(), 12);
    assert_eq!(results.iter().filter(|r| r.regenerated).count(), 1);

    // rerun with identical inputs into fresh paths: byte-identical outputs
    let args2 = generate_args("results2.jsonl", "report2.json", "gen-images-2");
    let out = ssp(root, &args2.iter().map(String::as_str).collect::<Vec<_>>());
    assert_success(&out, "generate rerun");
    assert_eq!(
        fs::read(root.join("results.jsonl")).unwrap(),
        fs::read(root.join("results2.jsonl")).unwrap(),
        "results.jsonl not byte-identical"
    );
    assert_eq!(
        fs::read(root.join("report.json")).unwrap(),
        fs::read(root.join("report2.json")).unwrap(),
        "report.json not byte-identical"
    );

    // standalone evaluate over the stored results reproduces the report
    let out = ssp(
        root,
        &[
            "evaluate",
            "--results",
            "results.jsonl",
            "--report",
            "report3.json",
            "--real-features",
            "real.bin",
            "--images-dir",
            "gen-images",
            "--config",
            "config.json",
        ],
    );
    assert_success(&out, "evaluate");
    assert_eq!(
        fs::read(root.join("report.json")).unwrap(),
        fs::read(root.join("report3.json")).unwrap(),
        "evaluate disagrees with the generate-time report"
    );

    // feature analysis over original vs optimized corpora
    let out = ssp(
        root,
        &[
            "analyze-features",
            "--corpora",
            "labeled.jsonl",
            "optimized.jsonl",
            "--labels",
            "original",
            "ssp",
            "--out",
            "points.csv",
            "--plot",
            "pca.svg",
            "--config",
            "config.json",
        ],
    );
    assert_success(&out, "analyze-features");
    let csv = fs::read_to_string(root.join("points.csv")).unwrap();
    assert!(csv.starts_with("id,group,pc1,pc2\n"), "csv header: {csv}");
    assert_eq!(csv.lines().count(), 1 + 24);
    let svg = fs::read_to_string(root.join("pca.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("ssp"));
    let stdout: serde_json::Value =
        serde_json::from_str(String::from_utf8_lossy(&out.stdout).trim()).unwrap();
    assert!(stdout["dispersion"]["original"].as_f64().unwrap() >= 0.0);
    assert!(stdout["dispersion"]["ssp"].as_f64().unwrap() >= 0.0);
}

#[test]
fn generate_rejections_show_up_in_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    let corpus = root.join("c.jsonl");
    let mut records = write_labeled_corpus(&corpus, true); // one UNSAFE_MARKER prompt
    for r in records.iter_mut() {
        r.set_optimized("shot on Sony A7R IV", ", ");
    }
    save_corpus(&records, &corpus).unwrap();

    let out = ssp(
        root,
        &[
            "generate",
            "--corpus",
            "c.jsonl",
            "--seed",
            "4",
            "--results",
            "r.jsonl",
            "--report",
            "rep.json",
            "--images-dir",
            "imgs",
        ],
    );
    assert_success(&out, "generate");
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(root.join("rep.json")).unwrap()).unwrap();
    let expected = 1.0 / 12.0;
    assert!((report["reject_rate"].as_f64().unwrap() - expected).abs() < 1e-12);
    assert!(report["fid"].is_null(), "no real features were supplied");

    let results = ssp_core::pipeline::load_results(&root.join("r.jsonl")).unwrap();
    let rejected: Vec<_> = results.iter().filter(|r| r.rejected).collect();
    assert_eq!(rejected.len(), 1);
    assert!(rejected[0].image.uri.is_none());
}

#[test]
fn ingest_recipes_per_source() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();

    // diffusiondb: JSON-array lines summarize to one record per group,
    // plain lines become single-caption groups
    fs::write(
        root.join("ddb.txt"),
        "[\"a red fox\",\"a fox in snow\"]\nan old lighthouse on a cliff\n",
    )
    .unwrap();
    let out = ssp(
        root,
        &["ingest", "--source", "diffusiondb", "--in", "ddb.txt", "--out", "ddb.jsonl"],
    );
    assert_success(&out, "ingest diffusiondb");
    let records = load_corpus(&root.join("ddb.jsonl")).unwrap();
    assert_eq!(records.len(), 2);
    assert_eq!(records[0].original_prompt, "a red fox a fox in snow");
    assert_eq!(records[1].original_prompt, "an old lighthouse on a cliff");
    assert_eq!(records[0].source, Source::Diffusiondb);

    // mscoco: image + caption pairs; the configured caption fixture joins
    // the original caption in the summary
    fs::write(
        root.join("coco.jsonl"),
        r#"{"image_uri":"img/0001.png","caption":"a dog chasing a ball"}"#,
    )
    .unwrap();
    let config = serde_json::json!({
        "fake": { "captions": { "img/0001.png": "a dog runs on grass" } }
    });
    fs::write(root.join("cfg.json"), config.to_string()).unwrap();
    let out = ssp(
        root,
        &[
            "ingest", "--source", "mscoco", "--in", "coco.jsonl", "--out", "coco_corpus.jsonl",
            "--config", "cfg.json",
        ],
    );
    assert_success(&out, "ingest mscoco");
    let records = load_corpus(&root.join("coco_corpus.jsonl")).unwrap();
    assert_eq!(records.len(), 1);
    assert!(records[0].original_prompt.contains("a dog chasing a ball"));
    assert!(records[0].original_prompt.contains("a dog runs on grass"));

    // imagenet: caption per image, deterministic fallback caption
    fs::write(root.join("inet.jsonl"), r#"{"image_uri":"img/0002.png"}"#).unwrap();
    let out = ssp(
        root,
        &["ingest", "--source", "imagenet", "--in", "inet.jsonl", "--out", "inet.jsonl.out"],
    );
    assert_success(&out, "ingest imagenet");
    let records = load_corpus(&root.join("inet.jsonl.out")).unwrap();
    assert_eq!(records.len(), 1);
    assert!(records[0].original_prompt.contains("img/0002.png"));

    // the comprehensibility filter drops too-short prompts
    fs::write(root.join("mixed.txt"), "tiny\na long enough prompt about gardens\n").unwrap();
    let out = ssp(
        root,
        &[
            "ingest", "--source", "user", "--in", "mixed.txt", "--out", "filtered.jsonl",
            "--filter",
        ],
    );
    assert_success(&out, "ingest with filter");
    let records = load_corpus(&root.join("filtered.jsonl")).unwrap();
    assert_eq!(records.len(), 1);
    assert!(records[0].original_prompt.contains("gardens"));
}

#[test]
fn train_without_registry_derives_taxonomy_from_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    write_labeled_corpus(&root.join("labeled.jsonl"), false);
    let out = ssp(
        root,
        &["train", "--corpus", "labeled.jsonl", "--out", "model.json", "--split", "1.0"],
    );
    assert_success(&out, "train without registry");
    let model: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(root.join("model.json")).unwrap()).unwrap();
    assert_eq!(model["kind"], "centroid_baseline");
    assert_eq!(model["themes"].as_array().unwrap().len(), 2);
}

/// The shipped fixtures must keep the README walkthrough runnable.
#[test]
fn readme_quick_start_runs_on_shipped_fixtures() {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    fs::create_dir_all(root.join("fixtures")).unwrap();
    for name in ["registry.json", "labeled.jsonl", "prompts.txt", "real.bin", "real.bin.json"] {
        fs::copy(fixtures.join(name), root.join("fixtures").join(name)).unwrap();
    }

    let steps: Vec<Vec<&str>> = vec![
        vec!["ingest", "--source", "user", "--in", "fixtures/prompts.txt", "--out", "corpus.jsonl"],
        vec!["registry", "validate", "--file", "fixtures/registry.json"],
        vec![
            "train", "--corpus", "fixtures/labeled.jsonl", "--out", "model.json",
            "--registry", "fixtures/registry.json", "--split", "1.0",
        ],
        vec![
            "select-camera", "--theme", "portrait", "--prompts", "fixtures/labeled.jsonl",
            "--real-features", "fixtures/real.bin", "--registry", "fixtures/registry.json",
            "--delta", "1000", "--out", "selection.json", "--update-registry",
            "--images-dir", "images",
        ],
        vec![
            "select-camera", "--theme", "landscape", "--prompts", "fixtures/labeled.jsonl",
            "--real-features", "fixtures/real.bin", "--registry", "fixtures/registry.json",
            "--delta", "1000", "--out", "selection2.json", "--update-registry",
            "--images-dir", "images",
        ],
        vec![
            "select-camera", "--theme", "street", "--prompts", "fixtures/labeled.jsonl",
            "--real-features", "fixtures/real.bin", "--registry", "fixtures/registry.json",
            "--delta", "1000", "--out", "selection3.json", "--update-registry",
            "--images-dir", "images",
        ],
        vec![
            "optimize", "--corpus", "corpus.jsonl", "--model", "model.json",
            "--registry", "fixtures/registry.json", "--out", "optimized.jsonl",
        ],
        vec![
            "generate", "--corpus", "optimized.jsonl", "--backend", "fake", "--seed", "42",
            "--results", "results.jsonl", "--report", "report.json",
            "--real-features", "fixtures/real.bin", "--images-dir", "images",
        ],
        vec![
            "evaluate", "--results", "results.jsonl", "--real-features", "fixtures/real.bin",
            "--report", "report2.json", "--images-dir", "images",
        ],
        vec!["stats", "--corpus", "optimized.jsonl", "--report", "stats.json"],
        vec![
            "analyze-features", "--corpora", "corpus.jsonl", "optimized.jsonl",
            "--labels", "original", "ssp", "--out", "points.csv", "--plot", "pca.svg",
        ],
    ];
    for step in steps {
        let out = ssp(root, &step);
        assert_success(&out, &format!("quick-start step {step:?}"));
    }

    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(root.join("report.json")).unwrap()).unwrap();
    assert!(report["fid"].as_f64().is_some());
    let stats: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(root.join("stats.json")).unwrap()).unwrap();
    assert!(stats["dalp"].as_f64().unwrap() > 0.0);
    let registry = Registry::load(&root.join("fixtures/registry.json")).unwrap();
    assert_eq!(registry.assignment.len(), 3);
}

#[test]
fn user_study_scores_flow_into_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    let corpus = root.join("c.jsonl");
    let mut records = write_labeled_corpus(&corpus, false);
    for r in records.iter_mut() {
        r.set_optimized("shot on Sony A7R IV", ", ");
    }
    save_corpus(&records, &corpus).unwrap();
    let out = ssp(
        root,
        &[
            "generate", "--corpus", "c.jsonl", "--seed", "4", "--results", "r.jsonl",
            "--report", "rep.json", "--images-dir", "imgs",
        ],
    );
    assert_success(&out, "generate");

    fs::write(root.join("study.txt"), "8 6\n9 7\n10 8\n").unwrap();
    let out = ssp(
        root,
        &[
            "evaluate", "--results", "r.jsonl", "--report", "rep2.json", "--images-dir", "imgs",
            "--user-study", "study.txt", "--csv", "rep2.csv",
        ],
    );
    assert_success(&out, "evaluate with user study");
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(root.join("rep2.json")).unwrap()).unwrap();
    assert_eq!(report["user_study"].as_f64().unwrap(), 8.0);
    let csv = fs::read_to_string(root.join("rep2.csv")).unwrap();
    assert!(csv.starts_with("fid,alignment,dalp,pc,detoxify_mean,reject_rate,user_study\n"));
    assert!(csv.contains(",8\n") || csv.ends_with(",8\n"), "csv: {csv}");
}
