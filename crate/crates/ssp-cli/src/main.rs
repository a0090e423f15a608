//! `ssp` — batch CLI for the prompt optimization and evaluation pipeline.
//!
//! Exit codes: 0 success, 1 validation/usage error, 2 partial pipeline
//! failure. Errors go to stderr as one JSON object per failure.

mod commands;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use ssp_core::Error;

#[derive(Parser)]
#[command(name = "ssp", version, about = "Theme-aware camera-description prompt optimization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand. Precedence: flags > config file >
/// built-in defaults.
#[derive(Args, Debug, Clone, Default)]
struct CommonArgs {
    /// JSON run-config file
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Seed driving all randomness (shuffles, splits, fake backends)
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker pool size for batch stages
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Separator inserted between the original prompt and the camera text
    #[arg(long, global = true)]
    separator: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Ingest caption sources into a prompt corpus
    Ingest {
        /// mscoco | imagenet | diffusiondb | llm_direct | user
        #[arg(long)]
        source: String,
        /// Input file (JSONL or plain lines, per source)
        #[arg(long = "in")]
        input: PathBuf,
        /// Output corpus JSONL
        #[arg(long)]
        out: PathBuf,
        /// Drop prompts that fail the comprehensibility filter
        #[arg(long)]
        filter: bool,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Compute corpus statistics (lengths, prompt consistency)
    Stats {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        report: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Registry maintenance
    Registry {
        #[command(subcommand)]
        action: RegistryAction,
    },
    /// Train the theme classifier
    Train {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Theme registry; omitted = derive taxonomy from corpus labels
        #[arg(long)]
        registry: Option<PathBuf>,
        /// Training fraction; 1.0 trains on everything
        #[arg(long, default_value_t = 0.8)]
        split: f64,
        /// Write held-out accuracy/confusion JSON here
        #[arg(long)]
        eval_report: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Classify one prompt
    Classify {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        prompt: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Evaluate candidate cameras for a theme and pick the winner
    SelectCamera {
        #[arg(long)]
        theme: String,
        #[arg(long)]
        prompts: PathBuf,
        #[arg(long)]
        real_features: PathBuf,
        #[arg(long)]
        registry: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
        #[arg(long)]
        out: PathBuf,
        /// Write the winning assignment back into the registry file
        #[arg(long)]
        update_registry: bool,
        #[arg(long)]
        images_dir: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Append the optimal camera description to every prompt
    Optimize {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        registry: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run generation with the alignment/regenerate loop over a corpus
    Generate {
        #[arg(long)]
        corpus: PathBuf,
        /// fake | api
        #[arg(long)]
        backend: Option<String>,
        #[arg(long)]
        results: PathBuf,
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        real_features: Option<PathBuf>,
        #[arg(long)]
        images_dir: Option<PathBuf>,
        #[arg(long)]
        max_regens: Option<u32>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Aggregate an existing results file into an evaluation report
    Evaluate {
        #[arg(long)]
        results: PathBuf,
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        real_features: Option<PathBuf>,
        #[arg(long)]
        images_dir: Option<PathBuf>,
        /// Optional user-study scores file: one "quality consistency" pair
        /// per line, both in [0, 10]
        #[arg(long)]
        user_study: Option<PathBuf>,
        #[arg(long, default_value_t = 0.5)]
        w_quality: f64,
        #[arg(long, default_value_t = 0.5)]
        w_consistency: f64,
        /// Also write the report as CSV here
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Project prompt text features to 2-D and emit a scatter plot
    AnalyzeFeatures {
        /// Corpus files, one group each
        #[arg(long, num_args = 1.., required = true)]
        corpora: Vec<PathBuf>,
        /// Group labels, same count and order as --corpora
        #[arg(long, num_args = 1.., required = true)]
        labels: Vec<String>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        plot: Option<PathBuf>,
        /// flatten | adjacent-product
        #[arg(long, default_value = "flatten")]
        mode: String,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Subcommand)]
enum RegistryAction {
    /// Validate a registry file, reporting every violation
    Validate {
        #[arg(long)]
        file: PathBuf,
    },
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::InvalidInput(_) => "invalid_input",
        Error::Transport(_) => "transport",
        Error::Validation(_) => "validation",
        Error::CorpusLine { .. } => "corpus_line",
        Error::DuplicateId { .. } => "duplicate_id",
        Error::MissingField { .. } => "missing_field",
        Error::UnknownLabel(_) => "unknown_label",
        Error::UnassignedTheme(_) => "unassigned_theme",
        Error::Numerical(_) => "numerical",
        Error::Io(_) => "io",
        Error::Json(_) => "json",
    }
}

fn emit_error(e: &Error) {
    let details = match e {
        Error::Validation(errors) => serde_json::json!(errors),
        _ => serde_json::Value::Null,
    };
    let payload = serde_json::json!({
        "error": e.to_string(),
        "kind": error_kind(e),
        "details": details,
    });
    eprintln!("{payload}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are successes; anything else is usage text + 1
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    ExitCode::SUCCESS
                }
                _ => {
                    eprint!("{e}");
                    ExitCode::from(1)
                }
            };
        }
    };

    match commands::run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            emit_error(&e);
            ExitCode::from(1)
        }
    }
}
