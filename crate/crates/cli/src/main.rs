use std::path::PathBuf;
use std::process::ExitCode;

use argec_core::annotate::Granularity;
use argec_core::eval::report::Format;
use clap::{Args, Parser, Subcommand};

mod commands;

const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (data format v1, model format v1)");

#[derive(Parser, Debug)]
#[command(name = "argec", version = VERSION, about = "Arabic GEC corpus toolkit")]
struct Cli {
    /// key = value file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (0 picks automatically). Output order never changes.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Align parallel sentences and write one op per line.
    Align {
        #[arg(long)]
        src: PathBuf,
        #[arg(long)]
        tgt: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the non-keep ops as M² edits.
        #[arg(long)]
        m2: Option<PathBuf>,
    },
    /// Align and type edits, writing annotated M².
    Annotate {
        #[arg(long)]
        src: PathBuf,
        #[arg(long)]
        tgt: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// External tags: one line per pair, one combination per non-keep op.
        #[arg(long)]
        tags: Option<PathBuf>,
        /// Write the assigned tag combinations, one line per pair.
        #[arg(long)]
        tags_out: Option<PathBuf>,
        /// Write detection labels as token/label TSV.
        #[arg(long)]
        ged: Option<PathBuf>,
        #[arg(long, value_parser = parse_granularity)]
        granularity: Option<Granularity>,
        #[arg(long)]
        threshold: Option<usize>,
    },
    /// Produce detection labels from annotated M², or coarsen existing labels.
    Project {
        #[command(flatten)]
        input: LabelInput,
        /// Annotated M² whose tag counts decide the modeled combinations.
        #[arg(long)]
        train: Option<PathBuf>,
        #[arg(long)]
        annotator: Option<u32>,
        #[arg(long, value_parser = parse_granularity)]
        granularity: Option<Granularity>,
        #[arg(long)]
        threshold: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply detected merges and deletions to source sentences.
    Preprocess {
        #[arg(long)]
        src: PathBuf,
        #[arg(long)]
        ged: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train the bigram MLE corrector.
    MleTrain {
        #[command(flatten)]
        corpus: CorpusInput,
        /// Label granularity used as context, or "none".
        #[arg(long, default_value = "none", value_parser = parse_tags)]
        tags: TagContext,
        #[arg(long)]
        threshold: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Correct sentences with a trained MLE model.
    MleApply {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        input: PathBuf,
        /// Detection labels for the input, token/label TSV.
        #[arg(long)]
        ged: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score corrections against M² gold edits.
    M2Score {
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        hyp: PathBuf,
        /// Source sentences, checked against the gold S-lines.
        #[arg(long)]
        src: Option<PathBuf>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        max_unchanged: Option<usize>,
        /// Per-sentence budget; 0 times out every sentence, "none" disables.
        #[arg(long)]
        timeout_secs: Option<String>,
        #[arg(long, default_value = "table", value_parser = parse_format)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score detection labels.
    GedScore {
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        pred: PathBuf,
        /// Project both files to this granularity before scoring.
        #[arg(long, value_parser = parse_granularity)]
        granularity: Option<Granularity>,
        #[arg(long, default_value = "table", value_parser = parse_format)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Error-type distribution as TSV.
    Stats {
        #[command(flatten)]
        corpus: CorpusInput,
        #[arg(long, value_parser = parse_granularity)]
        granularity: Option<Granularity>,
        /// Also write ranked tag-combination counts.
        #[arg(long)]
        frequencies: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Annotated M², or parallel text typed by the built-in classifier.
#[derive(Args, Debug)]
struct CorpusInput {
    #[arg(long, conflicts_with_all = ["src", "tgt"], required_unless_present_all = ["src", "tgt"])]
    m2: Option<PathBuf>,
    #[arg(long, requires = "tgt")]
    src: Option<PathBuf>,
    #[arg(long, requires = "src")]
    tgt: Option<PathBuf>,
    /// Annotator to read from M² (default: the first).
    #[arg(long)]
    annotator: Option<u32>,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct LabelInput {
    #[arg(long)]
    m2: Option<PathBuf>,
    /// Existing token/label TSV to coarsen.
    #[arg(long)]
    ged: Option<PathBuf>,
}

fn parse_granularity(s: &str) -> Result<Granularity, String> {
    s.parse().map_err(|e: argec_core::Error| e.to_string())
}

/// Label granularity used as MLE context; `None` trains without labels.
#[derive(Clone, Copy, Debug)]
struct TagContext(Option<Granularity>);

fn parse_tags(s: &str) -> Result<TagContext, String> {
    match s {
        "none" => Ok(TagContext(None)),
        _ => parse_granularity(s).map(|g| TagContext(Some(g))),
    }
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse().map_err(|e: argec_core::Error| e.to_string())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .target(env_logger::Target::Stderr)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("argec: {e}");
            ExitCode::from(if e.is_io() { 2 } else { 1 })
        }
    }
}
