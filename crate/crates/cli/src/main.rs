//! `eastgen`: build trees from an annotated corpus, generate labeled
//! sentences from them, export regex bundles, validate and inspect artifacts.

mod commands;
mod files;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use eastgen_core::dataset::CorpusFormat;
use eastgen_core::{OutputFormat, DEFAULT_THRESHOLD};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "eastgen",
    version,
    about = "Entity aware syntax trees for NLU data augmentation"
)]
struct Cli {
    /// More log output (repeatable).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    /// Errors only.
    #[arg(short, long, global = true, conflicts_with = "verbose")]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Induce one tree per intent from an annotated corpus.
    Build(BuildArgs),
    /// Generate labeled sentences from trees.
    Generate(GenerateArgs),
    /// Lower trees to regex bundles.
    ExportRegex(ExportRegexArgs),
    /// Check trees or a corpus; exits 1 when anything is wrong.
    Validate(ValidateArgs),
    /// Summarize a corpus or trees.
    Stats(StatsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Conll,
    Records,
}

impl From<Format> for CorpusFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Conll => CorpusFormat::Conll,
            Format::Records => CorpusFormat::Records,
        }
    }
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Conll => OutputFormat::Conll,
            Format::Records => OutputFormat::Records,
        }
    }
}

#[derive(Debug, Args)]
struct BuildArgs {
    /// Annotated corpus.
    corpus: PathBuf,
    #[arg(long, value_enum, default_value = "conll")]
    format: Format,
    /// Main-entity threshold, in (0, 1).
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    threshold: f64,
    /// Output directory for `<intent>.east.json`, `lexicon.json` and `manifest.json`.
    #[arg(long)]
    out: PathBuf,
    /// Intent for sentences without one.
    #[arg(long)]
    default_intent: Option<String>,
    /// Use only the most frequent main entity.
    #[arg(long)]
    single_main_entity: bool,
}

/// Where entity surface forms (and training sizes) come from.
#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).multiple(true).args(["lexicon", "corpus"])))]
struct SourceArgs {
    /// Lexicon document as written by `build`.
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Training corpus; supplies the lexicon when `--lexicon` is absent and
    /// the per-intent sizes for `--factor`.
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "conll")]
    corpus_format: Format,
    #[arg(long)]
    default_intent: Option<String>,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    /// A tree document or a directory of `*.east.json` files.
    #[arg(long)]
    trees: PathBuf,
    #[command(flatten)]
    source: SourceArgs,
    /// Word vectors, one `token v1 ... vD` per line.
    #[arg(long)]
    embeddings: Option<PathBuf>,
    /// Neighbors considered per entity candidate.
    #[arg(long, default_value_t = eastgen_core::generator::DEFAULT_K)]
    k: usize,
    /// Sentences per training sentence of each intent (default 2).
    #[arg(long, conflicts_with = "count")]
    factor: Option<usize>,
    /// Sentences per intent.
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    no_embeddings: bool,
    #[arg(long)]
    no_dropout: bool,
    #[arg(long, value_enum, default_value = "conll")]
    format: Format,
    #[arg(long)]
    out: PathBuf,
    /// Draw neighbors from the slot's own single-token forms only.
    #[arg(long)]
    neighbors_from_lexicon: bool,
    /// Draw lexicon candidates by training frequency instead of uniformly.
    #[arg(long)]
    frequency_weighted: bool,
}

#[derive(Debug, Args)]
struct ExportRegexArgs {
    #[arg(long)]
    trees: PathBuf,
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("input").required(true).multiple(true).args(["trees", "corpus"])))]
struct ValidateArgs {
    #[arg(long)]
    trees: Option<PathBuf>,
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "conll")]
    format: Format,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("input").required(true).multiple(true).args(["trees", "corpus"])))]
struct StatsArgs {
    #[arg(long)]
    trees: Option<PathBuf>,
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "conll")]
    format: Format,
    #[arg(long)]
    default_intent: Option<String>,
    /// Print JSON instead of text.
    #[arg(long)]
    json: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match (cli.quiet, cli.verbose) {
        (true, _) => log::LevelFilter::Error,
        (_, 0) => log::LevelFilter::Warn,
        (_, 1) => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .init();

    let result = match &cli.command {
        Command::Build(args) => commands::build_cmd(args).map(|_| true),
        Command::Generate(args) => commands::generate_cmd(args).map(|_| true),
        Command::ExportRegex(args) => commands::export_regex_cmd(args).map(|_| true),
        Command::Validate(args) => commands::validate_cmd(args),
        Command::Stats(args) => commands::stats_cmd(args).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
