//! `chekhov`: discover, label and evaluate Chekhov's-gun entities in
//! interactive fiction.
//!
//! Exit codes: 0 success, 1 partial (some games failed or the run stopped
//! early), 2 usage, config or input error.

mod commands;
mod games;
mod manifest;
mod output;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use commands::analysis::AnalyzeInputs;
use commands::Outcome;
use settings::{GlobalArgs, Settings};

#[derive(Debug, Parser)]
#[command(name = "chekhov", version, about = "Chekhov's-gun discovery and evaluation for interactive fiction")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Explore every game (walkthrough, then random walk) and write the
    /// location manifest.
    Walk,
    /// Probe every explored location and write the CGIF corpus.
    Probe {
        /// Stop after this many newly probed locations (resume by rerunning).
        #[arg(long, hide = true)]
        max_locations: Option<usize>,
    },
    /// Merge CGIF files and split them by game into train/dev/test.
    BuildCorpus {
        /// CGIF inputs (default: <out>/cgif.jsonl).
        #[arg(long = "input", value_name = "FILE")]
        inputs: Vec<PathBuf>,
    },
    /// Write a CGIF file as CoNLL-style BIO.
    ExportBio {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Train the lexicon baseline.
    TrainBaseline {
        #[arg(long)]
        train: Option<PathBuf>,
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Score every candidate span of a CGIF file with the lexicon.
    Predict {
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Span precision/recall/F1 and token accuracy against gold.
    Eval {
        #[arg(long)]
        gold: Option<PathBuf>,
        #[arg(long)]
        predictions: Option<PathBuf>,
        /// Keep predictions with p strictly above this.
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Action-target overlap at each threshold.
    Sweep {
        /// CGIF the predictions were made on.
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        predictions: Option<PathBuf>,
        /// Gameplay transcripts in [CLS]/[SEP] form.
        #[arg(long)]
        transcripts: PathBuf,
    },
    /// Turning-point profile and occurrence matrix; NER category ratios.
    Analyze {
        /// Turning-point annotated synopses (JSON Lines).
        #[arg(long)]
        tripod: Option<PathBuf>,
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[arg(long)]
        threshold: Option<f64>,
        /// NER annotations (JSON Lines of {doc_id, spans}).
        #[arg(long)]
        ner: Option<PathBuf>,
        /// CGIF whose spans are the CGs (default: <out>/cgif.jsonl).
        #[arg(long)]
        corpus: Option<PathBuf>,
        /// Use thresholded predictions instead of the corpus spans.
        #[arg(long)]
        predictions: Option<PathBuf>,
        #[arg(long, default_value_t = 5)]
        top_k: usize,
    },
    /// Corpus size statistics.
    Stats {
        #[arg(long)]
        input: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<Outcome> {
    let settings = Settings::resolve(&cli.global)?;
    use commands::{analysis, corpus, explore};
    match cli.command {
        Command::Walk => explore::walk(&settings),
        Command::Probe { max_locations } => explore::probe(&settings, max_locations),
        Command::BuildCorpus { inputs } => corpus::build_corpus(&settings, &inputs),
        Command::ExportBio { input, output } => corpus::export_bio(&settings, &input, &output),
        Command::TrainBaseline { train, alpha } => corpus::train(&settings, &train, alpha),
        Command::Predict { lexicon, input, output } => corpus::predict(&settings, &lexicon, &input, &output),
        Command::Eval { gold, predictions, threshold } => analysis::eval(&settings, &gold, &predictions, threshold),
        Command::Sweep { corpus, predictions, transcripts } => analysis::sweep(&settings, &corpus, &predictions, &transcripts),
        Command::Analyze { tripod, lexicon, threshold, ner, corpus, predictions, top_k } => {
            analysis::analyze(&settings, &AnalyzeInputs { tripod, lexicon, threshold, ner, corpus, predictions, top_k })
        }
        Command::Stats { input } => corpus::stats(&settings, &input),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::Partial) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
