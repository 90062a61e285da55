//! `build-corpus`, `export-bio`, `stats`, `train-baseline` and `predict`.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use chekhov_core::baseline::{predict_records, train_lexicon, Lexicon};
use chekhov_core::corpus::{corpus_stats, split_corpus, to_bio, write_conll, write_predictions, CgifRecord};

use super::explore::CGIF_FILE;
use super::Outcome;
use crate::output::{open, read_cgif, write_atomic, write_cgif, write_json};
use crate::settings::Settings;

pub const SPLIT_DIR: &str = "corpus";
pub const TRAIN_FILE: &str = "corpus/train.jsonl";
pub const TEST_FILE: &str = "corpus/test.jsonl";
pub const LEXICON_FILE: &str = "lexicon.json";
pub const PREDICTIONS_FILE: &str = "predictions.jsonl";

pub(crate) fn or_out(settings: &Settings, explicit: &Option<PathBuf>, name: &str) -> PathBuf {
    explicit.clone().unwrap_or_else(|| settings.out_file(name))
}

/// Concatenates CGIF files, keeping the first record for each location.
pub fn merge_inputs(paths: &[PathBuf]) -> Result<Vec<CgifRecord>> {
    let mut seen = HashSet::new();
    let mut merged = Vec::new();
    for path in paths {
        for record in read_cgif(path)? {
            if seen.insert(record.key()) {
                merged.push(record);
            }
        }
    }
    Ok(merged)
}

pub fn build_corpus(settings: &Settings, inputs: &[PathBuf]) -> Result<Outcome> {
    let inputs = if inputs.is_empty() { vec![settings.out_file(CGIF_FILE)] } else { inputs.to_vec() };
    let records = merge_inputs(&inputs)?;
    let split = split_corpus(&records, settings.ratios, settings.seed)?;
    let dir = settings.out_file(SPLIT_DIR);
    for (name, bucket) in ["train", "dev", "test"].iter().zip(split.buckets()) {
        write_cgif(&dir.join(format!("{name}.jsonl")), bucket)?;
    }
    println!(
        "build-corpus: {} locations -> train {}, dev {}, test {}",
        records.len(),
        split.train.len(),
        split.dev.len(),
        split.test.len()
    );
    Ok(Outcome::Success)
}

pub fn export_bio(settings: &Settings, input: &Option<PathBuf>, output: &Option<PathBuf>) -> Result<Outcome> {
    let records = read_cgif(&or_out(settings, input, CGIF_FILE))?;
    let docs: Vec<_> = records.iter().map(to_bio).collect();
    let mut bytes = Vec::new();
    write_conll(&docs, &mut bytes)?;
    let path = or_out(settings, output, "bio.conll");
    write_atomic(&path, &bytes)?;
    println!("export-bio: {} documents -> {}", docs.len(), path.display());
    Ok(Outcome::Success)
}

pub fn stats(settings: &Settings, input: &Option<PathBuf>) -> Result<Outcome> {
    let records = read_cgif(&or_out(settings, input, CGIF_FILE))?;
    let stats = corpus_stats(&records);
    println!("{}", serde_json::to_string_pretty(&stats)?);
    Ok(Outcome::Success)
}

pub fn load_lexicon(path: &Path) -> Result<Lexicon> {
    Lexicon::from_reader(open(path)?).with_context(|| format!("in {}", path.display()))
}

pub fn train(settings: &Settings, input: &Option<PathBuf>, alpha: Option<f64>) -> Result<Outcome> {
    let path = or_out(settings, input, TRAIN_FILE);
    let records = read_cgif(&path)?;
    let lexicon = train_lexicon(&records, &settings.stopword_list()?, alpha.unwrap_or(settings.alpha))
        .with_context(|| format!("training on {}", path.display()))?;
    let out = settings.out_file(LEXICON_FILE);
    write_json(&out, &lexicon)?;
    println!("train-baseline: {} surfaces from {} locations -> {}", lexicon.table.len(), records.len(), out.display());
    Ok(Outcome::Success)
}

pub fn predict(settings: &Settings, lexicon: &Option<PathBuf>, input: &Option<PathBuf>, output: &Option<PathBuf>) -> Result<Outcome> {
    let lexicon = load_lexicon(&or_out(settings, lexicon, LEXICON_FILE))?;
    let records = read_cgif(&or_out(settings, input, TEST_FILE))?;
    let predictions = predict_records(&lexicon, &records, &settings.stopword_list()?);
    let path = or_out(settings, output, PREDICTIONS_FILE);
    let mut bytes = Vec::new();
    write_predictions(&predictions, &mut bytes)?;
    write_atomic(&path, &bytes)?;
    println!("predict: {} locations -> {}", predictions.len(), path.display());
    Ok(Outcome::Success)
}
