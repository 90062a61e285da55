//! `eval`, `sweep` and `analyze`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Result};
use chekhov_core::baseline::LexiconPredictor;
use chekhov_core::corpus::{extract_action_targets, parse_clubfloyd, parse_tripod};
use chekhov_core::eval::{
    at_overlap, category_ratios, occurrence_matrix, report, span_metrics, surface_predictions, thresholded,
    turning_point_profile, NerDocument,
};
use chekhov_core::Span;
use serde::Serialize;

use super::corpus::{load_lexicon, or_out, LEXICON_FILE, PREDICTIONS_FILE, TEST_FILE};
use super::explore::CGIF_FILE;
use super::Outcome;
use crate::output::{open, read_cgif, read_jsonl, read_predictions, write_atomic, write_json};
use crate::settings::Settings;

/// Writes `<stem>.json` and `<stem>.txt` under the output directory and
/// prints the text form.
fn emit<T: Serialize + ?Sized>(settings: &Settings, stem: &str, value: &T, text: &str) -> Result<()> {
    write_json(&settings.out_file(&format!("{stem}.json")), value)?;
    write_atomic(&settings.out_file(&format!("{stem}.txt")), text.as_bytes())?;
    print!("{text}");
    Ok(())
}

pub fn eval(settings: &Settings, gold: &Option<PathBuf>, predictions: &Option<PathBuf>, threshold: Option<f64>) -> Result<Outcome> {
    let gold = read_cgif(&or_out(settings, gold, TEST_FILE))?;
    let predictions = read_predictions(&or_out(settings, predictions, PREDICTIONS_FILE))?;
    let report = span_metrics(&gold, &thresholded(&predictions, threshold.unwrap_or(settings.threshold)));
    emit(settings, "eval_report", &report, &report::eval_table(&report))?;
    Ok(Outcome::Success)
}

pub fn sweep(settings: &Settings, corpus: &Option<PathBuf>, predictions: &Option<PathBuf>, transcripts: &Path) -> Result<Outcome> {
    let corpus = read_cgif(&or_out(settings, corpus, TEST_FILE))?;
    let predictions = read_predictions(&or_out(settings, predictions, PREDICTIONS_FILE))?;
    let parsed = parse_clubfloyd(open(transcripts)?)?;
    if parsed.skipped > 0 {
        eprintln!("sweep: skipped {} malformed transcript groups in {}", parsed.skipped, transcripts.display());
    }
    let targets = extract_action_targets(&parsed.pairs);
    let reports = at_overlap(&surface_predictions(&corpus, &predictions), &targets, &settings.thresholds, settings.mode)?;
    emit(settings, "sweep_report", &reports, &report::overlap_table(&reports))?;
    Ok(Outcome::Success)
}

#[derive(Debug, Clone, Default)]
pub struct AnalyzeInputs {
    pub tripod: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub threshold: Option<f64>,
    pub ner: Option<PathBuf>,
    pub corpus: Option<PathBuf>,
    pub predictions: Option<PathBuf>,
    pub top_k: usize,
}

pub fn analyze(settings: &Settings, inputs: &AnalyzeInputs) -> Result<Outcome> {
    if inputs.tripod.is_none() && inputs.ner.is_none() {
        bail!("analyze needs --tripod and/or --ner");
    }
    let threshold = inputs.threshold.unwrap_or(settings.threshold);
    if let Some(path) = &inputs.tripod {
        let parsed = parse_tripod(open(path)?)?;
        for r in &parsed.rejected {
            eprintln!("analyze: {} line {}: {}", path.display(), r.line, r.reason);
        }
        let predictor = LexiconPredictor {
            lexicon: load_lexicon(&or_out(settings, &inputs.lexicon, LEXICON_FILE))?,
            stopwords: settings.stopword_list()?,
            threshold,
        };
        let mut profile = turning_point_profile(&parsed.synopses, &predictor);
        profile.skipped += parsed.rejected.len();
        let mut matrix = occurrence_matrix(&parsed.synopses, &predictor);
        matrix.skipped += parsed.rejected.len();
        let csv = report::profile_csv(&profile);
        write_json(&settings.out_file("profile.json"), &profile)?;
        write_atomic(&settings.out_file("profile.csv"), csv.as_bytes())?;
        print!("{csv}");
        emit(settings, "matrix", &matrix, &report::matrix_table(&matrix))?;
    }
    if let Some(path) = &inputs.ner {
        let ner: Vec<NerDocument> = read_jsonl(path)?;
        let corpus = read_cgif(&or_out(settings, &inputs.corpus, CGIF_FILE))?;
        let mut cg_spans: BTreeMap<String, Vec<Span>> = BTreeMap::new();
        match &inputs.predictions {
            Some(p) => {
                let by_key = thresholded(&read_predictions(p)?, threshold);
                for r in &corpus {
                    cg_spans.insert(r.doc_id(), by_key.get(&r.key()).cloned().unwrap_or_default());
                }
            }
            None => cg_spans.extend(corpus.iter().map(|r| (r.doc_id(), r.spans.clone()))),
        }
        let rows = category_ratios(&cg_spans, &ner, Some(inputs.top_k));
        emit(settings, "categories", &rows, &report::category_table(&rows))?;
    }
    Ok(Outcome::Success)
}
