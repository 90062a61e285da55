//! Lexicon baseline tagger.
//!
//! Counts, for every candidate phrase seen in training text, how often it sat
//! inside a gold span. Prediction scores each candidate occurrence with the
//! smoothed ratio `(cg + alpha) / (total + 2 alpha)`; unseen phrases get 0.5.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{CgifRecord, PredictionRecord, ScoredSpan};
use crate::eval::CgPredictor;
use crate::probe::{extract_candidates, find_occurrences};
use crate::span::Span;
use crate::text::{normalize, Stopwords};

pub const DEFAULT_ALPHA: f64 = 1.0;
/// Score of a phrase the lexicon has never seen.
pub const UNSEEN_PRIOR: f64 = 0.5;

#[derive(Debug, Error)]
pub enum BaselineError {
    #[error("training corpus is empty")]
    EmptyCorpus,
    #[error("smoothing constant must be positive, got {0}")]
    InvalidAlpha(f64),
    #[error("lexicon entry {surface:?} has cg_count {cg} > total_count {total}")]
    InvalidEntry { surface: String, cg: u64, total: u64 },
    #[error("malformed lexicon: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lexicon {
    pub alpha: f64,
    /// normalized surface -> [cg_count, total_count]
    pub table: BTreeMap<String, [u64; 2]>,
}

impl Lexicon {
    pub fn new(alpha: f64) -> Result<Self, BaselineError> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(BaselineError::InvalidAlpha(alpha));
        }
        Ok(Self { alpha, table: BTreeMap::new() })
    }

    pub fn validate(&self) -> Result<(), BaselineError> {
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(BaselineError::InvalidAlpha(self.alpha));
        }
        for (surface, &[cg, total]) in &self.table {
            if cg > total || total == 0 {
                return Err(BaselineError::InvalidEntry { surface: surface.clone(), cg, total });
            }
        }
        Ok(())
    }

    pub fn counts(&self, normalized: &str) -> Option<(u64, u64)> {
        self.table.get(normalized).map(|&[cg, total]| (cg, total))
    }

    pub fn probability(&self, normalized: &str) -> f64 {
        match self.counts(normalized) {
            Some((cg, total)) => (cg as f64 + self.alpha) / (total as f64 + 2.0 * self.alpha),
            None => UNSEEN_PRIOR,
        }
    }

    pub fn to_writer<W: Write>(&self, writer: W) -> Result<(), BaselineError> {
        serde_json::to_writer_pretty(writer, self)?;
        Ok(())
    }

    pub fn from_reader<R: Read>(reader: R) -> Result<Self, BaselineError> {
        let lexicon: Lexicon = serde_json::from_reader(reader)?;
        lexicon.validate()?;
        Ok(lexicon)
    }
}

/// Counts candidate phrases over the training texts. A candidate counts as a
/// CG when its byte range lies inside a gold span.
pub fn train_lexicon(records: &[CgifRecord], stopwords: &Stopwords, alpha: f64) -> Result<Lexicon, BaselineError> {
    if records.is_empty() {
        return Err(BaselineError::EmptyCorpus);
    }
    let mut lexicon = Lexicon::new(alpha)?;
    for record in records {
        for candidate in extract_candidates(&record.text, stopwords) {
            let inside = record.spans.iter().any(|gold| gold.contains(&candidate.span()));
            let entry = lexicon.table.entry(candidate.normalized).or_insert([0, 0]);
            entry[1] += 1;
            if inside {
                entry[0] += 1;
            }
        }
    }
    Ok(lexicon)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub start: usize,
    pub end: usize,
    pub p: f64,
}

impl Prediction {
    pub fn span(&self) -> Span {
        Span::new(self.start, self.end)
    }
}

impl From<Prediction> for ScoredSpan {
    fn from(p: Prediction) -> Self {
        ScoredSpan { start: p.start, end: p.end, p: p.p }
    }
}

/// Scores every occurrence of every candidate phrase, then keeps a
/// non-overlapping subset. Phrases the lexicon favours (p above the unseen
/// prior) claim text before the rest; within each group the longer match
/// wins, then the earlier one. Output is ordered by start.
pub fn predict(lexicon: &Lexicon, text: &str, stopwords: &Stopwords) -> Vec<Prediction> {
    let mut scored: Vec<Prediction> = Vec::new();
    for candidate in extract_candidates(text, stopwords) {
        let p = lexicon.probability(&candidate.normalized);
        scored.extend(find_occurrences(text, &candidate.normalized).into_iter().map(|s| Prediction { start: s.start, end: s.end, p }));
    }
    resolve_overlaps(scored)
}

pub(crate) fn resolve_overlaps(mut scored: Vec<Prediction>) -> Vec<Prediction> {
    scored.sort_by(|a, b| {
        let favoured = |p: &Prediction| p.p > UNSEEN_PRIOR;
        favoured(b)
            .cmp(&favoured(a))
            .then((b.end - b.start).cmp(&(a.end - a.start)))
            .then(a.start.cmp(&b.start))
    });
    let mut kept: Vec<Prediction> = Vec::with_capacity(scored.len());
    for p in scored {
        if kept.iter().all(|k| !k.span().overlaps(&p.span())) {
            kept.push(p);
        }
    }
    kept.sort_by_key(|p| p.start);
    kept
}

/// The strict threshold rule shared by every cut-off: keep `p > p_min`.
pub fn exceeds(p: f64, p_min: f64) -> bool {
    p > p_min
}

/// Spans whose probability strictly exceeds `p_min`, in input order.
pub fn apply_threshold(predictions: &[Prediction], p_min: f64) -> Vec<Span> {
    predictions.iter().filter(|p| exceeds(p.p, p_min)).map(Prediction::span).collect()
}

/// Predictions for every record, in the interchange format.
pub fn predict_records(lexicon: &Lexicon, records: &[CgifRecord], stopwords: &Stopwords) -> Vec<PredictionRecord> {
    records
        .iter()
        .map(|r| PredictionRecord {
            game_id: r.game_id.clone(),
            location_key: r.location_key.clone(),
            spans: predict(lexicon, &r.text, stopwords).into_iter().map(ScoredSpan::from).collect(),
        })
        .collect()
}

/// Sentence-level CG predictor backed by a lexicon and a threshold.
#[derive(Debug, Clone)]
pub struct LexiconPredictor {
    pub lexicon: Lexicon,
    pub stopwords: Stopwords,
    pub threshold: f64,
}

impl CgPredictor for LexiconPredictor {
    fn cg_surfaces(&self, sentence: &str) -> Vec<String> {
        predict(&self.lexicon, sentence, &self.stopwords)
            .into_iter()
            .filter(|p| exceeds(p.p, self.threshold))
            .map(|p| normalize(&sentence[p.start..p.end]))
            .collect()
    }
}
