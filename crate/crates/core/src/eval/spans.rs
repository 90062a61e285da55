use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::ratio;
use crate::baseline::exceeds;
use crate::corpus::{bio_tags, doc_id, tokenize, CgifRecord, PredictionRecord};
use crate::engine::LocationKey;
use crate::span::Span;

/// Predicted spans keyed by `(game_id, location_key)`.
pub type PredictedSpans = BTreeMap<(String, LocationKey), Vec<Span>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Counts {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tokens_correct: usize,
    pub tokens_total: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub token_accuracy: f64,
    pub span_precision: f64,
    pub span_recall: f64,
    pub span_f1: f64,
    pub counts: Counts,
    pub documents: usize,
    /// Prediction keys with no gold record, as `game/digest/room`.
    pub unmatched: Vec<String>,
}

impl EvalReport {
    pub fn from_counts(counts: Counts, documents: usize, unmatched: Vec<String>) -> Self {
        let p = ratio(counts.tp, counts.tp + counts.fp);
        let r = ratio(counts.tp, counts.tp + counts.fn_);
        let f1 = if p + r > 0.0 { 2.0 * p * r / (p + r) } else { 0.0 };
        Self {
            token_accuracy: ratio(counts.tokens_correct, counts.tokens_total),
            span_precision: p,
            span_recall: r,
            span_f1: f1,
            counts,
            documents,
            unmatched,
        }
    }
}

/// Keeps spans with `p > p_min`, merging records that share a key.
pub fn thresholded(predictions: &[PredictionRecord], p_min: f64) -> PredictedSpans {
    let mut out = PredictedSpans::new();
    for r in predictions {
        out.entry(r.key())
            .or_default()
            .extend(r.spans.iter().filter(|s| exceeds(s.p, p_min)).map(|s| s.span()));
    }
    out
}

/// Micro-averaged metrics over all gold records. Spans match only on exact
/// `(start, end)`; duplicate predictions count once. Gold records without
/// predictions are scored against an empty prediction set.
pub fn span_metrics(gold: &[CgifRecord], predicted: &PredictedSpans) -> EvalReport {
    let mut counts = Counts::default();
    let empty = Vec::new();
    for record in gold {
        let pred = predicted.get(&record.key()).unwrap_or(&empty);
        let gold_set: BTreeSet<Span> = record.spans.iter().copied().collect();
        let pred_set: BTreeSet<Span> = pred.iter().copied().collect();
        let tp = gold_set.intersection(&pred_set).count();
        counts.tp += tp;
        counts.fp += pred_set.len() - tp;
        counts.fn_ += gold_set.len() - tp;

        let tokens = tokenize(&record.text);
        let gold_tags = bio_tags(&tokens, &record.spans);
        let pred_tags = bio_tags(&tokens, pred);
        counts.tokens_total += tokens.len();
        counts.tokens_correct += gold_tags.iter().zip(&pred_tags).filter(|(g, p)| g == p).count();
    }
    let gold_keys: BTreeSet<(String, LocationKey)> = gold.iter().map(CgifRecord::key).collect();
    let unmatched = predicted
        .keys()
        .filter(|k| !gold_keys.contains(*k))
        .map(|(game, key)| doc_id(game, key))
        .collect();
    EvalReport::from_counts(counts, gold.len(), unmatched)
}
