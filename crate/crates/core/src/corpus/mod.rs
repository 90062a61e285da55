//! Corpus data model and file formats.
//!
//! * CGIF records: one labeled location per JSON line, spans as byte pairs.
//! * Prediction interchange: scored spans per location, produced by any tagger.
//! * BIO export, game-level splits and ingestion of gameplay transcripts and
//!   turning-point annotated synopses live in the submodules.

pub mod bio;
pub mod clubfloyd;
mod jsonl;
pub mod split;
pub mod tripod;

use std::collections::HashSet;
use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::LocationKey;
use crate::explorer::DiscoveredBy;
use crate::probe::AnnotatedLocation;
use crate::span::{check_span_list, Span};

pub use bio::{bio_tags, from_bio, to_bio, tokenize, write_conll, BioDocument, Tag, Token};
pub use clubfloyd::{extract_action_targets, parse_clubfloyd, ActionTarget, ClubFloydPair, ClubFloydParse};
pub use jsonl::{read_jsonl, write_jsonl};
pub use split::{split_corpus, Split};
pub use tripod::{parse_tripod, RejectedStory, TripodParse, TripodSynopsis};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("record {index} ({game_id}): {message}")]
    Invalid { index: usize, game_id: String, message: String },
    #[error("invalid split ratios: {0}")]
    InvalidRatios(String),
    #[error("cannot fill {buckets} buckets from {games} games")]
    TooFewGames { games: usize, buckets: usize },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// One labeled location.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CgifRecord {
    pub game_id: String,
    pub location_key: LocationKey,
    pub text: String,
    pub spans: Vec<Span>,
    pub discovered_by: DiscoveredBy,
    pub pipeline_version: String,
}

impl CgifRecord {
    pub fn from_annotated(ann: &AnnotatedLocation, pipeline_version: &str) -> Self {
        Self {
            game_id: ann.record.game_id.clone(),
            location_key: ann.record.location.clone(),
            text: ann.record.description.clone(),
            spans: ann.spans.clone(),
            discovered_by: ann.record.discovered_by,
            pipeline_version: pipeline_version.to_string(),
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.game_id.is_empty() {
            return Err("empty game_id".to_string());
        }
        check_span_list(&self.spans, &self.text)
    }

    /// Document identifier used to join external annotations.
    pub fn doc_id(&self) -> String {
        doc_id(&self.game_id, &self.location_key)
    }

    pub fn key(&self) -> (String, LocationKey) {
        (self.game_id.clone(), self.location_key.clone())
    }
}

/// `game_id/body_digest/room_name`.
pub fn doc_id(game_id: &str, key: &LocationKey) -> String {
    format!("{game_id}/{}/{}", key.body_digest, key.room_name)
}

pub fn write_cgif<W: Write>(records: &[CgifRecord], writer: W) -> Result<(), CorpusError> {
    for (index, r) in records.iter().enumerate() {
        r.validate().map_err(|message| CorpusError::Invalid { index, game_id: r.game_id.clone(), message })?;
    }
    write_jsonl(records, writer)
}

pub fn read_cgif<R: BufRead>(reader: R) -> Result<Vec<CgifRecord>, CorpusError> {
    jsonl::read_jsonl_validated(reader, CgifRecord::validate)
}

/// A span with a CG probability, as exchanged between taggers and the
/// evaluation tools.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScoredSpan {
    pub start: usize,
    pub end: usize,
    pub p: f64,
}

impl ScoredSpan {
    pub fn span(&self) -> Span {
        Span::new(self.start, self.end)
    }
}

// Interchange files may also carry bare `[start, end]` pairs (a gold CGIF
// file is a valid prediction file); those read as p = 1.
impl<'de> Deserialize<'de> for ScoredSpan {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Scored { start: usize, end: usize, p: f64 },
            Pair(usize, usize),
        }
        Ok(match Repr::deserialize(d)? {
            Repr::Scored { start, end, p } => ScoredSpan { start, end, p },
            Repr::Pair(start, end) => ScoredSpan { start, end, p: 1.0 },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub game_id: String,
    pub location_key: LocationKey,
    pub spans: Vec<ScoredSpan>,
}

impl PredictionRecord {
    pub fn validate(&self) -> Result<(), String> {
        for (i, s) in self.spans.iter().enumerate() {
            if s.start >= s.end {
                return Err(format!("span {i} is empty or reversed"));
            }
            if !(0.0..=1.0).contains(&s.p) {
                return Err(format!("span {i} has p = {} outside [0, 1]", s.p));
            }
        }
        Ok(())
    }

    pub fn key(&self) -> (String, LocationKey) {
        (self.game_id.clone(), self.location_key.clone())
    }
}

pub fn write_predictions<W: Write>(records: &[PredictionRecord], writer: W) -> Result<(), CorpusError> {
    for (index, r) in records.iter().enumerate() {
        r.validate().map_err(|message| CorpusError::Invalid { index, game_id: r.game_id.clone(), message })?;
    }
    write_jsonl(records, writer)
}

pub fn read_predictions<R: BufRead>(reader: R) -> Result<Vec<PredictionRecord>, CorpusError> {
    jsonl::read_jsonl_validated(reader, PredictionRecord::validate)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub locations: usize,
    pub games: usize,
    /// Size of the corpus serialized as CGIF JSON Lines.
    pub bytes: usize,
    pub spans: usize,
    pub spans_per_location: f64,
}

pub fn corpus_stats(records: &[CgifRecord]) -> CorpusStats {
    let games: HashSet<&str> = records.iter().map(|r| r.game_id.as_str()).collect();
    let spans: usize = records.iter().map(|r| r.spans.len()).sum();
    let bytes = records.iter().map(|r| serde_json::to_string(r).map(|s| s.len() + 1).unwrap_or(0)).sum();
    CorpusStats {
        locations: records.len(),
        games: games.len(),
        bytes,
        spans,
        spans_per_location: if records.is_empty() { 0.0 } else { spans as f64 / records.len() as f64 },
    }
}


#[cfg(test)]
mod tests {
    use super::test_support::record;
    use super::*;

    #[test]
    fn empty_corpus_round_trips() {
        let mut buf = Vec::new();
        write_cgif(&[], &mut buf).unwrap();
        assert!(buf.is_empty());
        assert!(read_cgif(&buf[..]).unwrap().is_empty());
    }

    #[test]
    fn record_round_trips_byte_exactly() {
        let r = record("zork", "Foyer", "A brass lamp and a door.", &[(2, 12), (19, 23)]);
        let mut first = Vec::new();
        write_cgif(std::slice::from_ref(&r), &mut first).unwrap();
        let back = read_cgif(&first[..]).unwrap();
        assert_eq!(back, vec![r]);
        let mut second = Vec::new();
        write_cgif(&back, &mut second).unwrap();
        assert_eq!(first, second);
        let line = String::from_utf8(first).unwrap();
        assert!(line.contains(r#""spans":[[2,12],[19,23]]"#), "{line}");
        assert!(line.ends_with('\n'));
    }

    #[test]
    fn overlapping_spans_are_rejected_with_line() {
        let good = serde_json::to_string(&record("g", "A", "brass lamp", &[(0, 5)])).unwrap();
        let bad = serde_json::to_string(&record("g", "B", "brass lamp", &[(0, 6), (5, 10)])).unwrap();
        let input = format!("{good}\n{bad}\n");
        match read_cgif(input.as_bytes()) {
            Err(CorpusError::Malformed { line, message }) => {
                assert_eq!(line, 2);
                assert!(message.contains("overlap"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(read_cgif("{not json\n".as_bytes()), Err(CorpusError::Malformed { line: 1, .. })));
        let invalid = record("g", "B", "brass lamp", &[(0, 60)]);
        assert!(matches!(write_cgif(&[invalid], Vec::new()), Err(CorpusError::Invalid { index: 0, .. })));
    }

    #[test]
    fn stats_count_exactly() {
        assert_eq!(
            corpus_stats(&[]),
            CorpusStats { locations: 0, games: 0, bytes: 0, spans: 0, spans_per_location: 0.0 }
        );
        let records = vec![
            record("a", "X", "lamp door key", &[(0, 4), (5, 9)]),
            record("a", "Y", "lamp door key", &[(0, 4)]),
            record("b", "X", "lamp door key", &[(0, 4), (5, 9)]),
        ];
        let stats = corpus_stats(&records);
        assert_eq!((stats.locations, stats.games, stats.spans), (3, 2, 5));
        assert!((stats.spans_per_location - 5.0 / 3.0).abs() < 1e-12);
        let mut buf = Vec::new();
        write_cgif(&records, &mut buf).unwrap();
        assert_eq!(stats.bytes, buf.len());
    }

    #[test]
    fn predictions_accept_pairs_and_scored_spans() {
        let line = r#"{"game_id":"g","location_key":{"room_name":"A","body_digest":"0123abcd"},"spans":[{"start":0,"end":4,"p":0.25},[5,9]]}"#;
        let preds = read_predictions(line.as_bytes()).unwrap();
        assert_eq!(preds[0].spans[0], ScoredSpan { start: 0, end: 4, p: 0.25 });
        assert_eq!(preds[0].spans[1], ScoredSpan { start: 5, end: 9, p: 1.0 });
        let bad = r#"{"game_id":"g","location_key":{"room_name":"A","body_digest":"0123abcd"},"spans":[{"start":0,"end":4,"p":1.5}]}"#;
        assert!(matches!(read_predictions(bad.as_bytes()), Err(CorpusError::Malformed { line: 1, .. })));
        // a gold CGIF line reads as a prediction file
        let gold = serde_json::to_string(&record("g", "A", "lamp", &[(0, 4)])).unwrap();
        assert_eq!(read_predictions(gold.as_bytes()).unwrap()[0].spans[0].p, 1.0);
    }
}
