//! Plot synopses annotated with five turning points.
//!
//! Input is JSON Lines, one story per line:
//! `{"story_id": "...", "sentences": ["...", ...], "turning_points": [i1, .., i5]}`.
//! A `"synopsis"` string may replace `"sentences"`; it is split with
//! [`crate::text::split_sentences`].

use std::io::BufRead;

use serde::{Deserialize, Serialize};

use super::CorpusError;
use crate::text::split_sentences;

pub const TURNING_POINTS: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripodSynopsis {
    pub story_id: String,
    pub sentences: Vec<String>,
    pub turning_points: Vec<usize>,
}

impl TripodSynopsis {
    /// Exactly five sentence indices, strictly increasing, all in range.
    pub fn validate(&self) -> Result<(), String> {
        if self.turning_points.len() != TURNING_POINTS {
            return Err(format!("expected {TURNING_POINTS} turning points, found {}", self.turning_points.len()));
        }
        if self.turning_points.windows(2).any(|w| w[0] >= w[1]) {
            return Err("turning points are not strictly increasing".to_string());
        }
        if let Some(&last) = self.turning_points.last() {
            if last >= self.sentences.len() {
                return Err(format!("turning point {last} is past the last sentence ({})", self.sentences.len()));
            }
        }
        Ok(())
    }

    pub fn turning_point_sentences(&self) -> impl Iterator<Item = &str> {
        self.turning_points.iter().map(|&i| self.sentences[i].as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectedStory {
    pub line: usize,
    pub story_id: Option<String>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TripodParse {
    pub synopses: Vec<TripodSynopsis>,
    pub rejected: Vec<RejectedStory>,
}

#[derive(Deserialize)]
struct RawStory {
    story_id: String,
    #[serde(default)]
    sentences: Option<Vec<String>>,
    #[serde(default)]
    synopsis: Option<String>,
    turning_points: Vec<usize>,
}

/// Parses annotated synopses. Stories that fail validation (or do not parse)
/// are reported and skipped; only stream I/O fails the call.
pub fn parse_tripod<R: BufRead>(reader: R) -> Result<TripodParse, CorpusError> {
    let mut parse = TripodParse::default();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let line_no = idx + 1;
        let raw: RawStory = match serde_json::from_str(&line) {
            Ok(raw) => raw,
            Err(e) => {
                let story_id = serde_json::from_str::<serde_json::Value>(&line)
                    .ok()
                    .and_then(|v| v.get("story_id").and_then(|s| s.as_str()).map(str::to_string));
                parse.rejected.push(RejectedStory { line: line_no, story_id, reason: e.to_string() });
                continue;
            }
        };
        let sentences = match (raw.sentences, raw.synopsis) {
            (Some(s), _) => s,
            (None, Some(text)) => split_sentences(&text).into_iter().map(str::to_string).collect(),
            (None, None) => {
                parse.rejected.push(RejectedStory {
                    line: line_no,
                    story_id: Some(raw.story_id),
                    reason: "neither sentences nor synopsis given".to_string(),
                });
                continue;
            }
        };
        let story = TripodSynopsis { story_id: raw.story_id, sentences, turning_points: raw.turning_points };
        match story.validate() {
            Ok(()) => parse.synopses.push(story),
            Err(reason) => parse.rejected.push(RejectedStory { line: line_no, story_id: Some(story.story_id), reason }),
        }
    }
    Ok(parse)
}
