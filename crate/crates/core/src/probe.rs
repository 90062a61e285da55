//! Candidate extraction, `examine` probing and span labeling.
//!
//! Every candidate phrase in a location description is probed from a fresh
//! replay of the location's prefix. Phrases the game reacts to with anything
//! other than a stock refusal become labeled spans, projected onto every
//! occurrence of the phrase in the description.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::Session;
use crate::explorer::LocationRecord;
use crate::span::{longest_first, Span};
use crate::text::{alphabetic_words, normalize, parse_list, words_adjacent, Stopwords, Word};

const MAX_PHRASE_WORDS: usize = 3;

#[derive(Debug, Error)]
pub enum ProbeError {
    #[error("pattern set from {0} is empty")]
    EmptyPatterns(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateSpan {
    pub start: usize,
    pub end: usize,
    pub surface: String,
    pub normalized: String,
}

impl CandidateSpan {
    pub fn span(&self) -> Span {
        Span::new(self.start, self.end)
    }

    fn from_words(text: &str, first: &Word<'_>, last: &Word<'_>) -> Self {
        let surface = &text[first.start..last.end];
        Self { start: first.start, end: last.end, surface: surface.to_string(), normalized: normalize(surface) }
    }
}

/// Splits `description` into runs of adjacent non-stopword words.
fn phrase_runs<'a>(description: &'a str, stopwords: &Stopwords) -> Vec<Vec<Word<'a>>> {
    let mut runs: Vec<Vec<Word<'a>>> = Vec::new();
    let mut current: Vec<Word<'a>> = Vec::new();
    for word in alphabetic_words(description) {
        if stopwords.contains(word.text) {
            if !current.is_empty() {
                runs.push(std::mem::take(&mut current));
            }
            continue;
        }
        if let Some(prev) = current.last() {
            if !words_adjacent(description, prev, &word) {
                runs.push(std::mem::take(&mut current));
            }
        }
        current.push(word);
    }
    if !current.is_empty() {
        runs.push(current);
    }
    runs
}

/// Extracts object-like phrases: each maximal run of up to three adjacent
/// non-stopword words, plus every single word inside a longer run. Runs
/// longer than three words contribute every three-word window instead.
/// Duplicates (by normalized form) keep the earliest occurrence; the result
/// is ordered by start offset, longer phrases first.
pub fn extract_candidates(description: &str, stopwords: &Stopwords) -> Vec<CandidateSpan> {
    let mut all = Vec::new();
    for run in phrase_runs(description, stopwords) {
        if run.len() <= MAX_PHRASE_WORDS {
            if run.len() > 1 {
                all.push(CandidateSpan::from_words(description, &run[0], &run[run.len() - 1]));
            }
        } else {
            for window in run.windows(MAX_PHRASE_WORDS) {
                all.push(CandidateSpan::from_words(description, &window[0], &window[MAX_PHRASE_WORDS - 1]));
            }
        }
        for word in &run {
            all.push(CandidateSpan::from_words(description, word, word));
        }
    }
    all.sort_by(|a, b| a.start.cmp(&b.start).then(b.end.cmp(&a.end)));
    let mut seen = HashSet::new();
    all.retain(|c| seen.insert(c.normalized.clone()));
    all
}

/// Finds every word-aligned occurrence of a normalized phrase in `text`.
pub fn find_occurrences(text: &str, normalized: &str) -> Vec<Span> {
    let target: Vec<&str> = normalized.split(' ').filter(|w| !w.is_empty()).collect();
    if target.is_empty() {
        return Vec::new();
    }
    let words = alphabetic_words(text);
    let mut found = Vec::new();
    'outer: for i in 0..words.len() {
        if i + target.len() > words.len() {
            break;
        }
        for (k, expected) in target.iter().enumerate() {
            let word = &words[i + k];
            if k > 0 && !words_adjacent(text, &words[i + k - 1], word) {
                continue 'outer;
            }
            if normalize(word.text) != *expected {
                continue 'outer;
            }
        }
        found.push(Span::new(words[i].start, words[i + target.len() - 1].end));
    }
    found
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Trivial,
    Nontrivial,
    Error,
}

/// Case-insensitive substrings that mark an engine reaction as a stock
/// refusal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrivialityPatternSet {
    patterns: Vec<String>,
    source: String,
}

pub const BUILTIN_TRIVIALITY_PATTERNS: &[&str] = &[
    "can't see any such thing",
    "see nothing special",
    "not something you need to refer to",
    "don't know the word",
    "not a verb I recognise",
    "that's not a verb",
    "you can't do that",
];

fn fold(s: &str) -> String {
    s.replace('\u{2019}', "'").to_lowercase()
}

impl TrivialityPatternSet {
    pub fn builtin() -> Self {
        Self::new(BUILTIN_TRIVIALITY_PATTERNS.iter().map(|p| p.to_string()).collect(), "builtin")
            .expect("builtin patterns are non-empty")
    }

    pub fn new(patterns: Vec<String>, source: impl Into<String>) -> Result<Self, ProbeError> {
        let source = source.into();
        let patterns: Vec<String> = patterns.iter().map(|p| fold(p.trim())).filter(|p| !p.is_empty()).collect();
        if patterns.is_empty() {
            return Err(ProbeError::EmptyPatterns(source));
        }
        Ok(Self { patterns, source })
    }

    /// Parses a pattern file: one pattern per line, `#` comments.
    pub fn parse(contents: &str, source: impl Into<String>) -> Result<Self, ProbeError> {
        Self::new(parse_list(contents), source)
    }

    pub fn from_file(path: &Path) -> Result<Self, ProbeError> {
        let contents =
            std::fs::read_to_string(path).map_err(|source| ProbeError::Io { path: path.to_path_buf(), source })?;
        Self::parse(&contents, path.display().to_string())
    }

    pub fn patterns(&self) -> &[String] {
        &self.patterns
    }

    pub fn source(&self) -> &str {
        &self.source
    }
}

impl Default for TrivialityPatternSet {
    fn default() -> Self {
        Self::builtin()
    }
}

/// A reaction is trivial when it is blank or contains any pattern.
pub fn classify_triviality(response: &str, patterns: &TrivialityPatternSet) -> Verdict {
    if response.trim().is_empty() {
        return Verdict::Trivial;
    }
    let folded = fold(response);
    if patterns.patterns.iter().any(|p| folded.contains(p.as_str())) {
        Verdict::Trivial
    } else {
        Verdict::Nontrivial
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeResult {
    pub candidate: CandidateSpan,
    pub command: String,
    pub response: String,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

pub fn probe_command(candidate: &CandidateSpan) -> String {
    format!("examine {}", candidate.normalized)
}

/// Replays the record's prefix from a reset and examines the candidate. The
/// session is left in the post-probe state.
pub fn probe_candidate(
    session: &mut Session,
    record: &LocationRecord,
    candidate: &CandidateSpan,
    patterns: &TrivialityPatternSet,
) -> ProbeResult {
    let command = probe_command(candidate);
    let outcome = session.reset_and_replay(&record.prefix).and_then(|_| session.send_command(&command));
    match outcome {
        Ok(response) => ProbeResult {
            candidate: candidate.clone(),
            verdict: classify_triviality(&response.raw_text, patterns),
            command,
            response: response.raw_text,
            error: None,
        },
        Err(e) => ProbeResult {
            candidate: candidate.clone(),
            command,
            response: String::new(),
            verdict: Verdict::Error,
            error: Some(e.to_string()),
        },
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedLocation {
    pub record: LocationRecord,
    pub spans: Vec<Span>,
    pub evidence: Vec<ProbeResult>,
    /// Nontrivial surfaces that lost every occurrence to a longer overlapping
    /// span.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub suppressed: Vec<String>,
}

impl AnnotatedLocation {
    /// Distinct normalized surfaces that drew a nontrivial reaction.
    pub fn labeled_surfaces(&self) -> Vec<&str> {
        let mut seen = HashSet::new();
        self.evidence
            .iter()
            .filter(|p| p.verdict == Verdict::Nontrivial)
            .map(|p| p.candidate.normalized.as_str())
            .filter(|s| seen.insert(*s))
            .collect()
    }

    pub fn error_count(&self) -> usize {
        self.evidence.iter().filter(|p| p.verdict == Verdict::Error).count()
    }
}

/// Turns nontrivial surfaces into spans over every occurrence, resolving
/// overlaps longest-first. Returns the spans and the surfaces that vanished.
pub fn project_labels(description: &str, winners: &[&str]) -> (Vec<Span>, Vec<String>) {
    let occurrences: Vec<(Span, &str)> =
        winners.iter().flat_map(|w| find_occurrences(description, w).into_iter().map(move |s| (s, *w))).collect();
    let kept = longest_first(occurrences);
    let surviving: HashSet<&str> = kept.iter().map(|(_, w)| *w).collect();
    let suppressed = winners.iter().filter(|w| !surviving.contains(*w)).map(|w| w.to_string()).collect();
    (kept.into_iter().map(|(s, _)| s).collect(), suppressed)
}

/// Probes every candidate of the record's description, each from a fresh
/// replay, and labels the ones with nontrivial reactions.
pub fn label_location(
    session: &mut Session,
    record: &LocationRecord,
    stopwords: &Stopwords,
    patterns: &TrivialityPatternSet,
) -> AnnotatedLocation {
    let candidates = extract_candidates(&record.description, stopwords);
    let evidence: Vec<ProbeResult> =
        candidates.iter().map(|c| probe_candidate(session, record, c, patterns)).collect();
    let winners: Vec<&str> = evidence
        .iter()
        .filter(|p| p.verdict == Verdict::Nontrivial)
        .map(|p| p.candidate.normalized.as_str())
        .collect();
    let (spans, suppressed) = project_labels(&record.description, &winners);
    AnnotatedLocation { record: record.clone(), spans, evidence, suppressed }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn surfaces(text: &str) -> Vec<(usize, usize, String)> {
        extract_candidates(text, &Stopwords::builtin()).into_iter().map(|c| (c.start, c.end, c.surface)).collect()
    }

    #[test]
    fn brass_lamp_sentence() {
        // "You see a brass lamp here."
        //  0123456789012345678901234
        let got = surfaces("You see a brass lamp here.");
        assert_eq!(
            got,
            vec![
                (4, 7, "see".to_string()),
                (10, 20, "brass lamp".to_string()),
                (10, 15, "brass".to_string()),
                (16, 20, "lamp".to_string()),
            ]
        );
    }

    #[test]
    fn all_stopwords_yield_nothing() {
        assert!(surfaces("a the of").is_empty());
        assert!(surfaces("").is_empty());
    }

    #[test]
    fn duplicates_keep_first_occurrence() {
        let got = surfaces("A lamp. The LAMP.");
        assert_eq!(got, vec![(2, 6, "lamp".to_string())]);
    }

    #[test]
    fn punctuation_and_newlines_break_phrases() {
        let got: Vec<_> = surfaces("rope, ladder\nbucket").into_iter().map(|c| c.2).collect();
        assert_eq!(got, vec!["rope", "ladder", "bucket"]);
    }

    #[test]
    fn long_runs_use_windows() {
        let got: Vec<_> = surfaces("old rusty iron key").into_iter().map(|c| c.2).collect();
        assert_eq!(got, vec!["old rusty iron", "old", "rusty iron key", "rusty", "iron", "key"]);
    }

    #[test]
    fn occurrences_are_word_aligned() {
        let text = "Lamp light. A brass lamp and a brass\tlamp; lamplight.";
        assert_eq!(find_occurrences(text, "lamp"), vec![Span::new(0, 4), Span::new(20, 24), Span::new(37, 41)]);
        assert_eq!(find_occurrences(text, "brass lamp"), vec![Span::new(14, 24), Span::new(31, 41)]);
        assert!(find_occurrences(text, "").is_empty());
    }

    #[test]
    fn triviality_classification() {
        let patterns = TrivialityPatternSet::builtin();
        assert_eq!(classify_triviality("You can't see any such thing.", &patterns), Verdict::Trivial);
        assert_eq!(classify_triviality("You can\u{2019}t see any such thing.", &patterns), Verdict::Trivial);
        assert_eq!(classify_triviality("", &patterns), Verdict::Trivial);
        assert_eq!(classify_triviality("  \n", &patterns), Verdict::Trivial);
        assert_eq!(classify_triviality("THAT'S NOT A VERB I RECOGNISE.", &patterns), Verdict::Trivial);
        assert_eq!(classify_triviality("The lamp glows with a faint inner light.", &patterns), Verdict::Nontrivial);
    }

    #[test]
    fn pattern_sets_must_be_non_empty() {
        assert!(matches!(TrivialityPatternSet::parse("# none\n\n", "x"), Err(ProbeError::EmptyPatterns(_))));
        let set = TrivialityPatternSet::parse("# refusal\nNothing Happens\n", "file").unwrap();
        assert_eq!(set.patterns(), &["nothing happens".to_string()]);
        assert_eq!(classify_triviality("Nothing happens.", &set), Verdict::Trivial);
    }

    #[test]
    fn projection_prefers_longest() {
        let text = "A brass lamp and a lamp.";
        let (spans, suppressed) = project_labels(text, &["lamp", "brass lamp"]);
        assert_eq!(spans, vec![Span::new(2, 12), Span::new(19, 23)]);
        assert!(suppressed.is_empty());
        let (spans, suppressed) = project_labels("A brass lamp.", &["lamp", "brass lamp"]);
        assert_eq!(spans, vec![Span::new(2, 12)]);
        assert_eq!(suppressed, vec!["lamp".to_string()]);
    }
}
