//! Byte-offset spans over UTF-8 text.

use serde::{Deserialize, Serialize};

/// Half-open byte range `[start, end)`. Serialized as a two-element array.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "(usize, usize)", into = "(usize, usize)")]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Self { start, end }
    }

    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    /// True when the two ranges share at least one byte.
    pub fn overlaps(&self, other: &Span) -> bool {
        self.start < other.end && other.start < self.end
    }

    pub fn contains(&self, other: &Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    /// Checks the span is non-empty, in bounds and on char boundaries of `text`.
    pub fn is_valid_for(&self, text: &str) -> bool {
        self.start < self.end
            && self.end <= text.len()
            && text.is_char_boundary(self.start)
            && text.is_char_boundary(self.end)
    }

    pub fn slice<'a>(&self, text: &'a str) -> &'a str {
        &text[self.start..self.end]
    }
}

impl From<(usize, usize)> for Span {
    fn from((start, end): (usize, usize)) -> Self {
        Self { start, end }
    }
}

impl From<Span> for (usize, usize) {
    fn from(s: Span) -> Self {
        (s.start, s.end)
    }
}

/// Checks that spans are sorted by start, non-overlapping and valid for `text`.
/// Returns a description of the first violation.
pub fn check_span_list(spans: &[Span], text: &str) -> Result<(), String> {
    for (i, span) in spans.iter().enumerate() {
        if !span.is_valid_for(text) {
            return Err(format!(
                "span {i} [{}, {}) is empty, out of bounds or splits a character (text length {})",
                span.start,
                span.end,
                text.len()
            ));
        }
        if i > 0 {
            let prev = &spans[i - 1];
            if prev.start > span.start {
                return Err(format!("spans {} and {i} are not sorted by start", i - 1));
            }
            if prev.overlaps(span) {
                return Err(format!("spans {} and {i} overlap", i - 1));
            }
        }
    }
    Ok(())
}

/// Resolves overlaps greedily: longer spans claim text first, ties go to the
/// earlier start. Returns the kept items sorted by start.
pub fn longest_first<T>(mut items: Vec<(Span, T)>) -> Vec<(Span, T)> {
    items.sort_by(|(a, _), (b, _)| b.len().cmp(&a.len()).then(a.start.cmp(&b.start)));
    let mut kept: Vec<(Span, T)> = Vec::with_capacity(items.len());
    for (span, item) in items {
        if kept.iter().all(|(k, _)| !k.overlaps(&span)) {
            kept.push((span, item));
        }
    }
    kept.sort_by_key(|(s, _)| (s.start, s.end));
    kept
}
