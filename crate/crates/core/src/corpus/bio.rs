//! BIO projection of span annotations.
//!
//! Text is tokenized into alphanumeric runs and single punctuation marks.
//! Tokens lying entirely inside a span are tagged `B` (first) and `I` (rest);
//! span edges that cut through a token snap inward to token boundaries.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{CgifRecord, CorpusError};
use crate::span::Span;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Tag {
    B,
    I,
    O,
}

impl Tag {
    pub fn as_str(&self) -> &'static str {
        match self {
            Tag::B => "B",
            Tag::I => "I",
            Tag::O => "O",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BioDocument {
    pub tokens: Vec<Token>,
    pub tags: Vec<Tag>,
}

impl BioDocument {
    pub fn validate(&self) -> Result<(), String> {
        if self.tokens.len() != self.tags.len() {
            return Err(format!("{} tokens but {} tags", self.tokens.len(), self.tags.len()));
        }
        for (i, tag) in self.tags.iter().enumerate() {
            if *tag == Tag::I && (i == 0 || self.tags[i - 1] == Tag::O) {
                return Err(format!("I tag at token {i} does not continue an entity"));
            }
        }
        for pair in self.tokens.windows(2) {
            if pair[0].start >= pair[0].end || pair[0].end > pair[1].start {
                return Err("token offsets are not ascending and disjoint".to_string());
            }
        }
        Ok(())
    }
}

/// Splits on whitespace; alphanumeric runs form tokens and every other
/// character is a token of its own.
pub fn tokenize(text: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut run_start: Option<usize> = None;
    let push = |tokens: &mut Vec<Token>, s: usize, e: usize| tokens.push(Token { surface: text[s..e].to_string(), start: s, end: e });
    for (i, c) in text.char_indices() {
        if c.is_alphanumeric() {
            run_start.get_or_insert(i);
            continue;
        }
        if let Some(s) = run_start.take() {
            push(&mut tokens, s, i);
        }
        if !c.is_whitespace() {
            push(&mut tokens, i, i + c.len_utf8());
        }
    }
    if let Some(s) = run_start {
        push(&mut tokens, s, text.len());
    }
    tokens
}

/// Tags tokens against `spans`. A token belongs to the first span (in start
/// order) that fully contains it; overlapping spans are tolerated.
pub fn bio_tags(tokens: &[Token], spans: &[Span]) -> Vec<Tag> {
    let mut sorted: Vec<Span> = spans.to_vec();
    sorted.sort();
    let mut tags = Vec::with_capacity(tokens.len());
    let mut prev: Option<usize> = None;
    for token in tokens {
        let t = Span::new(token.start, token.end);
        let owner = sorted.iter().position(|s| s.contains(&t));
        tags.push(match owner {
            None => Tag::O,
            Some(k) if prev == Some(k) => Tag::I,
            Some(_) => Tag::B,
        });
        prev = owner;
    }
    tags
}

pub fn to_bio(record: &CgifRecord) -> BioDocument {
    let tokens = tokenize(&record.text);
    let tags = bio_tags(&tokens, &record.spans);
    BioDocument { tokens, tags }
}

/// Recovers spans from tags; each entity runs from its first token's start to
/// its last token's end. A stray `I` opens a new entity.
pub fn from_bio(doc: &BioDocument) -> Vec<Span> {
    let mut spans = Vec::new();
    let mut current: Option<Span> = None;
    for (token, tag) in doc.tokens.iter().zip(&doc.tags) {
        match (tag, current.as_mut()) {
            (Tag::I, Some(span)) => span.end = token.end,
            (Tag::B | Tag::I, _) => {
                spans.extend(current.take());
                current = Some(Span::new(token.start, token.end));
            }
            (Tag::O, _) => spans.extend(current.take()),
        }
    }
    spans.extend(current);
    spans
}

/// CoNLL-style export: `token<TAB>tag` per line, blank line between documents.
pub fn write_conll<W: Write>(docs: &[BioDocument], mut writer: W) -> Result<(), CorpusError> {
    for (i, doc) in docs.iter().enumerate() {
        if i > 0 {
            writeln!(writer)?;
        }
        for (token, tag) in doc.tokens.iter().zip(&doc.tags) {
            writeln!(writer, "{}\t{}", token.surface, tag.as_str())?;
        }
    }
    writer.flush()?;
    Ok(())
}
