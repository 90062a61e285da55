use std::collections::BTreeMap;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::corpus::{read_jsonl, CorpusError};
use crate::span::Span;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NerSpan {
    pub start: usize,
    pub end: usize,
    pub category: String,
}

/// Entities an external NER system found in one document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NerDocument {
    pub doc_id: String,
    pub spans: Vec<NerSpan>,
}

pub fn read_ner<R: BufRead>(reader: R) -> Result<Vec<NerDocument>, CorpusError> {
    read_jsonl(reader)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryRatioRow {
    pub category: String,
    pub nu_cgr: usize,
    pub nu_ner: usize,
    pub ratio: f64,
}

/// Splits each category's entities into those touching a CG span (any byte
/// overlap) and the rest, and ranks categories by the ratio of the two.
/// Categories with no non-CG entity have no ratio and are left out. Ties in
/// ratio are broken by category name. Documents absent from `cg_spans` have
/// no CGs.
pub fn category_ratios(cg_spans: &BTreeMap<String, Vec<Span>>, ner: &[NerDocument], top_k: Option<usize>) -> Vec<CategoryRatioRow> {
    let mut tally: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    let none = Vec::new();
    for doc in ner {
        let cgs = cg_spans.get(&doc.doc_id).unwrap_or(&none);
        for entity in &doc.spans {
            let span = Span::new(entity.start, entity.end);
            let entry = tally.entry(entity.category.as_str()).or_default();
            if cgs.iter().any(|cg| cg.overlaps(&span)) {
                entry.0 += 1;
            } else {
                entry.1 += 1;
            }
        }
    }
    let mut rows: Vec<CategoryRatioRow> = tally
        .into_iter()
        .filter(|&(_, (_, nu_ner))| nu_ner > 0)
        .map(|(category, (nu_cgr, nu_ner))| CategoryRatioRow {
            category: category.to_string(),
            nu_cgr,
            nu_ner,
            ratio: nu_cgr as f64 / nu_ner as f64,
        })
        .collect();
    rows.sort_by(|a, b| b.ratio.total_cmp(&a.ratio).then_with(|| a.category.cmp(&b.category)));
    if let Some(k) = top_k {
        rows.truncate(k);
    }
    rows
}
