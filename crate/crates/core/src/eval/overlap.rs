use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::baseline::exceeds;
use crate::corpus::{ActionTarget, CgifRecord, PredictionRecord};
use crate::text::normalize;

/// One predicted CG mention reduced to its normalized surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfacePrediction {
    pub normalized: String,
    pub p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OverlapMode {
    /// Shares weighted by occurrences: every predicted mention and every
    /// action-target occurrence counts.
    AllAts,
    /// Shares over distinct surfaces.
    UniqueAts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapReport {
    pub threshold: f64,
    /// `None` when nothing is labeled at this threshold.
    pub share_cgs_in_at: Option<f64>,
    /// `None` when there are no action targets.
    pub share_ats_labeled: Option<f64>,
    pub labeled: usize,
    pub mode: OverlapMode,
}

/// Resolves prediction spans against the texts they were made on. Spans
/// whose record or offsets are missing are dropped.
pub fn surface_predictions(corpus: &[CgifRecord], predictions: &[PredictionRecord]) -> Vec<SurfacePrediction> {
    let texts: BTreeMap<_, &str> = corpus.iter().map(|r| (r.key(), r.text.as_str())).collect();
    let mut out = Vec::new();
    for record in predictions {
        let Some(text) = texts.get(&record.key()) else { continue };
        for s in &record.spans {
            if let Some(surface) = text.get(s.start..s.end) {
                out.push(SurfacePrediction { normalized: normalize(surface), p: s.p });
            }
        }
    }
    out
}

fn share(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// For each threshold, compares the mentions labeled CG (`p > threshold`)
/// against the action-target list by normalized surface.
pub fn at_overlap(
    predictions: &[SurfacePrediction],
    action_targets: &[ActionTarget],
    thresholds: &[f64],
    mode: OverlapMode,
) -> Result<Vec<OverlapReport>, EvalError> {
    if thresholds.iter().any(|t| !(0.0..=1.0).contains(t)) || thresholds.windows(2).any(|w| w[0] > w[1]) {
        return Err(EvalError::InvalidThresholds(thresholds.to_vec()));
    }
    let mut at_counts: BTreeMap<&str, usize> = BTreeMap::new();
    for at in action_targets {
        *at_counts.entry(at.normalized.as_str()).or_default() += at.count;
    }
    let reports = thresholds
        .iter()
        .map(|&threshold| {
            let labeled: Vec<&str> = predictions.iter().filter(|p| exceeds(p.p, threshold)).map(|p| p.normalized.as_str()).collect();
            let surfaces: BTreeSet<&str> = labeled.iter().copied().collect();
            let (cgs_in_at, ats_labeled, labeled_n) = match mode {
                OverlapMode::AllAts => {
                    let in_at = labeled.iter().filter(|s| at_counts.contains_key(*s)).count();
                    let covered: usize = at_counts.iter().filter(|(s, _)| surfaces.contains(*s)).map(|(_, c)| c).sum();
                    let total: usize = at_counts.values().sum();
                    (share(in_at, labeled.len()), share(covered, total), labeled.len())
                }
                OverlapMode::UniqueAts => {
                    let both = surfaces.iter().filter(|s| at_counts.contains_key(*s)).count();
                    (share(both, surfaces.len()), share(both, at_counts.len()), surfaces.len())
                }
            };
            OverlapReport { threshold, share_cgs_in_at: cgs_in_at, share_ats_labeled: ats_labeled, labeled: labeled_n, mode }
        })
        .collect();
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(s: &str, p: f64) -> SurfacePrediction {
        SurfacePrediction { normalized: s.into(), p }
    }

    fn at(s: &str, count: usize) -> ActionTarget {
        ActionTarget { surface: s.into(), normalized: s.into(), count }
    }

    #[test]
    fn everything_labeled_covers_all_targets() {
        let preds = [sp("lamp", 1.0), sp("door", 1.0), sp("key", 1.0)];
        let ats = [at("lamp", 3), at("door", 1)];
        for mode in [OverlapMode::AllAts, OverlapMode::UniqueAts] {
            let r = &at_overlap(&preds, &ats, &[0.5], mode).unwrap()[0];
            assert_eq!(r.share_ats_labeled, Some(1.0));
            assert_eq!(r.share_cgs_in_at, Some(2.0 / 3.0));
        }
    }

    #[test]
    fn modes_weight_differently() {
        let preds = [sp("lamp", 0.9), sp("lamp", 0.9), sp("rug", 0.9)];
        let ats = [at("lamp", 1), at("door", 3)];
        let all = &at_overlap(&preds, &ats, &[0.5], OverlapMode::AllAts).unwrap()[0];
        assert_eq!((all.share_cgs_in_at, all.share_ats_labeled), (Some(2.0 / 3.0), Some(0.25)));
        let uniq = &at_overlap(&preds, &ats, &[0.5], OverlapMode::UniqueAts).unwrap()[0];
        assert_eq!((uniq.share_cgs_in_at, uniq.share_ats_labeled), (Some(0.5), Some(0.5)));
    }

    #[test]
    fn empty_labeled_set_is_undefined() {
        let r = &at_overlap(&[sp("lamp", 0.6)], &[at("lamp", 1)], &[0.5, 0.95], OverlapMode::AllAts).unwrap();
        assert_eq!(r[0].share_cgs_in_at, Some(1.0));
        assert_eq!(r[1].share_cgs_in_at, None);
        assert_eq!(r[1].share_ats_labeled, Some(0.0));
        assert_eq!(at_overlap(&[], &[], &[0.5], OverlapMode::UniqueAts).unwrap()[0].share_ats_labeled, None);
    }

    #[test]
    fn rejects_unsorted_thresholds() {
        assert!(at_overlap(&[], &[], &[0.8, 0.5], OverlapMode::AllAts).is_err());
        assert!(at_overlap(&[], &[], &[1.5], OverlapMode::AllAts).is_err());
    }
}
