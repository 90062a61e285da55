use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::CgPredictor;
use crate::corpus::tripod::{TripodSynopsis, TURNING_POINTS};

const TP: usize = TURNING_POINTS;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TurningPointProfile {
    /// CGs in each turning-point sentence minus the story's mean over its
    /// five turning points, averaged across stories.
    pub delta_cg_per_sentence: [f64; TP],
    /// Same for whitespace-delimited words.
    pub delta_words_per_sentence: [f64; TP],
    pub stories: usize,
    /// Synopses with malformed turning points.
    pub skipped: usize,
}

fn deviations(values: [f64; TP]) -> [f64; TP] {
    let mean = values.iter().sum::<f64>() / TP as f64;
    values.map(|v| v - mean)
}

/// Per-story deltas `(cg, words)`; `None` if the story is malformed.
pub fn story_deltas(story: &TripodSynopsis, predictor: &dyn CgPredictor) -> Option<([f64; TP], [f64; TP])> {
    story.validate().ok()?;
    let mut cgs = [0.0; TP];
    let mut words = [0.0; TP];
    for (i, sentence) in story.turning_point_sentences().enumerate() {
        cgs[i] = predictor.cg_surfaces(sentence).len() as f64;
        words[i] = sentence.split_whitespace().count() as f64;
    }
    Some((deviations(cgs), deviations(words)))
}

pub fn turning_point_profile(synopses: &[TripodSynopsis], predictor: &dyn CgPredictor) -> TurningPointProfile {
    let mut cg_sum = [0.0; TP];
    let mut word_sum = [0.0; TP];
    let mut stories = 0;
    for story in synopses {
        let Some((cg, words)) = story_deltas(story, predictor) else { continue };
        for i in 0..TP {
            cg_sum[i] += cg[i];
            word_sum[i] += words[i];
        }
        stories += 1;
    }
    let n = stories.max(1) as f64;
    TurningPointProfile {
        delta_cg_per_sentence: cg_sum.map(|v| v / n),
        delta_words_per_sentence: word_sum.map(|v| v / n),
        stories,
        skipped: synopses.len() - stories,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OccurrenceMatrix {
    /// `cells[i][j]`: CGs first seen at turning point `i` that appear at
    /// `j >= i`, as a percentage of all first occurrences.
    pub cells: [[f64; TP]; TP],
    /// Distinct (story, surface) pairs seen at any turning point.
    pub first_occurrences: usize,
    pub stories: usize,
    pub skipped: usize,
}

impl OccurrenceMatrix {
    pub fn diagonal(&self) -> [f64; TP] {
        std::array::from_fn(|i| self.cells[i][i])
    }
}

/// Counts are pooled over stories, then divided by the number of first
/// occurrences. With no CGs at all, every cell is 0.
pub fn occurrence_matrix(synopses: &[TripodSynopsis], predictor: &dyn CgPredictor) -> OccurrenceMatrix {
    let mut counts = [[0usize; TP]; TP];
    let mut stories = 0;
    for story in synopses {
        if story.validate().is_err() {
            continue;
        }
        stories += 1;
        let mut first: BTreeMap<String, usize> = BTreeMap::new();
        for (i, sentence) in story.turning_point_sentences().enumerate() {
            let surfaces: BTreeSet<String> = predictor.cg_surfaces(sentence).into_iter().collect();
            for surface in surfaces {
                let f = *first.entry(surface).or_insert(i);
                counts[f][i] += 1;
            }
        }
    }
    let total: usize = (0..TP).map(|i| counts[i][i]).sum();
    let scale = if total == 0 { 0.0 } else { 100.0 / total as f64 };
    OccurrenceMatrix {
        cells: counts.map(|row| row.map(|c| c as f64 * scale)),
        first_occurrences: total,
        stories,
        skipped: synopses.len() - stories,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::normalize;

    fn story(sentences: &[&str]) -> TripodSynopsis {
        TripodSynopsis {
            story_id: "s".into(),
            sentences: sentences.iter().map(|s| s.to_string()).collect(),
            turning_points: vec![0, 1, 2, 3, 4],
        }
    }

    /// Every capitalized word is a CG.
    fn caps(sentence: &str) -> Vec<String> {
        sentence.split_whitespace().filter(|w| w.starts_with(char::is_uppercase)).map(normalize).collect()
    }

    fn nothing(_: &str) -> Vec<String> {
        Vec::new()
    }

    #[test]
    fn word_deltas() {
        let s = story(&["a b c d e f g h i j", "a b c d e f", "a b c d e f", "a b c d e f", "a b c d e f"]);
        let profile = turning_point_profile(&[s], &nothing);
        let expected = [3.2, -0.8, -0.8, -0.8, -0.8];
        for (got, want) in profile.delta_words_per_sentence.iter().zip(expected) {
            assert!((got - want).abs() < 1e-12);
        }
        assert_eq!(profile.delta_cg_per_sentence, [0.0; 5]);
    }

    #[test]
    fn malformed_stories_are_skipped() {
        let mut bad = story(&["x"; 5]);
        bad.turning_points = vec![0, 1];
        let profile = turning_point_profile(&[bad.clone(), story(&["x"; 5])], &caps);
        assert_eq!((profile.stories, profile.skipped), (1, 1));
        assert_eq!(occurrence_matrix(&[bad], &caps).skipped, 1);
    }

    #[test]
    fn single_cg_reoccurring() {
        let s = story(&["Gun here", "nothing", "the Gun again", "nothing", "nothing"]);
        let m = occurrence_matrix(&[s], &caps);
        assert_eq!(m.cells[0][0], 100.0);
        assert_eq!(m.cells[0][2], 100.0);
        assert_eq!(m.diagonal().iter().sum::<f64>(), 100.0);
        assert_eq!(m.cells[2][0], 0.0);
    }

    #[test]
    fn one_tp_each() {
        let s = story(&["Gun", "Key", "Rope", "Map", "Boat"]);
        let m = occurrence_matrix(&[s], &caps);
        assert_eq!(m.diagonal(), [20.0; 5]);
        for i in 0..5 {
            for j in 0..5 {
                if i != j {
                    assert_eq!(m.cells[i][j], 0.0);
                }
            }
        }
    }

    #[test]
    fn no_cgs_gives_zero_matrix() {
        let m = occurrence_matrix(&[story(&["x"; 5])], &nothing);
        assert_eq!(m.first_occurrences, 0);
        assert_eq!(m.cells, [[0.0; 5]; 5]);
    }
}
