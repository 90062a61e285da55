//! Evaluation and analysis of CG predictions.
//!
//! * [`span_metrics`]: exact-match span precision/recall/F1 plus token-level
//!   BIO accuracy against a gold corpus.
//! * [`category_ratios`]: which NER categories are dominated by CGs.
//! * [`at_overlap`]: agreement between thresholded predictions and the action
//!   targets of human players.
//! * [`turning_point_profile`] and [`occurrence_matrix`]: CG density and
//!   recurrence across the five turning points of annotated synopses.

mod categories;
mod narrative;
mod overlap;
pub mod report;
mod spans;

use thiserror::Error;

pub use categories::{category_ratios, read_ner, CategoryRatioRow, NerDocument, NerSpan};
pub use narrative::{occurrence_matrix, story_deltas, turning_point_profile, OccurrenceMatrix, TurningPointProfile};
pub use overlap::{at_overlap, surface_predictions, OverlapMode, OverlapReport, SurfacePrediction};
pub use spans::{span_metrics, thresholded, Counts, EvalReport, PredictedSpans};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("thresholds must lie in [0, 1] and ascend: {0:?}")]
    InvalidThresholds(Vec<f64>),
}

/// Anything that can name the CGs mentioned in a sentence. Returned surfaces
/// are normalized; repeats mean repeated mentions.
pub trait CgPredictor {
    fn cg_surfaces(&self, sentence: &str) -> Vec<String>;
}

impl<F> CgPredictor for F
where
    F: Fn(&str) -> Vec<String>,
{
    fn cg_surfaces(&self, sentence: &str) -> Vec<String> {
        self(sentence)
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}
