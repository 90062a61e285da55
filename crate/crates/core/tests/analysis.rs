use std::collections::BTreeMap;

use chekhov_core::baseline::{apply_threshold, predict, train_lexicon, Lexicon, Prediction};
use chekhov_core::corpus::{from_bio, to_bio, tokenize, CgifRecord, ActionTarget, TripodSynopsis};
use chekhov_core::engine::LocationKey;
use chekhov_core::eval::{
    at_overlap, occurrence_matrix, span_metrics, story_deltas, turning_point_profile, OverlapMode, PredictedSpans,
    SurfacePrediction,
};
use chekhov_core::explorer::DiscoveredBy;
use chekhov_core::text::{normalize, Stopwords};
use chekhov_core::Span;
use proptest::prelude::*;

fn record(room: &str, text: &str, spans: Vec<Span>) -> CgifRecord {
    CgifRecord {
        game_id: "g".into(),
        location_key: LocationKey { room_name: room.into(), body_digest: "00000000".into() },
        text: text.into(),
        spans,
        discovered_by: DiscoveredBy::RandomWalk,
        pipeline_version: "test".into(),
    }
}

/// Words separated by single spaces, with a random subset of
/// non-overlapping word ranges as spans.
fn annotated_text() -> impl Strategy<Value = (String, Vec<Span>, Vec<Span>)> {
    (prop::collection::vec("[a-z]{1,6}[,.]?", 1..12), prop::collection::vec(0u8..4, 12), prop::collection::vec(0u8..4, 12))
        .prop_map(|(words, g, p)| {
            let text = words.join(" ");
            let mut offsets = Vec::new();
            let mut pos = 0;
            for w in &words {
                offsets.push((pos, pos + w.len()));
                pos += w.len() + 1;
            }
            let spans = |choice: &[u8]| {
                let mut out = Vec::new();
                let mut i = 0;
                while i < offsets.len() {
                    let len = choice[i] as usize;
                    if len > 0 && i + len <= offsets.len() {
                        out.push(Span::new(offsets[i].0, offsets[i + len - 1].1));
                        i += len;
                    } else {
                        i += 1;
                    }
                }
                out
            };
            (text, spans(&g), spans(&p))
        })
}

/// Per-token tag by direct inspection: which span covers the token, and did
/// the same span cover the previous one.
fn oracle_tags(text: &str, spans: &[Span]) -> Vec<char> {
    let tokens = tokenize(text);
    let mut out = Vec::new();
    for (i, t) in tokens.iter().enumerate() {
        let owner = |tok: &chekhov_core::corpus::Token| {
            let mut best: Option<Span> = None;
            for s in spans {
                if s.start <= tok.start && tok.end <= s.end && best.is_none_or(|b| *s < b) {
                    best = Some(*s);
                }
            }
            best
        };
        let me = owner(t);
        let prev = if i > 0 { owner(&tokens[i - 1]) } else { None };
        out.push(match me {
            None => 'O',
            Some(s) if prev == Some(s) => 'I',
            Some(_) => 'B',
        });
    }
    out
}

proptest! {
    #[test]
    fn span_metrics_match_pairwise_counting(docs in prop::collection::vec(annotated_text(), 1..5)) {
        let mut gold = Vec::new();
        let mut preds = PredictedSpans::new();
        let (mut tp, mut fp, mut fn_, mut correct, mut total) = (0, 0, 0, 0, 0);
        for (i, (text, g, p)) in docs.iter().enumerate() {
            let r = record(&format!("R{i}"), text, g.clone());
            preds.insert(r.key(), p.clone());
            gold.push(r);
            for gs in g {
                if p.iter().any(|ps| ps == gs) { tp += 1 } else { fn_ += 1 }
            }
            for ps in p {
                if !g.iter().any(|gs| gs == ps) { fp += 1 }
            }
            let (a, b) = (oracle_tags(text, g), oracle_tags(text, p));
            total += a.len();
            correct += a.iter().zip(&b).filter(|(x, y)| x == y).count();
        }
        let report = span_metrics(&gold, &preds);
        prop_assert_eq!((report.counts.tp, report.counts.fp, report.counts.fn_), (tp, fp, fn_));
        prop_assert_eq!((report.counts.tokens_correct, report.counts.tokens_total), (correct, total));
        for v in [report.token_accuracy, report.span_precision, report.span_recall, report.span_f1] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn bio_round_trip_keeps_token_coverage((text, spans, _) in annotated_text()) {
        let doc = to_bio(&record("R", &text, spans.clone()));
        prop_assert!(doc.validate().is_ok());
        prop_assert_eq!(from_bio(&doc), spans);
    }

    #[test]
    fn thresholds_are_monotone(ps in prop::collection::vec(0.0f64..=1.0, 0..40), a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let preds: Vec<Prediction> = ps.iter().enumerate().map(|(i, &p)| Prediction { start: i, end: i + 1, p }).collect();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let strict = apply_threshold(&preds, hi);
        let loose = apply_threshold(&preds, lo);
        prop_assert!(strict.iter().all(|s| loose.contains(s)));
    }

    #[test]
    fn profile_deltas_sum_to_zero(counts in prop::collection::vec(0usize..6, 5), words in prop::collection::vec(1usize..15, 5)) {
        let sentences: Vec<String> = counts.iter().zip(&words).map(|(&c, &w)| {
            let mut s: Vec<String> = (0..c).map(|k| format!("Cg{k}")).collect();
            s.extend((0..w).map(|_| "word".to_string()));
            s.join(" ")
        }).collect();
        let story = TripodSynopsis { story_id: "s".into(), sentences, turning_points: vec![0, 1, 2, 3, 4] };
        let (cg, w) = story_deltas(&story, &caps).unwrap();
        prop_assert!(cg.iter().sum::<f64>().abs() < 1e-9);
        prop_assert!(w.iter().sum::<f64>().abs() < 1e-9);
    }
}

fn caps(sentence: &str) -> Vec<String> {
    sentence.split_whitespace().filter(|w| w.starts_with(char::is_uppercase)).map(normalize).collect()
}

#[test]
fn identical_inputs_score_one() {
    let r = record("R", "a lamp, a door", vec![Span::new(2, 6), Span::new(10, 14)]);
    let mut preds = PredictedSpans::new();
    preds.insert(r.key(), r.spans.clone());
    let report = span_metrics(&[r], &preds);
    assert_eq!((report.span_f1, report.token_accuracy), (1.0, 1.0));
}

#[test]
fn overlap_fixture_matches_enumeration() {
    // 20 predicted mentions over 7 surfaces; 10 action targets.
    let preds: Vec<SurfacePrediction> = [
        ("lamp", 0.97), ("lamp", 0.97), ("lamp", 0.97), ("door", 0.9), ("door", 0.9),
        ("key", 0.82), ("key", 0.82), ("rug", 0.7), ("rug", 0.7), ("rug", 0.7),
        ("chest", 0.66), ("chest", 0.66), ("wall", 0.6), ("wall", 0.6), ("wall", 0.6),
        ("sky", 0.55), ("sky", 0.55), ("sky", 0.55), ("lamp", 0.97), ("door", 0.9),
    ]
    .iter()
    .map(|&(s, p)| SurfacePrediction { normalized: s.into(), p })
    .collect();
    let ats: Vec<ActionTarget> = [("lamp", 5), ("door", 2), ("key", 1), ("chest", 3), ("north", 4), ("sword", 1), ("rope", 1), ("boat", 1), ("rug", 1), ("gem", 1)]
        .iter()
        .map(|&(s, c)| ActionTarget { surface: s.into(), normalized: s.into(), count: c })
        .collect();
    let thresholds = [0.5, 0.65, 0.8, 0.95];

    // thresholds -> labeled mentions / labeled surfaces, by hand:
    // 0.5: all 20 mentions, surfaces {lamp door key rug chest wall sky}
    // 0.65: 14 mentions (no wall, sky) ; 0.8: 9 (lamp x4, door x3, key x2) ; 0.95: 4 (lamp)
    // mentions in AT: 0.5 -> lamp4 door3 key2 rug3 chest2 = 14 ; 0.65 -> 14 ; 0.8 -> 9 ; 0.95 -> 4
    // AT occurrences total 20; covered: 0.5 -> 5+2+1+3+1 = 12 ; 0.65 -> 12 ; 0.8 -> 8 ; 0.95 -> 5
    let all = at_overlap(&preds, &ats, &thresholds, OverlapMode::AllAts).unwrap();
    let got: Vec<_> = all.iter().map(|r| (r.share_cgs_in_at.unwrap(), r.share_ats_labeled.unwrap())).collect();
    assert_eq!(got, vec![(14.0 / 20.0, 12.0 / 20.0), (14.0 / 14.0, 12.0 / 20.0), (9.0 / 9.0, 8.0 / 20.0), (4.0 / 4.0, 5.0 / 20.0)]);

    // unique: labeled surfaces 7, 5, 3, 1; in AT 5, 5, 3, 1; AT surfaces 10
    let uniq = at_overlap(&preds, &ats, &thresholds, OverlapMode::UniqueAts).unwrap();
    let got: Vec<_> = uniq.iter().map(|r| (r.share_cgs_in_at.unwrap(), r.share_ats_labeled.unwrap())).collect();
    assert_eq!(got, vec![(5.0 / 7.0, 0.5), (1.0, 0.5), (1.0, 0.3), (1.0, 0.1)]);
}

#[test]
fn matrix_invariants_on_generated_stories() {
    let stories: Vec<TripodSynopsis> = (0..10)
        .map(|k| TripodSynopsis {
            story_id: format!("s{k}"),
            sentences: (0..8).map(|i| format!("Gun{} and Key{} meet Rope{}", (i + k) % 3, i % 4, (i * k) % 5)).collect(),
            turning_points: vec![0, 2, 3, 5, 7],
        })
        .collect();
    let m = occurrence_matrix(&stories, &caps);
    assert!((m.diagonal().iter().sum::<f64>() - 100.0).abs() <= 0.1);
    for i in 0..5 {
        for j in 0..5 {
            assert!((0.0..=100.0).contains(&m.cells[i][j]));
            if j < i {
                assert_eq!(m.cells[i][j], 0.0);
            }
        }
    }
    let profile = turning_point_profile(&stories, &caps);
    assert_eq!(profile.stories, 10);
    assert!(profile.delta_cg_per_sentence.iter().sum::<f64>().abs() < 1e-9);
}

/// Every gold surface is a two-word name that is always gold; filler words
/// never are.
fn memorization_corpus() -> Vec<CgifRecord> {
    let names = ["brass lamp", "iron key", "oak door", "silk rope", "glass orb", "stone idol"];
    let filler = ["dusty", "floor", "corner", "window", "shadow"];
    (0..30)
        .map(|i| {
            let mut text = String::new();
            let mut spans = Vec::new();
            for k in 0..3 {
                text.push_str(&format!("The {}. ", filler[(i + k) % filler.len()]));
                let name = names[(i * 3 + k) % names.len()];
                text.push_str("A ");
                spans.push(Span::new(text.len(), text.len() + name.len()));
                text.push_str(name);
                text.push_str(". ");
            }
            record(&format!("R{i}"), text.trim_end(), spans)
        })
        .collect()
}

#[test]
fn baseline_memorizes_its_training_data() {
    let sw = Stopwords::builtin();
    let corpus = memorization_corpus();
    let lexicon = train_lexicon(&corpus, &sw, 1.0).unwrap();
    let mut preds = PredictedSpans::new();
    for r in &corpus {
        preds.insert(r.key(), apply_threshold(&predict(&lexicon, &r.text, &sw), 0.5));
    }
    let report = span_metrics(&corpus, &preds);
    assert!(report.span_f1 >= 0.9, "{report:?}");
}

#[test]
fn predictions_stay_inside_the_unit_interval() {
    let sw = Stopwords::builtin();
    let lexicon = train_lexicon(&memorization_corpus(), &sw, 0.3).unwrap();
    let text = "A brass lamp, a strange gizmo and the dusty floor.";
    let preds = predict(&lexicon, text, &sw);
    assert!(!preds.is_empty());
    assert!(preds.iter().all(|p| p.p > 0.0 && p.p < 1.0 && text.is_char_boundary(p.start) && p.end <= text.len()));
    let unseen: BTreeMap<_, _> = preds.iter().map(|p| (&text[p.start..p.end], p.p)).collect();
    assert_eq!(unseen["strange gizmo"], 0.5);
    assert!(Lexicon::new(-1.0).is_err());
}
