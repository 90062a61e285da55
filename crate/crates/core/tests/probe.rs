use std::collections::BTreeSet;
use std::fs;

use chekhov_core::engine::{open_session, MockWorld, Session, SessionConfig, StoryRef};
use chekhov_core::explorer::{execute_walkthrough, LocationRecord, Walkthrough};
use chekhov_core::probe::{
    classify_triviality, extract_candidates, label_location, probe_candidate, TrivialityPatternSet, Verdict,
};
use chekhov_core::text::Stopwords;
use tempfile::TempDir;

const WORKSHOP: &str = "\
ROOM Workshop
DESC A cluttered workshop. A lamp hangs over the bench, and dust covers a heavy door.
DESC Another lamp lies broken in the corner.
EXIT north Yard
OBJECT lamp RESPONSE The lamp flickers.
OBJECT door RESPONSE The door is bolted from the other side.
OBJECT dust TRIVIAL
ROOM Yard
DESC A yard. There is a brass lamp on a barrel.
EXIT south Workshop
OBJECT brass lamp RESPONSE Polished brass.
OBJECT lamp RESPONSE Which lamp?
";

fn setup(dir: &TempDir) -> (Session, Vec<LocationRecord>, MockWorld) {
    let path = dir.path().join("workshop.world");
    fs::write(&path, WORKSHOP).unwrap();
    let story = StoryRef::from_file("workshop", path).unwrap();
    let mut session = open_session(story, SessionConfig::default()).unwrap();
    let wt = Walkthrough::new("workshop", vec!["north".into()], "test").unwrap();
    let records = execute_walkthrough(&mut session, &wt).unwrap();
    (session, records, MockWorld::parse(WORKSHOP).unwrap())
}

fn slices<'a>(text: &'a str, spans: &[chekhov_core::Span]) -> Vec<&'a str> {
    spans.iter().map(|s| &text[s.start..s.end]).collect()
}

#[test]
fn labels_match_declared_objects() {
    let dir = TempDir::new().unwrap();
    let (mut session, records, world) = setup(&dir);
    let sw = Stopwords::builtin();
    let patterns = TrivialityPatternSet::builtin();
    let ann = label_location(&mut session, &records[0], &sw, &patterns);
    let text = &ann.record.description;
    assert!(ann.evidence.len() >= 6, "{}", ann.evidence.len());
    assert_eq!(slices(text, &ann.spans), vec!["lamp", "door", "lamp"]);

    let declared: BTreeSet<&str> = world.room("Workshop").unwrap().nontrivial_objects().collect();
    let candidates: BTreeSet<String> = extract_candidates(text, &sw).into_iter().map(|c| c.normalized).collect();
    let oracle: BTreeSet<&str> = declared.into_iter().filter(|o| candidates.contains(*o)).collect();
    let got: BTreeSet<&str> = ann.labeled_surfaces().into_iter().collect();
    assert_eq!(got, oracle);
    assert_eq!(ann.error_count(), 0);
}

#[test]
fn longer_winner_claims_the_occurrence() {
    let dir = TempDir::new().unwrap();
    let (mut session, records, _) = setup(&dir);
    let ann = label_location(&mut session, &records[1], &Stopwords::builtin(), &TrivialityPatternSet::builtin());
    assert_eq!(slices(&ann.record.description, &ann.spans), vec!["brass lamp"]);
    assert_eq!(ann.suppressed, vec!["lamp".to_string()]);
}

#[test]
fn probes_report_verdicts() {
    let dir = TempDir::new().unwrap();
    let (mut session, records, _) = setup(&dir);
    let sw = Stopwords::builtin();
    let patterns = TrivialityPatternSet::builtin();
    let cands = extract_candidates(&records[0].description, &sw);
    let verdict = |surface: &str, session: &mut Session| {
        let c = cands.iter().find(|c| c.normalized == surface).unwrap();
        probe_candidate(session, &records[0], c, &patterns)
    };
    let lamp = verdict("lamp", &mut session);
    assert_eq!(lamp.command, "examine lamp");
    assert_eq!(lamp.verdict, Verdict::Nontrivial);
    assert_eq!(verdict("dust", &mut session).verdict, Verdict::Trivial);
    assert_eq!(verdict("bench", &mut session).verdict, Verdict::Trivial);

    let mut zzqf = cands[0].clone();
    zzqf.normalized = "zzqf".into();
    assert_eq!(probe_candidate(&mut session, &records[0], &zzqf, &patterns).verdict, Verdict::Trivial);
}

#[test]
fn probe_errors_are_recorded() {
    let dir = TempDir::new().unwrap();
    let (mut session, records, _) = setup(&dir);
    let mut broken = records[0].clone();
    broken.prefix = vec!["north".into(); 20_000];
    let cands = extract_candidates(&broken.description, &Stopwords::builtin());
    let result = probe_candidate(&mut session, &broken, &cands[0], &TrivialityPatternSet::builtin());
    assert_eq!(result.verdict, Verdict::Error);
    assert!(result.error.is_some());
}

#[test]
fn room_without_candidates() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("void.world");
    fs::write(&path, "ROOM The\nDESC It is a.\n").unwrap();
    let story = StoryRef::from_file("void", path).unwrap();
    let mut session = open_session(story, SessionConfig::default()).unwrap();
    let wt = Walkthrough::new("void", vec!["wait".into()], "t").unwrap();
    let records = execute_walkthrough(&mut session, &wt).unwrap();
    let ann = label_location(&mut session, &records[0], &Stopwords::builtin(), &TrivialityPatternSet::builtin());
    assert!(ann.spans.is_empty() && ann.evidence.is_empty());
}

#[test]
fn pattern_file_drives_triviality() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("patterns.txt");
    fs::write(&path, "# refusals\nnothing happens\n").unwrap();
    let patterns = TrivialityPatternSet::from_file(&path).unwrap();
    assert_eq!(classify_triviality("Nothing HAPPENS here.", &patterns), Verdict::Trivial);
    assert_eq!(classify_triviality("You can't see any such thing.", &patterns), Verdict::Nontrivial);
    assert_eq!(classify_triviality("You can't see any such thing.", &TrivialityPatternSet::builtin()), Verdict::Trivial);
    assert_eq!(classify_triviality("The lamp glows with a faint inner light.", &TrivialityPatternSet::builtin()), Verdict::Nontrivial);
    assert_eq!(classify_triviality("  \n", &patterns), Verdict::Trivial);
}
