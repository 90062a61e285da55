//! `walk` and `probe`.

use std::collections::{BTreeMap, HashSet};
use std::fs::{self, OpenOptions};
use std::io::{BufRead, Write};
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};

use anyhow::{bail, Context, Result};
use chekhov_core::corpus::CgifRecord;
use chekhov_core::engine::{detect_nondeterminism, file_checksum, open_session, LocationKey, StoryRef};
use chekhov_core::explorer::{execute_walkthrough, merge_location_sets, random_walk, LocationRecord, WalkConfig};
use chekhov_core::probe::{label_location, AnnotatedLocation, TrivialityPatternSet};
use chekhov_core::text::Stopwords;
use chekhov_core::PIPELINE_VERSION;
use rayon::prelude::*;

use super::Outcome;
use crate::games::{discover, session_config, walkthrough_for, GameFile};
use crate::manifest::{stamp, Counters, GameEntry, GameStatus, RunManifest, MANIFEST_FILE};
use crate::output::{read_jsonl, write_cgif, write_jsonl};
use crate::settings::Settings;

pub const LOCATIONS_FILE: &str = "locations.jsonl";
pub const CGIF_FILE: &str = "cgif.jsonl";
pub const AUDIT_FILE: &str = "probe_audit.jsonl";
const PARTIAL_DIR: &str = "probe";

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?)
}

/// Settings that determine exploration output, recorded in the manifest.
fn snapshot(s: &Settings) -> BTreeMap<String, String> {
    let path = |p: &Option<std::path::PathBuf>| p.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
    BTreeMap::from([
        ("games".to_string(), path(&s.games)),
        ("walkthroughs".to_string(), path(&s.walkthroughs)),
        ("stopwords".to_string(), path(&s.stopwords)),
        ("steps".to_string(), s.steps.to_string()),
        ("seed".to_string(), s.seed.to_string()),
        ("direction_bias".to_string(), s.direction_bias.to_string()),
        ("max_moves".to_string(), s.max_moves.to_string()),
        ("timeout_ms".to_string(), s.timeout.as_millis().to_string()),
    ])
}

fn explore_game(game: &GameFile, settings: &Settings, stopwords: &Stopwords) -> Result<Vec<LocationRecord>> {
    let story = StoryRef::from_file(&game.game_id, &game.path)?;
    let cfg = session_config(settings, &game.game_id, &game.path)?;
    let mut lists = Vec::new();
    if let Some(wt) = walkthrough_for(settings.walkthroughs.as_deref(), &game.game_id)? {
        let mut session = open_session(story.clone(), cfg.clone())?;
        lists.push(execute_walkthrough(&mut session, &wt)?);
    }
    let walk = WalkConfig { steps: settings.steps, rng_seed: cfg.rng_seed, direction_bias: settings.direction_bias, ..Default::default() };
    let mut session = open_session(story, cfg)?;
    lists.push(random_walk(&mut session, &walk, stopwords)?);
    Ok(merge_location_sets(&lists))
}

pub fn walk(settings: &Settings) -> Result<Outcome> {
    let Some(dir) = &settings.games else { bail!("--games is required") };
    let games = discover(dir)?;
    if games.is_empty() {
        bail!("no story files in {}", dir.display());
    }
    WalkConfig { steps: settings.steps, direction_bias: settings.direction_bias, ..Default::default() }.validate()?;
    let stopwords = settings.stopword_list()?;

    let results: Vec<Result<Vec<LocationRecord>>> =
        pool(settings.jobs)?.install(|| games.par_iter().map(|g| explore_game(g, settings, &stopwords)).collect());

    let mut entries = BTreeMap::new();
    let mut locations = Vec::new();
    for (game, result) in games.iter().zip(results) {
        let mut entry = GameEntry {
            story: game.path.display().to_string(),
            checksum: file_checksum(&game.path).unwrap_or_default(),
            status: GameStatus::Pending,
            counters: Counters::default(),
            message: None,
        };
        match result {
            Ok(records) => {
                entry.status = GameStatus::Explored;
                entry.counters.locations = records.len();
                locations.extend(records);
            }
            Err(e) => {
                eprintln!("walk {}: {e:#}", game.game_id);
                entry.status = GameStatus::Failed;
                entry.message = Some(format!("{e:#}"));
            }
        }
        entries.insert(game.game_id.clone(), entry);
    }
    let manifest = RunManifest::new(snapshot(settings), entries);

    let out = &settings.out;
    // A new walk invalidates earlier probe progress.
    let partial = out.join(PARTIAL_DIR);
    if partial.exists() {
        fs::remove_dir_all(&partial).with_context(|| format!("clearing {}", partial.display()))?;
    }
    write_jsonl(&out.join(LOCATIONS_FILE), &locations)?;
    manifest.save(&out.join(MANIFEST_FILE))?;
    stamp(out, "walk")?;

    let explored = manifest.games.values().filter(|g| g.status == GameStatus::Explored).count();
    println!("walk: {explored}/{} games explored, {} locations", games.len(), locations.len());
    Ok(if explored == games.len() { Outcome::Success } else { Outcome::Partial })
}

/// Annotated locations already written for a game. A torn final line (from
/// an interrupted write) is dropped and the file truncated to the valid part.
fn load_partial(path: &Path) -> Result<Vec<AnnotatedLocation>> {
    let Ok(file) = fs::File::open(path) else { return Ok(Vec::new()) };
    let mut done = Vec::new();
    let mut valid_len = 0u64;
    for line in std::io::BufReader::new(file).lines() {
        let line = line?;
        match serde_json::from_str::<AnnotatedLocation>(&line) {
            Ok(a) => {
                done.push(a);
                valid_len += line.len() as u64 + 1;
            }
            Err(_) => break,
        }
    }
    let file = OpenOptions::new().write(true).open(path)?;
    file.set_len(valid_len)?;
    Ok(done)
}

enum GameResult {
    Probed,
    Nondeterministic,
    Failed(String),
    Interrupted,
}

struct ProbeContext<'a> {
    settings: &'a Settings,
    stopwords: &'a Stopwords,
    patterns: &'a TrivialityPatternSet,
    budget: &'a AtomicUsize,
}

fn probe_game(ctx: &ProbeContext<'_>, game_id: &str, entry: &GameEntry, locations: &[&LocationRecord], partial: &Path) -> Result<GameResult> {
    let story = StoryRef::from_file(game_id, &entry.story)?;
    if story.checksum != entry.checksum {
        return Ok(GameResult::Failed(format!("{} changed since the walk", entry.story)));
    }
    let cfg = session_config(ctx.settings, game_id, Path::new(&entry.story))?;
    for record in locations {
        let mut prefix = record.prefix.clone();
        prefix.push("look".to_string());
        if detect_nondeterminism(&story, &cfg, &prefix)? {
            return Ok(GameResult::Nondeterministic);
        }
    }
    let done: HashSet<LocationKey> = load_partial(partial)?.into_iter().map(|a| a.record.location).collect();
    let mut file = OpenOptions::new().create(true).append(true).open(partial).with_context(|| format!("opening {}", partial.display()))?;
    let mut session = open_session(story, cfg)?;
    for record in locations.iter().filter(|r| !done.contains(&r.location)) {
        if ctx.budget.fetch_update(Ordering::SeqCst, Ordering::SeqCst, |b| b.checked_sub(1)).is_err() {
            return Ok(GameResult::Interrupted);
        }
        let annotated = label_location(&mut session, record, ctx.stopwords, ctx.patterns);
        let mut line = serde_json::to_vec(&annotated)?;
        line.push(b'\n');
        file.write_all(&line)?;
        file.flush()?;
    }
    Ok(GameResult::Probed)
}

pub fn probe(settings: &Settings, max_locations: Option<usize>) -> Result<Outcome> {
    let out = &settings.out;
    let manifest_path = out.join(MANIFEST_FILE);
    if !manifest_path.is_file() {
        bail!("no manifest at {}; run walk first", manifest_path.display());
    }
    let mut manifest = RunManifest::load(&manifest_path)?;
    let locations: Vec<LocationRecord> = read_jsonl(&out.join(LOCATIONS_FILE))?;

    // engine settings come from the walk so replays match
    let mut run = settings.clone();
    for key in ["seed", "max_moves", "timeout_ms"] {
        if let Some(v) = manifest.config.get(key) {
            run.apply(key, v)?;
        }
    }
    let stopwords = settings.stopword_list()?;
    let patterns = settings.pattern_set()?;
    let budget = AtomicUsize::new(max_locations.unwrap_or(usize::MAX));
    let ctx = ProbeContext { settings: &run, stopwords: &stopwords, patterns: &patterns, budget: &budget };

    let mut by_game: BTreeMap<&str, Vec<&LocationRecord>> = BTreeMap::new();
    for r in &locations {
        by_game.entry(r.game_id.as_str()).or_default().push(r);
    }
    let partial_dir = out.join(PARTIAL_DIR);
    fs::create_dir_all(&partial_dir)?;
    let todo: Vec<(&String, &GameEntry)> = manifest.games.iter().filter(|(_, g)| g.status == GameStatus::Explored).collect();
    let results: Vec<Result<GameResult>> = pool(settings.jobs)?.install(|| {
        todo.par_iter()
            .map(|(id, entry)| {
                let locs = by_game.get(id.as_str()).map(Vec::as_slice).unwrap_or(&[]);
                probe_game(&ctx, id, entry, locs, &partial_dir.join(format!("{id}.jsonl")))
            })
            .collect()
    });

    let mut interrupted = false;
    let updates: Vec<(String, GameResult)> = todo
        .iter()
        .zip(results)
        .map(|((id, _), r)| ((*id).clone(), r.unwrap_or_else(|e| GameResult::Failed(format!("{e:#}")))))
        .collect();
    for (id, result) in updates {
        match result {
            GameResult::Probed => manifest.set_status(&id, GameStatus::Probed, None)?,
            GameResult::Nondeterministic => {
                manifest.set_status(&id, GameStatus::Nondeterministic, Some("replay outputs differ".into()))?
            }
            GameResult::Failed(message) => {
                eprintln!("probe {id}: {message}");
                manifest.set_status(&id, GameStatus::Failed, Some(message))?
            }
            GameResult::Interrupted => interrupted = true,
        }
    }

    let mut cgif = Vec::new();
    let mut audit = Vec::new();
    for (id, entry) in manifest.games.iter_mut() {
        let annotated = load_partial(&partial_dir.join(format!("{id}.jsonl")))?;
        entry.counters.probes = annotated.iter().map(|a| a.evidence.len()).sum();
        entry.counters.errors = annotated.iter().map(|a| a.error_count()).sum();
        if entry.status == GameStatus::Probed {
            cgif.extend(annotated.iter().map(|a| CgifRecord::from_annotated(a, PIPELINE_VERSION)));
            audit.extend(annotated);
        }
    }
    manifest.recount();
    manifest.save(&manifest_path)?;
    stamp(out, "probe")?;

    if interrupted {
        println!("probe: stopped after the location budget; rerun to resume");
        return Ok(Outcome::Partial);
    }
    write_cgif(&out.join(CGIF_FILE), &cgif)?;
    write_jsonl(&out.join(AUDIT_FILE), &audit)?;
    let failed = manifest.games.values().filter(|g| g.status == GameStatus::Failed).count();
    println!(
        "probe: {} locations labeled, {} spans, {} probe errors, {failed} games failed",
        cgif.len(),
        cgif.iter().map(|r| r.spans.len()).sum::<usize>(),
        manifest.counters.errors
    );
    Ok(if failed == 0 { Outcome::Success } else { Outcome::Partial })
}
