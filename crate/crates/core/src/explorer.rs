//! Location enumeration: walkthrough replay and seeded random walks.

use std::collections::{HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{EngineError, LocationKey, Observation, Session, DIRECTIONS};
use crate::probe::extract_candidates;
use crate::text::{parse_list, Stopwords};

#[derive(Debug, Error)]
pub enum ExploreError {
    #[error("walkthrough for {game_id} has no commands")]
    EmptyWalkthrough { game_id: String },
    #[error("walkthrough command {index} contains a line break")]
    MultilineCommand { index: usize },
    #[error("invalid walk config: {0}")]
    InvalidWalkConfig(String),
    #[error("explorer needs a fresh session (move_index is {0})")]
    SessionNotFresh(usize),
    #[error("command {index} ({command:?}) failed: {source}")]
    Command {
        index: usize,
        command: String,
        #[source]
        source: Box<EngineError>,
    },
    #[error("initial look failed: {0}")]
    Start(#[source] Box<EngineError>),
}

/// A published solution, one command per line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Walkthrough {
    pub game_id: String,
    pub commands: Vec<String>,
    pub source: String,
}

impl Walkthrough {
    pub fn new(game_id: impl Into<String>, commands: Vec<String>, source: impl Into<String>) -> Result<Self, ExploreError> {
        let game_id = game_id.into();
        if commands.is_empty() {
            return Err(ExploreError::EmptyWalkthrough { game_id });
        }
        if let Some(index) = commands.iter().position(|c| c.contains(['\n', '\r'])) {
            return Err(ExploreError::MultilineCommand { index });
        }
        Ok(Self { game_id, commands, source: source.into() })
    }

    /// Parses walkthrough text: one command per line, `#` comment lines,
    /// whitespace trimmed.
    pub fn parse(game_id: impl Into<String>, text: &str, source: impl Into<String>) -> Result<Self, ExploreError> {
        Self::new(game_id, parse_list(text), source)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscoveredBy {
    Walkthrough,
    RandomWalk,
}

/// One discovered location and the commands that reach it from a reset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocationRecord {
    pub game_id: String,
    pub location: LocationKey,
    pub description: String,
    pub prefix: Vec<String>,
    pub discovered_by: DiscoveredBy,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WalkConfig {
    pub steps: usize,
    pub rng_seed: u64,
    /// Command templates. Templates containing `{noun}` are interactions and
    /// get a noun from the current description; the rest are movements.
    pub action_vocabulary: Vec<String>,
    /// Probability of picking a movement command.
    pub direction_bias: f64,
}

pub const DEFAULT_WALK_STEPS: usize = 2500;
pub const DEFAULT_DIRECTION_BIAS: f64 = 0.8;
pub const INTERACTION_VERBS: [&str; 5] = ["take", "open", "push", "pull", "examine"];

/// The 12 movement verbs plus `take/open/push/pull/examine {noun}`.
pub fn default_action_vocabulary() -> Vec<String> {
    DIRECTIONS
        .iter()
        .map(|d| d.to_string())
        .chain(INTERACTION_VERBS.iter().map(|v| format!("{v} {{noun}}")))
        .collect()
}

impl Default for WalkConfig {
    fn default() -> Self {
        Self {
            steps: DEFAULT_WALK_STEPS,
            rng_seed: 0,
            action_vocabulary: default_action_vocabulary(),
            direction_bias: DEFAULT_DIRECTION_BIAS,
        }
    }
}

impl WalkConfig {
    pub fn validate(&self) -> Result<(), ExploreError> {
        if self.steps == 0 {
            return Err(ExploreError::InvalidWalkConfig("steps must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.direction_bias) {
            return Err(ExploreError::InvalidWalkConfig("direction_bias must lie in [0, 1]".into()));
        }
        if self.action_vocabulary.is_empty() {
            return Err(ExploreError::InvalidWalkConfig("action vocabulary is empty".into()));
        }
        Ok(())
    }
}

/// Collects first visits in order.
struct Visits {
    game_id: String,
    seen: HashSet<LocationKey>,
    records: Vec<LocationRecord>,
    discovered_by: DiscoveredBy,
}

impl Visits {
    fn new(game_id: &str, discovered_by: DiscoveredBy) -> Self {
        Self { game_id: game_id.to_string(), seen: HashSet::new(), records: Vec::new(), discovered_by }
    }

    fn visit(&mut self, obs: &Observation, prefix: &[String]) {
        if self.seen.insert(obs.key.clone()) {
            self.records.push(LocationRecord {
                game_id: self.game_id.clone(),
                location: obs.key.clone(),
                description: obs.text.trim().to_string(),
                prefix: prefix.to_vec(),
                discovered_by: self.discovered_by,
            });
        }
    }
}

fn ensure_fresh(session: &Session) -> Result<(), ExploreError> {
    if session.move_index() != 0 || session.is_halted() {
        return Err(ExploreError::SessionNotFresh(session.move_index()));
    }
    Ok(())
}

/// Sends the walkthrough, fingerprinting after every command. Emits one record
/// per first visit in visit order; the start room comes first with an empty
/// prefix. A halt ends the enumeration without error.
pub fn execute_walkthrough(session: &mut Session, wt: &Walkthrough) -> Result<Vec<LocationRecord>, ExploreError> {
    ensure_fresh(session)?;
    let mut visits = Visits::new(&session.story().game_id, DiscoveredBy::Walkthrough);
    let start = session.observe_location().map_err(|e| ExploreError::Start(Box::new(e)))?;
    visits.visit(&start, &[]);
    for (index, command) in wt.commands.iter().enumerate() {
        let wrap = |source| ExploreError::Command { index, command: command.clone(), source: Box::new(source) };
        let response = session.send_command(command).map_err(wrap)?;
        if response.halted {
            break;
        }
        let obs = session.observe_location().map_err(wrap)?;
        visits.visit(&obs, &wt.commands[..=index]);
    }
    Ok(visits.records)
}

/// Seeded random walk. Each step is a movement command with probability
/// `direction_bias`, otherwise an interaction template filled with a noun from
/// the current description (falling back to movement when there is none).
pub fn random_walk(session: &mut Session, cfg: &WalkConfig, stopwords: &Stopwords) -> Result<Vec<LocationRecord>, ExploreError> {
    cfg.validate()?;
    ensure_fresh(session)?;
    let (movements, interactions): (Vec<&str>, Vec<&str>) =
        cfg.action_vocabulary.iter().map(String::as_str).partition(|t| !t.contains("{noun}"));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut visits = Visits::new(&session.story().game_id, DiscoveredBy::RandomWalk);
    let mut current = session.observe_location().map_err(|e| ExploreError::Start(Box::new(e)))?;
    visits.visit(&current, &[]);
    let mut prefix: Vec<String> = Vec::with_capacity(cfg.steps);
    let mut nouns_cache: HashMap<LocationKey, Vec<String>> = HashMap::new();

    for index in 0..cfg.steps {
        let nouns = nouns_cache.entry(current.key.clone()).or_insert_with(|| {
            extract_candidates(&current.text, stopwords).into_iter().map(|c| c.normalized).collect()
        });
        let can_interact = !interactions.is_empty() && !nouns.is_empty();
        let can_move = !movements.is_empty();
        let want_move = rng.gen_bool(cfg.direction_bias);
        let command = if can_move && (want_move || !can_interact) {
            movements.choose(&mut rng).expect("non-empty").to_string()
        } else if can_interact {
            let template = interactions.choose(&mut rng).expect("non-empty");
            template.replace("{noun}", nouns.choose(&mut rng).expect("non-empty"))
        } else {
            break;
        };
        let wrap = |source: EngineError| ExploreError::Command { index, command: command.clone(), source: Box::new(source) };
        let response = match session.send_command(&command) {
            Ok(r) => r,
            Err(e) if e.is_halted() => break,
            Err(e) => return Err(wrap(e)),
        };
        prefix.push(command.clone());
        if response.halted {
            break;
        }
        current = match session.observe_location() {
            Ok(obs) => obs,
            Err(e) if e.is_halted() => break,
            Err(e) => return Err(wrap(e)),
        };
        visits.visit(&current, &prefix);
    }
    Ok(visits.records)
}

/// Unions location lists keyed by `(game_id, location)`. On collision the
/// record with the shorter prefix wins (the earlier one on ties) and keeps the
/// position of the first sighting. Games appear in first-seen order.
pub fn merge_location_sets(lists: &[Vec<LocationRecord>]) -> Vec<LocationRecord> {
    let mut game_order: Vec<&str> = Vec::new();
    let mut per_game: HashMap<&str, Vec<LocationRecord>> = HashMap::new();
    let mut index: HashMap<(&str, &LocationKey), usize> = HashMap::new();
    for record in lists.iter().flatten() {
        let game = record.game_id.as_str();
        let bucket = per_game.entry(game).or_insert_with(|| {
            game_order.push(game);
            Vec::new()
        });
        match index.get(&(game, &record.location)) {
            Some(&i) => {
                if record.prefix.len() < bucket[i].prefix.len() {
                    bucket[i] = record.clone();
                }
            }
            None => {
                index.insert((game, &record.location), bucket.len());
                bucket.push(record.clone());
            }
        }
    }
    game_order.into_iter().flat_map(|g| per_game.remove(g).unwrap_or_default()).collect()
}
