//! Run manifest: per-game status and counters for a walk/probe run.
//!
//! The manifest is a pure function of the run's inputs so reruns produce the
//! same bytes; wall-clock times go to a separate sidecar file.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use chekhov_core::engine::sha256_hex;
use serde::{Deserialize, Serialize};

use crate::output::write_atomic;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const TIMESTAMPS_FILE: &str = "run_timestamps.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GameStatus {
    Pending,
    Explored,
    Probed,
    Failed,
    Nondeterministic,
}

impl GameStatus {
    /// Statuses only move forward; staying put is allowed.
    pub fn can_become(self, next: GameStatus) -> bool {
        use GameStatus::*;
        self == next
            || matches!((self, next), (Pending, Explored | Failed) | (Explored, Probed | Failed | Nondeterministic))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Counters {
    pub locations: usize,
    pub probes: usize,
    pub errors: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameEntry {
    pub story: String,
    pub checksum: String,
    pub status: GameStatus,
    #[serde(default)]
    pub counters: Counters,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub run_id: String,
    pub config: BTreeMap<String, String>,
    pub games: BTreeMap<String, GameEntry>,
    pub counters: Counters,
}

impl RunManifest {
    /// The run id hashes the configuration and every game's checksum.
    pub fn new(config: BTreeMap<String, String>, games: BTreeMap<String, GameEntry>) -> Self {
        let mut material = serde_json::to_string(&config).expect("string map serializes");
        for (id, g) in &games {
            material.push_str(&format!("\n{id}:{}", g.checksum));
        }
        let run_id = sha256_hex(material.as_bytes())[..16].to_string();
        let mut manifest = Self { run_id, config, games, counters: Counters::default() };
        manifest.recount();
        manifest
    }

    pub fn set_status(&mut self, game_id: &str, next: GameStatus, message: Option<String>) -> Result<()> {
        let Some(entry) = self.games.get_mut(game_id) else { bail!("game {game_id} is not in the manifest") };
        if !entry.status.can_become(next) {
            bail!("game {game_id}: status cannot go from {:?} to {:?}", entry.status, next);
        }
        entry.status = next;
        if message.is_some() {
            entry.message = message;
        }
        Ok(())
    }

    pub fn recount(&mut self) {
        let mut total = Counters::default();
        for g in self.games.values() {
            total.locations += g.counters.locations;
            total.probes += g.counters.probes;
            total.errors += g.counters.errors;
        }
        self.counters = total;
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).with_context(|| format!("reading manifest {}", path.display()))?;
        serde_json::from_slice(&bytes).with_context(|| format!("parsing manifest {}", path.display()))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut json = serde_json::to_vec_pretty(self)?;
        json.push(b'\n');
        write_atomic(path, &json)
    }
}

/// Records when a stage ran, keyed by stage name, in seconds since the epoch.
pub fn stamp(out: &Path, stage: &str) -> Result<()> {
    let path = out.join(TIMESTAMPS_FILE);
    let mut stamps: BTreeMap<String, u64> = match std::fs::read(&path) {
        Ok(bytes) => serde_json::from_slice(&bytes).unwrap_or_default(),
        Err(_) => BTreeMap::new(),
    };
    let now = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    stamps.insert(stage.to_string(), now);
    write_atomic(&path, &serde_json::to_vec_pretty(&stamps)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use GameStatus::*;

    fn entry() -> GameEntry {
        GameEntry { story: "a.world".into(), checksum: "ab".into(), status: Pending, counters: Counters::default(), message: None }
    }

    #[test]
    fn transitions_only_move_forward() {
        assert!(Pending.can_become(Explored));
        assert!(Explored.can_become(Probed));
        assert!(Explored.can_become(Nondeterministic));
        assert!(Probed.can_become(Probed));
        assert!(!Probed.can_become(Explored));
        assert!(!Pending.can_become(Probed));
        assert!(!Failed.can_become(Explored));
        assert!(!Nondeterministic.can_become(Probed));
    }

    #[test]
    fn run_id_is_stable() {
        let games: BTreeMap<_, _> = [("a".to_string(), entry())].into();
        let a = RunManifest::new(BTreeMap::new(), games.clone());
        let b = RunManifest::new(BTreeMap::new(), games);
        assert_eq!(a.run_id, b.run_id);
        let mut m = a;
        assert!(m.set_status("a", Probed, None).is_err());
        m.set_status("a", Explored, None).unwrap();
        assert!(m.set_status("zz", Explored, None).is_err());
    }
}
