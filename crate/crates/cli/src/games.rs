//! Story discovery and per-game engine configuration.

use std::env;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use chekhov_core::engine::{sha256_hex, EngineSpec, SessionConfig};
use chekhov_core::explorer::Walkthrough;

use crate::settings::Settings;

pub const ENGINE_ENV: &str = "CHEKHOV_ENGINE";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameFile {
    pub game_id: String,
    pub path: PathBuf,
}

/// Story files in `dir`, sorted by file name; hidden files are skipped.
pub fn discover(dir: &Path) -> Result<Vec<GameFile>> {
    let entries = fs::read_dir(dir).with_context(|| format!("cannot read games directory {}", dir.display()))?;
    let mut games = Vec::new();
    for entry in entries {
        let path = entry?.path();
        let Some(name) = path.file_name().and_then(|n| n.to_str()) else { continue };
        if name.starts_with('.') || !path.is_file() {
            continue;
        }
        let game_id = path.file_stem().and_then(|s| s.to_str()).unwrap_or(name).to_string();
        games.push(GameFile { game_id, path });
    }
    games.sort_by(|a, b| a.path.cmp(&b.path));
    if let Some(pair) = games.windows(2).find(|w| w[0].game_id == w[1].game_id) {
        bail!("two story files share the game id {:?}", pair[0].game_id);
    }
    Ok(games)
}

/// Mixes the run seed with the game id so games walk independently.
pub fn game_seed(seed: u64, game_id: &str) -> u64 {
    let digest = sha256_hex(format!("{seed}:{game_id}").as_bytes());
    u64::from_str_radix(&digest[..16], 16).expect("hex digest")
}

/// `.world` files run on the mock engine; anything else needs the external
/// interpreter named by `CHEKHOV_ENGINE`.
pub fn engine_for(path: &Path) -> Result<EngineSpec> {
    if path.extension().is_some_and(|e| e == "world") {
        return Ok(EngineSpec::Mock);
    }
    match env::var_os(ENGINE_ENV) {
        Some(program) if !program.is_empty() => Ok(EngineSpec::External { program: program.into(), args: Vec::new() }),
        _ => bail!("{} is not a mock world and {ENGINE_ENV} is not set", path.display()),
    }
}

pub fn session_config(settings: &Settings, game_id: &str, path: &Path) -> Result<SessionConfig> {
    Ok(SessionConfig {
        rng_seed: game_seed(settings.seed, game_id),
        max_moves: settings.max_moves,
        command_timeout: settings.timeout,
        engine: engine_for(path)?,
        ..Default::default()
    })
}

pub fn walkthrough_for(dir: Option<&Path>, game_id: &str) -> Result<Option<Walkthrough>> {
    let Some(dir) = dir else { return Ok(None) };
    let path = dir.join(format!("{game_id}.txt"));
    if !path.is_file() {
        return Ok(None);
    }
    let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    Ok(Some(Walkthrough::parse(game_id, &text, path.display().to_string())?))
}
