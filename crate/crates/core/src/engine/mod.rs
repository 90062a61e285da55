//! Uniform session protocol over an interactive-fiction engine.
//!
//! A [`Session`] wraps either the in-process mock world engine or an external
//! interpreter subprocess speaking a line protocol (one command per line,
//! output read until the prompt marker). Reset always restarts the engine
//! from scratch with the same seed; there is no save/restore.

mod mock;
mod process;

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::text::collapse_whitespace;

pub use mock::{canonical_direction, MockGame, MockObject, MockRoom, MockWorld, MockWorldError, Reaction, DIRECTIONS};
pub use process::prompt_position;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("{game_id}: story file {path} does not exist")]
    FileMissing { game_id: String, path: PathBuf },
    #[error("{game_id}: checksum mismatch for {path} (expected {expected}, found {actual})")]
    ChecksumMismatch { game_id: String, path: PathBuf, expected: String, actual: String },
    #[error("{game_id}: engine failed to start: {reason}")]
    EngineStart { game_id: String, reason: String },
    #[error("{game_id}: invalid session config: {reason}")]
    InvalidConfig { game_id: String, reason: String },
    #[error("{game_id}: command {command:?} contains a line break")]
    InvalidCommand { game_id: String, command: String },
    #[error("{game_id}: engine did not reach a prompt within {timeout:?} after {command:?}")]
    Timeout { game_id: String, command: String, timeout: Duration },
    #[error("{game_id}: the story has ended")]
    SessionHalted { game_id: String },
    #[error("{game_id}: move budget of {max_moves} exhausted")]
    MoveBudgetExhausted { game_id: String, max_moves: usize },
    #[error("{game_id}: `look` produced no parseable text")]
    UnparseableLook { game_id: String },
    #[error("{game_id}: engine I/O failed: {reason}")]
    Io { game_id: String, reason: String },
    #[error("replay failed at prefix index {index}: {source}")]
    Replay {
        index: usize,
        #[source]
        source: Box<EngineError>,
    },
}

impl EngineError {
    /// Strips replay annotations to reach the underlying error.
    pub fn root(&self) -> &EngineError {
        match self {
            EngineError::Replay { source, .. } => source.root(),
            other => other,
        }
    }

    pub fn is_halted(&self) -> bool {
        matches!(self.root(), EngineError::SessionHalted { .. })
    }
}

pub type Result<T, E = EngineError> = std::result::Result<T, E>;

/// Identifies one game and pins the bytes of its story file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoryRef {
    pub game_id: String,
    pub path: PathBuf,
    pub checksum: String,
}

impl StoryRef {
    /// Builds a reference from a file on disk, recording its current checksum.
    pub fn from_file(game_id: impl Into<String>, path: impl Into<PathBuf>) -> Result<Self> {
        let game_id = game_id.into();
        let path = path.into();
        let checksum = file_checksum(&path).map_err(|_| EngineError::FileMissing {
            game_id: game_id.clone(),
            path: path.clone(),
        })?;
        Ok(Self { game_id, path, checksum })
    }

    fn verify(&self) -> Result<()> {
        if !self.path.is_file() {
            return Err(EngineError::FileMissing { game_id: self.game_id.clone(), path: self.path.clone() });
        }
        let actual = file_checksum(&self.path).map_err(|e| EngineError::Io {
            game_id: self.game_id.clone(),
            reason: e.to_string(),
        })?;
        if actual != self.checksum {
            return Err(EngineError::ChecksumMismatch {
                game_id: self.game_id.clone(),
                path: self.path.clone(),
                expected: self.checksum.clone(),
                actual,
            });
        }
        Ok(())
    }
}

/// Lowercase hex SHA-256 of `bytes`.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest.iter() {
        let _ = write!(out, "{b:02x}");
    }
    out
}

pub fn file_checksum(path: &Path) -> io::Result<String> {
    Ok(sha256_hex(&fs::read(path)?))
}

/// Which engine runs a story.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum EngineSpec {
    /// The built-in mock world interpreter; the story file is a mock-world file.
    #[default]
    Mock,
    /// An interpreter executable, invoked as `program args... <story path>`.
    /// The seed is passed in the `CHEKHOV_SEED` environment variable.
    External { program: PathBuf, args: Vec<String> },
}

#[derive(Debug, Clone)]
pub struct SessionConfig {
    pub rng_seed: u64,
    pub max_moves: usize,
    pub prompt_marker: String,
    pub command_timeout: Duration,
    pub engine: EngineSpec,
}

impl Default for SessionConfig {
    fn default() -> Self {
        Self {
            rng_seed: 0,
            max_moves: 10_000,
            prompt_marker: ">".to_string(),
            command_timeout: Duration::from_secs(10),
            engine: EngineSpec::Mock,
        }
    }
}

impl SessionConfig {
    fn validate(&self, game_id: &str) -> Result<()> {
        let reason = if self.max_moves == 0 {
            "max_moves must be at least 1"
        } else if self.prompt_marker.is_empty() {
            "prompt_marker must not be empty"
        } else {
            return Ok(());
        };
        Err(EngineError::InvalidConfig { game_id: game_id.to_string(), reason: reason.to_string() })
    }
}

/// Output of one command (or of engine start, with `move_index` 0).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineResponse {
    pub raw_text: String,
    pub move_index: usize,
    pub halted: bool,
}

/// Identity of a location: room title plus a digest of the rest of `look`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LocationKey {
    pub room_name: String,
    pub body_digest: String,
}

impl LocationKey {
    /// Parses a `look` response. The first non-empty line is the room name; the
    /// digest is the first 8 hex chars of SHA-256 over the remaining lines with
    /// whitespace collapsed.
    pub fn from_look(text: &str) -> Option<Self> {
        let mut lines = text.lines();
        let room_name = lines.by_ref().map(str::trim).find(|l| !l.is_empty())?.to_string();
        let body: Vec<&str> = lines.collect();
        let body = collapse_whitespace(&body.join("\n"));
        let body_digest = sha256_hex(body.as_bytes())[..8].to_string();
        Some(Self { room_name, body_digest })
    }
}

/// A `look` result: the parsed key and the full text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Observation {
    pub key: LocationKey,
    pub text: String,
}

pub(crate) enum BackendError {
    Start(String),
    Timeout,
    Io(String),
}

pub(crate) trait Backend: Send {
    /// Starts the engine from its initial state, discarding any previous
    /// process or state, and returns the text before the first prompt.
    fn restart(&mut self) -> std::result::Result<String, BackendError>;
    /// Sends one command line; returns output up to the next prompt and
    /// whether the story ended.
    fn send(&mut self, line: &str) -> std::result::Result<(String, bool), BackendError>;
}

/// A single-owner connection to one running game.
pub struct Session {
    story: StoryRef,
    cfg: SessionConfig,
    backend: Box<dyn Backend>,
    initial_text: String,
    move_index: usize,
    halted: bool,
}

impl std::fmt::Debug for Session {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Session")
            .field("game_id", &self.story.game_id)
            .field("move_index", &self.move_index)
            .field("halted", &self.halted)
            .finish()
    }
}

/// Opens a session on `story`, verifying its checksum and starting the engine.
pub fn open_session(story: StoryRef, cfg: SessionConfig) -> Result<Session> {
    Session::open(story, cfg)
}

impl Session {
    pub fn open(story: StoryRef, cfg: SessionConfig) -> Result<Self> {
        cfg.validate(&story.game_id)?;
        story.verify()?;
        let backend: Box<dyn Backend> = match &cfg.engine {
            EngineSpec::Mock => {
                let source = fs::read_to_string(&story.path).map_err(|e| EngineError::EngineStart {
                    game_id: story.game_id.clone(),
                    reason: e.to_string(),
                })?;
                let world = MockWorld::parse(&source).map_err(|e| EngineError::EngineStart {
                    game_id: story.game_id.clone(),
                    reason: e.to_string(),
                })?;
                Box::new(mock::MockBackend::new(world))
            }
            EngineSpec::External { program, args } => Box::new(process::ProcessBackend::new(
                program.clone(),
                args.clone(),
                story.path.clone(),
                cfg.rng_seed,
                cfg.prompt_marker.clone().into_bytes(),
                cfg.command_timeout,
            )),
        };
        let mut session =
            Self { story, cfg, backend, initial_text: String::new(), move_index: 0, halted: false };
        session.initial_text = session.backend.restart().map_err(|e| match e {
            BackendError::Start(reason) | BackendError::Io(reason) => {
                EngineError::EngineStart { game_id: session.story.game_id.clone(), reason }
            }
            BackendError::Timeout => EngineError::EngineStart {
                game_id: session.story.game_id.clone(),
                reason: format!("no prompt within {:?}", session.cfg.command_timeout),
            },
        })?;
        Ok(session)
    }

    pub fn story(&self) -> &StoryRef {
        &self.story
    }

    pub fn config(&self) -> &SessionConfig {
        &self.cfg
    }

    pub fn move_index(&self) -> usize {
        self.move_index
    }

    pub fn is_halted(&self) -> bool {
        self.halted
    }

    /// The text the engine printed before its first prompt.
    pub fn initial_response(&self) -> EngineResponse {
        EngineResponse { raw_text: self.initial_text.clone(), move_index: 0, halted: false }
    }

    fn game_id(&self) -> String {
        self.story.game_id.clone()
    }

    pub fn send_command(&mut self, cmd: &str) -> Result<EngineResponse> {
        if cmd.contains(['\n', '\r']) {
            return Err(EngineError::InvalidCommand { game_id: self.game_id(), command: cmd.to_string() });
        }
        if self.halted {
            return Err(EngineError::SessionHalted { game_id: self.game_id() });
        }
        if self.move_index >= self.cfg.max_moves {
            return Err(EngineError::MoveBudgetExhausted { game_id: self.game_id(), max_moves: self.cfg.max_moves });
        }
        match self.backend.send(cmd) {
            Ok((raw_text, halted)) => {
                self.move_index += 1;
                self.halted = halted;
                Ok(EngineResponse { raw_text, move_index: self.move_index, halted })
            }
            Err(BackendError::Timeout) => {
                // the engine state is unknown now; force a reset before reuse
                self.halted = true;
                Err(EngineError::Timeout {
                    game_id: self.game_id(),
                    command: cmd.to_string(),
                    timeout: self.cfg.command_timeout,
                })
            }
            Err(BackendError::Start(reason)) | Err(BackendError::Io(reason)) => {
                self.halted = true;
                Err(EngineError::Io { game_id: self.game_id(), reason })
            }
        }
    }

    /// Restarts the engine from its initial state.
    pub fn reset(&mut self) -> Result<EngineResponse> {
        let text = self.backend.restart().map_err(|e| match e {
            BackendError::Start(reason) => EngineError::EngineStart { game_id: self.game_id(), reason },
            BackendError::Io(reason) => EngineError::Io { game_id: self.game_id(), reason },
            BackendError::Timeout => EngineError::Timeout {
                game_id: self.game_id(),
                command: String::new(),
                timeout: self.cfg.command_timeout,
            },
        })?;
        self.initial_text = text;
        self.move_index = 0;
        self.halted = false;
        Ok(self.initial_response())
    }

    /// Restarts the engine and sends every prefix command in order. Returns
    /// the response to the last command, or the initial output for an empty
    /// prefix.
    pub fn reset_and_replay<S: AsRef<str>>(&mut self, prefix: &[S]) -> Result<EngineResponse> {
        if prefix.len() >= self.cfg.max_moves {
            return Err(EngineError::MoveBudgetExhausted { game_id: self.game_id(), max_moves: self.cfg.max_moves });
        }
        let mut last = self.reset()?;
        for (index, cmd) in prefix.iter().enumerate() {
            last = self
                .send_command(cmd.as_ref())
                .map_err(|e| EngineError::Replay { index, source: Box::new(e) })?;
        }
        Ok(last)
    }

    /// Issues `look` and returns the parsed key along with the full text.
    /// Consumes one move.
    pub fn observe_location(&mut self) -> Result<Observation> {
        let response = self.send_command("look")?;
        let key =
            LocationKey::from_look(&response.raw_text).ok_or_else(|| EngineError::UnparseableLook { game_id: self.game_id() })?;
        Ok(Observation { key, text: response.raw_text })
    }

    pub fn fingerprint_location(&mut self) -> Result<LocationKey> {
        Ok(self.observe_location()?.key)
    }
}

/// Replays `probe_prefix` twice from a fresh start and reports whether the
/// final outputs differ.
pub fn detect_nondeterminism<S: AsRef<str>>(story: &StoryRef, cfg: &SessionConfig, probe_prefix: &[S]) -> Result<bool> {
    let mut session = Session::open(story.clone(), cfg.clone())?;
    let first = session.reset_and_replay(probe_prefix)?;
    let second = session.reset_and_replay(probe_prefix)?;
    Ok(first.raw_text != second.raw_text)
}
