//! Built-in mock world engine.
//!
//! A mock world is a plain-text file with one directive per line:
//!
//! ```text
//! # comment
//! TITLE The Tiny House                 (optional banner, before any ROOM)
//! ROOM Foyer                           (first ROOM is the start room)
//! DESC You are in a small foyer.       (repeatable; lines are joined)
//! EXIT north Kitchen
//! OBJECT brass lamp RESPONSE The lamp glows with a faint inner light.
//! OBJECT dust TRIVIAL
//! FATAL A trapdoor opens beneath you.  (entering this room ends the story)
//! RANDOM heads | tails                 (look appends a variant drawn from an unseeded RNG)
//! ```
//!
//! The engine is stateless apart from the current room, so a `look` is always
//! reproducible except in `RANDOM` rooms, which exist to exercise
//! nondeterminism detection.

use std::fmt;

use rand::seq::SliceRandom;
use thiserror::Error;

use super::{Backend, BackendError};
use crate::text::normalize;

/// Canonical movement verbs understood by the mock engine.
pub const DIRECTIONS: [&str; 12] = [
    "north", "south", "east", "west", "northeast", "northwest", "southeast", "southwest", "up", "down", "in", "out",
];

/// Maps a movement word or abbreviation to its canonical form.
pub fn canonical_direction(word: &str) -> Option<&'static str> {
    let dir = match word {
        "n" | "north" => "north",
        "s" | "south" => "south",
        "e" | "east" => "east",
        "w" | "west" => "west",
        "ne" | "northeast" => "northeast",
        "nw" | "northwest" => "northwest",
        "se" | "southeast" => "southeast",
        "sw" | "southwest" => "southwest",
        "u" | "up" => "up",
        "d" | "down" => "down",
        "in" | "inside" => "in",
        "out" | "outside" => "out",
        _ => return None,
    };
    Some(dir)
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("mock world line {line}: {message}")]
pub struct MockWorldError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reaction {
    Trivial,
    Response(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MockObject {
    /// Normalized object name; `examine` must match it exactly.
    pub name: String,
    pub reaction: Reaction,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MockRoom {
    pub name: String,
    pub description: String,
    pub exits: Vec<(String, String)>,
    pub objects: Vec<MockObject>,
    pub fatal: Option<String>,
    pub random_variants: Vec<String>,
}

impl MockRoom {
    pub fn object(&self, name: &str) -> Option<&MockObject> {
        self.objects.iter().find(|o| o.name == name)
    }

    /// Names of objects declared with a `RESPONSE`.
    pub fn nontrivial_objects(&self) -> impl Iterator<Item = &str> {
        self.objects
            .iter()
            .filter(|o| matches!(o.reaction, Reaction::Response(_)))
            .map(|o| o.name.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MockWorld {
    pub title: Option<String>,
    pub rooms: Vec<MockRoom>,
}

impl MockWorld {
    pub fn parse(source: &str) -> Result<Self, MockWorldError> {
        let mut world = MockWorld::default();
        for (idx, raw) in source.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: &str| MockWorldError { line: line_no, message: message.to_string() };
            let (directive, rest) = match line.split_once(char::is_whitespace) {
                Some((d, r)) => (d, r.trim()),
                None => (line, ""),
            };
            if directive == "TITLE" {
                if !world.rooms.is_empty() {
                    return Err(err("TITLE must precede the first ROOM"));
                }
                world.title = Some(rest.to_string());
                continue;
            }
            if directive == "ROOM" {
                if rest.is_empty() {
                    return Err(err("ROOM needs a name"));
                }
                if world.rooms.iter().any(|r| r.name == rest) {
                    return Err(err("duplicate ROOM name"));
                }
                world.rooms.push(MockRoom { name: rest.to_string(), ..Default::default() });
                continue;
            }
            let room = world.rooms.last_mut().ok_or_else(|| err("directive before the first ROOM"))?;
            match directive {
                "DESC" => {
                    if !room.description.is_empty() {
                        room.description.push('\n');
                    }
                    room.description.push_str(rest);
                }
                "EXIT" => {
                    let (dir, target) = rest.split_once(char::is_whitespace).ok_or_else(|| err("EXIT needs a direction and a room"))?;
                    let dir = canonical_direction(&dir.to_lowercase()).ok_or_else(|| err("unknown EXIT direction"))?;
                    room.exits.push((dir.to_string(), target.trim().to_string()));
                }
                "OBJECT" => {
                    let words: Vec<&str> = rest.split_whitespace().collect();
                    let pos = words
                        .iter()
                        .position(|w| *w == "TRIVIAL" || *w == "RESPONSE")
                        .ok_or_else(|| err("OBJECT needs TRIVIAL or RESPONSE"))?;
                    if pos == 0 {
                        return Err(err("OBJECT needs a name"));
                    }
                    let name = normalize(&words[..pos].join(" "));
                    let reaction = if words[pos] == "TRIVIAL" {
                        if pos + 1 != words.len() {
                            return Err(err("TRIVIAL takes no text"));
                        }
                        Reaction::Trivial
                    } else {
                        let text = words[pos + 1..].join(" ");
                        if text.is_empty() {
                            return Err(err("RESPONSE needs text"));
                        }
                        Reaction::Response(text)
                    };
                    room.objects.push(MockObject { name, reaction });
                }
                "FATAL" => room.fatal = Some(rest.to_string()),
                "RANDOM" => {
                    room.random_variants = rest.split('|').map(|v| v.trim().to_string()).filter(|v| !v.is_empty()).collect();
                    if room.random_variants.len() < 2 {
                        return Err(err("RANDOM needs at least two variants separated by '|'"));
                    }
                }
                _ => return Err(err(&format!("unknown directive {directive}"))),
            }
        }
        if world.rooms.is_empty() {
            return Err(MockWorldError { line: 0, message: "world has no ROOM".to_string() });
        }
        for room in &world.rooms {
            for (_, target) in &room.exits {
                if !world.rooms.iter().any(|r| &r.name == target) {
                    return Err(MockWorldError { line: 0, message: format!("exit to unknown room {target:?}") });
                }
            }
        }
        Ok(world)
    }

    pub fn room(&self, name: &str) -> Option<&MockRoom> {
        self.rooms.iter().find(|r| r.name == name)
    }

    fn room_index(&self, name: &str) -> usize {
        self.rooms.iter().position(|r| r.name == name).expect("exits validated at parse time")
    }
}

impl fmt::Display for MockWorld {
    /// Renders the world back into mock-world file syntax.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(title) = &self.title {
            writeln!(f, "TITLE {title}")?;
        }
        for room in &self.rooms {
            writeln!(f, "ROOM {}", room.name)?;
            for line in room.description.lines() {
                writeln!(f, "DESC {line}")?;
            }
            for (dir, target) in &room.exits {
                writeln!(f, "EXIT {dir} {target}")?;
            }
            for obj in &room.objects {
                match &obj.reaction {
                    Reaction::Trivial => writeln!(f, "OBJECT {} TRIVIAL", obj.name)?,
                    Reaction::Response(text) => writeln!(f, "OBJECT {} RESPONSE {text}", obj.name)?,
                }
            }
            if let Some(text) = &room.fatal {
                writeln!(f, "FATAL {text}")?;
            }
            if !room.random_variants.is_empty() {
                writeln!(f, "RANDOM {}", room.random_variants.join(" | "))?;
            }
        }
        Ok(())
    }
}

/// A running mock game. Every response ends with a newline.
#[derive(Debug, Clone)]
pub struct MockGame {
    world: MockWorld,
    current: usize,
    halted: bool,
}

const NO_SUCH_THING: &str = "You can't see any such thing.\n";

impl MockGame {
    pub fn new(world: MockWorld) -> Self {
        Self { world, current: 0, halted: false }
    }

    pub fn world(&self) -> &MockWorld {
        &self.world
    }

    pub fn current_room(&self) -> &MockRoom {
        &self.world.rooms[self.current]
    }

    pub fn is_halted(&self) -> bool {
        self.halted
    }

    /// Returns to the start room and prints the banner.
    pub fn restart(&mut self) -> String {
        self.current = 0;
        self.halted = false;
        let look = self.look();
        match &self.world.title {
            Some(title) => format!("{title}\n\n{look}"),
            None => look,
        }
    }

    fn look(&self) -> String {
        let room = self.current_room();
        let mut out = format!("{}\n", room.name);
        if !room.description.is_empty() {
            out.push_str(&room.description);
            out.push('\n');
        }
        if !room.random_variants.is_empty() {
            let variant = room.random_variants.choose(&mut rand::thread_rng()).expect("non-empty");
            out.push_str(variant);
            out.push('\n');
        }
        out
    }

    /// Executes one command; returns the output and whether the story ended.
    pub fn respond(&mut self, command: &str) -> (String, bool) {
        if self.halted {
            return (String::new(), true);
        }
        let line = normalize(command);
        let (verb, rest) = match line.split_once(' ') {
            Some((v, r)) => (v, r),
            None => (line.as_str(), ""),
        };
        let text = match (verb, rest) {
            ("", _) => "I beg your pardon?\n".to_string(),
            ("look" | "l", "") => self.look(),
            ("look", r) if r.starts_with("at ") => self.examine(&r[3..]),
            ("wait" | "z", "") => "Time passes.\n".to_string(),
            ("inventory" | "i", "") => "You are empty-handed.\n".to_string(),
            ("go" | "walk", dir) => match canonical_direction(dir) {
                Some(dir) => return self.travel(dir),
                None => "You can't go that way.\n".to_string(),
            },
            ("examine" | "x", "") => "What do you want to examine?\n".to_string(),
            ("examine" | "x", obj) => self.examine(obj),
            ("take" | "get" | "open" | "close" | "push" | "pull" | "turn" | "move" | "touch" | "read", "") => {
                format!("What do you want to {verb}?\n")
            }
            ("take" | "get" | "open" | "close" | "push" | "pull" | "turn" | "move" | "touch" | "read", obj) => {
                if self.find_object(obj).is_some() {
                    "Nothing obvious happens.\n".to_string()
                } else {
                    NO_SUCH_THING.to_string()
                }
            }
            (word, "") if canonical_direction(word).is_some() => {
                return self.travel(canonical_direction(word).expect("checked"));
            }
            _ => "That's not a verb I recognise.\n".to_string(),
        };
        (text, false)
    }

    fn find_object(&self, name: &str) -> Option<&MockObject> {
        let name = name.strip_prefix("the ").unwrap_or(name);
        self.current_room().object(name)
    }

    fn examine(&self, name: &str) -> String {
        match self.find_object(name) {
            Some(MockObject { reaction: Reaction::Response(text), .. }) => format!("{text}\n"),
            Some(MockObject { name, .. }) => format!("You see nothing special about the {name}.\n"),
            None => NO_SUCH_THING.to_string(),
        }
    }

    fn travel(&mut self, dir: &str) -> (String, bool) {
        let target = self.current_room().exits.iter().find(|(d, _)| d == dir).map(|(_, t)| t.clone());
        let Some(target) = target else {
            return ("You can't go that way.\n".to_string(), false);
        };
        self.current = self.world.room_index(&target);
        let mut out = self.look();
        if let Some(fatal) = &self.current_room().fatal {
            out.push_str(fatal);
            out.push_str("\n\n*** The game is over ***\n");
            self.halted = true;
        }
        (out, self.halted)
    }
}

pub(crate) struct MockBackend {
    game: MockGame,
}

impl MockBackend {
    pub(crate) fn new(world: MockWorld) -> Self {
        Self { game: MockGame::new(world) }
    }
}

impl Backend for MockBackend {
    fn restart(&mut self) -> Result<String, BackendError> {
        Ok(self.game.restart())
    }

    fn send(&mut self, line: &str) -> Result<(String, bool), BackendError> {
        Ok(self.game.respond(line))
    }
}
