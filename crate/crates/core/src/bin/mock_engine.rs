//! Runs a mock world over stdin/stdout using the line protocol expected of
//! external interpreters: output, then a `> ` prompt; one command per line.
//! Exits when the story ends or stdin closes.

use std::io::{self, BufRead, Write};
use std::process::ExitCode;

use chekhov_core::engine::{MockGame, MockWorld};

fn main() -> ExitCode {
    let Some(path) = std::env::args().nth(1) else {
        eprintln!("usage: chekhov-mock-engine <world file>");
        return ExitCode::from(2);
    };
    let world = match std::fs::read_to_string(&path).map_err(|e| e.to_string()).and_then(|s| MockWorld::parse(&s).map_err(|e| e.to_string())) {
        Ok(world) => world,
        Err(e) => {
            eprintln!("{path}: {e}");
            return ExitCode::from(2);
        }
    };
    let mut game = MockGame::new(world);
    let stdout = io::stdout();
    let mut out = stdout.lock();
    if write!(out, "{}> ", game.restart()).and_then(|_| out.flush()).is_err() {
        return ExitCode::FAILURE;
    }
    for line in io::stdin().lock().lines() {
        let Ok(line) = line else { break };
        let (text, halted) = game.respond(&line);
        let written = if halted { write!(out, "{text}") } else { write!(out, "{text}> ") };
        if written.and_then(|_| out.flush()).is_err() || halted {
            break;
        }
    }
    ExitCode::SUCCESS
}
