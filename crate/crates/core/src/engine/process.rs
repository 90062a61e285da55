//! External interpreter driven over stdin/stdout.

use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::{Duration, Instant};

use super::{Backend, BackendError};

/// Finds a prompt at the end of `buf`: `marker` at the start of a line,
/// optionally followed by spaces or tabs. Returns the marker's byte offset.
pub fn prompt_position(buf: &[u8], marker: &[u8]) -> Option<usize> {
    let mut end = buf.len();
    while end > 0 && matches!(buf[end - 1], b' ' | b'\t') {
        end -= 1;
    }
    let trimmed = &buf[..end];
    if marker.is_empty() || !trimmed.ends_with(marker) {
        return None;
    }
    let pos = trimmed.len() - marker.len();
    if pos == 0 || buf[pos - 1] == b'\n' {
        Some(pos)
    } else {
        None
    }
}

enum Chunk {
    Bytes(Vec<u8>),
    Eof,
}

struct Running {
    child: Child,
    stdin: ChildStdin,
    output: Receiver<Chunk>,
}

impl Drop for Running {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

pub(crate) struct ProcessBackend {
    program: PathBuf,
    args: Vec<String>,
    story: PathBuf,
    seed: u64,
    marker: Vec<u8>,
    timeout: Duration,
    running: Option<Running>,
}

impl ProcessBackend {
    pub(crate) fn new(
        program: PathBuf,
        args: Vec<String>,
        story: PathBuf,
        seed: u64,
        marker: Vec<u8>,
        timeout: Duration,
    ) -> Self {
        Self { program, args, story, seed, marker, timeout, running: None }
    }

    fn spawn(&self) -> Result<Running, BackendError> {
        let mut child = Command::new(&self.program)
            .args(&self.args)
            .arg(&self.story)
            .env("CHEKHOV_SEED", self.seed.to_string())
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| BackendError::Start(format!("cannot spawn {}: {e}", self.program.display())))?;
        let stdin = child.stdin.take().expect("piped stdin");
        let mut stdout = child.stdout.take().expect("piped stdout");
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            let mut buf = [0u8; 4096];
            loop {
                match stdout.read(&mut buf) {
                    Ok(0) | Err(_) => {
                        let _ = tx.send(Chunk::Eof);
                        break;
                    }
                    Ok(n) => {
                        if tx.send(Chunk::Bytes(buf[..n].to_vec())).is_err() {
                            break;
                        }
                    }
                }
            }
        });
        Ok(Running { child, stdin, output: rx })
    }

    /// Reads until the prompt or end of output. The flag is true on EOF.
    fn read_until_prompt(&mut self) -> Result<(String, bool), BackendError> {
        let running = self.running.as_mut().ok_or_else(|| BackendError::Io("engine not running".into()))?;
        let deadline = Instant::now() + self.timeout;
        let mut buf = Vec::new();
        loop {
            let remaining = deadline.saturating_duration_since(Instant::now());
            match running.output.recv_timeout(remaining) {
                Ok(Chunk::Bytes(bytes)) => {
                    buf.extend_from_slice(&bytes);
                    if let Some(pos) = prompt_position(&buf, &self.marker) {
                        return Ok((String::from_utf8_lossy(&buf[..pos]).into_owned(), false));
                    }
                }
                Ok(Chunk::Eof) | Err(RecvTimeoutError::Disconnected) => {
                    let _ = running.child.wait();
                    return Ok((String::from_utf8_lossy(&buf).into_owned(), true));
                }
                Err(RecvTimeoutError::Timeout) => return Err(BackendError::Timeout),
            }
        }
    }
}

impl Backend for ProcessBackend {
    fn restart(&mut self) -> Result<String, BackendError> {
        self.running = None;
        self.running = Some(self.spawn()?);
        match self.read_until_prompt() {
            Ok((text, false)) => Ok(text),
            Ok((_, true)) => {
                self.running = None;
                Err(BackendError::Start("engine exited before its first prompt".into()))
            }
            Err(e) => {
                self.running = None;
                Err(e)
            }
        }
    }

    fn send(&mut self, line: &str) -> Result<(String, bool), BackendError> {
        let running = self.running.as_mut().ok_or_else(|| BackendError::Io("engine not running".into()))?;
        let written = running
            .stdin
            .write_all(line.as_bytes())
            .and_then(|_| running.stdin.write_all(b"\n"))
            .and_then(|_| running.stdin.flush());
        if written.is_err() {
            // the engine closed its input: the story is over
            return Ok((String::new(), true));
        }
        let result = self.read_until_prompt();
        if matches!(result, Ok((_, true)) | Err(_)) {
            self.running = None;
        }
        result
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prompt_detection() {
        assert_eq!(prompt_position(b"Foyer\nDark.\n> ", b">"), Some(12));
        assert_eq!(prompt_position(b">", b">"), Some(0));
        assert_eq!(prompt_position(b"a -> b", b">"), None);
        assert_eq!(prompt_position(b"text\n>\t ", b">"), Some(5));
        assert_eq!(prompt_position(b"no prompt\n", b">"), None);
        assert_eq!(prompt_position(b"x\n$$ ", b"$$"), Some(2));
    }
}
