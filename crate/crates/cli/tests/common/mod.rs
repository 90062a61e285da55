//! Helpers shared by the CLI test targets.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use chekhov_core::corpus::{read_cgif, CgifRecord};
use chekhov_core::engine::MockWorld;
use chekhov_core::probe::extract_candidates;
use chekhov_core::text::{normalize, Stopwords};

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

/// Runs the binary with `--out out` prepended, from the test's own directory.
pub fn chekhov(out: &Path, args: &[&str]) -> Output {
    let output = Command::new(env!("CARGO_BIN_EXE_chekhov"))
        .arg("--out")
        .arg(out)
        .args(args)
        .env_remove("CHEKHOV_ENGINE")
        .output()
        .expect("binary runs");
    output
}

pub fn code(output: &Output) -> i32 {
    output.status.code().expect("exited normally")
}

/// Runs and asserts the exit code, showing stderr on mismatch.
pub fn expect(out: &Path, args: &[&str], want: i32) -> Output {
    let output = chekhov(out, args);
    assert_eq!(code(&output), want, "{args:?}\nstdout:\n{}\nstderr:\n{}", String::from_utf8_lossy(&output.stdout), String::from_utf8_lossy(&output.stderr));
    output
}

pub fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

pub const STEPS: &str = "400";

/// `walk` then `probe` over the mock fixtures.
pub fn walk_and_probe(out: &Path, seed: &str) {
    let games = fixture("mock");
    let wts = fixture("walkthroughs");
    expect(out, &["walk", "--games", path_str(&games), "--walkthroughs", path_str(&wts), "--steps", STEPS, "--seed", seed, "--jobs", "2"], 0);
    expect(out, &["probe", "--jobs", "2"], 0);
}

pub fn load_cgif(path: &Path) -> Vec<CgifRecord> {
    read_cgif(fs::File::open(path).map(std::io::BufReader::new).expect("cgif exists")).expect("valid cgif")
}

/// Declared non-trivial objects of the record's room, restricted to the
/// candidates of its text.
pub fn oracle_surfaces(world: &MockWorld, record: &CgifRecord) -> BTreeSet<String> {
    let room = world.room(&record.location_key.room_name).expect("room exists");
    let candidates: BTreeSet<String> =
        extract_candidates(&record.text, &Stopwords::builtin()).into_iter().map(|c| c.normalized).collect();
    room.nontrivial_objects().filter(|o| candidates.contains(*o)).map(str::to_string).collect()
}

pub fn labeled_surfaces(record: &CgifRecord) -> BTreeSet<String> {
    record.spans.iter().map(|s| normalize(&record.text[s.start..s.end])).collect()
}

/// Every regular file under `dir`, relative path and bytes, excluding the
/// timestamp sidecar.
pub fn snapshot(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut files = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else if path.file_name().is_some_and(|n| n != "run_timestamps.json") {
                files.push((path.strip_prefix(dir).unwrap().to_path_buf(), fs::read(&path).unwrap()));
            }
        }
    }
    files.sort();
    files
}
