//! File helpers: atomic writes and JSONL reading with the path in errors.

use std::fs::{self, File};
use std::io::BufReader;
use std::path::Path;

use anyhow::{Context, Result};
use chekhov_core::corpus::{self, CgifRecord, CorpusError, PredictionRecord};
use serde::Serialize;

/// Writes to a sibling temp file, then renames over the target.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("writing {}", path.display()))
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

pub fn write_jsonl<T: Serialize>(path: &Path, records: &[T]) -> Result<()> {
    let mut bytes = Vec::new();
    corpus::write_jsonl(records, &mut bytes)?;
    write_atomic(path, &bytes)
}

pub fn open(path: &Path) -> Result<BufReader<File>> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Ok(BufReader::new(file))
}

fn located<T>(path: &Path, result: Result<T, CorpusError>) -> Result<T> {
    result.with_context(|| format!("in {}", path.display()))
}

pub fn read_cgif(path: &Path) -> Result<Vec<CgifRecord>> {
    located(path, corpus::read_cgif(open(path)?))
}

pub fn write_cgif(path: &Path, records: &[CgifRecord]) -> Result<()> {
    let mut bytes = Vec::new();
    corpus::write_cgif(records, &mut bytes)?;
    write_atomic(path, &bytes)
}

pub fn read_predictions(path: &Path) -> Result<Vec<PredictionRecord>> {
    located(path, corpus::read_predictions(open(path)?))
}

pub fn read_jsonl<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    located(path, corpus::read_jsonl(open(path)?))
}
