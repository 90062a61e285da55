use std::io::{BufRead, Write};

use serde::de::DeserializeOwned;
use serde::Serialize;

use super::CorpusError;

/// Writes one compact JSON value per line.
pub fn write_jsonl<T: Serialize, W: Write>(records: &[T], mut writer: W) -> Result<(), CorpusError> {
    for record in records {
        serde_json::to_writer(&mut writer, record).map_err(std::io::Error::from)?;
        writer.write_all(b"\n")?;
    }
    writer.flush()?;
    Ok(())
}

/// Reads JSON Lines, skipping blank lines. Errors carry the 1-based line.
pub fn read_jsonl<T: DeserializeOwned, R: BufRead>(reader: R) -> Result<Vec<T>, CorpusError> {
    read_jsonl_validated(reader, |_: &T| Ok(()))
}

pub(crate) fn read_jsonl_validated<T, R, F>(reader: R, validate: F) -> Result<Vec<T>, CorpusError>
where
    T: DeserializeOwned,
    R: BufRead,
    F: Fn(&T) -> Result<(), String>,
{
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let malformed = |message: String| CorpusError::Malformed { line: idx + 1, message };
        let value: T = serde_json::from_str(&line).map_err(|e| malformed(e.to_string()))?;
        validate(&value).map_err(malformed)?;
        out.push(value);
    }
    Ok(out)
}
