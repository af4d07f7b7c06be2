use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Corpus, Document, Label};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct Record {
    user_id: String,
    label: String,
    text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    title: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    date: Option<String>,
}

/// Load the line-delimited JSON interchange format.
pub fn load_jsonl(path: &Path) -> Result<Corpus> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_jsonl(BufReader::new(file), path)
}

/// Parse JSONL from any reader; `path` is only used in error messages.
pub fn read_jsonl<R: BufRead>(reader: R, path: &Path) -> Result<Corpus> {
    let mut documents = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let n = i + 1;
        let line = line.map_err(|e| Error::parse(path, n, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: Record =
            serde_json::from_str(&line).map_err(|e| Error::parse(path, n, e.to_string()))?;
        let label: Label = record
            .label
            .parse()
            .map_err(|e: Error| Error::parse(path, n, e.to_string()))?;
        if record.user_id.is_empty() {
            return Err(Error::parse(path, n, "empty user_id"));
        }
        documents.push(Document {
            user_id: record.user_id,
            label,
            timestamp: record.date,
            title: record.title,
            body: record.text,
        });
    }
    Corpus::new(documents)
}

pub fn write_jsonl<W: Write>(corpus: &Corpus, mut out: W) -> std::io::Result<()> {
    for d in corpus.documents() {
        let record = Record {
            user_id: d.user_id.clone(),
            label: d.label.as_str().to_string(),
            text: d.body.clone(),
            title: d.title.clone(),
            date: d.timestamp.clone(),
        };
        serde_json::to_writer(&mut out, &record)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
