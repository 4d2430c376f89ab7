//! JSONL record types shared by the subcommands.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use confluo_core::portfolio::{EvalEntry, EvalMatrix};
use confluo_core::Answer;

pub mod answer_str {
    use confluo_core::Answer;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(a: &Answer, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(a.as_str())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Answer, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One strategy run on one problem (`evals.jsonl`, `labels.jsonl`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunRecord {
    pub problem: String,
    pub strategy: String,
    #[serde(with = "answer_str")]
    pub answer: Answer,
    pub millis: u64,
    #[serde(default = "one")]
    pub workers: usize,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub crashed: bool,
}

fn one() -> usize {
    1
}

/// One generated problem (`manifest.jsonl`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestRecord {
    pub name: String,
    pub seed: u64,
    pub index: u64,
    pub forced_left_linear: bool,
    pub left_linear: bool,
    pub comp: f64,
    pub funs: usize,
    pub consts: usize,
    pub vars: usize,
    pub rules: usize,
    pub max_term_size: usize,
}

/// One row of a benchmark report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchRow {
    pub problem: String,
    #[serde(with = "answer_str")]
    pub answer: Answer,
    pub millis: u64,
    pub strategy: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

pub fn append_jsonl<T: Serialize>(path: &Path, items: &[T]) -> std::io::Result<()> {
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    let mut buf = String::new();
    for it in items {
        buf.push_str(&serde_json::to_string(it).map_err(std::io::Error::other)?);
        buf.push('\n');
    }
    f.write_all(buf.as_bytes())?;
    f.flush()
}

pub fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> std::io::Result<()> {
    File::create(path)?;
    append_jsonl(path, items)
}

/// Reads records; a torn final line (from an interrupted writer) is ignored.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> std::io::Result<Vec<T>> {
    let f = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(e),
    };
    let lines: Vec<String> = BufReader::new(f).lines().collect::<Result<_, _>>()?;
    let last = lines.len().saturating_sub(1);
    let mut out = Vec::new();
    for (i, l) in lines.iter().enumerate() {
        if l.trim().is_empty() {
            continue;
        }
        match serde_json::from_str(l) {
            Ok(v) => out.push(v),
            Err(_) if i == last => break,
            Err(e) => {
                return Err(std::io::Error::new(std::io::ErrorKind::InvalidData, format!("line {}: {e}", i + 1)));
            }
        }
    }
    Ok(out)
}

pub fn matrix_from_records(records: &[RunRecord]) -> EvalMatrix {
    let mut m = EvalMatrix::default();
    for r in records {
        m.insert(&r.strategy, &r.problem, EvalEntry { answer: r.answer, millis: r.millis, workers: r.workers });
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jsonl_round_trip_and_torn_tail() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.jsonl");
        let r = RunRecord { problem: "p".into(), strategy: "s".into(), answer: Answer::No, millis: 5, workers: 1, crashed: false };
        append_jsonl(&p, &[r.clone(), r.clone()]).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.starts_with(r#"{"problem":"p","strategy":"s","answer":"NO","millis":5,"workers":1}"#));
        std::fs::write(&p, format!("{text}{{\"problem\":")).unwrap();
        let back: Vec<RunRecord> = read_jsonl(&p).unwrap();
        assert_eq!(back, vec![r.clone(), r]);
    }
}
