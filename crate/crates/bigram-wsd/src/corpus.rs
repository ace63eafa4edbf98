//! Sense-tagged corpus loading and text normalization.
//!
//! Datasets are JSON-lines files, one object per line:
//! `{"id": string, "sense": string|null, "text": string}`. Text is
//! normalized on load: every ASCII punctuation character is deleted
//! (so `stop-gap` becomes `stopgap` and `don't` becomes `dont`), the
//! result is lowercased, and tokens are split on whitespace. The full
//! deletion table is documented in `docs/normalization.md`.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One sense-tagged occurrence of an ambiguous word.
///
/// `tokens` are already normalized; `sense` is the gold label and is
/// absent for unlabeled prediction input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub id: String,
    pub sense: Option<String>,
    pub tokens: Vec<String>,
}

/// Part of speech of a disambiguation target.
///
/// The variant order is the report grouping order: nouns, verbs,
/// adjectives, then words with no part of speech given.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pos {
    N,
    V,
    A,
    P,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Pos::N => "n",
            Pos::V => "v",
            Pos::A => "a",
            Pos::P => "p",
        };
        f.write_str(s)
    }
}

impl FromStr for Pos {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "n" => Ok(Pos::N),
            "v" => Ok(Pos::V),
            "a" => Ok(Pos::A),
            "p" => Ok(Pos::P),
            other => Err(Error::InvalidPos(other.to_string())),
        }
    }
}

/// One disambiguation task: a target word with its training and test data.
#[derive(Debug, Clone)]
pub struct Task {
    pub word: String,
    pub pos: Pos,
    pub train: Vec<Instance>,
    pub test: Vec<Instance>,
    /// Distinct senses observed in the training data.
    pub sense_inventory: BTreeSet<String>,
}

impl Task {
    /// The `word-pos` label used in reports, e.g. `accident-n`.
    pub fn label(&self) -> String {
        format!("{}-{}", self.word, self.pos)
    }
}

/// Lowercases `raw`, deletes ASCII punctuation, and splits on whitespace.
///
/// A handful of code points (ℂ, ℍ, ϒ, ...) have no lowercase mapping and
/// would otherwise survive as uppercase letters; those are deleted so the
/// output is guaranteed uppercase-free. Deterministic and idempotent;
/// empty input yields an empty sequence.
pub fn normalize_text(raw: &str) -> Vec<String> {
    let stripped: String = raw.chars().filter(|c| !c.is_ascii_punctuation()).collect();
    stripped
        .to_lowercase()
        .chars()
        .filter(|c| !c.is_uppercase())
        .collect::<String>()
        .split_whitespace()
        .map(str::to_string)
        .collect()
}

#[derive(Deserialize)]
struct RawRecord {
    id: String,
    #[serde(default)]
    sense: Option<String>,
    text: String,
}

#[derive(Serialize)]
struct RawRecordOut<'a> {
    id: &'a str,
    sense: Option<&'a str>,
    text: String,
}

/// Reads a JSON-lines dataset, normalizing each record's text.
///
/// Instances come back in file order. Lines that are empty or whitespace
/// are skipped. A malformed record fails with its line number; a repeated
/// id fails naming the id.
pub fn load_dataset(source: impl BufRead) -> Result<Vec<Instance>> {
    let mut instances = Vec::new();
    let mut seen = BTreeSet::new();
    for (idx, line) in source.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::Parse {
            line: lineno,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let record: RawRecord = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: lineno,
            message: e.to_string(),
        })?;
        if !seen.insert(record.id.clone()) {
            return Err(Error::DuplicateId { id: record.id });
        }
        instances.push(Instance {
            id: record.id,
            sense: record.sense,
            tokens: normalize_text(&record.text),
        });
    }
    Ok(instances)
}

/// Writes instances back out as JSON lines, with tokens rejoined by spaces.
pub fn write_dataset(instances: &[Instance], mut sink: impl Write) -> std::io::Result<()> {
    for inst in instances {
        let record = RawRecordOut {
            id: &inst.id,
            sense: inst.sense.as_deref(),
            text: inst.tokens.join(" "),
        };
        serde_json::to_writer(&mut sink, &record)?;
        sink.write_all(b"\n")?;
    }
    Ok(())
}

/// Assembles a [`Task`] from already-loaded train and test instances.
///
/// Every training instance must carry a sense tag and the training set
/// must be non-empty. Test senses are not validated here: a test set whose
/// senses never appear in training still loads (the learners will simply
/// never predict them).
pub fn load_task(
    word: &str,
    pos: Pos,
    train: Vec<Instance>,
    test: Vec<Instance>,
) -> Result<Task> {
    if train.is_empty() {
        return Err(Error::EmptyTrainingData);
    }
    let mut sense_inventory = BTreeSet::new();
    for inst in &train {
        match &inst.sense {
            Some(sense) if !sense.is_empty() => {
                sense_inventory.insert(sense.clone());
            }
            _ => {
                return Err(Error::UnlabeledTrainInstance {
                    id: inst.id.clone(),
                })
            }
        }
    }
    Ok(Task {
        word: word.to_string(),
        pos,
        train,
        test,
        sense_inventory,
    })
}
