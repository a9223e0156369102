//! Provenance header carried as the first line of every line-record artifact.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

pub const TOOL: &str = concat!("rcsplit ", env!("CARGO_PKG_VERSION"));

/// Keys that must agree before artifacts may be merged into one report.
pub const MERGE_KEYS: &[&str] = &["stopword_hash", "overlap_mode"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub command: String,
    /// Seconds since the Unix epoch; frozen by `--epoch` for reproducible runs.
    pub created_unix: u64,
    #[serde(default)]
    pub config: BTreeMap<String, Value>,
}

#[derive(Serialize, Deserialize)]
struct HeaderLine {
    provenance: Provenance,
}

impl Provenance {
    pub fn new(command: impl Into<String>, created_unix: u64) -> Self {
        Self {
            tool: TOOL.to_string(),
            command: command.into(),
            created_unix,
            config: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.config.insert(key.to_string(), value.into());
        self
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.config.get(key).and_then(Value::as_str)
    }

    pub fn header_line(&self) -> String {
        serde_json::to_string(&HeaderLine {
            provenance: self.clone(),
        })
        .expect("provenance serializes")
    }

    pub fn write_header<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "{}", self.header_line())
    }

    /// Parse a line if it is a provenance header (an object whose only key is
    /// `provenance`).
    pub fn parse_header(line: &str) -> Option<Provenance> {
        let v: Value = serde_json::from_str(line).ok()?;
        let obj = v.as_object()?;
        if obj.len() != 1 || !obj.contains_key("provenance") {
            return None;
        }
        serde_json::from_value::<HeaderLine>(v)
            .ok()
            .map(|h| h.provenance)
    }

    /// Fails if any merge-relevant key present in both headers differs.
    pub fn check_compatible(&self, other: &Provenance) -> Result<()> {
        for key in MERGE_KEYS {
            if let (Some(a), Some(b)) = (self.config.get(*key), other.config.get(*key)) {
                if a != b {
                    return Err(Error::ProvenanceMismatch {
                        field: key.to_string(),
                        left: a.to_string(),
                        right: b.to_string(),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Non-blank lines of a line-record file with their 1-based line numbers,
/// and the provenance header if the first record is one.
pub struct RecordLines {
    pub provenance: Option<Provenance>,
    pub lines: Vec<(usize, String)>,
}

pub fn read_record_lines(path: &Path) -> Result<RecordLines> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_record_lines_from(std::io::BufReader::new(file), path)
}

pub fn read_record_lines_from<R: BufRead>(reader: R, path: &Path) -> Result<RecordLines> {
    let mut provenance = None;
    let mut lines = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        if lines.is_empty() && provenance.is_none() {
            if let Some(p) = Provenance::parse_header(&line) {
                provenance = Some(p);
                continue;
            }
        }
        lines.push((i + 1, line));
    }
    Ok(RecordLines { provenance, lines })
}
