use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use rcsplit_core::corpus::{ingest, IngestOptions, InputFormat};
use rcsplit_core::provenance::read_record_lines;
use rcsplit_core::{Dataset, Error, Provenance, Result};

/// Canonical dataset file, header kept.
pub fn read_dataset(path: &Path) -> Result<Dataset> {
    ingest(path, InputFormat::JsonlCanonical, &IngestOptions::default())
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<(Vec<T>, Option<Provenance>)> {
    let records = read_record_lines(path)?;
    let rows = records
        .lines
        .iter()
        .map(|(n, l)| {
            serde_json::from_str(l).map_err(|e| Error::MalformedFile {
                path: path.to_path_buf(),
                line: *n,
                message: e.to_string(),
            })
        })
        .collect::<Result<Vec<T>>>()?;
    Ok((rows, records.provenance))
}

/// Open `path`, or standard output when `None`.
pub fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    match path {
        Some(p) => {
            let f = File::create(p).map_err(|e| Error::io(p, e))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(std::io::stdout().lock())),
    }
}

pub fn write_jsonl<T: Serialize>(
    path: Option<&Path>,
    header: &Provenance,
    rows: &[T],
) -> Result<()> {
    let mut w = sink(path)?;
    rcsplit_core::annotate::write_records(&mut w, Some(header), rows)?;
    finish(w, path)
}

pub fn finish(mut w: Box<dyn Write>, path: Option<&Path>) -> Result<()> {
    w.flush()
        .map_err(|e| Error::io(path.unwrap_or(Path::new("<stdout>")), e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// File name only, so provenance does not depend on the working directory.
pub fn file_label(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}
