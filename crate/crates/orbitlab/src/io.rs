//! Reading JSON inputs and writing JSON/CSV outputs.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use orbitlab_core::experiments::TrialRecord;
use orbitlab_core::kempfness::{ClosednessStatus, Termination};
use orbitlab_core::subalgebra::{ElementType, ReductivityStatus};
use serde::de::DeserializeOwned;
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File { path: PathBuf, source: std::io::Error },
    #[error("standard input: {0}")]
    Stdin(std::io::Error),
    #[error("{origin}: {source}")]
    Parse { origin: String, source: serde_json::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("output: {0}")]
    Write(std::io::Error),
}

/// Parses JSON from `path`, or from standard input when `path` is `None` or `-`.
pub fn read_json<T: DeserializeOwned>(path: Option<&Path>) -> Result<T, IoError> {
    let (text, origin) = match path {
        Some(p) if p != Path::new("-") => {
            let text = fs::read_to_string(p).map_err(|source| IoError::File { path: p.to_path_buf(), source })?;
            (text, p.display().to_string())
        }
        _ => {
            let mut text = String::new();
            std::io::stdin().read_to_string(&mut text).map_err(IoError::Stdin)?;
            (text, String::from("standard input"))
        }
    };
    serde_json::from_str(&text).map_err(|source| IoError::Parse { origin, source })
}

pub fn to_pretty_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize to JSON");
    s.push('\n');
    s
}

/// Every trial field as a column, empty where it does not apply.
#[derive(Serialize)]
struct CsvRow<'a> {
    index: usize,
    seed: u64,
    status: Option<ClosednessStatus>,
    start_orbit_dim: Option<usize>,
    limit_orbit_dim: Option<usize>,
    iterations: Option<usize>,
    final_moment: Option<f64>,
    termination: Option<Termination>,
    monotone: Option<bool>,
    g_status: Option<ClosednessStatus>,
    stabilizer_dim: Option<usize>,
    reductivity: Option<ReductivityStatus>,
    generator_type: Option<ElementType>,
    real_status: Option<ClosednessStatus>,
    complex_status: Option<ClosednessStatus>,
    degenerate: Option<bool>,
    note: Option<&'a str>,
}

impl<'a> From<&'a TrialRecord> for CsvRow<'a> {
    fn from(r: &'a TrialRecord) -> Self {
        CsvRow {
            index: r.index,
            seed: r.seed,
            status: r.status,
            start_orbit_dim: r.start_orbit_dim,
            limit_orbit_dim: r.limit_orbit_dim,
            iterations: r.iterations,
            final_moment: r.final_moment,
            termination: r.termination,
            monotone: r.monotone,
            g_status: r.g_status,
            stabilizer_dim: r.stabilizer_dim,
            reductivity: r.reductivity,
            generator_type: r.generator_type,
            real_status: r.real_status,
            complex_status: r.complex_status,
            degenerate: r.degenerate,
            note: r.note.as_deref(),
        }
    }
}

pub fn trials_csv(records: &[TrialRecord]) -> Result<String, IoError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(CsvRow::from(r))?;
    }
    if records.is_empty() {
        w.write_record(CSV_HEADER)?;
    }
    let bytes = w.into_inner().map_err(|e| IoError::Write(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

const CSV_HEADER: [&str; 17] = [
    "index",
    "seed",
    "status",
    "start_orbit_dim",
    "limit_orbit_dim",
    "iterations",
    "final_moment",
    "termination",
    "monotone",
    "g_status",
    "stabilizer_dim",
    "reductivity",
    "generator_type",
    "real_status",
    "complex_status",
    "degenerate",
    "note",
];

/// Writes `text` to `path`, or to standard output.
pub fn write_text(path: Option<&Path>, text: &str) -> Result<(), IoError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| IoError::File { path: p.to_path_buf(), source }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(IoError::Write)?;
            out.flush().map_err(IoError::Write)
        }
    }
}
