//! On-disk formats: a trace is a CSV of per-step rows plus a JSON sidecar
//! with the parameters; plans, reports and summaries are JSON documents.
//! Every JSON document carries `"schema": "tangleproof/v1"`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{replay, EngineError, StepRecord, Trace};
use crate::params::ModelParams;
use crate::state::{ArrivalDecision, Validation};

pub const SCHEMA: &str = "tangleproof/v1";

pub const TRACE_HEADER: [&str; 9] = [
    "n",
    "L",
    "F",
    "W",
    "delta",
    "completions",
    "theta",
    "eps",
    "parents",
];

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: invalid document at {location}: {message}")]
    Schema {
        path: PathBuf,
        location: String,
        message: String,
    },
}

impl IoError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        IoError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    fn schema(path: &Path, location: impl Into<String>, message: impl ToString) -> Self {
        IoError::Schema {
            path: path.to_path_buf(),
            location: location.into(),
            message: message.to_string(),
        }
    }
}

/// A JSON document with the schema tag in front of its fields.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Versioned<T> {
    pub schema: String,
    #[serde(flatten)]
    pub body: T,
}

pub fn write_json<T: Serialize>(path: &Path, body: &T) -> Result<(), IoError> {
    let doc = Versioned {
        schema: SCHEMA.to_string(),
        body,
    };
    let file = File::create(path).map_err(|e| IoError::io(path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, &doc).map_err(|e| IoError::schema(path, "$", e))?;
    w.write_all(b"\n").map_err(|e| IoError::io(path, e))?;
    w.flush().map_err(|e| IoError::io(path, e))
}

pub fn to_json_string<T: Serialize>(body: &T) -> String {
    let doc = Versioned {
        schema: SCHEMA.to_string(),
        body,
    };
    serde_json::to_string_pretty(&doc).expect("in-memory serialization")
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, IoError> {
    let file = File::open(path).map_err(|e| IoError::io(path, e))?;
    let value: serde_json::Value = serde_json::from_reader(BufReader::new(file))
        .map_err(|e| IoError::schema(path, format!("line {}", e.line()), e))?;
    parse_json(path, value)
}

pub fn parse_json<T: DeserializeOwned>(path: &Path, mut value: serde_json::Value) -> Result<T, IoError> {
    let tag = value.as_object_mut().and_then(|o| o.remove("schema"));
    match tag.as_ref().and_then(|s| s.as_str()) {
        Some(SCHEMA) => {}
        Some(other) => {
            return Err(IoError::schema(
                path,
                "schema",
                format!("unsupported schema {other:?}, expected {SCHEMA:?}"),
            ))
        }
        None => return Err(IoError::schema(path, "schema", "missing schema tag")),
    }
    serde_path_to_error::deserialize(value)
        .map_err(|e| IoError::schema(path, e.path().to_string(), e.inner()))
}

/// Sidecar of a trace CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceMeta {
    pub params: ModelParams,
    pub seed: u64,
    pub steps: u64,
    pub validation: Validation,
    /// Inclusive ranges of arrivals whose decision was forced.
    pub forced: Vec<[u64; 2]>,
    /// Hand-built graph rather than a sample of the process.
    #[serde(default)]
    pub synthetic: bool,
}

impl TraceMeta {
    pub fn of(trace: &Trace) -> Self {
        TraceMeta {
            params: trace.params.clone(),
            seed: trace.seed,
            steps: trace.len(),
            validation: trace.validation,
            forced: ranges(&trace.forced),
            synthetic: trace.validation == Validation::Structural,
        }
    }

    pub fn forced_steps(&self) -> Vec<u64> {
        self.forced.iter().flat_map(|&[a, b]| a..=b).collect()
    }
}

fn ranges(steps: &[u64]) -> Vec<[u64; 2]> {
    let mut out: Vec<[u64; 2]> = Vec::new();
    for &n in steps {
        match out.last_mut() {
            Some(r) if r[1] + 1 == n => r[1] = n,
            _ => out.push([n, n]),
        }
    }
    out
}

/// Path of the JSON sidecar belonging to a trace CSV.
pub fn meta_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

pub fn write_trace(trace: &Trace, csv: &Path) -> Result<(), IoError> {
    write_json(&meta_path(csv), &TraceMeta::of(trace))?;
    let file = File::create(csv).map_err(|e| IoError::io(csv, e))?;
    write_rows(BufWriter::new(file), &trace.steps).map_err(|e| IoError::io(csv, e))
}

/// CSV rows with the fixed header; parents are joined by `;`.
pub fn write_rows<W: Write>(w: W, rows: &[StepRecord]) -> std::io::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(TRACE_HEADER)?;
    for r in rows {
        let parents = r
            .decision
            .parents
            .iter()
            .map(|p| p.to_string())
            .collect::<Vec<_>>()
            .join(";");
        out.write_record([
            r.n.to_string(),
            r.l.to_string(),
            r.f.to_string(),
            r.w.to_string(),
            r.delta.to_string(),
            r.completions.to_string(),
            r.decision.theta.to_string(),
            r.decision.eps.to_string(),
            parents,
        ])?;
    }
    out.flush()
}

pub fn trace_csv_bytes(trace: &Trace) -> Vec<u8> {
    let mut buf = Vec::new();
    write_rows(&mut buf, &trace.steps).expect("writing to memory");
    buf
}

/// A trace as stored: the sidecar and the rows exactly as recorded.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceFile {
    pub meta: TraceMeta,
    pub rows: Vec<StepRecord>,
}

impl TraceFile {
    /// Re-executes the recorded decisions; recorded counts are not trusted.
    pub fn rebuild(&self) -> Result<Trace, EngineError> {
        let mut t = replay(
            &self.meta.params,
            self.meta.validation,
            self.rows.iter().map(|r| &r.decision),
        )?;
        t.seed = self.meta.seed;
        t.forced = self.meta.forced_steps();
        Ok(t)
    }
}

pub fn read_trace(csv_path: &Path) -> Result<TraceFile, IoError> {
    let meta: TraceMeta = read_json(&meta_path(csv_path))?;
    let file = File::open(csv_path).map_err(|e| IoError::io(csv_path, e))?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(BufReader::new(file));
    let header = rdr
        .headers()
        .map_err(|e| IoError::schema(csv_path, "header", e))?
        .clone();
    if header.iter().ne(TRACE_HEADER.iter().copied()) {
        return Err(IoError::schema(
            csv_path,
            "header",
            format!("expected {}", TRACE_HEADER.join(",")),
        ));
    }
    let mut rows = Vec::new();
    for (idx, rec) in rdr.records().enumerate() {
        let line = idx + 2;
        let rec = rec.map_err(|e| IoError::schema(csv_path, format!("line {line}"), e))?;
        let field = |col: usize| -> Result<u64, IoError> {
            rec[col].parse::<u64>().map_err(|e| {
                IoError::schema(csv_path, format!("line {line}, column {}", TRACE_HEADER[col]), e)
            })
        };
        let parents = rec[8]
            .split(';')
            .map(|p| {
                p.parse::<u64>().map_err(|e| {
                    IoError::schema(csv_path, format!("line {line}, column parents"), e)
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let small = |col: usize| field(col).map(|v| v as u32);
        rows.push(StepRecord {
            n: field(0)?,
            l: small(1)?,
            f: small(2)?,
            w: small(3)?,
            delta: small(4)?,
            completions: small(5)?,
            decision: ArrivalDecision::new(small(6)?, small(7)?, &parents),
        });
        if rows.last().map(|r| r.n) != Some(rows.len() as u64) {
            return Err(IoError::schema(csv_path, format!("line {line}, column n"), "steps must be numbered 1, 2, ..."));
        }
    }
    if rows.len() as u64 != meta.steps {
        return Err(IoError::schema(
            &meta_path(csv_path),
            "steps",
            format!("{} rows in the CSV, {} declared", rows.len(), meta.steps),
        ));
    }
    Ok(TraceFile { meta, rows })
}
