//! Tabular outputs. Every table has a header row; `.tsv` files are
//! tab-separated, `.csv` files comma-separated, and both read back through
//! [`read_table`] into the same row types.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// `extract`: one row per pattern.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternFrequency {
    pub pattern: String,
    pub frequency: u64,
}

/// `shift/chains.tsv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainRow {
    pub kappa_i: String,
    pub kappa_j: String,
    pub d_first: f64,
    pub d_last: f64,
    pub shift: f64,
}

/// `shift/shift_table.tsv`, largest mean shift first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftTableRow {
    pub kappa: String,
    pub mean_shift: f64,
    pub mean_cosine: f64,
    pub n_chains: usize,
    pub bin: String,
}

/// `shift/bins.csv`: the input cosines behind each bin, for plotting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinCosine {
    pub bin: String,
    pub kappa: String,
    pub mean_cosine: f64,
}

/// `population/frequencies.csv`: input frequency of a grouped pattern for one speaker.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupFrequency {
    pub group: String,
    pub speaker: String,
    pub pattern: String,
    pub frequency: u64,
}

/// `population/projections.tsv`: one row per token.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Projection {
    pub sent_id: String,
    pub token_id: usize,
    pub token: String,
    pub core: String,
    pub periphery: String,
}

fn delimiter(path: &Path) -> u8 {
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => b',',
        _ => b'\t',
    }
}

pub fn table_bytes<T: Serialize>(rows: &[T], delimiter: u8) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new()
        .delimiter(delimiter)
        .from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("rows serialize");
    }
    w.into_inner().expect("in-memory writer")
}

/// An empty table still gets its header.
pub fn write_table<T: Serialize>(path: &Path, rows: &[T], header: &[&str]) -> Result<()> {
    let bytes = if rows.is_empty() {
        let mut line = header.join(if delimiter(path) == b',' { "," } else { "\t" });
        line.push('\n');
        line.into_bytes()
    } else {
        table_bytes(rows, delimiter(path))
    };
    crate::write_file(path, &bytes)
}

pub fn read_table<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::ReaderBuilder::new()
        .delimiter(delimiter(path))
        .from_path(path)
        .map_err(|e| CliError::format(path, e))?;
    r.deserialize()
        .map(|row| row.map_err(|e| CliError::format(path, e)))
        .collect()
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("value serializes");
    text.push('\n');
    crate::write_file(path, text.as_bytes())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
    serde_json::from_str(&text).map_err(|e| CliError::format(path, e))
}
