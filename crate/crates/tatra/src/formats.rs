//! Text and JSON formats for color matrices, label maps and tensors.
//!
//! A color matrix is written as a header line `N k` followed by `N` rows of
//! `N` space-separated colors in `0..k`.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};
use tatra_core::{CoherentConfiguration, IntersectionTensor, Label, TatraScheme};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn io_error(path: &Path, source: io::Error) -> FormatError {
    FormatError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn parse_error(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Parse {
        line,
        message: message.into(),
    }
}

/// A color matrix as read from disk, before any axiom checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorMatrix {
    pub size: usize,
    pub rank: usize,
    pub cells: Vec<u32>,
}

impl ColorMatrix {
    pub fn of(x: &CoherentConfiguration) -> Self {
        ColorMatrix {
            size: x.size(),
            rank: x.rank(),
            cells: x.cells().to_vec(),
        }
    }
}

pub fn format_matrix(m: &ColorMatrix) -> String {
    let mut out = String::with_capacity(m.cells.len() * 3 + 16);
    let _ = writeln!(out, "{} {}", m.size, m.rank);
    for row in m.cells.chunks(m.size.max(1)) {
        let mut first = true;
        for c in row {
            if !first {
                out.push(' ');
            }
            first = false;
            let _ = write!(out, "{c}");
        }
        out.push('\n');
    }
    out
}

pub fn parse_matrix(text: &str) -> Result<ColorMatrix, FormatError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (line, header) = lines.next().ok_or_else(|| parse_error(1, "empty matrix file"))?;
    let head: Vec<&str> = header.split_whitespace().collect();
    let [size, rank] = head[..] else {
        return Err(parse_error(line, "expected header \"N k\""));
    };
    let size: usize = size.parse().map_err(|_| parse_error(line, "bad N"))?;
    let rank: usize = rank.parse().map_err(|_| parse_error(line, "bad k"))?;

    let mut cells = Vec::with_capacity(size * size);
    let mut rows = 0;
    for (line, text) in lines {
        rows += 1;
        if rows > size {
            return Err(parse_error(line, format!("more than {size} rows")));
        }
        let before = cells.len();
        for tok in text.split_whitespace() {
            let c: u32 = tok
                .parse()
                .map_err(|_| parse_error(line, format!("bad color {tok:?}")))?;
            if c as usize >= rank {
                return Err(parse_error(line, format!("color {c} out of range 0..{rank}")));
            }
            cells.push(c);
        }
        if cells.len() - before != size {
            return Err(parse_error(
                line,
                format!("row has {} entries, expected {size}", cells.len() - before),
            ));
        }
    }
    if rows != size {
        return Err(parse_error(rows + 1, format!("found {rows} rows, expected {size}")));
    }
    Ok(ColorMatrix { size, rank, cells })
}

pub fn read_matrix(path: &Path) -> Result<ColorMatrix, FormatError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    parse_matrix(&text)
}

pub fn write_matrix(path: &Path, m: &ColorMatrix) -> Result<(), FormatError> {
    std::fs::write(path, format_matrix(m)).map_err(|e| io_error(path, e))
}

/// Label map `{color: {"kind": "r" | "s", "g": ...}}`, keys in color order.
pub struct LabelMap<'a>(pub &'a [Label]);

impl Serialize for LabelMap<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (color, label) in self.0.iter().enumerate() {
            map.serialize_entry(&color.to_string(), label)?;
        }
        map.end()
    }
}

pub fn labels_json(x: &TatraScheme) -> Result<String, FormatError> {
    let labels = x.labels();
    Ok(serde_json::to_string_pretty(&LabelMap(&labels))?)
}

pub fn parse_labels(text: &str) -> Result<Vec<Label>, FormatError> {
    let map: std::collections::BTreeMap<String, Label> = serde_json::from_str(text)?;
    let mut labels = vec![None; map.len()];
    for (key, label) in map {
        let color: usize = key
            .parse()
            .map_err(|_| parse_error(1, format!("bad color key {key:?}")))?;
        let slot = labels
            .get_mut(color)
            .ok_or_else(|| parse_error(1, format!("color {color} out of range")))?;
        *slot = Some(label);
    }
    Ok(labels.into_iter().map(|l| l.expect("keys are distinct and in range")).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorFile {
    pub rank: usize,
    /// `entries[r][s][t]` is the intersection number `c_{rs}^t`.
    pub entries: Vec<Vec<Vec<u32>>>,
}

impl TensorFile {
    pub fn of(t: &IntersectionTensor) -> Self {
        TensorFile {
            rank: t.rank(),
            entries: t.nested(),
        }
    }
}

pub fn tensor_json(t: &IntersectionTensor) -> Result<String, FormatError> {
    Ok(serde_json::to_string(&TensorFile::of(t))?)
}

pub fn write_text(path: &Path, text: &str) -> Result<(), FormatError> {
    std::fs::write(path, text).map_err(|e| io_error(path, e))
}

pub fn read_text(path: &Path) -> Result<String, FormatError> {
    std::fs::read_to_string(path).map_err(|e| io_error(path, e))
}
