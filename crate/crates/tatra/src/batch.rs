//! Batch files: one `q n` pair per line, `#` starts a comment.

use rayon::prelude::*;
use serde::Serialize;
use tatra_core::{SeparabilityOptions, SeparabilityReport};

use crate::commands::{self, InstanceSpec};
use crate::formats::FormatError;

pub fn parse_batch(text: &str) -> Result<Vec<InstanceSpec>, FormatError> {
    let mut specs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = || FormatError::Parse {
            line: i + 1,
            message: format!("expected \"q n\", found {:?}", raw.trim()),
        };
        let mut tok = line.split_whitespace();
        let (Some(q), Some(n), None) = (tok.next(), tok.next(), tok.next()) else {
            return Err(bad());
        };
        specs.push(InstanceSpec {
            q: q.parse().map_err(|_| bad())?,
            n: n.parse().map_err(|_| bad())?,
        });
    }
    Ok(specs)
}

#[derive(Debug, Clone, Serialize)]
pub struct BatchEntry {
    pub q: u64,
    pub n: u32,
    pub status: &'static str,
    pub exit_code: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<SeparabilityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

fn run_one(spec: InstanceSpec, opts: &SeparabilityOptions, max_degree: usize) -> BatchEntry {
    let result = spec
        .build(max_degree)
        .and_then(|x| commands::report(&x, opts));
    match result {
        Ok(report) => BatchEntry {
            q: spec.q,
            n: spec.n,
            status: "ok",
            exit_code: 0,
            report: Some(report),
            error: None,
        },
        Err(e) => BatchEntry {
            q: spec.q,
            n: spec.n,
            status: e.status(),
            exit_code: e.exit_code(),
            report: None,
            error: Some(e.to_string()),
        },
    }
}

/// Runs every instance, in parallel, keeping the input order.
pub fn run_batch(specs: &[InstanceSpec], opts: &SeparabilityOptions, max_degree: usize) -> Vec<BatchEntry> {
    specs
        .par_iter()
        .map(|&spec| run_one(spec, opts, max_degree))
        .collect()
}

/// Exit code of a whole batch: the largest per-instance code.
pub fn batch_exit_code(entries: &[BatchEntry]) -> u8 {
    entries.iter().map(|e| e.exit_code).max().unwrap_or(0)
}

pub fn batch_text(entries: &[BatchEntry]) -> String {
    let mut out = String::new();
    for e in entries {
        match (&e.report, &e.error) {
            (Some(r), _) => out.push_str(&commands::report_text(r)),
            (None, Some(msg)) => out.push_str(&format!("X({}, {}): {}: {msg}\n", e.q, e.n, e.status)),
            (None, None) => {}
        }
    }
    out
}
