//! Episode traces as line-delimited JSON.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::presolve::PresolverId;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub state: Vec<f64>,
    pub action: Vec<PresolverId>,
    pub reward: f64,
    pub done: bool,
}

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("line {line}: {source}")]
    Parse {
        line: usize,
        source: serde_json::Error,
    },
    #[error("line {line}: {msg}")]
    Invalid { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub fn write<W: Write>(mut out: W, records: &[TraceRecord]) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Parses records, skipping blank lines. Rejects non-finite or positive
/// rewards and non-finite states.
pub fn read<R: BufRead>(input: R) -> Result<Vec<TraceRecord>, TraceError> {
    let mut out = Vec::new();
    for (k, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: TraceRecord =
            serde_json::from_str(&line).map_err(|source| TraceError::Parse { line: k + 1, source })?;
        if !rec.reward.is_finite() || rec.reward > 0.0 {
            return Err(TraceError::Invalid {
                line: k + 1,
                msg: format!("reward {} must be finite and ≤ 0", rec.reward),
            });
        }
        if rec.state.iter().any(|v| !v.is_finite()) {
            return Err(TraceError::Invalid {
                line: k + 1,
                msg: "non-finite state entry".into(),
            });
        }
        out.push(rec);
    }
    Ok(out)
}

pub fn read_str(text: &str) -> Result<Vec<TraceRecord>, TraceError> {
    read(text.as_bytes())
}
