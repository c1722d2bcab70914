//! Reconstruction trace as CSV.

use std::fs;
use std::path::Path;

use super::field::fmt17;
use crate::error::{Error, Result};
use crate::inversion::{IterationRecord, ReconstructionTrace};

pub const TRACE_HEADER: &str = "iter,J,rel_err_l2,rel_err_h1,step_accepted";

pub fn trace_to_csv(records: &[IterationRecord]) -> String {
    let opt = |v: Option<f64>| v.map(fmt17).unwrap_or_default();
    let mut out = format!("{TRACE_HEADER}\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.iteration,
            fmt17(r.j),
            opt(r.rel_err_l2),
            opt(r.rel_err_h1),
            r.step_accepted
        ));
    }
    out
}

pub fn write_trace_csv(trace: &ReconstructionTrace, path: &Path) -> Result<()> {
    fs::write(path, trace_to_csv(&trace.records)).map_err(|e| Error::io(path, e))
}

pub fn parse_trace_csv(text: &str, path: &Path) -> Result<Vec<IterationRecord>> {
    let err = |line: usize, message: String| Error::Parse {
        path: path.into(),
        line,
        message,
    };
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(TRACE_HEADER) {
        return Err(err(1, format!("expected header `{TRACE_HEADER}`")));
    }
    let mut records = Vec::new();
    for (idx, line) in lines.enumerate() {
        let ln = idx + 2;
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 5 {
            return Err(err(ln, format!("expected 5 columns, found {}", cols.len())));
        }
        let num = |s: &str| -> Result<f64> { s.parse().map_err(|_| err(ln, format!("invalid number `{s}`"))) };
        let opt = |s: &str| -> Result<Option<f64>> { if s.is_empty() { Ok(None) } else { num(s).map(Some) } };
        records.push(IterationRecord {
            iteration: cols[0].parse().map_err(|_| err(ln, format!("invalid iteration `{}`", cols[0])))?,
            j: num(cols[1])?,
            rel_err_l2: opt(cols[2])?,
            rel_err_h1: opt(cols[3])?,
            step_accepted: match cols[4].trim() {
                "true" => true,
                "false" => false,
                other => return Err(err(ln, format!("invalid flag `{other}`"))),
            },
        });
    }
    Ok(records)
}

pub fn read_trace_csv(path: &Path) -> Result<Vec<IterationRecord>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_trace_csv(&text, path)
}
