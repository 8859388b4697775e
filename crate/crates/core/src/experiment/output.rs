use std::path::Path;

use super::{ReplicateOutcome, ReplicateStatus};
use crate::analysis::AggregateCurve;
use crate::error::{Error, Result};
use crate::solvers::RunTrace;

pub const TRACE_HEADER: [&str; 5] = ["k", "queries", "loss", "normalized_loss", "lambda_min_hbar"];

/// Scientific notation with 17 significant digits, which round-trips every
/// finite `f64`.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// One parsed row of a trace CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceRow {
    pub k: usize,
    pub queries: u64,
    pub loss: f64,
    pub normalized_loss: f64,
    pub lambda_min_hbar: f64,
}

pub fn write_trace_csv(path: impl AsRef<Path>, trace: &RunTrace, normalized: &[f64]) -> Result<()> {
    if normalized.len() != trace.records.len() {
        return Err(Error::invalid("normalized column length differs from the trace"));
    }
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(TRACE_HEADER)?;
    for (r, n) in trace.records.iter().zip(normalized) {
        w.write_record([
            r.k.to_string(),
            r.queries.to_string(),
            format_float(r.loss),
            format_float(*n),
            format_float(r.lambda_min_hbar),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, line: usize) -> Result<T> {
    let raw = rec.get(i).ok_or_else(|| Error::Parse {
        line,
        message: format!("missing column {i}"),
    })?;
    raw.parse().map_err(|_| Error::Parse {
        line,
        message: format!("cannot parse `{raw}` in column `{}`", TRACE_HEADER[i]),
    })
}

pub fn read_trace_csv(path: impl AsRef<Path>) -> Result<Vec<TraceRow>> {
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.clone();
    if header.iter().ne(TRACE_HEADER) {
        return Err(Error::Parse {
            line: 1,
            message: format!("unexpected header {header:?}"),
        });
    }
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        rows.push(TraceRow {
            k: field(&rec, 0, line)?,
            queries: field(&rec, 1, line)?,
            loss: field(&rec, 2, line)?,
            normalized_loss: field(&rec, 3, line)?,
            lambda_min_hbar: field(&rec, 4, line)?,
        });
    }
    Ok(rows)
}

pub(super) fn write_replicates_csv(path: impl AsRef<Path>, outcomes: &[ReplicateOutcome]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "replicate",
        "status",
        "iterations_completed",
        "final_loss",
        "final_normalized_loss",
    ])?;
    for o in outcomes {
        let status = match o.status {
            ReplicateStatus::Completed => "completed".to_string(),
            ReplicateStatus::Diverged { iteration } => format!("diverged@{iteration}"),
        };
        let last = o.trace.last();
        w.write_record([
            o.replicate.to_string(),
            status,
            last.k.to_string(),
            format_float(last.loss),
            format_float(*o.normalized().last().expect("nonempty trace")),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub(super) fn write_summary_csv(
    path: impl AsRef<Path>,
    loss: &AggregateCurve,
    normalized: &AggregateCurve,
) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "k",
        "queries",
        "mean_loss",
        "stderr_loss",
        "mean_normalized_loss",
        "stderr_normalized_loss",
        "n_replicates",
    ])?;
    for i in 0..loss.len() {
        w.write_record([
            loss.x[i].to_string(),
            loss.queries[i].to_string(),
            format_float(loss.mean[i]),
            format_float(loss.stderr[i]),
            format_float(normalized.mean[i]),
            format_float(normalized.stderr[i]),
            loss.n_replicates.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
