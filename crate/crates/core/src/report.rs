//! Versioned JSON report envelope.

use std::io::Write;

use chrono::{DateTime, Utc};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::typing::ErrorDistribution;

pub const REPORT_SCHEMA_VERSION: &str = "1";

/// A serializable report with a fixed `kind` tag.
pub trait Report: Serialize {
    const KIND: &'static str;
}

impl Report for ErrorDistribution {
    const KIND: &'static str = "error_distribution";
}

/// Formats a Unix timestamp as `YYYY-MM-DDTHH:MM:SSZ`.
pub fn format_utc(secs: i64) -> Result<String> {
    let dt = DateTime::<Utc>::from_timestamp(secs, 0)
        .ok_or_else(|| Error::Config(format!("timestamp {secs} out of range")))?;
    Ok(dt.format("%Y-%m-%dT%H:%M:%SZ").to_string())
}

/// Report timestamp taken from `SOURCE_DATE_EPOCH`, or the epoch when unset,
/// so equal inputs always give equal bytes.
pub fn created_utc() -> Result<String> {
    match std::env::var("SOURCE_DATE_EPOCH") {
        Ok(raw) => {
            let secs = raw
                .trim()
                .parse::<i64>()
                .map_err(|_| Error::Config(format!("SOURCE_DATE_EPOCH is not an integer: '{raw}'")))?;
            format_utc(secs)
        }
        Err(_) => format_utc(0),
    }
}

/// The full envelope as a JSON value. Object keys come out sorted.
pub fn report_value<R: Report>(report: &R, created_utc: &str) -> Result<Value> {
    Ok(json!({
        "schema_version": REPORT_SCHEMA_VERSION,
        "kind": R::KIND,
        "created_utc": created_utc,
        "payload": serde_json::to_value(report)?,
    }))
}

pub fn write_report<R: Report>(report: &R, created_utc: &str, mut out: impl Write) -> Result<()> {
    let value = report_value(report, created_utc)?;
    serde_json::to_writer_pretty(&mut out, &value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}
