use std::io::Write;

use fflab::Error;
use serde::Serialize;

use crate::{Common, Format};

/// Writes `rows` as CSV or `json` as a pretty JSON document, to `--out` or
/// stdout. Both renderings are pure functions of their inputs.
pub fn emit<R: Serialize, J: Serialize>(common: &Common, rows: &[R], json: &J) -> Result<(), Error> {
    let bytes = match common.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in rows {
                w.serialize(row).map_err(|e| Error::InvalidInput(format!("csv encoding failed: {e}")))?;
            }
            w.into_inner().map_err(|e| Error::InvalidInput(format!("csv encoding failed: {e}")))?
        }
        Format::Json => {
            let mut s = serde_json::to_string_pretty(json)
                .map_err(|e| Error::InvalidInput(format!("json encoding failed: {e}")))?;
            s.push('\n');
            s.into_bytes()
        }
    };
    match &common.out {
        Some(path) => std::fs::write(path, &bytes)
            .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(&bytes)
            .map_err(|e| Error::InvalidInput(format!("cannot write to stdout: {e}"))),
    }
}

/// A JSON report: the schema version followed by the payload's fields.
#[derive(Serialize)]
pub struct Versioned<'a, T: Serialize> {
    pub schema_version: u32,
    pub command: &'a str,
    #[serde(flatten)]
    pub body: T,
}

pub fn versioned<'a, T: Serialize>(command: &'a str, body: T) -> Versioned<'a, T> {
    Versioned { schema_version: 1, command, body }
}

/// Wraps a row list so that it can be flattened into [`Versioned`].
#[derive(Serialize)]
pub struct Rows<'a, T: Serialize> {
    pub rows: &'a [T],
}
