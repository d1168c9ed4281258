//! CSV and JSON output. Floats carry 17 significant digits so every value
//! parses back to the identical `f64`.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::Value;

use crate::error::CliError;
use crate::sweep::SweepRow;

pub const SWEEP_HEADER: [&str; 10] = [
    "gamma",
    "wv_re",
    "wv_im",
    "nwv_weak_limit",
    "nwv_exact",
    "p_click1",
    "p_postselect_total",
    "mc_estimate",
    "mc_std_error",
    "diverged",
];

pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn optional(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SWEEP_HEADER).expect("in-memory write");
    for r in rows {
        w.write_record([
            format_float(r.gamma),
            optional(r.wv_re),
            optional(r.wv_im),
            optional(r.nwv_weak_limit),
            optional(r.nwv_exact),
            optional(r.p_click1),
            optional(r.p_postselect_total),
            optional(r.mc_estimate),
            optional(r.mc_std_error),
            r.diverged.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ASCII output")
}

/// Inverse of [`sweep_csv`].
pub fn parse_sweep_csv(text: &str) -> Result<Vec<SweepRow>, String> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| e.to_string())?;
    if header.iter().ne(SWEEP_HEADER) {
        return Err(format!("unexpected header {header:?}"));
    }
    let float = |s: &str| s.parse::<f64>().map_err(|e| format!("{s:?}: {e}"));
    let opt = |s: &str| if s.is_empty() { Ok(None) } else { float(s).map(Some) };
    reader
        .records()
        .map(|record| {
            let r = record.map_err(|e| e.to_string())?;
            Ok(SweepRow {
                gamma: float(&r[0])?,
                wv_re: opt(&r[1])?,
                wv_im: opt(&r[2])?,
                nwv_weak_limit: opt(&r[3])?,
                nwv_exact: opt(&r[4])?,
                p_click1: opt(&r[5])?,
                p_postselect_total: opt(&r[6])?,
                mc_estimate: opt(&r[7])?,
                mc_std_error: opt(&r[8])?,
                diverged: r[9].parse().map_err(|e| format!("{:?}: {e}", &r[9]))?,
            })
        })
        .collect()
}

/// Compact JSON whose floats are written in scientific notation with 17
/// significant digits.
struct SignificantDigits;

impl Formatter for SignificantDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_float(value).as_bytes())
    }
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SignificantDigits);
    value.serialize(&mut ser).expect("report serializes");
    out.push(b'\n');
    String::from_utf8(out).expect("JSON is UTF-8")
}

fn flatten(prefix: &str, value: &Value, out: &mut Vec<[String; 2]>) {
    let join = |key: &str| if prefix.is_empty() { key.to_string() } else { format!("{prefix}.{key}") };
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                flatten(&join(k), v, out);
            }
        }
        Value::Null => out.push([prefix.to_string(), String::new()]),
        Value::Number(n) if n.is_f64() => out.push([prefix.to_string(), format_float(n.as_f64().unwrap())]),
        other => out.push([prefix.to_string(), other.to_string()]),
    }
}

/// Two-column `field,value` table of a report, nested fields joined by dots.
pub fn report_csv<T: Serialize>(report: &T) -> String {
    let value = serde_json::to_value(report).expect("report serializes");
    let mut rows = Vec::new();
    flatten("", &value, &mut rows);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["field", "value"]).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ASCII output")
}

/// Writes `text` to `path`, or to stdout when no path is given.
pub fn write_output(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io {
            path: path.to_owned(),
            source,
        }),
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}
