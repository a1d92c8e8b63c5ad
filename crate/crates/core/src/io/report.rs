use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::write_all;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Csv,
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReportFormat::Json => "json",
            ReportFormat::Csv => "csv",
        })
    }
}

impl FromStr for ReportFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" | "jsonl" | "json-lines" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            _ => Err(Error::Parse {
                input: s.into(),
                reason: "expected json or csv".into(),
            }),
        }
    }
}

/// One cell of a report row.
#[derive(Clone, Debug, PartialEq)]
pub enum ReportValue {
    Int(i64),
    Float(f64),
    Text(String),
    Null,
}

impl From<f64> for ReportValue {
    fn from(v: f64) -> Self {
        ReportValue::Float(v)
    }
}

impl From<usize> for ReportValue {
    fn from(v: usize) -> Self {
        ReportValue::Int(v as i64)
    }
}

impl From<&str> for ReportValue {
    fn from(v: &str) -> Self {
        ReportValue::Text(v.to_string())
    }
}

impl From<String> for ReportValue {
    fn from(v: String) -> Self {
        ReportValue::Text(v)
    }
}

impl<T: Into<ReportValue>> From<Option<T>> for ReportValue {
    fn from(v: Option<T>) -> Self {
        v.map_or(ReportValue::Null, Into::into)
    }
}

/// Fixed notation with 9 significant digits (`1.00000000`, `0.912345678`).
/// Non-finite values render as `NaN`, `inf` or `-inf`.
pub fn format_float(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    let decimals = if v == 0.0 {
        8
    } else {
        (8 - v.abs().log10().floor() as i64).max(0) as usize
    };
    format!("{v:.decimals$}")
}

fn json_cell(v: &ReportValue) -> Result<String> {
    Ok(match v {
        ReportValue::Int(i) => i.to_string(),
        ReportValue::Float(f) if f.is_finite() => format_float(*f),
        ReportValue::Float(_) | ReportValue::Null => "null".into(),
        ReportValue::Text(s) => serde_json::to_string(s).map_err(|e| Error::InvalidParameter(e.to_string()))?,
    })
}

fn csv_cell(v: &ReportValue) -> String {
    match v {
        ReportValue::Int(i) => i.to_string(),
        ReportValue::Float(f) => format_float(*f),
        ReportValue::Text(s) => s.clone(),
        ReportValue::Null => String::new(),
    }
}

/// Writes `rows` under `columns`: one JSON object per line in column order,
/// or CSV with a single header row (emitted even when there are no rows).
pub fn write_report<W: Write>(
    w: &mut W,
    columns: &[&str],
    rows: &[Vec<ReportValue>],
    format: ReportFormat,
) -> Result<()> {
    if let Some(bad) = rows.iter().find(|r| r.len() != columns.len()) {
        return Err(Error::LengthMismatch(columns.len(), bad.len()));
    }
    match format {
        ReportFormat::Json => {
            for row in rows {
                let mut line = String::from("{");
                for (i, (c, v)) in columns.iter().zip(row).enumerate() {
                    if i > 0 {
                        line.push(',');
                    }
                    let key = serde_json::to_string(c).map_err(|e| Error::InvalidParameter(e.to_string()))?;
                    line.push_str(&key);
                    line.push(':');
                    line.push_str(&json_cell(v)?);
                }
                line.push_str("}\n");
                write_all(w, line.as_bytes())?;
            }
            Ok(())
        }
        ReportFormat::Csv => {
            let mut out = csv::Writer::from_writer(Vec::new());
            let csv_err = |e: csv::Error| Error::InvalidParameter(e.to_string());
            out.write_record(columns).map_err(csv_err)?;
            for row in rows {
                out.write_record(row.iter().map(csv_cell)).map_err(csv_err)?;
            }
            let bytes = out.into_inner().map_err(|e| Error::InvalidParameter(e.to_string()))?;
            write_all(w, &bytes)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format() {
        assert_eq!(format_float(1.0), "1.00000000");
        assert_eq!(format_float(0.0), "0.00000000");
        assert_eq!(format_float(0.912345678912), "0.912345679");
        assert_eq!(format_float(-0.5), "-0.500000000");
        assert_eq!(format_float(1234.5), "1234.50000");
        assert_eq!(format_float(3e9), "3000000000");
        let v = 0.123456789123;
        assert!((format_float(v).parse::<f64>().unwrap() - v).abs() < 1e-9);
    }

    #[test]
    fn json_and_csv() {
        let cols = ["frame", "score", "label"];
        let rows = vec![vec![ReportValue::Int(0), ReportValue::Float(1.0), "a\"b".into()]];
        let mut j = Vec::new();
        write_report(&mut j, &cols, &rows, ReportFormat::Json).unwrap();
        assert_eq!(String::from_utf8(j).unwrap(), "{\"frame\":0,\"score\":1.00000000,\"label\":\"a\\\"b\"}\n");
        let mut c = Vec::new();
        write_report(&mut c, &cols, &[], ReportFormat::Csv).unwrap();
        assert_eq!(String::from_utf8(c).unwrap(), "frame,score,label\n");
        let mut c = Vec::new();
        write_report(&mut c, &cols, &rows, ReportFormat::Csv).unwrap();
        assert_eq!(String::from_utf8(c).unwrap(), "frame,score,label\n0,1.00000000,\"a\"\"b\"\n");
    }

    #[test]
    fn nan_is_null_in_json() {
        let mut j = Vec::new();
        write_report(&mut j, &["x"], &[vec![ReportValue::Float(f64::NAN)]], ReportFormat::Json).unwrap();
        assert_eq!(String::from_utf8(j).unwrap(), "{\"x\":null}\n");
    }
}
