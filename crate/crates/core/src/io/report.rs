//! Deterministic report serialization.
//!
//! JSON keys follow struct declaration order (maps are sorted), reals are
//! rounded to 6 significant digits, and non-finite reals become `null`.

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl ReportFormat {
    pub fn name(self) -> &'static str {
        match self {
            ReportFormat::Json => "json",
            ReportFormat::Csv => "csv",
        }
    }
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::invalid(format!("unknown format `{other}`"))),
        }
    }
}

/// Anything `write_report` can serialize.
pub trait Report: Serialize {
    /// Human-readable kind, used in error messages.
    const KIND: &'static str;

    /// CSV rendering, or `None` when the kind has no tabular form.
    fn to_csv(&self) -> Option<String>;
}

pub fn write_report<R: Report>(report: &R, format: ReportFormat) -> Result<Vec<u8>> {
    match format {
        ReportFormat::Json => {
            let mut text = serde_json::to_string_pretty(report)?;
            text.push('\n');
            Ok(text.into_bytes())
        }
        ReportFormat::Csv => {
            report.to_csv().map(String::into_bytes).ok_or(Error::UnsupportedFormat { kind: R::KIND, format: "csv" })
        }
    }
}

/// Rounds to `digits` significant digits (decimal).
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x).parse().unwrap_or(x)
}

/// Text form used in CSV cells: 6 significant digits, empty for non-finite.
pub fn format_real(x: f64) -> String {
    if x.is_finite() {
        let r = round_sig(x, 6);
        if r == 0.0 {
            "0".to_string()
        } else {
            r.to_string()
        }
    } else {
        String::new()
    }
}

/// A real serialized with 6 significant digits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Real(pub f64);

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            let r = round_sig(self.0, 6);
            // integral values print as `1.0` / `0.0` through serde_json
            serializer.serialize_f64(if r == 0.0 { 0.0 } else { r })
        } else {
            serializer.serialize_none()
        }
    }
}

impl From<f64> for Real {
    fn from(x: f64) -> Self {
        Real(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(round_sig(0.0502, 6), 0.0502);
        assert_eq!(round_sig(0.123456789, 6), 0.123457);
        assert_eq!(round_sig(-1234567.0, 6), -1234570.0);
        assert_eq!(format_real(2.0 / 3.0), "0.666667");
        assert_eq!(format_real(f64::NAN), "");
        assert_eq!(format_real(-0.0), "0");
    }

    #[test]
    fn real_serializes_rounded_or_null() {
        assert_eq!(serde_json::to_string(&Real(0.05020000001)).unwrap(), "0.0502");
        assert_eq!(serde_json::to_string(&Real(f64::INFINITY)).unwrap(), "null");
        assert_eq!(serde_json::to_string(&Real(-0.0)).unwrap(), "0.0");
    }
}
