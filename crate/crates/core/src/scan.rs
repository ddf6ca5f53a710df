use std::fmt::{self, Write as _};

use serde::ser::{Serialize, SerializeMap, SerializeSeq, Serializer};

/// A cell of a [`ScanSeries`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScanValue {
    Real(f64),
    Int(i64),
    Flag(bool),
}

impl fmt::Display for ScanValue {
    /// Shortest round-trip decimal form, `inf`/`-inf`/`nan` for non-finite.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScanValue::Real(x) if x.is_nan() => f.write_str("nan"),
            ScanValue::Real(x) if x.is_infinite() => {
                f.write_str(if *x > 0.0 { "inf" } else { "-inf" })
            }
            ScanValue::Real(x) => write!(f, "{x:?}"),
            ScanValue::Int(n) => write!(f, "{n}"),
            ScanValue::Flag(b) => write!(f, "{b}"),
        }
    }
}

impl From<f64> for ScanValue {
    fn from(x: f64) -> Self {
        ScanValue::Real(x)
    }
}

impl From<i64> for ScanValue {
    fn from(n: i64) -> Self {
        ScanValue::Int(n)
    }
}

impl From<bool> for ScanValue {
    fn from(b: bool) -> Self {
        ScanValue::Flag(b)
    }
}

/// Tabulated rows with named columns, for CSV or JSON emission.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanSeries {
    columns: Vec<String>,
    rows: Vec<Vec<ScanValue>>,
}

impl ScanSeries {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    /// Appends a row.
    ///
    /// # Panics
    ///
    /// If the row length differs from the number of columns.
    pub fn push(&mut self, row: Vec<ScanValue>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width must match the header"
        );
        self.rows.push(row);
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<ScanValue>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Numeric column by name; flags read as 0/1.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(
            self.rows
                .iter()
                .map(|r| match r[k] {
                    ScanValue::Real(x) => x,
                    ScanValue::Int(n) => n as f64,
                    ScanValue::Flag(b) => f64::from(u8::from(b)),
                })
                .collect(),
        )
    }

    /// Header line plus one line per row, `.` decimal separator.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{v}");
            }
            out.push('\n');
        }
        out
    }
}

struct JsonRow<'a>(&'a [String], &'a [ScanValue]);

impl Serialize for JsonRow<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0.iter().zip(self.1) {
            match v {
                ScanValue::Real(x) if x.is_finite() => map.serialize_entry(k, x)?,
                // JSON has no infinities.
                ScanValue::Real(_) => map.serialize_entry(k, &v.to_string())?,
                ScanValue::Int(n) => map.serialize_entry(k, n)?,
                ScanValue::Flag(b) => map.serialize_entry(k, b)?,
            }
        }
        map.end()
    }
}

/// Serializes as an array of `{column: value}` objects.
impl Serialize for ScanSeries {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.rows.len()))?;
        for row in &self.rows {
            seq.serialize_element(&JsonRow(&self.columns, row))?;
        }
        seq.end()
    }
}
