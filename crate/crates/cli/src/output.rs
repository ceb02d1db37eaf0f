//! Byte-stable CSV and JSON emission.
//!
//! Floats are printed like C's `%.12e`. Each file carries the tool version and
//! the SHA-256 of the config text it came from.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde::ser::{Serialize, SerializeMap, Serializer};
use serde_json::value::RawValue;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Format a float as `d.dddddddddddde+XX`.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{x:.12e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

/// Float that serializes to JSON with the fixed format; non-finite values become `null`.
#[derive(Debug, Clone, Copy)]
pub struct Fixed(pub f64);

impl Serialize for Fixed {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let raw = RawValue::from_string(fmt_float(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

pub fn fixed_vec(xs: &[f64]) -> Vec<Fixed> {
    xs.iter().copied().map(Fixed).collect()
}

/// Where an output came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub config_sha256: String,
}

impl Provenance {
    pub fn of_config(text: &str) -> Self {
        let digest = Sha256::digest(text.as_bytes());
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            config_sha256: digest.iter().map(|b| format!("{b:02x}")).collect(),
        }
    }

    pub fn csv_comment(&self) -> String {
        format!(
            "# tool={} version={} config_sha256={}\n",
            self.tool, self.version, self.config_sha256
        )
    }
}

impl Serialize for Provenance {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(3))?;
        m.serialize_entry("tool", self.tool)?;
        m.serialize_entry("version", self.version)?;
        m.serialize_entry("config_sha256", &self.config_sha256)?;
        m.end()
    }
}

/// Cell of a table: a fixed-format float or verbatim text.
#[derive(Debug, Clone)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => fmt_float(*x),
            Cell::Int(k) => k.to_string(),
            Cell::Text(t) => t.clone(),
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Cell::Num(x) => Fixed(*x).serialize(s),
            Cell::Int(k) => s.serialize_i64(*k),
            Cell::Text(t) => s.serialize_str(t),
        }
    }
}

/// Rectangular table with named columns.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<I: IntoIterator<Item = S>, S: Into<String>>(columns: I) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self, prov: &Provenance) -> Result<String> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        let body = String::from_utf8(w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?)?;
        Ok(prov.csv_comment() + &body)
    }

    /// JSON object with the provenance and one array per column.
    pub fn to_json(&self, prov: &Provenance) -> Result<String> {
        #[derive(serde::Serialize)]
        struct Doc<'a> {
            provenance: &'a Provenance,
            columns: Columns<'a>,
        }
        struct Columns<'a>(&'a Table);
        impl Serialize for Columns<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let mut m = s.serialize_map(Some(self.0.columns.len()))?;
                for (j, name) in self.0.columns.iter().enumerate() {
                    let col: Vec<&Cell> = self.0.rows.iter().map(|r| &r[j]).collect();
                    m.serialize_entry(name, &col)?;
                }
                m.end()
            }
        }
        let doc = Doc {
            provenance: prov,
            columns: Columns(self),
        };
        Ok(to_json_string(&doc)? + "\n")
    }

    pub fn render(&self, format: Format, prov: &Provenance) -> Result<String> {
        match format {
            Format::Csv => self.to_csv(prov),
            Format::Json => self.to_json(prov),
        }
    }
}

/// Serialize through `serde_json` keeping raw float text intact.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

/// Output sink: a directory or standard output.
#[derive(Debug, Clone)]
pub struct Sink {
    pub dir: Option<PathBuf>,
}

impl Sink {
    /// Write `text` to `dir/name`, or to standard output without a directory.
    pub fn emit(&self, name: &str, text: &str) -> Result<()> {
        match &self.dir {
            Some(dir) => write_file(&dir.join(name), text),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())?;
                out.flush()?;
                Ok(())
            }
        }
    }
}

pub fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).with_context(|| format!("cannot create {}", parent.display()))?;
    }
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_matches_c() {
        assert_eq!(fmt_float(1.0), "1.000000000000e+00");
        assert_eq!(fmt_float(-0.00123), "-1.230000000000e-03");
        assert_eq!(fmt_float(6.02214076e23), "6.022140760000e+23");
        assert_eq!(fmt_float(1e-300), "1.000000000000e-300");
        assert_eq!(fmt_float(0.0), "0.000000000000e+00");
        assert_eq!(fmt_float(f64::NAN), "nan");
        assert_eq!(fmt_float(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn json_keeps_fixed_floats() {
        let prov = Provenance::of_config("x");
        let mut t = Table::new(["x", "label"]);
        t.push(vec![Cell::Num(0.5), Cell::Text("a".into())]);
        t.push(vec![Cell::Num(f64::NAN), Cell::Text("b".into())]);
        let json = t.to_json(&prov).unwrap();
        assert!(json.contains("5.000000000000e-01"), "{json}");
        assert!(json.contains("null"));
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["columns"]["label"][1], "b");
    }

    #[test]
    fn csv_has_provenance_and_header() {
        let prov = Provenance::of_config("");
        assert_eq!(
            prov.config_sha256,
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
        let mut t = Table::new(["a", "b"]);
        t.push(vec![Cell::Int(3), Cell::Num(2.0)]);
        let csv = t.to_csv(&prov).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert!(lines[0].starts_with("# tool="));
        assert_eq!(lines[1], "a,b");
        assert_eq!(lines[2], "3,2.000000000000e+00");
    }

    proptest::proptest! {
        #[test]
        fn fixed_float_round_trips(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            let s = fmt_float(x);
            let back: f64 = s.parse().unwrap();
            proptest::prop_assert!((back - x).abs() <= 5e-13 * x.abs(), "{} -> {}", x, s);
            let (mantissa, exp) = s.split_once('e').unwrap();
            proptest::prop_assert_eq!(mantissa.trim_start_matches('-').len(), 14);
            proptest::prop_assert!(exp.starts_with('+') || exp.starts_with('-'));
            proptest::prop_assert!(exp.len() >= 3);
        }
    }
}
