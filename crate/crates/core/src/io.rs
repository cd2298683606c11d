//! Flat-file conventions: CSV tables with one header row, JSON manifests,
//! and the spelling of an infinite inverse temperature.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

/// Parses an inverse temperature; `inf` (any case, optional sign `+`) is
/// infinite.
pub fn parse_beta(text: &str) -> Result<f64> {
    let t = text.trim().to_ascii_lowercase();
    let t = t.strip_prefix('+').unwrap_or(&t);
    let beta = match t {
        "inf" | "infinity" => f64::INFINITY,
        _ => t.parse::<f64>().map_err(|_| Error::InvalidArgument(format!("cannot parse beta from {text:?}")))?,
    };
    if !(beta >= 0.0) {
        return Err(Error::InvalidArgument(format!("beta must be non-negative, got {text}")));
    }
    Ok(beta)
}

/// Serializes `f64::INFINITY` as the string `"inf"`, everything else as a number.
pub mod beta_serde {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(beta: &f64, s: S) -> Result<S::Ok, S::Error> {
        if beta.is_infinite() && *beta > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*beta)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Number(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Number(x) => Ok(x),
            Repr::Text(t) => super::parse_beta(&t).map_err(serde::de::Error::custom),
        }
    }
}

/// 17 significant digits, `inf`/`-inf`/`nan` spelled out.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

pub fn write_csv(path: &Path, header: &[&str], columns: &[&[f64]]) -> Result<()> {
    if header.len() != columns.len() {
        return Err(Error::DimensionMismatch { expected: header.len(), got: columns.len() });
    }
    let rows = columns.first().map_or(0, |c| c.len());
    if let Some(bad) = columns.iter().find(|c| c.len() != rows) {
        return Err(Error::DimensionMismatch { expected: rows, got: bad.len() });
    }
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in 0..rows {
        w.write_record(columns.iter().map(|c| fmt_f64(c[r])))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a CSV written by [`write_csv`] back into its header and columns.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut r = csv::Reader::from_path(path)?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    let mut columns = vec![Vec::new(); header.len()];
    for record in r.records() {
        let record = record?;
        for (col, field) in columns.iter_mut().zip(record.iter()) {
            let x = match field {
                "inf" => f64::INFINITY,
                "-inf" => f64::NEG_INFINITY,
                _ => field.parse().map_err(|_| Error::InvalidArgument(format!("bad number {field:?}")))?,
            };
            col.push(x);
        }
    }
    Ok((header, columns))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_spellings() {
        assert_eq!(parse_beta("inf").unwrap(), f64::INFINITY);
        assert_eq!(parse_beta("+Infinity").unwrap(), f64::INFINITY);
        assert_eq!(parse_beta("0.01").unwrap(), 0.01);
        assert!(parse_beta("-1").is_err());
        assert!(parse_beta("-inf").is_err());
        assert!(parse_beta("warm").is_err());
    }

    #[derive(Serialize, serde::Deserialize, PartialEq, Debug)]
    struct Holder {
        #[serde(with = "beta_serde")]
        beta: f64,
    }

    #[test]
    fn beta_json_round_trip() {
        let s = serde_json::to_string(&Holder { beta: f64::INFINITY }).unwrap();
        assert_eq!(s, r#"{"beta":"inf"}"#);
        assert_eq!(serde_json::from_str::<Holder>(&s).unwrap().beta, f64::INFINITY);
        let s = serde_json::to_string(&Holder { beta: 0.1 }).unwrap();
        assert_eq!(serde_json::from_str::<Holder>(&s).unwrap(), Holder { beta: 0.1 });
    }

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 123456.789] {
            let text = fmt_f64(x);
            assert_eq!(text.parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        write_csv(&path, &["a", "b"], &[&[1.0, 2.0], &[0.1, f64::INFINITY]]).unwrap();
        let (h, cols) = read_csv(&path).unwrap();
        assert_eq!(h, vec!["a", "b"]);
        assert_eq!(cols, vec![vec![1.0, 2.0], vec![0.1, f64::INFINITY]]);
        assert!(write_csv(&path, &["a"], &[&[1.0], &[2.0]]).is_err());
    }
}
