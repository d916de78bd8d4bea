//! Aggregate result tables and their CSV form.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 7] = [
    "k",
    "mean_sq_err",
    "std_sq_err",
    "mean_bregman",
    "mean_consensus",
    "max_consensus",
    "samples_per_iter",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub k: u64,
    pub mean_sq_err: f64,
    /// Population standard deviation across trials.
    pub std_sq_err: f64,
    pub mean_bregman: f64,
    pub mean_consensus: f64,
    pub max_consensus: f64,
    pub samples_per_iter: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AggregateResult {
    pub rows: Vec<AggregateRow>,
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes the table with a fixed float format so identical runs give identical bytes.
pub fn write_results(result: &AggregateResult, path: &Path) -> Result<()> {
    let io = |e: csv::Error| match e.into_kind() {
        csv::ErrorKind::Io(e) => Error::io(path, e),
        other => Error::Parse {
            path: path.to_path_buf(),
            message: format!("{other:?}"),
        },
    };
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in &result.rows {
        w.write_record([
            r.k.to_string(),
            fmt(r.mean_sq_err),
            fmt(r.std_sq_err),
            fmt(r.mean_bregman),
            fmt(r.mean_consensus),
            fmt(r.max_consensus),
            r.samples_per_iter.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_results(path: &Path) -> Result<AggregateResult> {
    let parse = |message: String| Error::Parse {
        path: path.to_path_buf(),
        message,
    };
    let mut r = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(e) => Error::io(path, e),
        other => parse(format!("{other:?}")),
    })?;
    let header = r.headers().map_err(|e| parse(e.to_string()))?;
    if header.iter().ne(CSV_HEADER) {
        return Err(parse(format!("unexpected header {header:?}")));
    }
    let rows = r
        .deserialize()
        .collect::<std::result::Result<Vec<AggregateRow>, _>>()
        .map_err(|e| parse(e.to_string()))?;
    Ok(AggregateResult { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(k: u64, e: f64) -> AggregateRow {
        AggregateRow {
            k,
            mean_sq_err: e,
            std_sq_err: e / 3.0,
            mean_bregman: e / 2.0,
            mean_consensus: 1e-300,
            max_consensus: 0.1,
            samples_per_iter: 2,
        }
    }

    #[test]
    fn round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        let res = AggregateResult { rows: vec![row(1, 0.1), row(10, std::f64::consts::PI), row(100, 0.0)] };
        write_results(&res, &path).unwrap();
        assert_eq!(read_results(&path).unwrap(), res);
    }

    #[test]
    fn empty_result_is_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.csv");
        write_results(&AggregateResult::default(), &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, format!("{}\n", CSV_HEADER.join(",")));
        assert!(read_results(&path).unwrap().rows.is_empty());
    }

    #[test]
    fn unwritable_path_reports_path() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("missing").join("r.csv");
        match write_results(&AggregateResult::default(), &path) {
            Err(Error::Io { path: p, .. }) => assert_eq!(p, path),
            other => panic!("expected io error, got {other:?}"),
        }
    }

    #[test]
    fn wrong_header_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "k,err\n1,2\n").unwrap();
        assert!(matches!(read_results(&path), Err(Error::Parse { .. })));
    }
}
