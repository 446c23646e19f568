//! Long-format CSV ingestion and export.
//!
//! Layout: UTF-8, comma separated, header `sample_id,t,f1..fF`, one row per
//! (sample, timestamp), rows sample-major then time-ascending. Values are
//! written with Rust's shortest round-trippable `f64` formatting, so an
//! export/load cycle reproduces values exactly.

use std::path::Path;

use crate::data::batch::SeriesBatch;
use crate::error::{Error, Result};

pub fn export_csv(batch: &SeriesBatch, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    let mut header = vec!["sample_id".to_string(), "t".to_string()];
    header.extend((1..=batch.features()).map(|k| format!("f{k}")));
    w.write_record(&header).map_err(csv_err)?;
    for s in 0..batch.samples() {
        for t in 0..batch.timestamps() {
            let mut row = vec![s.to_string(), t.to_string()];
            row.extend((0..batch.features()).map(|k| batch.get(s, t, k).to_string()));
            w.write_record(&row).map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Loads a long-format CSV into an unscaled batch.
///
/// Samples are ordered by first appearance of their `sample_id`; each
/// sample's rows must arrive with `t = 0, 1, 2, ...` and all samples must
/// have the same length.
pub fn load_csv(path: &Path) -> Result<SeriesBatch> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => Error::contract(format!(
                "cannot open dataset {}: {e}",
                path.display()
            )),
            _ => csv_err(e),
        })?;

    let headers = r.headers().map_err(csv_err)?.clone();
    if headers.len() < 3 || &headers[0] != "sample_id" || &headers[1] != "t" {
        return Err(Error::Format(format!(
            "expected header sample_id,t,f1..fF, got {:?}",
            headers.iter().collect::<Vec<_>>()
        )));
    }
    let f = headers.len() - 2;

    let mut order: Vec<String> = Vec::new();
    let mut rows_per_sample: Vec<Vec<f64>> = Vec::new();
    let mut index_of = std::collections::HashMap::new();

    for (row_no, record) in r.records().enumerate() {
        let row = row_no + 2; // 1-based, after the header line
        let record = record.map_err(csv_err)?;
        if record.len() != headers.len() {
            return Err(Error::Parse {
                row,
                message: format!("expected {} fields, got {}", headers.len(), record.len()),
            });
        }
        let id = record[0].to_string();
        let t: usize = record[1].parse().map_err(|_| Error::Parse {
            row,
            message: format!("timestamp {:?} is not a non-negative integer", &record[1]),
        })?;

        let idx = *index_of.entry(id.clone()).or_insert_with(|| {
            order.push(id);
            rows_per_sample.push(Vec::new());
            rows_per_sample.len() - 1
        });
        let expected_t = rows_per_sample[idx].len() / f;
        if t != expected_t {
            return Err(Error::Format(format!(
                "sample {:?} has non-contiguous timestamps: expected t={expected_t}, got t={t} (row {row})",
                order[idx]
            )));
        }
        for k in 0..f {
            let cell = &record[2 + k];
            let v: f64 = cell.parse().map_err(|_| Error::Parse {
                row,
                message: format!("value {cell:?} in column f{} is not numeric", k + 1),
            })?;
            rows_per_sample[idx].push(v);
        }
    }

    if rows_per_sample.is_empty() {
        return Err(Error::Format("dataset contains no data rows".to_string()));
    }
    let t_len = rows_per_sample[0].len() / f;
    for (idx, rows) in rows_per_sample.iter().enumerate() {
        if rows.len() / f != t_len {
            return Err(Error::Format(format!(
                "ragged sample {:?}: has {} timestamps, expected {}",
                order[idx],
                rows.len() / f,
                t_len
            )));
        }
    }

    let mut values = Vec::with_capacity(rows_per_sample.len() * t_len * f);
    for rows in &rows_per_sample {
        values.extend_from_slice(rows);
    }
    SeriesBatch::new(rows_per_sample.len(), t_len, f, values, false)
}

fn csv_err(e: csv::Error) -> Error {
    Error::Format(e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::Rng;
    use std::io::Write;

    fn tmp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn loads_two_by_three_by_two() {
        let f = tmp(
            "sample_id,t,f1,f2\n\
             a,0,1,2\na,1,3,4\na,2,5,6\n\
             b,0,7,8\nb,1,9,10\nb,2,11,12\n",
        );
        let b = load_csv(f.path()).unwrap();
        assert_eq!((b.samples(), b.timestamps(), b.features()), (2, 3, 2));
        assert_eq!(b.get(0, 2, 1), 6.0);
        assert_eq!(b.get(1, 0, 0), 7.0);
    }

    #[test]
    fn ragged_samples_are_rejected_by_id() {
        let f = tmp(
            "sample_id,t,f1\n\
             a,0,1\na,1,2\na,2,3\n\
             b,0,4\nb,1,5\nb,2,6\nb,3,7\n",
        );
        let err = load_csv(f.path()).unwrap_err();
        assert!(err.to_string().contains("\"b\""), "{err}");
    }

    #[test]
    fn non_numeric_cell_reports_row() {
        let f = tmp("sample_id,t,f1\na,0,1\na,1,oops\n");
        let err = load_csv(f.path()).unwrap_err();
        match err {
            Error::Parse { row, .. } => assert_eq!(row, 3),
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn missing_header_is_a_format_error() {
        let f = tmp("id,time,v\n0,0,1\n");
        assert!(matches!(load_csv(f.path()), Err(Error::Format(_))));
    }

    #[test]
    fn export_then_load_round_trips_values() {
        let mut rng = Rng::from_seed(21);
        let mut b = SeriesBatch::zeros(3, 4, 2, false);
        for v in b.values_mut() {
            *v = rng.uniform_range(-5.0, 5.0);
        }
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("data.csv");
        export_csv(&b, &path).unwrap();
        let back = load_csv(&path).unwrap();
        assert_eq!(b.values(), back.values());
        assert_eq!(
            (b.samples(), b.timestamps(), b.features()),
            (back.samples(), back.timestamps(), back.features())
        );
    }
}
