use std::collections::HashSet;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use nalgebra::DMatrix;

use super::{Dataset, FeatureMatrix, TargetKind, TargetVector};
use crate::error::{Error, Result};

/// Load a comma-separated file with one header row.
///
/// `target_column` is pulled out as the target; the remaining columns become
/// features in header order. A target holding only 0 and 1 is read as binary,
/// anything else as continuous.
pub fn load_csv(path: impl AsRef<Path>, target_column: &str) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_csv(file, target_column)
}

pub fn read_csv<R: Read>(reader: R, target_column: &str) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut records = rdr.records();

    let header = match records.next() {
        Some(r) => r.map_err(|e| csv_error(1, e))?,
        None => {
            return Err(Error::Parse {
                row: 1,
                column: String::new(),
                message: "missing header row".into(),
            })
        }
    };
    let header: Vec<String> = header.iter().map(|h| h.trim().to_string()).collect();
    let mut seen = HashSet::new();
    for (j, name) in header.iter().enumerate() {
        if name.is_empty() {
            return Err(Error::Parse {
                row: 1,
                column: format!("#{}", j + 1),
                message: "empty header name".into(),
            });
        }
        if !seen.insert(name.as_str()) {
            return Err(Error::Parse {
                row: 1,
                column: name.clone(),
                message: "duplicate header name".into(),
            });
        }
    }
    let target_idx = header
        .iter()
        .position(|h| h == target_column)
        .ok_or_else(|| Error::Parse {
            row: 1,
            column: target_column.to_string(),
            message: "target column not found in header".into(),
        })?;

    let width = header.len();
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); width];
    for (k, record) in records.enumerate() {
        let row = k + 2;
        let record = record.map_err(|e| csv_error(row, e))?;
        if record.len() == 1 && record.get(0).is_some_and(|c| c.trim().is_empty()) {
            continue;
        }
        if record.len() != width {
            return Err(Error::Parse {
                row,
                column: String::new(),
                message: format!("expected {width} fields, found {}", record.len()),
            });
        }
        for (j, cell) in record.iter().enumerate() {
            let cell = cell.trim();
            let v: f64 = cell.parse().map_err(|_| Error::Parse {
                row,
                column: header[j].clone(),
                message: format!("non-numeric value `{cell}`"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    row,
                    column: header[j].clone(),
                    message: format!("non-finite value `{cell}`"),
                });
            }
            columns[j].push(v);
        }
    }

    let target_values = columns.remove(target_idx);
    let mut names = header;
    names.remove(target_idx);
    let n = target_values.len();
    if names.is_empty() {
        return Err(Error::invalid("no feature columns besides the target"));
    }
    let target = if target_values.iter().all(|&v| v == 0.0 || v == 1.0) {
        TargetVector::binary(target_values)?
    } else {
        TargetVector::continuous(target_values)?
    };
    let data: Vec<f64> = columns.into_iter().flatten().collect();
    let p = names.len();
    let features = FeatureMatrix::new(DMatrix::from_vec(n, p, data), names)?;
    Dataset::new(features, target)
}

fn csv_error(row: usize, e: csv::Error) -> Error {
    Error::Parse {
        row,
        column: String::new(),
        message: e.to_string(),
    }
}

/// Write features followed by the target column named `target_name`.
pub fn write_csv<W: Write>(mut w: W, d: &Dataset, target_name: &str) -> Result<()> {
    let io = |source| Error::Io {
        path: "<csv output>".into(),
        source,
    };
    let mut line = d.names().join(",");
    line.push(',');
    line.push_str(target_name);
    writeln!(w, "{line}").map_err(io)?;
    let binary = d.target().kind() == TargetKind::Binary;
    for i in 0..d.n_samples() {
        line.clear();
        for j in 0..d.n_features() {
            line.push_str(&d.features().get(i, j).to_string());
            line.push(',');
        }
        let t = d.target().values()[i];
        if binary {
            line.push_str(if t == 1.0 { "1" } else { "0" });
        } else {
            line.push_str(&t.to_string());
        }
        writeln!(w, "{line}").map_err(io)?;
    }
    Ok(())
}
