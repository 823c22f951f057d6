use std::fs::File;
use std::io::Write;
use std::path::Path;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::Scalar;

/// Reads a headered, comma-separated file. `target_column` becomes `y`; every
/// other column, in header order, becomes an attribute.
///
/// Error line numbers are 1-based file lines (the header is line 1).
pub fn load_csv<T: Scalar>(path: &Path, target_column: &str) -> Result<Dataset<T>> {
    read_csv(path, target_column, true).map(|(ds, _)| ds)
}

/// Like [`load_csv`] but tolerates a missing target column, in which case all
/// columns are attributes and `y` is zero. The flag tells whether the target
/// was present.
pub fn load_csv_for_prediction<T: Scalar>(path: &Path, target_column: &str) -> Result<(Dataset<T>, bool)> {
    read_csv(path, target_column, false)
}

fn read_csv<T: Scalar>(path: &Path, target_column: &str, require_target: bool) -> Result<(Dataset<T>, bool)> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file);

    let header: Vec<String> = reader
        .headers()
        .map_err(|e| csv_error(&e))?
        .iter()
        .map(str::to_owned)
        .collect();
    if header.is_empty() || header.iter().all(String::is_empty) {
        return Err(Error::EmptyDataset);
    }
    let target = header.iter().position(|h| h == target_column);
    if target.is_none() && require_target {
        return Err(Error::MissingTarget(target_column.to_owned()));
    }
    let target = target.unwrap_or(usize::MAX);
    let has_target = target != usize::MAX;

    let d = header.len() - usize::from(has_target);
    let mut columns: Vec<Vec<T>> = vec![Vec::new(); d];
    let mut y = Vec::new();
    let mut n = 0;
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(&e))?;
        let line = record.position().map_or(0, |p| p.line());
        for (j, cell) in record.iter().enumerate() {
            let value: f64 = cell.parse().map_err(|_| Error::NonNumeric {
                line,
                column: header[j].clone(),
                value: cell.to_owned(),
            })?;
            if !value.is_finite() {
                return Err(Error::NonFinite {
                    line,
                    column: header[j].clone(),
                });
            }
            let value = T::from_f64(value).ok_or_else(|| Error::NonFinite {
                line,
                column: header[j].clone(),
            })?;
            match j.cmp(&target) {
                std::cmp::Ordering::Equal => y.push(value),
                std::cmp::Ordering::Less => columns[j].push(value),
                std::cmp::Ordering::Greater => columns[j - 1].push(value),
            }
        }
        n += 1;
    }
    if !has_target {
        y = vec![T::zero(); n];
    }
    if y.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if d == 0 {
        return Err(Error::InvalidDataset("no attribute columns".into()));
    }
    let names = header
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != target)
        .map(|(_, h)| h.clone())
        .collect();
    Dataset::new(Matrix::from_columns(y.len(), columns), y, names, target_column).map(|ds| (ds, has_target))
}

fn csv_error(e: &csv::Error) -> Error {
    Error::Csv {
        line: e.position().map_or(0, |p| p.line()),
        message: e.to_string(),
    }
}

/// Writes attributes then target, using shortest round-trip float formatting
/// so that reloading reproduces the values bit for bit.
pub fn write_csv<T: Scalar>(ds: &Dataset<T>, path: &Path) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut out = std::io::BufWriter::new(File::create(path).map_err(io_err)?);
    let mut header = ds.attribute_names().join(",");
    header.push(',');
    header.push_str(ds.target_name());
    writeln!(out, "{header}").map_err(io_err)?;
    for r in 0..ds.n_rows() {
        let mut line = String::new();
        for c in 0..ds.n_attributes() {
            line.push_str(&format!("{:?},", ds.x().get(r, c).as_f64()));
        }
        line.push_str(&format!("{:?}", ds.y()[r].as_f64()));
        writeln!(out, "{line}").map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}
