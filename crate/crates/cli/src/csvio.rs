//! Plain numeric CSV: one row per line, comma-separated f64 values.

use regusolve_core::matcore::{from_rows, DenseMatrix};
use regusolve_core::{Error, Result};
use nalgebra::DVector;
use std::path::Path;

pub fn read_matrix(path: &Path) -> Result<DenseMatrix> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidParameter(format!("{}: {e}", path.display())))?;
    let mut data = Vec::new();
    let mut cols = 0usize;
    let mut rows = 0usize;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut count = 0;
        for field in line.split(',') {
            let v: f64 = field.trim().parse().map_err(|e| {
                Error::InvalidParameter(format!(
                    "{}:{}: bad number `{}` ({e})",
                    path.display(),
                    lineno + 1,
                    field.trim()
                ))
            })?;
            data.push(v);
            count += 1;
        }
        if rows == 0 {
            cols = count;
        } else if count != cols {
            return Err(Error::ShapeMismatch(format!(
                "{}:{}: expected {} fields, found {}",
                path.display(),
                lineno + 1,
                cols,
                count
            )));
        }
        rows += 1;
    }
    from_rows(rows, cols, &data)
}

pub fn read_vector(path: &Path) -> Result<DVector<f64>> {
    let m = read_matrix(path)?;
    if m.ncols() == 1 {
        Ok(DVector::from_column_slice(m.column(0).as_slice()))
    } else if m.nrows() == 1 {
        Ok(m.row(0).transpose())
    } else {
        Err(Error::ShapeMismatch(format!(
            "{}: expected a vector, found {}x{}",
            path.display(),
            m.nrows(),
            m.ncols()
        )))
    }
}

pub fn write_vector(path: &Path, v: &DVector<f64>) -> Result<()> {
    let text: String = v.iter().map(|x| format!("{x:.17e}\n")).collect();
    std::fs::write(path, text)
        .map_err(|e| Error::InvalidParameter(format!("{}: {e}", path.display())))
}
