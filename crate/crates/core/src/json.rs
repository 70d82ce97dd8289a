//! Wire helpers: a complex scalar is `[re, im]`, a complex matrix is a list
//! of rows, a frame is a list of columns.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexRows = Vec<Vec<[f64; 2]>>;

pub fn complex(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn matrix_rows(m: &DMatrix<Complex64>) -> ComplexRows {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| complex(m[(r, c)])).collect())
        .collect()
}

pub fn matrix_from_rows(rows: &ComplexRows) -> Result<DMatrix<Complex64>> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if let Some(bad) = rows.iter().find(|r| r.len() != ncols) {
        return Err(Error::DimensionMismatch {
            expected: ncols,
            found: bad.len(),
        });
    }
    Ok(DMatrix::from_fn(nrows, ncols, |r, c| {
        Complex64::new(rows[r][c][0], rows[r][c][1])
    }))
}

/// Column-major: one inner list per column.
pub fn matrix_columns(m: &DMatrix<Complex64>) -> ComplexRows {
    (0..m.ncols())
        .map(|c| (0..m.nrows()).map(|r| complex(m[(r, c)])).collect())
        .collect()
}

pub fn matrix_from_columns(cols: &ComplexRows, nrows: usize) -> Result<DMatrix<Complex64>> {
    if let Some(bad) = cols.iter().find(|c| c.len() != nrows) {
        return Err(Error::DimensionMismatch {
            expected: nrows,
            found: bad.len(),
        });
    }
    Ok(DMatrix::from_fn(nrows, cols.len(), |r, c| {
        Complex64::new(cols[c][r][0], cols[c][r][1])
    }))
}

pub fn real_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect())
        .collect()
}

pub fn real_from_rows(rows: &[Vec<f64>], ncols: usize) -> Result<DMatrix<f64>> {
    if let Some(bad) = rows.iter().find(|r| r.len() != ncols) {
        return Err(Error::DimensionMismatch {
            expected: ncols,
            found: bad.len(),
        });
    }
    Ok(DMatrix::from_fn(rows.len(), ncols, |r, c| rows[r][c]))
}
