//! Shared matrix file format.
//!
//! A matrix is a JSON object
//! `{"n_rows": int, "n_cols": int, "entries": [[re, im], ...]}` with entries
//! row-major as decimal floating point. Readers reject length mismatches and
//! non-finite values; writers emit shortest-round-trip decimal, so every
//! emitted matrix re-loads to entrywise-equal values.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{HermitianMatrix, Matrix};
use crate::mk::DensityState;

#[derive(Serialize, Deserialize)]
struct MatrixFile {
    n_rows: usize,
    n_cols: usize,
    entries: Vec<[f64; 2]>,
}

/// Serialize a matrix to the shared JSON format.
pub fn matrix_to_json(m: &Matrix) -> String {
    let file = MatrixFile {
        n_rows: m.n_rows(),
        n_cols: m.n_cols(),
        entries: m.entries().iter().map(|z| [z.re, z.im]).collect(),
    };
    serde_json::to_string(&file).expect("matrix serialization cannot fail")
}

/// Parse a matrix from the shared JSON format, enforcing the length and
/// finiteness invariants.
pub fn matrix_from_json(text: &str) -> Result<Matrix> {
    let file: MatrixFile = serde_json::from_str(text).map_err(|e| Error::FileFormat {
        message: e.to_string(),
    })?;
    let entries: Vec<Complex64> = file
        .entries
        .iter()
        .map(|[re, im]| Complex64::new(*re, *im))
        .collect();
    Matrix::new(file.n_rows, file.n_cols, entries)
}

pub fn write_matrix(path: &Path, m: &Matrix) -> Result<()> {
    fs::write(path, matrix_to_json(m) + "\n")?;
    Ok(())
}

pub fn read_matrix(path: &Path) -> Result<Matrix> {
    let text = fs::read_to_string(path)?;
    matrix_from_json(&text)
}

/// Load a density state, enforcing hermiticity and the PSD / unit-trace
/// admission invariants.
pub fn read_density(path: &Path) -> Result<DensityState> {
    let m = read_matrix(path)?;
    DensityState::new(HermitianMatrix::new(m)?)
}
