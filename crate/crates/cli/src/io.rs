//! Operator files: `{"dims": [2, 2], "matrix": [[[re, im], ...], ...]}`.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use witness_core::{CMatrix, Dims, Hermitian};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorFile {
    pub dims: Vec<usize>,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputRecord {
    pub path: String,
    pub sha256: String,
}

impl OperatorFile {
    pub fn from_operator(h: &Hermitian) -> Self {
        let m = h.matrix();
        let matrix = (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
            .collect();
        Self { dims: h.dims().as_slice().to_vec(), matrix }
    }

    pub fn to_operator(&self) -> Result<Hermitian, CliError> {
        let dims = Dims::new(self.dims.clone()).map_err(CliError::from)?;
        let n = dims.total();
        if self.matrix.len() != n || self.matrix.iter().any(|row| row.len() != n) {
            return Err(CliError::Validation(format!(
                "matrix must be {n}x{n} for dims {dims}"
            )));
        }
        let m = CMatrix::from_fn(n, n, |i, j| {
            let [re, im] = self.matrix[i][j];
            Complex64::new(re, im)
        });
        Hermitian::new(m, dims).map_err(CliError::from)
    }
}

pub fn parse_operator(text: &str) -> Result<OperatorFile, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
}

/// Reads and validates an operator file, recording its content hash.
pub fn read_operator(path: &Path) -> Result<(Hermitian, InputRecord), CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    let file = parse_operator(text).map_err(|e| e.context(&path.display().to_string()))?;
    let op = file.to_operator().map_err(|e| e.context(&path.display().to_string()))?;
    let record = InputRecord {
        path: path.display().to_string(),
        sha256: hex::encode(Sha256::digest(&bytes)),
    };
    Ok((op, record))
}

pub fn write_operator(path: &Path, h: &Hermitian) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(&OperatorFile::from_operator(h)).expect("plain data serializes");
    fs::write(path, text + "\n")
}
