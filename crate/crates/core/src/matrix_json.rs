//! Matrix interchange format: `{"n": int, "re": [[float]], "im": [[float]]}`.
//!
//! Writers emit the full matrix; readers validate Hermiticity.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix;
use crate::matrix::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub n: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&HermitianMatrix> for MatrixJson {
    fn from(h: &HermitianMatrix) -> Self {
        let n = h.dim();
        let row = |i: usize, part: fn(Complex64) -> f64| (0..n).map(|j| part(h.get(i, j))).collect();
        MatrixJson {
            n,
            re: (0..n).map(|i| row(i, |z| z.re)).collect(),
            im: (0..n).map(|i| row(i, |z| z.im)).collect(),
        }
    }
}

impl TryFrom<&MatrixJson> for HermitianMatrix {
    type Error = Error;

    fn try_from(j: &MatrixJson) -> Result<Self> {
        let n = j.n;
        let square = |rows: &Vec<Vec<f64>>| rows.len() == n && rows.iter().all(|r| r.len() == n);
        if !square(&j.re) || !square(&j.im) {
            return Err(Error::Shape(format!("matrix JSON: re/im must both be {n}x{n}")));
        }
        let m = Matrix::from_fn(n, n, |r, c| Complex64::new(j.re[r][c], j.im[r][c]));
        HermitianMatrix::new(m)
    }
}

impl MatrixJson {
    pub fn to_hermitian(&self) -> Result<HermitianMatrix> {
        HermitianMatrix::try_from(self)
    }
}

/// A fixture file: either one bare matrix or a map of named matrices
/// (for instance `{"A": {...}, "B": {...}}`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Fixture {
    Single(MatrixJson),
    Named(BTreeMap<String, MatrixJson>),
}

impl Fixture {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn named(pairs: &[(&str, &HermitianMatrix)]) -> Self {
        Fixture::Named(
            pairs
                .iter()
                .map(|(k, m)| (k.to_string(), MatrixJson::from(*m)))
                .collect(),
        )
    }

    /// Matrices in name order (a bare matrix yields a single entry).
    pub fn matrices(&self) -> Result<Vec<(String, HermitianMatrix)>> {
        match self {
            Fixture::Single(m) => Ok(vec![("A".to_string(), m.to_hermitian()?)]),
            Fixture::Named(map) => map.iter().map(|(k, m)| Ok((k.clone(), m.to_hermitian()?))).collect(),
        }
    }

    pub fn get(&self, name: &str) -> Result<HermitianMatrix> {
        match self {
            Fixture::Single(m) if name == "A" => m.to_hermitian(),
            Fixture::Named(map) => map
                .get(name)
                .ok_or_else(|| Error::Shape(format!("fixture has no matrix named `{name}`")))?
                .to_hermitian(),
            _ => Err(Error::Shape(format!("fixture has no matrix named `{name}`"))),
        }
    }
}
