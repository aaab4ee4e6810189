//! JSON matrix format: `{"rows": n, "cols": m, "data": [[re, im], ...]}`, row-major.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::matrix::ComplexMatrix;
use crate::scalar::{Real, C};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl<T: Real> From<&ComplexMatrix<T>> for MatrixFile {
    fn from(m: &ComplexMatrix<T>) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            data: m
                .data()
                .iter()
                .map(|z| [z.re.to_f64_lossy(), z.im.to_f64_lossy()])
                .collect(),
        }
    }
}

impl MatrixFile {
    pub fn to_matrix<T: Real>(&self) -> Result<ComplexMatrix<T>> {
        let data = self.data.iter().map(|[re, im]| C::new(T::lit(*re), T::lit(*im))).collect();
        ComplexMatrix::new(self.rows, self.cols, data)
    }

    /// Column or row matrix read as a vector.
    pub fn to_vector<T: Real>(&self) -> Result<Vec<C<T>>> {
        if self.rows != 1 && self.cols != 1 {
            return Err(Error::DimensionMismatch(format!(
                "expected a vector, got a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        Ok(self.to_matrix::<T>()?.into_data())
    }

    pub fn from_vector<T: Real>(v: &[C<T>]) -> Self {
        Self {
            rows: v.len(),
            cols: 1,
            data: v.iter().map(|z| [z.re.to_f64_lossy(), z.im.to_f64_lossy()]).collect(),
        }
    }
}

/// Vector entry written either as a bare real or as `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexEntry {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexEntry {
    pub fn to_complex<T: Real>(self) -> C<T> {
        match self {
            ComplexEntry::Real(x) => C::new(T::lit(x), T::zero()),
            ComplexEntry::Pair([re, im]) => C::new(T::lit(re), T::lit(im)),
        }
    }

    /// Bare real when the imaginary part is exactly zero.
    pub fn from_complex<T: Real>(z: C<T>) -> Self {
        if z.im == T::zero() {
            ComplexEntry::Real(z.re.to_f64_lossy())
        } else {
            ComplexEntry::Pair([z.re.to_f64_lossy(), z.im.to_f64_lossy()])
        }
    }
}

pub fn read_matrix<T: Real>(path: &Path) -> Result<ComplexMatrix<T>> {
    let text = std::fs::read_to_string(path)?;
    let f: MatrixFile = serde_json::from_str(&text)?;
    f.to_matrix()
}

pub fn read_vector<T: Real>(path: &Path) -> Result<Vec<C<T>>> {
    let text = std::fs::read_to_string(path)?;
    let f: MatrixFile = serde_json::from_str(&text)?;
    f.to_vector()
}

pub fn write_matrix<T: Real>(path: &Path, m: &ComplexMatrix<T>) -> Result<()> {
    let text = serde_json::to_string_pretty(&MatrixFile::from(m))?;
    std::fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_documented_layout() {
        let text = r#"{"rows": 2, "cols": 2, "data": [[1,0],[0,-1],[0,1],[2,0]]}"#;
        let f: MatrixFile = serde_json::from_str(text).unwrap();
        let m = f.to_matrix::<f64>().unwrap();
        assert_eq!(m[(0, 1)], C::new(0.0, -1.0));
        assert_eq!(m[(1, 0)], C::new(0.0, 1.0));
        let bad: MatrixFile = serde_json::from_str(r#"{"rows": 2, "cols": 2, "data": [[1,0]]}"#).unwrap();
        assert!(bad.to_matrix::<f64>().is_err());
    }

    proptest! {
        #[test]
        fn json_round_trip_is_exact(rows in 1usize..4, cols in 1usize..4, seed in any::<u64>()) {
            let mut rng = crate::linalg::random::SeededRng::new(seed);
            let m = crate::linalg::random::gaussian_matrix::<f64>(rows, cols, &mut rng);
            let text = serde_json::to_string(&MatrixFile::from(&m)).unwrap();
            let back: MatrixFile = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(back.to_matrix::<f64>().unwrap(), m);
        }
    }
}
