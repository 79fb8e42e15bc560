//! File formats: JSON documents for distributions, states, and marginal
//! sets, plus the numeric rounding used for all externally reported values.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::majorization::{MajError, ProbVector};
use crate::qstate::{CMatrix, DensityMatrix, StateError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed document: {0}")]
    Parse(#[from] serde_json::Error),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Distribution(#[from] MajError),
}

/// Distribution document `{"probs": [...]}`; entries need not be sorted on
/// input and are canonicalized on load.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DistributionDoc {
    pub probs: Vec<f64>,
}

impl DistributionDoc {
    pub fn from_spectrum(v: &ProbVector) -> Self {
        Self {
            probs: v.entries().iter().map(|&x| sig9(x)).collect(),
        }
    }

    pub fn to_spectrum(&self) -> Result<ProbVector, IoError> {
        Ok(ProbVector::new(&self.probs)?)
    }
}

/// State document `{"dims": [...], "matrix": [[[re, im], ...], ...]}` with
/// row-major complex entries.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateDoc {
    pub dims: Vec<usize>,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

impl StateDoc {
    pub fn from_state(rho: &DensityMatrix) -> Self {
        let n = rho.dim();
        let matrix = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let z = rho.matrix()[(i, j)];
                        [z.re, z.im]
                    })
                    .collect()
            })
            .collect();
        Self {
            dims: rho.dims().to_vec(),
            matrix,
        }
    }

    /// Validates the document into a state.
    pub fn to_state(&self) -> Result<DensityMatrix, IoError> {
        let n = self.matrix.len();
        if self.matrix.iter().any(|row| row.len() != n) {
            return Err(IoError::State(StateError::DimsMismatch {
                side: n,
                dims: self.dims.clone(),
            }));
        }
        let mat = CMatrix::from_fn(n, n, |i, j| {
            Complex64::new(self.matrix[i][j][0], self.matrix[i][j][1])
        });
        Ok(DensityMatrix::new(mat, self.dims.clone())?)
    }
}

/// Marginal-set document `{"marginals": [<state doc>, ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MarginalSetDoc {
    pub marginals: Vec<StateDoc>,
}

impl MarginalSetDoc {
    pub fn from_states(states: &[DensityMatrix]) -> Self {
        Self {
            marginals: states.iter().map(StateDoc::from_state).collect(),
        }
    }

    pub fn to_states(&self) -> Result<Vec<DensityMatrix>, IoError> {
        self.marginals.iter().map(StateDoc::to_state).collect()
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, IoError> {
    let text = fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.display().to_string(),
        source,
    })?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    let text = serde_json::to_string(value).expect("serializable value");
    fs::write(path, text).map_err(|source| IoError::Write {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_distribution(path: &Path) -> Result<ProbVector, IoError> {
    read_json::<DistributionDoc>(path)?.to_spectrum()
}

pub fn load_state(path: &Path) -> Result<DensityMatrix, IoError> {
    read_json::<StateDoc>(path)?.to_state()
}

pub fn load_marginal_set(path: &Path) -> Result<Vec<DensityMatrix>, IoError> {
    read_json::<MarginalSetDoc>(path)?.to_states()
}

/// Rounds to nine significant digits; reported numbers all pass through
/// here so that serialized output is stable across runs.
pub fn sig9(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.8e}").parse().expect("formatted float")
}
