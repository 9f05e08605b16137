//! State-file parsing: whitespace-separated re/im amplitude rows for pure
//! states, or a `dim` header followed by a row-major complex matrix for
//! densities. Lines starting with `#` are comments.

use std::path::Path;

use thiserror::Error;

use crate::linalg::{ComplexMatrix, ComplexVector, DensityMatrix, HermitianMatrix, PureState, C64};

/// Normalization slack accepted from text files; inputs within it are
/// rescaled exactly, anything worse is rejected.
pub const FILE_NORM_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum StateFileError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("state norm² deviates from 1 by {dev:.3e} (tolerance {FILE_NORM_TOL:.0e})")]
    BadNorm { dev: f64 },
    #[error("density trace deviates from 1 by {dev:.3e} (tolerance {FILE_NORM_TOL:.0e})")]
    BadTrace { dev: f64 },
    #[error("invalid state: {0}")]
    Invalid(#[from] crate::error::LinalgError),
}

/// A parsed state file: either a pure state or a density matrix.
#[derive(Clone, Debug)]
pub enum LoadedState {
    Pure(PureState),
    Density(DensityMatrix),
}

impl LoadedState {
    pub fn n_qubits(&self) -> usize {
        match self {
            LoadedState::Pure(p) => p.n_qubits(),
            LoadedState::Density(d) => d.n_qubits(),
        }
    }

    /// The state as a density matrix, projecting pure states.
    pub fn density(&self) -> DensityMatrix {
        match self {
            LoadedState::Pure(p) => p.density(),
            LoadedState::Density(d) => d.clone(),
        }
    }
}

pub fn load_state_file(path: &Path) -> Result<LoadedState, StateFileError> {
    let text = std::fs::read_to_string(path).map_err(|source| StateFileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_state_text(&text)
}

/// Parses state text; a leading `dim` token selects the density format.
pub fn parse_state_text(text: &str) -> Result<LoadedState, StateFileError> {
    let mut numbers: Vec<(usize, f64)> = Vec::new();
    let mut dim_header: Option<usize> = None;
    for (ln, raw) in text.lines().enumerate() {
        let lineno = ln + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace().peekable();
        if dim_header.is_none() && numbers.is_empty() && tokens.peek() == Some(&"dim") {
            tokens.next();
            let d = tokens
                .next()
                .ok_or(StateFileError::Malformed {
                    line: lineno,
                    msg: "dim header needs a value".into(),
                })?
                .parse::<usize>()
                .map_err(|_| StateFileError::Malformed {
                    line: lineno,
                    msg: "dim header value must be a positive integer".into(),
                })?;
            if d == 0 {
                return Err(StateFileError::Malformed {
                    line: lineno,
                    msg: "dim must be positive".into(),
                });
            }
            dim_header = Some(d);
        }
        for tok in tokens {
            let v = tok.parse::<f64>().map_err(|_| StateFileError::Malformed {
                line: lineno,
                msg: format!("expected a number, got {tok:?}"),
            })?;
            if !v.is_finite() {
                return Err(StateFileError::Malformed {
                    line: lineno,
                    msg: format!("non-finite value {tok}"),
                });
            }
            numbers.push((lineno, v));
        }
    }
    if numbers.len() % 2 != 0 {
        let last = numbers.last().map(|&(l, _)| l).unwrap_or(0);
        return Err(StateFileError::Malformed {
            line: last,
            msg: "odd number of values; entries are re/im pairs".into(),
        });
    }
    let entries: Vec<C64> = numbers
        .chunks(2)
        .map(|p| C64::new(p[0].1, p[1].1))
        .collect();

    match dim_header {
        Some(dim) => {
            if entries.len() != dim * dim {
                let last = numbers.last().map(|&(l, _)| l).unwrap_or(0);
                return Err(StateFileError::Malformed {
                    line: last,
                    msg: format!("expected {} matrix entries for dim {dim}, got {}", dim * dim, entries.len()),
                });
            }
            let m = ComplexMatrix::from_row_slice(dim, dim, &entries);
            let h = HermitianMatrix::new(m)?;
            let dev = (h.trace() - 1.0).abs();
            if dev > FILE_NORM_TOL {
                return Err(StateFileError::BadTrace { dev });
            }
            let rescaled = h.scale(1.0 / h.trace());
            Ok(LoadedState::Density(DensityMatrix::new(rescaled)?))
        }
        None => {
            if entries.is_empty() {
                return Err(StateFileError::Malformed {
                    line: 0,
                    msg: "empty state file".into(),
                });
            }
            let v = ComplexVector::from_vec(entries);
            let dev = (v.norm_squared() - 1.0).abs();
            if dev > FILE_NORM_TOL {
                return Err(StateFileError::BadNorm { dev });
            }
            let v = &v / C64::new(v.norm(), 0.0);
            Ok(LoadedState::Pure(PureState::new(v)?))
        }
    }
}
