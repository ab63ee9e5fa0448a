use thiserror::Error;

use crate::grid::CellIndex;

/// Errors raised while constructing or validating model components.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("{path}: {constraint}")]
    Invalid { path: String, constraint: String },

    #[error("partitions {first} and {second} overlap")]
    OverlappingPartitions { first: usize, second: usize },

    #[error("partitions leave the boundary uncovered near x = {at}")]
    UncoveredBoundary { at: f64 },

    #[error("partition {index} contains no cell center")]
    EmptyPartition { index: usize },

    #[error("sensor {index} has zero quadrature mass")]
    ZeroSensorMass { index: usize },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
}

impl ModelError {
    pub(crate) fn invalid(path: impl Into<String>, constraint: impl Into<String>) -> Self {
        ModelError::Invalid {
            path: path.into(),
            constraint: constraint.into(),
        }
    }
}

/// A temperature became non-finite or negative.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("temperature diverged at cell (j={}, k={})", cell.j, cell.k)]
pub struct Divergence {
    pub cell: CellIndex,
}

/// Errors from loading configuration documents.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Validation(#[from] ModelError),
}

impl From<serde_json::Error> for ConfigError {
    fn from(err: serde_json::Error) -> Self {
        ConfigError::Parse {
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        }
    }
}
