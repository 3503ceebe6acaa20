use std::path::PathBuf;

use crate::data::Label;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("need at least {needed} samples, got {got}")]
    EmptyInput { needed: usize, got: usize },

    #[error("input contains a non-finite value at row {row}, column {col}")]
    NonFiniteInput { row: usize, col: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not positive definite (jitter ceiling {ceiling:e} exhausted){}", class_suffix(.class))]
    NotPositiveDefinite { ceiling: f64, class: Option<Label> },

    #[error("class {0} has no samples")]
    EmptyClass(Label),

    #[error("training data contains a single class")]
    SingleClassData,

    #[error("operation needs a linear-kernel model")]
    NotLinearModel,

    #[error("class {label} has {count} samples, at least 2 are needed to stratify")]
    ClassTooSmall { label: Label, count: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("row {row}: expected {expected} columns, found {found}")]
    MalformedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("row {row}: unknown label {label:?}")]
    UnknownLabel { row: usize, label: String },

    #[error("row {row}, column {col}: {value:?} is not a number")]
    NonNumericFeature {
        row: usize,
        col: usize,
        value: String,
    },

    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn class_suffix(class: &Option<Label>) -> String {
    match class {
        Some(label) => format!(" for class {label}"),
        None => String::new(),
    }
}

pub type Result<T> = std::result::Result<T, Error>;
