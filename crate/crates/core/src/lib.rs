//! Support vector classification with per-class Cholesky whitening.
//!
//! Each class is mapped through the inverse Cholesky factor of its own
//! covariance before a linear soft-margin SVM is fitted, so margins are
//! measured in coordinates where every class has identity covariance. When
//! test labels are unknown the class-prior mixture of the two inverse
//! factors is used instead. Baseline kernels (linear, RBF, polynomial,
//! sigmoid) and a split / cross-validation harness are included for
//! comparison.
//!
//! ## Feature flags
//!
//! - `parallel` (default): cross-validation folds run on the rayon pool.

pub mod data;
pub mod error;
pub mod eval;
pub mod linalg;
pub mod parallel;
pub mod svm;
pub mod whitening;

pub use data::{Dataset, Label, LabelEncoding, LabeledData};
pub use error::{Error, Result};
pub use linalg::Matrix;
pub use parallel::Execution;
