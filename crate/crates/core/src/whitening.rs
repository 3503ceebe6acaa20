//! Per-class Cholesky whitening and its class-prior mixture.
//!
//! A class whitener stores `Ψ⁻¹`, the inverse Cholesky factor of that class's
//! covariance. Applying it to a point maps the class into coordinates where
//! its covariance is the identity. When the class of a point is unknown the
//! expected whitener `p·Ψ₊⁻¹ + (1 − p)·Ψ₋⁻¹` is used instead, with `p` the
//! share of positive training samples.

use serde::Serialize;

use crate::data::Label;
use crate::error::{Error, Result};
use crate::linalg::{
    cholesky, cholesky_exact, covariance, dot, invert_lower_triangular, quadratic_form_inverse,
    CovarianceMatrix, Divisor, JitterPolicy, LowerTriangular, Matrix,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WhitenerConfig {
    pub divisor: Divisor,
    pub jitter: JitterPolicy,
    /// Subtract the class mean before applying `Ψ⁻¹`. Off by default: the
    /// transform acts on raw coordinates.
    pub center: bool,
}

impl WhitenerConfig {
    pub fn population() -> Self {
        Self {
            divisor: Divisor::Population,
            jitter: JitterPolicy::default(),
            center: false,
        }
    }

    pub fn sample() -> Self {
        Self {
            divisor: Divisor::Sample,
            ..Self::population()
        }
    }

    pub fn centered(self, center: bool) -> Self {
        Self { center, ..self }
    }
}

/// Anything that maps an input-space point to whitened coordinates.
pub trait Whiten {
    fn dim(&self) -> usize;

    fn transform(&self, x: &[f64]) -> Result<Vec<f64>>;

    fn transform_rows(&self, m: &Matrix) -> Result<Matrix> {
        m.map_rows(self.dim(), |row| self.transform(row))
    }

    /// Squared Euclidean distance between the two whitened points.
    fn kernel(&self, x1: &[f64], x2: &[f64]) -> Result<f64> {
        let a = self.transform(x1)?;
        let b = self.transform(x2)?;
        Ok(a.iter().zip(&b).map(|(u, v)| (u - v) * (u - v)).sum())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassWhitener {
    pub label: Label,
    #[serde(skip)]
    pub psi_inverse: LowerTriangular,
    pub divisor: Divisor,
    pub applied_jitter: f64,
    pub samples: usize,
    #[serde(skip)]
    pub center: Option<Vec<f64>>,
}

pub fn fit_class_whitener(
    samples: &Matrix,
    label: Label,
    config: &WhitenerConfig,
) -> Result<ClassWhitener> {
    match samples.rows() {
        0 => return Err(Error::EmptyClass(label)),
        1 => return Err(Error::EmptyInput { needed: 2, got: 1 }),
        _ => {}
    }
    let cov = covariance(samples, config.divisor)?;
    let (psi, applied_jitter) = cholesky(&cov, &config.jitter).map_err(|e| match e {
        Error::NotPositiveDefinite { ceiling, .. } => Error::NotPositiveDefinite {
            ceiling,
            class: Some(label),
        },
        other => other,
    })?;
    Ok(ClassWhitener {
        label,
        psi_inverse: invert_lower_triangular(&psi),
        divisor: config.divisor,
        applied_jitter,
        samples: samples.rows(),
        center: config.center.then(|| samples.column_means()),
    })
}

fn apply(psi_inverse: &LowerTriangular, center: Option<&[f64]>, x: &[f64]) -> Result<Vec<f64>> {
    match center {
        None => psi_inverse.mul_vec(x),
        Some(mu) => {
            if mu.len() != x.len() {
                return Err(Error::DimensionMismatch {
                    expected: mu.len(),
                    got: x.len(),
                });
            }
            let shifted: Vec<f64> = x.iter().zip(mu).map(|(a, b)| a - b).collect();
            psi_inverse.mul_vec(&shifted)
        }
    }
}

impl Whiten for ClassWhitener {
    fn dim(&self) -> usize {
        self.psi_inverse.dim()
    }

    fn transform(&self, x: &[f64]) -> Result<Vec<f64>> {
        apply(&self.psi_inverse, self.center.as_deref(), x)
    }
}

/// Share of positive samples, kept as the two counts it came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MixtureWeight {
    pub n_pos: usize,
    pub n_neg: usize,
}

impl MixtureWeight {
    pub fn from_counts(n_pos: usize, n_neg: usize) -> Result<Self> {
        if n_pos + n_neg == 0 {
            return Err(Error::EmptyInput { needed: 1, got: 0 });
        }
        Ok(Self { n_pos, n_neg })
    }

    pub fn from_labels(labels: &[Label]) -> Result<Self> {
        let n_pos = labels.iter().filter(|&&l| l == Label::Positive).count();
        Self::from_counts(n_pos, labels.len() - n_pos)
    }

    pub fn p(&self) -> f64 {
        self.n_pos as f64 / (self.n_pos + self.n_neg) as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpectedWhitener {
    #[serde(skip)]
    pub e_c_inverse: LowerTriangular,
    pub mixture: MixtureWeight,
    pub positive: ClassWhitener,
    pub negative: ClassWhitener,
    #[serde(skip)]
    center: Option<Vec<f64>>,
}

pub fn expected_whitener(
    positive: &ClassWhitener,
    negative: &ClassWhitener,
    mixture: MixtureWeight,
) -> Result<ExpectedWhitener> {
    if positive.label != Label::Positive || negative.label != Label::Negative {
        return Err(Error::InvalidParameter(
            "expected whitener needs the +1 whitener first and the -1 whitener second".into(),
        ));
    }
    let p = mixture.p();
    let e_c_inverse =
        LowerTriangular::convex_combination(&positive.psi_inverse, &negative.psi_inverse, p)?;
    let center = match (&positive.center, &negative.center) {
        (Some(a), Some(b)) => Some(
            a.iter()
                .zip(b)
                .map(|(x, y)| p * x + (1.0 - p) * y)
                .collect(),
        ),
        _ => None,
    };
    Ok(ExpectedWhitener {
        e_c_inverse,
        mixture,
        positive: positive.clone(),
        negative: negative.clone(),
        center,
    })
}

impl ExpectedWhitener {
    pub fn p(&self) -> f64 {
        self.mixture.p()
    }
}

impl Whiten for ExpectedWhitener {
    fn dim(&self) -> usize {
        self.e_c_inverse.dim()
    }

    fn transform(&self, x: &[f64]) -> Result<Vec<f64>> {
        apply(&self.e_c_inverse, self.center.as_deref(), x)
    }
}

/// `‖W·x1 − W·x2‖²` under one class's whitener.
pub fn cholesky_kernel(x1: &[f64], x2: &[f64], w: &ClassWhitener) -> Result<f64> {
    w.kernel(x1, x2)
}

/// `‖E(C⁻¹)·x1 − E(C⁻¹)·x2‖²`.
pub fn expected_cholesky_kernel(x1: &[f64], x2: &[f64], ew: &ExpectedWhitener) -> Result<f64> {
    ew.kernel(x1, x2)
}

/// Hyperplane `coefficients · x + intercept = 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hyperplane {
    pub coefficients: Vec<f64>,
    pub intercept: f64,
}

impl Hyperplane {
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        dot(&self.coefficients, x) + self.intercept
    }
}

/// Pulls a hyperplane `θ·z + θ₀ = 0` fitted in whitened coordinates back
/// into the input space of one class: coefficients `(Ψ⁻¹)ᵀθ`.
pub fn input_space_boundary(theta: &[f64], theta0: f64, w: &ClassWhitener) -> Result<Hyperplane> {
    let coefficients = w.psi_inverse.transpose_mul_vec(theta)?;
    let intercept = match &w.center {
        Some(mu) => theta0 - dot(&coefficients, mu),
        None => theta0,
    };
    Ok(Hyperplane {
        coefficients,
        intercept,
    })
}

/// Euclidean distance in input space between the pulled-back decision
/// boundary and its margin hyperplane, `1 / ‖(Ψ⁻¹)ᵀθ‖`.
pub fn input_space_margin(theta: &[f64], w: &ClassWhitener) -> Result<f64> {
    let a = w.psi_inverse.transpose_mul_vec(theta)?;
    Ok(1.0 / dot(&a, &a).sqrt())
}

/// `√(θᵀΣ₋⁻¹θ) / √(θᵀΣ₊⁻¹θ)`, each quadratic form by forward substitution
/// against the covariance's Cholesky factor.
///
/// This equals the ratio of [`input_space_margin`]s only when the factors
/// satisfy `ΨᵀΨ = ΨΨᵀ` (e.g. diagonal covariances); in general the two
/// differ because `(Ψ⁻¹)(Ψ⁻¹)ᵀ = (ΨᵀΨ)⁻¹`, not `Σ⁻¹`.
pub fn margin_ratio(
    theta: &[f64],
    cov_pos: &CovarianceMatrix,
    cov_neg: &CovarianceMatrix,
) -> Result<f64> {
    let psi_pos = cholesky_exact(cov_pos)?;
    let psi_neg = cholesky_exact(cov_neg)?;
    let q_pos = quadratic_form_inverse(&psi_pos, theta)?;
    let q_neg = quadratic_form_inverse(&psi_neg, theta)?;
    Ok((q_neg / q_pos).sqrt())
}
