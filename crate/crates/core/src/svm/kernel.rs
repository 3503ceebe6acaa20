use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};

/// Kernel choice as configured. `gamma: None` means "scale":
/// `1 / (d · Var(X))` over all entries of the training matrix.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum KernelSpec {
    #[default]
    Linear,
    Rbf {
        gamma: Option<f64>,
    },
    Poly {
        degree: u32,
        gamma: Option<f64>,
        coef0: f64,
    },
    Sigmoid {
        gamma: Option<f64>,
        coef0: f64,
    },
}

impl KernelSpec {
    pub fn rbf() -> Self {
        KernelSpec::Rbf { gamma: None }
    }

    pub fn poly() -> Self {
        KernelSpec::Poly {
            degree: 3,
            gamma: None,
            coef0: 0.0,
        }
    }

    pub fn sigmoid() -> Self {
        KernelSpec::Sigmoid {
            gamma: None,
            coef0: 0.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            KernelSpec::Linear => "linear",
            KernelSpec::Rbf { .. } => "rbf",
            KernelSpec::Poly { .. } => "poly",
            KernelSpec::Sigmoid { .. } => "sigmoid",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let gamma = match *self {
            KernelSpec::Linear => None,
            KernelSpec::Rbf { gamma } | KernelSpec::Sigmoid { gamma, .. } => gamma,
            KernelSpec::Poly { degree, gamma, .. } => {
                if degree == 0 {
                    return Err(Error::InvalidParameter(
                        "polynomial degree must be >= 1".into(),
                    ));
                }
                gamma
            }
        };
        match gamma {
            Some(g) if !(g > 0.0 && g.is_finite()) => Err(Error::InvalidParameter(format!(
                "gamma must be positive, got {g}"
            ))),
            _ => Ok(()),
        }
    }

    /// Fixes `gamma` against the training matrix.
    pub fn resolve(&self, x: &Matrix) -> Result<Kernel> {
        self.validate()?;
        let scale = || scale_gamma(x);
        Ok(match *self {
            KernelSpec::Linear => Kernel::Linear,
            KernelSpec::Rbf { gamma } => Kernel::Rbf {
                gamma: gamma.unwrap_or_else(scale),
            },
            KernelSpec::Poly {
                degree,
                gamma,
                coef0,
            } => Kernel::Poly {
                degree,
                gamma: gamma.unwrap_or_else(scale),
                coef0,
            },
            KernelSpec::Sigmoid { gamma, coef0 } => Kernel::Sigmoid {
                gamma: gamma.unwrap_or_else(scale),
                coef0,
            },
        })
    }
}

fn scale_gamma(x: &Matrix) -> f64 {
    let values = x.as_slice();
    if values.is_empty() || x.cols() == 0 {
        return 1.0;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    if var > 0.0 {
        1.0 / (x.cols() as f64 * var)
    } else {
        1.0
    }
}

/// Kernel with every parameter fixed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Kernel {
    Linear,
    Rbf { gamma: f64 },
    Poly { degree: u32, gamma: f64, coef0: f64 },
    Sigmoid { gamma: f64, coef0: f64 },
}

impl Kernel {
    #[inline]
    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match *self {
            Kernel::Linear => dot(a, b),
            Kernel::Rbf { gamma } => {
                let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
                (-gamma * d2).exp()
            }
            Kernel::Poly {
                degree,
                gamma,
                coef0,
            } => (gamma * dot(a, b) + coef0).powi(degree as i32),
            Kernel::Sigmoid { gamma, coef0 } => (gamma * dot(a, b) + coef0).tanh(),
        }
    }

    pub fn is_linear(&self) -> bool {
        matches!(self, Kernel::Linear)
    }

    /// Symmetric Gram matrix of the rows of `x`, row-major.
    pub fn gram(&self, x: &Matrix) -> Vec<f64> {
        let n = x.rows();
        let mut k = vec![0.0; n * n];
        for i in 0..n {
            let xi = x.row(i);
            for j in 0..=i {
                let v = self.eval(xi, x.row(j));
                k[i * n + j] = v;
                k[j * n + i] = v;
            }
        }
        k
    }
}
