//! Soft-margin support vector classifier trained on the dual problem.

mod kernel;
mod smo;

pub use kernel::{Kernel, KernelSpec};

use serde::Serialize;

use crate::data::{Label, LabeledData};
use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Hyperparams {
    /// Slack penalty (box bound on the multipliers).
    pub c: f64,
    /// Stop once the maximal KKT violation gap falls below this.
    pub tol: f64,
    /// Give up after this many consecutive sweeps without dual progress.
    pub max_passes: usize,
    /// Update budget in sweeps; one sweep is `max(n, 1000)` pair updates.
    pub max_iter: usize,
    pub kernel: KernelSpec,
    pub seed: u64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Self {
            c: 1.0,
            tol: 1e-3,
            max_passes: 10,
            max_iter: 10_000,
            kernel: KernelSpec::Linear,
            seed: 0,
        }
    }
}

impl Hyperparams {
    pub fn with_kernel(self, kernel: KernelSpec) -> Self {
        Self { kernel, ..self }
    }

    pub fn with_c(self, c: f64) -> Self {
        Self { c, ..self }
    }

    pub fn with_tol(self, tol: f64) -> Self {
        Self { tol, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "c must be positive, got {}",
                self.c
            )));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.max_passes == 0 || self.max_iter == 0 {
            return Err(Error::InvalidParameter(
                "max_passes and max_iter must be at least 1".into(),
            ));
        }
        self.kernel.validate()
    }
}

/// A fitted classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    pub kernel: Kernel,
    pub c: f64,
    /// One multiplier per training sample, in training order.
    pub alphas: Vec<f64>,
    pub support_indices: Vec<usize>,
    support_vectors: Matrix,
    /// `α_i · y_i` for each support vector.
    support_coef: Vec<f64>,
    support_labels: Vec<Label>,
    pub bias: f64,
    /// `Σ α_i y_i x_i`, present for the linear kernel.
    pub weight_vector: Option<Vec<f64>>,
    pub converged: bool,
    pub iterations: usize,
    pub dual_objective: f64,
    pub objective_trace: Vec<f64>,
}

pub fn fit(data: &LabeledData, hp: &Hyperparams) -> Result<SvmModel> {
    hp.validate()?;
    let n = data.len();
    if data.count(Label::Positive) == 0 || data.count(Label::Negative) == 0 {
        return Err(Error::SingleClassData);
    }
    let x = &data.features;
    let kernel = hp.kernel.resolve(x)?;
    let y: Vec<f64> = data.labels.iter().map(|l| l.sign()).collect();
    let gram = kernel.gram(x);
    let out = smo::solve(
        &gram,
        &y,
        &smo::SmoSettings {
            c: hp.c,
            tol: hp.tol,
            max_sweeps: hp.max_iter,
            max_stalled_sweeps: hp.max_passes,
            seed: hp.seed,
        },
    );
    let bias = smo::bias(&out.alphas, &out.gradient, &y, hp.c);

    let support_indices: Vec<usize> = (0..n).filter(|&i| out.alphas[i] > 0.0).collect();
    let support_vectors = x.select_rows(&support_indices);
    let support_coef: Vec<f64> = support_indices
        .iter()
        .map(|&i| out.alphas[i] * y[i])
        .collect();
    let weight_vector = kernel.is_linear().then(|| {
        let mut w = vec![0.0; x.cols()];
        for (row, coef) in support_vectors.row_iter().zip(&support_coef) {
            for (wk, xk) in w.iter_mut().zip(row) {
                *wk += coef * xk;
            }
        }
        w
    });

    Ok(SvmModel {
        kernel,
        c: hp.c,
        support_labels: support_indices.iter().map(|&i| data.labels[i]).collect(),
        alphas: out.alphas,
        support_indices,
        support_vectors,
        support_coef,
        bias,
        weight_vector,
        converged: out.converged,
        iterations: out.iterations,
        dual_objective: *out.trace.last().unwrap_or(&0.0),
        objective_trace: out.trace,
    })
}

impl SvmModel {
    pub fn dim(&self) -> usize {
        self.support_vectors.cols()
    }

    pub fn support_vectors(&self) -> &Matrix {
        &self.support_vectors
    }

    pub fn support_labels(&self) -> &[Label] {
        &self.support_labels
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        let d = match &self.weight_vector {
            Some(w) => w.len(),
            None => self.dim(),
        };
        if x.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Pre-sign decision value. Linear models use the weight vector.
    pub fn decision_value(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        Ok(match &self.weight_vector {
            Some(w) => dot(w, x) + self.bias,
            None => self.kernel_sum(x),
        })
    }

    /// `Σ α_i y_i K(x_i, x) + θ₀` over the support vectors, for any kernel.
    pub fn decision_value_by_support_vectors(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        Ok(self.kernel_sum(x))
    }

    fn kernel_sum(&self, x: &[f64]) -> f64 {
        self.support_vectors
            .row_iter()
            .zip(&self.support_coef)
            .map(|(sv, coef)| coef * self.kernel.eval(sv, x))
            .sum::<f64>()
            + self.bias
    }

    pub fn predict(&self, x: &[f64]) -> Result<Label> {
        Ok(Label::from_decision(self.decision_value(x)?))
    }

    pub fn predict_rows(&self, x: &Matrix) -> Result<Vec<Label>> {
        x.row_iter().map(|row| self.predict(row)).collect()
    }

    /// `|Σ α_i y_i|`.
    pub fn dual_residual(&self) -> f64 {
        self.support_coef.iter().sum::<f64>().abs()
    }

    /// Allowed magnitude of [`Self::dual_residual`]: `1e-8 · Σα + 1e-12`.
    pub fn dual_feasibility_bound(&self) -> f64 {
        1e-8 * self.alphas.iter().sum::<f64>() + 1e-12
    }

    pub fn is_dual_feasible(&self) -> bool {
        self.dual_residual() <= self.dual_feasibility_bound()
            && self.alphas.iter().all(|&a| (0.0..=self.c).contains(&a))
    }
}

/// Geometric margin `1 / ‖θ‖`.
pub fn margin(model: &SvmModel) -> Result<f64> {
    let w = model.weight_vector.as_ref().ok_or(Error::NotLinearModel)?;
    Ok(1.0 / dot(w, w).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KktReport {
    /// Per-sample violation of the complementary-slackness condition for
    /// its multiplier's state (at 0, free, at C); zero when satisfied.
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub converged: bool,
}

impl KktReport {
    pub fn satisfied(&self, tol: f64) -> bool {
        self.max_residual <= tol
    }
}

pub fn kkt_report(model: &SvmModel, data: &LabeledData, _hp: &Hyperparams) -> Result<KktReport> {
    if data.len() != model.alphas.len() {
        return Err(Error::DimensionMismatch {
            expected: model.alphas.len(),
            got: data.len(),
        });
    }
    let residuals = data
        .features
        .row_iter()
        .zip(&data.labels)
        .zip(&model.alphas)
        .map(|((x, label), &a)| {
            let margin = label.sign() * model.decision_value_by_support_vectors(x)?;
            Ok(if a <= 0.0 {
                (1.0 - margin).max(0.0)
            } else if a >= model.c {
                (margin - 1.0).max(0.0)
            } else {
                (margin - 1.0).abs()
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    Ok(KktReport {
        residuals,
        max_residual,
        converged: model.converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data(rows: &[[f64; 2]], labels: &[i8]) -> LabeledData {
        LabeledData::new(
            Matrix::from_rows(rows).unwrap(),
            labels
                .iter()
                .map(|&l| {
                    if l > 0 {
                        Label::Positive
                    } else {
                        Label::Negative
                    }
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn two_point_problem_has_analytic_solution() {
        let d = data(&[[1.0, 1.0], [-1.0, -1.0]], &[1, -1]);
        let hp = Hyperparams::default().with_c(1e3).with_tol(1e-10);
        let m = fit(&d, &hp).unwrap();
        let w = m.weight_vector.clone().unwrap();
        assert!((w[0] - 0.5).abs() < 1e-12 && (w[1] - 0.5).abs() < 1e-12);
        assert!(m.bias.abs() < 1e-12);
        assert_eq!(m.support_indices, vec![0, 1]);
        assert!((m.alphas[0] - 0.25).abs() < 1e-12);
        assert!((m.decision_value(&[1.0, 1.0]).unwrap() - 1.0).abs() < 1e-12);
        assert!(m.decision_value(&[0.0, 0.0]).unwrap().abs() < 1e-12);
        assert!((margin(&m).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        let kkt = kkt_report(&m, &d, &hp).unwrap();
        assert!(kkt.max_residual < 1e-9);
    }

    #[test]
    fn tiny_c_puts_every_multiplier_at_the_bound() {
        let d = data(
            &[
                [0.0, 1.0],
                [1.0, 2.0],
                [2.0, 0.5],
                [-1.0, -1.0],
                [0.5, -2.0],
                [-2.0, 0.0],
            ],
            &[1, 1, 1, -1, -1, -1],
        );
        let hp = Hyperparams::default().with_c(1e-6);
        let m = fit(&d, &hp).unwrap();
        assert!(m.alphas.iter().all(|&a| a == 1e-6));
    }

    #[test]
    fn single_class_is_rejected() {
        let d = data(&[[0.0, 1.0], [1.0, 2.0]], &[1, 1]);
        assert!(matches!(
            fit(&d, &Hyperparams::default()),
            Err(Error::SingleClassData)
        ));
    }

    #[test]
    fn invalid_hyperparams() {
        let d = data(&[[0.0, 1.0], [1.0, 2.0]], &[1, -1]);
        assert!(fit(&d, &Hyperparams::default().with_c(0.0)).is_err());
        assert!(fit(&d, &Hyperparams::default().with_tol(-1.0)).is_err());
    }

    #[test]
    fn zero_decision_predicts_positive() {
        assert_eq!(Label::from_decision(0.3), Label::Positive);
        assert_eq!(Label::from_decision(-2.0), Label::Negative);
        assert_eq!(Label::from_decision(0.0), Label::Positive);
    }

    #[test]
    fn margin_needs_linear_model() {
        let d = data(&[[1.0, 1.0], [-1.0, -1.0]], &[1, -1]);
        let m = fit(&d, &Hyperparams::default().with_kernel(KernelSpec::rbf())).unwrap();
        assert!(m.weight_vector.is_none());
        assert!(matches!(margin(&m), Err(Error::NotLinearModel)));
    }

    #[test]
    fn margin_of_given_weights() {
        let d = data(&[[1.0, 1.0], [-1.0, -1.0]], &[1, -1]);
        let mut m = fit(&d, &Hyperparams::default()).unwrap();
        m.weight_vector = Some(vec![3.0, 4.0]);
        assert!((margin(&m).unwrap() - 0.2).abs() < 1e-15);
        m.weight_vector = Some(vec![1.0, 0.0]);
        assert_eq!(margin(&m).unwrap(), 1.0);
    }

    #[test]
    fn dimension_mismatch_on_predict() {
        let d = data(&[[1.0, 1.0], [-1.0, -1.0]], &[1, -1]);
        let m = fit(&d, &Hyperparams::default()).unwrap();
        assert!(matches!(
            m.decision_value(&[1.0]),
            Err(Error::DimensionMismatch {
                expected: 2,
                got: 1
            })
        ));
    }
}
