use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::data::{Label, LabeledData, Standardizer};
use crate::error::{Error, Result};
use crate::eval::metrics::{metrics, ClassificationReport, ConfusionMatrix};
use crate::linalg::{JitterPolicy, Matrix};
use crate::svm::{fit, kkt_report, Hyperparams, KernelSpec, SvmModel};
use crate::whitening::{
    expected_whitener, fit_class_whitener, ClassWhitener, MixtureWeight, Whiten, WhitenerConfig,
};

/// Caveat attached to every population-Cholesky result.
pub const LABEL_LEAKAGE_NOTE: &str =
    "population-cholesky uses true class labels of evaluated points for transformation";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PipelineMode {
    /// Kernel SVM on the raw features.
    Baseline,
    /// Per-class whiteners from the population covariance of every sample of
    /// that class (train and test pooled); each point is whitened by the
    /// whitener of its own class.
    PopulationCholesky,
    /// Per-class whiteners from training sample covariances, mixed by the
    /// training class prior; one transform for every point.
    ExpectedCholesky,
}

impl PipelineMode {
    pub fn name(&self) -> &'static str {
        match self {
            PipelineMode::Baseline => "baseline",
            PipelineMode::PopulationCholesky => "population-cholesky",
            PipelineMode::ExpectedCholesky => "expected-cholesky",
        }
    }

    pub fn uses_true_labels(&self) -> bool {
        matches!(self, PipelineMode::PopulationCholesky)
    }
}

impl fmt::Display for PipelineMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PipelineMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "baseline" => Ok(PipelineMode::Baseline),
            "population-cholesky" => Ok(PipelineMode::PopulationCholesky),
            "expected-cholesky" => Ok(PipelineMode::ExpectedCholesky),
            other => Err(Error::InvalidParameter(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PipelineSpec {
    pub mode: PipelineMode,
    pub hyperparams: Hyperparams,
    /// Subtract class means before whitening.
    pub center: bool,
    /// z-score features with training statistics before anything else.
    pub standardize: bool,
    pub jitter: JitterPolicy,
}

impl PipelineSpec {
    pub fn new(mode: PipelineMode) -> Self {
        Self {
            mode,
            hyperparams: Hyperparams::default(),
            center: false,
            standardize: false,
            jitter: JitterPolicy::default(),
        }
    }

    pub fn baseline(kernel: KernelSpec) -> Self {
        let mut spec = Self::new(PipelineMode::Baseline);
        spec.hyperparams.kernel = kernel;
        spec
    }

    pub fn population_cholesky() -> Self {
        Self::new(PipelineMode::PopulationCholesky)
    }

    pub fn expected_cholesky() -> Self {
        Self::new(PipelineMode::ExpectedCholesky)
    }

    pub fn with_hyperparams(self, hyperparams: Hyperparams) -> Self {
        Self {
            hyperparams,
            ..self
        }
    }

    /// The whitening modes always train a linear SVM in whitened space.
    pub fn effective_hyperparams(&self) -> Hyperparams {
        match self.mode {
            PipelineMode::Baseline => self.hyperparams,
            _ => self.hyperparams.with_kernel(KernelSpec::Linear),
        }
    }

    pub fn label(&self) -> String {
        match self.mode {
            PipelineMode::Baseline => self.hyperparams.kernel.name().to_string(),
            mode => mode.name().to_string(),
        }
    }

    fn whitener_config(&self, population: bool) -> WhitenerConfig {
        let base = if population {
            WhitenerConfig::population()
        } else {
            WhitenerConfig::sample()
        };
        WhitenerConfig {
            jitter: self.jitter,
            ..base.centered(self.center)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitDiagnostics {
    pub converged: bool,
    pub iterations: usize,
    pub support_vectors: usize,
    pub bias: f64,
    pub dual_objective: f64,
    pub dual_residual: f64,
    pub dual_bound: f64,
    pub kkt_max_residual: f64,
}

impl FitDiagnostics {
    fn new(model: &SvmModel, train: &LabeledData, hp: &Hyperparams) -> Result<Self> {
        let kkt = kkt_report(model, train, hp)?;
        Ok(Self {
            converged: model.converged,
            iterations: model.iterations,
            support_vectors: model.support_indices.len(),
            bias: model.bias,
            dual_objective: model.dual_objective,
            dual_residual: model.dual_residual(),
            dual_bound: model.dual_feasibility_bound(),
            kkt_max_residual: kkt.max_residual,
        })
    }

    pub fn dual_feasible(&self) -> bool {
        self.dual_residual <= self.dual_bound
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WhiteningInfo {
    pub jitter_positive: f64,
    pub jitter_negative: f64,
    /// Mixture weight on the `+1` whitener (expected mode only).
    pub p: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineOutcome {
    pub report: ClassificationReport,
    pub predictions: Vec<Label>,
    pub fit: FitDiagnostics,
    pub whitening: Option<WhiteningInfo>,
    pub label_leakage: bool,
}

/// Class whiteners built from every available sample of each class.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationWhiteners {
    pub positive: ClassWhitener,
    pub negative: ClassWhitener,
}

impl PopulationWhiteners {
    pub fn fit(all: &LabeledData, spec: &PipelineSpec) -> Result<Self> {
        let cfg = spec.whitener_config(true);
        Ok(Self {
            positive: fit_class_whitener(&all.class_rows(Label::Positive), Label::Positive, &cfg)?,
            negative: fit_class_whitener(&all.class_rows(Label::Negative), Label::Negative, &cfg)?,
        })
    }

    fn for_label(&self, label: Label) -> &ClassWhitener {
        match label {
            Label::Positive => &self.positive,
            Label::Negative => &self.negative,
        }
    }

    /// Whitens each row with the whitener of its own label.
    pub fn transform_by_label(&self, data: &LabeledData) -> Result<LabeledData> {
        let d = data.dim();
        let mut out = Vec::with_capacity(data.len() * d);
        for (row, &label) in data.features.row_iter().zip(&data.labels) {
            out.extend(self.for_label(label).transform(row)?);
        }
        LabeledData::new(Matrix::new(data.len(), d, out)?, data.labels.clone())
    }
}

/// Fits on `train`, scores `test`.
pub fn run_pipeline(
    train: &LabeledData,
    test: &LabeledData,
    spec: &PipelineSpec,
) -> Result<PipelineOutcome> {
    run_pipeline_with(train, test, spec, None)
}

/// As [`run_pipeline`]; `population` lets cross-validation reuse whiteners
/// computed once over the full dataset (already standardized if requested).
pub(crate) fn run_pipeline_with(
    train: &LabeledData,
    test: &LabeledData,
    spec: &PipelineSpec,
    population: Option<&PopulationWhiteners>,
) -> Result<PipelineOutcome> {
    let (train, test) = if spec.standardize {
        let params = Standardizer::fit(&train.features)?;
        (
            LabeledData::new(params.apply(&train.features)?, train.labels.clone())?,
            LabeledData::new(params.apply(&test.features)?, test.labels.clone())?,
        )
    } else {
        (train.clone(), test.clone())
    };
    let hp = spec.effective_hyperparams();

    let (train_t, test_features, whitening) = match spec.mode {
        PipelineMode::Baseline => (train, test.features.clone(), None),
        PipelineMode::PopulationCholesky => {
            let owned;
            let pw = match population {
                Some(pw) => pw,
                None => {
                    owned = PopulationWhiteners::fit(&train.concat(&test)?, spec)?;
                    &owned
                }
            };
            let info = WhiteningInfo {
                jitter_positive: pw.positive.applied_jitter,
                jitter_negative: pw.negative.applied_jitter,
                p: None,
            };
            (
                pw.transform_by_label(&train)?,
                pw.transform_by_label(&test)?.features,
                Some(info),
            )
        }
        PipelineMode::ExpectedCholesky => {
            let (train_t, test_features, info) = expected_transform(&train, &test.features, spec)?;
            (train_t, test_features, Some(info))
        }
    };

    let model = fit(&train_t, &hp)?;
    let predictions = model.predict_rows(&test_features)?;
    let confusion = ConfusionMatrix::from_predictions(&test.labels, &predictions);
    Ok(PipelineOutcome {
        report: metrics(&confusion),
        predictions,
        fit: FitDiagnostics::new(&model, &train_t, &hp)?,
        whitening,
        label_leakage: spec.mode.uses_true_labels(),
    })
}

/// Builds the expected whitener from the training partition only and applies
/// it to both partitions. Test rows arrive without labels.
fn expected_transform(
    train: &LabeledData,
    test_features: &Matrix,
    spec: &PipelineSpec,
) -> Result<(LabeledData, Matrix, WhiteningInfo)> {
    let cfg = spec.whitener_config(false);
    let pos = fit_class_whitener(&train.class_rows(Label::Positive), Label::Positive, &cfg)?;
    let neg = fit_class_whitener(&train.class_rows(Label::Negative), Label::Negative, &cfg)?;
    let ew = expected_whitener(&pos, &neg, MixtureWeight::from_labels(&train.labels)?)?;
    let info = WhiteningInfo {
        jitter_positive: pos.applied_jitter,
        jitter_negative: neg.applied_jitter,
        p: Some(ew.p()),
    };
    Ok((
        LabeledData::new(ew.transform_rows(&train.features)?, train.labels.clone())?,
        ew.transform_rows(test_features)?,
        info,
    ))
}
