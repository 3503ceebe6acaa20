use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::data::{Label, LabeledData};
use crate::error::{Error, Result};
use crate::eval::metrics::{metrics, ClassificationReport, ConfusionMatrix};
use crate::eval::pipeline::{
    run_pipeline_with, PipelineMode, PipelineOutcome, PipelineSpec, PopulationWhiteners,
};
use crate::eval::split::class_indices;
use crate::parallel::{map_indexed, Execution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CvScheme {
    Loocv,
    Kfold {
        k: usize,
        seed: u64,
        stratified: bool,
    },
}

impl CvScheme {
    pub fn kfold(k: usize, seed: u64) -> Self {
        CvScheme::Kfold {
            k,
            seed,
            stratified: true,
        }
    }

    pub fn name(&self) -> String {
        match self {
            CvScheme::Loocv => "loocv".into(),
            CvScheme::Kfold { k, .. } => format!("{k}-fold"),
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        match *self {
            CvScheme::Loocv if n < 2 => Err(Error::EmptyInput { needed: 2, got: n }),
            CvScheme::Kfold { k, .. } if k < 2 || k > n => Err(Error::InvalidParameter(format!(
                "k-fold needs 2 <= k <= n (k = {k}, n = {n})"
            ))),
            _ => Ok(()),
        }
    }
}

/// Test indices of every fold, each list sorted. Stratified folds shuffle
/// each class and deal the concatenated classes round-robin, so fold sizes
/// differ by at most one and class shares stay balanced.
pub fn fold_indices(labels: &[Label], scheme: &CvScheme) -> Result<Vec<Vec<usize>>> {
    let n = labels.len();
    scheme.validate(n)?;
    match *scheme {
        CvScheme::Loocv => Ok((0..n).map(|i| vec![i]).collect()),
        CvScheme::Kfold {
            k,
            seed,
            stratified,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let order: Vec<usize> = if stratified {
                [Label::Positive, Label::Negative]
                    .into_iter()
                    .flat_map(|label| {
                        let mut idx = class_indices(labels, label);
                        idx.shuffle(&mut rng);
                        idx
                    })
                    .collect()
            } else {
                let mut idx: Vec<usize> = (0..n).collect();
                idx.shuffle(&mut rng);
                idx
            };
            let mut folds = vec![Vec::new(); k];
            for (pos, i) in order.into_iter().enumerate() {
                folds[pos % k].push(i);
            }
            folds.iter_mut().for_each(|f| f.sort_unstable());
            Ok(folds)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FoldResult {
    pub fold: usize,
    pub test_indices: Vec<usize>,
    pub outcome: Option<PipelineOutcome>,
    /// Set when the fold could not be evaluated (e.g. a class covariance
    /// stayed singular at the jitter ceiling).
    pub error: Option<String>,
}

impl FoldResult {
    pub fn accuracy(&self) -> Option<f64> {
        self.outcome.as_ref().map(|o| o.report.accuracy)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CvSummary {
    pub scheme: CvScheme,
    pub pipeline: PipelineSpec,
    /// Unweighted mean of fold accuracies for k-fold; overall fraction
    /// correct for leave-one-out. Failed folds are excluded from both.
    pub mean_accuracy: f64,
    pub pooled: ClassificationReport,
    pub failed_folds: usize,
    pub label_leakage: bool,
    pub folds: Vec<FoldResult>,
}

impl CvSummary {
    pub fn pooled_confusion(&self) -> ConfusionMatrix {
        self.pooled.confusion
    }

    pub fn outcomes(&self) -> impl Iterator<Item = &PipelineOutcome> {
        self.folds.iter().filter_map(|f| f.outcome.as_ref())
    }
}

pub fn cross_validate(
    data: &LabeledData,
    scheme: &CvScheme,
    spec: &PipelineSpec,
) -> Result<CvSummary> {
    cross_validate_with(data, scheme, spec, Execution::default())
}

pub fn cross_validate_with(
    data: &LabeledData,
    scheme: &CvScheme,
    spec: &PipelineSpec,
    exec: Execution,
) -> Result<CvSummary> {
    spec.hyperparams.validate()?;
    let folds = fold_indices(&data.labels, scheme)?;
    let n = data.len();

    // Whiteners over the whole dataset are fold-independent (train ∪ test is
    // always everything), so fit them once. Standardization is per-fold and
    // would change them, so that combination refits inside each fold.
    let population = if spec.mode == PipelineMode::PopulationCholesky && !spec.standardize {
        Some(PopulationWhiteners::fit(data, spec)?)
    } else {
        None
    };

    let results = map_indexed(folds.len(), exec, |f| {
        let test_idx = &folds[f];
        let mut in_test = vec![false; n];
        test_idx.iter().for_each(|&i| in_test[i] = true);
        let train_idx: Vec<usize> = (0..n).filter(|&i| !in_test[i]).collect();
        let train = data.subset(&train_idx);
        let test = data.subset(test_idx);
        let outcome = run_pipeline_with(&train, &test, spec, population.as_ref());
        FoldResult {
            fold: f,
            test_indices: test_idx.clone(),
            error: outcome.as_ref().err().map(ToString::to_string),
            outcome: outcome.ok(),
        }
    });

    let mut pooled = ConfusionMatrix::default();
    let mut acc_sum = 0.0;
    let mut ok = 0usize;
    for outcome in results.iter().filter_map(|r| r.outcome.as_ref()) {
        pooled += outcome.report.confusion;
        acc_sum += outcome.report.accuracy;
        ok += 1;
    }
    let mean_accuracy = match scheme {
        CvScheme::Loocv => pooled.correct() as f64 / pooled.total().max(1) as f64,
        CvScheme::Kfold { .. } => acc_sum / ok.max(1) as f64,
    };
    Ok(CvSummary {
        scheme: *scheme,
        pipeline: *spec,
        mean_accuracy,
        pooled: metrics(&pooled),
        failed_folds: results.len() - ok,
        label_leakage: spec.mode.uses_true_labels(),
        folds: results,
    })
}
