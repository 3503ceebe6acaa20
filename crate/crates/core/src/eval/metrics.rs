use std::ops::AddAssign;

use serde::Serialize;

use crate::data::Label;

/// Counts with `+1` as the positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
}

impl ConfusionMatrix {
    pub fn new(tp: usize, fp: usize, fn_: usize, tn: usize) -> Self {
        Self { tp, fp, fn_, tn }
    }

    pub fn from_predictions(truth: &[Label], predicted: &[Label]) -> Self {
        let mut cm = Self::default();
        for (t, p) in truth.iter().zip(predicted) {
            match (t, p) {
                (Label::Positive, Label::Positive) => cm.tp += 1,
                (Label::Negative, Label::Positive) => cm.fp += 1,
                (Label::Positive, Label::Negative) => cm.fn_ += 1,
                (Label::Negative, Label::Negative) => cm.tn += 1,
            }
        }
        cm
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub fn correct(&self) -> usize {
        self.tp + self.tn
    }
}

impl AddAssign for ConfusionMatrix {
    fn add_assign(&mut self, rhs: Self) {
        self.tp += rhs.tp;
        self.fp += rhs.fp;
        self.fn_ += rhs.fn_;
        self.tn += rhs.tn;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub positive: ClassMetrics,
    pub negative: ClassMetrics,
    pub accuracy: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub confusion: ConfusionMatrix,
}

impl ClassificationReport {
    pub fn class(&self, label: Label) -> &ClassMetrics {
        match label {
            Label::Positive => &self.positive,
            Label::Negative => &self.negative,
        }
    }
}

/// `num / den`, with `0/0 = 0`.
fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn harmonic(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

fn class_metrics(hit: usize, false_alarm: usize, missed: usize) -> ClassMetrics {
    let precision = ratio(hit, hit + false_alarm);
    let recall = ratio(hit, hit + missed);
    ClassMetrics {
        precision,
        recall,
        f1: harmonic(precision, recall),
        support: hit + missed,
    }
}

pub fn metrics(cm: &ConfusionMatrix) -> ClassificationReport {
    let positive = class_metrics(cm.tp, cm.fp, cm.fn_);
    let negative = class_metrics(cm.tn, cm.fn_, cm.fp);
    ClassificationReport {
        positive,
        negative,
        accuracy: ratio(cm.correct(), cm.total()),
        macro_precision: 0.5 * (positive.precision + negative.precision),
        macro_recall: 0.5 * (positive.recall + negative.recall),
        macro_f1: 0.5 * (positive.f1 + negative.f1),
        confusion: *cm,
    }
}
