use std::fmt::Write;

use serde_json::json;

use cholesky_svm::data::LabelEncoding;
use cholesky_svm::eval::{
    ClassificationReport, CvScheme, CvSummary, PipelineOutcome, PipelineSpec, SplitSpec,
    LABEL_LEAKAGE_NOTE,
};
use cholesky_svm::Label;

use crate::output::{json_line, num};

/// A single train/test evaluation.
pub struct Holdout<'a> {
    pub spec: &'a PipelineSpec,
    pub split: &'a SplitSpec,
    pub train_size: usize,
    pub outcome: &'a PipelineOutcome,
}

/// One row of a comparison: the pipeline and its scores on the shared
/// split or folds.
pub struct CompareRow {
    pub spec: PipelineSpec,
    pub report: ClassificationReport,
    pub accuracy: f64,
    pub label_leakage: bool,
}

fn f3(v: f64) -> String {
    format!("{v:.3}")
}

fn scheme_text(scheme: &CvScheme) -> String {
    match scheme {
        CvScheme::Loocv => "leave-one-out".into(),
        CvScheme::Kfold {
            k,
            seed,
            stratified,
        } => format!(
            "{k}-fold ({}, seed {seed})",
            if *stratified {
                "stratified"
            } else {
                "unstratified"
            }
        ),
    }
}

fn holdout_text(split: &SplitSpec, train: usize, test: usize) -> String {
    format!(
        "holdout {train} train / {test} test ({}, seed {})",
        if split.stratified {
            "stratified"
        } else {
            "unstratified"
        },
        split.seed
    )
}

/// Per-class table in the usual precision / recall / f1 / support layout.
pub fn classification_table(out: &mut String, r: &ClassificationReport, enc: &LabelEncoding) {
    let width = enc.positive.len().max(enc.negative.len()).max(12);
    let _ = writeln!(
        out,
        "{:>width$}  {:>9} {:>9} {:>9} {:>9}",
        "", "precision", "recall", "f1-score", "support"
    );
    let _ = writeln!(out);
    for label in [Label::Positive, Label::Negative] {
        let m = r.class(label);
        let _ = writeln!(
            out,
            "{:>width$}  {:>9} {:>9} {:>9} {:>9}",
            enc.name(label),
            f3(m.precision),
            f3(m.recall),
            f3(m.f1),
            m.support
        );
    }
    let total = r.confusion.total();
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "{:>width$}  {:>9} {:>9} {:>9} {:>9}",
        "accuracy",
        "",
        "",
        f3(r.accuracy),
        total
    );
    let _ = writeln!(
        out,
        "{:>width$}  {:>9} {:>9} {:>9} {:>9}",
        "macro avg",
        f3(r.macro_precision),
        f3(r.macro_recall),
        f3(r.macro_f1),
        total
    );
}

pub fn confusion_table(out: &mut String, r: &ClassificationReport, enc: &LabelEncoding) {
    let (p, n) = (enc.name(Label::Positive), enc.name(Label::Negative));
    let w = p.len().max(n.len()).max(6);
    let c = &r.confusion;
    let _ = writeln!(out, "confusion matrix (rows: true, columns: predicted)");
    let _ = writeln!(out, "{:>w$}  {:>w$} {:>w$}", "", p, n);
    let _ = writeln!(out, "{:>w$}  {:>w$} {:>w$}", p, c.tp, c.fn_);
    let _ = writeln!(out, "{:>w$}  {:>w$} {:>w$}", n, c.fp, c.tn);
}

fn leakage_note(out: &mut String, leakage: bool) {
    if leakage {
        let _ = writeln!(out, "\nnote: {LABEL_LEAKAGE_NOTE}");
    }
}

pub fn evaluate_plain(h: &Holdout, enc: &LabelEncoding) -> String {
    let mut out = String::new();
    let o = h.outcome;
    let _ = writeln!(out, "pipeline: {}", h.spec.label());
    let _ = writeln!(
        out,
        "{}",
        holdout_text(h.split, h.train_size, o.predictions.len())
    );
    let _ = writeln!(out);
    classification_table(&mut out, &o.report, enc);
    let _ = writeln!(out);
    confusion_table(&mut out, &o.report, enc);
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "fit: {} after {} updates, {} support vectors",
        if o.fit.converged {
            "converged"
        } else {
            "NOT converged"
        },
        o.fit.iterations,
        o.fit.support_vectors
    );
    leakage_note(&mut out, o.label_leakage);
    out
}

fn csv_header(enc: &LabelEncoding) -> String {
    let (p, n) = (enc.name(Label::Positive), enc.name(Label::Negative));
    format!(
        "pipeline,evaluation,accuracy,precision_{p},recall_{p},f1_{p},support_{p},\
         precision_{n},recall_{n},f1_{n},support_{n},macro_precision,macro_recall,macro_f1,\
         tp,fp,fn,tn,label_leakage\n"
    )
}

fn csv_row(
    label: &str,
    evaluation: &str,
    accuracy: f64,
    r: &ClassificationReport,
    leakage: bool,
) -> String {
    let c = &r.confusion;
    let (p, n) = (&r.positive, &r.negative);
    format!(
        "{label},{evaluation},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{leakage}\n",
        num(accuracy),
        num(p.precision),
        num(p.recall),
        num(p.f1),
        p.support,
        num(n.precision),
        num(n.recall),
        num(n.f1),
        n.support,
        num(r.macro_precision),
        num(r.macro_recall),
        num(r.macro_f1),
        c.tp,
        c.fp,
        c.fn_,
        c.tn,
    )
}

pub fn evaluate_csv(h: &Holdout, enc: &LabelEncoding) -> String {
    let o = h.outcome;
    let mut out = csv_header(enc);
    out.push_str(&csv_row(
        &h.spec.label(),
        "holdout",
        o.report.accuracy,
        &o.report,
        o.label_leakage,
    ));
    out
}

pub fn evaluate_jsonl(h: &Holdout, enc: &LabelEncoding) -> String {
    let o = h.outcome;
    json_line(&json!({
        "command": "evaluate",
        "pipeline": h.spec.label(),
        "spec": h.spec,
        "split": h.split,
        "train_size": h.train_size,
        "test_size": o.predictions.len(),
        "classes": { "positive": enc.positive, "negative": enc.negative },
        "report": o.report,
        "fit": o.fit,
        "whitening": o.whitening,
        "label_leakage": o.label_leakage,
        "note": o.label_leakage.then_some(LABEL_LEAKAGE_NOTE),
    }))
}

pub fn cv_plain(s: &CvSummary, enc: &LabelEncoding, ids: &[String]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "pipeline: {}", s.pipeline.label());
    let _ = writeln!(out, "scheme: {}", scheme_text(&s.scheme));
    let _ = writeln!(out);
    match s.scheme {
        CvScheme::Loocv => {
            let c = &s.pooled.confusion;
            let _ = writeln!(
                out,
                "fraction correct: {} ({}/{})",
                f3(s.mean_accuracy),
                c.correct(),
                c.total()
            );
            let missed: Vec<&str> = s
                .folds
                .iter()
                .filter(|f| f.accuracy() == Some(0.0))
                .map(|f| ids[f.test_indices[0]].as_str())
                .collect();
            if !missed.is_empty() {
                let _ = writeln!(out, "misclassified ids: {}", missed.join(" "));
            }
        }
        CvScheme::Kfold { .. } => {
            let _ = writeln!(out, "{:>4}  {:>5}  {:>8}", "fold", "test", "accuracy");
            for f in &s.folds {
                let acc = f.accuracy().map_or_else(|| "failed".to_string(), f3);
                let _ = writeln!(
                    out,
                    "{:>4}  {:>5}  {:>8}",
                    f.fold + 1,
                    f.test_indices.len(),
                    acc
                );
            }
            let _ = writeln!(out);
            let _ = writeln!(out, "mean accuracy: {}", f3(s.mean_accuracy));
        }
    }
    for f in s.folds.iter().filter(|f| f.error.is_some()) {
        let _ = writeln!(
            out,
            "fold {} failed: {}",
            f.fold + 1,
            f.error.as_deref().unwrap_or("")
        );
    }
    let unconverged = s.outcomes().filter(|o| !o.fit.converged).count();
    if unconverged > 0 {
        let _ = writeln!(
            out,
            "warning: {unconverged} fold fits hit the update budget"
        );
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "pooled over all folds:");
    classification_table(&mut out, &s.pooled, enc);
    let _ = writeln!(out);
    confusion_table(&mut out, &s.pooled, enc);
    leakage_note(&mut out, s.label_leakage);
    out
}

pub fn cv_csv(s: &CvSummary) -> String {
    let label = s.pipeline.label();
    let scheme = s.scheme.name();
    let mut out = String::from("pipeline,scheme,fold,test_size,accuracy,converged,error\n");
    for f in &s.folds {
        let (acc, conv) = match &f.outcome {
            Some(o) => (num(o.report.accuracy), o.fit.converged.to_string()),
            None => (String::new(), String::new()),
        };
        let err = f.error.as_deref().unwrap_or("").replace([',', '\n'], " ");
        let _ = writeln!(
            out,
            "{label},{scheme},{},{},{acc},{conv},{err}",
            f.fold + 1,
            f.test_indices.len()
        );
    }
    let _ = writeln!(
        out,
        "{label},{scheme},mean,{},{},,",
        s.pooled.confusion.total(),
        num(s.mean_accuracy)
    );
    out
}

pub fn cv_jsonl(s: &CvSummary, enc: &LabelEncoding) -> String {
    let mut out = String::new();
    for f in &s.folds {
        out.push_str(&json_line(&json!({
            "fold": f.fold + 1,
            "test_size": f.test_indices.len(),
            "accuracy": f.accuracy(),
            "converged": f.outcome.as_ref().map(|o| o.fit.converged),
            "error": f.error,
        })));
    }
    out.push_str(&json_line(&json!({
        "command": "cv",
        "pipeline": s.pipeline.label(),
        "spec": s.pipeline,
        "scheme": s.scheme,
        "mean_accuracy": s.mean_accuracy,
        "failed_folds": s.failed_folds,
        "classes": { "positive": enc.positive, "negative": enc.negative },
        "pooled": s.pooled,
        "label_leakage": s.label_leakage,
        "note": s.label_leakage.then_some(LABEL_LEAKAGE_NOTE),
    })));
    out
}

pub fn compare_plain(rows: &[CompareRow], evaluation: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{evaluation}");
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "{:<20}  {:>8}  {:>9}  {:>9}  {:>9}",
        "pipeline", "accuracy", "precision", "recall", "f1-score"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:<20}  {:>8}  {:>9}  {:>9}  {:>9}",
            r.spec.label(),
            f3(r.accuracy),
            f3(r.report.macro_precision),
            f3(r.report.macro_recall),
            f3(r.report.macro_f1)
        );
    }
    let _ = writeln!(out, "\nprecision, recall and f1-score are macro averages");
    leakage_note(&mut out, rows.iter().any(|r| r.label_leakage));
    out
}

pub fn compare_csv(rows: &[CompareRow], evaluation: &str, enc: &LabelEncoding) -> String {
    let mut out = csv_header(enc);
    for r in rows {
        out.push_str(&csv_row(
            &r.spec.label(),
            evaluation,
            r.accuracy,
            &r.report,
            r.label_leakage,
        ));
    }
    out
}

pub fn compare_jsonl(rows: &[CompareRow], evaluation: &str) -> String {
    rows.iter()
        .map(|r| {
            json_line(&json!({
                "command": "compare",
                "pipeline": r.spec.label(),
                "evaluation": evaluation,
                "spec": r.spec,
                "accuracy": r.accuracy,
                "report": r.report,
                "label_leakage": r.label_leakage,
                "note": r.label_leakage.then_some(LABEL_LEAKAGE_NOTE),
            }))
        })
        .collect()
}

pub fn holdout_label(split: &SplitSpec, train: usize, test: usize) -> String {
    holdout_text(split, train, test)
}

pub fn cv_label(scheme: &CvScheme) -> String {
    scheme_text(scheme)
}
