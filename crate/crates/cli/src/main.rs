mod config;
mod output;
mod report;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use cholesky_svm::eval::{cross_validate, run_pipeline, stratified_split, PipelineSpec};
use cholesky_svm::svm::KernelSpec;

use config::{Cli, Command, Format, RunConfig, Scheme};
use report::{CompareRow, Holdout};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match cli.command.options().resolve(&cli.command) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    for w in &cfg.warnings {
        eprintln!("warning: {w}");
    }
    let text = match run(&cli.command, &cfg) {
        Ok(text) => text,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let written = match &cfg.out {
        Some(path) => output::write_atomic(path, &text)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| e.to_string()),
    };
    match written {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(command: &Command, cfg: &RunConfig) -> cholesky_svm::Result<String> {
    match command {
        Command::Evaluate(_) => evaluate(cfg),
        Command::Cv(_) => cv(cfg),
        Command::Compare(_) => compare(cfg),
    }
}

fn evaluate(cfg: &RunConfig) -> cholesky_svm::Result<String> {
    let Scheme::Holdout(split_spec) = &cfg.scheme else {
        unreachable!("validated in RunConfig")
    };
    let data = &cfg.dataset.data;
    let split = stratified_split(&data.labels, split_spec)?;
    let outcome = run_pipeline(
        &data.subset(&split.train),
        &data.subset(&split.test),
        &cfg.pipeline,
    )?;
    let h = Holdout {
        spec: &cfg.pipeline,
        split: split_spec,
        train_size: split.train.len(),
        outcome: &outcome,
    };
    let enc = &cfg.dataset.encoding;
    Ok(match cfg.format {
        Format::Plain => report::evaluate_plain(&h, enc),
        Format::Csv => report::evaluate_csv(&h, enc),
        Format::Jsonl => report::evaluate_jsonl(&h, enc),
    })
}

fn cv(cfg: &RunConfig) -> cholesky_svm::Result<String> {
    let Scheme::Cv(scheme) = &cfg.scheme else {
        unreachable!("validated in RunConfig")
    };
    let summary = cross_validate(&cfg.dataset.data, scheme, &cfg.pipeline)?;
    let enc = &cfg.dataset.encoding;
    Ok(match cfg.format {
        Format::Plain => report::cv_plain(&summary, enc, &cfg.dataset.ids),
        Format::Csv => report::cv_csv(&summary),
        Format::Jsonl => report::cv_jsonl(&summary, enc),
    })
}

/// The four baseline kernels followed by both whitening pipelines, all
/// sharing the configured c, tolerance, seed and preprocessing.
fn compare_specs(base: &PipelineSpec) -> Vec<PipelineSpec> {
    let hp = base.hyperparams;
    let gamma = match hp.kernel {
        KernelSpec::Rbf { gamma }
        | KernelSpec::Poly { gamma, .. }
        | KernelSpec::Sigmoid { gamma, .. } => gamma,
        KernelSpec::Linear => None,
    };
    let (degree, coef0) = match hp.kernel {
        KernelSpec::Poly { degree, coef0, .. } => (degree, coef0),
        KernelSpec::Sigmoid { coef0, .. } => (3, coef0),
        _ => (3, 0.0),
    };
    let kernels = [
        KernelSpec::Linear,
        KernelSpec::Rbf { gamma },
        KernelSpec::Poly {
            degree,
            gamma,
            coef0,
        },
        KernelSpec::Sigmoid { gamma, coef0 },
    ];
    let mut specs: Vec<PipelineSpec> = kernels
        .into_iter()
        .map(|kernel| PipelineSpec {
            hyperparams: hp.with_kernel(kernel),
            ..PipelineSpec::baseline(kernel)
        })
        .collect();
    for whitened in [
        PipelineSpec::population_cholesky(),
        PipelineSpec::expected_cholesky(),
    ] {
        specs.push(PipelineSpec {
            hyperparams: hp.with_kernel(KernelSpec::Linear),
            center: base.center,
            ..whitened
        });
    }
    for spec in &mut specs {
        spec.standardize = base.standardize;
    }
    specs
}

fn compare(cfg: &RunConfig) -> cholesky_svm::Result<String> {
    let data = &cfg.dataset.data;
    let specs = compare_specs(&cfg.pipeline);
    let (rows, tag, heading) = match &cfg.scheme {
        Scheme::Holdout(split_spec) => {
            let split = stratified_split(&data.labels, split_spec)?;
            let (train, test) = (data.subset(&split.train), data.subset(&split.test));
            let rows = specs
                .into_iter()
                .map(|spec| {
                    let o = run_pipeline(&train, &test, &spec)?;
                    Ok(CompareRow {
                        spec,
                        accuracy: o.report.accuracy,
                        report: o.report,
                        label_leakage: o.label_leakage,
                    })
                })
                .collect::<cholesky_svm::Result<Vec<_>>>()?;
            (
                rows,
                "holdout".to_string(),
                report::holdout_label(split_spec, split.train.len(), split.test.len()),
            )
        }
        Scheme::Cv(scheme) => {
            let rows = specs
                .into_iter()
                .map(|spec| {
                    let s = cross_validate(data, scheme, &spec)?;
                    Ok(CompareRow {
                        spec,
                        accuracy: s.mean_accuracy,
                        report: s.pooled,
                        label_leakage: s.label_leakage,
                    })
                })
                .collect::<cholesky_svm::Result<Vec<_>>>()?;
            (
                rows,
                scheme.name(),
                format!(
                    "{} (accuracy is the fold mean, other columns pooled)",
                    report::cv_label(scheme)
                ),
            )
        }
    };
    let enc = &cfg.dataset.encoding;
    Ok(match cfg.format {
        Format::Plain => report::compare_plain(&rows, &heading),
        Format::Csv => report::compare_csv(&rows, &tag, enc),
        Format::Jsonl => report::compare_jsonl(&rows, &tag),
    })
}
