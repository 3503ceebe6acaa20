use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cholesky_svm::data::{load_labeled_csv, load_wdbc, Dataset, LabelEncoding};
use cholesky_svm::eval::{CvScheme, PipelineMode, PipelineSpec, SplitSpec};
use cholesky_svm::svm::{Hyperparams, KernelSpec};

#[derive(Debug, Parser)]
#[command(
    name = "cholesky-svm",
    version,
    about = "SVM classification with per-class Cholesky whitening"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit on one train/test split and report per-class metrics.
    Evaluate(Options),
    /// Cross-validate one pipeline.
    Cv(Options),
    /// Every baseline kernel and both whitening pipelines on the same folds.
    Compare(Options),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Baseline,
    PopulationCholesky,
    ExpectedCholesky,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelName {
    Linear,
    Rbf,
    Poly,
    Sigmoid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeName {
    Holdout,
    Loocv,
    Kfold,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Plain,
    Csv,
    Jsonl,
}

#[derive(Debug, Clone, Args)]
pub struct Options {
    /// WDBC file (id, diagnosis, 30 features) or, with --label-column, a
    /// CSV with a header row.
    #[arg(long, default_value = "data/wdbc.data")]
    pub data: PathBuf,
    /// Name of the label column in a generic CSV file.
    #[arg(long)]
    pub label_column: Option<String>,
    /// Raw label mapped to +1.
    #[arg(long, default_value = "B")]
    pub positive_label: String,
    /// Raw label mapped to -1.
    #[arg(long, default_value = "M")]
    pub negative_label: String,
    #[arg(long, value_enum, default_value_t = Mode::Baseline)]
    pub mode: Mode,
    #[arg(long, value_enum)]
    pub kernel: Option<KernelName>,
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    /// Kernel coefficient; defaults to 1 / (d · Var(X)).
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, default_value_t = 3)]
    pub degree: u32,
    #[arg(long, default_value_t = 0.0)]
    pub coef0: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
    #[arg(long, default_value_t = 0.2)]
    pub test_fraction: f64,
    /// Defaults to holdout for evaluate and compare, kfold for cv.
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeName>,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Subtract class means before whitening.
    #[arg(long)]
    pub center: bool,
    /// z-score features with training statistics.
    #[arg(long)]
    pub standardize: bool,
    #[arg(long, value_enum, default_value_t = Format::Plain)]
    pub format: Format,
    /// Write here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scheme {
    Holdout(SplitSpec),
    Cv(CvScheme),
}

/// Everything a command needs, validated.
#[derive(Debug)]
pub struct RunConfig {
    pub dataset: Dataset,
    pub pipeline: PipelineSpec,
    pub scheme: Scheme,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub warnings: Vec<String>,
}

/// Rejected before any fitting; exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl Options {
    fn kernel_spec(&self) -> KernelSpec {
        match self.kernel.unwrap_or(KernelName::Linear) {
            KernelName::Linear => KernelSpec::Linear,
            KernelName::Rbf => KernelSpec::Rbf { gamma: self.gamma },
            KernelName::Poly => KernelSpec::Poly {
                degree: self.degree,
                gamma: self.gamma,
                coef0: self.coef0,
            },
            KernelName::Sigmoid => KernelSpec::Sigmoid {
                gamma: self.gamma,
                coef0: self.coef0,
            },
        }
    }

    pub fn resolve(&self, command: &Command) -> Result<RunConfig, ConfigError> {
        let err = |e: cholesky_svm::Error| ConfigError(e.to_string());
        let mut warnings = Vec::new();

        let mode = match self.mode {
            Mode::Baseline => PipelineMode::Baseline,
            Mode::PopulationCholesky => PipelineMode::PopulationCholesky,
            Mode::ExpectedCholesky => PipelineMode::ExpectedCholesky,
        };
        let is_compare = matches!(command, Command::Compare(_));
        if mode != PipelineMode::Baseline && self.kernel.is_some() && !is_compare {
            warnings.push(format!(
                "--kernel is ignored in {} mode (linear SVM on whitened features)",
                mode.name()
            ));
        }
        let hyperparams = Hyperparams {
            c: self.c,
            tol: self.tol,
            kernel: self.kernel_spec(),
            seed: self.seed,
            ..Hyperparams::default()
        };
        hyperparams.validate().map_err(err)?;
        let pipeline = PipelineSpec {
            center: self.center,
            standardize: self.standardize,
            ..PipelineSpec::new(mode).with_hyperparams(hyperparams)
        };

        let encoding = LabelEncoding {
            positive: self.positive_label.clone(),
            negative: self.negative_label.clone(),
        };
        if encoding.positive == encoding.negative {
            return Err(ConfigError(
                "--positive-label and --negative-label must differ".into(),
            ));
        }
        let dataset = match &self.label_column {
            Some(column) => load_labeled_csv(&self.data, column, &encoding),
            None => load_wdbc(&self.data, &encoding),
        }
        .map_err(|e| ConfigError(format!("cannot load data: {e}")))?;
        let n = dataset.len();

        let default_scheme = match command {
            Command::Cv(_) => SchemeName::Kfold,
            _ => SchemeName::Holdout,
        };
        let scheme = match self.scheme.unwrap_or(default_scheme) {
            SchemeName::Holdout => {
                if matches!(command, Command::Cv(_)) {
                    return Err(ConfigError(
                        "cv needs --scheme loocv or --scheme kfold".into(),
                    ));
                }
                let split = SplitSpec {
                    test_fraction: self.test_fraction,
                    stratified: true,
                    seed: self.seed,
                };
                split.validate().map_err(err)?;
                Scheme::Holdout(split)
            }
            SchemeName::Loocv => Scheme::Cv(CvScheme::Loocv),
            SchemeName::Kfold => Scheme::Cv(CvScheme::kfold(self.k, self.seed)),
        };
        if let Scheme::Cv(cv) = &scheme {
            cv.validate(n).map_err(err)?;
        }
        if matches!(command, Command::Evaluate(_)) && !matches!(scheme, Scheme::Holdout(_)) {
            return Err(ConfigError(
                "evaluate uses a holdout split; use cv for loocv or kfold".into(),
            ));
        }

        Ok(RunConfig {
            dataset,
            pipeline,
            scheme,
            format: self.format,
            out: self.out.clone(),
            warnings,
        })
    }
}

impl Command {
    pub fn options(&self) -> &Options {
        match self {
            Command::Evaluate(o) | Command::Cv(o) | Command::Compare(o) => o,
        }
    }
}
