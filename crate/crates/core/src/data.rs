//! Loading the Wisconsin diagnostic breast-cancer CSV (UCI `wdbc.data`
//! layout), a generic labelled-CSV loader, and z-score standardization.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Binary class label; `Positive` is `+1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    #[inline]
    pub fn sign(self) -> f64 {
        match self {
            Label::Positive => 1.0,
            Label::Negative => -1.0,
        }
    }

    /// Maps a decision value to a label; zero goes to `Positive`.
    #[inline]
    pub fn from_decision(value: f64) -> Self {
        if value >= 0.0 {
            Label::Positive
        } else {
            Label::Negative
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Positive => "+1",
            Label::Negative => "-1",
        })
    }
}

/// Feature matrix plus one label per row.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledData {
    pub features: Matrix,
    pub labels: Vec<Label>,
}

impl LabeledData {
    pub fn new(features: Matrix, labels: Vec<Label>) -> Result<Self> {
        if features.rows() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: features.rows(),
                got: labels.len(),
            });
        }
        Ok(Self { features, labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features.cols()
    }

    pub fn subset(&self, indices: &[usize]) -> Self {
        Self {
            features: self.features.select_rows(indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
        }
    }

    /// Rows carrying `label`, in order.
    pub fn class_rows(&self, label: Label) -> Matrix {
        let idx: Vec<usize> = (0..self.len())
            .filter(|&i| self.labels[i] == label)
            .collect();
        self.features.select_rows(&idx)
    }

    pub fn count(&self, label: Label) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }

    /// Concatenation of `self` and `other`.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        let mut data = self.features.as_slice().to_vec();
        data.extend_from_slice(other.features.as_slice());
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&other.labels);
        Self::new(
            Matrix::new(self.len() + other.len(), self.dim(), data)?,
            labels,
        )
    }
}

/// Which raw class string becomes `+1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LabelEncoding {
    pub positive: String,
    pub negative: String,
}

impl Default for LabelEncoding {
    /// Benign `B` is `+1`, malignant `M` is `-1`.
    fn default() -> Self {
        Self {
            positive: "B".into(),
            negative: "M".into(),
        }
    }
}

impl LabelEncoding {
    pub fn swapped(&self) -> Self {
        Self {
            positive: self.negative.clone(),
            negative: self.positive.clone(),
        }
    }

    pub fn encode(&self, raw: &str) -> Option<Label> {
        if raw == self.positive {
            Some(Label::Positive)
        } else if raw == self.negative {
            Some(Label::Negative)
        } else {
            None
        }
    }

    pub fn name(&self, label: Label) -> &str {
        match label {
            Label::Positive => &self.positive,
            Label::Negative => &self.negative,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub ids: Vec<String>,
    pub data: LabeledData,
    pub encoding: LabelEncoding,
    pub feature_names: Vec<String>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.data.dim()
    }
}

pub const WDBC_FEATURES: usize = 30;
const WDBC_COLUMNS: usize = WDBC_FEATURES + 2;

const WDBC_BASE_NAMES: [&str; 10] = [
    "radius",
    "texture",
    "perimeter",
    "area",
    "smoothness",
    "compactness",
    "concavity",
    "concave_points",
    "symmetry",
    "fractal_dimension",
];

pub fn wdbc_feature_names() -> Vec<String> {
    ["mean", "se", "worst"]
        .iter()
        .flat_map(|stat| WDBC_BASE_NAMES.iter().map(move |b| format!("{b}_{stat}")))
        .collect()
}

/// Non-empty CSV records with their 1-based line numbers, fields trimmed.
fn records(text: &str) -> Result<Vec<(usize, csv::StringRecord)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record?;
        let row = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        out.push((row, record));
    }
    Ok(out)
}

fn is_id(field: &str) -> bool {
    !field.is_empty() && field.bytes().all(|b| b.is_ascii_digit())
}

pub fn load_wdbc(path: impl AsRef<Path>, encoding: &LabelEncoding) -> Result<Dataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_wdbc(&text, encoding)
}

/// Parses `id,diagnosis,f1..f30` records. A first line whose leading field
/// is neither a number nor an integer id is treated as a header. Row and
/// column numbers in errors are 1-based.
pub fn parse_wdbc(text: &str, encoding: &LabelEncoding) -> Result<Dataset> {
    let mut ids = Vec::new();
    let mut labels = Vec::new();
    let mut values = Vec::new();
    for (pos, (row, fields)) in records(text)?.into_iter().enumerate() {
        if pos == 0 && !is_id(&fields[0]) && fields[0].parse::<f64>().is_err() {
            continue;
        }
        if fields.len() != WDBC_COLUMNS {
            return Err(Error::MalformedRow {
                row,
                expected: WDBC_COLUMNS,
                found: fields.len(),
            });
        }
        let label = encoding
            .encode(&fields[1])
            .ok_or_else(|| Error::UnknownLabel {
                row,
                label: fields[1].to_string(),
            })?;
        for (col, field) in fields.iter().enumerate().skip(2) {
            values.push(parse_feature(field, row, col + 1)?);
        }
        ids.push(fields[0].to_string());
        labels.push(label);
    }
    let n = labels.len();
    let features = Matrix::new(n, WDBC_FEATURES, values)?;
    finish(
        ids,
        LabeledData::new(features, labels)?,
        encoding.clone(),
        wdbc_feature_names(),
    )
}

fn parse_feature(field: &str, row: usize, col: usize) -> Result<f64> {
    match field.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::NonNumericFeature {
            row,
            col,
            value: field.to_string(),
        }),
    }
}

fn finish(
    ids: Vec<String>,
    data: LabeledData,
    encoding: LabelEncoding,
    feature_names: Vec<String>,
) -> Result<Dataset> {
    for label in [Label::Positive, Label::Negative] {
        if data.count(label) == 0 {
            return Err(Error::EmptyClass(label));
        }
    }
    Ok(Dataset {
        ids,
        data,
        encoding,
        feature_names,
    })
}

/// Writes a dataset back in the 32-column layout. Floats use the shortest
/// representation that parses back to the same value.
pub fn write_wdbc<W: Write>(ds: &Dataset, mut out: W) -> std::io::Result<()> {
    for (i, id) in ds.ids.iter().enumerate() {
        write!(out, "{id},{}", ds.encoding.name(ds.data.labels[i]))?;
        for v in ds.data.features.row(i) {
            write!(out, ",{v}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Generic loader: a header row is required, `label_column` names the class
/// column, every other column must be numeric. Rows get their 1-based line
/// number as id.
pub fn parse_labeled_csv(
    text: &str,
    label_column: &str,
    encoding: &LabelEncoding,
) -> Result<Dataset> {
    let mut rows = records(text)?.into_iter();
    let Some((_, header)) = rows.next() else {
        return Err(Error::EmptyInput { needed: 1, got: 0 });
    };
    let label_idx = header
        .iter()
        .position(|h| h == label_column)
        .ok_or_else(|| Error::InvalidParameter(format!("no column named {label_column:?}")))?;
    let feature_names: Vec<String> = header
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != label_idx)
        .map(|(_, h)| h.to_string())
        .collect();
    let d = feature_names.len();

    let mut ids = Vec::new();
    let mut labels = Vec::new();
    let mut values = Vec::new();
    for (row, fields) in rows {
        if fields.len() != header.len() {
            return Err(Error::MalformedRow {
                row,
                expected: header.len(),
                found: fields.len(),
            });
        }
        let label = encoding
            .encode(&fields[label_idx])
            .ok_or_else(|| Error::UnknownLabel {
                row,
                label: fields[label_idx].to_string(),
            })?;
        for (col, field) in fields.iter().enumerate() {
            if col != label_idx {
                values.push(parse_feature(field, row, col + 1)?);
            }
        }
        ids.push(row.to_string());
        labels.push(label);
    }
    let features = Matrix::new(labels.len(), d, values)?;
    finish(
        ids,
        LabeledData::new(features, labels)?,
        encoding.clone(),
        feature_names,
    )
}

pub fn load_labeled_csv(
    path: impl AsRef<Path>,
    label_column: &str,
    encoding: &LabelEncoding,
) -> Result<Dataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_labeled_csv(&text, label_column, encoding)
}

/// Per-feature z-score parameters (sample deviation, divisor `n - 1`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub deviation: Vec<f64>,
}

impl Standardizer {
    pub fn fit(features: &Matrix) -> Result<Self> {
        let n = features.rows();
        if n < 2 {
            return Err(Error::EmptyInput { needed: 2, got: n });
        }
        let mean = features.column_means();
        let mut var = vec![0.0; features.cols()];
        for row in features.row_iter() {
            for ((v, x), m) in var.iter_mut().zip(row).zip(&mean) {
                *v += (x - m) * (x - m);
            }
        }
        let deviation = var.iter().map(|v| (v / (n - 1) as f64).sqrt()).collect();
        Ok(Self { mean, deviation })
    }

    /// Zero-deviation features pass through untouched.
    pub fn apply(&self, features: &Matrix) -> Result<Matrix> {
        let d = self.mean.len();
        if features.cols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: features.cols(),
            });
        }
        features.map_rows(d, |row| {
            Ok(row
                .iter()
                .zip(self.mean.iter().zip(&self.deviation))
                .map(|(&x, (&m, &s))| if s > 0.0 { (x - m) / s } else { x })
                .collect())
        })
    }
}

pub fn standardize(data: &LabeledData) -> Result<(LabeledData, Standardizer)> {
    let params = Standardizer::fit(&data.features)?;
    let features = params.apply(&data.features)?;
    Ok((
        LabeledData {
            features,
            labels: data.labels.clone(),
        },
        params,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(id: &str, label: &str, n: usize) -> String {
        let mut s = format!("{id},{label}");
        for k in 0..n {
            s.push_str(&format!(",{}.5", k + 1));
        }
        s
    }

    #[test]
    fn parses_rows_and_encodes_labels() {
        let text = format!(
            "{}\n{}\n{}\n",
            row("1", "M", 30),
            row("2", "B", 30),
            row("3", "B", 30)
        );
        let ds = parse_wdbc(&text, &LabelEncoding::default()).unwrap();
        assert_eq!(ds.len(), 3);
        assert_eq!(ds.dim(), 30);
        assert_eq!(
            ds.data.labels,
            vec![Label::Negative, Label::Positive, Label::Positive]
        );
        assert_eq!(ds.ids, vec!["1", "2", "3"]);
        assert_eq!(ds.data.features.get(0, 29), 30.5);

        let swapped = parse_wdbc(&text, &LabelEncoding::default().swapped()).unwrap();
        assert_eq!(swapped.data.labels[0], Label::Positive);
    }

    #[test]
    fn header_row_is_skipped() {
        let mut header = String::from("id,diagnosis");
        for name in wdbc_feature_names() {
            header.push(',');
            header.push_str(&name);
        }
        let text = format!("{header}\n{}\n{}\n", row("1", "M", 30), row("2", "B", 30));
        let ds = parse_wdbc(&text, &LabelEncoding::default()).unwrap();
        assert_eq!(ds.len(), 2);
    }

    #[test]
    fn short_row_reports_its_line() {
        let text = format!("{}\n{}\n", row("1", "M", 30), row("2", "B", 29));
        assert!(matches!(
            parse_wdbc(&text, &LabelEncoding::default()),
            Err(Error::MalformedRow {
                row: 2,
                expected: 32,
                found: 31
            })
        ));
    }

    #[test]
    fn unknown_label_and_bad_number() {
        let text = format!("{}\n{}\n", row("1", "M", 30), row("2", "X", 30));
        assert!(matches!(
            parse_wdbc(&text, &LabelEncoding::default()),
            Err(Error::UnknownLabel { row: 2, .. })
        ));
        let bad = row("1", "M", 30).replace(",3.5,", ",abc,");
        assert!(matches!(
            parse_wdbc(&bad, &LabelEncoding::default()),
            Err(Error::NonNumericFeature { row: 1, col: 5, .. })
        ));
    }

    #[test]
    fn single_class_file_is_rejected() {
        let text = format!("{}\n{}\n", row("1", "M", 30), row("2", "M", 30));
        assert!(matches!(
            parse_wdbc(&text, &LabelEncoding::default()),
            Err(Error::EmptyClass(Label::Positive))
        ));
    }

    #[test]
    fn write_then_parse_preserves_values() {
        let text = "7,M,0.1,0.30000000000000004,1e-7,123456.789,2,3,4,5,6,7,8,9,10,11,12,13,14,15,16,17,18,19,20,21,22,23,24,25,26,27\n8,B,1,2,3,4,5,6,7,8,9,10,11,12,13,14,15,16,17,18,19,20,21,22,23,24,25,26,27,28,29,30\n";
        let ds = parse_wdbc(text, &LabelEncoding::default()).unwrap();
        let mut buf = Vec::new();
        write_wdbc(&ds, &mut buf).unwrap();
        let again = parse_wdbc(
            std::str::from_utf8(&buf).unwrap(),
            &LabelEncoding::default(),
        )
        .unwrap();
        assert_eq!(again, ds);
    }

    #[test]
    fn generic_csv_loader() {
        let text = "x,class,y\n1.0,pos,2.0\n-1.0,neg,-2.0\n";
        let enc = LabelEncoding {
            positive: "pos".into(),
            negative: "neg".into(),
        };
        let ds = parse_labeled_csv(text, "class", &enc).unwrap();
        assert_eq!(ds.feature_names, vec!["x", "y"]);
        assert_eq!(ds.data.features.row(1), &[-1.0, -2.0]);
        assert_eq!(ds.data.labels, vec![Label::Positive, Label::Negative]);
        assert!(parse_labeled_csv(text, "label", &enc).is_err());
    }

    #[test]
    fn standardize_two_points() {
        let data = LabeledData::new(
            Matrix::from_rows(&[[0.0, 5.0], [2.0, 5.0]]).unwrap(),
            vec![Label::Positive, Label::Negative],
        )
        .unwrap();
        let (z, params) = standardize(&data).unwrap();
        assert!((params.deviation[0] - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(params.deviation[1], 0.0);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((z.features.get(0, 0) + h).abs() < 1e-15);
        assert!((z.features.get(1, 0) - h).abs() < 1e-15);
        // constant column is left as is
        assert_eq!(z.features.get(0, 1), 5.0);
        // stored parameters reproduce the training transform exactly
        assert_eq!(params.apply(&data.features).unwrap(), z.features);
    }

    #[test]
    fn standardize_is_idempotent() {
        let data = LabeledData::new(
            Matrix::from_rows(&[[1.0, -3.0], [4.0, 0.5], [2.5, 7.0], [-1.0, 2.0]]).unwrap(),
            vec![
                Label::Positive,
                Label::Negative,
                Label::Positive,
                Label::Negative,
            ],
        )
        .unwrap();
        let (once, _) = standardize(&data).unwrap();
        let (twice, _) = standardize(&once).unwrap();
        for (a, b) in once
            .features
            .as_slice()
            .iter()
            .zip(twice.features.as_slice())
        {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
