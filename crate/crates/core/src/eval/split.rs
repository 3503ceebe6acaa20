use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::data::Label;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SplitSpec {
    pub test_fraction: f64,
    pub stratified: bool,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            test_fraction: 0.2,
            stratified: true,
            seed: 0,
        }
    }
}

impl SplitSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "test fraction must lie in (0, 1), got {}",
                self.test_fraction
            )));
        }
        Ok(())
    }
}

/// Sorted train and test index lists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

pub(crate) fn class_indices(labels: &[Label], label: Label) -> Vec<usize> {
    (0..labels.len()).filter(|&i| labels[i] == label).collect()
}

/// Holds out `round(n · test_fraction)` samples. With stratification the
/// total is shared between classes by largest remainder (ties go to the
/// larger class, then to `+1`), so each class's test share is within one
/// sample of the fraction.
pub fn stratified_split(labels: &[Label], spec: &SplitSpec) -> Result<Split> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = labels.len();
    let n_test = (n as f64 * spec.test_fraction).round() as usize;

    let mut test = Vec::with_capacity(n_test);
    if spec.stratified {
        let mut classes = Vec::new();
        for label in [Label::Positive, Label::Negative] {
            let idx = class_indices(labels, label);
            if idx.len() < 2 {
                return Err(Error::ClassTooSmall {
                    label,
                    count: idx.len(),
                });
            }
            classes.push(idx);
        }
        let exact: Vec<f64> = classes
            .iter()
            .map(|c| c.len() as f64 * n_test as f64 / n as f64)
            .collect();
        let mut quota: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
        let mut rank: Vec<usize> = (0..classes.len()).collect();
        rank.sort_by(|&a, &b| {
            let fa = exact[a] - exact[a].floor();
            let fb = exact[b] - exact[b].floor();
            fb.total_cmp(&fa)
                .then(classes[b].len().cmp(&classes[a].len()))
                .then(a.cmp(&b))
        });
        let mut left = n_test - quota.iter().sum::<usize>();
        for &k in rank.iter().cycle() {
            if left == 0 {
                break;
            }
            quota[k] += 1;
            left -= 1;
        }
        for (mut idx, q) in classes.into_iter().zip(quota) {
            idx.shuffle(&mut rng);
            test.extend_from_slice(&idx[..q.min(idx.len())]);
        }
    } else {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(&mut rng);
        test.extend_from_slice(&idx[..n_test]);
    }
    test.sort_unstable();
    let mut in_test = vec![false; n];
    for &i in &test {
        in_test[i] = true;
    }
    let train = (0..n).filter(|&i| !in_test[i]).collect();
    Ok(Split { train, test })
}
