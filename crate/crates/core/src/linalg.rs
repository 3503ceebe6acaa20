//! Dense linear algebra for the whitening pipeline: covariance estimation,
//! Cholesky factorization with ridge escalation, triangular inversion and
//! the Mahalanobis quadratic form.
//!
//! Matrices are small (feature dimension is 30 for the diagnostic data), so
//! everything is stored densely in row-major `Vec<f64>`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Dense row-major matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput {
                row: pos / cols.max(1),
                col: pos % cols.max(1),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::new(rows.len(), cols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.data[i * dim + i] = 1.0;
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[f64]> + '_ {
        // chunks_exact(0) panics, and a zero-column matrix has no meaningful rows anyway
        self.data.chunks_exact(self.cols.max(1)).take(self.rows)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    /// New matrix made of the given rows, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> Self {
        let mut data = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        Self {
            rows: indices.len(),
            cols: self.cols,
            data,
        }
    }

    /// Applies `f` to every row, producing a matrix with `out_cols` columns.
    pub fn map_rows<F>(&self, out_cols: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(&[f64]) -> Result<Vec<f64>>,
    {
        let mut data = Vec::with_capacity(self.rows * out_cols);
        for row in self.row_iter() {
            let mapped = f(row)?;
            if mapped.len() != out_cols {
                return Err(Error::DimensionMismatch {
                    expected: out_cols,
                    got: mapped.len(),
                });
            }
            data.extend(mapped);
        }
        Self::new(self.rows, out_cols, data)
    }

    pub fn column_means(&self) -> Vec<f64> {
        let mut mean = vec![0.0; self.cols];
        for row in self.row_iter() {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        let n = self.rows as f64;
        mean.iter_mut().for_each(|m| *m /= n);
        mean
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: other.rows,
            });
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.get(i, j);
            }
        }
        out
    }
}

/// Which denominator a covariance estimate uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Divisor {
    /// Divide by `n`.
    Population,
    /// Divide by `n - 1`.
    Sample,
}

impl Divisor {
    fn min_samples(self) -> usize {
        match self {
            Divisor::Population => 1,
            Divisor::Sample => 2,
        }
    }
}

/// Symmetric positive semi-definite covariance estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    dim: usize,
    data: Vec<f64>,
    divisor: Divisor,
}

impl CovarianceMatrix {
    /// Wraps an explicit symmetric matrix, e.g. a known population covariance.
    pub fn from_matrix(m: &Matrix, divisor: Divisor) -> Result<Self> {
        let dim = m.rows();
        if m.cols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: m.cols(),
            });
        }
        let scale = m.as_slice().iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        for i in 0..dim {
            if m.get(i, i) < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "covariance diagonal entry {i} is negative"
                )));
            }
            for j in 0..i {
                if (m.get(i, j) - m.get(j, i)).abs() > 1e-12 * scale {
                    return Err(Error::InvalidParameter(format!(
                        "covariance is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self {
            dim,
            data: m.as_slice().to_vec(),
            divisor,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn divisor(&self) -> Divisor {
        self.divisor
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn mean_diagonal(&self) -> f64 {
        if self.dim == 0 {
            return 0.0;
        }
        (0..self.dim).map(|i| self.get(i, i)).sum::<f64>() / self.dim as f64
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix {
            rows: self.dim,
            cols: self.dim,
            data: self.data.clone(),
        }
    }
}

/// Lower-triangular square matrix with a strictly positive diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerTriangular {
    dim: usize,
    data: Vec<f64>,
}

impl LowerTriangular {
    /// Validates the shape invariants: zero upper triangle, positive diagonal.
    pub fn from_matrix(m: &Matrix) -> Result<Self> {
        let dim = m.rows();
        if m.cols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: m.cols(),
            });
        }
        for i in 0..dim {
            if m.get(i, i) <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "diagonal entry {i} of a triangular factor must be positive"
                )));
            }
            for j in i + 1..dim {
                if m.get(i, j) != 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "entry ({i}, {j}) above the diagonal is non-zero"
                    )));
                }
            }
        }
        Ok(Self {
            dim,
            data: m.as_slice().to_vec(),
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            data: Matrix::identity(dim).into_vec(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix {
            rows: self.dim,
            cols: self.dim,
            data: self.data.clone(),
        }
    }

    /// `self · x`, touching only the lower triangle.
    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x.len())?;
        Ok((0..self.dim)
            .map(|i| {
                let row = &self.data[i * self.dim..i * self.dim + i + 1];
                row.iter().zip(x).map(|(a, b)| a * b).sum()
            })
            .collect())
    }

    /// `selfᵀ · x`.
    pub fn transpose_mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x.len())?;
        let mut out = vec![0.0; self.dim];
        for (i, &xi) in x.iter().enumerate() {
            for (j, o) in out.iter_mut().enumerate().take(i + 1) {
                *o += self.get(i, j) * xi;
            }
        }
        Ok(out)
    }

    /// Solves `self · z = b` by forward substitution.
    pub fn forward_solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        self.check_len(b.len())?;
        let mut z = vec![0.0; self.dim];
        for i in 0..self.dim {
            let row = &self.data[i * self.dim..i * self.dim + i];
            let s: f64 = row.iter().zip(&z).map(|(a, b)| a * b).sum();
            z[i] = (b[i] - s) / self.get(i, i);
        }
        Ok(z)
    }

    /// Entrywise `weight · a + (1 - weight) · b`. Positive diagonals are kept
    /// for any weight in `[0, 1]`.
    pub(crate) fn convex_combination(a: &Self, b: &Self, weight: f64) -> Result<Self> {
        if a.dim != b.dim {
            return Err(Error::DimensionMismatch {
                expected: a.dim,
                got: b.dim,
            });
        }
        let data = a
            .data
            .iter()
            .zip(&b.data)
            .map(|(x, y)| weight * x + (1.0 - weight) * y)
            .collect();
        Ok(Self { dim: a.dim, data })
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: len,
            });
        }
        Ok(())
    }
}

/// Ridge escalation schedule for factoring near-singular covariances.
///
/// `initial` and `ceiling` are relative to the mean diagonal of the matrix
/// being factored; rungs are `initial · growth^k` up to and including the
/// ceiling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JitterPolicy {
    initial: f64,
    growth: f64,
    ceiling: f64,
}

impl Default for JitterPolicy {
    fn default() -> Self {
        Self {
            initial: 1e-8,
            growth: 10.0,
            ceiling: 1e-2,
        }
    }
}

impl JitterPolicy {
    pub fn new(initial: f64, growth: f64, ceiling: f64) -> Result<Self> {
        if !(initial > 0.0 && initial <= ceiling && growth > 1.0 && ceiling.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "jitter policy needs 0 < initial <= ceiling and growth > 1 \
                 (got initial {initial}, growth {growth}, ceiling {ceiling})"
            )));
        }
        Ok(Self {
            initial,
            growth,
            ceiling,
        })
    }

    pub fn initial(&self) -> f64 {
        self.initial
    }

    pub fn growth(&self) -> f64 {
        self.growth
    }

    pub fn ceiling(&self) -> f64 {
        self.ceiling
    }

    /// Absolute jitter values to try, for a matrix with the given mean diagonal.
    fn rungs(&self, scale: f64) -> Vec<f64> {
        let mut out = Vec::new();
        let ceiling = self.ceiling * scale;
        let mut rel = self.initial;
        while rel <= self.ceiling {
            out.push(rel * scale);
            rel *= self.growth;
        }
        if out.last().is_some_and(|&last| last < ceiling) {
            out.push(ceiling);
        }
        out
    }
}

/// Covariance of the rows of `samples`, computed in two passes (mean, then
/// centered cross products).
pub fn covariance(samples: &Matrix, divisor: Divisor) -> Result<CovarianceMatrix> {
    let n = samples.rows();
    let d = samples.cols();
    if n < divisor.min_samples() || d == 0 {
        return Err(Error::EmptyInput {
            needed: divisor.min_samples(),
            got: n,
        });
    }
    let mean = samples.column_means();
    let mut acc = vec![0.0; d * d];
    let mut centered = vec![0.0; d];
    for row in samples.row_iter() {
        for ((c, x), m) in centered.iter_mut().zip(row).zip(&mean) {
            *c = x - m;
        }
        for i in 0..d {
            let ci = centered[i];
            for j in 0..=i {
                acc[i * d + j] += ci * centered[j];
            }
        }
    }
    let denom = match divisor {
        Divisor::Population => n as f64,
        Divisor::Sample => (n - 1) as f64,
    };
    for i in 0..d {
        for j in 0..=i {
            let v = acc[i * d + j] / denom;
            acc[i * d + j] = v;
            acc[j * d + i] = v;
        }
    }
    Ok(CovarianceMatrix {
        dim: d,
        data: acc,
        divisor,
    })
}

/// Plain Cholesky–Banachiewicz factorization of `cov + jitter·I`.
///
/// A pivot counts as positive only above `dim · ε · max_diag`.
fn factor_with_jitter(cov: &CovarianceMatrix, jitter: f64) -> Option<LowerTriangular> {
    let n = cov.dim;
    let max_diag = (0..n).map(|i| cov.get(i, i) + jitter).fold(0.0, f64::max);
    let threshold = n as f64 * f64::EPSILON * max_diag;
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = cov.get(i, j);
            if i == j {
                s += jitter;
            }
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if s.is_nan() || s <= threshold {
                    return None;
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Some(LowerTriangular { dim: n, data: l })
}

/// Factors `cov` with no regularization.
pub fn cholesky_exact(cov: &CovarianceMatrix) -> Result<LowerTriangular> {
    factor_with_jitter(cov, 0.0).ok_or(Error::NotPositiveDefinite {
        ceiling: 0.0,
        class: None,
    })
}

/// Factors `cov + jitter·I`, trying zero jitter first and then each rung
/// of `policy`. Returns the factor and the jitter that was applied.
pub fn cholesky(cov: &CovarianceMatrix, policy: &JitterPolicy) -> Result<(LowerTriangular, f64)> {
    if let Some(l) = factor_with_jitter(cov, 0.0) {
        return Ok((l, 0.0));
    }
    let scale = cov.mean_diagonal();
    if scale > 0.0 {
        for jitter in policy.rungs(scale) {
            if let Some(l) = factor_with_jitter(cov, jitter) {
                return Ok((l, jitter));
            }
        }
    }
    Err(Error::NotPositiveDefinite {
        ceiling: policy.ceiling * scale,
        class: None,
    })
}

/// Inverse of a lower-triangular factor, itself lower triangular.
pub fn invert_lower_triangular(l: &LowerTriangular) -> LowerTriangular {
    let n = l.dim;
    let mut inv = vec![0.0; n * n];
    // column j of the inverse solves L·x = e_j, and x[i] = 0 for i < j
    for j in 0..n {
        inv[j * n + j] = 1.0 / l.get(j, j);
        for i in j + 1..n {
            let mut s = 0.0;
            for k in j..i {
                s += l.get(i, k) * inv[k * n + j];
            }
            inv[i * n + j] = -s / l.get(i, i);
        }
    }
    LowerTriangular { dim: n, data: inv }
}

/// `(x − μ)ᵀ Σ⁻¹ (x − μ)` evaluated as `‖z‖²` with `Ψ·z = x − μ`.
pub fn mahalanobis_sq(x: &[f64], mu: &[f64], cov: &CovarianceMatrix) -> Result<f64> {
    if x.len() != mu.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: mu.len(),
        });
    }
    let psi = cholesky_exact(cov)?;
    let diff: Vec<f64> = x.iter().zip(mu).map(|(a, b)| a - b).collect();
    quadratic_form_inverse(&psi, &diff)
}

/// `vᵀ (ΨΨᵀ)⁻¹ v` for a Cholesky factor `Ψ`.
pub(crate) fn quadratic_form_inverse(psi: &LowerTriangular, v: &[f64]) -> Result<f64> {
    let z = psi.forward_solve(v)?;
    Ok(z.iter().map(|v| v * v).sum())
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cov_from(rows: &[[f64; 2]]) -> CovarianceMatrix {
        CovarianceMatrix::from_matrix(&Matrix::from_rows(rows).unwrap(), Divisor::Population)
            .unwrap()
    }

    #[test]
    fn covariance_of_square_corners_is_identity() {
        let x = Matrix::from_rows(&[[0.0, 0.0], [2.0, 0.0], [0.0, 2.0], [2.0, 2.0]]).unwrap();
        let c = covariance(&x, Divisor::Population).unwrap();
        assert_eq!(c.to_matrix(), Matrix::identity(2));
    }

    #[test]
    fn covariance_of_constant_rows_is_zero() {
        let x = Matrix::from_rows(&[[5.0, 5.0], [5.0, 5.0], [5.0, 5.0]]).unwrap();
        let c = covariance(&x, Divisor::Population).unwrap();
        assert!(c.to_matrix().as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn covariance_divisors_on_two_points() {
        let x = Matrix::from_rows(&[[0.0, 0.0], [2.0, 2.0]]).unwrap();
        let pop = covariance(&x, Divisor::Population).unwrap();
        let smp = covariance(&x, Divisor::Sample).unwrap();
        assert_eq!(pop.to_matrix().as_slice(), &[1.0, 1.0, 1.0, 1.0]);
        assert_eq!(smp.to_matrix().as_slice(), &[2.0, 2.0, 2.0, 2.0]);
    }

    #[test]
    fn covariance_rejects_too_few_rows() {
        let one = Matrix::from_rows(&[[1.0, 2.0]]).unwrap();
        assert!(matches!(
            covariance(&one, Divisor::Sample),
            Err(Error::EmptyInput { needed: 2, got: 1 })
        ));
        assert!(covariance(&one, Divisor::Population).is_ok());
        let empty = Matrix::zeros(0, 2);
        assert!(matches!(
            covariance(&empty, Divisor::Population),
            Err(Error::EmptyInput { .. })
        ));
    }

    #[test]
    fn matrix_rejects_non_finite() {
        assert!(matches!(
            Matrix::new(1, 2, vec![1.0, f64::NAN]),
            Err(Error::NonFiniteInput { row: 0, col: 1 })
        ));
        assert!(Matrix::new(2, 2, vec![1.0; 3]).is_err());
    }

    #[test]
    fn cholesky_of_small_pd_matrix() {
        let (l, jitter) = cholesky(
            &cov_from(&[[4.0, 2.0], [2.0, 3.0]]),
            &JitterPolicy::default(),
        )
        .unwrap();
        assert_eq!(jitter, 0.0);
        let expected = [2.0, 0.0, 1.0, 2f64.sqrt()];
        for (a, b) in l.to_matrix().as_slice().iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
        let rebuilt = l.to_matrix().matmul(&l.to_matrix().transpose()).unwrap();
        for (a, b) in rebuilt.as_slice().iter().zip([4.0, 2.0, 2.0, 3.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn cholesky_of_identity() {
        let id = CovarianceMatrix::from_matrix(&Matrix::identity(3), Divisor::Population).unwrap();
        let (l, jitter) = cholesky(&id, &JitterPolicy::default()).unwrap();
        assert_eq!(jitter, 0.0);
        assert_eq!(l, LowerTriangular::identity(3));
    }

    #[test]
    fn indefinite_matrix_escalates_then_fails_below_ceiling() {
        let cov = cov_from(&[[1.0, 2.0], [2.0, 1.0]]);
        let err = cholesky(&cov, &JitterPolicy::default()).unwrap_err();
        assert!(matches!(err, Error::NotPositiveDefinite { .. }));
        let tight = JitterPolicy::new(1e-8, 10.0, 0.9).unwrap();
        assert!(cholesky(&cov, &tight).is_err());
        // eigenvalue -1 needs more than unit jitter; the ceiling rung 10 succeeds
        let wide = JitterPolicy::new(1e-8, 10.0, 10.0).unwrap();
        let (l, jitter) = cholesky(&cov, &wide).unwrap();
        assert!((jitter - 10.0).abs() < 1e-9);
        let rebuilt = l.to_matrix().matmul(&l.to_matrix().transpose()).unwrap();
        for (a, b) in rebuilt.as_slice().iter().zip([11.0, 2.0, 2.0, 11.0]) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn semidefinite_matrix_gets_smallest_working_rung() {
        let cov = cov_from(&[[1.0, 1.0], [1.0, 1.0]]);
        let (_, jitter) = cholesky(&cov, &JitterPolicy::default()).unwrap();
        assert!(jitter > 0.0 && jitter <= 1e-2);
        // the rung below must have failed
        assert!(factor_with_jitter(&cov, jitter / 10.0).is_none() || jitter == 1e-8);
    }

    #[test]
    fn zero_covariance_cannot_be_regularized() {
        let cov = cov_from(&[[0.0, 0.0], [0.0, 0.0]]);
        assert!(cholesky(&cov, &JitterPolicy::default()).is_err());
    }

    #[test]
    fn jitter_policy_validation() {
        assert!(JitterPolicy::new(0.0, 10.0, 1.0).is_err());
        assert!(JitterPolicy::new(1.0, 10.0, 0.5).is_err());
        assert!(JitterPolicy::new(1e-3, 1.0, 1.0).is_err());
        let rungs = JitterPolicy::new(1e-3, 10.0, 0.5).unwrap().rungs(2.0);
        assert_eq!(rungs.len(), 4);
        assert!((rungs[3] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn triangular_inverse_examples() {
        let id = LowerTriangular::identity(4);
        assert_eq!(invert_lower_triangular(&id), id);

        let l = LowerTriangular::from_matrix(
            &Matrix::from_rows(&[[2.0, 0.0], [1.0, 2f64.sqrt()]]).unwrap(),
        )
        .unwrap();
        let inv = invert_lower_triangular(&l);
        let expected = [0.5, 0.0, -1.0 / (2.0 * 2f64.sqrt()), 1.0 / 2f64.sqrt()];
        for (a, b) in inv.to_matrix().as_slice().iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
        let prod = l.to_matrix().matmul(&inv.to_matrix()).unwrap();
        for (a, b) in prod.as_slice().iter().zip(Matrix::identity(2).as_slice()) {
            assert!((a - b).abs() < 1e-12);
        }

        let diag =
            LowerTriangular::from_matrix(&Matrix::from_rows(&[[4.0, 0.0], [0.0, 5.0]]).unwrap())
                .unwrap();
        assert_eq!(
            invert_lower_triangular(&diag).to_matrix().as_slice(),
            &[0.25, 0.0, 0.0, 0.2]
        );
    }

    #[test]
    fn lower_triangular_rejects_bad_shapes() {
        let upper = Matrix::from_rows(&[[1.0, 1.0], [0.0, 1.0]]).unwrap();
        assert!(LowerTriangular::from_matrix(&upper).is_err());
        let zero_diag = Matrix::from_rows(&[[1.0, 0.0], [1.0, 0.0]]).unwrap();
        assert!(LowerTriangular::from_matrix(&zero_diag).is_err());
    }

    #[test]
    fn mahalanobis_examples() {
        let id = CovarianceMatrix::from_matrix(&Matrix::identity(2), Divisor::Population).unwrap();
        assert_eq!(mahalanobis_sq(&[1.0, 2.0], &[1.0, 2.0], &id).unwrap(), 0.0);
        assert_eq!(mahalanobis_sq(&[3.0, 4.0], &[0.0, 0.0], &id).unwrap(), 25.0);
        assert!(matches!(
            mahalanobis_sq(&[1.0], &[1.0, 2.0], &id),
            Err(Error::DimensionMismatch { .. })
        ));
        let singular = cov_from(&[[1.0, 1.0], [1.0, 1.0]]);
        assert!(matches!(
            mahalanobis_sq(&[1.0, 0.0], &[0.0, 0.0], &singular),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn triangular_products() {
        let l =
            LowerTriangular::from_matrix(&Matrix::from_rows(&[[2.0, 0.0], [1.0, 3.0]]).unwrap())
                .unwrap();
        assert_eq!(l.mul_vec(&[1.0, 1.0]).unwrap(), vec![2.0, 4.0]);
        assert_eq!(l.transpose_mul_vec(&[1.0, 1.0]).unwrap(), vec![3.0, 3.0]);
        assert_eq!(l.forward_solve(&[2.0, 4.0]).unwrap(), vec![1.0, 1.0]);
    }
}
