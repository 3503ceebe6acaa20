//! Reference implementations used only by the tests.

#![allow(dead_code)]

use cholesky_svm::{Label, LabeledData, Matrix};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Exact optimum of the linear-kernel soft-margin dual, found by enumerating
/// every assignment of each multiplier to {0, C, free} and solving the
/// stationarity system of the free ones.
pub struct QpSolution {
    pub alphas: Vec<f64>,
    pub objective: f64,
    pub w: Vec<f64>,
    pub b: f64,
}

pub fn brute_force_dual(x: &[Vec<f64>], y: &[f64], c: f64) -> QpSolution {
    let n = y.len();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();
    let q = DMatrix::from_fn(n, n, |i, j| y[i] * y[j] * dot(&x[i], &x[j]));
    let objective = |a: &[f64]| {
        let av = DVector::from_column_slice(a);
        av.sum() - 0.5 * (av.transpose() * &q * &av)[(0, 0)]
    };

    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut state = vec![0u8; n];
    loop {
        if let Some(a) = face_stationary_point(&q, y, c, &state) {
            let v = objective(&a);
            if best.as_ref().is_none_or(|(bv, _)| v > *bv) {
                best = Some((v, a));
            }
        }
        // next assignment in base 3
        let mut k = 0;
        while k < n && state[k] == 2 {
            state[k] = 0;
            k += 1;
        }
        if k == n {
            break;
        }
        state[k] += 1;
    }
    let (objective, alphas) = best.expect("alpha = 0 is always feasible");

    let d = x[0].len();
    let mut w = vec![0.0; d];
    for i in 0..n {
        for (wk, xk) in w.iter_mut().zip(&x[i]) {
            *wk += alphas[i] * y[i] * xk;
        }
    }
    let eps = 1e-9 * c;
    let free: Vec<usize> = (0..n)
        .filter(|&i| alphas[i] > eps && alphas[i] < c - eps)
        .collect();
    let b = if !free.is_empty() {
        free.iter().map(|&i| y[i] - dot(&w, &x[i])).sum::<f64>() / free.len() as f64
    } else {
        // interval of b allowed by the bounded multipliers
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for i in 0..n {
            let r = y[i] - dot(&w, &x[i]);
            let at_zero = alphas[i] <= eps;
            // at zero: y(wx+b) >= 1; at C: y(wx+b) <= 1
            let lower_bound = (at_zero && y[i] > 0.0) || (!at_zero && y[i] < 0.0);
            if lower_bound {
                lo = lo.max(r);
            } else {
                hi = hi.min(r);
            }
        }
        match (lo.is_finite(), hi.is_finite()) {
            (true, true) => 0.5 * (lo + hi),
            (true, false) => lo,
            (false, true) => hi,
            _ => 0.0,
        }
    };
    QpSolution {
        alphas,
        objective,
        w,
        b,
    }
}

/// `state[i]`: 0 at zero, 1 at C, 2 free.
fn face_stationary_point(q: &DMatrix<f64>, y: &[f64], c: f64, state: &[u8]) -> Option<Vec<f64>> {
    let n = y.len();
    let free: Vec<usize> = (0..n).filter(|&i| state[i] == 2).collect();
    let upper: Vec<usize> = (0..n).filter(|&i| state[i] == 1).collect();
    let mut a = vec![0.0; n];
    upper.iter().for_each(|&i| a[i] = c);

    let m = free.len();
    let y_bound: f64 = upper.iter().map(|&i| y[i] * c).sum();
    if m == 0 {
        return (y_bound.abs() <= 1e-12 * c.max(1.0)).then_some(a);
    }
    // [Q_FF y_F; y_Fᵀ 0] [α_F; b] = [1 − C Q_FU 1; −C y_Uᵀ1]
    let mut lhs = DMatrix::zeros(m + 1, m + 1);
    let mut rhs = DVector::zeros(m + 1);
    for (r, &i) in free.iter().enumerate() {
        for (s, &j) in free.iter().enumerate() {
            lhs[(r, s)] = q[(i, j)];
        }
        lhs[(r, m)] = y[i];
        lhs[(m, r)] = y[i];
        rhs[r] = 1.0 - upper.iter().map(|&j| c * q[(i, j)]).sum::<f64>();
    }
    rhs[m] = -y_bound;
    let svd = lhs.clone().svd(true, true);
    let sol = svd.solve(&rhs, 1e-12).ok()?;
    let resid = (&lhs * &sol - &rhs).norm();
    if resid > 1e-9 * (1.0 + rhs.norm()) {
        return None;
    }
    let slack = 1e-10 * c;
    for (r, &i) in free.iter().enumerate() {
        if sol[r] < -slack || sol[r] > c + slack {
            return None;
        }
        a[i] = sol[r].clamp(0.0, c);
    }
    Some(a)
}

/// Two 2-D Gaussian blobs; a large `separation` gives separable classes.
pub fn random_blobs(rng: &mut ChaCha8Rng, n: usize, separation: f64) -> LabeledData {
    let n_pos = rng.random_range(1..n);
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let label = if i < n_pos {
            Label::Positive
        } else {
            Label::Negative
        };
        let shift = 0.5 * separation * label.sign();
        rows.push(vec![
            shift + rng.random_range(-1.0..1.0),
            shift + rng.random_range(-1.0..1.0),
        ]);
        labels.push(label);
    }
    LabeledData::new(Matrix::from_rows(&rows).unwrap(), labels).unwrap()
}

/// Random symmetric positive definite matrix `AAᵀ + shift·I`.
pub fn random_spd(rng: &mut ChaCha8Rng, d: usize, shift: f64) -> DMatrix<f64> {
    let a = DMatrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
    &a * a.transpose() + DMatrix::identity(d, d) * shift
}

/// Samples `n` rows from N(mean, Σ) via nalgebra's Cholesky factor.
pub fn gaussian_rows(
    rng: &mut ChaCha8Rng,
    n: usize,
    mean: &[f64],
    sigma: &DMatrix<f64>,
) -> Vec<Vec<f64>> {
    let d = mean.len();
    let l = sigma.clone().cholesky().expect("spd").l();
    (0..n)
        .map(|_| {
            let z = DVector::from_fn(d, |_, _| standard_normal(rng));
            let x = &l * z;
            (0..d).map(|k| mean[k] + x[k]).collect()
        })
        .collect()
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller
    let u1: f64 = rng.random_range(f64::EPSILON..1.0);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn to_nalgebra(m: &Matrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

pub fn from_nalgebra(m: &DMatrix<f64>) -> Matrix {
    let rows: Vec<Vec<f64>> = (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect();
    Matrix::from_rows(&rows).unwrap()
}

pub fn wdbc_path() -> String {
    concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/wdbc.data").to_string()
}

pub struct OracleComparison {
    pub n: usize,
    pub c: f64,
    pub relative_objective_error: f64,
    pub grid_mismatches: usize,
    /// Grid points within rounding of the oracle's boundary, not compared.
    pub grid_ties: usize,
    pub dual_feasible: bool,
    pub converged: bool,
    pub kkt_max_residual: f64,
}

/// Fits one random 2-D problem with the library and the brute-force
/// optimum, comparing objectives and predictions on a 5×5 grid over the
/// data's bounding box.
pub fn compare_with_oracle(seed: u64, c: f64) -> OracleComparison {
    use cholesky_svm::svm::{fit, kkt_report, Hyperparams};

    let mut r = rng(seed);
    let n = r.random_range(4..=10);
    let separation = r.random_range(0.0..4.0);
    let data = random_blobs(&mut r, n, separation);
    let rows: Vec<Vec<f64>> = data.features.row_iter().map(<[f64]>::to_vec).collect();
    let y: Vec<f64> = data.labels.iter().map(|l| l.sign()).collect();

    let hp = Hyperparams::default().with_c(c).with_tol(1e-9);
    let model = fit(&data, &hp).unwrap();
    let kkt = kkt_report(&model, &data, &hp).unwrap();
    let oracle = brute_force_dual(&rows, &y, c);

    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for row in &rows {
        for k in 0..2 {
            lo[k] = lo[k].min(row[k]);
            hi[k] = hi[k].max(row[k]);
        }
    }
    let mut grid_mismatches = 0;
    let mut grid_ties = 0;
    for a in 0..5 {
        for b in 0..5 {
            let p = [
                lo[0] + (hi[0] - lo[0]) * a as f64 / 4.0,
                lo[1] + (hi[1] - lo[1]) * b as f64 / 4.0,
            ];
            let f = oracle.w[0] * p[0] + oracle.w[1] * p[1] + oracle.b;
            if f.abs() <= 1e-9 {
                grid_ties += 1;
                continue;
            }
            let got = model.predict(&p).unwrap() == Label::Positive;
            grid_mismatches += usize::from((f >= 0.0) != got);
        }
    }
    OracleComparison {
        n,
        c,
        relative_objective_error: (model.dual_objective - oracle.objective).abs()
            / oracle.objective.abs().max(1e-12),
        grid_mismatches,
        grid_ties,
        dual_feasible: model.is_dual_feasible(),
        converged: model.converged,
        kkt_max_residual: kkt.max_residual,
    }
}
