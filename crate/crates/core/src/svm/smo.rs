//! Two-variable decomposition solver for the soft-margin dual
//!
//! ```text
//! min_α  f(α) = ½ αᵀQα − eᵀα,   Q_ij = y_i y_j K(x_i, x_j)
//! s.t.   yᵀα = 0,  0 ≤ α_i ≤ C
//! ```
//!
//! The first multiplier of each pair is the maximal KKT violator, the
//! second maximizes the guaranteed decrease of `f` among candidates whose
//! violation gap with the first is positive (a second-order form of the
//! largest `|E₁ − E₂|` rule). Candidates are scanned in a seeded order, so
//! the seed only decides between exact ties.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Floor for the curvature of a pair; keeps non-PSD kernels moving.
const TAU: f64 = 1e-12;

/// Updates per sweep are `max(n, MIN_SWEEP)`.
const MIN_SWEEP: usize = 1000;

pub(crate) struct SmoOutcome {
    pub alphas: Vec<f64>,
    /// `f` gradient, `Qα − e`, recomputed from the final multipliers.
    pub gradient: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Dual objective `eᵀα − ½αᵀQα` after every sweep of `max(n, 1000)`
    /// updates and at exit.
    pub trace: Vec<f64>,
}

pub(crate) struct SmoSettings {
    pub c: f64,
    pub tol: f64,
    pub max_sweeps: usize,
    pub max_stalled_sweeps: usize,
    pub seed: u64,
}

#[inline]
fn in_up(y: f64, a: f64, c: f64) -> bool {
    (y > 0.0 && a < c) || (y < 0.0 && a > 0.0)
}

#[inline]
fn in_low(y: f64, a: f64, c: f64) -> bool {
    (y > 0.0 && a > 0.0) || (y < 0.0 && a < c)
}

fn dual_objective(alphas: &[f64], gradient: &[f64]) -> f64 {
    0.5 * alphas
        .iter()
        .zip(gradient)
        .map(|(a, g)| a * (1.0 - g))
        .sum::<f64>()
}

/// `gram` is the row-major kernel matrix (not yet multiplied by labels).
pub(crate) fn solve(gram: &[f64], y: &[f64], s: &SmoSettings) -> SmoOutcome {
    let n = y.len();
    let c = s.c;
    let q = |i: usize, j: usize| y[i] * y[j] * gram[i * n + j];

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(s.seed));

    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    // bounded multipliers that cannot move are dropped from the active set
    // between full checks
    let mut active = order.clone();
    let mut unshrunk = false;
    let shrink_every = n.clamp(1, 1000);
    let mut shrink_counter = shrink_every;

    let sweep = n.max(MIN_SWEEP);
    let budget = s.max_sweeps.saturating_mul(sweep);
    let mut objective = 0.0;
    let mut trace = vec![0.0];
    let mut iterations = 0;
    let mut converged = false;
    let mut stalled = 0;

    loop {
        shrink_counter -= 1;
        if shrink_counter == 0 {
            shrink_counter = shrink_every;
            shrink(
                &mut active,
                &mut unshrunk,
                &order,
                &alpha,
                &mut grad,
                gram,
                y,
                s,
            );
        }

        let mut choice = first_choice(&active, &alpha, &grad, y, c);
        if active.len() < n && choice.is_none_or(|(_, gmax, gmin)| gmax - gmin < s.tol) {
            // optimal on the active set; confirm on all multipliers
            reconstruct_gradient(&active, &alpha, &mut grad, gram, y);
            active.clone_from(&order);
            choice = first_choice(&active, &alpha, &grad, y, c);
            shrink_counter = 1;
        }
        let Some((i, gmax, gmin)) = choice else {
            converged = true;
            break;
        };
        if gmax - gmin < s.tol {
            converged = true;
            break;
        }
        if iterations >= budget {
            break;
        }

        let kii = gram[i * n + i];
        let mut j_sel = usize::MAX;
        let mut best = f64::INFINITY;
        for &t in &active {
            if !in_low(y[t], alpha[t], c) {
                continue;
            }
            let gap = gmax + y[t] * grad[t];
            if gap > 0.0 {
                let mut curv = kii + gram[t * n + t] - 2.0 * gram[i * n + t];
                if curv <= 0.0 {
                    curv = TAU;
                }
                let score = -(gap * gap) / curv;
                if score < best {
                    best = score;
                    j_sel = t;
                }
            }
        }
        if j_sel == usize::MAX {
            converged = true;
            break;
        }
        let j = j_sel;

        let (old_i, old_j) = (alpha[i], alpha[j]);
        let (mut ai, mut aj) = (old_i, old_j);
        if y[i] != y[j] {
            let mut quad = q(i, i) + q(j, j) + 2.0 * q(i, j);
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = ai - aj;
            ai += delta;
            aj += delta;
            if diff > 0.0 {
                if aj < 0.0 {
                    aj = 0.0;
                    ai = diff;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = -diff;
            }
            if diff > 0.0 {
                if ai > c {
                    ai = c;
                    aj = c - diff;
                }
            } else if aj > c {
                aj = c;
                ai = c + diff;
            }
        } else {
            let mut quad = q(i, i) + q(j, j) - 2.0 * q(i, j);
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (grad[i] - grad[j]) / quad;
            let sum = ai + aj;
            ai -= delta;
            aj += delta;
            if sum > c {
                if ai > c {
                    ai = c;
                    aj = sum - c;
                }
            } else if aj < 0.0 {
                aj = 0.0;
                ai = sum;
            }
            if sum > c {
                if aj > c {
                    aj = c;
                    ai = sum - c;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = sum;
            }
        }
        alpha[i] = ai;
        alpha[j] = aj;

        let (di, dj) = (ai - old_i, aj - old_j);
        if di != 0.0 || dj != 0.0 {
            // f decreases by this much; tracked so the trace needs no full gradient
            let df = grad[i] * di
                + grad[j] * dj
                + 0.5 * (q(i, i) * di * di + q(j, j) * dj * dj)
                + q(i, j) * di * dj;
            objective -= df;
            let (yi, yj) = (y[i], y[j]);
            let row_i = &gram[i * n..(i + 1) * n];
            let row_j = &gram[j * n..(j + 1) * n];
            for &t in &active {
                grad[t] += y[t] * (yi * row_i[t] * di + yj * row_j[t] * dj);
            }
        }

        iterations += 1;
        if iterations % sweep == 0 {
            if objective > *trace.last().unwrap_or(&f64::NEG_INFINITY) {
                stalled = 0;
            } else {
                stalled += 1;
            }
            trace.push(objective);
            if stalled >= s.max_stalled_sweeps {
                break;
            }
        }
    }

    // fresh gradient, free of accumulated update error and shrinking
    let gradient = full_gradient(&alpha, gram, y);
    trace.push(dual_objective(&alpha, &gradient));

    SmoOutcome {
        alphas: alpha,
        gradient,
        iterations,
        converged,
        trace,
    }
}

/// Maximal violator in the "up" set plus the extreme values of both sets.
fn first_choice(
    active: &[usize],
    alpha: &[f64],
    grad: &[f64],
    y: &[f64],
    c: f64,
) -> Option<(usize, f64, f64)> {
    let mut gmax = f64::NEG_INFINITY;
    let mut i_sel = None;
    let mut gmin = f64::INFINITY;
    for &t in active {
        let v = -y[t] * grad[t];
        if in_up(y[t], alpha[t], c) && v > gmax {
            gmax = v;
            i_sel = Some(t);
        }
        if in_low(y[t], alpha[t], c) && v < gmin {
            gmin = v;
        }
    }
    i_sel.map(|i| (i, gmax, gmin))
}

fn full_gradient(alpha: &[f64], gram: &[f64], y: &[f64]) -> Vec<f64> {
    let n = y.len();
    let mut gradient = vec![-1.0; n];
    for (k, &a) in alpha.iter().enumerate() {
        if a != 0.0 {
            let w = a * y[k];
            let row = &gram[k * n..(k + 1) * n];
            for (t, g) in gradient.iter_mut().enumerate() {
                *g += y[t] * w * row[t];
            }
        }
    }
    gradient
}

/// Brings the gradient of every inactive multiplier up to date.
fn reconstruct_gradient(
    active: &[usize],
    alpha: &[f64],
    grad: &mut [f64],
    gram: &[f64],
    y: &[f64],
) {
    let n = y.len();
    if active.len() == n {
        return;
    }
    let mut is_active = vec![false; n];
    active.iter().for_each(|&t| is_active[t] = true);
    let fresh = full_gradient(alpha, gram, y);
    for t in (0..n).filter(|&t| !is_active[t]) {
        grad[t] = fresh[t];
    }
}

#[allow(clippy::too_many_arguments)]
fn shrink(
    active: &mut Vec<usize>,
    unshrunk: &mut bool,
    order: &[usize],
    alpha: &[f64],
    grad: &mut [f64],
    gram: &[f64],
    y: &[f64],
    s: &SmoSettings,
) {
    let c = s.c;
    let mut up_max = f64::NEG_INFINITY;
    let mut low_max = f64::NEG_INFINITY;
    for &t in active.iter() {
        if in_up(y[t], alpha[t], c) {
            up_max = up_max.max(-y[t] * grad[t]);
        }
        if in_low(y[t], alpha[t], c) {
            low_max = low_max.max(y[t] * grad[t]);
        }
    }
    // close to optimal: restore everything once so nothing stays wrongly shrunk
    if !*unshrunk && up_max + low_max <= 10.0 * s.tol {
        *unshrunk = true;
        reconstruct_gradient(active, alpha, grad, gram, y);
        active.clear();
        active.extend_from_slice(order);
    }
    active.retain(|&t| {
        let g = grad[t];
        if alpha[t] >= c {
            if y[t] > 0.0 {
                -g <= up_max
            } else {
                -g <= low_max
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                g <= low_max
            } else {
                g <= up_max
            }
        } else {
            true
        }
    });
}

/// Bias `θ₀`: mean of `y_i − Σ_j α_j y_j K_ji` over free multipliers, or the
/// midpoint of the interval allowed by the bounded ones.
pub(crate) fn bias(alphas: &[f64], gradient: &[f64], y: &[f64], c: f64) -> f64 {
    let mut free_sum = 0.0;
    let mut free_count = 0usize;
    let mut lower = f64::NEG_INFINITY;
    let mut upper = f64::INFINITY;
    for ((&a, &g), &yt) in alphas.iter().zip(gradient).zip(y) {
        let v = -yt * g;
        if a > 0.0 && a < c {
            free_sum += v;
            free_count += 1;
        } else if in_up(yt, a, c) {
            lower = lower.max(v);
        } else {
            upper = upper.min(v);
        }
    }
    if free_count > 0 {
        return free_sum / free_count as f64;
    }
    match (lower.is_finite(), upper.is_finite()) {
        (true, true) => 0.5 * (lower + upper),
        (true, false) => lower,
        (false, true) => upper,
        (false, false) => 0.0,
    }
}
