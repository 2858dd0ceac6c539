use alloc::borrow::Cow;
use alloc::vec;
use alloc::vec::Vec;

use super::linalg::{dot, sq_dist, sq_norms};
use crate::error::bail;
use crate::{par, Result};

const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "type", rename_all = "lowercase"))]
pub enum Kernel {
    Linear,
    /// `exp(-gamma * |a - b|^2)`.
    Rbf {
        gamma: f64,
    },
}

impl Kernel {
    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match *self {
            Kernel::Linear => dot(a, b),
            Kernel::Rbf { gamma } => libm::exp(-gamma * sq_dist(a, b)),
        }
    }

    /// Kernel values from inner products and squared norms.
    pub(crate) fn eval_gram(&self, g: f64, na: f64, nb: f64) -> f64 {
        match *self {
            Kernel::Linear => g,
            Kernel::Rbf { gamma } => libm::exp(-gamma * (na + nb - 2.0 * g).max(0.0)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct SvmConfig {
    pub kernel: Kernel,
    pub c: f64,
    /// Stop once the maximal KKT violation falls below this.
    pub tol: f64,
    /// The solver gives up after `max_passes * n` pair updates.
    pub max_passes: usize,
}

impl Default for SvmConfig {
    fn default() -> Self {
        Self { kernel: Kernel::Linear, c: 1.0, tol: 1e-3, max_passes: 200 }
    }
}

impl SvmConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            bail!(Config, "svm c = {} must be positive", self.c);
        }
        if let Kernel::Rbf { gamma } = self.kernel {
            if !(gamma > 0.0 && gamma.is_finite()) {
                bail!(Config, "rbf gamma = {gamma} must be positive");
            }
        }
        if self.tol.is_nan() || self.tol <= 0.0 || self.max_passes == 0 {
            bail!(Config, "svm tol must be positive and max_passes at least 1");
        }
        Ok(())
    }
}

/// Dual solution of one binary soft-margin problem. The decision function
/// is `sum_i alpha_i y_i K(x_i, x) - rho`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinarySolution {
    pub alpha: Vec<f64>,
    pub rho: f64,
    pub iterations: usize,
    /// Largest KKT violation at exit.
    pub violation: f64,
    pub converged: bool,
}

impl BinarySolution {
    /// Dual objective `1/2 a'Qa - sum(a)` with `Q_ij = y_i y_j K_ij`.
    pub fn objective(&self, k: &[f64], y: &[f64]) -> f64 {
        dual_objective(&self.alpha, k, y)
    }
}

pub fn dual_objective(alpha: &[f64], k: &[f64], y: &[f64]) -> f64 {
    let n = alpha.len();
    let mut quad = 0.0;
    for i in 0..n {
        for j in 0..n {
            quad += alpha[i] * alpha[j] * y[i] * y[j] * k[i * n + j];
        }
    }
    0.5 * quad - alpha.iter().sum::<f64>()
}

/// Sequential minimal optimization with second-order working-set selection
/// over a precomputed kernel matrix `k` (row-major, `n x n`). Labels are ±1.
pub fn smo(k: &[f64], y: &[f64], c: f64, tol: f64, max_iter: usize) -> BinarySolution {
    let n = y.len();
    debug_assert_eq!(k.len(), n * n);
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let diag: Vec<f64> = (0..n).map(|i| k[i * n + i]).collect();
    let (mut iterations, mut violation, mut converged) = (0, f64::INFINITY, false);

    while iterations < max_iter {
        // Most violating index among those that can move up.
        let (mut gmax, mut i) = (f64::NEG_INFINITY, usize::MAX);
        for t in 0..n {
            let up = if y[t] > 0.0 { alpha[t] < c } else { alpha[t] > 0.0 };
            if up && -y[t] * grad[t] >= gmax {
                gmax = -y[t] * grad[t];
                i = t;
            }
        }
        // Partner with the largest guaranteed objective decrease.
        let (mut gmax2, mut j, mut best) = (f64::NEG_INFINITY, usize::MAX, f64::INFINITY);
        if i != usize::MAX {
            let ki = &k[i * n..(i + 1) * n];
            for t in 0..n {
                let low = if y[t] > 0.0 { alpha[t] > 0.0 } else { alpha[t] < c };
                if !low {
                    continue;
                }
                let v = y[t] * grad[t];
                gmax2 = gmax2.max(v);
                let diff = gmax + v;
                if diff > 0.0 {
                    let quad = diag[i] + diag[t] - 2.0 * ki[t];
                    let obj = -(diff * diff) / if quad > 0.0 { quad } else { TAU };
                    if obj <= best {
                        best = obj;
                        j = t;
                    }
                }
            }
        }
        violation = gmax + gmax2;
        if i == usize::MAX || j == usize::MAX || violation < tol {
            converged = true;
            break;
        }
        iterations += 1;

        let (ki, kj) = (&k[i * n..(i + 1) * n], &k[j * n..(j + 1) * n]);
        let (old_i, old_j) = (alpha[i], alpha[j]);
        let (mut ai, mut aj) = (old_i, old_j);
        if y[i] != y[j] {
            let quad = (diag[i] + diag[j] + 2.0 * y[i] * y[j] * ki[j]).max(TAU);
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
            let quad = (diag[i] + diag[j] - 2.0 * ki[j]).max(TAU);
            let delta = (grad[i] - grad[j]) / quad;
            let sum = ai + aj;
            ai -= delta;
            aj += delta;
            if sum > c {
                if ai > c {
                    ai = c;
                    aj = sum - c;
                }
                if aj > c {
                    aj = c;
                    ai = sum - c;
                }
            } else {
                if aj < 0.0 {
                    aj = 0.0;
                    ai = sum;
                }
                if ai < 0.0 {
                    ai = 0.0;
                    aj = sum;
                }
            }
        }
        alpha[i] = ai;
        alpha[j] = aj;
        let (di, dj) = ((ai - old_i) * y[i], (aj - old_j) * y[j]);
        for t in 0..n {
            grad[t] += y[t] * (ki[t] * di + kj[t] * dj);
        }
    }

    // Bias from the free vectors, or the middle of the feasible interval.
    let (mut n_free, mut sum_free, mut ub, mut lb) = (0usize, 0.0, f64::INFINITY, f64::NEG_INFINITY);
    for t in 0..n {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            n_free += 1;
            sum_free += yg;
        }
    }
    let rho = if n_free > 0 { sum_free / n_free as f64 } else { (ub + lb) / 2.0 };
    BinarySolution { alpha, rho, iterations, violation, converged }
}

/// Kernel matrix from the Gram matrix of the same rows.
pub(crate) fn kernel_matrix<'a>(kernel: &Kernel, gram: &'a [f64], norms: &[f64]) -> Cow<'a, [f64]> {
    match kernel {
        Kernel::Linear => Cow::Borrowed(gram),
        Kernel::Rbf { .. } => {
            let n = norms.len();
            Cow::Owned(
                gram.iter().enumerate().map(|(idx, &g)| kernel.eval_gram(g, norms[idx / n], norms[idx % n])).collect(),
            )
        }
    }
}

/// One-vs-rest machines sharing one pool of support vectors.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SvmModel {
    pub kernel: Kernel,
    pub dim: usize,
    /// Standardized support vectors, row-major.
    pub support: Vec<f64>,
    /// `coef[m * n_sv + s] = alpha_s * y_s` for machine `m`.
    pub coef: Vec<f64>,
    pub rho: Vec<f64>,
    pub converged: Vec<bool>,
}

impl SvmModel {
    pub(crate) fn fit(
        cfg: &SvmConfig,
        x: &[f64],
        d: usize,
        gram: &[f64],
        y: &[usize],
        n_classes: usize,
    ) -> Result<Self> {
        Self::fit_indexed(cfg, x, d, gram, y, n_classes).map(|(m, _)| m)
    }

    /// Also returns the training-row index of every support vector.
    pub(crate) fn fit_indexed(
        cfg: &SvmConfig,
        x: &[f64],
        d: usize,
        gram: &[f64],
        y: &[usize],
        n_classes: usize,
    ) -> Result<(Self, Vec<usize>)> {
        let n = y.len();
        if n_classes < 2 {
            bail!(Validation, "one-vs-rest needs at least 2 classes");
        }
        let norms = sq_norms(x, d);
        let k = kernel_matrix(&cfg.kernel, gram, &norms);
        let max_iter = cfg.max_passes.saturating_mul(n);
        let solutions: Vec<(Vec<f64>, BinarySolution)> = par::map_range(n_classes, |m| {
            let ym: Vec<f64> = y.iter().map(|&c| if c == m { 1.0 } else { -1.0 }).collect();
            let s = smo(&k, &ym, cfg.c, cfg.tol, max_iter);
            (ym, s)
        });
        let used: Vec<usize> = (0..n).filter(|&t| solutions.iter().any(|(_, s)| s.alpha[t] > 0.0)).collect();
        let mut support = Vec::with_capacity(used.len() * d);
        for &t in &used {
            support.extend_from_slice(&x[t * d..(t + 1) * d]);
        }
        let mut coef = Vec::with_capacity(n_classes * used.len());
        for (ym, s) in &solutions {
            coef.extend(used.iter().map(|&t| s.alpha[t] * ym[t]));
        }
        let model = Self {
            kernel: cfg.kernel,
            dim: d,
            support,
            coef,
            rho: solutions.iter().map(|(_, s)| s.rho).collect(),
            converged: solutions.iter().map(|(_, s)| s.converged).collect(),
        };
        Ok((model, used))
    }

    pub fn n_support(&self) -> usize {
        self.support.len() / self.dim
    }

    /// One decision value per class.
    pub fn decision_values(&self, z: &[f64]) -> Vec<f64> {
        let kv: Vec<f64> = self.support.chunks_exact(self.dim).map(|sv| self.kernel.eval(sv, z)).collect();
        self.decision_from_kernel(&kv)
    }

    pub(crate) fn decision_from_kernel(&self, kv: &[f64]) -> Vec<f64> {
        let n_sv = kv.len();
        self.rho.iter().enumerate().map(|(m, rho)| dot(&self.coef[m * n_sv..(m + 1) * n_sv], kv) - rho).collect()
    }
}
