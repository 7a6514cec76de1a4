//! Gaussian-kernel SVM trained by SMO, combined one-vs-rest.

use serde::{Deserialize, Serialize};

use super::knn::check_training;
use super::lda::argmax;
use crate::dataset::Quadrant;
use crate::error::{Error, Result};

const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    /// Kernel width; `None` means `1 / dim`.
    pub gamma: Option<f64>,
    pub c: f64,
    /// KKT violation tolerance.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams { gamma: None, c: 1.0, tolerance: 1e-3, max_iterations: 100_000 }
    }
}

fn rbf(gamma: f64, a: &[f64], b: &[f64]) -> f64 {
    let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (-gamma * d2).exp()
}

/// One binary machine: `f(x) = Σ coef_i K(sv_i, x) - rho`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinarySvm {
    gamma: f64,
    support: Vec<Vec<f64>>,
    /// `α_i y_i` for each support vector.
    coef: Vec<f64>,
    rho: f64,
    dual_objective: f64,
    iterations: usize,
}

impl BinarySvm {
    /// Solve `max Σα - ½ ΣΣ α_i α_j y_i y_j K_ij` s.t. `0 ≤ α ≤ C`, `Σ α_i y_i = 0`.
    ///
    /// Working-set selection follows the second-order maximal-violating-pair
    /// rule; iteration stops once the violation drops below `tolerance`.
    pub fn fit(x: &[Vec<f64>], y: &[bool], gamma: f64, params: &SvmParams) -> Result<Self> {
        let n = x.len();
        if !(gamma > 0.0) || !(params.c > 0.0) {
            return Err(Error::Config(format!("svm needs gamma > 0 and C > 0, got {gamma}, {}", params.c)));
        }
        if !y.contains(&true) || !y.contains(&false) {
            return Err(Error::InsufficientClasses { needed: 2, found: 1 });
        }
        let c = params.c;
        let ys: Vec<f64> = y.iter().map(|&p| if p { 1.0 } else { -1.0 }).collect();
        let mut k = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = rbf(gamma, &x[i], &x[j]);
                k[i * n + j] = v;
                k[j * n + i] = v;
            }
        }
        let q = |i: usize, j: usize| ys[i] * ys[j] * k[i * n + j];

        let mut alpha = vec![0.0; n];
        // Gradient of ½αᵀQα - eᵀα.
        let mut grad = vec![-1.0; n];
        let is_up = |a: f64, y: f64| (y > 0.0 && a < c) || (y < 0.0 && a > 0.0);
        let is_low = |a: f64, y: f64| (y > 0.0 && a > 0.0) || (y < 0.0 && a < c);

        let mut iterations = 0;
        loop {
            let mut i = usize::MAX;
            let mut gmax = f64::NEG_INFINITY;
            for t in 0..n {
                if is_up(alpha[t], ys[t]) && -ys[t] * grad[t] > gmax {
                    gmax = -ys[t] * grad[t];
                    i = t;
                }
            }
            let mut gmin = f64::INFINITY;
            let mut j = usize::MAX;
            let mut best_gain = f64::INFINITY;
            for t in 0..n {
                if !is_low(alpha[t], ys[t]) {
                    continue;
                }
                let v = -ys[t] * grad[t];
                gmin = gmin.min(v);
                if i != usize::MAX && v < gmax {
                    let b = gmax - v;
                    let a = k[i * n + i] + k[t * n + t] - 2.0 * k[i * n + t];
                    let gain = -(b * b) / if a > 0.0 { a } else { TAU };
                    if gain < best_gain {
                        best_gain = gain;
                        j = t;
                    }
                }
            }
            let violation = gmax - gmin;
            if i == usize::MAX || j == usize::MAX || violation < params.tolerance {
                break;
            }
            if iterations >= params.max_iterations {
                return Err(Error::SolverNonConvergence { iterations, violation });
            }
            iterations += 1;

            let (old_i, old_j) = (alpha[i], alpha[j]);
            if ys[i] != ys[j] {
                let quad = k[i * n + i] + k[j * n + j] + 2.0 * k[i * n + j];
                let quad = if quad > 0.0 { quad } else { TAU };
                let delta = (-grad[i] - grad[j]) / quad;
                let diff = alpha[i] - alpha[j];
                alpha[i] += delta;
                alpha[j] += delta;
                if diff > 0.0 {
                    if alpha[j] < 0.0 {
                        alpha[j] = 0.0;
                        alpha[i] = diff;
                    }
                } else if alpha[i] < 0.0 {
                    alpha[i] = 0.0;
                    alpha[j] = -diff;
                }
                if diff > 0.0 {
                    if alpha[i] > c {
                        alpha[i] = c;
                        alpha[j] = c - diff;
                    }
                } else if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = c + diff;
                }
            } else {
                let quad = k[i * n + i] + k[j * n + j] - 2.0 * k[i * n + j];
                let quad = if quad > 0.0 { quad } else { TAU };
                let delta = (grad[i] - grad[j]) / quad;
                let sum = alpha[i] + alpha[j];
                alpha[i] -= delta;
                alpha[j] += delta;
                if sum > c {
                    if alpha[i] > c {
                        alpha[i] = c;
                        alpha[j] = sum - c;
                    }
                } else if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = sum;
                }
                if sum > c {
                    if alpha[j] > c {
                        alpha[j] = c;
                        alpha[i] = sum - c;
                    }
                } else if alpha[i] < 0.0 {
                    alpha[i] = 0.0;
                    alpha[j] = sum;
                }
            }
            let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
            for (t, g) in grad.iter_mut().enumerate() {
                *g += q(i, t) * di + q(j, t) * dj;
            }
        }

        // rho: average over free vectors, else midpoint of the feasible interval.
        let (mut ub, mut lb, mut sum_free, mut n_free) = (f64::INFINITY, f64::NEG_INFINITY, 0.0, 0usize);
        for t in 0..n {
            let yg = ys[t] * grad[t];
            if alpha[t] >= c {
                if ys[t] < 0.0 { ub = ub.min(yg) } else { lb = lb.max(yg) }
            } else if alpha[t] <= 0.0 {
                if ys[t] > 0.0 { ub = ub.min(yg) } else { lb = lb.max(yg) }
            } else {
                n_free += 1;
                sum_free += yg;
            }
        }
        let rho = if n_free > 0 { sum_free / n_free as f64 } else { (ub + lb) / 2.0 };
        let dual_objective = -0.5 * alpha.iter().zip(&grad).map(|(a, g)| a * (g - 1.0)).sum::<f64>();

        let (support, coef) = alpha
            .iter()
            .enumerate()
            .filter(|(_, &a)| a > 0.0)
            .map(|(t, &a)| (x[t].clone(), a * ys[t]))
            .unzip();
        Ok(BinarySvm { gamma, support, coef, rho, dual_objective, iterations })
    }

    pub fn decision(&self, x: &[f64]) -> f64 {
        self.support.iter().zip(&self.coef).map(|(sv, c)| c * rbf(self.gamma, sv, x)).sum::<f64>() - self.rho
    }

    /// Value of the (maximized) dual objective at the solution.
    pub fn dual_objective(&self) -> f64 {
        self.dual_objective
    }

    pub fn support_count(&self) -> usize {
        self.support.len()
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }
}

/// One-vs-rest machines, one per class present in training.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    gamma: f64,
    c: f64,
    dim: usize,
    machines: Vec<(Quadrant, BinarySvm)>,
}

impl SvmModel {
    pub fn fit(x: &[Vec<f64>], y: &[Quadrant], params: &SvmParams) -> Result<Self> {
        let dim = check_training(x, y)?;
        let gamma = params.gamma.unwrap_or(1.0 / dim.max(1) as f64);
        let classes: Vec<Quadrant> = Quadrant::ALL.into_iter().filter(|q| y.contains(q)).collect();
        if classes.len() < 2 {
            return Err(Error::InsufficientClasses { needed: 2, found: classes.len() });
        }
        let machines = classes
            .iter()
            .map(|&c| {
                let target: Vec<bool> = y.iter().map(|&l| l == c).collect();
                BinarySvm::fit(x, &target, gamma, params).map(|m| (c, m))
            })
            .collect::<Result<_>>()?;
        Ok(SvmModel { gamma, c: params.c, dim, machines })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn machines(&self) -> &[(Quadrant, BinarySvm)] {
        &self.machines
    }

    pub fn predict(&self, x: &[f64]) -> Result<Quadrant> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        let scores: Vec<(Quadrant, f64)> = self.machines.iter().map(|(q, m)| (*q, m.decision(x))).collect();
        Ok(argmax(&scores))
    }
}

pub fn svm_fit(x: &[Vec<f64>], y: &[Quadrant], gamma: Option<f64>, c: f64) -> Result<SvmModel> {
    SvmModel::fit(x, y, &SvmParams { gamma, c, ..SvmParams::default() })
}

pub fn svm_predict(model: &SvmModel, x: &[f64]) -> Result<Quadrant> {
    model.predict(x)
}
