//! L2-regularized logistic regression trained by damped Newton iterations. Inputs are standardized internally so raw
//! feature scales (seconds, counts) need no preprocessing.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::dataset::View;
use crate::linalg::solve;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogRegParams {
    pub l2: f64,
    pub max_iters: usize,
    pub grad_tol: f64,
}

impl Default for LogRegParams {
    fn default() -> Self {
        LogRegParams {
            l2: 1e-4,
            max_iters: 100,
            grad_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogReg {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
    /// Coefficients on the standardized inputs.
    pub coef: Vec<f64>,
    pub bias: f64,
}

#[inline]
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + libm::exp(-z))
    } else {
        let e = libm::exp(z);
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
#[inline]
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + libm::log1p(libm::exp(-z))
    } else {
        libm::log1p(libm::exp(z))
    }
}

/// Mean logistic loss plus `l2/2 · ||w||²` over rows of a standardized
/// design matrix. Parameters are `[w_0, …, w_{d-1}, b]`.
pub struct Objective<'a> {
    pub x: &'a [f64],
    pub y: &'a [i8],
    pub d: usize,
    pub l2: f64,
}

impl Objective<'_> {
    pub fn value(&self, params: &[f64]) -> f64 {
        let (w, b) = params.split_at(self.d);
        let n = self.y.len();
        let mut loss = 0.0;
        for i in 0..n {
            let z = b[0] + dot(w, &self.x[i * self.d..(i + 1) * self.d]);
            loss += softplus(-f64::from(self.y[i]) * z);
        }
        loss / n as f64 + 0.5 * self.l2 * dot(w, w)
    }

    pub fn value_and_gradient(&self, params: &[f64]) -> (f64, Vec<f64>) {
        let (w, b) = params.split_at(self.d);
        let n = self.y.len();
        let mut grad = vec![0.0; self.d + 1];
        let mut loss = 0.0;
        for i in 0..n {
            let row = &self.x[i * self.d..(i + 1) * self.d];
            let yi = f64::from(self.y[i]);
            let margin = yi * (b[0] + dot(w, row));
            loss += softplus(-margin);
            let coef = -yi * sigmoid(-margin);
            for (g, x) in grad.iter_mut().zip(row) {
                *g += coef * x;
            }
            grad[self.d] += coef;
        }
        let inv = 1.0 / n as f64;
        for (j, g) in grad.iter_mut().enumerate() {
            *g *= inv;
            if j < self.d {
                *g += self.l2 * w[j];
            }
        }
        (loss * inv + 0.5 * self.l2 * dot(w, w), grad)
    }

    /// Row-major `(d+1) x (d+1)` Hessian. The intercept gets a tiny ridge so
    /// the system stays solvable on separable data.
    pub fn hessian(&self, params: &[f64]) -> Vec<f64> {
        let (w, b) = params.split_at(self.d);
        let m = self.d + 1;
        let mut h = vec![0.0; m * m];
        let mut xt = vec![1.0; m];
        for i in 0..self.y.len() {
            let row = &self.x[i * self.d..(i + 1) * self.d];
            let p = sigmoid(b[0] + dot(w, row));
            let s = p * (1.0 - p);
            if s == 0.0 {
                continue;
            }
            xt[..self.d].copy_from_slice(row);
            for r in 0..m {
                let sr = s * xt[r];
                for c in r..m {
                    h[r * m + c] += sr * xt[c];
                }
            }
        }
        let inv = 1.0 / self.y.len() as f64;
        for r in 0..m {
            for c in r..m {
                h[r * m + c] *= inv;
                h[c * m + r] = h[r * m + c];
            }
            h[r * m + r] += if r < self.d { self.l2 } else { 1e-10 };
        }
        h
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Column means and standard deviations; zero-variance columns get scale 1.
pub(crate) fn standardizer(view: &View<'_>) -> (Vec<f64>, Vec<f64>) {
    let (n, d) = (view.len(), view.dim());
    let mut mean = vec![0.0; d];
    for r in 0..n {
        for (j, m) in mean.iter_mut().enumerate() {
            *m += view.value(r, j);
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    let mut var = vec![0.0; d];
    for r in 0..n {
        for (j, v) in var.iter_mut().enumerate() {
            let dlt = view.value(r, j) - mean[j];
            *v += dlt * dlt;
        }
    }
    let scale = var
        .into_iter()
        .map(|v| {
            let s = libm::sqrt(v / n as f64);
            if s > 1e-12 {
                s
            } else {
                1.0
            }
        })
        .collect();
    (mean, scale)
}

impl LogReg {
    pub fn fit(view: &View<'_>, params: &LogRegParams) -> Result<Self> {
        view.check_trainable()?;
        let (n, d) = (view.len(), view.dim());
        let (mean, scale) = standardizer(view);
        let mut x = Vec::with_capacity(n * d);
        let mut y = Vec::with_capacity(n);
        for r in 0..n {
            for j in 0..d {
                x.push((view.value(r, j) - mean[j]) / scale[j]);
            }
            y.push(view.label(r));
        }
        let obj = Objective {
            x: &x,
            y: &y,
            d,
            l2: params.l2,
        };
        let mut theta = vec![0.0; d + 1];
        let (mut loss, mut grad) = obj.value_and_gradient(&theta);
        for _ in 0..params.max_iters {
            if libm::sqrt(dot(&grad, &grad)) < params.grad_tol {
                break;
            }
            let dir = solve(obj.hessian(&theta), grad.clone())?;
            let slope = dot(&grad, &dir);
            let mut step = 1.0;
            let mut candidate;
            loop {
                candidate = theta.iter().zip(&dir).map(|(t, g)| t - step * g).collect::<Vec<_>>();
                let l = obj.value(&candidate);
                if l <= loss - 1e-4 * step * slope || step < 1e-10 {
                    break;
                }
                step *= 0.5;
            }
            theta = candidate;
            let (l, g) = obj.value_and_gradient(&theta);
            loss = l;
            grad = g;
        }
        let bias = theta.pop().unwrap_or(0.0);
        Ok(LogReg {
            mean,
            scale,
            coef: theta,
            bias,
        })
    }

    pub fn decision(&self, x: &[f64]) -> f64 {
        self.bias
            + self
                .coef
                .iter()
                .zip(x.iter().zip(self.mean.iter().zip(&self.scale)))
                .map(|(w, (v, (m, s)))| w * (v - m) / s)
                .sum::<f64>()
    }

    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        sigmoid(self.decision(x))
    }

    pub fn weights(&self) -> Vec<f64> {
        self.coef.iter().map(|w| w.abs()).collect()
    }
}
