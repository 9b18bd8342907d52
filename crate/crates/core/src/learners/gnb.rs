use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::dataset::View;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GnbParams {
    pub var_floor: f64,
}

impl Default for GnbParams {
    fn default() -> Self {
        GnbParams { var_floor: 1e-9 }
    }
}

/// Gaussian naive Bayes. Index 0 holds the negative class, 1 the positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gnb {
    pub log_prior: [f64; 2],
    pub mean: [Vec<f64>; 2],
    pub var: [Vec<f64>; 2],
}

impl Gnb {
    pub fn fit(view: &View<'_>, params: &GnbParams) -> Result<Self> {
        view.check_trainable()?;
        let d = view.dim();
        let mut count = [0usize; 2];
        let mut mean = [vec![0.0; d], vec![0.0; d]];
        for r in 0..view.len() {
            let c = usize::from(view.label(r) == 1);
            count[c] += 1;
            for (j, m) in mean[c].iter_mut().enumerate() {
                *m += view.value(r, j);
            }
        }
        for c in 0..2 {
            mean[c].iter_mut().for_each(|m| *m /= count[c] as f64);
        }
        let mut var = [vec![0.0; d], vec![0.0; d]];
        for r in 0..view.len() {
            let c = usize::from(view.label(r) == 1);
            for j in 0..d {
                let dlt = view.value(r, j) - mean[c][j];
                var[c][j] += dlt * dlt;
            }
        }
        for c in 0..2 {
            var[c]
                .iter_mut()
                .for_each(|v| *v = (*v / count[c] as f64).max(params.var_floor));
        }
        let n = view.len() as f64;
        Ok(Gnb {
            log_prior: [libm::log(count[0] as f64 / n), libm::log(count[1] as f64 / n)],
            mean,
            var,
        })
    }

    fn log_likelihood(&self, c: usize, x: &[f64]) -> f64 {
        let mut l = self.log_prior[c];
        for ((v, m), s2) in x.iter().zip(&self.mean[c]).zip(&self.var[c]) {
            let dlt = v - m;
            l -= 0.5 * (libm::log(2.0 * core::f64::consts::PI * s2) + dlt * dlt / s2);
        }
        l
    }

    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        let diff = self.log_likelihood(0, x) - self.log_likelihood(1, x);
        super::logreg::sigmoid(-diff)
    }

    /// Symmetrized KL divergence between the two class-conditional Gaussians
    /// of each feature.
    pub fn weights(&self) -> Vec<f64> {
        let kl = |m1: f64, v1: f64, m2: f64, v2: f64| {
            0.5 * (libm::log(v2 / v1) + (v1 + (m1 - m2) * (m1 - m2)) / v2 - 1.0)
        };
        (0..self.mean[0].len())
            .map(|j| {
                let (m0, v0, m1, v1) = (self.mean[0][j], self.var[0][j], self.mean[1][j], self.var[1][j]);
                (0.5 * (kl(m0, v0, m1, v1) + kl(m1, v1, m0, v0))).max(0.0)
            })
            .collect()
    }
}
