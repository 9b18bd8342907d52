use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::cascade::{Cascade, CascadeState, Corpus, Message};
use crate::graph::Topology;
use crate::linalg::ridge;
use crate::{Error, Result};

pub const CG_FEATURES: [&str; 7] = [
    "log_size",
    "max_depth",
    "mean_gap",
    "log_frontier",
    "ContLen",
    "KeyW",
    "SurT",
];

/// Cascade-graph summary of an observed state.
pub fn cascade_features<G: Topology + ?Sized>(g: &G, state: &CascadeState, m: &Message) -> Result<[f64; 7]> {
    let ev = &state.cascade.events;
    if ev.len() < 2 {
        return Err(Error::domain("size prediction needs at least two observed events"));
    }
    let mut depth = vec![0usize; state.node_count()];
    let mut max_depth = 0;
    for e in ev {
        let d = g
            .parents(e.node)
            .iter()
            .filter(|&&p| state.activation_time(p).is_some_and(|t| t <= e.t) && p != e.node)
            .map(|&p| depth[p.index()] + 1)
            .min()
            .unwrap_or(0);
        depth[e.node.index()] = d;
        max_depth = max_depth.max(d);
    }
    let gap = (ev[ev.len() - 1].t - ev[0].t) / (ev.len() - 1) as f64;
    Ok([
        libm::log(ev.len() as f64),
        max_depth as f64,
        gap,
        libm::log(state.susceptible().len() as f64 + 1.0),
        f64::from(m.content_length),
        f64::from(u8::from(m.has_keyword)),
        state.now - m.origin_time,
    ])
}

/// Linear model of log final size over [`cascade_features`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CgCPred {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
    /// Coefficients over standardized features, then the intercept.
    pub coef: Vec<f64>,
    pub lambda: f64,
}

impl CgCPred {
    /// Fits on `(features, final size)` pairs.
    pub fn fit(rows: &[[f64; 7]], sizes: &[f64], lambda: f64) -> Result<Self> {
        if rows.len() < 2 {
            return Err(Error::NoInstances("size-prediction training cascades"));
        }
        let n = rows.len() as f64;
        let d = CG_FEATURES.len();
        let mut mean = vec![0.0; d];
        let mut scale = vec![0.0; d];
        for r in rows {
            for j in 0..d {
                mean[j] += r[j] / n;
            }
        }
        for r in rows {
            for j in 0..d {
                scale[j] += (r[j] - mean[j]) * (r[j] - mean[j]) / n;
            }
        }
        scale
            .iter_mut()
            .for_each(|s| *s = if *s > 1e-24 { libm::sqrt(*s) } else { 0.0 });
        let z: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| (0..d).map(|j| std_value(r[j], mean[j], scale[j])).collect())
            .collect();
        let y: Vec<f64> = sizes.iter().map(|&s| libm::log(s.max(1.0))).collect();
        let coef = ridge(&z, &y, lambda.max(1e-9))?;
        Ok(CgCPred {
            mean,
            scale,
            coef,
            lambda,
        })
    }

    /// Trains on every cascade of `corpus` with at least two events except
    /// `exclude`, each observed at the first `frac` of its events.
    pub fn train<G: Topology + ?Sized>(
        g: &G,
        corpus: &Corpus,
        frac: f64,
        exclude: Option<usize>,
        lambda: f64,
    ) -> Result<Self> {
        let mut rows = Vec::new();
        let mut sizes = Vec::new();
        for (i, c) in corpus.cascades.iter().enumerate() {
            if Some(i) == exclude || c.len() < 2 {
                continue;
            }
            let s = observe_for_size(g, c, frac)?;
            rows.push(cascade_features(g, &s, &corpus.messages[i])?);
            sizes.push(c.len() as f64);
        }
        Self::fit(&rows, &sizes, lambda)
    }

    pub fn predict_log(&self, x: &[f64; 7]) -> f64 {
        let d = x.len();
        let mut z = self.coef[d];
        for (j, &v) in x.iter().enumerate() {
            z += self.coef[j] * std_value(v, self.mean[j], self.scale[j]);
        }
        z
    }

    /// Predicted final size, never below the observed size.
    pub fn predict<G: Topology + ?Sized>(&self, g: &G, state: &CascadeState, m: &Message) -> Result<f64> {
        let x = cascade_features(g, state, m)?;
        let size = libm::round(libm::exp(self.predict_log(&x)));
        Ok(size.max(state.activated_count() as f64))
    }
}

fn std_value(x: f64, mean: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        (x - mean) / scale
    } else {
        0.0
    }
}

/// Prefix observation with at least two events, as size prediction requires.
pub fn observe_for_size<G: Topology + ?Sized>(g: &G, c: &Cascade, frac: f64) -> Result<CascadeState> {
    let s = CascadeState::observe_fraction(g, c, frac)?;
    if s.activated_count() < 2 && c.len() >= 2 {
        return CascadeState::observe_prefix(g, c, 2);
    }
    Ok(s)
}
