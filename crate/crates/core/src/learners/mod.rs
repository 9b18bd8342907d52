//! Classifier suite producing activation probabilities and feature weights.

mod cart;
mod dataset;
mod gnb;
pub mod logreg;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

pub use cart::{CartParams, Forest, ForestParams, Tree, TreeNode};
pub use dataset::{Dataset, View};
pub use gnb::{Gnb, GnbParams};
pub use logreg::{sigmoid, LogReg, LogRegParams, Objective};

use crate::{Error, Result};

/// Candidate kinds, declared in increasing order of model complexity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierKind {
    Logreg,
    Gnb,
    Cart,
    Rforest,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 4] = [
        ClassifierKind::Logreg,
        ClassifierKind::Gnb,
        ClassifierKind::Cart,
        ClassifierKind::Rforest,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ClassifierKind::Logreg => "logreg",
            ClassifierKind::Gnb => "gnb",
            ClassifierKind::Cart => "cart",
            ClassifierKind::Rforest => "rforest",
        }
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ClassifierKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::param(alloc::format!("unknown classifier `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Hyper {
    pub logreg: LogRegParams,
    pub gnb: GnbParams,
    pub cart: CartParams,
    pub rforest: ForestParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Classifier {
    Logreg(LogReg),
    Gnb(Gnb),
    Cart(Tree),
    Rforest(Forest),
}

impl Classifier {
    pub fn fit(kind: ClassifierKind, data: &Dataset, hyper: &Hyper, seed: u64) -> Result<Self> {
        let rows: Vec<usize> = (0..data.len()).collect();
        let cols: Vec<usize> = (0..data.dim()).collect();
        Self::fit_view(kind, &data.view(&rows, &cols), hyper, seed)
    }

    pub fn fit_view(kind: ClassifierKind, view: &View<'_>, hyper: &Hyper, seed: u64) -> Result<Self> {
        Ok(match kind {
            ClassifierKind::Logreg => Classifier::Logreg(LogReg::fit(view, &hyper.logreg)?),
            ClassifierKind::Gnb => Classifier::Gnb(Gnb::fit(view, &hyper.gnb)?),
            ClassifierKind::Cart => Classifier::Cart(Tree::fit(view, &hyper.cart, seed)?),
            ClassifierKind::Rforest => Classifier::Rforest(Forest::fit(view, &hyper.rforest, seed)?),
        })
    }

    pub fn kind(&self) -> ClassifierKind {
        match self {
            Classifier::Logreg(_) => ClassifierKind::Logreg,
            Classifier::Gnb(_) => ClassifierKind::Gnb,
            Classifier::Cart(_) => ClassifierKind::Cart,
            Classifier::Rforest(_) => ClassifierKind::Rforest,
        }
    }

    /// Number of input features the model was trained on.
    pub fn dim(&self) -> usize {
        match self {
            Classifier::Logreg(m) => m.coef.len(),
            Classifier::Gnb(m) => m.mean[0].len(),
            Classifier::Cart(t) => t.importance.len(),
            Classifier::Rforest(f) => f.trees.first().map_or(0, |t| t.importance.len()),
        }
    }

    /// Probability that `x` is labelled +1, without a dimension check.
    pub fn proba_unchecked(&self, x: &[f64]) -> f64 {
        let p = match self {
            Classifier::Logreg(m) => m.predict_proba(x),
            Classifier::Gnb(m) => m.predict_proba(x),
            Classifier::Cart(t) => t.predict_proba(x),
            Classifier::Rforest(f) => f.predict_proba(x),
        };
        p.clamp(0.0, 1.0)
    }

    pub fn predict_proba(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(self.proba_unchecked(x))
    }

    /// `+1` when the probability is strictly above 0.5.
    pub fn predict(&self, x: &[f64]) -> Result<i8> {
        Ok(if self.predict_proba(x)? > 0.5 { 1 } else { -1 })
    }

    /// Non-negative per-feature weights summing to 1.
    pub fn feature_weights(&self) -> Vec<f64> {
        let raw = match self {
            Classifier::Logreg(m) => m.weights(),
            Classifier::Gnb(m) => m.weights(),
            Classifier::Cart(t) => t.importance.clone(),
            Classifier::Rforest(f) => f.importance(),
        };
        normalize(raw)
    }
}

/// Scales to unit sum; an all-zero vector becomes uniform.
pub(crate) fn normalize(mut v: Vec<f64>) -> Vec<f64> {
    let s: f64 = v.iter().filter(|x| x.is_finite()).sum();
    if s > 0.0 {
        v.iter_mut()
            .for_each(|x| *x = if x.is_finite() { *x / s } else { 0.0 });
    } else if !v.is_empty() {
        let u = 1.0 / v.len() as f64;
        v.iter_mut().for_each(|x| *x = u);
    }
    v
}

pub fn default_feature_names(d: usize) -> Vec<String> {
    (0..d).map(|i| alloc::format!("f{i}")).collect()
}
