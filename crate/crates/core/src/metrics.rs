//! Classification and cascade-prediction scores.

use alloc::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::cascade::CascadeState;
use crate::graph::NodeId;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub accuracy: f64,
    /// Set when no instance was predicted positive (precision reported as 0).
    pub precision_undefined: bool,
    /// Set when no instance is truly positive (recall reported as 0).
    pub recall_undefined: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
}

impl Confusion {
    pub fn from_labels(y_true: &[i8], y_pred: &[i8]) -> Result<Self> {
        if y_true.len() != y_pred.len() {
            return Err(Error::LengthMismatch {
                left: y_true.len(),
                right: y_pred.len(),
            });
        }
        let mut c = Confusion::default();
        for (&t, &p) in y_true.iter().zip(y_pred) {
            if !matches!(t, 1 | -1) || !matches!(p, 1 | -1) {
                return Err(Error::domain("labels must be +1 or -1"));
            }
            match (t == 1, p == 1) {
                (true, true) => c.tp += 1,
                (false, true) => c.fp += 1,
                (true, false) => c.fn_ += 1,
                (false, false) => c.tn += 1,
            }
        }
        Ok(c)
    }

    pub fn metrics(&self) -> ClassMetrics {
        let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        let precision = ratio(self.tp, self.tp + self.fp);
        let recall = ratio(self.tp, self.tp + self.fn_);
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        let n = self.tp + self.fp + self.fn_ + self.tn;
        ClassMetrics {
            precision,
            recall,
            f1,
            accuracy: ratio(self.tp + self.tn, n),
            precision_undefined: self.tp + self.fp == 0,
            recall_undefined: self.tp + self.fn_ == 0,
        }
    }
}

pub fn classification_metrics(y_true: &[i8], y_pred: &[i8]) -> Result<ClassMetrics> {
    Ok(Confusion::from_labels(y_true, y_pred)?.metrics())
}

/// Nodes that were active or susceptible in either state.
pub fn evaluation_universe(truth: &CascadeState, pred: &CascadeState) -> BTreeSet<NodeId> {
    let mut u: BTreeSet<NodeId> = truth.activated().chain(pred.activated()).collect();
    u.extend(truth.susceptible().iter().copied());
    u.extend(pred.susceptible().iter().copied());
    u
}

/// Fraction of the evaluation universe whose activation label agrees between
/// the two states. An empty universe scores 1.
pub fn node_accuracy(truth: &CascadeState, pred: &CascadeState) -> Result<f64> {
    if truth.node_count() != pred.node_count() {
        return Err(Error::LengthMismatch {
            left: truth.node_count(),
            right: pred.node_count(),
        });
    }
    let u = evaluation_universe(truth, pred);
    if u.is_empty() {
        return Ok(1.0);
    }
    let agree = u
        .iter()
        .filter(|&&v| truth.is_active(v) == pred.is_active(v))
        .count();
    Ok(agree as f64 / u.len() as f64)
}

/// Whether `predicted` lies within `tol * truth` of `truth`.
pub fn within_relative(predicted: f64, truth: f64, tol: f64) -> bool {
    // Integer sizes make the boundary case exact; the epsilon only absorbs
    // rounding in `tol * truth`.
    (predicted - truth).abs() <= tol * truth.abs() * (1.0 + 1e-12)
}

/// Share of predictions within `tol` relative error (0.2 gives 0.2-precision).
pub fn relative_precision(pairs: &[(f64, f64)], tol: f64) -> f64 {
    if pairs.is_empty() {
        return 0.0;
    }
    let ok = pairs.iter().filter(|(p, t)| within_relative(*p, *t, tol)).count();
    ok as f64 / pairs.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cascade::Cascade;
    use crate::graph::SocialGraph;

    #[test]
    fn perfect_and_all_negative() {
        let y = [1, -1, 1, -1];
        let m = classification_metrics(&y, &y).unwrap();
        assert_eq!((m.precision, m.recall, m.f1, m.accuracy), (1.0, 1.0, 1.0, 1.0));
        let m = classification_metrics(&y, &[-1; 4]).unwrap();
        assert!(m.precision_undefined);
        assert_eq!((m.precision, m.recall, m.accuracy), (0.0, 0.0, 0.5));
    }

    #[test]
    fn confusion_arithmetic() {
        let mut t = alloc::vec![1, 1, 1, -1, 1];
        let mut p = alloc::vec![1, 1, 1, 1, -1];
        t.extend([-1; 5]);
        p.extend([-1; 5]);
        let m = classification_metrics(&t, &p).unwrap();
        assert!((m.precision - 0.75).abs() < 1e-12);
        assert!((m.recall - 0.75).abs() < 1e-12);
        assert!((m.f1 - 0.75).abs() < 1e-12);
        assert!((m.accuracy - 0.8).abs() < 1e-12);
        assert!(classification_metrics(&[1], &[1, 1]).is_err());
        assert!(classification_metrics(&[0], &[1]).is_err());
    }

    #[test]
    fn relative_boundary() {
        assert!(within_relative(120.0, 100.0, 0.2));
        assert!(!within_relative(121.0, 100.0, 0.2));
        assert!(within_relative(80.0, 100.0, 0.2));
        assert_eq!(relative_precision(&[(120.0, 100.0), (121.0, 100.0)], 0.2), 0.5);
    }

    #[test]
    fn node_accuracy_self_consistent() {
        let g = SocialGraph::from_edges(4, &[(1, 0), (2, 1), (3, 0)]);
        let c = Cascade::from_pairs("m", &[(0, 0.0), (1, 1.0)]);
        let full = CascadeState::observe_prefix(&g, &c, 2).unwrap();
        assert_eq!(node_accuracy(&full, &full).unwrap(), 1.0);
        let part = CascadeState::observe_prefix(&g, &c, 1).unwrap();
        // universe {0,1,2,3}: node 1 disagrees
        assert_eq!(node_accuracy(&full, &part).unwrap(), 0.75);
    }
}
