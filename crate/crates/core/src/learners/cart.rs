//! CART classification tree (Gini impurity) and a bagged forest of them.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::dataset::View;
use crate::exec::{rng, rng_from, Rng};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CartParams {
    /// `None` grows until leaves are pure or too small to split.
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
    /// Features examined per split; `None` examines all of them.
    pub max_features: Option<usize>,
}

impl Default for CartParams {
    fn default() -> Self {
        CartParams {
            max_depth: Some(12),
            min_leaf: 5,
            max_features: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "t", rename_all = "lowercase")]
pub enum TreeNode {
    Leaf {
        pos: u32,
        neg: u32,
    },
    Split {
        feature: u32,
        threshold: f64,
        left: u32,
        right: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<TreeNode>,
    /// Unnormalized total weighted impurity decrease per feature.
    pub importance: Vec<f64>,
}

#[inline]
fn gini(pos: usize, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let p = pos as f64 / n as f64;
    2.0 * p * (1.0 - p)
}

struct Builder<'a, 'v> {
    view: &'a View<'v>,
    params: CartParams,
    rng: Option<Rng>,
    nodes: Vec<TreeNode>,
    importance: Vec<f64>,
    total: f64,
    scratch: Vec<(f64, bool)>,
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    decrease: f64,
}

impl Builder<'_, '_> {
    fn candidates(&mut self) -> Vec<usize> {
        let d = self.view.dim();
        match (self.params.max_features, self.rng.as_mut()) {
            (Some(k), Some(rng)) if k < d => {
                let mut f = index::sample(rng, d, k.max(1)).into_vec();
                f.sort_unstable();
                f
            }
            _ => (0..d).collect(),
        }
    }

    fn best_split(&mut self, rows: &[usize]) -> Option<BestSplit> {
        let n = rows.len();
        let pos_total = rows.iter().filter(|&&r| self.view.label(r) == 1).count();
        let parent = gini(pos_total, n) * n as f64;
        let min_leaf = self.params.min_leaf.max(1);
        let mut best: Option<BestSplit> = None;
        for f in self.candidates() {
            self.scratch.clear();
            self.scratch
                .extend(rows.iter().map(|&r| (self.view.value(r, f), self.view.label(r) == 1)));
            self.scratch.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut left_pos = 0usize;
            for i in 0..n - 1 {
                left_pos += usize::from(self.scratch[i].1);
                let (a, b) = (self.scratch[i].0, self.scratch[i + 1].0);
                if a == b {
                    continue;
                }
                let nl = i + 1;
                let nr = n - nl;
                if nl < min_leaf || nr < min_leaf {
                    continue;
                }
                let child = gini(left_pos, nl) * nl as f64 + gini(pos_total - left_pos, nr) * nr as f64;
                let decrease = parent - child;
                // Zero-gain splits are allowed so parity patterns such as XOR can be
                // separated one level further down.
                if best.as_ref().is_none_or(|b| decrease > b.decrease + 1e-12) {
                    let mid = a + (b - a) / 2.0;
                    let threshold = if mid < b { mid } else { a };
                    best = Some(BestSplit {
                        feature: f,
                        threshold,
                        decrease,
                    });
                }
            }
        }
        best
    }

    fn grow(&mut self, rows: &mut [usize], depth: usize) -> u32 {
        let id = self.nodes.len() as u32;
        let pos = rows.iter().filter(|&&r| self.view.label(r) == 1).count();
        let leaf = TreeNode::Leaf {
            pos: pos as u32,
            neg: (rows.len() - pos) as u32,
        };
        self.nodes.push(leaf);
        let pure = pos == 0 || pos == rows.len();
        let depth_ok = self.params.max_depth.is_none_or(|m| depth < m);
        if pure || !depth_ok || rows.len() < 2 * self.params.min_leaf.max(1) {
            return id;
        }
        let Some(split) = self.best_split(rows) else {
            return id;
        };
        self.importance[split.feature] += split.decrease.max(0.0) / self.total;
        let view = self.view;
        let f = split.feature;
        let thr = split.threshold;
        let mut k = 0;
        for i in 0..rows.len() {
            if view.value(rows[i], f) <= thr {
                rows.swap(i, k);
                k += 1;
            }
        }
        let (l, r) = rows.split_at_mut(k);
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        self.nodes[id as usize] = TreeNode::Split {
            feature: f as u32,
            threshold: thr,
            left,
            right,
        };
        id
    }
}

impl Tree {
    /// Grows a tree on `rows` of `view` (indices into the view). `seed` drives
    /// per-split feature subsampling and is ignored when every feature is
    /// examined.
    pub fn grow(view: &View<'_>, rows: &mut [usize], params: &CartParams, seed: u64) -> Tree {
        let d = view.dim();
        let mut b = Builder {
            view,
            params: *params,
            rng: params.max_features.filter(|&k| k < d).map(|_| rng(seed)),
            nodes: Vec::new(),
            importance: vec![0.0; d],
            total: rows.len().max(1) as f64,
            scratch: Vec::with_capacity(rows.len()),
        };
        b.grow(rows, 0);
        Tree {
            nodes: b.nodes,
            importance: b.importance,
        }
    }

    pub fn fit(view: &View<'_>, params: &CartParams, seed: u64) -> Result<Tree> {
        view.check_trainable()?;
        let mut rows: Vec<usize> = (0..view.len()).collect();
        Ok(Tree::grow(view, &mut rows, params, seed))
    }

    pub fn leaf(&self, x: &[f64]) -> (u32, u32) {
        let mut i = 0usize;
        loop {
            match self.nodes[i] {
                TreeNode::Leaf { pos, neg } => return (pos, neg),
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    i = if x[feature as usize] <= threshold {
                        left as usize
                    } else {
                        right as usize
                    };
                }
            }
        }
    }

    /// Laplace-smoothed positive fraction of the leaf reached by `x`.
    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        let (pos, neg) = self.leaf(x);
        (f64::from(pos) + 1.0) / (f64::from(pos) + f64::from(neg) + 2.0)
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[TreeNode], i: usize) -> usize {
            match nodes[i] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => {
                    1 + walk(nodes, left as usize).max(walk(nodes, right as usize))
                }
            }
        }
        walk(&self.nodes, 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    /// Features examined per split; `None` means `round(sqrt(d))`.
    pub max_features: Option<usize>,
    pub bootstrap: bool,
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 50,
            max_features: None,
            bootstrap: true,
            max_depth: Some(12),
            min_leaf: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    pub trees: Vec<Tree>,
}

const FOREST_TAG: u64 = 0xF0_5E57;

impl Forest {
    pub fn fit(view: &View<'_>, params: &ForestParams, seed: u64) -> Result<Forest> {
        view.check_trainable()?;
        let d = view.dim();
        let n = view.len();
        let k = params
            .max_features
            .unwrap_or_else(|| (libm::round(libm::sqrt(d as f64)) as usize).max(1));
        let tree_params = CartParams {
            max_depth: params.max_depth,
            min_leaf: params.min_leaf,
            max_features: Some(k),
        };
        let trees = (0..params.n_trees.max(1))
            .map(|t| {
                let mut rows: Vec<usize> = if params.bootstrap {
                    let mut r = rng_from(seed, FOREST_TAG, t as u64);
                    (0..n).map(|_| r.random_range(0..n)).collect()
                } else {
                    (0..n).collect()
                };
                let tree_seed = crate::exec::derive_seed(seed, FOREST_TAG + 1, t as u64);
                Tree::grow(view, &mut rows, &tree_params, tree_seed)
            })
            .collect();
        Ok(Forest { trees })
    }

    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        self.trees.iter().map(|t| t.predict_proba(x)).sum::<f64>() / self.trees.len() as f64
    }

    pub fn importance(&self) -> Vec<f64> {
        let d = self.trees.first().map_or(0, |t| t.importance.len());
        let mut out = vec![0.0; d];
        for t in &self.trees {
            for (o, v) in out.iter_mut().zip(&t.importance) {
                *o += v;
            }
        }
        out
    }
}
