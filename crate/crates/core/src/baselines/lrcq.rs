use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::rwr::{rwr, EgoNetwork};
use crate::cascade::{CascadeState, Message};
use crate::engine::ActivationModel;
use crate::exec::{derive_seed, Executor};
use crate::graph::{NodeId, Topology};
use crate::learners::{Classifier, ClassifierKind, Dataset, Hyper};
use crate::pipeline::{balance, enumerate_instances, featurize, Criterion};
use crate::{Env, Error, Result};

/// Active neighbors of `v` inside its ego network, with their walk
/// probabilities and time since activation.
#[derive(Debug, Clone, PartialEq)]
pub struct EgoContext {
    pub v: NodeId,
    pub active: Vec<NodeId>,
    pub rwr: Vec<f64>,
    /// `now - t(active[i])`, in seconds.
    pub time_diff: Vec<f64>,
    /// Connected components among the active neighbors.
    pub components: usize,
}

impl EgoContext {
    pub fn build<G: Topology + ?Sized>(
        g: &G,
        state: &CascadeState,
        v: NodeId,
        restart: f64,
        max_iters: usize,
    ) -> Result<Self> {
        if v.index() >= g.node_count() {
            return Err(Error::NodeOutOfRange(v));
        }
        let ego = EgoNetwork::build(g, v);
        let p = rwr(&ego, restart, max_iters)?;
        let local: Vec<usize> = (0..ego.len())
            .filter(|&i| i != ego.center && state.is_active(ego.nodes[i]))
            .collect();
        Ok(EgoContext {
            v,
            active: local.iter().map(|&i| ego.nodes[i]).collect(),
            rwr: local.iter().map(|&i| p[i]).collect(),
            time_diff: local
                .iter()
                .map(|&i| state.now - state.activation_time(ego.nodes[i]).unwrap_or(state.now))
                .collect(),
            components: ego.components(&local),
        })
    }
}

/// `(sum of walk probabilities, exp(-mu * components))`.
pub fn lrcq1_features(ctx: &EgoContext, mu: f64) -> (f64, f64) {
    let g = ctx.rwr.iter().sum();
    let f = libm::exp(-mu * ctx.components as f64);
    (g, f)
}

/// `(sum of h * p, a * ln(|S| + 1) + b * exp(-mu * components))`. With
/// `decay`, `h` is replaced by `exp(-h / 3600)`.
pub fn lrcq2_features(ctx: &EgoContext, mu: f64, a: f64, b: f64, decay: bool) -> (f64, f64) {
    let g = ctx
        .time_diff
        .iter()
        .zip(&ctx.rwr)
        .map(|(&h, &p)| if decay { libm::exp(-h / 3600.0) * p } else { h * p })
        .sum();
    let f = a * libm::log(ctx.active.len() as f64 + 1.0) + b * libm::exp(-mu * ctx.components as f64);
    (g, f)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LrcqVariant {
    Q1,
    Q2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LrcqParams {
    pub restart: f64,
    pub max_iters: usize,
    pub mu: f64,
    pub a: f64,
    pub b: f64,
    pub decay: bool,
}

impl Default for LrcqParams {
    fn default() -> Self {
        LrcqParams {
            restart: 0.15,
            max_iters: 1000,
            mu: 1.0,
            a: 0.5,
            b: 0.5,
            decay: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LrcqModel {
    pub variant: LrcqVariant,
    pub params: LrcqParams,
    pub classifier: Classifier,
    pub cv_accuracy: f64,
    pub instances: usize,
}

impl LrcqModel {
    pub fn features<G: Topology + ?Sized>(
        variant: LrcqVariant,
        params: &LrcqParams,
        g: &G,
        state: &CascadeState,
        v: NodeId,
    ) -> Result<[f64; 2]> {
        let ctx = EgoContext::build(g, state, v, params.restart, params.max_iters)?;
        let (a, b) = match variant {
            LrcqVariant::Q1 => lrcq1_features(&ctx, params.mu),
            LrcqVariant::Q2 => lrcq2_features(&ctx, params.mu, params.a, params.b, params.decay),
        };
        Ok([a, b])
    }

    /// Logistic regression over `(g, f)` on the same balanced instances the
    /// main pipeline uses.
    pub fn train<G: Topology + ?Sized>(
        env: Env<'_, G>,
        variant: LrcqVariant,
        params: LrcqParams,
        seed: u64,
        folds: usize,
        max_per_class: Option<usize>,
        exec: &dyn Executor,
    ) -> Result<Self> {
        let (pos, neg) = enumerate_instances(env.graph, env.corpus)?;
        let inst = balance(pos, neg, seed, max_per_class)?;
        let rows = featurize(env.graph, env.corpus, &inst, |s, _, v| {
            Ok(Self::features(variant, &params, env.graph, s, v)?.to_vec())
        })?;
        let names = alloc::vec!["g".into(), "f".into()];
        let data = Dataset::new(rows, inst.iter().map(|i| i.label).collect(), names)?;
        Self::fit_dataset(&data, variant, params, seed, folds, exec)
    }

    pub fn fit_dataset(
        data: &Dataset,
        variant: LrcqVariant,
        params: LrcqParams,
        seed: u64,
        folds: usize,
        exec: &dyn Executor,
    ) -> Result<Self> {
        let hyper = Hyper::default();
        let cv_seed = derive_seed(seed, 0x1C, 0);
        let mut crit = Criterion::new(data, ClassifierKind::Logreg, hyper, folds, cv_seed, exec)?;
        let all: Vec<usize> = (0..data.dim()).collect();
        let cv_accuracy = crit.score(&all)?;
        let classifier = Classifier::fit(ClassifierKind::Logreg, data, &hyper, seed)?;
        Ok(LrcqModel {
            variant,
            params,
            classifier,
            cv_accuracy,
            instances: data.len(),
        })
    }
}

impl<G: Topology + ?Sized> ActivationModel<G> for LrcqModel {
    fn activation_probability(
        &self,
        env: Env<'_, G>,
        state: &CascadeState,
        _message: &Message,
        v: NodeId,
    ) -> Result<f64> {
        let x = Self::features(self.variant, &self.params, env.graph, state, v)?;
        self.classifier.predict_proba(&x)
    }
}
