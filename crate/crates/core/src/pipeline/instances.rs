//! Training-instance construction from history cascades.
//!
//! A positive instance is `(v, m)` for every non-root activation: its features
//! are taken against the cascade as it stood strictly before `t(v)`, with the
//! clock at `t(v)`. A negative instance is `(v, m)` where some parent of `v`
//! activated to `m` but `v` never did; its features are taken against the full
//! cascade at the time of its last event.

use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::cascade::{CascadeState, Corpus, Message};
use crate::exec::rng_from;
use crate::features::{extract, FEATURE_COUNT, FEATURE_NAMES};
use crate::graph::{NodeId, Topology};
use crate::learners::Dataset;
use crate::{Env, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Instance {
    pub cascade: usize,
    pub node: NodeId,
    /// Clock value at which features are evaluated.
    pub time: f64,
    pub label: i8,
}

/// All positive and negative instances of the corpus, before balancing.
pub fn enumerate_instances<G: Topology + ?Sized>(
    g: &G,
    corpus: &Corpus,
) -> Result<(Vec<Instance>, Vec<Instance>)> {
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for (ci, c) in corpus.cascades.iter().enumerate() {
        let Some(t_last) = c.last_time() else {
            continue;
        };
        let full = CascadeState::observe_prefix(g, c, c.len())?;
        for e in &c.events {
            // Roots have no activated parent strictly before their own time.
            let exposed = g
                .parents(e.node)
                .iter()
                .any(|&p| full.activation_time(p).is_some_and(|tp| tp < e.t));
            if exposed {
                pos.push(Instance {
                    cascade: ci,
                    node: e.node,
                    time: e.t,
                    label: 1,
                });
            }
        }
        for &v in full.susceptible() {
            neg.push(Instance {
                cascade: ci,
                node: v,
                time: t_last,
                label: -1,
            });
        }
    }
    Ok((pos, neg))
}

const SAMPLE_TAG: u64 = 0x5A_4D_50;

/// Downsamples the larger class to the size of the smaller one (optionally
/// capped at `cap` per class). Output is ordered by cascade, time, node.
pub fn balance(
    mut pos: Vec<Instance>,
    mut neg: Vec<Instance>,
    seed: u64,
    cap: Option<usize>,
) -> Result<Vec<Instance>> {
    if pos.is_empty() {
        return Err(Error::NoInstances("positive"));
    }
    if neg.is_empty() {
        return Err(Error::NoInstances("negative"));
    }
    let k = pos.len().min(neg.len()).min(cap.unwrap_or(usize::MAX));
    let mut r = rng_from(seed, SAMPLE_TAG, 0);
    if pos.len() > k {
        pos.shuffle(&mut r);
        pos.truncate(k);
    }
    if neg.len() > k {
        neg.shuffle(&mut r);
        neg.truncate(k);
    }
    let mut all = pos;
    all.extend(neg);
    all.sort_by(|a, b| {
        a.cascade
            .cmp(&b.cascade)
            .then(a.time.total_cmp(&b.time))
            .then(a.node.cmp(&b.node))
            .then(b.label.cmp(&a.label))
    });
    Ok(all)
}

/// Evaluates `f` on each instance's frozen state, returning rows in input
/// order. States are grown incrementally per cascade.
pub fn featurize<G, F>(g: &G, corpus: &Corpus, instances: &[Instance], mut f: F) -> Result<Vec<Vec<f64>>>
where
    G: Topology + ?Sized,
    F: FnMut(&CascadeState, &Message, NodeId) -> Result<Vec<f64>>,
{
    let mut order: Vec<usize> = (0..instances.len()).collect();
    order.sort_by(|&a, &b| {
        let (x, y) = (&instances[a], &instances[b]);
        x.cascade
            .cmp(&y.cascade)
            .then(y.label.cmp(&x.label))
            .then(x.time.total_cmp(&y.time))
    });
    let mut rows: Vec<Option<Vec<f64>>> = alloc::vec![None; instances.len()];
    let mut i = 0;
    while i < order.len() {
        let ci = instances[order[i]].cascade;
        let c = &corpus.cascades[ci];
        let m = &corpus.messages[ci];
        let mut state = CascadeState::empty(g.node_count(), c.message_id.clone(), 0.0);
        let mut next = 0;
        while i < order.len() && instances[order[i]].cascade == ci {
            let inst = &instances[order[i]];
            if inst.label == 1 {
                while next < c.len() && c.events[next].t < inst.time {
                    state.activate(g, c.events[next].node, c.events[next].t)?;
                    next += 1;
                }
            } else {
                while next < c.len() {
                    state.activate(g, c.events[next].node, c.events[next].t)?;
                    next += 1;
                }
            }
            state.now = inst.time;
            rows[order[i]] = Some(f(&state, m, inst.node)?);
            i += 1;
        }
    }
    Ok(rows.into_iter().map(|r| r.unwrap_or_default()).collect())
}

pub fn feature_names() -> Vec<alloc::string::String> {
    FEATURE_NAMES.iter().map(|s| (*s).into()).collect()
}

/// Balanced dataset over the 18 canonical features.
pub fn build_instances<G: Topology + ?Sized>(
    env: Env<'_, G>,
    seed: u64,
    cap: Option<usize>,
) -> Result<(Dataset, Vec<Instance>)> {
    if env.corpus.is_empty() {
        return Err(Error::NoInstances("corpus"));
    }
    let (pos, neg) = enumerate_instances(env.graph, env.corpus)?;
    let inst = balance(pos, neg, seed, cap)?;
    let rows = featurize(env.graph, env.corpus, &inst, |s, m, v| {
        Ok(extract(env, s, v, m)?.0.to_vec())
    })?;
    let y = inst.iter().map(|i| i.label).collect();
    debug_assert!(rows.iter().all(|r| r.len() == FEATURE_COUNT));
    Ok((Dataset::new(rows, y, feature_names())?, inst))
}
