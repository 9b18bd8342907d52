//! Synthetic follower graphs and cascades with a planted activation rule.
//!
//! The graph grows by directed preferential attachment with triadic closure
//! and reciprocation. Each message starts at a popular root; whenever a node
//! activates, each inactive follower that is not already scheduled draws once
//! against the planted rule (evaluated on the core feature set at that
//! instant) and, on success, activates after an exponential delay.

use std::collections::BTreeSet;

use fscale_core::exec::{rng_from, Rng};
use fscale_core::features::{extract, FEATURE_NAMES};
use fscale_core::graph::GraphBuilder;
use fscale_core::{
    ActivationModel, Cascade, CascadeState, Corpus, Env, Message, NodeId, Profiles, SocialGraph, Topology, UserProfile,
};
use rand::seq::IndexedRandom;
use rand::Rng as _;
use rand_distr::{Distribution, Exp, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{DataSet, Manifest};

const DAY: f64 = 86_400.0;

/// How a node exposed to a message decides whether to reshare it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "lowercase")]
pub enum PlantedRule {
    /// Logistic in the named core features (raw units).
    Logistic { bias: f64, weights: Vec<(String, f64)> },
    /// Reshare once at least `theta` followed accounts have.
    Threshold { theta: usize },
}

impl PlantedRule {
    /// The default rule: the message's age and the time since exposure
    /// dominate, followed by the share of followed accounts that already
    /// reshared and the interest match.
    pub fn default_logistic() -> Self {
        PlantedRule::Logistic {
            bias: 6.0,
            weights: vec![
                ("IntSim".into(), -2.0),
                ("AvgExpT".into(), -6.0 / 3600.0),
                ("SurT".into(), -3.0 / 3600.0),
                ("SocialReR".into(), 3.0),
                ("VerSta".into(), 1.0),
            ],
        }
    }

    /// The rule as an activation model, for use as an oracle in the engine.
    pub fn model(&self) -> Result<PlantedModel> {
        Ok(PlantedModel(self.resolve()?))
    }

    fn resolve(&self) -> Result<Resolved> {
        match self {
            PlantedRule::Threshold { theta } => Ok(Resolved::Threshold(*theta)),
            PlantedRule::Logistic { bias, weights } => {
                let mut w = Vec::new();
                for (name, x) in weights {
                    let j = FEATURE_NAMES
                        .iter()
                        .position(|n| n == name)
                        .ok_or_else(|| Error::Invalid(format!("unknown feature `{name}` in planted rule")))?;
                    w.push((j, *x));
                }
                Ok(Resolved::Logistic(*bias, w))
            }
        }
    }
}

/// A planted rule hosted by the engine.
pub struct PlantedModel(Resolved);

impl ActivationModel for PlantedModel {
    fn activation_probability(
        &self,
        env: Env<'_>,
        state: &CascadeState,
        message: &Message,
        v: NodeId,
    ) -> fscale_core::Result<f64> {
        self.0.probability(env, state, message, v).map_err(|e| match e {
            Error::Core(e) => e,
            other => fscale_core::Error::Domain(other.to_string()),
        })
    }
}

enum Resolved {
    Logistic(f64, Vec<(usize, f64)>),
    Threshold(usize),
}

impl Resolved {
    fn probability(&self, env: Env<'_>, state: &CascadeState, m: &Message, v: NodeId) -> Result<f64> {
        match self {
            Resolved::Threshold(theta) => {
                let k = env.graph.parents(v).iter().filter(|&&p| state.is_active(p)).count();
                Ok(if k >= *theta { 1.0 } else { 0.0 })
            }
            Resolved::Logistic(bias, w) => {
                let x = extract(env, state, v, m)?;
                let z = bias + w.iter().map(|&(j, c)| c * x.0[j]).sum::<f64>();
                Ok(fscale_core::learners::logreg::sigmoid(z))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub nodes: usize,
    pub messages: usize,
    pub seed: u64,
    /// Accounts each new node follows.
    pub follows: usize,
    /// Chance that a followed account follows back.
    pub reciprocity: f64,
    /// Chance that a follow goes to an account followed by a followee.
    pub triadic: f64,
    pub topics: usize,
    /// Dirichlet concentration of interests and message topics.
    pub concentration: f64,
    pub verified_share: f64,
    /// Share of users without an interest profile.
    pub cold_share: f64,
    /// Length of a growth round, seconds.
    pub round: f64,
    /// Mean delay between a successful draw and the reshare, seconds.
    pub mean_delay: f64,
    /// Gap between consecutive message origins, seconds.
    pub spacing: f64,
    /// Activity is cut off this long after a message's origin, seconds.
    pub max_duration: f64,
    /// Accounts active at the origin: the root plus `roots - 1` of its
    /// followers.
    pub roots: usize,
    pub rule: PlantedRule,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            nodes: 1000,
            messages: 200,
            seed: 0,
            follows: 6,
            reciprocity: 0.3,
            triadic: 0.5,
            topics: 8,
            concentration: 0.3,
            verified_share: 0.05,
            cold_share: 0.0,
            round: 300.0,
            mean_delay: 600.0,
            spacing: 1800.0,
            max_duration: 5.0 * DAY,
            roots: 1,
            rule: PlantedRule::default_logistic(),
        }
    }
}

impl SynthConfig {
    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Invalid(m.into()));
        if self.nodes < self.follows + 2 {
            return bad("need more nodes than follows per node");
        }
        if self.follows == 0 || self.topics == 0 || self.roots == 0 {
            return bad("follows, topics and roots must be positive");
        }
        for p in [self.reciprocity, self.triadic, self.verified_share, self.cold_share] {
            if !(0.0..=1.0).contains(&p) {
                return bad("probabilities must lie in [0, 1]");
            }
        }
        if !(self.concentration > 0.0 && self.round > 0.0 && self.mean_delay > 0.0 && self.max_duration > 0.0) {
            return bad("concentration, round, delay and duration must be positive");
        }
        Ok(())
    }
}

const GRAPH_TAG: u64 = 1;
const PROFILE_TAG: u64 = 2;
const MESSAGE_TAG: u64 = 3;
const CASCADE_TAG: u64 = 4;

/// Directed preferential attachment. Returns `(child, parent)` edges over
/// nodes `0..n`.
pub fn follower_graph(cfg: &SynthConfig) -> SocialGraph {
    let mut rng = rng_from(cfg.seed, GRAPH_TAG, 0);
    let n = cfg.nodes;
    let core = cfg.follows + 1;
    let mut follows: Vec<Vec<u32>> = vec![Vec::new(); n];
    // Each node appears once, plus once per follower.
    let mut pool: Vec<u32> = Vec::new();
    let add = |follows: &mut Vec<Vec<u32>>, pool: &mut Vec<u32>, c: u32, p: u32| -> bool {
        if c == p || follows[c as usize].contains(&p) {
            return false;
        }
        follows[c as usize].push(p);
        pool.push(p);
        true
    };
    for u in 0..core as u32 {
        pool.push(u);
        for v in 0..u {
            add(&mut follows, &mut pool, u, v);
            add(&mut follows, &mut pool, v, u);
        }
    }
    for u in core as u32..n as u32 {
        pool.push(u);
        let mut made = 0;
        let mut tries = 0;
        while made < cfg.follows && tries < 50 * cfg.follows {
            tries += 1;
            let own = &follows[u as usize];
            let target = if !own.is_empty() && rng.random::<f64>() < cfg.triadic {
                let via = *own.choose(&mut rng).unwrap_or(&0);
                match follows[via as usize].choose(&mut rng) {
                    Some(&t) => t,
                    None => continue,
                }
            } else {
                pool[rng.random_range(0..pool.len())]
            };
            if add(&mut follows, &mut pool, u, target) {
                made += 1;
                if rng.random::<f64>() < cfg.reciprocity {
                    add(&mut follows, &mut pool, target, u);
                }
            }
        }
    }
    let mut b = GraphBuilder::new();
    for u in 0..n {
        b.add_node(&u.to_string());
    }
    for (c, ps) in follows.iter().enumerate() {
        for &p in ps {
            b.add_edge(NodeId(c as u32), NodeId(p));
        }
    }
    b.build().0
}

fn dirichlet(rng: &mut Rng, k: usize, alpha: f64) -> Vec<f64> {
    let gamma = Gamma::new(alpha, 1.0).expect("positive shape");
    loop {
        let x: Vec<f64> = (0..k).map(|_| gamma.sample(rng)).collect();
        let s: f64 = x.iter().sum();
        if s > 0.0 && s.is_finite() {
            let mut p: Vec<f64> = x.iter().map(|v| v / s).collect();
            // Make the entries sum to 1 to within rounding.
            let rest: f64 = p[..k - 1].iter().sum();
            p[k - 1] = (1.0 - rest).max(0.0);
            return p;
        }
    }
}

fn profiles(cfg: &SynthConfig, g: &SocialGraph) -> Result<Profiles> {
    let mut rng = rng_from(cfg.seed, PROFILE_TAG, 0);
    let mut p = Profiles::new(g.len());
    for v in g.nodes() {
        let verified = rng.random::<f64>() < cfg.verified_share;
        let account_created = -rng.random::<f64>() * 3.0 * 365.0 * DAY;
        let cold = rng.random::<f64>() < cfg.cold_share;
        let interest = dirichlet(&mut rng, cfg.topics, cfg.concentration);
        p.insert(UserProfile {
            node: v,
            verified,
            account_created,
            interest: (!cold).then_some(interest),
        })?;
    }
    Ok(p)
}

/// Exposed nodes whose chance stays below this are treated as lost.
const DORMANT: f64 = 1e-3;

/// Grows one cascade in synchronous rounds. Every round, each exposed node
/// that has not yet committed draws against the rule on the state at the
/// start of the round; a successful draw activates the node after an
/// exponential delay. The cascade ends when nothing is pending and no exposed
/// node has a chance above `DORMANT`.
fn grow(
    cfg: &SynthConfig,
    rule: &Resolved,
    env: Env<'_>,
    message: &Message,
    root: NodeId,
    index: usize,
) -> Result<Cascade> {
    let g = env.graph;
    let mut rng = rng_from(cfg.seed, CASCADE_TAG, index as u64);
    let delay = Exp::new(1.0 / cfg.mean_delay).map_err(|e| Error::Invalid(e.to_string()))?;
    let origin = message.origin_time;
    let mut state = CascadeState::empty(g.len(), message.message_id.clone(), origin);
    // Times are non-negative offsets, so bit patterns order like the floats.
    let key = |t: f64| (t - origin).to_bits();
    let mut pending: BTreeSet<(u64, NodeId)> = BTreeSet::new();
    let mut committed = vec![false; g.len()];
    pending.insert((key(origin), root));
    committed[root.index()] = true;
    let mut extra: Vec<NodeId> = g.children(root).to_vec();
    extra.sort_unstable();
    let co_roots: Vec<NodeId> = extra
        .choose_multiple(&mut rng, cfg.roots.saturating_sub(1))
        .copied()
        .collect();
    for v in co_roots {
        pending.insert((key(origin), v));
        committed[v.index()] = true;
    }
    let end = origin + cfg.max_duration;
    let mut round = 0u64;
    loop {
        let t = origin + round as f64 * cfg.round;
        if t > end {
            break;
        }
        while let Some(&(k, v)) = pending.first() {
            let at = origin + f64::from_bits(k);
            if at > t || at > end {
                break;
            }
            pending.pop_first();
            state.activate(g, v, at)?;
        }
        state.now = t;
        let exposed: Vec<NodeId> = state.susceptible().iter().copied().filter(|v| !committed[v.index()]).collect();
        let probs = exposed
            .iter()
            .map(|&v| rule.probability(env, &state, message, v))
            .collect::<Result<Vec<_>>>()?;
        let live = probs.iter().any(|&p| p >= DORMANT);
        for (&v, &p) in exposed.iter().zip(&probs) {
            if rng.random::<f64>() < p {
                committed[v.index()] = true;
                pending.insert((key(t + delay.sample(&mut rng)), v));
            }
        }
        if pending.is_empty() && !live {
            break;
        }
        round += 1;
    }
    Ok(state.cascade)
}

/// Generates a complete data set.
pub fn generate(cfg: &SynthConfig) -> Result<DataSet> {
    cfg.validate()?;
    let rule = cfg.rule.resolve()?;
    let graph = follower_graph(cfg);
    let profiles = profiles(cfg, &graph)?;
    let mut rng = rng_from(cfg.seed, MESSAGE_TAG, 0);
    let mut messages = Vec::with_capacity(cfg.messages);
    let mut roots = Vec::with_capacity(cfg.messages);
    for i in 0..cfg.messages {
        messages.push(Message {
            message_id: format!("m{i:04}"),
            content_length: rng.random_range(5..=140),
            has_keyword: rng.random::<f64>() < 0.3,
            topic: dirichlet(&mut rng, cfg.topics, cfg.concentration),
            origin_time: i as f64 * cfg.spacing + rng.random::<f64>() * cfg.spacing,
        });
        roots.push(NodeId(rng.random_range(0..graph.len() as u32)));
    }
    // The rule sees an empty history corpus, so message-count features only
    // reflect the current exposure.
    let history = Corpus::new(graph.len(), messages.clone(), Vec::new())?;
    let env = Env::new(&graph, &history, &profiles);
    let cascades = messages
        .iter()
        .zip(&roots)
        .enumerate()
        .map(|(i, (m, &r))| grow(cfg, &rule, env, m, r, i))
        .collect::<Result<Vec<_>>>()?;
    let corpus = Corpus::new(graph.len(), messages, cascades)?;
    let manifest = Manifest {
        nodes: graph.len(),
        edges: graph.edge_count(),
        messages: corpus.len(),
        events: corpus.cascades.iter().map(Cascade::len).sum(),
        generator: Some(serde_json::to_value(cfg)?),
    };
    Ok(DataSet {
        graph,
        corpus,
        profiles,
        manifest,
    })
}
