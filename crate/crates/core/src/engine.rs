//! Asynchronous shell-wise propagation of a partially observed cascade.
//!
//! Each step partitions the susceptible frontier `N` into independent nodes
//! and correlated sets (connected components of the frontier-induced
//! subgraph), updates every independent node plus one uniformly chosen member
//! of each correlated set, and advances the clock by `|IN| / |N| * delta_t`.
//! All decisions within a step read the frozen pre-step state, so the order in
//! which members of `IN` are evaluated never matters.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::cascade::{CascadeState, Message};
use crate::exec::{rng_from, Executor, Rng};
use crate::graph::{NodeId, SocialGraph, Topology};
use crate::{Env, Error, Result};

/// Anything that can score a susceptible node's chance of activating.
pub trait ActivationModel<G: Topology + ?Sized = SocialGraph>: Sync {
    fn activation_probability(
        &self,
        env: Env<'_, G>,
        state: &CascadeState,
        message: &Message,
        v: NodeId,
    ) -> Result<f64>;
}

impl<G: Topology + ?Sized, M: ActivationModel<G> + ?Sized> ActivationModel<G> for &M {
    fn activation_probability(
        &self,
        env: Env<'_, G>,
        state: &CascadeState,
        message: &Message,
        v: NodeId,
    ) -> Result<f64> {
        (**self).activation_probability(env, state, message, v)
    }
}

/// Adapts a closure into an [`ActivationModel`].
pub struct FnModel<F>(pub F);

impl<G, F> ActivationModel<G> for FnModel<F>
where
    G: Topology + ?Sized,
    F: Fn(Env<'_, G>, &CascadeState, &Message, NodeId) -> Result<f64> + Sync,
{
    fn activation_probability(
        &self,
        env: Env<'_, G>,
        state: &CascadeState,
        message: &Message,
        v: NodeId,
    ) -> Result<f64> {
        (self.0)(env, state, message, v)
    }
}

/// Activates a node once at least `theta` of its parents are active.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdRule {
    pub theta: usize,
}

impl<G: Topology + ?Sized> ActivationModel<G> for ThresholdRule {
    fn activation_probability(
        &self,
        env: Env<'_, G>,
        state: &CascadeState,
        _message: &Message,
        v: NodeId,
    ) -> Result<f64> {
        let active = env.graph.parents(v).iter().filter(|&&p| state.is_active(p)).count();
        Ok(if active >= self.theta { 1.0 } else { 0.0 })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SimMode {
    /// Activate iff the probability exceeds 0.5.
    #[default]
    Deterministic,
    /// Activate with the given probability.
    Bernoulli,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Time advanced by a step that updates the whole frontier, in seconds.
    pub delta_t: f64,
    /// Prediction window after the newest observed event, in seconds.
    pub horizon: f64,
    pub seed: u64,
    pub mode: SimMode,
    /// Quiet steps required before declaring convergence.
    pub patience: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            delta_t: 300.0,
            horizon: 432_000.0,
            seed: 0,
            mode: SimMode::Deterministic,
            patience: 3,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta_t > 0.0 && self.delta_t.is_finite()) {
            return Err(Error::param("delta_t must be positive"));
        }
        if !(self.horizon >= 0.0 && self.horizon.is_finite()) {
            return Err(Error::param("horizon must be non-negative"));
        }
        if self.patience == 0 {
            return Err(Error::param("patience must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ShellPartition {
    /// Frontier nodes with no frontier neighbor, ascending.
    pub independent: Vec<NodeId>,
    /// Components of size two or more, each ascending, ordered by first node.
    pub correlated: Vec<Vec<NodeId>>,
}

impl ShellPartition {
    pub fn len(&self) -> usize {
        self.independent.len() + self.correlated.iter().map(Vec::len).sum::<usize>()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Splits the susceptible frontier into connected components, ignoring edge
/// direction.
pub fn partition_susceptible<G: Topology + ?Sized>(g: &G, state: &CascadeState) -> ShellPartition {
    let nodes: Vec<NodeId> = state.susceptible().iter().copied().collect();
    let mut parent: Vec<usize> = (0..nodes.len()).collect();
    for (i, &u) in nodes.iter().enumerate() {
        for c in g.children(u) {
            if let Ok(j) = nodes.binary_search(c) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    // Roots are the smallest index of their component, so visiting in index
    // order yields components ordered by their first node.
    let mut slot = alloc::vec![usize::MAX; nodes.len()];
    let mut groups: Vec<Vec<NodeId>> = Vec::new();
    for (i, &v) in nodes.iter().enumerate() {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(v);
    }
    let mut p = ShellPartition::default();
    for grp in groups {
        if grp.len() == 1 {
            p.independent.push(grp[0]);
        } else {
            p.correlated.push(grp);
        }
    }
    p
}

/// All independent nodes plus one uniformly drawn member of each correlated
/// set, ascending.
pub fn select_update_set(p: &ShellPartition, rng: &mut Rng) -> Vec<NodeId> {
    let mut out = p.independent.clone();
    for set in &p.correlated {
        out.push(set[rng.random_range(0..set.len())]);
    }
    out.sort_unstable();
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub n_susceptible: usize,
    pub n_update: usize,
    pub delta_t: f64,
    pub activations: usize,
    /// Clock after the step.
    pub time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    /// Newly activated nodes, ascending.
    pub activated: Vec<NodeId>,
    pub delta_t: f64,
    pub n_susceptible: usize,
    pub n_update: usize,
}

/// Advances `state` by one step using an explicit update set.
///
/// `update` must be a non-empty subset of the current frontier. Bernoulli
/// draws are taken from `rng` in ascending node order.
#[allow(clippy::too_many_arguments)]
pub fn step_with_update_set<G, M>(
    env: Env<'_, G>,
    state: &mut CascadeState,
    message: &Message,
    model: &M,
    cfg: &SimConfig,
    update: &[NodeId],
    rng: &mut Rng,
    exec: &dyn Executor,
) -> Result<StepOutcome>
where
    G: Topology + Sync + ?Sized,
    M: ActivationModel<G> + ?Sized,
{
    let n = state.susceptible().len();
    if n == 0 {
        return Err(Error::domain("no susceptible nodes"));
    }
    if update.is_empty() {
        return Err(Error::domain("empty update set"));
    }
    if let Some(v) = update.iter().find(|v| !state.susceptible().contains(v)) {
        return Err(Error::domain(alloc::format!("node {v} is not susceptible")));
    }
    let frozen: &CascadeState = state;
    let probs = exec.map(update.len(), &|i| {
        model.activation_probability(env, frozen, message, update[i])
    })?;
    let mut order: Vec<usize> = (0..update.len()).collect();
    order.sort_by_key(|&i| update[i]);
    let mut activated = Vec::new();
    for i in order {
        let p = probs[i];
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::domain(alloc::format!("probability {p} outside [0, 1]")));
        }
        let on = match cfg.mode {
            SimMode::Deterministic => p > 0.5,
            SimMode::Bernoulli => rng.random::<f64>() < p,
        };
        if on {
            activated.push(update[i]);
        }
    }
    let delta_t = update.len() as f64 / n as f64 * cfg.delta_t;
    let t = state.now + delta_t;
    for &v in &activated {
        state.activate(env.graph, v, t)?;
    }
    state.now = t;
    Ok(StepOutcome {
        activated,
        delta_t,
        n_susceptible: n,
        n_update: update.len(),
    })
}

/// One step with a freshly drawn update set.
pub fn step<G, M>(
    env: Env<'_, G>,
    state: &mut CascadeState,
    message: &Message,
    model: &M,
    cfg: &SimConfig,
    rng: &mut Rng,
    exec: &dyn Executor,
) -> Result<StepOutcome>
where
    G: Topology + Sync + ?Sized,
    M: ActivationModel<G> + ?Sized,
{
    let p = partition_susceptible(env.graph, state);
    let update = select_update_set(&p, rng);
    step_with_update_set(env, state, message, model, cfg, &update, rng, exec)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StopReason {
    /// The clock passed the end of the prediction window.
    Horizon,
    /// No susceptible node is left.
    Exhausted,
    /// Nothing activated for `patience` steps and every frontier node was
    /// evaluated since the last activation.
    Converged,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub state: CascadeState,
    pub trace: Vec<StepRecord>,
    pub stop: StopReason,
}

const ENGINE_TAG: u64 = 0xE6_1E;

/// Grows an observed cascade until the window `[t_new, t_new + horizon)` is
/// used up, the frontier empties, or the process converges. `t_new` is the
/// newest observed timestamp.
pub fn run<G, M>(
    env: Env<'_, G>,
    observed: &CascadeState,
    message: &Message,
    model: &M,
    cfg: &SimConfig,
    exec: &dyn Executor,
) -> Result<RunOutcome>
where
    G: Topology + Sync + ?Sized,
    M: ActivationModel<G> + ?Sized,
{
    cfg.validate()?;
    let t_new = observed
        .cascade
        .last_time()
        .ok_or_else(|| Error::domain("observed cascade has no events"))?;
    let end = t_new + cfg.horizon;
    let mut state = observed.clone();
    state.now = t_new;
    let mut rng = rng_from(cfg.seed, ENGINE_TAG, 0);
    let mut trace = Vec::new();
    let mut quiet = 0usize;
    let mut evaluated: BTreeSet<NodeId> = BTreeSet::new();
    let mut partition: Option<ShellPartition> = None;
    let stop = loop {
        if state.susceptible().is_empty() {
            break StopReason::Exhausted;
        }
        if state.now >= end {
            break StopReason::Horizon;
        }
        if quiet >= cfg.patience && evaluated.len() == state.susceptible().len() {
            break StopReason::Converged;
        }
        let p = partition.get_or_insert_with(|| partition_susceptible(env.graph, &state));
        let update = select_update_set(p, &mut rng);
        let out = step_with_update_set(env, &mut state, message, model, cfg, &update, &mut rng, exec)?;
        if out.activated.is_empty() {
            quiet += 1;
            evaluated.extend(update.iter().copied());
        } else {
            quiet = 0;
            evaluated.clear();
            partition = None;
        }
        trace.push(StepRecord {
            step: trace.len(),
            n_susceptible: out.n_susceptible,
            n_update: out.n_update,
            delta_t: out.delta_t,
            activations: out.activated.len(),
            time: state.now,
        });
    };
    Ok(RunOutcome { state, trace, stop })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cascade::{Cascade, Corpus, Profiles};
    use crate::exec::{rng, Sequential};
    use alloc::vec;

    fn msg() -> Message {
        Message {
            message_id: "m".into(),
            content_length: 10,
            has_keyword: false,
            topic: vec![1.0],
            origin_time: 0.0,
        }
    }

    /// Frontier {0..8} below an active root 12, with frontier edges 1-2, the
    /// 4-5-6 triangle and 7-8; deeper nodes 9..11 hang below 0, 2, 5 and 10.
    fn shell_graph() -> SocialGraph {
        let mut e: Vec<(u32, u32)> = (0..9).map(|v| (v, 12)).collect();
        e.extend([(2, 1), (5, 4), (6, 5), (4, 6), (8, 7)]);
        e.extend([(9, 0), (10, 2), (11, 5), (11, 10)]);
        SocialGraph::from_edges(13, &e)
    }

    fn ids(v: &[u32]) -> Vec<NodeId> {
        v.iter().map(|&i| NodeId(i)).collect()
    }

    fn observed(g: &SocialGraph) -> CascadeState {
        let c = Cascade::from_pairs("m", &[(12, 0.0)]);
        CascadeState::observe_prefix(g, &c, 1).unwrap()
    }

    #[test]
    fn partition_matches_shell_example() {
        let g = shell_graph();
        let p = partition_susceptible(&g, &observed(&g));
        assert_eq!(p.independent, ids(&[0, 3]));
        assert_eq!(p.correlated, vec![ids(&[1, 2]), ids(&[4, 5, 6]), ids(&[7, 8])]);
    }

    #[test]
    fn no_frontier_edges_gives_all_independent() {
        let g = SocialGraph::from_edges(4, &[(1, 0), (2, 0), (3, 0)]);
        let s = CascadeState::observe_prefix(&g, &Cascade::from_pairs("m", &[(0, 0.0)]), 1).unwrap();
        let p = partition_susceptible(&g, &s);
        assert_eq!(p.independent, ids(&[1, 2, 3]));
        assert!(p.correlated.is_empty());
        assert_eq!(select_update_set(&p, &mut rng(1)), ids(&[1, 2, 3]));
    }

    #[test]
    fn shell_walkthrough_time_increments() {
        let g = shell_graph();
        let corpus = Corpus::new(13, vec![msg()], vec![]).unwrap();
        let profiles = Profiles::new(13);
        let env = Env::new(&g, &corpus, &profiles);
        let mut s = observed(&g);
        let cfg = SimConfig::default();
        let fires = ids(&[0, 2, 3, 5]);
        let model = FnModel(|_: Env<'_, SocialGraph>, _: &CascadeState, _: &Message, v: NodeId| {
            Ok(if fires.contains(&v) { 1.0 } else { 0.0 })
        });
        let mut r = rng(0);
        let out = step_with_update_set(env, &mut s, &msg(), &model, &cfg, &ids(&[0, 2, 3, 5, 8]), &mut r, &Sequential)
            .unwrap();
        assert_eq!(out.activated, ids(&[0, 2, 3, 5]));
        assert_eq!(out.n_susceptible, 9);
        assert!((out.delta_t - 5.0 / 9.0 * 300.0).abs() < 1e-12);
        assert_eq!(s.activation_time(NodeId(0)), Some(5.0 / 9.0 * 300.0));
        let p = partition_susceptible(&g, &s);
        assert_eq!(p.len(), 8);
        let update = select_update_set(&p, &mut r);
        assert_eq!(update.len(), 5);
        let out = step_with_update_set(env, &mut s, &msg(), &model, &cfg, &update, &mut r, &Sequential).unwrap();
        assert_eq!(out.n_susceptible, 8);
        assert!((out.delta_t - 5.0 / 8.0 * 300.0).abs() < 1e-12);
    }

    #[test]
    fn silent_model_still_advances_time() {
        let g = shell_graph();
        let corpus = Corpus::new(13, vec![msg()], vec![]).unwrap();
        let profiles = Profiles::new(13);
        let env = Env::new(&g, &corpus, &profiles);
        let mut s = observed(&g);
        let model = FnModel(|_: Env<'_, SocialGraph>, _: &CascadeState, _: &Message, _| Ok(0.0));
        let out = step(env, &mut s, &msg(), &model, &SimConfig::default(), &mut rng(3), &Sequential).unwrap();
        assert!(out.activated.is_empty());
        assert!(s.now > 0.0);
        assert_eq!(s.activated_count(), 1);
    }

    #[test]
    fn zero_horizon_runs_no_steps() {
        let g = shell_graph();
        let corpus = Corpus::new(13, vec![msg()], vec![]).unwrap();
        let profiles = Profiles::new(13);
        let env = Env::new(&g, &corpus, &profiles);
        let s = observed(&g);
        let cfg = SimConfig {
            horizon: 0.0,
            ..SimConfig::default()
        };
        let out = run(env, &s, &msg(), &ThresholdRule { theta: 1 }, &cfg, &Sequential).unwrap();
        assert!(out.trace.is_empty());
        assert_eq!(out.state.cascade, s.cascade);
        assert_eq!(out.stop, StopReason::Horizon);
    }

    #[test]
    fn threshold_one_floods_reachable_set() {
        let g = shell_graph();
        let corpus = Corpus::new(13, vec![msg()], vec![]).unwrap();
        let profiles = Profiles::new(13);
        let env = Env::new(&g, &corpus, &profiles);
        let out = run(env, &observed(&g), &msg(), &ThresholdRule { theta: 1 }, &SimConfig::default(), &Sequential)
            .unwrap();
        assert_eq!(out.state.activated_count(), 13);
        assert_eq!(out.stop, StopReason::Exhausted);
    }

    #[test]
    fn rejects_bad_config_and_update_sets() {
        assert!(SimConfig { delta_t: 0.0, ..SimConfig::default() }.validate().is_err());
        assert!(SimConfig { patience: 0, ..SimConfig::default() }.validate().is_err());
        let g = shell_graph();
        let corpus = Corpus::new(13, vec![msg()], vec![]).unwrap();
        let profiles = Profiles::new(13);
        let env = Env::new(&g, &corpus, &profiles);
        let mut s = observed(&g);
        let rule = ThresholdRule { theta: 1 };
        let cfg = SimConfig::default();
        let bad = step_with_update_set(env, &mut s, &msg(), &rule, &cfg, &ids(&[12]), &mut rng(0), &Sequential);
        assert!(bad.is_err());
    }
}
