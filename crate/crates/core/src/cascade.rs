//! Cascades, messages, user profiles and the live simulation state.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::graph::{NodeId, Topology};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub node: NodeId,
    pub t: f64,
}

/// Activation sequence of one message: time-ordered, each node at most once.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cascade {
    pub message_id: String,
    pub events: Vec<Event>,
}

impl Cascade {
    pub fn new(message_id: impl Into<String>, events: Vec<Event>) -> Self {
        Cascade {
            message_id: message_id.into(),
            events,
        }
    }

    /// Builds a cascade from `(node, t)` pairs, as in tests and fixtures.
    pub fn from_pairs(message_id: impl Into<String>, pairs: &[(u32, f64)]) -> Self {
        Cascade::new(
            message_id,
            pairs.iter().map(|&(v, t)| Event { node: NodeId(v), t }).collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn first_time(&self) -> Option<f64> {
        self.events.first().map(|e| e.t)
    }

    pub fn last_time(&self) -> Option<f64> {
        self.events.last().map(|e| e.t)
    }

    /// Checks ordering, uniqueness, finiteness and node range.
    pub fn validate(&self, n: usize) -> Result<()> {
        let bad = |msg: String| Error::InvalidCascade {
            id: self.message_id.clone(),
            msg,
        };
        let mut seen = BTreeSet::new();
        let mut last = f64::NEG_INFINITY;
        for e in &self.events {
            if !e.t.is_finite() {
                return Err(bad(format!("non-finite timestamp for node {}", e.node)));
            }
            if e.t < last {
                return Err(bad(format!("timestamps decrease at node {}", e.node)));
            }
            if e.node.index() >= n {
                return Err(Error::NodeOutOfRange(e.node));
            }
            if !seen.insert(e.node) {
                return Err(bad(format!("node {} activated twice", e.node)));
            }
            last = e.t;
        }
        Ok(())
    }

    /// Sorts events by time (stable, so equal timestamps keep input order).
    pub fn sort(&mut self) {
        self.events.sort_by(|a, b| a.t.total_cmp(&b.t));
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Message {
    pub message_id: String,
    pub content_length: u32,
    pub has_keyword: bool,
    pub topic: Vec<f64>,
    pub origin_time: f64,
}

impl Message {
    pub fn validate(&self) -> Result<()> {
        check_distribution(&self.topic)
            .map_err(|e| Error::domain(format!("message `{}` topic: {e}", self.message_id)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserProfile {
    pub node: NodeId,
    pub verified: bool,
    pub account_created: f64,
    /// Mean topic distribution of the user's history; `None` for cold users.
    pub interest: Option<Vec<f64>>,
}

pub(crate) fn check_distribution(p: &[f64]) -> core::result::Result<(), &'static str> {
    if p.iter().any(|&x| !x.is_finite() || x < 0.0) {
        return Err("entries must be finite and non-negative");
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > 1e-9 {
        return Err("entries must sum to 1");
    }
    Ok(())
}

/// Profiles indexed by node.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Profiles {
    slots: Vec<Option<UserProfile>>,
}

impl Profiles {
    pub fn new(n: usize) -> Self {
        Profiles {
            slots: alloc::vec![None; n],
        }
    }

    pub fn insert(&mut self, p: UserProfile) -> Result<()> {
        let slot = self
            .slots
            .get_mut(p.node.index())
            .ok_or(Error::NodeOutOfRange(p.node))?;
        if let Some(i) = &p.interest {
            check_distribution(i)
                .map_err(|e| Error::domain(format!("interest of node {}: {e}", p.node)))?;
        }
        *slot = Some(p);
        Ok(())
    }

    pub fn get(&self, v: NodeId) -> Result<&UserProfile> {
        self.slots
            .get(v.index())
            .and_then(Option::as_ref)
            .ok_or(Error::MissingProfile(v))
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &UserProfile> {
        self.slots.iter().flatten()
    }

    /// Fills missing interest vectors with the unweighted mean topic
    /// distribution of every message the user ever activated to. Users with
    /// no history stay cold.
    pub fn fill_interest_from_history(&mut self, corpus: &Corpus) {
        for slot in self.slots.iter_mut().flatten() {
            if slot.interest.is_some() {
                continue;
            }
            let acts = corpus.activations_of(slot.node);
            if acts.is_empty() {
                continue;
            }
            let k = corpus.messages[acts[0].0 as usize].topic.len();
            let mut mean = alloc::vec![0.0; k];
            for &(m, _) in acts {
                for (acc, x) in mean.iter_mut().zip(&corpus.messages[m as usize].topic) {
                    *acc += x;
                }
            }
            let inv = 1.0 / acts.len() as f64;
            mean.iter_mut().for_each(|x| *x *= inv);
            slot.interest = Some(mean);
        }
    }
}

/// All messages and their cascades, aligned by index, with a per-node
/// activation index.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub messages: Vec<Message>,
    pub cascades: Vec<Cascade>,
    by_node: Vec<Vec<(u32, f64)>>,
}

impl Corpus {
    /// Pairs each message with its cascade by id. Messages without a cascade
    /// get an empty one; a cascade without a message is an error.
    pub fn new(n: usize, messages: Vec<Message>, cascades: Vec<Cascade>) -> Result<Self> {
        let mut index = alloc::collections::BTreeMap::new();
        for (i, m) in messages.iter().enumerate() {
            m.validate()?;
            if index.insert(m.message_id.clone(), i).is_some() {
                return Err(Error::domain(format!("duplicate message `{}`", m.message_id)));
            }
        }
        let mut slots: Vec<Option<Cascade>> = alloc::vec![None; messages.len()];
        for c in cascades {
            c.validate(n)?;
            let i = *index
                .get(&c.message_id)
                .ok_or_else(|| Error::UnknownMessage(c.message_id.clone()))?;
            if slots[i].is_some() {
                return Err(Error::InvalidCascade {
                    id: c.message_id,
                    msg: "cascade given twice".into(),
                });
            }
            slots[i] = Some(c);
        }
        let cascades: Vec<Cascade> = slots
            .into_iter()
            .zip(&messages)
            .map(|(c, m)| c.unwrap_or_else(|| Cascade::new(m.message_id.clone(), Vec::new())))
            .collect();
        let mut by_node = alloc::vec![Vec::new(); n];
        for (mi, c) in cascades.iter().enumerate() {
            for e in &c.events {
                by_node[e.node.index()].push((mi as u32, e.t));
            }
        }
        for list in by_node.iter_mut() {
            list.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        }
        Ok(Corpus {
            messages,
            cascades,
            by_node,
        })
    }

    pub fn len(&self) -> usize {
        self.messages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.messages.is_empty()
    }

    pub fn node_count(&self) -> usize {
        self.by_node.len()
    }

    pub fn message_index(&self, id: &str) -> Option<usize> {
        self.messages.iter().position(|m| m.message_id == id)
    }

    /// `(message index, activation time)` for every activation of `v`,
    /// sorted by time.
    pub fn activations_of(&self, v: NodeId) -> &[(u32, f64)] {
        &self.by_node[v.index()]
    }

    fn activated_before(&self, v: NodeId, m: u32, t: f64) -> bool {
        self.by_node[v.index()]
            .iter()
            .take_while(|a| a.1 < t)
            .any(|a| a.0 == m)
    }

    /// History messages `HM_v` and candidate messages `CM_v` at time `t`:
    /// messages `v` activated to before `t`, and messages with an activated
    /// parent of `v` before `t` that `v` has not activated to. Both sorted.
    pub fn message_sets<G: Topology + ?Sized>(
        &self,
        g: &G,
        v: NodeId,
        t: f64,
    ) -> (Vec<usize>, Vec<usize>) {
        let history: Vec<usize> = self.by_node[v.index()]
            .iter()
            .take_while(|a| a.1 < t)
            .map(|a| a.0 as usize)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let candidates = self.candidate_set(g, v, t, None);
        (history, candidates.into_iter().map(|m| m as usize).collect())
    }

    fn candidate_set<G: Topology + ?Sized>(
        &self,
        g: &G,
        v: NodeId,
        t: f64,
        exclude: Option<usize>,
    ) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        for &p in g.parents(v) {
            for &(m, tp) in &self.by_node[p.index()] {
                if tp >= t {
                    break;
                }
                if Some(m as usize) == exclude || out.contains(&m) {
                    continue;
                }
                if !self.activated_before(v, m, t) {
                    out.insert(m);
                }
            }
        }
        out
    }

    /// `|CM_v|` at `t` counted over the corpus with message `exclude` left out.
    pub fn candidate_count_excluding<G: Topology + ?Sized>(
        &self,
        g: &G,
        v: NodeId,
        t: f64,
        exclude: Option<usize>,
    ) -> usize {
        self.candidate_set(g, v, t, exclude).len()
    }
}

/// Activation state of one message while a cascade is observed or simulated.
///
/// Invariants: `activated` matches `cascade.events`; `susceptible` is exactly
/// the set of inactive children of activated nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadeState {
    pub cascade: Cascade,
    activated_time: Vec<Option<f64>>,
    susceptible: BTreeSet<NodeId>,
    pub now: f64,
}

impl CascadeState {
    pub fn empty(n: usize, message_id: impl Into<String>, now: f64) -> Self {
        CascadeState {
            cascade: Cascade::new(message_id, Vec::new()),
            activated_time: alloc::vec![None; n],
            susceptible: BTreeSet::new(),
            now,
        }
    }

    /// Partially observed cascade `{v | t(v) < t}` with `now = t`.
    pub fn observe_before<G: Topology + ?Sized>(g: &G, c: &Cascade, t: f64) -> Result<Self> {
        let k = c.events.iter().take_while(|e| e.t < t).count();
        let mut s = Self::observe_prefix(g, c, k)?;
        s.now = t;
        Ok(s)
    }

    /// The first `k` events, with `now` set to the time of the last of them
    /// (or the first event's time when `k = 0`).
    pub fn observe_prefix<G: Topology + ?Sized>(g: &G, c: &Cascade, k: usize) -> Result<Self> {
        let k = k.min(c.events.len());
        let now = match k {
            0 => c.first_time().unwrap_or(0.0),
            _ => c.events[k - 1].t,
        };
        let mut s = Self::empty(g.node_count(), c.message_id.clone(), now);
        for e in &c.events[..k] {
            s.activate(g, e.node, e.t)?;
        }
        Ok(s)
    }

    /// The first `ceil(frac * len)` events (at least one), as used to seed a
    /// prediction from an early-stage observation.
    pub fn observe_fraction<G: Topology + ?Sized>(g: &G, c: &Cascade, frac: f64) -> Result<Self> {
        if !(frac > 0.0 && frac <= 1.0) {
            return Err(Error::domain(format!("observed fraction {frac} not in (0, 1]")));
        }
        let k = libm::ceil(frac * c.len() as f64 - 1e-9) as usize;
        Self::observe_prefix(g, c, k.max(1))
    }

    /// Appends an activation. Timestamps must not go backwards.
    pub fn activate<G: Topology + ?Sized>(&mut self, g: &G, v: NodeId, t: f64) -> Result<()> {
        let bad = |msg: String| Error::InvalidCascade {
            id: self.cascade.message_id.clone(),
            msg,
        };
        match self.activated_time.get(v.index()) {
            None => return Err(Error::NodeOutOfRange(v)),
            Some(Some(_)) => return Err(bad(format!("node {v} activated twice"))),
            Some(None) => {}
        }
        if let Some(last) = self.cascade.last_time() {
            if t < last {
                return Err(bad(format!("activation of {v} at {t} precedes {last}")));
            }
        }
        let slot = &mut self.activated_time[v.index()];
        *slot = Some(t);
        self.cascade.events.push(Event { node: v, t });
        self.susceptible.remove(&v);
        for &c in g.children(v) {
            if self.activated_time[c.index()].is_none() {
                self.susceptible.insert(c);
            }
        }
        Ok(())
    }

    #[inline]
    pub fn is_active(&self, v: NodeId) -> bool {
        self.activated_time[v.index()].is_some()
    }

    #[inline]
    pub fn activation_time(&self, v: NodeId) -> Option<f64> {
        self.activated_time[v.index()]
    }

    pub fn activated_count(&self) -> usize {
        self.cascade.events.len()
    }

    pub fn activated(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.cascade.events.iter().map(|e| e.node)
    }

    pub fn susceptible(&self) -> &BTreeSet<NodeId> {
        &self.susceptible
    }

    pub fn node_count(&self) -> usize {
        self.activated_time.len()
    }

    /// `AP_v`: activated parents of `v` with their times, sorted by time
    /// (ties by node id).
    pub fn activated_parents<G: Topology + ?Sized>(&self, g: &G, v: NodeId) -> Vec<(NodeId, f64)> {
        let mut out: Vec<(NodeId, f64)> = g
            .parents(v)
            .iter()
            .filter_map(|&p| self.activation_time(p).map(|t| (p, t)))
            .collect();
        out.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        out
    }
}
