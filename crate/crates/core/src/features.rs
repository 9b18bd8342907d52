//! The 18 local features, grouped by driving mechanism.
//!
//! | idx | name        | mechanism |
//! |-----|-------------|-----------|
//! | 0   | KeyW        | CSM |
//! | 1   | ContLen     | CSM |
//! | 2   | IntDiv      | CSM |
//! | 3   | IntSim      | CSM |
//! | 4   | AvgExpT     | TAM |
//! | 5   | SurT        | TAM |
//! | 6   | AvgFordD    | TAM |
//! | 7   | SocialRe    | SCM |
//! | 8   | SocialReR   | SCM |
//! | 9   | ActRecRel   | SCM |
//! | 10  | ActRecRelR  | SCM |
//! | 11  | RecRel      | SCM |
//! | 12  | RecRelR     | SCM |
//! | 13  | VerSta      | EM  |
//! | 14  | ReMsg       | EM  |
//! | 15  | ChlNode     | EM  |
//! | 16  | AccCreT     | EM  |
//! | 17  | CPNodesR    | EM  |
//!
//! Every ratio with a zero denominator is 0, and an empty activated-parent set
//! gives an average exposure time of 0.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::cascade::{CascadeState, Message};
use crate::graph::{count_intersection, NodeId, Topology};
use crate::{Env, Error, Result};

pub const FEATURE_COUNT: usize = 18;

pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = [
    "KeyW",
    "ContLen",
    "IntDiv",
    "IntSim",
    "AvgExpT",
    "SurT",
    "AvgFordD",
    "SocialRe",
    "SocialReR",
    "ActRecRel",
    "ActRecRelR",
    "RecRel",
    "RecRelR",
    "VerSta",
    "ReMsg",
    "ChlNode",
    "AccCreT",
    "CPNodesR",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Mechanism {
    /// Content semantics.
    Csm,
    /// Temporal activity.
    Tam,
    /// Surrounding conditions (network structure).
    Scm,
    /// Endogenous user attributes.
    Em,
}

impl Mechanism {
    pub const ALL: [Mechanism; 4] = [Mechanism::Csm, Mechanism::Tam, Mechanism::Scm, Mechanism::Em];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn tag(self) -> &'static str {
        match self {
            Mechanism::Csm => "CSM",
            Mechanism::Tam => "TAM",
            Mechanism::Scm => "SCM",
            Mechanism::Em => "EM",
        }
    }
}

pub const MECHANISM_OF: [Mechanism; FEATURE_COUNT] = {
    use Mechanism::*;
    [
        Csm, Csm, Csm, Csm, Tam, Tam, Tam, Scm, Scm, Scm, Scm, Scm, Scm, Em, Em, Em, Em, Em,
    ]
};

pub mod idx {
    pub const KEYW: usize = 0;
    pub const CONT_LEN: usize = 1;
    pub const INT_DIV: usize = 2;
    pub const INT_SIM: usize = 3;
    pub const AVG_EXP_T: usize = 4;
    pub const SUR_T: usize = 5;
    pub const AVG_FORD_D: usize = 6;
    pub const SOCIAL_RE: usize = 7;
    pub const SOCIAL_RE_R: usize = 8;
    pub const ACT_REC_REL: usize = 9;
    pub const ACT_REC_REL_R: usize = 10;
    pub const REC_REL: usize = 11;
    pub const REC_REL_R: usize = 12;
    pub const VER_STA: usize = 13;
    pub const RE_MSG: usize = 14;
    pub const CHL_NODE: usize = 15;
    pub const ACC_CRE_T: usize = 16;
    pub const CP_NODES_R: usize = 17;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeatureVector(pub [f64; FEATURE_COUNT]);

impl FeatureVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        FEATURE_NAMES.iter().position(|n| *n == name).map(|i| self.0[i])
    }

    /// Values at `selected`, in that order.
    pub fn project(&self, selected: &[usize]) -> Vec<f64> {
        selected.iter().map(|&i| self.0[i]).collect()
    }
}

pub const SMOOTHING: f64 = 1e-9;

/// Shannon entropy in nats; zero-probability terms contribute nothing.
pub fn interest_diversity(p: &[f64]) -> Result<f64> {
    if p.iter().any(|&x| x.is_nan() || x < 0.0) {
        return Err(Error::domain("interest vector has negative entries"));
    }
    Ok(-p
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| x * libm::log(x))
        .sum::<f64>())
}

fn smooth(p: &[f64]) -> Vec<f64> {
    let total: f64 = p.iter().map(|x| x + SMOOTHING).sum();
    p.iter().map(|x| (x + SMOOTHING) / total).collect()
}

fn kl(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .map(|(&a, &b)| a * libm::log(a / b))
        .sum()
}

/// Symmetrized Kullback-Leibler divergence `(D(p||q) + D(q||p)) / 2` after
/// additive smoothing of both vectors.
pub fn interest_similarity(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    if p.iter().chain(q).any(|&x| x.is_nan() || x < 0.0) {
        return Err(Error::domain("distribution has negative entries"));
    }
    let (p, q) = (smooth(p), smooth(q));
    Ok(((kl(&p, &q) + kl(&q, &p)) / 2.0).max(0.0))
}

/// `(AvgExpT, SurT, AvgFordD)` for `v` at `state.now`.
pub fn temporal_features<G: Topology + ?Sized>(
    g: &G,
    state: &CascadeState,
    v: NodeId,
    m: &Message,
) -> (f64, f64, f64) {
    let (mut sum, mut k) = (0.0, 0usize);
    for &p in g.parents(v) {
        if let Some(t) = state.activation_time(p) {
            sum += state.now - t;
            k += 1;
        }
    }
    let avg_exp = if k == 0 { 0.0 } else { sum / k as f64 };
    let survival = state.now - m.origin_time;
    let ev = &state.cascade.events;
    let avg_fwd = if ev.len() < 2 {
        0.0
    } else {
        (ev[ev.len() - 1].t - ev[0].t) / (ev.len() - 1) as f64
    };
    (avg_exp, survival, avg_fwd)
}

fn ratio(a: f64, b: f64) -> f64 {
    if b > 0.0 {
        a / b
    } else {
        0.0
    }
}

/// `[SocialRe, SocialReR, ActRecRel, ActRecRelR, RecRel, RecRelR]`.
pub fn structural_features<G: Topology + ?Sized>(
    g: &G,
    state: &CascadeState,
    v: NodeId,
) -> [f64; 6] {
    let parents = g.parents(v);
    let children = g.children(v);
    let mut active = 0usize;
    let mut active_friends = 0usize;
    for &p in parents {
        if state.is_active(p) {
            active += 1;
            if children.binary_search(&p).is_ok() {
                active_friends += 1;
            }
        }
    }
    let friends = count_intersection(parents, children) as f64;
    let np = parents.len() as f64;
    let (a, af) = (active as f64, active_friends as f64);
    [a, ratio(a, np), af, ratio(af, a), friends, ratio(friends, np)]
}

/// Full feature vector of `v` for message `m` against the frozen `state`.
///
/// `ReMsg` counts candidate messages at `state.now`: other corpus messages
/// exposed to `v` through an activated parent, plus `m` itself when `v` has an
/// activated parent in `state`. The corpus copy of `m` is never consulted, so
/// a simulated state cannot see its own ground truth.
pub fn extract<G: Topology + ?Sized>(
    env: Env<'_, G>,
    state: &CascadeState,
    v: NodeId,
    m: &Message,
) -> Result<FeatureVector> {
    use idx::*;
    let g = env.graph;
    if v.index() >= g.node_count() {
        return Err(Error::NodeOutOfRange(v));
    }
    let profile = env.profiles.get(v)?;
    let mut x = [0.0; FEATURE_COUNT];

    x[KEYW] = f64::from(u8::from(m.has_keyword));
    x[CONT_LEN] = f64::from(m.content_length);
    if let Some(interest) = &profile.interest {
        x[INT_DIV] = interest_diversity(interest)?;
        x[INT_SIM] = interest_similarity(interest, &m.topic)?;
    }

    let (exp, sur, fwd) = temporal_features(g, state, v, m);
    x[AVG_EXP_T] = exp;
    x[SUR_T] = sur;
    x[AVG_FORD_D] = fwd;

    let s = structural_features(g, state, v);
    x[SOCIAL_RE..=REC_REL_R].copy_from_slice(&s);

    let exclude = env.corpus.message_index(&m.message_id);
    let exposed_now = usize::from(s[0] > 0.0);
    let related = env.corpus.candidate_count_excluding(g, v, state.now, exclude) + exposed_now;
    let nc = g.children(v).len() as f64;
    x[VER_STA] = f64::from(u8::from(profile.verified));
    x[RE_MSG] = related as f64;
    x[CHL_NODE] = nc;
    x[ACC_CRE_T] = state.now - profile.account_created;
    x[CP_NODES_R] = ratio(nc, g.parents(v).len() as f64);
    Ok(FeatureVector(x))
}
