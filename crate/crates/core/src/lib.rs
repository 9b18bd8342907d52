//! Full-scale cascade dynamics prediction.
//!
//! The crate is split along the two phases of the method:
//!
//! * learning a local spreading-behavior classifier over 18 features grouped
//!   into four driving mechanisms ([`features`], [`learners`], [`pipeline`]);
//! * replaying a partially observed cascade forward by asynchronous,
//!   shell-by-shell activation updates over the local topology ([`engine`]).
//!
//! [`baselines`] provides the ego-network (LRC-Q) and cascade-graph regressors
//! used for comparison, and [`metrics`] the scoring functions.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, synthetic data
//! and the command line live in the `fscale` companion crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod baselines;
pub mod cascade;
pub mod engine;
mod error;
pub mod exec;
pub mod features;
pub mod graph;
pub mod learners;
pub mod linalg;
pub mod metrics;
pub mod pipeline;

pub use crate::cascade::{Cascade, CascadeState, Corpus, Event, Message, Profiles, UserProfile};
pub use crate::engine::{ActivationModel, SimConfig};
pub use crate::error::{Error, Result};
pub use crate::exec::{Executor, Sequential};
pub use crate::features::{FeatureVector, Mechanism};
pub use crate::graph::{NodeId, SocialGraph, Topology};

/// Read-only inputs shared by feature extraction, training and simulation.
pub struct Env<'a, G: ?Sized = SocialGraph> {
    pub graph: &'a G,
    pub corpus: &'a Corpus,
    pub profiles: &'a Profiles,
}

impl<G: ?Sized> Clone for Env<'_, G> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<G: ?Sized> Copy for Env<'_, G> {}

impl<'a, G: ?Sized> Env<'a, G> {
    pub fn new(graph: &'a G, corpus: &'a Corpus, profiles: &'a Profiles) -> Self {
        Env {
            graph,
            corpus,
            profiles,
        }
    }
}
