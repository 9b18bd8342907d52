//! Comparison methods: ego-network regressors (LRC-Q1, LRC-Q2) that plug into
//! the propagation engine, and a cascade-graph size regressor (CG-CPred).

mod cgcpred;
mod lrcq;
mod rwr;

pub use cgcpred::{cascade_features, observe_for_size, CgCPred, CG_FEATURES};
pub use lrcq::{lrcq1_features, lrcq2_features, EgoContext, LrcqModel, LrcqParams, LrcqVariant};
pub use rwr::{rwr, EgoNetwork};
