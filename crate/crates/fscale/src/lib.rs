//! File formats, synthetic corpora, experiment protocols and a threaded
//! executor for `fscale-core`.

pub mod error;
pub mod experiments;
pub mod io;
pub mod par;
pub mod report;
pub mod synth;

pub use error::{Error, Result};
