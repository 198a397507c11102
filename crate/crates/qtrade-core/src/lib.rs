//! Tsallis-q entropies, generalized quantum correlation measures, and
//! numerical certification of the exact trade-off identities they satisfy on
//! three-party states.
//!
//! The crate is organized around a small dense linear-algebra core
//! ([`qstate`]), the entropy family ([`entropy`]), pure-state decompositions
//! and rank-1 measurements together with the bijection connecting them
//! ([`ensemble`]), a seeded multi-restart optimizer over isometry charts
//! ([`optimize`]), the six correlation measures ([`measures`]), and the
//! identity verifiers plus corpus scanner ([`theorems`]).
//!
//! All randomness is seeded; every public computation is deterministic given
//! its inputs and configuration. With the default `parallel` feature the
//! corpus scans and optimizer restarts run on rayon; disabling the feature
//! yields a bit-identical sequential build.

pub mod ensemble;
pub mod entropy;
mod error;
pub mod io;
pub mod measures;
pub mod optimize;
pub mod parallel;
pub mod qstate;
pub mod theorems;

pub use error::{Error, Result};
pub use qstate::{CMat, CVec, DensityMatrix, PureState, Spectrum};
