//! Tail asymptotics of `P(max X(t) > u)` for Gaussian processes whose
//! variance has a unique maximum, with Monte Carlo validation.

// NaN-rejecting guards such as `!(x > 0.0)` are intended.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asympt;
pub mod classifier;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod mc;
pub mod par;
pub mod pickands;
pub mod process;
pub mod quad;
pub mod rearrangement;
pub mod regvar;
pub mod sampler;
mod serde_ext;

pub use error::{Error, Result};
