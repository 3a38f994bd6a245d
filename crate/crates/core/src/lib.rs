//! Proximal gradient methods driven by inexact first-order oracles of degree `q`.
//!
//! The crate is organised bottom-up:
//!
//! * [`oracle`]: the degree-`q` oracle abstraction, constructive oracle
//!   families and an empirical certifier.
//! * [`prox`]: the simple convex term `h`.
//! * [`solver`]: I-PGM, its adaptive variant and the fast method FI-PGM.
//! * [`rates`]: closed-form convergence bounds.
//! * [`problems`]: benchmark instances.
//! * [`harness`]: experiment sweeps and CSV output behind the `ipgm` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod harness;
pub mod linalg;
pub mod objective;
pub mod oracle;
pub mod problems;
pub mod prox;
pub mod random;
pub mod rates;
pub mod solver;

pub use error::{Error, Result};
