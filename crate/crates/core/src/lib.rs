//! Balanced-truncation model order reduction for RLC descriptor models.
//!
//! Pipeline: parse a netlist or load matrices ([`model`]), compute low-rank
//! Gramian factors with an extended Krylov solver ([`eksm`]), truncate
//! ([`bt_lowrank`], or densely via [`bt_dense`] for small models), and
//! evaluate responses ([`freqresp`]).

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bt_dense;
pub mod bt_lowrank;
pub mod dense;
pub mod eksm;
pub mod error;
pub mod freqresp;
pub mod model;
pub mod par;
pub mod pipeline;
pub mod rom;
pub mod sparse;
pub mod synth;

pub use error::{MorError, Result, Span};
