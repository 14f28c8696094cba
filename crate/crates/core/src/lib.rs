//! Loss-visibility optimized video packet transmission over MIMO spatial streams.
//!
//! The crate is organised bottom-up:
//!
//! * [`channel`] samples Rayleigh channels, decomposes them and computes
//!   zero-forcing post-processing SNRs for SVD or codebook precoders.
//! * [`link`] maps a per-stream SNR to a packet error rate and the
//!   truncated-geometric retransmission statistics.
//! * [`visibility`] scores packets with a logistic model and tracks the
//!   loss-visibility distribution with a kernel density estimate.
//! * [`policy`] orders streams, computes the load-balancing thresholds,
//!   selects MCS and mode, and builds the prioritizing interleaver.
//! * [`experiments`] runs the Monte Carlo gain analysis and the realized
//!   session (coherence-time) simulator.
//!
//! All SNRs are linear inside the library; decibels only appear at I/O
//! boundaries.

// `!(x > 0.0)` is the idiom used throughout to reject NaN along with bad values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod error;
pub mod experiments;
pub mod link;
pub mod math;
pub mod policy;
pub mod rng;
pub mod visibility;

pub use error::{Error, Result};
