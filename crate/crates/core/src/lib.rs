//! Exact information bottleneck curves for n-ary Hamming channels with a
//! uniform input, their minimal-cardinality optimal representations, and
//! brute-force oracles that check both.

// `!(x > 0.0)` is used on purpose so that NaN lands on the rejecting side.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod hamming;
pub mod oracle;
pub mod phi;
pub mod prob;
pub mod representation;

pub use error::{Error, Result};
