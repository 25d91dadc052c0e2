//! Exact survival signatures for coherent systems with shared
//! components, and the survival probabilities built from them.
//!
//! The crate computes:
//!
//! - single-system survival signatures over one or more component types;
//! - joint survival signatures of two or three coherent systems that
//!   share components, observed at possibly different times;
//! - variant tables for events mixing functioning and failure;
//! - exact monotonicity bounds from partially evaluated tables;
//! - joint, marginal, and conditional survival probabilities by
//!   combining signature tables with lifetime-distribution kernels;
//! - verification oracles: brute-force enumeration and seeded
//!   Monte-Carlo simulation.
//!
//! Signature values are exact rationals (favourable over total counts);
//! probabilities become floating point only when lifetime CDFs enter.

pub mod cli;
pub mod comb;
pub mod error;
pub mod lifetimes;
pub mod model;
pub mod modelfile;
pub mod oracle;
pub mod order;
pub mod reliability;
pub mod signature;
pub mod structure;

#[cfg(test)]
pub(crate) mod fixtures;

pub use error::{Error, Result};
