//! Birth-death chain analytics and rank-2 martingale Monte Carlo for parabolicity and
//! quadratic area growth of surfaces confined to sub-conical regions.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN.

pub mod chain;
pub mod cli;
pub mod coupling;
pub mod envelope;
pub mod error;
pub mod geometry;
pub mod martingale;
pub mod pathstats;
pub mod rng;

pub use error::{Error, Result};
