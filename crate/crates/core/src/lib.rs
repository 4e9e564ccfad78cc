//! Exact finite-blocklength bounds and semi-finite-length expansions.
//!
//! All logarithms are natural; values are in nats.

// `!(x > 0.0)` style guards deliberately reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod bounds;
pub mod error;
pub mod exec;
pub mod measures;
pub mod quantities;
pub mod spectrum;
pub mod tasks;
pub mod text;

pub use error::{FlbError, Result};
