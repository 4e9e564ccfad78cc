//! Command-line front end: quantities, sweeps, figure data and verification.

// `!(x > 0.0)` style guards deliberately reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod figures;
pub mod format;
pub mod oracle;
pub mod quantities;
pub mod sweep;
pub mod verify;

pub use error::CliError;
