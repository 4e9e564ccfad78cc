//! Task adapters: conditional additive channels, wire-tap pairs and the
//! Gaussian (BPSK) and correlated-source instances.

mod bpsk;
mod channel;
mod correlated;
pub mod quadrature;
mod wiretap;

pub use bpsk::{
    bpsk_expansions, bpsk_joint_stats, bpsk_joint_stats_fixed, bpsk_stats, bpsk_stats_fixed,
    bpsk_stats_report, BpskPair, BpskStats,
};
pub use channel::{channel_spectrum, expand_channel, ConditionalAdditiveChannel, Group};
pub use correlated::{correlated_rv_expansions, TripleMeasure};
pub use wiretap::{
    degraded_witness_bsc, expand_wiretap, wiretap_bsc_expansions, wiretap_bsc_tables, P2Variant,
    WiretapPair,
};
