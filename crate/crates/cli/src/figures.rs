//! `flb figure`: datasets behind the comparison and wire-tap figures.

use flb_core::bounds::{legacy_bounds_with, LegacyBounds, RenyiProfile, SrngProfile};
use flb_core::exec::{map_slice, Execution};
use flb_core::measures::{counting_measure, DiscreteMeasure};
use flb_core::quantities::binary_entropy;
use flb_core::spectrum::{build_spectrum, LlrSpectrum, SpectrumOptions};
use flb_core::tasks::{wiretap_bsc_expansions, P2Variant};

use crate::error::CliError;
use crate::format::{fmt_g, Table};

pub const FIGURES: [&str; 4] = [
    "srng-rate-vs-n",
    "srng-rate-vs-eps-3000",
    "srng-rate-vs-eps-100000",
    "wiretap-bsc",
];

/// Leakage crossover of the binary symmetric source.
pub const Q: f64 = 0.11;
pub const EPS: f64 = 1e-3;
pub const P_Y: f64 = 0.1;
pub const P_Z: f64 = 0.2;

pub const N_GRID: [u64; 12] = [
    100, 200, 500, 1000, 2000, 3000, 5000, 10000, 20000, 30000, 50000, 100000,
];

/// `log₁₀ ε` from −10 to −1 in steps of ¼.
pub fn log10_eps_grid() -> Vec<f64> {
    (0..=36).map(|k| -10.0 + 0.25 * k as f64).collect()
}

pub const SRNG_COLUMNS: [&str; 7] = [
    "hmin_eps_upper",
    "ell_2_lower",
    "ell_min_lower",
    "w1_upper",
    "w1_lower",
    "w2_lower",
    "w3_lower",
];

pub const WIRETAP_COLUMNS: [&str; 4] = [
    "expansion_lower",
    "expansion_upper",
    "second_order_lower",
    "second_order_upper",
];

/// Exact and comparison bounds for one `(n, ε)`, in nats (not rates).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SrngPoint {
    pub hmin: f64,
    pub ell_2: f64,
    pub ell_min: f64,
    pub legacy: LegacyBounds,
}

impl SrngPoint {
    pub fn values(&self) -> [f64; 7] {
        [
            self.hmin,
            self.ell_2,
            self.ell_min,
            self.legacy.w1_upper,
            self.legacy.w1_lower,
            self.legacy.w2_lower,
            self.legacy.w3_lower,
        ]
    }
}

/// Block spectrum of `Bernoulli(q)` against the counting measure on `{0, 1}`.
pub fn leakage_spectrum(q: f64, n: u64) -> Result<LlrSpectrum, CliError> {
    Ok(build_spectrum(
        &DiscreteMeasure::bernoulli(q)?,
        &counting_measure(["0", "1"])?,
    )?
    .convolve_iid(n, &SpectrumOptions::default())?)
}

/// All bounds at block length `n` for each `ε`, sharing one spectrum.
pub fn srng_points(
    q: f64,
    n: u64,
    eps: &[f64],
    exec: Execution,
) -> Result<Vec<SrngPoint>, CliError> {
    let s = leakage_spectrum(q, n)?;
    let prof = SrngProfile::new(&s);
    let renyi = RenyiProfile::new(&s, exec);
    eps.iter()
        .map(|&e| {
            Ok(SrngPoint {
                hmin: prof.hmin_smooth_eps(e)?,
                ell_2: prof.ell_2_eps(e)?,
                ell_min: prof.ell_min_eps(e)?,
                legacy: legacy_bounds_with(&prof, &renyi, e, e / 2.0, e / 2.0)?,
            })
        })
        .collect()
}

fn rate(v: f64, n: u64, bits: bool) -> String {
    let r = v / n as f64;
    fmt_g(if bits { r / std::f64::consts::LN_2 } else { r })
}

pub fn srng_rate_vs_n(bits: bool) -> Result<Table, CliError> {
    let rows = map_slice(&N_GRID, Execution::default(), |&n| {
        srng_points(Q, n, &[EPS], Execution::Sequential)
    });
    let mut t = Table::new(std::iter::once("n").chain(SRNG_COLUMNS));
    for (&n, pts) in N_GRID.iter().zip(rows) {
        let p = pts?[0];
        let mut row = vec![n.to_string()];
        row.extend(p.values().iter().map(|&v| rate(v, n, bits)));
        t.push(row);
    }
    Ok(t)
}

pub fn srng_rate_vs_eps(n: u64, bits: bool) -> Result<Table, CliError> {
    let grid = log10_eps_grid();
    let eps: Vec<f64> = grid.iter().map(|l| 10f64.powf(*l)).collect();
    let pts = srng_points(Q, n, &eps, Execution::default())?;
    let mut t = Table::new(["log10_eps", "eps"].into_iter().chain(SRNG_COLUMNS));
    for ((l, e), p) in grid.iter().zip(&eps).zip(pts) {
        let mut row = vec![fmt_g(*l), fmt_g(*e)];
        row.extend(p.values().iter().map(|&v| rate(v, n, bits)));
        t.push(row);
    }
    Ok(t)
}

pub fn wiretap_bsc(bits: bool) -> Result<Table, CliError> {
    let e = wiretap_bsc_expansions(P_Y, P_Z, EPS, EPS, P2Variant::Corrected)?;
    let mut t = Table::new(std::iter::once("n").chain(WIRETAP_COLUMNS));
    for &n in &N_GRID {
        let nf = n as f64;
        t.push(vec![
            n.to_string(),
            rate(e.lower.eval(nf), n, bits),
            rate(e.upper.eval(nf), n, bits),
            rate(e.lower.second_order(nf), n, bits),
            rate(e.upper.second_order(nf), n, bits),
        ]);
    }
    Ok(t)
}

/// First-order secrecy rate `h(p_Z) − h(p_Y)` of the wire-tap figure.
pub fn wiretap_first_order() -> f64 {
    binary_entropy(P_Z) - binary_entropy(P_Y)
}

pub fn cmd_figure(name: &str, bits: bool) -> Result<Table, CliError> {
    match name {
        "srng-rate-vs-n" => srng_rate_vs_n(bits),
        "srng-rate-vs-eps-3000" => srng_rate_vs_eps(3000, bits),
        "srng-rate-vs-eps-100000" => srng_rate_vs_eps(100_000, bits),
        "wiretap-bsc" => wiretap_bsc(bits),
        other => Err(CliError::Parse(format!(
            "unknown figure `{other}`; expected one of {}",
            FIGURES.join(", ")
        ))),
    }
}
