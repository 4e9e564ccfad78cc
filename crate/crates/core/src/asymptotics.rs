//! Edgeworth and strong-large-deviation approximations, and the coefficient
//! records `a1·n + a2·√n + a3·log n + a4` of every expansion.

use std::f64::consts::PI;

use crate::bounds::Direction;
use crate::error::{FlbError, Result};
use crate::measures::{counting_measure, Axis, Cells, DiscreteMeasure, JointMeasure};
use crate::quantities::{
    f_constant, gauss_cdf, gauss_inv, gauss_pdf, v_of, v_of_s, ConstantTerm, DivergenceStats,
};
use crate::spectrum::{build_spectrum, CgfView, LatticeInfo};

/// `a1·n + a2·√n + a3·log n + a4`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Expansion {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    pub direction: Direction,
}

impl Expansion {
    pub fn eval(&self, n: f64) -> f64 {
        self.a1 * n + self.a2 * n.sqrt() + self.a3 * n.ln() + self.a4
    }

    /// The first two orders only.
    pub fn second_order(&self, n: f64) -> f64 {
        self.a1 * n + self.a2 * n.sqrt()
    }

    /// All coefficients negated, with a new direction tag.
    pub fn negated(&self, direction: Direction) -> Expansion {
        Expansion {
            a1: -self.a1,
            a2: -self.a2,
            a3: -self.a3,
            a4: -self.a4,
            direction,
        }
    }

    pub(crate) fn from_stats(
        a1: f64,
        stats: &DivergenceStats,
        eps: f64,
        a3: f64,
        term: ConstantTerm,
        direction: Direction,
    ) -> Result<Expansion> {
        Ok(Expansion {
            a1,
            a2: stats.v.sqrt() * gauss_inv(eps)?,
            a3,
            a4: f_constant(term, stats, eps)?,
            direction,
        })
    }
}

/// Two expansions bracketing one operational quantity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpansionPair {
    pub lower: Expansion,
    pub upper: Expansion,
}

/// Decomposition `χ₀·n − ½ log n + χ₁` of a log tail probability.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailEstimate {
    pub chi0_n: f64,
    pub half_log_n: f64,
    pub chi1: f64,
    pub log_value: f64,
}

/// Two-term Edgeworth approximation of the standardized sum's CDF.
pub fn edgeworth_cdf(n: f64, x: f64, kappa: f64) -> f64 {
    gauss_cdf(x) - gauss_pdf(x) * kappa * (x * x - 1.0) / (6.0 * n.sqrt())
}

/// Strong large-deviation estimate of `log pⁿ{Xₙ ≥ nR}` for `R` above the mean.
pub fn bahadur_rao_log_tail(
    cgf: &CgfView<'_>,
    lattice: &LatticeInfo,
    r: f64,
    n: u64,
) -> Result<TailEstimate> {
    let mean = cgf.eval(0.0).d1;
    if !(r > mean) {
        return Err(FlbError::Domain(format!(
            "rate {r} is not above the mean {mean}"
        )));
    }
    let eta = cgf.eta(r)?;
    let at = cgf.eval(eta);
    let chi0 = -r * eta + at.tau;
    let ln_eta_prime = -at.d2.ln();
    let chi1 = if lattice.span > 0.0 {
        let d = lattice.span;
        -0.5 * (2.0 * PI).ln() + 0.5 * ln_eta_prime + (d / -(-d * eta).exp_m1()).ln()
    } else {
        -0.5 * (2.0 * PI).ln() - eta.ln() + 0.5 * ln_eta_prime
    };
    let nf = n as f64;
    let chi0_n = chi0 * nf;
    let half_log_n = -0.5 * nf.ln();
    Ok(TailEstimate {
        chi0_n,
        half_log_n,
        chi1,
        log_value: chi0_n + half_log_n + chi1,
    })
}

/// Refined tail estimate at the moving threshold `R = R₀ + R₁/√n + R₂/n`, `R₀ = τ'(s₀)`.
pub fn lemma2_log_tail(
    cgf: &CgfView<'_>,
    lattice: &LatticeInfo,
    s0: f64,
    r1: f64,
    r2: f64,
    n: u64,
) -> Result<f64> {
    if !(s0 > 0.0 && s0.is_finite()) {
        return Err(FlbError::Domain(format!("tilt s₀ = {s0} must be positive")));
    }
    let at = cgf.eval(s0);
    if !(at.d2 > 0.0) {
        return Err(FlbError::Degenerate("τ'' vanishes at s₀".into()));
    }
    let nf = n as f64;
    let r = at.d1 + r1 / nf.sqrt() + r2 / nf;
    Ok(
        nf * (-r * s0 + at.tau) - 0.5 * (2.0 * PI * at.d2 * nf).ln() + v_of_s(lattice.span, s0)?
            - r1 * r1 / (2.0 * at.d2),
    )
}

pub(crate) fn conditional_stats(j: &JointMeasure) -> Result<DivergenceStats> {
    let r = j.marginal(Axis::Cols);
    let lifted = j.lift_cols(&r)?;
    DivergenceStats::from_spectrum(&build_spectrum(j, &lifted)?)
}

pub(crate) fn nondegenerate(stats: DivergenceStats) -> Result<DivergenceStats> {
    if stats.v > 0.0 {
        Ok(stats)
    } else {
        Err(FlbError::Degenerate(
            "relative entropy variance is zero".into(),
        ))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SrngExpansions {
    pub gs1: Expansion,
    pub gs2: Expansion,
    pub gs3: Expansion,
}

/// Expansions of `H_min^ε`, `ℓ_min^ε` and `ℓ_2^ε` for `P_AEⁿ` relative to `P_Eⁿ`.
pub fn expand_srng(j: &JointMeasure, eps: f64) -> Result<SrngExpansions> {
    srng_from_stats(&nondegenerate(conditional_stats(j)?)?, eps)
}

pub fn srng_from_stats(stats: &DivergenceStats, eps: f64) -> Result<SrngExpansions> {
    let h = -stats.d;
    Ok(SrngExpansions {
        gs1: Expansion::from_stats(
            h,
            stats,
            eps,
            0.0,
            ConstantTerm::F1,
            Direction::Approximation,
        )?,
        gs2: Expansion::from_stats(
            h,
            stats,
            eps,
            -1.0,
            ConstantTerm::F2,
            Direction::Approximation,
        )?,
        gs3: Expansion::from_stats(h, stats, eps, -0.5, ConstantTerm::F3, Direction::Lower)?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HtExpansions {
    pub dh: Expansion,
    pub ddt: Expansion,
}

/// Expansions of `D_h^ε(Pⁿ‖Qⁿ)` and `D_DT^ε(Pⁿ‖Qⁿ)`.
pub fn expand_ht<M: Cells>(p: &M, q: &M, eps: f64) -> Result<HtExpansions> {
    ht_from_stats(
        &nondegenerate(DivergenceStats::from_spectrum(&build_spectrum(p, q)?)?)?,
        eps,
    )
}

pub fn ht_from_stats(stats: &DivergenceStats, eps: f64) -> Result<HtExpansions> {
    Ok(HtExpansions {
        dh: Expansion::from_stats(
            stats.d,
            stats,
            eps,
            0.5,
            ConstantTerm::F4,
            Direction::Approximation,
        )?,
        ddt: Expansion::from_stats(
            stats.d,
            stats,
            eps,
            0.0,
            ConstantTerm::F5,
            Direction::Approximation,
        )?,
    })
}

/// Minimal compression length without side information: `-D_h^ε(P_Xⁿ‖Iⁿ)`.
pub fn expand_source(p_x: &DiscreteMeasure, eps: f64) -> Result<Expansion> {
    let i = counting_measure(p_x.labels().iter().cloned())?;
    Ok(expand_ht(p_x, &i, eps)?
        .dh
        .negated(Direction::Approximation))
}

/// Compression with side information `Y`: lower from `-D_h`, upper from `-D_DT` of
/// `(P_XY ‖ I_X × P_Y)`. Rows of `j_xy` are X, columns are Y.
pub fn expand_source_side(j_xy: &JointMeasure, eps: f64) -> Result<ExpansionPair> {
    let ht = ht_from_stats(&nondegenerate(conditional_stats(j_xy)?)?, eps)?;
    Ok(ExpansionPair {
        lower: ht.dh.negated(Direction::Lower),
        upper: ht.ddt.negated(Direction::Upper),
    })
}

pub use crate::tasks::{expand_channel, expand_wiretap};

/// `v(d)` re-exported for callers assembling constants by hand.
pub fn lattice_correction(d: f64) -> Result<f64> {
    v_of(d)
}
