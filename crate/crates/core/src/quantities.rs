//! Single-letter information quantities, the constant-term functions and the
//! standard normal distribution function.

use std::f64::consts::{LN_2, PI};

use crate::error::{FlbError, Result};
use crate::measures::{Cells, JointMeasure};
use crate::spectrum::{build_spectrum, LlrSpectrum};

const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

/// Standard normal density.
pub fn gauss_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / SQRT_2PI
}

/// Mills ratio `(1 - Φ(z)) / φ(z)` for `z > 0` by a Lentz continued fraction.
fn mills_ratio(z: f64) -> f64 {
    // R(z) = 1/(z+ 1/(z+ 2/(z+ 3/(z+ …))))
    let tiny = 1e-300;
    let mut f = z;
    let mut c = z;
    let mut d = 0.0;
    for k in 1..5000 {
        let a = k as f64;
        d = z + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = z + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    1.0 / f
}

/// Standard normal CDF.
pub fn gauss_cdf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x.abs() < 3.0 {
        // Φ(x) = ½ + φ(x) Σ x^{2k+1} / (2k+1)!!
        let x2 = x * x;
        let mut term = x;
        let mut sum = x;
        let mut k = 0;
        while term.abs() > 1e-18 * sum.abs() {
            k += 1;
            term *= x2 / (2 * k + 1) as f64;
            sum += term;
        }
        0.5 + gauss_pdf(x) * sum
    } else if x < 0.0 {
        if x < -40.0 {
            return 0.0;
        }
        gauss_pdf(x) * mills_ratio(-x)
    } else {
        if x > 40.0 {
            return 1.0;
        }
        1.0 - gauss_pdf(x) * mills_ratio(x)
    }
}

/// Upper tail `1 - Φ(x)` without cancellation for large `x`.
pub fn gauss_sf(x: f64) -> f64 {
    gauss_cdf(-x)
}

/// Inverse standard normal CDF.
pub fn gauss_inv(eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(FlbError::Domain(format!(
            "Φ⁻¹ argument {eps} outside (0, 1)"
        )));
    }
    if eps > 0.5 {
        return Ok(-lower_inv(1.0 - eps));
    }
    Ok(lower_inv(eps))
}

fn lower_inv(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.38357751867269e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    let mut x = if p < 0.02425 {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    };
    if p == 0.5 {
        return 0.0;
    }
    // Halley refinement on Φ(x) = p, relative in the lower tail.
    for _ in 0..3 {
        let e = gauss_cdf(x) - p;
        let u = e / gauss_pdf(x);
        let step = u / (1.0 + 0.5 * x * u);
        x -= step;
        if step.abs() <= 1e-16 * x.abs().max(1.0) {
            break;
        }
    }
    x
}

/// `v(d) = log(d / (1 - e^{-d}))`, with `v(0) = 0`.
pub fn v_of(d: f64) -> Result<f64> {
    v_of_s(d, 1.0)
}

/// `v(d, s) = log(d / (1 - e^{-ds}))`, with `v(0, s) = -log s`.
pub fn v_of_s(d: f64, s: f64) -> Result<f64> {
    if !(d >= 0.0) {
        return Err(FlbError::Domain(format!("lattice span {d} is negative")));
    }
    if !(s > 0.0) {
        return Err(FlbError::Domain(format!("v(d, s) needs s > 0, got {s}")));
    }
    if d == 0.0 {
        return Ok(-s.ln());
    }
    let ds = d * s;
    // d / (1 - e^{-ds}) = (1/s) · ds / (-expm1(-ds))
    Ok(-s.ln() + (ds / -(-ds).exp_m1()).ln())
}

/// Divergence, relative-entropy variance, skewness and lattice span of a pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DivergenceStats {
    pub d: f64,
    pub v: f64,
    /// Skewness of `-log(P/Q)` under P.
    pub kappa: f64,
    pub span: f64,
}

impl DivergenceStats {
    /// Statistics of an order-1 spectrum whose P-side is a probability measure.
    pub fn from_spectrum(s: &LlrSpectrum) -> Result<Self> {
        if s.p_infinite() > 0.0 {
            return Err(FlbError::AbsoluteContinuity {
                p_mass: s.p_infinite(),
            });
        }
        let total = s.p_finite();
        if (total - 1.0).abs() > 1e-9 {
            return Err(FlbError::Domain(format!(
                "divergence statistics need a probability measure, mass is {total}"
            )));
        }
        let (d, v, m3) = s.moments();
        let kappa = if v > 0.0 { -m3 / v.powf(1.5) } else { 0.0 };
        Ok(DivergenceStats {
            d,
            v,
            kappa,
            span: s.lattice_span(None).span,
        })
    }

    /// Skewness of `+log(P/Q)` under P.
    pub fn kappa_llr(&self) -> f64 {
        -self.kappa
    }

    /// The same statistics after a constant shift of the log-likelihood ratio.
    pub fn shifted(&self, c: f64) -> Self {
        DivergenceStats {
            d: self.d + c,
            ..*self
        }
    }
}

pub fn divergence_stats<M: Cells>(p: &M, q: &M) -> Result<DivergenceStats> {
    DivergenceStats::from_spectrum(&build_spectrum(p, q)?)
}

/// Conditional entropy, min-entropy and collision entropy of `j` relative to `r`
/// on the column system.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CondEntropies {
    pub h: f64,
    pub h_min: f64,
    pub h_2: f64,
}

pub fn cond_entropies(
    j: &JointMeasure,
    r: &crate::measures::DiscreteMeasure,
) -> Result<CondEntropies> {
    let lifted = j.lift_cols(r)?;
    let s = build_spectrum(j, &lifted)?;
    let (mean, _, _) = s.moments();
    let t_max = s.points().last().map(|p| p.t).unwrap_or(f64::NEG_INFINITY);
    let ln_collision = crate::exec::log_sum_exp(s.points().iter().map(|p| p.ln_p + p.t));
    Ok(CondEntropies {
        h: -mean * s.p_finite(),
        h_min: -t_max,
        h_2: -ln_collision,
    })
}

/// The five constant-term functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstantTerm {
    F1,
    F2,
    F3,
    F4,
    F5,
}

impl ConstantTerm {
    pub fn from_index(i: u8) -> Result<Self> {
        Ok(match i {
            1 => ConstantTerm::F1,
            2 => ConstantTerm::F2,
            3 => ConstantTerm::F3,
            4 => ConstantTerm::F4,
            5 => ConstantTerm::F5,
            _ => return Err(FlbError::Domain(format!("no constant term F{i}"))),
        })
    }
}

/// Constant term of the expansions.
///
/// F1–F3 (randomness extraction) use the skewness of `-log(P/Q)`; F4 and F5
/// (testing, coding) use the skewness of `+log(P/Q)`, the orientation in which
/// the Edgeworth correction of the tested variable enters. F5 carries no
/// `-½ log V` term: `max_x (x - e^{x+v})` equals `-v - 1`.
pub fn f_constant(term: ConstantTerm, stats: &DivergenceStats, eps: f64) -> Result<f64> {
    if !(stats.v > 0.0) {
        return Err(FlbError::Degenerate(
            "relative entropy variance is zero".into(),
        ));
    }
    let b = gauss_inv(eps)?;
    let b2 = b * b;
    let sv = stats.v.sqrt();
    let skew = |k: f64| sv * k * (b2 - 1.0) / 6.0;
    let v = v_of(stats.span)?;
    Ok(match term {
        ConstantTerm::F1 => skew(stats.kappa) + v.exp(),
        ConstantTerm::F2 => {
            skew(stats.kappa) + v.exp() + 3.0 * LN_2 - 2.0 - PI.ln() - stats.v.ln() - b2
        }
        ConstantTerm::F3 => {
            skew(stats.kappa) + 3.5 * LN_2 - 2.0 - 0.5 * PI.ln() - 0.5 * stats.v.ln() - 0.5 * b2 - v
        }
        ConstantTerm::F4 => {
            skew(stats.kappa_llr()) + 0.5 * (2.0 * PI * stats.v).ln() + 0.5 * b2 - v
        }
        ConstantTerm::F5 => skew(stats.kappa_llr()) - v - 1.0,
    })
}

/// F5 with an additional `-½ log V` term.
pub fn f5_as_printed(stats: &DivergenceStats, eps: f64) -> Result<f64> {
    Ok(f_constant(ConstantTerm::F5, stats, eps)? - 0.5 * stats.v.ln())
}

/// Binary entropy in nats.
pub fn binary_entropy(p: f64) -> f64 {
    let term = |x: f64| if x > 0.0 { -x * x.ln() } else { 0.0 };
    term(p) + term(1.0 - p)
}

/// Varentropy of a Bernoulli law in nats².
pub fn binary_varentropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    let l = ((1.0 - p) / p).ln();
    p * (1.0 - p) * l * l
}
