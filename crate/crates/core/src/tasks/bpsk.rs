use crate::asymptotics::ExpansionPair;
use crate::error::{FlbError, Result};
use crate::quantities::DivergenceStats;

use super::quadrature::GaussLegendre;
use super::wiretap::{lower_from_stats, secrecy_a1, upper_from_stats};

/// Standardized noise is integrated over `[-Z_MAX, Z_MAX]`; the excluded mass is below 1e-32.
const Z_MAX: f64 = 12.0;
const NODES: usize = 16;
const START_PANELS: usize = 4;
const MAX_PANELS_1D: usize = 4096;
const MAX_PANELS_2D: usize = 128;
const TOL_1D: f64 = 1e-9;
const TOL_2D: f64 = 1e-7;

/// BPSK inputs `±1` over Gaussian noise of variances `σ_Y² < σ_Z²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BpskPair {
    sigma_y2: f64,
    sigma_z2: f64,
}

impl BpskPair {
    pub fn new(sigma_y2: f64, sigma_z2: f64) -> Result<Self> {
        if !(sigma_y2 > 0.0 && sigma_y2.is_finite() && sigma_z2.is_finite() && sigma_z2 > sigma_y2)
        {
            return Err(FlbError::Domain(format!(
                "need 0 < σ_Y² < σ_Z², got σ_Y² = {sigma_y2}, σ_Z² = {sigma_z2}"
            )));
        }
        Ok(BpskPair { sigma_y2, sigma_z2 })
    }

    pub fn sigma_y2(&self) -> f64 {
        self.sigma_y2
    }

    pub fn sigma_z2(&self) -> f64 {
        self.sigma_z2
    }
}

/// Statistics from adaptive quadrature with the rule size that met the tolerance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BpskStats {
    pub stats: DivergenceStats,
    pub panels: usize,
    /// Largest relative change of `D`, `V`, `κ` over the final doubling.
    pub rel_change: f64,
}

fn check_sigma2(sigma2: f64) -> Result<()> {
    if !(sigma2 > 0.0 && sigma2.is_finite()) {
        return Err(FlbError::Domain(format!(
            "variance {sigma2} must be positive"
        )));
    }
    Ok(())
}

/// `ln(1 + e^a)` without overflow.
fn softplus(a: f64) -> f64 {
    a.max(0.0) + (-a.abs()).exp().ln_1p()
}

/// `log φ_{1,σ²}(y) / φ̃_{σ²}(y) = ln 2 − ln(1 + e^{−2y/σ²})`.
fn llr(y: f64, sigma2: f64) -> f64 {
    std::f64::consts::LN_2 - softplus(-2.0 * y / sigma2)
}

fn std_normal(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Mean, variance and skewness of `−L` from weighted samples of `L`.
fn stats_of(samples: &[(f64, f64)]) -> DivergenceStats {
    let mass: f64 = samples.iter().map(|(w, _)| w).sum();
    let mean = samples.iter().map(|(w, l)| w * l).sum::<f64>() / mass;
    let (mut m2, mut m3) = (0.0, 0.0);
    for (w, l) in samples {
        let c = l - mean;
        m2 += w * c * c;
        m3 += w * c * c * c;
    }
    let v = m2 / mass;
    let m3 = m3 / mass;
    DivergenceStats {
        d: mean,
        v,
        kappa: if v > 0.0 { -m3 / v.powf(1.5) } else { 0.0 },
        span: 0.0,
    }
}

fn signal_stats(signal: f64, sigma2: f64, panels: usize) -> DivergenceStats {
    let g = GaussLegendre::new(NODES).expect("fixed rule size");
    let s = sigma2.sqrt();
    let samples: Vec<(f64, f64)> = g
        .composite(-Z_MAX, Z_MAX, panels)
        .into_iter()
        .map(|(z, w)| {
            (
                w * std_normal(z),
                -softplus(-2.0 * (signal + s * z) / sigma2),
            )
        })
        .collect();
    // Moments of `ℓ − ln 2`; the constant is restored afterwards so that tiny
    // deviations at high SNR are not absorbed by rounding against ln 2.
    stats_of(&samples).shifted(std::f64::consts::LN_2)
}

/// `D, V, κ` of `φ_{1,σ²}` against `φ̃_{σ²}` with a fixed composite rule.
pub fn bpsk_stats_fixed(sigma2: f64, panels: usize) -> Result<DivergenceStats> {
    check_sigma2(sigma2)?;
    if panels == 0 {
        return Err(FlbError::Domain("need at least one panel".into()));
    }
    Ok(signal_stats(1.0, sigma2, panels))
}

fn rel_change(a: &DivergenceStats, b: &DivergenceStats) -> f64 {
    let r = |x: f64, y: f64| (x - y).abs() / y.abs().max(1e-300);
    r(a.d, b.d).max(r(a.v, b.v)).max(r(a.kappa, b.kappa))
}

fn adaptive<F: Fn(usize) -> DivergenceStats>(
    f: F,
    max_panels: usize,
    tol: f64,
) -> Result<BpskStats> {
    let mut panels = START_PANELS;
    let mut prev = f(panels);
    loop {
        let next_panels = panels * 2;
        let next = f(next_panels);
        let change = rel_change(&prev, &next);
        if change <= tol {
            return Ok(BpskStats {
                stats: next,
                panels: next_panels,
                rel_change: change,
            });
        }
        if next_panels >= max_panels {
            return Err(FlbError::Quadrature {
                achieved: change,
                target: tol,
            });
        }
        panels = next_panels;
        prev = next;
    }
}

/// Adaptive one-dimensional quadrature to relative tolerance 1e-9.
pub fn bpsk_stats_report(sigma2: f64) -> Result<BpskStats> {
    check_sigma2(sigma2)?;
    adaptive(|p| signal_stats(1.0, sigma2, p), MAX_PANELS_1D, TOL_1D)
}

/// `D, V, κ` of `φ_{1,σ²}` against `φ̃_{σ²}`; `D` is the BPSK capacity in nats.
pub fn bpsk_stats(sigma2: f64) -> Result<DivergenceStats> {
    Ok(bpsk_stats_report(sigma2)?.stats)
}

/// Statistics of `log p_{YZ|X=1} / (p_{Y|Z} × φ_{1,σ_Z²})` with a fixed tensor rule.
///
/// Under `P`, `Y = 1 + σ_Y u` and `Z = Y + σ_d w` with `σ_d² = σ_Z² − σ_Y²`; the
/// log-ratio reduces to `ℓ_Y(y) − ℓ_Z(z)`.
pub fn bpsk_joint_stats_fixed(pair: &BpskPair, panels: usize) -> Result<DivergenceStats> {
    if panels == 0 {
        return Err(FlbError::Domain("need at least one panel".into()));
    }
    Ok(joint(pair, panels))
}

fn joint(pair: &BpskPair, panels: usize) -> DivergenceStats {
    let g = GaussLegendre::new(NODES).expect("fixed rule size");
    let rule: Vec<(f64, f64)> = g
        .composite(-Z_MAX, Z_MAX, panels)
        .into_iter()
        .map(|(x, w)| (x, w * std_normal(x)))
        .collect();
    let sy = pair.sigma_y2.sqrt();
    let sd = (pair.sigma_z2 - pair.sigma_y2).sqrt();
    let mut samples = Vec::with_capacity(rule.len() * rule.len());
    for &(u, wu) in &rule {
        let y = 1.0 + sy * u;
        let ly = llr(y, pair.sigma_y2);
        for &(w, ww) in &rule {
            samples.push((wu * ww, ly - llr(y + sd * w, pair.sigma_z2)));
        }
    }
    stats_of(&samples)
}

/// Adaptive two-dimensional quadrature to relative tolerance 1e-7.
pub fn bpsk_joint_stats(pair: &BpskPair) -> Result<BpskStats> {
    adaptive(|p| joint(pair, p), MAX_PANELS_2D, TOL_2D)
}

/// Achievability and converse expansions of `log N(n, ε, δ)` for the BPSK pair.
pub fn bpsk_expansions(pair: &BpskPair, eps: f64, delta: f64) -> Result<ExpansionPair> {
    let ys = bpsk_stats(pair.sigma_y2)?;
    let zs = bpsk_stats(pair.sigma_z2)?;
    // Both directions share C(W_Y) − C(W_Z).
    let a1 = secrecy_a1(&ys, &zs);
    let lower = lower_from_stats(a1, &ys, &zs, eps, delta)?;
    let joint = bpsk_joint_stats(pair)?.stats;
    let upper = upper_from_stats(a1, &joint, eps, delta)?;
    Ok(ExpansionPair { lower, upper })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn llr_is_stable_for_large_arguments() {
        assert!((llr(0.0, 1.0)).abs() < 1e-15);
        assert!((llr(1e6, 1.0) - std::f64::consts::LN_2).abs() < 1e-15);
        assert!((llr(-1e6, 1.0) + 2e6 - std::f64::consts::LN_2).abs() < 1e-6);
    }

    #[test]
    fn high_and_low_noise_limits() {
        let quiet = bpsk_stats(1e-2).unwrap();
        assert!((quiet.d - std::f64::consts::LN_2).abs() < 1e-12);
        let loud = bpsk_stats(1e4).unwrap();
        // D ≈ 1/(2σ²) for large noise.
        assert!((loud.d - 0.5e-4).abs() < 1e-7);
    }

    #[test]
    fn sign_flip_symmetry() {
        let a = signal_stats(1.0, 2.0, 64);
        let g = GaussLegendre::new(NODES).unwrap();
        let s = 2.0f64.sqrt();
        let samples: Vec<(f64, f64)> = g
            .composite(-Z_MAX, Z_MAX, 64)
            .into_iter()
            .map(|(z, w)| (w * std_normal(z), -softplus(2.0 * (-1.0 + s * z) / 2.0)))
            .collect();
        let b = stats_of(&samples).shifted(std::f64::consts::LN_2);
        assert!((a.d - b.d).abs() < 1e-14 && (a.v - b.v).abs() < 1e-14);
    }

    #[test]
    fn joint_mean_is_capacity_difference() {
        let pair = BpskPair::new(0.5, 1.5).unwrap();
        let j = bpsk_joint_stats(&pair).unwrap();
        let dy = bpsk_stats(0.5).unwrap().d;
        let dz = bpsk_stats(1.5).unwrap().d;
        assert!((j.stats.d - (dy - dz)).abs() < 1e-9);
        assert!(j.stats.v > 0.0);
    }

    #[test]
    fn pair_validation() {
        assert!(BpskPair::new(1.0, 1.0).is_err());
        assert!(BpskPair::new(0.0, 1.0).is_err());
        assert!(bpsk_stats(-1.0).is_err());
    }
}
