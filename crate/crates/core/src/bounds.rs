//! Exact finite-n bounds computed from a block spectrum.
//!
//! Randomness-extraction quantities use the variable `X = -log(P_AE/P_E)`, i.e.
//! the mirror image of the stored `t`; testing quantities use `t` directly.

use crate::error::{FlbError, Result};
use crate::exec::{map_range, Execution, LogSum};
use crate::spectrum::LlrSpectrum;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Upper,
    Lower,
    Exact,
    /// Equality up to a vanishing remainder.
    Approximation,
}

impl Direction {
    pub fn tag(self) -> &'static str {
        match self {
            Direction::Upper => "upper",
            Direction::Lower => "lower",
            Direction::Exact => "exact",
            Direction::Approximation => "approx",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BoundParams {
    pub eps: f64,
    pub delta: Option<f64>,
    pub eta: Option<f64>,
    pub zeta: Option<f64>,
    pub theta: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundResult {
    pub name: &'static str,
    pub task: &'static str,
    pub kind: Direction,
    pub n: u64,
    pub value: f64,
    pub params: BoundParams,
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(FlbError::Domain(format!("ε = {eps} outside (0, 1)")))
    }
}

/// Prefix sums over the knots of `X = -t` for the extraction bounds.
#[derive(Clone, Debug)]
pub struct SrngProfile {
    /// Knots of X, ascending.
    x: Vec<f64>,
    /// `P{X ≤ x_k}` including the P-mass at `X = -∞`.
    cum_p: Vec<f64>,
    /// `Σ_{j≤k} p_j e^{x_j - x_k}` (equals `e^{-x_k}·Q{X ≤ x_k}`).
    s: Vec<f64>,
    /// `log Σ_{j>k} p_j e^{-x_j}`; the last entry is `-∞`.
    ln_tail_sq: Vec<f64>,
    /// `log Σ_j p_j e^{-x_j}`.
    ln_sq_all: f64,
    p_minus_inf: f64,
}

impl SrngProfile {
    pub fn new(spec: &LlrSpectrum) -> Self {
        let pts = spec.points();
        let k = pts.len();
        let mut x = Vec::with_capacity(k);
        let mut lnp = Vec::with_capacity(k);
        for pt in pts.iter().rev() {
            x.push(-pt.t);
            lnp.push(pt.ln_p);
        }
        let p_minus_inf = spec.p_infinite();
        let mut cum_p = Vec::with_capacity(k);
        let mut s = Vec::with_capacity(k);
        let mut acc_p = p_minus_inf;
        let mut acc_s = 0.0;
        for i in 0..k {
            let p = lnp[i].exp();
            acc_p += p;
            acc_s = if i == 0 {
                p
            } else {
                acc_s * (x[i - 1] - x[i]).exp() + p
            };
            cum_p.push(acc_p);
            s.push(acc_s);
        }
        let mut ln_tail_sq = vec![f64::NEG_INFINITY; k];
        let mut acc = LogSum::new();
        for i in (0..k).rev() {
            ln_tail_sq[i] = acc.ln();
            acc.add_ln(lnp[i] - x[i]);
        }
        SrngProfile {
            x,
            cum_p,
            s,
            ln_tail_sq,
            ln_sq_all: acc.ln(),
            p_minus_inf,
        }
    }

    fn total_p(&self) -> f64 {
        self.cum_p.last().copied().unwrap_or(self.p_minus_inf)
    }

    fn delta_at_knot(&self, k: usize) -> f64 {
        (self.cum_p[k] - self.s[k]).max(0.0)
    }

    /// `P{X ≤ m} - e^{-m} Q{X ≤ m}`.
    pub fn delta_min(&self, m: f64) -> f64 {
        if m == f64::INFINITY {
            return self.total_p();
        }
        let k = self.x.partition_point(|&v| v <= m);
        if k == 0 {
            return self.p_minus_inf;
        }
        let k = k - 1;
        (self.cum_p[k] - self.s[k] * (self.x[k] - m).exp()).max(0.0)
    }

    /// `sup{m : δ_min(m) ≤ ε}`.
    pub fn hmin_smooth_eps(&self, eps: f64) -> Result<f64> {
        check_eps(eps)?;
        if self.p_minus_inf > eps || self.x.is_empty() {
            return Ok(if self.total_p() <= eps {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            });
        }
        let k = (0..self.x.len())
            .take_while(|&k| self.delta_at_knot(k) <= eps)
            .last();
        let Some(k) = k else {
            return Ok(f64::NEG_INFINITY);
        };
        let pk = self.cum_p[k];
        if pk <= eps {
            return Ok(if k + 1 == self.x.len() {
                f64::INFINITY
            } else {
                self.x[k + 1]
            });
        }
        Ok(self.x[k] + self.s[k].ln() - (pk - eps).ln())
    }

    /// `max{m' : min_m δ_min(m) + ½ e^{(m'-m)/2} ≤ ε}`.
    pub fn ell_min_eps(&self, eps: f64) -> Result<f64> {
        check_eps(eps)?;
        if self.total_p() < eps {
            return Ok(f64::INFINITY);
        }
        let mut best = f64::NEG_INFINITY;
        for k in 0..self.x.len() {
            let d = self.delta_at_knot(k);
            if d < eps {
                best = best.max(self.x[k] + 2.0 * (2.0 * (eps - d)).ln());
            }
        }
        Ok(best)
    }

    /// `max{m' : ∃m, P{X ≤ m} + ½ e^{m'/2} √(Σ_{X>m} p e^{-X}) ≤ ε}`.
    pub fn ell_2_eps(&self, eps: f64) -> Result<f64> {
        check_eps(eps)?;
        let mut best = f64::NEG_INFINITY;
        let mut consider = |p: f64, ln_t: f64| {
            if p < eps {
                let v = if ln_t == f64::NEG_INFINITY {
                    f64::INFINITY
                } else {
                    2.0 * (2.0 * (eps - p)).ln() - ln_t
                };
                best = best.max(v);
            }
        };
        consider(self.p_minus_inf, self.ln_sq_all);
        for k in 0..self.x.len() {
            consider(self.cum_p[k], self.ln_tail_sq[k]);
        }
        Ok(best)
    }

    /// `ε`-quantile of X: the smallest knot with `P{X ≤ x} > ε`.
    pub fn h_sp_eps(&self, eps: f64) -> Result<f64> {
        check_eps(eps)?;
        if self.p_minus_inf > eps {
            return Ok(f64::NEG_INFINITY);
        }
        let k = self.cum_p.partition_point(|&c| c <= eps);
        Ok(if k == self.x.len() {
            f64::INFINITY
        } else {
            self.x[k]
        })
    }
}

pub fn delta_min(m: f64, spec: &LlrSpectrum) -> f64 {
    SrngProfile::new(spec).delta_min(m)
}

pub fn hmin_smooth_eps(spec: &LlrSpectrum, eps: f64) -> Result<f64> {
    SrngProfile::new(spec).hmin_smooth_eps(eps)
}

pub fn ell_min_eps(spec: &LlrSpectrum, eps: f64) -> Result<f64> {
    SrngProfile::new(spec).ell_min_eps(eps)
}

pub fn ell_2_eps(spec: &LlrSpectrum, eps: f64) -> Result<f64> {
    SrngProfile::new(spec).ell_2_eps(eps)
}

pub fn h_sp_eps(spec: &LlrSpectrum, eps: f64) -> Result<f64> {
    SrngProfile::new(spec).h_sp_eps(eps)
}

/// Prefix sums over the knots of `t` for the testing bounds.
#[derive(Clone, Debug)]
pub struct TestingProfile {
    t: Vec<f64>,
    p: Vec<f64>,
    ln_q: Vec<f64>,
    /// `P{t < t_i}` (finite part).
    below_p: Vec<f64>,
    /// `log Q{t ≥ t_i}`; one extra trailing `-∞`.
    ln_q_from: Vec<f64>,
}

impl TestingProfile {
    pub fn new(spec: &LlrSpectrum) -> Self {
        let pts = spec.points();
        let t: Vec<f64> = pts.iter().map(|p| p.t).collect();
        let p: Vec<f64> = pts.iter().map(|p| p.p_mass()).collect();
        let ln_q: Vec<f64> = pts.iter().map(|p| p.ln_q()).collect();
        let mut below_p = Vec::with_capacity(t.len() + 1);
        let mut acc = 0.0;
        for &pi in &p {
            below_p.push(acc);
            acc += pi;
        }
        below_p.push(acc);
        let mut ln_q_from = vec![f64::NEG_INFINITY; t.len() + 1];
        let mut lacc = LogSum::new();
        for i in (0..t.len()).rev() {
            lacc.add_ln(ln_q[i]);
            ln_q_from[i] = lacc.ln();
        }
        TestingProfile {
            t,
            p,
            ln_q,
            below_p,
            ln_q_from,
        }
    }

    /// `log β_ε` of the randomized Neyman–Pearson test.
    pub fn ln_beta_eps(&self, eps: f64) -> Result<f64> {
        check_eps(eps)?;
        let n = self.t.len();
        // First index whose inclusion would exceed the rejection budget.
        let i = self.below_p[1..].partition_point(|&c| c <= eps);
        if i >= n {
            return Ok(f64::NEG_INFINITY);
        }
        let frac_rejected = ((eps - self.below_p[i]) / self.p[i]).clamp(0.0, 1.0);
        let mut acc = LogSum::new();
        acc.add_ln((1.0 - frac_rejected).ln() + self.ln_q[i]);
        acc.add_ln(self.ln_q_from[i + 1]);
        Ok(acc.ln())
    }

    /// `max{m' : min_m P{t ≤ m} + e^{m'} Q{t > m} ≤ ε}`.
    pub fn d_dt_eps(&self, eps: f64) -> Result<f64> {
        check_eps(eps)?;
        let mut best = f64::NEG_INFINITY;
        for i in 0..=self.t.len() {
            let below = self.below_p[i];
            if below >= eps {
                break;
            }
            let lq = self.ln_q_from[i];
            let v = if lq == f64::NEG_INFINITY {
                f64::INFINITY
            } else {
                (eps - below).ln() - lq
            };
            best = best.max(v);
        }
        Ok(best)
    }
}

pub fn beta_eps(spec: &LlrSpectrum, eps: f64) -> Result<f64> {
    Ok(TestingProfile::new(spec).ln_beta_eps(eps)?.exp())
}

pub fn ln_beta_eps(spec: &LlrSpectrum, eps: f64) -> Result<f64> {
    TestingProfile::new(spec).ln_beta_eps(eps)
}

/// Hypothesis-testing divergence `-log β_ε`.
pub fn d_h_eps(spec: &LlrSpectrum, eps: f64) -> Result<f64> {
    Ok(-ln_beta_eps(spec, eps)?)
}

pub fn d_dt_eps(spec: &LlrSpectrum, eps: f64) -> Result<f64> {
    TestingProfile::new(spec).d_dt_eps(eps)
}

/// Conditional Rényi entropy of order `1+θ` from a block spectrum:
/// `-(1/θ) log Σ P^{1+θ} R^{-θ}`.
pub fn renyi_from_spectrum(spec: &LlrSpectrum, theta: f64) -> Result<f64> {
    if !(theta > 0.0) {
        return Err(FlbError::Domain(format!(
            "Rényi parameter θ = {theta} must be positive"
        )));
    }
    let mut acc = LogSum::new();
    for p in spec.points() {
        acc.add_ln(p.ln_p + theta * p.t);
    }
    Ok(-acc.ln() / theta)
}

/// `H_{1+θ}(j | r)` for a joint measure and a conditioning measure on its columns.
pub fn renyi_cond(
    j: &crate::measures::JointMeasure,
    r: &crate::measures::DiscreteMeasure,
    order: f64,
) -> Result<f64> {
    let lifted = j.lift_cols(r)?;
    let s = crate::spectrum::build_spectrum(j, &lifted)?;
    renyi_from_spectrum(&s, order - 1.0)
}

/// Number of points of the θ grid used by the Rényi-based comparison bounds.
pub const THETA_GRID_POINTS: usize = 1024;
/// Smallest θ of the grid; the grid is logarithmic on `[THETA_MIN, 1]`.
pub const THETA_MIN: f64 = 1e-4;

/// `θ ↦ H_{1+θ}` tabulated on the logarithmic θ grid.
#[derive(Clone, Debug)]
pub struct RenyiProfile {
    pub thetas: Vec<f64>,
    pub values: Vec<f64>,
}

impl RenyiProfile {
    pub fn new(spec: &LlrSpectrum, exec: Execution) -> Self {
        let k = THETA_GRID_POINTS;
        let thetas: Vec<f64> = (0..k)
            .map(|i| THETA_MIN.powf(1.0 - i as f64 / (k - 1) as f64))
            .collect();
        let values = map_range(k, exec, |i| {
            renyi_from_spectrum(spec, thetas[i]).unwrap_or(f64::NAN)
        });
        RenyiProfile { thetas, values }
    }
}

/// The comparison bounds evaluated with `R_E = P_E`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LegacyBounds {
    pub w1_lower: f64,
    pub w1_upper: f64,
    /// `max_θ θH_{1+θ} + (1-θ)H_sp^{ε-η} + log 2η² - 1`.
    pub w2_lower: f64,
    pub w2_theta: f64,
    /// The same maximization with the coefficient `(1+θ)` on the spectral term.
    pub w2_as_printed: f64,
    pub w3_lower: f64,
    pub w3_theta: f64,
}

pub fn legacy_bounds_w(
    spec: &LlrSpectrum,
    eps: f64,
    eta: f64,
    zeta: f64,
    exec: Execution,
) -> Result<LegacyBounds> {
    let profile = SrngProfile::new(spec);
    let renyi = RenyiProfile::new(spec, exec);
    legacy_bounds_with(&profile, &renyi, eps, eta, zeta)
}

pub fn legacy_bounds_with(
    profile: &SrngProfile,
    renyi: &RenyiProfile,
    eps: f64,
    eta: f64,
    zeta: f64,
) -> Result<LegacyBounds> {
    check_eps(eps)?;
    if !(eta > 0.0 && eta < eps && zeta > 0.0 && zeta < eps) {
        return Err(FlbError::Domain(format!(
            "splits η = {eta}, ζ = {zeta} must lie in (0, ε)"
        )));
    }
    let hsp_eta = profile.h_sp_eps(eps - eta)?;
    let hsp_zeta = profile.h_sp_eps(eps - zeta)?;
    let w1_lower = hsp_eta + (4.0 * eta * eta).ln() - 1.0;
    let w1_upper = hsp_zeta - zeta.ln();
    let tail = (2.0 * eta * eta).ln() - 1.0;
    let (mut w2, mut w2_theta, mut w2p, mut w3, mut w3_theta) = (
        f64::NEG_INFINITY,
        f64::NAN,
        f64::NEG_INFINITY,
        f64::NEG_INFINITY,
        f64::NAN,
    );
    let log_term = (2.0 * eps / 3.0).ln();
    for (&th, &h) in renyi.thetas.iter().zip(&renyi.values) {
        let a = th * h + (1.0 - th) * hsp_eta + tail;
        if a > w2 {
            w2 = a;
            w2_theta = th;
        }
        w2p = w2p.max(th * h + (1.0 + th) * hsp_eta + tail);
        let b = (th * h + (1.0 + th) * log_term) / th - 1.0;
        if b > w3 {
            w3 = b;
            w3_theta = th;
        }
    }
    Ok(LegacyBounds {
        w1_lower,
        w1_upper,
        w2_lower: w2,
        w2_theta,
        w2_as_printed: w2p,
        w3_lower: w3,
        w3_theta,
    })
}

/// Sacrificed length `log|A| - ℓ` in nats.
pub fn sacrifice(log_alphabet_size: f64, ell: f64) -> f64 {
    log_alphabet_size - ell
}

/// `S_min ≥ S_2` up to `slack`.
pub fn sacrifice_order_holds(s_min: f64, s_2: f64, slack: f64) -> bool {
    s_min + slack >= s_2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{counting_measure, DiscreteMeasure, JointMeasure, MeasureKind};
    use crate::spectrum::{build_spectrum, SpectrumOptions};

    fn leakage(q: f64, n: u64) -> LlrSpectrum {
        let j = JointMeasure::new(
            ["0", "1"],
            ["0", "1"],
            vec![(1.0 - q) / 2.0, q / 2.0, q / 2.0, (1.0 - q) / 2.0],
            MeasureKind::Probability,
        )
        .unwrap();
        let r = j.marginal(crate::measures::Axis::Cols);
        build_spectrum(&j, &j.lift_cols(&r).unwrap())
            .unwrap()
            .convolve_iid(n, &SpectrumOptions::default())
            .unwrap()
    }

    #[test]
    fn delta_min_limits_and_monotonicity() {
        let s = leakage(0.11, 20);
        assert_eq!(delta_min(-1e9, &s), 0.0);
        assert!((delta_min(1e3, &s) - 1.0).abs() < 1e-12);
        let prof = SrngProfile::new(&s);
        let mut prev = 0.0;
        for i in 0..400 {
            let m = -2.0 + i as f64 * 0.06;
            let d = prof.delta_min(m);
            assert!(d + 1e-15 >= prev);
            prev = d;
        }
    }

    #[test]
    fn hmin_single_shot_uniform() {
        // Uniform P_A on 4 letters, trivial E: δ(m) = 1 - 4e^{-m} beyond log 4.
        let p = DiscreteMeasure::uniform(["a", "b", "c", "d"]).unwrap();
        let s = build_spectrum(&p, &counting_measure(["a", "b", "c", "d"]).unwrap()).unwrap();
        for eps in [0.01, 0.3, 0.7] {
            let h = hmin_smooth_eps(&s, eps).unwrap();
            assert!((h - (4f64.ln() - (1.0 - eps).ln())).abs() < 1e-12);
        }
    }

    #[test]
    fn hmin_is_monotone_in_eps() {
        let s = leakage(0.11, 50);
        let prof = SrngProfile::new(&s);
        let mut prev = f64::NEG_INFINITY;
        for i in 1..60 {
            let h = prof.hmin_smooth_eps(i as f64 / 61.0).unwrap();
            assert!(h >= prev);
            prev = h;
        }
    }

    #[test]
    fn inversions_are_tight() {
        let s = leakage(0.11, 30);
        let prof = SrngProfile::new(&s);
        for eps in [1e-3, 0.05, 0.4] {
            let h = prof.hmin_smooth_eps(eps).unwrap();
            assert!((prof.delta_min(h) - eps).abs() < 1e-12);
            let l = prof.ell_min_eps(eps).unwrap();
            // Objective at the optimum equals ε for the best knot.
            let best = (0..prof.x.len())
                .map(|k| prof.delta_min(prof.x[k]) + 0.5 * ((l - prof.x[k]) / 2.0).exp())
                .fold(f64::INFINITY, f64::min);
            assert!((best - eps).abs() < 1e-12);
        }
    }

    #[test]
    fn ell_min_matches_grid_minimization() {
        // Uniform on two letters, trivial E, ε = 0.5.
        let p = DiscreteMeasure::uniform(["0", "1"]).unwrap();
        let s = build_spectrum(&p, &counting_measure(["0", "1"]).unwrap()).unwrap();
        let prof = SrngProfile::new(&s);
        let eps = 0.5;
        let l = prof.ell_min_eps(eps).unwrap();
        let objective = |mp: f64| {
            let mut best = f64::INFINITY;
            let mut m = -5.0;
            while m < 10.0 {
                best = best.min(prof.delta_min(m) + 0.5 * ((mp - m) / 2.0).exp());
                m += 1e-4;
            }
            best
        };
        assert!(objective(l - 1e-3) <= eps);
        assert!(objective(l + 1e-3) > eps);
    }

    #[test]
    fn beta_identical_hypotheses() {
        let p = DiscreteMeasure::probability([("a", 0.3), ("b", 0.7)]).unwrap();
        let s = build_spectrum(&p, &p).unwrap();
        for eps in [0.01, 0.5, 0.99] {
            assert!((beta_eps(&s, eps).unwrap() - (1.0 - eps)).abs() < 1e-15);
        }
        let d = d_dt_eps(&s, 0.2).unwrap();
        assert!((d - 0.2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn beta_without_budget_keeps_everything() {
        let s = build_spectrum(
            &DiscreteMeasure::bernoulli(0.11).unwrap(),
            &counting_measure(["0", "1"]).unwrap(),
        )
        .unwrap();
        assert!((beta_eps(&s, 1e-15).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn q_null_is_never_accepted() {
        let p = DiscreteMeasure::probability([("a", 1.0), ("b", 0.0)]).unwrap();
        let q = DiscreteMeasure::probability([("a", 0.4), ("b", 0.6)]).unwrap();
        let s = build_spectrum(&p, &q).unwrap();
        assert!((beta_eps(&s, 0.25).unwrap() - 0.75 * 0.4).abs() < 1e-15);
    }

    #[test]
    fn beta_is_nonincreasing_and_convex() {
        let s = leakage(0.2, 12);
        let prof = TestingProfile::new(&s);
        let b = |e: f64| prof.ln_beta_eps(e).unwrap().exp();
        for i in 1..40 {
            let e = i as f64 / 42.0;
            let h = 0.01;
            assert!(b(e + h) <= b(e) + 1e-15);
            assert!(b(e - h) + b(e + h) + 1e-13 >= 2.0 * b(e));
        }
    }

    #[test]
    fn dt_is_below_dh_on_small_pairs() {
        let p =
            DiscreteMeasure::probability([("a", 0.4), ("b", 0.3), ("c", 0.2), ("d", 0.1)]).unwrap();
        let q =
            DiscreteMeasure::probability([("a", 0.1), ("b", 0.2), ("c", 0.3), ("d", 0.4)]).unwrap();
        let s1 = build_spectrum(&p, &q).unwrap();
        for n in 1..=8 {
            let s = s1.convolve_iid(n, &SpectrumOptions::default()).unwrap();
            for eps in [0.01, 0.1, 0.3] {
                assert!(d_dt_eps(&s, eps).unwrap() <= d_h_eps(&s, eps).unwrap() + 1e-12);
            }
        }
    }

    #[test]
    fn chain_and_sacrifice_order() {
        let s = leakage(0.11, 1000);
        let prof = SrngProfile::new(&s);
        let eps = 1e-3;
        let (lmin, l2, h) = (
            prof.ell_min_eps(eps).unwrap(),
            prof.ell_2_eps(eps).unwrap(),
            prof.hmin_smooth_eps(eps).unwrap(),
        );
        assert!(lmin <= l2 + 1e-9 && l2 <= h + 1e-9);
        let log_a = 1000.0 * 2f64.ln();
        assert!(sacrifice_order_holds(
            sacrifice(log_a, lmin),
            sacrifice(log_a, l2),
            1e-9
        ));
        assert_eq!(sacrifice(log_a, log_a), 0.0);
    }

    #[test]
    fn h_sp_is_a_cdf_inverse() {
        let s = build_spectrum(
            &DiscreteMeasure::probability([("a", 0.2), ("b", 0.5), ("c", 0.3)]).unwrap(),
            &counting_measure(["a", "b", "c"]).unwrap(),
        )
        .unwrap();
        // X = -log p: knots -log 0.5 < -log 0.3 < -log 0.2 with CDF 0.5, 0.8, 1.0.
        let h = |e: f64| h_sp_eps(&s, e).unwrap();
        assert!((h(0.1) - -(0.5f64.ln())).abs() < 1e-15);
        assert!((h(0.5) - -(0.3f64.ln())).abs() < 1e-15);
        assert!((h(0.79) - -(0.3f64.ln())).abs() < 1e-15);
        assert!((h(0.81) - -(0.2f64.ln())).abs() < 1e-15);
    }

    #[test]
    fn renyi_limits() {
        let j = JointMeasure::new(
            ["0", "1", "2"],
            ["x", "y"],
            vec![0.1, 0.2, 0.15, 0.05, 0.3, 0.2],
            MeasureKind::Probability,
        )
        .unwrap();
        let r = j.marginal(crate::measures::Axis::Cols);
        let h = crate::quantities::cond_entropies(&j, &r).unwrap();
        let near = renyi_cond(&j, &r, 1.0 + 1e-5).unwrap();
        assert!((near - h.h).abs() < 1e-4);
        let two = renyi_cond(&j, &r, 2.0).unwrap();
        assert!((two - h.h_2).abs() < 1e-12);
    }

    #[test]
    fn legacy_bounds_sanity() {
        let s = leakage(0.11, 3000);
        let eps = 1e-3;
        let lb = legacy_bounds_w(&s, eps, eps / 2.0, eps / 2.0, Execution::default()).unwrap();
        let h = hmin_smooth_eps(&s, eps).unwrap();
        assert!(lb.w1_upper >= h);
        for v in [lb.w1_lower, lb.w1_upper, lb.w2_lower, lb.w3_lower] {
            assert!(v.is_finite());
        }
        assert!(lb.w1_lower <= lb.w2_lower);
        assert!(lb.w2_as_printed > h);
        assert!(legacy_bounds_w(&s, eps, eps, eps / 2.0, Execution::default()).is_err());
    }
}
