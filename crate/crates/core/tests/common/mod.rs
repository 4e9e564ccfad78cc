//! Brute-force oracles over all sequences of a product pair.
#![allow(dead_code)]

use flb_core::measures::{DiscreteMeasure, JointMeasure, MeasureKind};

/// `(Pⁿ(x), Qⁿ(x))` for every sequence `x` of length `n`.
pub fn product_pairs(p: &[f64], q: &[f64], n: usize) -> Vec<(f64, f64)> {
    let mut out = vec![(1.0, 1.0)];
    for _ in 0..n {
        let mut next = Vec::with_capacity(out.len() * p.len());
        for &(a, b) in &out {
            for (pi, qi) in p.iter().zip(q) {
                next.push((a * pi, b * qi));
            }
        }
        out = next;
    }
    out
}

pub fn measure(w: &[f64], kind: MeasureKind) -> DiscreteMeasure {
    DiscreteMeasure::from_weights(w, kind).unwrap()
}

pub fn joint(rows: usize, cols: usize, w: &[f64], kind: MeasureKind) -> JointMeasure {
    JointMeasure::new(
        (0..rows).map(|i| i.to_string()),
        (0..cols).map(|i| i.to_string()),
        w.to_vec(),
        kind,
    )
    .unwrap()
}

/// `Σₓ (P(x) − e^{−m} Q(x))₊`.
pub fn delta_min(seqs: &[(f64, f64)], m: f64) -> f64 {
    let c = (-m).exp();
    seqs.iter().map(|&(p, q)| (p - c * q).max(0.0)).sum()
}

/// Linear-programming dual of the randomized test:
/// `max_{λ ≥ 0} λ(1 − ε) − Σₓ (λP(x) − Q(x))₊`, attained at a ratio `Q/P`.
pub fn beta(seqs: &[(f64, f64)], eps: f64) -> f64 {
    let mut best: f64 = 0.0;
    for &(p, q) in seqs {
        if p <= 0.0 {
            continue;
        }
        let lambda = q / p;
        let pen: f64 = seqs.iter().map(|&(a, b)| (lambda * a - b).max(0.0)).sum();
        best = best.max(lambda * (1.0 - eps) - pen);
    }
    best
}

fn llr(p: f64, q: f64) -> f64 {
    (p / q).ln()
}

/// `sup_m log((ε − P{t ≤ m}) / Q{t > m})` over thresholds at every sequence's `t`.
pub fn d_dt(seqs: &[(f64, f64)], eps: f64) -> f64 {
    let mut best = f64::NEG_INFINITY;
    let mut cuts: Vec<f64> = seqs
        .iter()
        .filter(|(p, q)| *p > 0.0 && *q > 0.0)
        .map(|&(p, q)| llr(p, q))
        .collect();
    cuts.push(f64::NEG_INFINITY);
    for m in cuts {
        let below: f64 = seqs
            .iter()
            .filter(|(p, q)| *p > 0.0 && *q > 0.0 && llr(*p, *q) <= m)
            .map(|s| s.0)
            .sum();
        let above_q: f64 = seqs
            .iter()
            .filter(|(p, q)| *p > 0.0 && *q > 0.0 && llr(*p, *q) > m)
            .map(|s| s.1)
            .sum();
        if below < eps {
            best = best.max(if above_q > 0.0 {
                ((eps - below) / above_q).ln()
            } else {
                f64::INFINITY
            });
        }
    }
    best
}

/// `sup_m 2 log(2(ε − P{X ≤ m})) − log Σ_{X > m} P²/Q` with `X = −log(P/Q)`.
pub fn ell_2(seqs: &[(f64, f64)], eps: f64) -> f64 {
    let xs: Vec<f64> = seqs
        .iter()
        .filter(|(p, _)| *p > 0.0)
        .map(|&(p, q)| -llr(p, q))
        .collect();
    let mut cuts = xs.clone();
    cuts.push(f64::NEG_INFINITY);
    let mut best = f64::NEG_INFINITY;
    for m in cuts {
        let mut below = 0.0;
        let mut collision = 0.0;
        for &(p, q) in seqs.iter().filter(|(p, _)| *p > 0.0) {
            if -llr(p, q) <= m {
                below += p;
            } else {
                collision += p * p / q;
            }
        }
        if below < eps {
            best = best.max(if collision > 0.0 {
                2.0 * (2.0 * (eps - below)).ln() - collision.ln()
            } else {
                f64::INFINITY
            });
        }
    }
    best
}

/// `sup{m : δ_min(m) ≤ ε}` by bisection on the oracle `δ_min`.
pub fn hmin_smooth(seqs: &[(f64, f64)], eps: f64) -> f64 {
    let (mut lo, mut hi) = (-200.0, 200.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if delta_min(seqs, mid) <= eps {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// `max_m m + 2 log(2(ε − δ_min(m)))` evaluated at every sequence's `X`.
pub fn ell_min(seqs: &[(f64, f64)], eps: f64) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for &(p, q) in seqs.iter().filter(|(p, _)| *p > 0.0) {
        let m = -llr(p, q);
        let d = delta_min(seqs, m);
        if d < eps {
            best = best.max(m + 2.0 * (2.0 * (eps - d)).ln());
        }
    }
    best
}

/// `P{t ≥ c}` and `Q{t ≥ c}` by direct summation.
pub fn tails(seqs: &[(f64, f64)], c: f64) -> (f64, f64) {
    let mut a = (0.0, 0.0);
    for &(p, q) in seqs {
        if p > 0.0 && llr(p, q) >= c {
            a.0 += p;
            a.1 += q;
        }
    }
    a
}
