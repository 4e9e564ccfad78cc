//! Brute-force reference values from explicit enumeration of all sequences.
//!
//! Nothing here touches spectra: every quantity is a direct sum over the
//! `|X|ⁿ` sequences of a product pair.

/// `(Pⁿ(x), Qⁿ(x))` for every sequence `x` of length `n`.
pub fn sequences(p: &[f64], q: &[f64], n: usize) -> Vec<(f64, f64)> {
    let mut out = vec![(1.0, 1.0)];
    for _ in 0..n {
        out = out
            .iter()
            .flat_map(|&(a, b)| p.iter().zip(q).map(move |(pi, qi)| (a * pi, b * qi)))
            .collect();
    }
    out
}

/// Distinct values of `f` over the sequences, with near-equal values (rounding
/// differences between permutations) collapsed onto the largest member.
fn cuts(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::new();
    for x in v {
        match out.last_mut() {
            Some(last) if (x - *last).abs() <= 1e-9 * x.abs().max(1.0) => *last = x,
            _ => out.push(x),
        }
    }
    out
}

fn llr(p: f64, q: f64) -> f64 {
    (p / q).ln()
}

/// `Σₓ (Pⁿ(x) − e^{−m} Qⁿ(x))₊`.
pub fn delta_min(seqs: &[(f64, f64)], m: f64) -> f64 {
    let c = (-m).exp();
    seqs.iter().map(|&(p, q)| (p - c * q).max(0.0)).sum()
}

/// Optimal randomized type-II error, from the dual
/// `max_{λ ≥ 0} λ(1 − ε) − Σₓ (λP(x) − Q(x))₊` over its breakpoints `λ = Q/P`.
pub fn beta(seqs: &[(f64, f64)], eps: f64) -> f64 {
    let lambdas = cuts(seqs.iter().filter(|s| s.0 > 0.0).map(|&(p, q)| q / p));
    lambdas
        .into_iter()
        .map(|l| l * (1.0 - eps) - seqs.iter().map(|&(p, q)| (l * p - q).max(0.0)).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `sup_m log((ε − P{t ≤ m}) / Q{t > m})`.
pub fn d_dt(seqs: &[(f64, f64)], eps: f64) -> f64 {
    let ts = cuts(
        seqs.iter()
            .filter(|s| s.0 > 0.0 && s.1 > 0.0)
            .map(|&(p, q)| llr(p, q)),
    );
    let mut best = f64::NEG_INFINITY;
    for m in std::iter::once(f64::NEG_INFINITY).chain(ts.iter().copied()) {
        let (mut below, mut above_q) = (0.0, 0.0);
        for &(p, q) in seqs.iter().filter(|s| s.0 > 0.0 && s.1 > 0.0) {
            if llr(p, q) <= m {
                below += p;
            } else {
                above_q += q;
            }
        }
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
    let xs = cuts(seqs.iter().filter(|s| s.0 > 0.0).map(|&(p, q)| -llr(p, q)));
    let mut best = f64::NEG_INFINITY;
    for m in std::iter::once(f64::NEG_INFINITY).chain(xs.iter().copied()) {
        let (mut below, mut collision) = (0.0, 0.0);
        for &(p, q) in seqs.iter().filter(|s| s.0 > 0.0) {
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

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_letter_values() {
        let s = sequences(&[0.75, 0.25], &[0.5, 0.5], 1);
        // Reject the letter with the smaller ratio first.
        assert!((beta(&s, 0.25) - 0.5).abs() < 1e-15);
        assert!((beta(&s, 0.125) - 0.75).abs() < 1e-15);
        assert!((delta_min(&s, 0.0) - 0.25).abs() < 1e-15);
        assert_eq!(sequences(&[0.5, 0.5], &[1.0, 1.0], 3).len(), 8);
    }
}
