mod common;

use common::*;
use flb_core::bounds::{beta_eps, d_dt_eps, delta_min, ell_2_eps, ell_min_eps, hmin_smooth_eps};
use flb_core::measures::{Cells, MeasureKind};
use flb_core::spectrum::{build_spectrum, LlrSpectrum, SpectrumOptions};

struct Case {
    name: &'static str,
    p: Vec<f64>,
    q: Vec<f64>,
    max_n: usize,
}

fn cases() -> Vec<Case> {
    let leak = [0.445, 0.055, 0.055, 0.445];
    vec![
        Case {
            name: "bernoulli-vs-counting",
            p: vec![0.89, 0.11],
            q: vec![1.0, 1.0],
            max_n: 10,
        },
        Case {
            name: "bernoulli-pair",
            p: vec![0.3, 0.7],
            q: vec![0.6, 0.4],
            max_n: 10,
        },
        Case {
            name: "ternary",
            p: vec![0.5, 0.3, 0.2],
            q: vec![0.25, 0.5, 0.25],
            max_n: 7,
        },
        Case {
            name: "bsc-leakage",
            p: leak.to_vec(),
            q: vec![0.5; 4],
            max_n: 5,
        },
    ]
}

fn spectrum(c: &Case, n: usize) -> LlrSpectrum {
    let p = measure(&c.p, MeasureKind::Probability);
    let q = measure(&c.q, MeasureKind::Generic);
    build_spectrum(&p, &q)
        .unwrap()
        .convolve_iid(n as u64, &SpectrumOptions::default())
        .unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a == b) || (a - b).abs() <= tol
}

const EPS: [f64; 5] = [0.01, 0.05, 0.1, 0.25, 0.4];

#[test]
fn delta_min_matches_enumeration() {
    for c in cases() {
        for n in 1..=c.max_n {
            let s = spectrum(&c, n);
            let seqs = product_pairs(&c.p, &c.q, n);
            for k in -40..=40 {
                let m = k as f64 * 0.37;
                let (got, want) = (delta_min(m, &s), common::delta_min(&seqs, m));
                assert!(
                    close(got, want, 1e-10),
                    "{} n={n} m={m}: {got} vs {want}",
                    c.name
                );
            }
        }
    }
}

#[test]
fn beta_matches_linear_programming_dual() {
    for c in cases() {
        for n in 1..=c.max_n.min(8) {
            let s = spectrum(&c, n);
            let seqs = product_pairs(&c.p, &c.q, n);
            for eps in EPS {
                let (got, want) = (beta_eps(&s, eps).unwrap(), beta(&seqs, eps));
                assert!(
                    close(got, want, 1e-10),
                    "{} n={n} ε={eps}: {got} vs {want}",
                    c.name
                );
            }
        }
    }
}

#[test]
fn dt_and_collision_bounds_match_enumeration() {
    for c in cases() {
        for n in 1..=c.max_n.min(8) {
            let s = spectrum(&c, n);
            let seqs = product_pairs(&c.p, &c.q, n);
            for eps in EPS {
                let (got, want) = (d_dt_eps(&s, eps).unwrap(), d_dt(&seqs, eps));
                assert!(
                    close(got, want, 1e-10),
                    "{} D_DT n={n} ε={eps}: {got} vs {want}",
                    c.name
                );
                let (got, want) = (ell_2_eps(&s, eps).unwrap(), ell_2(&seqs, eps));
                assert!(
                    close(got, want, 1e-10),
                    "{} ℓ₂ n={n} ε={eps}: {got} vs {want}",
                    c.name
                );
            }
        }
    }
}

#[test]
fn smooth_min_entropy_and_ell_min_match_enumeration() {
    for c in cases() {
        for n in 1..=c.max_n.min(7) {
            let s = spectrum(&c, n);
            let seqs = product_pairs(&c.p, &c.q, n);
            for eps in EPS {
                let (got, want) = (hmin_smooth_eps(&s, eps).unwrap(), hmin_smooth(&seqs, eps));
                assert!(
                    close(got, want, 1e-9),
                    "{} H n={n} ε={eps}: {got} vs {want}",
                    c.name
                );
                let (got, want) = (ell_min_eps(&s, eps).unwrap(), ell_min(&seqs, eps));
                assert!(
                    close(got, want, 1e-10),
                    "{} ℓ_min n={n} ε={eps}: {got} vs {want}",
                    c.name
                );
            }
        }
    }
}

#[test]
fn ell_min_maximum_sits_on_a_knot() {
    // Between knots the objective m + 2 log(2(ε − δ_min(m))) has no interior maximum.
    let c = &cases()[0];
    let n = 6;
    let s = spectrum(c, n);
    let seqs = product_pairs(&c.p, &c.q, n);
    let eps = 0.1;
    let best = ell_min_eps(&s, eps).unwrap();
    for k in 0..4000 {
        let m = -5.0 + k as f64 * 0.0025;
        let d = common::delta_min(&seqs, m);
        if d < eps {
            assert!(m + 2.0 * (2.0 * (eps - d)).ln() <= best + 1e-9);
        }
    }
}

#[test]
fn conditional_pair_cells_match_flattened_oracle() {
    let j = joint(
        2,
        2,
        &[0.445, 0.055, 0.055, 0.445],
        MeasureKind::Probability,
    );
    let r = j.marginal(flb_core::measures::Axis::Cols);
    let lifted = j.lift_cols(&r).unwrap();
    let cells: Vec<f64> = lifted.cells().into_iter().map(|(_, w)| w).collect();
    assert_eq!(cells, vec![0.5; 4]);
    let s = build_spectrum(&j, &lifted)
        .unwrap()
        .convolve_iid(4, &SpectrumOptions::default())
        .unwrap();
    let seqs = product_pairs(&[0.445, 0.055, 0.055, 0.445], &[0.5; 4], 4);
    assert!(close(
        ell_2_eps(&s, 0.05).unwrap(),
        ell_2(&seqs, 0.05),
        1e-10
    ));
}
