use flb_core::asymptotics::{expand_source_side, expand_srng};
use flb_core::measures::{ConditionalKernel, JointMeasure, MeasureKind};
use flb_core::quantities::{binary_entropy, binary_varentropy};
use flb_core::tasks::{
    bpsk_expansions, bpsk_stats, bpsk_stats_fixed, channel_spectrum, correlated_rv_expansions,
    expand_channel, expand_wiretap, wiretap_bsc_expansions, BpskPair, ConditionalAdditiveChannel,
    Group, P2Variant, TripleMeasure, WiretapPair,
};

#[test]
fn leading_coefficients_match_bit_for_bit() {
    let ch = ConditionalAdditiveChannel::bsc(0.11).unwrap();
    let e = expand_channel(&ch, 1e-3).unwrap();
    assert_eq!(e.lower.a1.to_bits(), e.upper.a1.to_bits());

    let w = wiretap_bsc_expansions(0.1, 0.2, 1e-3, 1e-3, P2Variant::Corrected).unwrap();
    assert_eq!(w.lower.a1.to_bits(), w.upper.a1.to_bits());

    let g = expand_wiretap(&WiretapPair::bsc(0.05, 0.3).unwrap(), 1e-2, 1e-2).unwrap();
    assert_eq!(g.lower.a1.to_bits(), g.upper.a1.to_bits());

    let b = bpsk_expansions(&BpskPair::new(0.5, 2.0).unwrap(), 1e-3, 1e-3).unwrap();
    assert_eq!(b.lower.a1.to_bits(), b.upper.a1.to_bits());

    let xy = JointMeasure::new(
        ["0", "1"],
        ["0", "1"],
        vec![0.4, 0.1, 0.05, 0.45],
        MeasureKind::Probability,
    )
    .unwrap();
    let t = TripleMeasure::markov(&xy, &ConditionalKernel::bsc(0.15).unwrap()).unwrap();
    let c = correlated_rv_expansions(&t, 1e-2, 1e-2).unwrap();
    assert_eq!(c.lower.a1.to_bits(), c.upper.a1.to_bits());

    let s = expand_source_side(&xy, 1e-2).unwrap();
    assert_eq!(s.lower.a1.to_bits(), s.upper.a1.to_bits());
}

#[test]
fn bsc_channel_matches_closed_forms() {
    let q = 0.11;
    let ch = ConditionalAdditiveChannel::bsc(q).unwrap();
    let st = ch.stats().unwrap();
    assert!((st.d - (2f64.ln() - binary_entropy(q))).abs() < 1e-14);
    assert!((st.v - binary_varentropy(q)).abs() < 1e-14);
    assert!((st.span - ((1.0 - q) / q).ln()).abs() < 1e-12);
    let s = channel_spectrum(&ch, 50).unwrap();
    assert!((s.p_total() - 1.0).abs() < 1e-12);
    assert!(channel_spectrum(&ConditionalAdditiveChannel::bsc(0.0).unwrap(), 3).is_err());
}

#[test]
fn product_group_channel_is_conditional_additive() {
    let g = Group::product(vec![2, 3]).unwrap();
    let labels = g.labels();
    let base = JointMeasure::new(
        labels.clone(),
        ["a", "b"],
        vec![
            0.3, 0.1, 0.05, 0.05, 0.05, 0.05, 0.1, 0.1, 0.05, 0.05, 0.05, 0.05,
        ],
        MeasureKind::Probability,
    )
    .unwrap();
    let ch = ConditionalAdditiveChannel::new(g, &base).unwrap();
    let k = ch.kernel().unwrap();
    for i in 0..labels.len() {
        let row: f64 = (0..k.outputs().len()).map(|o| k.prob(i, o)).sum();
        assert!((row - 1.0).abs() < 1e-14);
    }
    // Rows of W are permutations of one another, so every input sees the same entropy.
    let mut first: Vec<f64> = (0..k.outputs().len()).map(|o| k.prob(0, o)).collect();
    first.sort_by(f64::total_cmp);
    for i in 1..labels.len() {
        let mut row: Vec<f64> = (0..k.outputs().len()).map(|o| k.prob(i, o)).collect();
        row.sort_by(f64::total_cmp);
        assert_eq!(row, first);
    }
}

#[test]
fn srng_first_order_is_conditional_entropy() {
    let q = 0.11;
    let j = JointMeasure::new(
        ["0", "1"],
        ["0", "1"],
        vec![0.5 * (1.0 - q), 0.5 * q, 0.5 * q, 0.5 * (1.0 - q)],
        MeasureKind::Probability,
    )
    .unwrap();
    let e = expand_srng(&j, 1e-3).unwrap();
    assert!((e.gs1.a1 - binary_entropy(q)).abs() < 1e-14);
    assert_eq!(e.gs1.a2, e.gs2.a2);
    assert!(e.gs2.a4 < e.gs1.a4);
}

#[test]
fn bpsk_quadrature_is_self_consistent() {
    for sigma2 in [0.25, 1.0, 4.0, 16.0] {
        let a = bpsk_stats_fixed(sigma2, 256).unwrap();
        let b = bpsk_stats_fixed(sigma2, 512).unwrap();
        let rel = |x: f64, y: f64| (x - y).abs() / y.abs();
        assert!(rel(a.d, b.d) < 1e-8 && rel(a.v, b.v) < 1e-8 && rel(a.kappa, b.kappa) < 1e-8);
    }
    let d: Vec<f64> = [1.0, 4.0, 16.0]
        .iter()
        .map(|&s| bpsk_stats(s).unwrap().d)
        .collect();
    assert!(d[0] > d[1] && d[1] > d[2]);
}
