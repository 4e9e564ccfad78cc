use crate::asymptotics::{nondegenerate, Expansion, ExpansionPair};
use crate::bounds::Direction;
use crate::error::{FlbError, Result};
use crate::measures::{ConditionalKernel, JointMeasure, MeasureKind};
use crate::quantities::{f_constant, gauss_inv, ConstantTerm, DivergenceStats};
use crate::spectrum::build_spectrum;

use super::channel::ConditionalAdditiveChannel;

/// Legitimate and eavesdropper channels over one input group.
#[derive(Clone, Debug, PartialEq)]
pub struct WiretapPair {
    y: ConditionalAdditiveChannel,
    z: ConditionalAdditiveChannel,
    witness: Option<ConditionalKernel>,
}

impl WiretapPair {
    /// `witness` maps the legitimate output alphabet to the eavesdropper's; when
    /// present it must reproduce `W_Z` after `W_Y` within 1e-10.
    pub fn new(
        y: ConditionalAdditiveChannel,
        z: ConditionalAdditiveChannel,
        witness: Option<ConditionalKernel>,
    ) -> Result<Self> {
        if y.group() != z.group() {
            return Err(FlbError::Domain(
                "channels have different input groups".into(),
            ));
        }
        if let Some(w) = &witness {
            let composed = y.kernel()?.then(w)?;
            let err = composed.max_abs_diff(&z.kernel()?)?;
            if err > 1e-10 {
                return Err(FlbError::Domain(format!(
                    "witness does not reproduce the eavesdropper channel (error {err:e})"
                )));
            }
        }
        Ok(WiretapPair { y, z, witness })
    }

    /// Pair of binary symmetric channels with the canonical degradation witness.
    pub fn bsc(p_y: f64, p_z: f64) -> Result<Self> {
        let w = degraded_witness_bsc(p_y, p_z)?;
        Self::new(
            ConditionalAdditiveChannel::bsc(p_y)?,
            ConditionalAdditiveChannel::bsc(p_z)?,
            Some(w),
        )
    }

    pub fn y(&self) -> &ConditionalAdditiveChannel {
        &self.y
    }

    pub fn z(&self) -> &ConditionalAdditiveChannel {
        &self.z
    }

    pub fn witness(&self) -> Option<&ConditionalKernel> {
        self.witness.as_ref()
    }

    /// The pair `(W̃_{YZ|X=0}, W̃_{Y|Z} × W_{Z|X=0})` on `Y × Z`.
    pub fn converse_pair(&self) -> Result<(JointMeasure, JointMeasure)> {
        let w = self.witness.as_ref().ok_or_else(|| {
            FlbError::Domain("converse bound needs a degraded pair with an explicit witness".into())
        })?;
        let wy = self.y.kernel()?;
        let wz = self.z.kernel()?;
        let ny = wy.outputs().len();
        let nz = wz.outputs().len();
        let order = self.y.group().order() as f64;
        // Align witness labels with the channel output alphabets.
        let wi: Vec<usize> =
            wy.outputs()
                .iter()
                .map(|l| {
                    w.inputs().iter().position(|x| x == l).ok_or_else(|| {
                        FlbError::LabelMismatch(format!("witness has no input `{l}`"))
                    })
                })
                .collect::<Result<_>>()?;
        let wo: Vec<usize> =
            wz.outputs()
                .iter()
                .map(|l| {
                    w.outputs().iter().position(|x| x == l).ok_or_else(|| {
                        FlbError::LabelMismatch(format!("witness has no output `{l}`"))
                    })
                })
                .collect::<Result<_>>()?;
        let my: Vec<f64> = (0..ny)
            .map(|b| (0..wy.inputs().len()).map(|x| wy.prob(x, b)).sum::<f64>() / order)
            .collect();
        let mz: Vec<f64> = (0..nz)
            .map(|c| (0..wz.inputs().len()).map(|x| wz.prob(x, c)).sum::<f64>() / order)
            .collect();
        let mut p = Vec::with_capacity(ny * nz);
        let mut q = Vec::with_capacity(ny * nz);
        for b in 0..ny {
            for c in 0..nz {
                let deg = w.prob(wi[b], wo[c]);
                p.push(wy.prob(0, b) * deg);
                let back = if mz[c] > 0.0 {
                    my[b] * deg / mz[c]
                } else {
                    0.0
                };
                q.push(back * wz.prob(0, c));
            }
        }
        let pj = JointMeasure::new(
            wy.outputs().iter().cloned(),
            wz.outputs().iter().cloned(),
            p,
            MeasureKind::Probability,
        )?;
        let qj = JointMeasure::new(
            wy.outputs().iter().cloned(),
            wz.outputs().iter().cloned(),
            q,
            MeasureKind::Generic,
        )?;
        Ok((pj, qj))
    }
}

/// Kernel `W̃_{Z|Y}` for BSC(p_y) → BSC(p_z): crossover `(p_z − p_y)/(1 − 2p_y)`.
pub fn degraded_witness_bsc(p_y: f64, p_z: f64) -> Result<ConditionalKernel> {
    if !(p_y >= 0.0 && p_y <= p_z && p_z < 0.5) {
        return Err(FlbError::Domain(format!(
            "need 0 ≤ p_Y ≤ p_Z < ½, got p_Y = {p_y}, p_Z = {p_z}"
        )));
    }
    ConditionalKernel::bsc((p_z - p_y) / (1.0 - 2.0 * p_y))
}

/// Which reference table to use for the binary symmetric converse.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum P2Variant {
    /// `P_Z(y + e) · W̃(e)`, the general construction in `(y, e)` coordinates.
    Corrected,
    /// The four cells exactly as originally displayed; the `(1,0)` cell repeats
    /// the `(0,0)` expression and the table has total mass ≠ 1.
    AsPrinted,
}

/// The pair `(P¹_{YZ}, P²_{YZ})` for binary symmetric channels. Columns index the
/// degrading noise `e = z − y`, so `P¹(y, e) = P_Y(y)·W̃(e)`.
pub fn wiretap_bsc_tables(
    p_y: f64,
    p_z: f64,
    variant: P2Variant,
) -> Result<(JointMeasure, JointMeasure)> {
    if !(p_y > 0.0 && p_y < p_z && p_z < 0.5) {
        return Err(FlbError::Domain(format!(
            "need 0 < p_Y < p_Z < ½, got p_Y = {p_y}, p_Z = {p_z}"
        )));
    }
    let c = (p_z - p_y) / (1.0 - 2.0 * p_y);
    let p1 = JointMeasure::new(
        ["0", "1"],
        ["0", "1"],
        vec![
            (1.0 - p_y) * (1.0 - c),
            (1.0 - p_y) * c,
            p_y * (1.0 - c),
            p_y * c,
        ],
        MeasureKind::Probability,
    )?;
    let p2 = match variant {
        P2Variant::Corrected => vec![
            (1.0 - p_z) * (1.0 - c),
            p_z * c,
            p_z * (1.0 - c),
            (1.0 - p_z) * c,
        ],
        P2Variant::AsPrinted => vec![
            (1.0 - p_z) * (1.0 - c),
            p_z * c,
            (1.0 - p_z) * (1.0 - c),
            p_z * c,
        ],
    };
    let p2 = JointMeasure::new(["0", "1"], ["0", "1"], p2, MeasureKind::Generic)?;
    Ok((p1, p2))
}

fn check_eps_delta(eps: f64, delta: f64) -> Result<()> {
    if !(eps > 0.0 && delta > 0.0 && eps + delta < 1.0) {
        return Err(FlbError::Domain(format!(
            "need ε, δ > 0 and ε + δ < 1, got ε = {eps}, δ = {delta}"
        )));
    }
    Ok(())
}

/// Leading coefficient `H(Z-side) − H(Y-side)` from conditional statistics.
pub(crate) fn secrecy_a1(y_cond: &DivergenceStats, z_cond: &DivergenceStats) -> f64 {
    (-z_cond.d) - (-y_cond.d)
}

pub(crate) fn lower_from_stats(
    a1: f64,
    y: &DivergenceStats,
    z: &DivergenceStats,
    eps: f64,
    delta: f64,
) -> Result<Expansion> {
    check_eps_delta(eps, delta)?;
    let y = nondegenerate(*y)?;
    let z = nondegenerate(*z)?;
    Ok(Expansion {
        a1,
        a2: y.v.sqrt() * gauss_inv(eps)? + z.v.sqrt() * gauss_inv(delta)?,
        a3: -0.5,
        a4: f_constant(ConstantTerm::F5, &y, eps)? + f_constant(ConstantTerm::F3, &z, delta)?,
        direction: Direction::Lower,
    })
}

pub(crate) fn upper_from_stats(
    a1: f64,
    joint: &DivergenceStats,
    eps: f64,
    delta: f64,
) -> Result<Expansion> {
    check_eps_delta(eps, delta)?;
    let joint = nondegenerate(*joint)?;
    Expansion::from_stats(
        a1,
        &joint,
        eps + delta,
        0.5,
        ConstantTerm::F4,
        Direction::Upper,
    )
}

/// Achievability expansion (prime-power groups) and, for degraded pairs with a
/// witness, the converse expansion of `log N(n, ε, δ)`.
pub fn expand_wiretap(wp: &WiretapPair, eps: f64, delta: f64) -> Result<ExpansionPair> {
    if !wp.y.group().is_prime_power() {
        return Err(FlbError::Domain(format!(
            "group order {} is not a prime power",
            wp.y.group().order()
        )));
    }
    let ys = wp.y.conditional_stats()?;
    let zs = wp.z.conditional_stats()?;
    let a1 = secrecy_a1(&ys, &zs);
    let lower = lower_from_stats(a1, &ys, &zs, eps, delta)?;
    let (p, q) = wp.converse_pair()?;
    let joint = DivergenceStats::from_spectrum(&build_spectrum(&p, &q)?)?;
    let upper = upper_from_stats(a1, &joint, eps, delta)?;
    Ok(ExpansionPair { lower, upper })
}

/// Binary symmetric instance with Bernoulli-versus-counting statistics.
pub fn wiretap_bsc_expansions(
    p_y: f64,
    p_z: f64,
    eps: f64,
    delta: f64,
    variant: P2Variant,
) -> Result<ExpansionPair> {
    let bern = |p: f64| -> Result<DivergenceStats> {
        let ch = ConditionalAdditiveChannel::bsc(p)?;
        ch.conditional_stats()
    };
    let ys = bern(p_y)?;
    let zs = bern(p_z)?;
    let a1 = secrecy_a1(&ys, &zs);
    let lower = lower_from_stats(a1, &ys, &zs, eps, delta)?;
    let (p1, p2) = wiretap_bsc_tables(p_y, p_z, variant)?;
    let joint = DivergenceStats::from_spectrum(&build_spectrum(&p1, &p2)?)?;
    let upper = upper_from_stats(a1, &joint, eps, delta)?;
    Ok(ExpansionPair { lower, upper })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantities::binary_entropy;

    #[test]
    fn witness_crossovers() {
        let w = degraded_witness_bsc(0.1, 0.2).unwrap();
        assert!((w.prob(0, 1) - 0.125).abs() < 1e-15);
        assert_eq!(degraded_witness_bsc(0.2, 0.2).unwrap().prob(0, 1), 0.0);
        assert!((degraded_witness_bsc(0.0, 0.3).unwrap().prob(0, 1) - 0.3).abs() < 1e-15);
        assert!(degraded_witness_bsc(0.3, 0.2).is_err());
        let composed = ConditionalKernel::bsc(0.1).unwrap().then(&w).unwrap();
        assert!(
            composed
                .max_abs_diff(&ConditionalKernel::bsc(0.2).unwrap())
                .unwrap()
                < 1e-15
        );
    }

    #[test]
    fn tables() {
        let (p1, p2) = wiretap_bsc_tables(0.1, 0.2, P2Variant::Corrected).unwrap();
        assert!((p1.get(0, 0) - 0.7875).abs() < 1e-15);
        assert!((p1.mass() - 1.0).abs() < 1e-15);
        assert!((p2.mass() - 1.0).abs() < 1e-15);
        let (_, printed) = wiretap_bsc_tables(0.1, 0.2, P2Variant::AsPrinted).unwrap();
        assert_eq!(printed.get(1, 0), printed.get(0, 0));
        assert!((printed.mass() - 1.45).abs() < 1e-12);
        assert!(wiretap_bsc_tables(0.2, 0.1, P2Variant::Corrected).is_err());
    }

    #[test]
    fn general_construction_matches_bsc_tables() {
        let wp = WiretapPair::bsc(0.1, 0.2).unwrap();
        let (p, q) = wp.converse_pair().unwrap();
        let (p1, p2) = wiretap_bsc_tables(0.1, 0.2, P2Variant::Corrected).unwrap();
        for y in 0..2 {
            for e in 0..2 {
                assert!((p.get(y, y ^ e) - p1.get(y, e)).abs() < 1e-15);
                assert!((q.get(y, y ^ e) - p2.get(y, e)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn bsc_expansions() {
        let e = wiretap_bsc_expansions(0.1, 0.2, 1e-3, 1e-3, P2Variant::Corrected).unwrap();
        let h = binary_entropy(0.2) - binary_entropy(0.1);
        assert!((e.lower.a1 - h).abs() < 1e-12);
        assert_eq!(e.lower.a1.to_bits(), e.upper.a1.to_bits());
        let g = expand_wiretap(&WiretapPair::bsc(0.1, 0.2).unwrap(), 1e-3, 1e-3).unwrap();
        assert!((g.upper.a2 - e.upper.a2).abs() < 1e-12);
        assert!((g.lower.a4 - e.lower.a4).abs() < 1e-12);
        let flat = wiretap_bsc_expansions(0.15, 0.15 + 1e-15, 0.01, 0.01, P2Variant::Corrected);
        if let Ok(f) = flat {
            assert!(f.lower.a1.abs() < 1e-12);
        }
        // Equal crossovers: no secrecy at first order.
        let same = ConditionalAdditiveChannel::bsc(0.2).unwrap();
        let ys = same.conditional_stats().unwrap();
        assert_eq!(secrecy_a1(&ys, &ys), 0.0);
    }

    #[test]
    fn non_prime_power_group_is_rejected() {
        use super::super::channel::Group;
        use crate::measures::DiscreteMeasure;
        let g = Group::cyclic(6).unwrap();
        let noise = DiscreteMeasure::probability(
            (0..6).map(|i| (i.to_string(), 1.0 / 6.0 + if i == 0 { 0.1 } else { -0.02 })),
        )
        .unwrap();
        let ch = ConditionalAdditiveChannel::additive(g, &noise).unwrap();
        let wp = WiretapPair::new(ch.clone(), ch, None).unwrap();
        assert!(expand_wiretap(&wp, 0.01, 0.01).is_err());
    }
}
