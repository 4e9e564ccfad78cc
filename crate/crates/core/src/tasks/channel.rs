use crate::asymptotics::{conditional_stats, nondegenerate, Expansion, ExpansionPair};
use crate::bounds::Direction;
use crate::error::{FlbError, Result};
use crate::measures::{Axis, ConditionalKernel, DiscreteMeasure, JointMeasure, MeasureKind};
use crate::quantities::{ConstantTerm, DivergenceStats};
use crate::spectrum::{build_spectrum, LlrSpectrum, SpectrumOptions};

/// Product of cyclic groups `ℤ_{r₁} × … × ℤ_{r_k}` with mixed-radix labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Group {
    radices: Vec<usize>,
}

impl Group {
    pub fn cyclic(d: usize) -> Result<Self> {
        Self::product(vec![d])
    }

    pub fn product(radices: Vec<usize>) -> Result<Self> {
        if radices.is_empty() || radices.iter().any(|&r| r < 1) {
            return Err(FlbError::Domain(format!(
                "invalid group radices {radices:?}"
            )));
        }
        Ok(Group { radices })
    }

    pub fn radices(&self) -> &[usize] {
        &self.radices
    }

    pub fn order(&self) -> usize {
        self.radices.iter().product()
    }

    fn digits(&self, mut idx: usize) -> Vec<usize> {
        let mut d = vec![0; self.radices.len()];
        for (k, &r) in self.radices.iter().enumerate().rev() {
            d[k] = idx % r;
            idx /= r;
        }
        d
    }

    fn index(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.radices)
            .fold(0, |acc, (&d, &r)| acc * r + d)
    }

    /// Label of an element: `"3"` for cyclic groups, `"1.0.2"` for products.
    pub fn label(&self, idx: usize) -> String {
        self.digits(idx)
            .iter()
            .map(|d| d.to_string())
            .collect::<Vec<_>>()
            .join(".")
    }

    pub fn parse_label(&self, label: &str) -> Option<usize> {
        let parts: Vec<&str> = label.split('.').collect();
        if parts.len() != self.radices.len() {
            return None;
        }
        let mut digits = Vec::with_capacity(parts.len());
        for (p, &r) in parts.iter().zip(&self.radices) {
            let d: usize = p.parse().ok()?;
            if d >= r {
                return None;
            }
            digits.push(d);
        }
        Some(self.index(&digits))
    }

    /// `a − b`.
    pub fn sub(&self, a: usize, b: usize) -> usize {
        let (da, db) = (self.digits(a), self.digits(b));
        let diff: Vec<usize> = da
            .iter()
            .zip(&db)
            .zip(&self.radices)
            .map(|((&x, &y), &r)| (x + r - y) % r)
            .collect();
        self.index(&diff)
    }

    pub fn labels(&self) -> Vec<String> {
        (0..self.order()).map(|i| self.label(i)).collect()
    }

    pub fn is_prime_power(&self) -> bool {
        let mut n = self.order();
        if n < 2 {
            return false;
        }
        let mut p = 2;
        while p * p <= n {
            if n.is_multiple_of(p) {
                while n.is_multiple_of(p) {
                    n /= p;
                }
                return n == 1;
            }
            p += 1;
        }
        true
    }
}

/// Channel `W(x, ỹ | x') = P_{X,Ỹ}(x − x', ỹ)` over a finite abelian group.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionalAdditiveChannel {
    group: Group,
    /// Rows in group-index order, columns are the Ỹ alphabet.
    base: JointMeasure,
}

impl ConditionalAdditiveChannel {
    pub fn new(group: Group, base: &JointMeasure) -> Result<Self> {
        if (base.mass() - 1.0).abs() > 1e-12 {
            return Err(FlbError::InvalidMeasure(format!(
                "noise distribution has mass {}",
                base.mass()
            )));
        }
        let order = group.order();
        if base.rows().len() != order {
            return Err(FlbError::Domain(format!(
                "noise rows do not form the group of order {order}"
            )));
        }
        let nc = base.cols().len();
        let mut weights = vec![0.0; order * nc];
        for (r, label) in base.rows().iter().enumerate() {
            let idx = group.parse_label(label).ok_or_else(|| {
                FlbError::Domain(format!("`{label}` is not an element of the group"))
            })?;
            for c in 0..nc {
                weights[idx * nc + c] = base.get(r, c);
            }
        }
        let base = JointMeasure::new(
            group.labels(),
            base.cols().iter().cloned(),
            weights,
            MeasureKind::Probability,
        )?;
        Ok(ConditionalAdditiveChannel { group, base })
    }

    /// Additive noise without side output.
    pub fn additive(group: Group, noise: &DiscreteMeasure) -> Result<Self> {
        let base = JointMeasure::new(
            noise.labels().iter().cloned(),
            ["-"],
            noise.weights().to_vec(),
            MeasureKind::Generic,
        )?;
        Self::new(group, &base)
    }

    pub fn bsc(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(FlbError::Domain(format!("crossover {p} outside [0, 1]")));
        }
        Self::additive(
            Group::cyclic(2)?,
            &DiscreteMeasure::probability([("0", 1.0 - p), ("1", p)])?,
        )
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    /// `P_{X,Ỹ}` with rows in group order.
    pub fn base(&self) -> &JointMeasure {
        &self.base
    }

    fn trivial_side(&self) -> bool {
        self.base.cols().len() == 1
    }

    pub fn output_labels(&self) -> Vec<String> {
        let mut out = Vec::new();
        for x in self.group.labels() {
            if self.trivial_side() {
                out.push(x);
            } else {
                for y in self.base.cols() {
                    out.push(format!("{x}|{y}"));
                }
            }
        }
        out
    }

    pub fn kernel(&self) -> Result<ConditionalKernel> {
        let order = self.group.order();
        let nc = self.base.cols().len();
        let mut m = Vec::with_capacity(order * order * nc);
        for xin in 0..order {
            for x in 0..order {
                let e = self.group.sub(x, xin);
                for c in 0..nc {
                    m.push(self.base.get(e, c));
                }
            }
        }
        ConditionalKernel::new(self.group.labels(), self.output_labels(), m)
    }

    /// `H(P_{X,Ỹ} | P_Ỹ)` statistics before the `log|X|` shift.
    pub(crate) fn conditional_stats(&self) -> Result<DivergenceStats> {
        conditional_stats(&self.base)
    }

    /// Statistics of `log(P_{X,Ỹ} / (U_X × P_Ỹ))`.
    pub fn stats(&self) -> Result<DivergenceStats> {
        Ok(self
            .conditional_stats()?
            .shifted((self.group.order() as f64).ln()))
    }

    /// Order-1 spectrum of `log(P_{X,Ỹ} / (U_X × P_Ỹ))`.
    pub fn noise_spectrum(&self) -> Result<LlrSpectrum> {
        let r = self.base.marginal(Axis::Cols);
        let s = build_spectrum(&self.base, &self.base.lift_cols(&r)?)?;
        Ok(s.shifted((self.group.order() as f64).ln()))
    }
}

/// Block spectrum of the channel's information density under a uniform input.
pub fn channel_spectrum(ch: &ConditionalAdditiveChannel, n: u64) -> Result<LlrSpectrum> {
    let s = ch.noise_spectrum()?;
    if s.len() < 2 {
        return Err(FlbError::Degenerate(
            "channel information density is constant (zero dispersion)".into(),
        ));
    }
    s.convolve_iid(n, &SpectrumOptions::default())
}

/// Achievability (F5) and converse (F4) expansions of `log M*(n, ε)`.
pub fn expand_channel(ch: &ConditionalAdditiveChannel, eps: f64) -> Result<ExpansionPair> {
    let stats = nondegenerate(ch.stats()?)?;
    Ok(ExpansionPair {
        lower: Expansion::from_stats(
            stats.d,
            &stats,
            eps,
            0.0,
            ConstantTerm::F5,
            Direction::Lower,
        )?,
        upper: Expansion::from_stats(
            stats.d,
            &stats,
            eps,
            0.5,
            ConstantTerm::F4,
            Direction::Upper,
        )?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantities::binary_entropy;

    #[test]
    fn group_arithmetic() {
        let g = Group::product(vec![2, 3]).unwrap();
        assert_eq!(g.order(), 6);
        assert_eq!(g.label(5), "1.2");
        assert_eq!(g.parse_label("1.2"), Some(5));
        assert_eq!(g.parse_label("2.0"), None);
        assert_eq!(
            g.label(g.sub(g.parse_label("0.1").unwrap(), g.parse_label("1.2").unwrap())),
            "1.2"
        );
        assert!(Group::cyclic(8).unwrap().is_prime_power());
        assert!(!Group::cyclic(6).unwrap().is_prime_power());
        assert!(Group::product(vec![3, 3]).unwrap().is_prime_power());
    }

    #[test]
    fn bsc_spectrum_and_expansion() {
        let ch = ConditionalAdditiveChannel::bsc(0.11).unwrap();
        let s = ch.noise_spectrum().unwrap();
        assert_eq!(s.len(), 2);
        assert!((s.lattice_span(None).span - (0.89f64 / 0.11).ln()).abs() < 1e-12);
        assert!((s.p_total() - 1.0).abs() < 1e-15);
        let e = expand_channel(&ch, 1e-3).unwrap();
        assert!((e.lower.a1 - (2f64.ln() - binary_entropy(0.11))).abs() < 1e-12);
        assert_eq!(e.lower.a1.to_bits(), e.upper.a1.to_bits());
        let n: f64 = 500.0;
        let gap = e.upper.eval(n) - e.lower.eval(n);
        assert!((gap - (0.5 * n.ln() + e.upper.a4 - e.lower.a4)).abs() < 1e-9);
        assert!(gap > 0.0);
    }

    #[test]
    fn noiseless_channel_is_degenerate() {
        let ch = ConditionalAdditiveChannel::bsc(0.0).unwrap();
        assert!(matches!(
            channel_spectrum(&ch, 3),
            Err(FlbError::Degenerate(_))
        ));
        assert!(expand_channel(&ch, 0.1).is_err());
    }

    #[test]
    fn kernel_is_additive() {
        let noise = DiscreteMeasure::probability([("0", 0.6), ("1", 0.3), ("2", 0.1)]).unwrap();
        let ch = ConditionalAdditiveChannel::additive(Group::cyclic(3).unwrap(), &noise).unwrap();
        let k = ch.kernel().unwrap();
        // W(2 | 1) = P(1), W(0 | 1) = P(2).
        assert_eq!(k.prob(1, 2), 0.3);
        assert_eq!(k.prob(1, 0), 0.1);
        let s = channel_spectrum(&ch, 4).unwrap();
        assert!((s.p_total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn side_output_channel() {
        let base = JointMeasure::new(
            ["1", "0"],
            ["a", "b"],
            vec![0.05, 0.15, 0.6, 0.2],
            MeasureKind::Probability,
        )
        .unwrap();
        let ch = ConditionalAdditiveChannel::new(Group::cyclic(2).unwrap(), &base).unwrap();
        assert_eq!(ch.base().get(0, 0), 0.6);
        let k = ch.kernel().unwrap();
        assert_eq!(k.outputs().len(), 4);
        assert_eq!(k.outputs()[1], "0|b");
        let bad =
            JointMeasure::new(["0", "7"], ["a"], vec![0.5, 0.5], MeasureKind::Probability).unwrap();
        assert!(ConditionalAdditiveChannel::new(Group::cyclic(2).unwrap(), &bad).is_err());
    }
}
