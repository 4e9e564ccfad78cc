use crate::asymptotics::{conditional_stats, ExpansionPair};
use crate::error::{FlbError, Result};
use crate::measures::{JointMeasure, MeasureKind};
use crate::quantities::DivergenceStats;
use crate::spectrum::build_spectrum;

use super::wiretap::{lower_from_stats, secrecy_a1, upper_from_stats};

const MARKOV_TOL: f64 = 1e-10;

/// Probability measure on `X̃ × Ỹ × Z̃`, stored `x`-major then `y` then `z`.
#[derive(Clone, Debug, PartialEq)]
pub struct TripleMeasure {
    xs: Vec<String>,
    ys: Vec<String>,
    zs: Vec<String>,
    weights: Vec<f64>,
}

impl TripleMeasure {
    pub fn new<A, B, C>(xs: A, ys: B, zs: C, weights: Vec<f64>) -> Result<Self>
    where
        A: IntoIterator,
        A::Item: Into<String>,
        B: IntoIterator,
        B::Item: Into<String>,
        C: IntoIterator,
        C::Item: Into<String>,
    {
        let xs: Vec<String> = xs.into_iter().map(Into::into).collect();
        let ys: Vec<String> = ys.into_iter().map(Into::into).collect();
        let zs: Vec<String> = zs.into_iter().map(Into::into).collect();
        if weights.len() != xs.len() * ys.len() * zs.len() {
            return Err(FlbError::InvalidMeasure(format!(
                "triple table has {} entries, expected {}×{}×{}",
                weights.len(),
                xs.len(),
                ys.len(),
                zs.len()
            )));
        }
        // Row and column validation is delegated to a flattened joint table.
        JointMeasure::new(
            xs.iter().cloned(),
            pair_labels(&ys, &zs),
            weights.clone(),
            MeasureKind::Probability,
        )?;
        Ok(TripleMeasure {
            xs,
            ys,
            zs,
            weights,
        })
    }

    /// Product `P_X̃ × P_{Ỹ|X̃}` followed by `P_{Z̃|Ỹ}`, a Markov chain by construction.
    pub fn markov(xy: &JointMeasure, zy: &crate::measures::ConditionalKernel) -> Result<Self> {
        let ny = xy.cols().len();
        let nz = zy.outputs().len();
        let mut w = Vec::with_capacity(xy.rows().len() * ny * nz);
        for x in 0..xy.rows().len() {
            for (y, yl) in xy.cols().iter().enumerate() {
                let yi = zy.inputs().iter().position(|l| l == yl).ok_or_else(|| {
                    FlbError::LabelMismatch(format!("kernel has no input `{yl}`"))
                })?;
                for z in 0..nz {
                    w.push(xy.get(x, y) * zy.prob(yi, z));
                }
            }
        }
        Self::new(
            xy.rows().iter().cloned(),
            xy.cols().iter().cloned(),
            zy.outputs().iter().cloned(),
            w,
        )
    }

    fn at(&self, x: usize, y: usize, z: usize) -> f64 {
        self.weights[(x * self.ys.len() + y) * self.zs.len() + z]
    }

    pub fn marginal_xy(&self) -> JointMeasure {
        let mut w = vec![0.0; self.xs.len() * self.ys.len()];
        for x in 0..self.xs.len() {
            for y in 0..self.ys.len() {
                w[x * self.ys.len() + y] = (0..self.zs.len()).map(|z| self.at(x, y, z)).sum();
            }
        }
        JointMeasure::new(
            self.xs.clone(),
            self.ys.clone(),
            w,
            MeasureKind::Probability,
        )
        .expect("marginal of a valid triple")
    }

    pub fn marginal_xz(&self) -> JointMeasure {
        let mut w = vec![0.0; self.xs.len() * self.zs.len()];
        for x in 0..self.xs.len() {
            for z in 0..self.zs.len() {
                w[x * self.zs.len() + z] = (0..self.ys.len()).map(|y| self.at(x, y, z)).sum();
            }
        }
        JointMeasure::new(
            self.xs.clone(),
            self.zs.clone(),
            w,
            MeasureKind::Probability,
        )
        .expect("marginal of a valid triple")
    }

    fn marginal_yz(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.ys.len() * self.zs.len()];
        for x in 0..self.xs.len() {
            for y in 0..self.ys.len() {
                for z in 0..self.zs.len() {
                    w[y * self.zs.len() + z] += self.at(x, y, z);
                }
            }
        }
        w
    }

    /// `max |P(x,y,z) − P(x,y)·P(y,z)/P(y)|`, zero exactly for a Markov chain `X̃ − Ỹ − Z̃`.
    pub fn markov_gap(&self) -> f64 {
        let xy = self.marginal_xy();
        let yz = self.marginal_yz();
        let nz = self.zs.len();
        let py: Vec<f64> = (0..self.ys.len())
            .map(|y| yz[y * nz..(y + 1) * nz].iter().sum())
            .collect();
        let mut gap: f64 = 0.0;
        for x in 0..self.xs.len() {
            for y in 0..self.ys.len() {
                for z in 0..nz {
                    let f = if py[y] > 0.0 {
                        xy.get(x, y) * yz[y * nz + z] / py[y]
                    } else {
                        0.0
                    };
                    gap = gap.max((self.at(x, y, z) - f).abs());
                }
            }
        }
        gap
    }

    /// `(P_{X̃ỸZ̃}, P_{Ỹ|Z̃} × P_{X̃Z̃})` with rows `X̃` and columns `(Ỹ, Z̃)`.
    pub fn converse_pair(&self) -> Result<(JointMeasure, JointMeasure)> {
        let gap = self.markov_gap();
        if gap > MARKOV_TOL {
            return Err(FlbError::Domain(format!(
                "X̃ − Ỹ − Z̃ is not a Markov chain (deviation {gap:e})"
            )));
        }
        let xz = self.marginal_xz();
        let yz = self.marginal_yz();
        let nz = self.zs.len();
        let pz: Vec<f64> = (0..nz)
            .map(|z| (0..self.ys.len()).map(|y| yz[y * nz + z]).sum())
            .collect();
        let mut q = Vec::with_capacity(self.weights.len());
        for x in 0..self.xs.len() {
            for y in 0..self.ys.len() {
                for z in 0..nz {
                    // Columns with P_Z̃ = 0 carry no P-mass and are dropped from the conditioning.
                    q.push(if pz[z] > 0.0 {
                        yz[y * nz + z] / pz[z] * xz.get(x, z)
                    } else {
                        0.0
                    });
                }
            }
        }
        let cols = pair_labels(&self.ys, &self.zs);
        let p = JointMeasure::new(
            self.xs.clone(),
            cols.clone(),
            self.weights.clone(),
            MeasureKind::Probability,
        )?;
        let q = JointMeasure::new(self.xs.clone(), cols, q, MeasureKind::Generic)?;
        Ok((p, q))
    }
}

fn pair_labels(ys: &[String], zs: &[String]) -> Vec<String> {
    ys.iter()
        .flat_map(|y| zs.iter().map(move |z| format!("{y},{z}")))
        .collect()
}

/// Secret communication over correlated sources: lower bound from `P_X̃Ỹ`, `P_X̃Z̃`;
/// converse from `P_X̃ỸZ̃` against `P_{Ỹ|Z̃} × P_X̃Z̃`.
pub fn correlated_rv_expansions(
    triple: &TripleMeasure,
    eps: f64,
    delta: f64,
) -> Result<ExpansionPair> {
    let ys = conditional_stats(&triple.marginal_xy())?;
    let zs = conditional_stats(&triple.marginal_xz())?;
    let a1 = secrecy_a1(&ys, &zs);
    let lower = lower_from_stats(a1, &ys, &zs, eps, delta)?;
    let (p, q) = triple.converse_pair()?;
    let joint = DivergenceStats::from_spectrum(&build_spectrum(&p, &q)?)?;
    let upper = upper_from_stats(a1, &joint, eps, delta)?;
    Ok(ExpansionPair { lower, upper })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::ConditionalKernel;
    use crate::quantities::binary_entropy;

    fn bsc_chain(px: f64, a: f64, b: f64) -> TripleMeasure {
        let xy = JointMeasure::new(
            ["0", "1"],
            ["0", "1"],
            vec![
                (1.0 - px) * (1.0 - a),
                (1.0 - px) * a,
                px * a,
                px * (1.0 - a),
            ],
            MeasureKind::Probability,
        )
        .unwrap();
        TripleMeasure::markov(&xy, &ConditionalKernel::bsc(b).unwrap()).unwrap()
    }

    #[test]
    fn markov_chain_entropy_gap() {
        let t = bsc_chain(0.5, 0.1, 0.2);
        assert!(t.markov_gap() < 1e-16);
        let e = correlated_rv_expansions(&t, 1e-3, 1e-3).unwrap();
        // Uniform X̃ through BSC(0.1) then BSC(0.2): X̃ − Z̃ is BSC(0.26).
        let want = binary_entropy(0.26) - binary_entropy(0.1);
        assert!((e.upper.a1 - want).abs() < 1e-12);
        assert_eq!(e.lower.a1, e.upper.a1);
    }

    #[test]
    fn markov_violation_rejected() {
        let t = TripleMeasure::new(
            ["0", "1"],
            ["0", "1"],
            ["0", "1"],
            vec![0.25, 0.0, 0.0, 0.25, 0.0, 0.25, 0.25, 0.0],
        )
        .unwrap();
        assert!(t.markov_gap() > 0.1);
        assert!(correlated_rv_expansions(&t, 0.01, 0.01).is_err());
    }

    #[test]
    fn perfect_channel_is_degenerate() {
        let t = bsc_chain(0.3, 0.0, 0.2);
        assert!(matches!(
            correlated_rv_expansions(&t, 0.01, 0.01),
            Err(FlbError::Degenerate(_))
        ));
    }
}
