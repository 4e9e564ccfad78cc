//! Finite measures, joint tables and stochastic kernels.

use std::collections::HashMap;

use crate::error::{FlbError, Result};

/// Absolute tolerance for kind checks and row-sum checks.
pub const KIND_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeasureKind {
    Probability,
    Subnormalized,
    Generic,
}

fn check_weights(weights: &[f64], kind: MeasureKind) -> Result<()> {
    for &w in weights {
        if !(w.is_finite() && w >= 0.0) {
            return Err(FlbError::InvalidMeasure(format!(
                "weight {w} is not a finite non-negative number"
            )));
        }
    }
    let total: f64 = weights.iter().sum();
    match kind {
        MeasureKind::Probability if (total - 1.0).abs() > KIND_TOL => Err(
            FlbError::InvalidMeasure(format!("probability weights sum to {total}")),
        ),
        MeasureKind::Subnormalized if total > 1.0 + KIND_TOL => Err(FlbError::InvalidMeasure(
            format!("sub-normalized weights sum to {total}"),
        )),
        _ => Ok(()),
    }
}

fn check_unique(labels: &[String], what: &str) -> Result<HashMap<String, usize>> {
    let mut index = HashMap::with_capacity(labels.len());
    for (i, l) in labels.iter().enumerate() {
        if index.insert(l.clone(), i).is_some() {
            return Err(FlbError::InvalidMeasure(format!(
                "duplicate {what} label `{l}`"
            )));
        }
    }
    Ok(index)
}

/// Non-negative weights on a finite labelled set.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteMeasure {
    labels: Vec<String>,
    weights: Vec<f64>,
    kind: MeasureKind,
}

impl DiscreteMeasure {
    pub fn new<L, I>(atoms: I, kind: MeasureKind) -> Result<Self>
    where
        L: Into<String>,
        I: IntoIterator<Item = (L, f64)>,
    {
        let (labels, weights): (Vec<String>, Vec<f64>) =
            atoms.into_iter().map(|(l, w)| (l.into(), w)).unzip();
        if labels.is_empty() {
            return Err(FlbError::InvalidMeasure("empty atom set".into()));
        }
        check_unique(&labels, "atom")?;
        check_weights(&weights, kind)?;
        Ok(DiscreteMeasure {
            labels,
            weights,
            kind,
        })
    }

    pub fn probability<L, I>(atoms: I) -> Result<Self>
    where
        L: Into<String>,
        I: IntoIterator<Item = (L, f64)>,
    {
        Self::new(atoms, MeasureKind::Probability)
    }

    /// Atoms labelled `0, 1, …` in order.
    pub fn from_weights(weights: &[f64], kind: MeasureKind) -> Result<Self> {
        Self::new(
            weights.iter().enumerate().map(|(i, &w)| (i.to_string(), w)),
            kind,
        )
    }

    /// Bernoulli law on `{0, 1}` with `P(1) = p`.
    pub fn bernoulli(p: f64) -> Result<Self> {
        Self::probability([("0", 1.0 - p), ("1", p)])
    }

    pub fn uniform<L: Into<String>, I: IntoIterator<Item = L>>(labels: I) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let w = 1.0 / labels.len().max(1) as f64;
        Self::probability(labels.into_iter().map(|l| (l, w)))
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn kind(&self) -> MeasureKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn weight(&self, label: &str) -> Option<f64> {
        self.index_of(label).map(|i| self.weights[i])
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&str, f64)> {
        self.labels
            .iter()
            .map(String::as_str)
            .zip(self.weights.iter().copied())
    }

    /// Number of atoms with positive weight.
    pub fn support_len(&self) -> usize {
        self.weights.iter().filter(|&&w| w > 0.0).count()
    }

    /// Same atoms with every weight multiplied by `c`; the kind becomes generic.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(
            self.atoms().map(|(l, w)| (l.to_string(), w * c)),
            MeasureKind::Generic,
        )
    }
}

/// Weight 1 on every label.
pub fn counting_measure<L: Into<String>, I: IntoIterator<Item = L>>(
    labels: I,
) -> Result<DiscreteMeasure> {
    DiscreteMeasure::new(
        labels.into_iter().map(|l| (l.into(), 1.0)),
        MeasureKind::Generic,
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    /// Keep the row system (sum over columns).
    Rows,
    /// Keep the column system (sum over rows).
    Cols,
}

/// Weight table over `rows × cols`, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct JointMeasure {
    rows: Vec<String>,
    cols: Vec<String>,
    weights: Vec<f64>,
    kind: MeasureKind,
}

impl JointMeasure {
    pub fn new<R, C>(rows: R, cols: C, weights: Vec<f64>, kind: MeasureKind) -> Result<Self>
    where
        R: IntoIterator,
        R::Item: Into<String>,
        C: IntoIterator,
        C::Item: Into<String>,
    {
        let rows: Vec<String> = rows.into_iter().map(Into::into).collect();
        let cols: Vec<String> = cols.into_iter().map(Into::into).collect();
        if rows.is_empty() || cols.is_empty() {
            return Err(FlbError::InvalidMeasure("empty joint alphabet".into()));
        }
        if weights.len() != rows.len() * cols.len() {
            return Err(FlbError::InvalidMeasure(format!(
                "joint table has {} entries, expected {}×{}",
                weights.len(),
                rows.len(),
                cols.len()
            )));
        }
        check_unique(&rows, "row")?;
        check_unique(&cols, "column")?;
        check_weights(&weights, kind)?;
        Ok(JointMeasure {
            rows,
            cols,
            weights,
            kind,
        })
    }

    /// Builds a table from `(row, col, weight)` cells; labels are ordered by first
    /// appearance and missing cells are zero. Repeated cells are rejected.
    pub fn from_cells<R, C, I>(cells: I, kind: MeasureKind) -> Result<Self>
    where
        R: Into<String>,
        C: Into<String>,
        I: IntoIterator<Item = (R, C, f64)>,
    {
        let mut rows: Vec<String> = Vec::new();
        let mut cols: Vec<String> = Vec::new();
        let mut row_ix: HashMap<String, usize> = HashMap::new();
        let mut col_ix: HashMap<String, usize> = HashMap::new();
        let mut entries = Vec::new();
        for (r, c, w) in cells {
            let (r, c) = (r.into(), c.into());
            let ri = *row_ix.entry(r.clone()).or_insert_with(|| {
                rows.push(r.clone());
                rows.len() - 1
            });
            let ci = *col_ix.entry(c.clone()).or_insert_with(|| {
                cols.push(c.clone());
                cols.len() - 1
            });
            entries.push((ri, ci, w, r, c));
        }
        let mut weights = vec![0.0; rows.len() * cols.len()];
        let mut seen = vec![false; weights.len()];
        for (ri, ci, w, r, c) in entries {
            let k = ri * cols.len() + ci;
            if seen[k] {
                return Err(FlbError::InvalidMeasure(format!(
                    "cell ({r}, {c}) given twice"
                )));
            }
            seen[k] = true;
            weights[k] = w;
        }
        Self::new(rows, cols, weights, kind)
    }

    /// Product table `p(row)·q(col)`.
    pub fn product(p: &DiscreteMeasure, q: &DiscreteMeasure, kind: MeasureKind) -> Result<Self> {
        let mut weights = Vec::with_capacity(p.len() * q.len());
        for &a in p.weights() {
            for &b in q.weights() {
                weights.push(a * b);
            }
        }
        Self::new(
            p.labels().iter().cloned(),
            q.labels().iter().cloned(),
            weights,
            kind,
        )
    }

    pub fn rows(&self) -> &[String] {
        &self.rows
    }

    pub fn cols(&self) -> &[String] {
        &self.cols
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn kind(&self) -> MeasureKind {
        self.kind
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.weights[r * self.cols.len() + c]
    }

    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn marginal(&self, axis: Axis) -> DiscreteMeasure {
        let nc = self.cols.len();
        let (labels, sums): (&[String], Vec<f64>) = match axis {
            Axis::Rows => (
                &self.rows,
                (0..self.rows.len())
                    .map(|r| self.weights[r * nc..(r + 1) * nc].iter().sum())
                    .collect(),
            ),
            Axis::Cols => (
                &self.cols,
                (0..nc)
                    .map(|c| (0..self.rows.len()).map(|r| self.get(r, c)).sum())
                    .collect(),
            ),
        };
        let kind = self.kind;
        DiscreteMeasure {
            labels: labels.to_vec(),
            weights: sums,
            kind,
        }
    }

    /// The table `(a, b) ↦ r(b)` for every row `a`, i.e. `r` lifted to the joint
    /// alphabet. Columns of `self` are matched to atoms of `r` by label.
    pub fn lift_cols(&self, r: &DiscreteMeasure) -> Result<Self> {
        let mut col_w = Vec::with_capacity(self.cols.len());
        for c in &self.cols {
            col_w.push(r.weight(c).ok_or_else(|| {
                FlbError::LabelMismatch(format!("conditioning measure has no atom `{c}`"))
            })?);
        }
        let weights = (0..self.rows.len())
            .flat_map(|_| col_w.iter().copied())
            .collect();
        Self::new(
            self.rows.iter().cloned(),
            self.cols.iter().cloned(),
            weights,
            MeasureKind::Generic,
        )
    }

    pub fn transpose(&self) -> Self {
        let (nr, nc) = (self.rows.len(), self.cols.len());
        let mut weights = vec![0.0; nr * nc];
        for r in 0..nr {
            for c in 0..nc {
                weights[c * nr + r] = self.get(r, c);
            }
        }
        JointMeasure {
            rows: self.cols.clone(),
            cols: self.rows.clone(),
            weights,
            kind: self.kind,
        }
    }
}

pub fn marginal(j: &JointMeasure, axis: Axis) -> DiscreteMeasure {
    j.marginal(axis)
}

/// Row-stochastic matrix from input labels to output labels.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionalKernel {
    inputs: Vec<String>,
    outputs: Vec<String>,
    matrix: Vec<f64>,
}

impl ConditionalKernel {
    pub fn new<I, O>(inputs: I, outputs: O, matrix: Vec<f64>) -> Result<Self>
    where
        I: IntoIterator,
        I::Item: Into<String>,
        O: IntoIterator,
        O::Item: Into<String>,
    {
        let inputs: Vec<String> = inputs.into_iter().map(Into::into).collect();
        let outputs: Vec<String> = outputs.into_iter().map(Into::into).collect();
        if inputs.is_empty() || outputs.is_empty() {
            return Err(FlbError::InvalidMeasure("empty kernel alphabet".into()));
        }
        if matrix.len() != inputs.len() * outputs.len() {
            return Err(FlbError::InvalidMeasure(format!(
                "kernel matrix has {} entries, expected {}×{}",
                matrix.len(),
                inputs.len(),
                outputs.len()
            )));
        }
        check_unique(&inputs, "kernel input")?;
        check_unique(&outputs, "kernel output")?;
        let no = outputs.len();
        for (i, label) in inputs.iter().enumerate() {
            let row = &matrix[i * no..(i + 1) * no];
            check_weights(row, MeasureKind::Probability).map_err(|_| {
                FlbError::InvalidMeasure(format!(
                    "kernel row `{label}` is not a probability vector (sum {})",
                    row.iter().sum::<f64>()
                ))
            })?;
        }
        Ok(ConditionalKernel {
            inputs,
            outputs,
            matrix,
        })
    }

    /// Builds a kernel from `(input, output, prob)` entries; missing entries are zero.
    pub fn from_entries<A, B, I>(entries: I) -> Result<Self>
    where
        A: Into<String>,
        B: Into<String>,
        I: IntoIterator<Item = (A, B, f64)>,
    {
        let j = JointMeasure::from_cells(entries, MeasureKind::Generic)?;
        Self::new(
            j.rows().iter().cloned(),
            j.cols().iter().cloned(),
            j.weights().to_vec(),
        )
    }

    pub fn identity<L: Into<String>, I: IntoIterator<Item = L>>(labels: I) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let n = labels.len();
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            m[i * n + i] = 1.0;
        }
        Self::new(labels.clone(), labels, m)
    }

    /// Binary symmetric kernel on `{0, 1}` with crossover `p`.
    pub fn bsc(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(FlbError::Domain(format!("crossover {p} outside [0, 1]")));
        }
        Self::new(["0", "1"], ["0", "1"], vec![1.0 - p, p, p, 1.0 - p])
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[String] {
        &self.outputs
    }

    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }

    pub fn prob(&self, input: usize, output: usize) -> f64 {
        self.matrix[input * self.outputs.len() + output]
    }

    /// Kernel composition: first `self` (A → B), then `next` (B → C).
    pub fn then(&self, next: &ConditionalKernel) -> Result<ConditionalKernel> {
        let map: Vec<usize> = self
            .outputs
            .iter()
            .map(|b| {
                next.inputs.iter().position(|x| x == b).ok_or_else(|| {
                    FlbError::LabelMismatch(format!("second kernel has no input `{b}`"))
                })
            })
            .collect::<Result<_>>()?;
        let nc = next.outputs.len();
        let mut m = vec![0.0; self.inputs.len() * nc];
        for a in 0..self.inputs.len() {
            for (b, &nb) in map.iter().enumerate() {
                let w = self.prob(a, b);
                if w == 0.0 {
                    continue;
                }
                for c in 0..nc {
                    m[a * nc + c] += w * next.prob(nb, c);
                }
            }
        }
        ConditionalKernel::new(self.inputs.clone(), next.outputs.clone(), m)
    }

    /// Largest entrywise difference to a kernel over the same labels.
    pub fn max_abs_diff(&self, other: &ConditionalKernel) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (a, la) in self.inputs.iter().enumerate() {
            let oa =
                other.inputs.iter().position(|x| x == la).ok_or_else(|| {
                    FlbError::LabelMismatch(format!("kernel has no input `{la}`"))
                })?;
            for (b, lb) in self.outputs.iter().enumerate() {
                let ob = other.outputs.iter().position(|x| x == lb).ok_or_else(|| {
                    FlbError::LabelMismatch(format!("kernel has no output `{lb}`"))
                })?;
                worst = worst.max((self.prob(a, b) - other.prob(oa, ob)).abs());
            }
        }
        if other.inputs.len() != self.inputs.len() || other.outputs.len() != self.outputs.len() {
            return Err(FlbError::LabelMismatch("kernel alphabets differ".into()));
        }
        Ok(worst)
    }
}

/// The joint table `(a, b) ↦ k(b|a)·p(a)`; rows follow the kernel's input order.
pub fn compose(k: &ConditionalKernel, p: &DiscreteMeasure) -> Result<JointMeasure> {
    if p.len() != k.inputs.len() {
        return Err(FlbError::LabelMismatch(format!(
            "kernel has {} inputs, measure has {} atoms",
            k.inputs.len(),
            p.len()
        )));
    }
    let no = k.outputs.len();
    let mut weights = Vec::with_capacity(k.inputs.len() * no);
    for (a, label) in k.inputs.iter().enumerate() {
        let pa = p
            .weight(label)
            .ok_or_else(|| FlbError::LabelMismatch(format!("measure has no atom `{label}`")))?;
        weights.extend((0..no).map(|b| k.prob(a, b) * pa));
    }
    let kind = p.kind();
    JointMeasure::new(k.inputs.clone(), k.outputs.clone(), weights, kind)
}

/// Anything that can be flattened into labelled cells for spectrum construction.
pub trait Cells {
    fn cells(&self) -> Vec<(String, f64)>;
}

impl Cells for DiscreteMeasure {
    fn cells(&self) -> Vec<(String, f64)> {
        self.atoms().map(|(l, w)| (l.to_string(), w)).collect()
    }
}

impl Cells for JointMeasure {
    fn cells(&self) -> Vec<(String, f64)> {
        let mut out = Vec::with_capacity(self.weights.len());
        for (r, rl) in self.rows.iter().enumerate() {
            for (c, cl) in self.cols.iter().enumerate() {
                out.push((format!("{rl}\t{cl}"), self.get(r, c)));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_joint_marginals() {
        let j = JointMeasure::new(
            ["a", "b"],
            ["x", "y"],
            vec![0.25; 4],
            MeasureKind::Probability,
        )
        .unwrap();
        assert_eq!(j.marginal(Axis::Rows).weights(), &[0.5, 0.5]);
        assert_eq!(j.marginal(Axis::Cols).weights(), &[0.5, 0.5]);
    }

    #[test]
    fn bsc_leakage_marginal_is_uniform() {
        let q = 0.11;
        let j = JointMeasure::new(
            ["0", "1"],
            ["0", "1"],
            vec![(1.0 - q) / 2.0, q / 2.0, q / 2.0, (1.0 - q) / 2.0],
            MeasureKind::Probability,
        )
        .unwrap();
        let pe = j.marginal(Axis::Cols);
        assert!((pe.weights()[0] - 0.5).abs() < 1e-15);
        assert!((pe.weights()[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn zero_row_marginal_is_valid() {
        let j = JointMeasure::new(
            ["a", "b"],
            ["x", "y"],
            vec![0.0, 0.0, 0.3, 0.7],
            MeasureKind::Probability,
        )
        .unwrap();
        let pa = j.marginal(Axis::Rows);
        assert_eq!(pa.weights(), &[0.0, 1.0]);
        assert_eq!(pa.support_len(), 1);
    }

    #[test]
    fn compose_identity_and_bsc() {
        let p = DiscreteMeasure::probability([("0", 0.3), ("1", 0.7)]).unwrap();
        let id = ConditionalKernel::identity(["0", "1"]).unwrap();
        assert_eq!(compose(&id, &p).unwrap().weights(), &[0.3, 0.0, 0.0, 0.7]);
        let u = DiscreteMeasure::uniform(["0", "1"]).unwrap();
        let j = compose(&ConditionalKernel::bsc(0.1).unwrap(), &u).unwrap();
        let expected = [0.45, 0.05, 0.05, 0.45];
        for (a, b) in j.weights().iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn compose_point_mass_has_one_row() {
        let p = DiscreteMeasure::probability([("0", 0.0), ("1", 1.0)]).unwrap();
        let j = compose(&ConditionalKernel::bsc(0.2).unwrap(), &p).unwrap();
        assert_eq!(j.get(0, 0) + j.get(0, 1), 0.0);
        assert!((j.mass() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn compose_rejects_label_mismatch() {
        let p = DiscreteMeasure::probability([("a", 0.5), ("b", 0.5)]).unwrap();
        assert!(compose(&ConditionalKernel::bsc(0.2).unwrap(), &p).is_err());
    }

    #[test]
    fn counting_measures() {
        assert!(counting_measure(Vec::<String>::new()).is_err());
        assert_eq!(counting_measure(["0", "1"]).unwrap().mass(), 2.0);
        assert_eq!(counting_measure(["z"]).unwrap().weights(), &[1.0]);
        let eight = counting_measure((0..8).map(|i| i.to_string())).unwrap();
        assert_eq!(eight.mass(), 8.0);
        assert_eq!(eight.kind(), MeasureKind::Generic);
    }

    #[test]
    fn kind_checks() {
        assert!(DiscreteMeasure::probability([("a", 0.5), ("b", 0.4)]).is_err());
        assert!(DiscreteMeasure::new([("a", 0.5), ("b", 0.4)], MeasureKind::Subnormalized).is_ok());
        assert!(
            DiscreteMeasure::new([("a", 0.7), ("b", 0.4)], MeasureKind::Subnormalized).is_err()
        );
        assert!(DiscreteMeasure::new([("a", -0.1)], MeasureKind::Generic).is_err());
        assert!(DiscreteMeasure::new([("a", 0.5), ("a", 0.5)], MeasureKind::Probability).is_err());
    }

    #[test]
    fn kernel_composition_of_bscs() {
        let a = ConditionalKernel::bsc(0.1).unwrap();
        let b = ConditionalKernel::bsc(0.125).unwrap();
        let c = a.then(&b).unwrap();
        let expected = ConditionalKernel::bsc(0.2).unwrap();
        assert!(c.max_abs_diff(&expected).unwrap() < 1e-15);
    }

    #[test]
    fn kernel_rows_must_be_stochastic() {
        assert!(ConditionalKernel::new(["0"], ["0", "1"], vec![0.5, 0.4]).is_err());
    }

    #[test]
    fn lift_and_transpose() {
        let j = JointMeasure::new(
            ["a", "b"],
            ["x", "y"],
            vec![0.1, 0.2, 0.3, 0.4],
            MeasureKind::Probability,
        )
        .unwrap();
        let r = DiscreteMeasure::probability([("y", 0.6), ("x", 0.4)]).unwrap();
        let l = j.lift_cols(&r).unwrap();
        assert_eq!(l.weights(), &[0.4, 0.6, 0.4, 0.6]);
        let t = j.transpose();
        assert_eq!(t.get(1, 0), 0.2);
        assert_eq!(t.rows(), &["x".to_string(), "y".to_string()]);
    }
}
