//! Exact law of the log-likelihood ratio `t = log(P/Q)` and its i.i.d. powers.
//!
//! Points store `ln p` rather than `p` so that Q-side masses `p·e^{-t}` stay
//! representable at large block lengths (a counting measure has mass `2^n`).

use std::collections::HashMap;

use statrs::function::factorial::{ln_binomial, ln_factorial};

use crate::error::{FlbError, Result};
use crate::exec::{chunked_sum, log_sum_exp, map_range, Execution, LogSum};
use crate::measures::Cells;

/// One support point of the spectrum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectrumPoint {
    /// `log(P/Q)` in nats.
    pub t: f64,
    /// Natural log of the P-mass at `t`.
    pub ln_p: f64,
}

impl SpectrumPoint {
    pub fn p_mass(&self) -> f64 {
        self.ln_p.exp()
    }

    pub fn ln_q(&self) -> f64 {
        self.ln_p - self.t
    }

    pub fn q_mass(&self) -> f64 {
        self.ln_q().exp()
    }
}

/// Sum of P-mass and (log) Q-mass over a region of the spectrum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailMass {
    pub p: f64,
    pub ln_q: f64,
}

impl TailMass {
    pub fn q(&self) -> f64 {
        self.ln_q.exp()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatticeInfo {
    /// Lattice span; 0 for a non-lattice (or single-point) support.
    pub span: f64,
    /// Smallest support point.
    pub offset: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct SpectrumOptions {
    /// Points closer than this in `t` are merged after sparse convolution.
    pub merge_tol: f64,
    /// Hard cap on the number of support points.
    pub max_points: usize,
    /// Relative Euclid threshold for lattice detection (scaled by the support range).
    pub lattice_rel_tol: f64,
    pub execution: Execution,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions {
            merge_tol: 1e-10,
            max_points: 2_000_000,
            lattice_rel_tol: 1e-9,
            execution: Execution::default(),
        }
    }
}

/// Law of `log(P/Q)` under `Pⁿ`, with the induced Q-masses.
#[derive(Clone, Debug, PartialEq)]
pub struct LlrSpectrum {
    points: Vec<SpectrumPoint>,
    ln_q_null: f64,
    p_infinite: f64,
    n: u64,
}

/// Builds the order-1 spectrum of `p` against `q`, matching cells by label.
///
/// Cells where `p` is zero contribute to the Q-null mass. Cells where `p > 0` but
/// `q = 0` are rejected.
pub fn build_spectrum<M: Cells>(p: &M, q: &M) -> Result<LlrSpectrum> {
    build_spectrum_with(p, q, false)
}

/// As [`build_spectrum`]; with `allow_infinite` the P-mass on Q-null cells is kept
/// as a `t = +∞` sentinel instead of being rejected.
pub fn build_spectrum_with<M: Cells>(p: &M, q: &M, allow_infinite: bool) -> Result<LlrSpectrum> {
    let q_cells: HashMap<String, f64> = q.cells().into_iter().collect();
    let p_cells = p.cells();
    let mut seen = 0usize;
    let mut pairs = Vec::with_capacity(p_cells.len());
    for (label, pw) in &p_cells {
        let qw = *q_cells.get(label).ok_or_else(|| {
            FlbError::LabelMismatch(format!("reference measure has no cell `{label}`"))
        })?;
        seen += 1;
        pairs.push((*pw, qw));
    }
    let mut extra_q = 0.0;
    if seen != q_cells.len() {
        let p_labels: std::collections::HashSet<&str> =
            p_cells.iter().map(|(l, _)| l.as_str()).collect();
        for (l, w) in &q_cells {
            if !p_labels.contains(l.as_str()) {
                extra_q += w;
            }
        }
    }
    let mut s = LlrSpectrum::from_pairs(&pairs, allow_infinite, 1e-10)?;
    if extra_q > 0.0 {
        s.ln_q_null = log_sum_exp([s.ln_q_null, extra_q.ln()]);
    }
    Ok(s)
}

impl LlrSpectrum {
    /// Order-1 spectrum from aligned `(p, q)` weights.
    pub fn from_pairs(pairs: &[(f64, f64)], allow_infinite: bool, merge_tol: f64) -> Result<Self> {
        let mut q_null = 0.0;
        let mut p_inf = 0.0;
        let mut raw = Vec::with_capacity(pairs.len());
        for &(p, q) in pairs {
            if !(p >= 0.0 && q >= 0.0 && p.is_finite() && q.is_finite()) {
                return Err(FlbError::InvalidMeasure(format!(
                    "bad weight pair ({p}, {q})"
                )));
            }
            if p == 0.0 {
                q_null += q;
            } else if q == 0.0 {
                if !allow_infinite {
                    return Err(FlbError::AbsoluteContinuity { p_mass: p });
                }
                p_inf += p;
            } else {
                raw.push(SpectrumPoint {
                    t: p.ln() - q.ln(),
                    ln_p: p.ln(),
                });
            }
        }
        raw.sort_by(|a, b| a.t.total_cmp(&b.t));
        Ok(LlrSpectrum {
            points: merge_sorted(raw, merge_tol),
            ln_q_null: q_null.ln(),
            p_infinite: p_inf,
            n: 1,
        })
    }

    /// Spectrum from explicit points (sorted and merged here).
    pub fn from_points(mut points: Vec<SpectrumPoint>, n: u64) -> Result<Self> {
        if n == 0 {
            return Err(FlbError::Domain("block length must be positive".into()));
        }
        if points.iter().any(|p| !p.t.is_finite() || p.ln_p.is_nan()) {
            return Err(FlbError::InvalidMeasure("non-finite spectrum point".into()));
        }
        points.sort_by(|a, b| a.t.total_cmp(&b.t));
        Ok(LlrSpectrum {
            points: merge_sorted(points, 0.0),
            ln_q_null: f64::NEG_INFINITY,
            p_infinite: 0.0,
            n,
        })
    }

    pub fn points(&self) -> &[SpectrumPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn q_null_mass(&self) -> f64 {
        self.ln_q_null.exp()
    }

    pub fn ln_q_null_mass(&self) -> f64 {
        self.ln_q_null
    }

    /// P-mass carried by the `t = +∞` sentinel.
    pub fn p_infinite(&self) -> f64 {
        self.p_infinite
    }

    /// P-mass on finite points.
    pub fn p_finite(&self) -> f64 {
        self.points.iter().map(SpectrumPoint::p_mass).sum()
    }

    pub fn p_total(&self) -> f64 {
        self.p_finite() + self.p_infinite
    }

    /// `log` of the Q-mass on finite points.
    pub fn ln_q_finite(&self) -> f64 {
        log_sum_exp(self.points.iter().map(SpectrumPoint::ln_q))
    }

    pub fn ln_q_total(&self) -> f64 {
        log_sum_exp([self.ln_q_finite(), self.ln_q_null])
    }

    /// Mass over `t ≥ m` (includes the `+∞` sentinel).
    pub fn tail_geq(&self, m: f64) -> TailMass {
        let i = self.points.partition_point(|p| p.t < m);
        self.range_mass(i, self.points.len(), true, false)
    }

    /// Mass over `t > m` (includes the `+∞` sentinel).
    pub fn tail_gt(&self, m: f64) -> TailMass {
        let i = self.points.partition_point(|p| p.t <= m);
        self.range_mass(i, self.points.len(), true, false)
    }

    /// Mass over `t ≤ m`; the Q-part includes the Q-null mass (`t = -∞` there).
    pub fn cdf_leq(&self, m: f64) -> TailMass {
        let i = self.points.partition_point(|p| p.t <= m);
        self.range_mass(0, i, false, true)
    }

    /// Mass over `t < m`; the Q-part includes the Q-null mass.
    pub fn cdf_lt(&self, m: f64) -> TailMass {
        let i = self.points.partition_point(|p| p.t < m);
        self.range_mass(0, i, false, true)
    }

    fn range_mass(&self, lo: usize, hi: usize, with_inf: bool, with_null: bool) -> TailMass {
        let pts = &self.points[lo..hi];
        let mut p: f64 = pts.iter().map(SpectrumPoint::p_mass).sum();
        if with_inf && (self.p_infinite > 0.0) {
            p += self.p_infinite;
        }
        let mut acc = LogSum::new();
        for pt in pts {
            acc.add_ln(pt.ln_q());
        }
        if with_null {
            acc.add_ln(self.ln_q_null);
        }
        TailMass { p, ln_q: acc.ln() }
    }

    /// Real-gcd lattice detection on the support of P.
    pub fn lattice_span(&self, rel_tol: Option<f64>) -> LatticeInfo {
        let ts: Vec<f64> = self.points.iter().map(|p| p.t).collect();
        lattice_of(&ts, rel_tol.unwrap_or(1e-9))
    }

    /// Exact `n`-fold i.i.d. power.
    pub fn convolve_iid(&self, n: u64, opts: &SpectrumOptions) -> Result<LlrSpectrum> {
        if n == 0 {
            return Err(FlbError::Domain("block length must be positive".into()));
        }
        if n == 1 {
            return Ok(self.clone());
        }
        let nf = n as f64;
        let p_fin = self.p_finite();
        let p_infinite = if self.p_infinite > 0.0 {
            let tot = p_fin + self.p_infinite;
            let ratio_ln = if p_fin > 0.0 {
                (p_fin / tot).ln()
            } else {
                f64::NEG_INFINITY
            };
            tot.powf(nf) * -(nf * ratio_ln).exp_m1()
        } else {
            0.0
        };
        let ln_q_null = if self.ln_q_null == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            let lf = self.ln_q_finite();
            let lt = self.ln_q_total();
            nf * lt + (-(nf * (lf - lt)).exp_m1()).ln()
        };
        let points = match self.points.len() {
            0 => Vec::new(),
            1 => vec![SpectrumPoint {
                t: nf * self.points[0].t,
                ln_p: nf * self.points[0].ln_p,
            }],
            2 => binomial_points(self.points[0], self.points[1], n, opts)?,
            _ => {
                let lat = self.lattice_span(Some(opts.lattice_rel_tol));
                if lat.span > 0.0 {
                    dense_power(&self.points, lat, n, opts)?
                } else if let Some(pts) = type_class_points(&self.points, n, opts) {
                    pts
                } else {
                    sparse_power(&self.points, n, opts)?
                }
            }
        };
        Ok(LlrSpectrum {
            points,
            ln_q_null,
            p_infinite,
            n: self.n * n,
        })
    }

    /// Sparse convolution of two spectra (for properties and composite tasks).
    pub fn convolve(&self, other: &LlrSpectrum, opts: &SpectrumOptions) -> Result<LlrSpectrum> {
        if self.p_infinite > 0.0 || other.p_infinite > 0.0 {
            return Err(FlbError::Domain(
                "pairwise convolution does not support the +∞ sentinel".into(),
            ));
        }
        let points = sparse_product(&self.points, &other.points, opts)?;
        let (a_f, b_f) = (self.ln_q_finite(), other.ln_q_finite());
        let (a_t, b_t) = (self.ln_q_total(), other.ln_q_total());
        let total = a_t + b_t;
        let fin = a_f + b_f;
        let ln_q_null = if total > fin {
            total + (-(fin - total).exp_m1()).ln()
        } else {
            f64::NEG_INFINITY
        };
        Ok(LlrSpectrum {
            points,
            ln_q_null,
            p_infinite: 0.0,
            n: self.n + other.n,
        })
    }

    /// Adds `c` to every `t`, i.e. divides the reference measure by `e^c`.
    pub fn shifted(&self, c: f64) -> LlrSpectrum {
        LlrSpectrum {
            points: self
                .points
                .iter()
                .map(|p| SpectrumPoint {
                    t: p.t + c,
                    ln_p: p.ln_p,
                })
                .collect(),
            ln_q_null: self.ln_q_null - c,
            p_infinite: self.p_infinite,
            n: self.n,
        }
    }

    pub fn cgf(&self) -> Result<CgfView<'_>> {
        CgfView::new(self)
    }

    /// Mean, variance and third central moment of `t` under the normalized P-mass.
    pub fn moments(&self) -> (f64, f64, f64) {
        let total: f64 = self.p_finite();
        let mean = self.points.iter().map(|p| p.p_mass() * p.t).sum::<f64>() / total;
        let mut m2 = 0.0;
        let mut m3 = 0.0;
        for p in &self.points {
            let d = p.t - mean;
            let w = p.p_mass() / total;
            m2 += w * d * d;
            m3 += w * d * d * d;
        }
        (mean, m2, m3)
    }
}

fn merge_sorted(points: Vec<SpectrumPoint>, tol: f64) -> Vec<SpectrumPoint> {
    let mut out: Vec<SpectrumPoint> = Vec::with_capacity(points.len());
    let mut i = 0;
    while i < points.len() {
        let anchor = points[i].t;
        let mut j = i + 1;
        while j < points.len() && points[j].t - anchor <= tol {
            j += 1;
        }
        if j == i + 1 {
            out.push(points[i]);
        } else {
            let group = &points[i..j];
            let top = group
                .iter()
                .map(|p| p.ln_p)
                .fold(f64::NEG_INFINITY, f64::max);
            let mut w_sum = 0.0;
            let mut wt = 0.0;
            for p in group {
                let w = (p.ln_p - top).exp();
                w_sum += w;
                wt += w * p.t;
            }
            let t = if w_sum > 0.0 { wt / w_sum } else { anchor };
            out.push(SpectrumPoint {
                t,
                ln_p: top + w_sum.ln(),
            });
        }
        i = j;
    }
    out
}

fn binomial_points(
    lo: SpectrumPoint,
    hi: SpectrumPoint,
    n: u64,
    opts: &SpectrumOptions,
) -> Result<Vec<SpectrumPoint>> {
    let len = n as usize + 1;
    if len > opts.max_points {
        return Err(FlbError::TooManyPoints {
            points: len,
            cap: opts.max_points,
        });
    }
    Ok(map_range(len, opts.execution, |k| {
        let k = k as u64;
        let (kf, rf) = (k as f64, (n - k) as f64);
        SpectrumPoint {
            t: rf * lo.t + kf * hi.t,
            ln_p: ln_binomial(n, k) + kf * hi.ln_p + rf * lo.ln_p,
        }
    }))
}

/// Dense vector of masses on a lattice, with a common log scale.
struct Grid {
    vals: Vec<f64>,
    ln_scale: f64,
}

impl Grid {
    fn normalized(mut vals: Vec<f64>, ln_scale: f64) -> Grid {
        let top = vals.iter().copied().fold(0.0, f64::max);
        if top > 0.0 {
            for v in &mut vals {
                *v /= top;
            }
            Grid {
                vals,
                ln_scale: ln_scale + top.ln(),
            }
        } else {
            Grid { vals, ln_scale }
        }
    }
}

fn grid_conv(a: &Grid, b: &Grid, exec: Execution) -> Grid {
    let (la, lb) = (a.vals.len(), b.vals.len());
    let out = map_range(la + lb - 1, exec, |j| {
        let lo = j.saturating_sub(lb - 1);
        let hi = j.min(la - 1);
        let mut s = 0.0;
        for i in lo..=hi {
            s += a.vals[i] * b.vals[j - i];
        }
        s
    });
    Grid::normalized(out, a.ln_scale + b.ln_scale)
}

fn dense_power(
    points: &[SpectrumPoint],
    lat: LatticeInfo,
    n: u64,
    opts: &SpectrumOptions,
) -> Result<Vec<SpectrumPoint>> {
    let ks: Vec<u64> = points
        .iter()
        .map(|p| ((p.t - lat.offset) / lat.span).round() as u64)
        .collect();
    let kmax = *ks.last().unwrap_or(&0);
    let total_len = (kmax as u128) * (n as u128) + 1;
    if total_len > opts.max_points as u128 {
        return Err(FlbError::TooManyPoints {
            points: total_len.min(usize::MAX as u128) as usize,
            cap: opts.max_points,
        });
    }
    // Least-squares refinement of the span against the integer indices.
    let (mut num, mut den) = (0.0, 0.0);
    for (p, &k) in points.iter().zip(&ks) {
        num += (k as f64) * (p.t - lat.offset);
        den += (k as f64) * (k as f64);
    }
    let span = if den > 0.0 { num / den } else { lat.span };
    let top = points
        .iter()
        .map(|p| p.ln_p)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut base = vec![0.0; kmax as usize + 1];
    for (p, &k) in points.iter().zip(&ks) {
        base[k as usize] += (p.ln_p - top).exp();
    }
    let mut base = Grid::normalized(base, top);
    let mut acc: Option<Grid> = None;
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            acc = Some(match acc {
                None => Grid {
                    vals: base.vals.clone(),
                    ln_scale: base.ln_scale,
                },
                Some(a) => grid_conv(&a, &base, opts.execution),
            });
        }
        e >>= 1;
        if e > 0 {
            base = grid_conv(&base, &base, opts.execution);
        }
    }
    let acc = acc.expect("n ≥ 1");
    let nf = n as f64;
    Ok(acc
        .vals
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > 0.0)
        .map(|(j, &v)| SpectrumPoint {
            t: nf * lat.offset + (j as f64) * span,
            ln_p: acc.ln_scale + v.ln(),
        })
        .collect())
}

fn sparse_product(
    a: &[SpectrumPoint],
    b: &[SpectrumPoint],
    opts: &SpectrumOptions,
) -> Result<Vec<SpectrumPoint>> {
    let raw_len = a.len().saturating_mul(b.len());
    if raw_len > opts.max_points.saturating_mul(25) {
        return Err(FlbError::TooManyPoints {
            points: raw_len,
            cap: opts.max_points,
        });
    }
    let rows = map_range(a.len(), opts.execution, |i| {
        b.iter()
            .map(|q| SpectrumPoint {
                t: a[i].t + q.t,
                ln_p: a[i].ln_p + q.ln_p,
            })
            .collect::<Vec<_>>()
    });
    let mut all: Vec<SpectrumPoint> = rows.into_iter().flatten().collect();
    all.sort_by(|x, y| x.t.total_cmp(&y.t));
    let merged = merge_sorted(all, opts.merge_tol);
    if merged.len() > opts.max_points {
        return Err(FlbError::TooManyPoints {
            points: merged.len(),
            cap: opts.max_points,
        });
    }
    Ok(merged)
}

/// Exact enumeration over type classes when `C(n+k−1, k−1)` fits the point cap;
/// `None` otherwise.
fn type_class_points(
    points: &[SpectrumPoint],
    n: u64,
    opts: &SpectrumOptions,
) -> Option<Vec<SpectrumPoint>> {
    let k = points.len() as u64;
    let ln_count = ln_binomial(n + k - 1, k - 1);
    if ln_count > (opts.max_points as f64).ln() {
        return None;
    }
    let ln_n = ln_factorial(n);
    let first = points[0];
    let rest = &points[1..];
    let rows = map_range(n as usize + 1, opts.execution, |c0| {
        let c0 = c0 as u64;
        let mut out = Vec::new();
        let mut counts = vec![0u64; rest.len()];
        let head_t = c0 as f64 * first.t;
        let head_ln = ln_n - ln_factorial(c0) + c0 as f64 * first.ln_p;
        compositions(n - c0, 0, &mut counts, &mut |counts| {
            let mut t = head_t;
            let mut ln_p = head_ln;
            for (c, p) in counts.iter().zip(rest) {
                let cf = *c as f64;
                t += cf * p.t;
                ln_p += cf * p.ln_p - ln_factorial(*c);
            }
            out.push(SpectrumPoint { t, ln_p });
        });
        out
    });
    let mut all: Vec<SpectrumPoint> = rows.into_iter().flatten().collect();
    all.sort_by(|x, y| x.t.total_cmp(&y.t));
    Some(merge_sorted(all, opts.merge_tol))
}

/// Calls `f` on every split of `left` into `counts[i..]`.
fn compositions<F: FnMut(&[u64])>(left: u64, i: usize, counts: &mut [u64], f: &mut F) {
    if i + 1 == counts.len() {
        counts[i] = left;
        f(counts);
        return;
    }
    for c in 0..=left {
        counts[i] = c;
        compositions(left - c, i + 1, counts, f);
    }
}

fn sparse_power(
    points: &[SpectrumPoint],
    n: u64,
    opts: &SpectrumOptions,
) -> Result<Vec<SpectrumPoint>> {
    let mut base = points.to_vec();
    let mut acc: Option<Vec<SpectrumPoint>> = None;
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            acc = Some(match acc {
                None => base.clone(),
                Some(a) => sparse_product(&a, &base, opts)?,
            });
        }
        e >>= 1;
        if e > 0 {
            base = sparse_product(&base, &base, opts)?;
        }
    }
    Ok(acc.expect("n ≥ 1"))
}

/// Euclid on reals with nearest-integer quotients; `None` if no convergence.
fn real_gcd(a: f64, b: f64, tol: f64) -> Option<f64> {
    let (mut a, mut b) = if a >= b { (a, b) } else { (b, a) };
    for _ in 0..64 {
        if b <= tol {
            return Some(a);
        }
        let r = (a - (a / b).round() * b).abs();
        a = b;
        b = r;
    }
    None
}

/// Lattice span of a sorted support.
pub fn lattice_of(ts: &[f64], rel_tol: f64) -> LatticeInfo {
    let Some(&offset) = ts.first() else {
        return LatticeInfo {
            span: 0.0,
            offset: 0.0,
        };
    };
    let range = ts[ts.len() - 1] - offset;
    if ts.len() < 2 || range <= 0.0 {
        return LatticeInfo { span: 0.0, offset };
    }
    let tol = rel_tol * range;
    let mut g = ts[1] - offset;
    for &t in &ts[2..] {
        match real_gcd(g, t - offset, tol) {
            Some(v) => g = v,
            None => return LatticeInfo { span: 0.0, offset },
        }
    }
    // Reject "commensurable" verdicts that only reflect the stopping threshold.
    if g < range * 1e-6 {
        return LatticeInfo { span: 0.0, offset };
    }
    let ok = ts.iter().all(|&t| {
        let k = ((t - offset) / g).round();
        ((t - offset) - k * g).abs() <= 1e-6 * range.max(g)
    });
    LatticeInfo {
        span: if ok { g } else { 0.0 },
        offset,
    }
}

/// τ and its first three derivatives at one `s`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CgfPoint {
    pub s: f64,
    pub tau: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

/// Cumulant generating function `τ(s) = log Σ p e^{s t}` of a spectrum's P-side.
#[derive(Clone, Debug)]
pub struct CgfView<'a> {
    spectrum: &'a LlrSpectrum,
    t_min: f64,
    t_max: f64,
}

impl<'a> CgfView<'a> {
    pub fn new(spectrum: &'a LlrSpectrum) -> Result<Self> {
        let pts = spectrum.points();
        if pts.is_empty() {
            return Err(FlbError::Degenerate("empty spectrum".into()));
        }
        Ok(CgfView {
            spectrum,
            t_min: pts[0].t,
            t_max: pts[pts.len() - 1].t,
        })
    }

    pub fn spectrum(&self) -> &LlrSpectrum {
        self.spectrum
    }

    pub fn tau(&self, s: f64) -> f64 {
        log_sum_exp(self.spectrum.points().iter().map(|p| p.ln_p + s * p.t))
    }

    pub fn eval(&self, s: f64) -> CgfPoint {
        let pts = self.spectrum.points();
        let tau = self.tau(s);
        let exec = Execution::Sequential;
        let w = |i: usize| (pts[i].ln_p + s * pts[i].t - tau).exp();
        let d1 = chunked_sum(pts.len(), exec, |i| w(i) * pts[i].t);
        let d2 = chunked_sum(pts.len(), exec, |i| w(i) * (pts[i].t - d1).powi(2));
        let d3 = chunked_sum(pts.len(), exec, |i| w(i) * (pts[i].t - d1).powi(3));
        CgfPoint { s, tau, d1, d2, d3 }
    }

    /// Open interval of achievable slopes `τ'(s)`.
    pub fn slope_range(&self) -> (f64, f64) {
        (self.t_min, self.t_max)
    }

    /// Solves `τ'(η) = r` by safeguarded Newton iteration.
    pub fn eta(&self, r: f64) -> Result<f64> {
        if !(r > self.t_min && r < self.t_max) {
            return Err(FlbError::Domain(format!(
                "slope {r} outside achievable range ({}, {})",
                self.t_min, self.t_max
            )));
        }
        let target = 1e-12 * (1.0 + r.abs());
        let f0 = self.eval(0.0);
        let (mut lo, mut hi);
        if f0.d1 < r {
            lo = 0.0;
            hi = 1.0;
            while self.eval(hi).d1 < r {
                lo = hi;
                hi *= 2.0;
                if hi > 1e12 {
                    return Err(FlbError::Domain(format!("slope {r} not bracketed")));
                }
            }
        } else {
            hi = 0.0;
            lo = -1.0;
            while self.eval(lo).d1 > r {
                hi = lo;
                lo *= 2.0;
                if lo < -1e12 {
                    return Err(FlbError::Domain(format!("slope {r} not bracketed")));
                }
            }
        }
        let mut s = 0.5 * (lo + hi);
        for _ in 0..200 {
            let c = self.eval(s);
            let g = c.d1 - r;
            if g.abs() <= target {
                return Ok(s);
            }
            if g < 0.0 {
                lo = s;
            } else {
                hi = s;
            }
            let newton = if c.d2 > 0.0 { s - g / c.d2 } else { f64::NAN };
            s = if newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if hi - lo <= 1e-15 * (1.0 + s.abs()) {
                break;
            }
        }
        let c = self.eval(s);
        if (c.d1 - r).abs() <= 1e-10 * (1.0 + r.abs()) {
            Ok(s)
        } else {
            Err(FlbError::Domain(format!(
                "slope inversion stalled at s = {s} with residual {}",
                c.d1 - r
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{counting_measure, DiscreteMeasure};

    fn bern_vs_counting(p: f64) -> LlrSpectrum {
        let pm = DiscreteMeasure::bernoulli(p).unwrap();
        build_spectrum(&pm, &counting_measure(["0", "1"]).unwrap()).unwrap()
    }

    #[test]
    fn bernoulli_against_counting() {
        let s = bern_vs_counting(0.11);
        let pts = s.points();
        assert_eq!(pts.len(), 2);
        assert!((pts[0].t - 0.11f64.ln()).abs() < 1e-15);
        assert!((pts[1].t - 0.89f64.ln()).abs() < 1e-15);
        assert!((pts[0].p_mass() - 0.11).abs() < 1e-15);
        assert!((pts[0].q_mass() - 1.0).abs() < 1e-12);
        assert!((pts[1].q_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identical_measures_give_single_zero_point() {
        let p = DiscreteMeasure::probability([("a", 0.2), ("b", 0.3), ("c", 0.5)]).unwrap();
        let s = build_spectrum(&p, &p).unwrap();
        assert_eq!(s.len(), 1);
        assert!(s.points()[0].t.abs() < 1e-15);
        assert!((s.points()[0].p_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn absolute_continuity_is_enforced() {
        let p = DiscreteMeasure::probability([("a", 0.5), ("b", 0.5)]).unwrap();
        let q = DiscreteMeasure::probability([("a", 1.0), ("b", 0.0)]).unwrap();
        assert!(matches!(
            build_spectrum(&p, &q),
            Err(FlbError::AbsoluteContinuity { .. })
        ));
        let s = build_spectrum_with(&p, &q, true).unwrap();
        assert_eq!(s.p_infinite(), 0.5);
    }

    #[test]
    fn q_null_mass_is_tracked() {
        let p = DiscreteMeasure::probability([("a", 1.0), ("b", 0.0)]).unwrap();
        let q = DiscreteMeasure::probability([("a", 0.25), ("b", 0.75)]).unwrap();
        let s = build_spectrum(&p, &q).unwrap();
        assert!((s.q_null_mass() - 0.75).abs() < 1e-15);
        let s3 = s.convolve_iid(3, &SpectrumOptions::default()).unwrap();
        assert!((s3.q_null_mass() - (1.0 - 0.25f64.powi(3))).abs() < 1e-14);
        assert!((s3.points()[0].q_mass() - 0.25f64.powi(3)).abs() < 1e-15);
    }

    #[test]
    fn binomial_convolution_matches_formula() {
        let s = bern_vs_counting(0.11)
            .convolve_iid(10, &SpectrumOptions::default())
            .unwrap();
        assert_eq!(s.len(), 11);
        for (j, pt) in s.points().iter().enumerate() {
            // Point j carries j copies of the larger atom (log 0.89).
            let k = j as i32;
            let c = (1..=10).product::<u64>() as f64
                / ((1..=k as u64).product::<u64>() as f64
                    * (1..=(10 - k) as u64).product::<u64>() as f64);
            let expect = c * 0.89f64.powi(k) * 0.11f64.powi(10 - k);
            assert!((pt.p_mass() - expect).abs() <= 1e-12 * expect.max(1e-300));
            assert!((pt.q_mass() - c).abs() <= 1e-9 * c);
        }
    }

    #[test]
    fn single_point_and_identity_powers() {
        let p = DiscreteMeasure::probability([("a", 1.0)]).unwrap();
        let q = DiscreteMeasure::new([("a", 0.5)], crate::measures::MeasureKind::Subnormalized)
            .unwrap();
        let s = build_spectrum(&p, &q).unwrap();
        let s7 = s.convolve_iid(7, &SpectrumOptions::default()).unwrap();
        assert_eq!(s7.len(), 1);
        assert!((s7.points()[0].t - 7.0 * 2f64.ln()).abs() < 1e-13);
        assert_eq!(s.convolve_iid(1, &SpectrumOptions::default()).unwrap(), s);
    }

    #[test]
    fn lattice_examples() {
        let s = bern_vs_counting(0.11);
        let l = s.lattice_span(None);
        assert!((l.span - (0.89f64 / 0.11).ln()).abs() < 1e-12);
        assert_eq!(lattice_of(&[0.0, 1.0, 2.5], 1e-9).span, 0.5);
        assert_eq!(lattice_of(&[0.0, 1.0, 2f64.sqrt()], 1e-9).span, 0.0);
        assert_eq!(lattice_of(&[0.0, 2f64.ln(), 3f64.ln()], 1e-9).span, 0.0);
        let single = lattice_of(&[-0.3], 1e-9);
        assert_eq!((single.span, single.offset), (0.0, -0.3));
    }

    #[test]
    fn lattice_support_is_evenly_spaced_in_the_bulk() {
        let s = bern_vs_counting(0.11)
            .convolve_iid(64, &SpectrumOptions::default())
            .unwrap();
        let d = (0.89f64 / 0.11).ln();
        for w in s.points().windows(2) {
            assert!((w[1].t - w[0].t - d).abs() < 1e-9);
        }
    }

    #[test]
    fn dense_and_sparse_paths_agree() {
        let p = DiscreteMeasure::probability([("a", 0.5), ("b", 0.3), ("c", 0.2)]).unwrap();
        let q = DiscreteMeasure::probability([("a", 0.25), ("b", 0.5), ("c", 0.25)]).unwrap();
        // t values log 2, log 0.6, log 0.8 are not commensurable.
        let s = build_spectrum(&p, &q).unwrap();
        assert_eq!(s.lattice_span(None).span, 0.0);
        let q2 = DiscreteMeasure::new(
            [("a", 0.5 / 4.0), ("b", 0.3 / 2.0), ("c", 0.2 / 8.0)],
            crate::measures::MeasureKind::Generic,
        )
        .unwrap();
        let lat = build_spectrum(&p, &q2).unwrap();
        let info = lat.lattice_span(None);
        assert!((info.span - 2f64.ln()).abs() < 1e-12);
        let opts = SpectrumOptions::default();
        let dense = lat.convolve_iid(9, &opts).unwrap();
        let sparse = LlrSpectrum {
            points: sparse_power(lat.points(), 9, &opts).unwrap(),
            ln_q_null: f64::NEG_INFINITY,
            p_infinite: 0.0,
            n: 9,
        };
        assert_eq!(dense.len(), sparse.len());
        for (a, b) in dense.points().iter().zip(sparse.points()) {
            assert!((a.t - b.t).abs() < 1e-9);
            assert!((a.p_mass() - b.p_mass()).abs() < 1e-12);
        }
    }

    #[test]
    fn point_cap_is_reported() {
        let p = DiscreteMeasure::probability([("a", 0.5), ("b", 0.3), ("c", 0.2)]).unwrap();
        let q = DiscreteMeasure::probability([("a", 0.25), ("b", 0.5), ("c", 0.25)]).unwrap();
        let s = build_spectrum(&p, &q).unwrap();
        let opts = SpectrumOptions {
            max_points: 100,
            ..SpectrumOptions::default()
        };
        assert!(matches!(
            s.convolve_iid(40, &opts),
            Err(FlbError::TooManyPoints { .. })
        ));
    }

    #[test]
    fn tails_and_cdfs() {
        let s = bern_vs_counting(0.11);
        assert!((s.tail_geq(-100.0).p - 1.0).abs() < 1e-15);
        assert!((s.cdf_leq(100.0).p - 1.0).abs() < 1e-15);
        assert_eq!(s.tail_gt(100.0).p, 0.0);
        assert_eq!(s.cdf_lt(-100.0).ln_q, f64::NEG_INFINITY);
        let m = 0.11f64.ln();
        assert!((s.cdf_leq(m).p - 0.11).abs() < 1e-15);
        assert_eq!(s.cdf_lt(m).p, 0.0);
        assert!((s.tail_gt(m).q() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cgf_basics_and_eta_round_trip() {
        let s = bern_vs_counting(0.11);
        let c = s.cgf().unwrap();
        assert!(c.tau(0.0).abs() < 1e-15);
        let mean = 0.11 * 0.11f64.ln() + 0.89 * 0.89f64.ln();
        assert!((c.eval(0.0).d1 - mean).abs() < 1e-15);
        let r = c.eval(1.0).d1;
        assert!((c.eta(r).unwrap() - 1.0).abs() < 1e-10);
        let r = c.eval(-2.5).d1;
        assert!((c.eta(r).unwrap() + 2.5).abs() < 1e-9);
        assert!(c.eta(0.0).is_err());
        assert!(c.eta(0.11f64.ln()).is_err());
    }
}
