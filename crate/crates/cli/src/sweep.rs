//! `flb sweep`: bound and expansion tables over `n`, `ε` (and `δ`) grids.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use flb_core::asymptotics::{ht_from_stats, srng_from_stats, Expansion};
use flb_core::bounds::{legacy_bounds_with, Direction, RenyiProfile, SrngProfile, TestingProfile};
use flb_core::exec::{map_slice, Execution};
use flb_core::measures::Axis;
use flb_core::quantities::DivergenceStats;
use flb_core::spectrum::{build_spectrum, LlrSpectrum, SpectrumOptions};
use flb_core::tasks::{
    bpsk_expansions, expand_channel, wiretap_bsc_expansions, BpskPair, ConditionalAdditiveChannel,
    Group, P2Variant,
};
use flb_core::text::{parse_document, Object, Request};
use serde::Deserialize;

use crate::error::CliError;
use crate::format::{fmt_g, Table};

pub const HEADER: [&str; 11] = [
    "task",
    "quantity",
    "direction",
    "n",
    "eps",
    "delta",
    "value",
    "a1",
    "a2",
    "a3",
    "a4",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum BoundSet {
    Exact,
    Expansion,
    Legacy,
    SecondOrder,
}

impl BoundSet {
    fn parse(s: &str) -> Result<Self, CliError> {
        Ok(match s {
            "exact" => BoundSet::Exact,
            "expansion" => BoundSet::Expansion,
            "legacy" => BoundSet::Legacy,
            "second-order" => BoundSet::SecondOrder,
            other => return Err(CliError::Parse(format!("unknown bound set `{other}`"))),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TaskId {
    Srng,
    Ht,
    Source,
    SourceSide,
    Channel,
    WiretapBsc,
    WiretapBpsk,
}

impl TaskId {
    fn parse(s: &str) -> Result<Self, CliError> {
        Ok(match s {
            "srng" => TaskId::Srng,
            "ht" => TaskId::Ht,
            "source" => TaskId::Source,
            "source-side" => TaskId::SourceSide,
            "channel" => TaskId::Channel,
            "wiretap-bsc" => TaskId::WiretapBsc,
            "wiretap-bpsk" => TaskId::WiretapBpsk,
            other => return Err(CliError::Parse(format!("unknown task `{other}`"))),
        })
    }

    fn name(self) -> &'static str {
        match self {
            TaskId::Srng => "srng",
            TaskId::Ht => "ht",
            TaskId::Source => "source",
            TaskId::SourceSide => "source-side",
            TaskId::Channel => "channel",
            TaskId::WiretapBsc => "wiretap-bsc",
            TaskId::WiretapBpsk => "wiretap-bpsk",
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum NGridFile {
    List(Vec<u64>),
    Range { start: u64, stop: u64, factor: f64 },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepFile {
    task: String,
    file: Option<PathBuf>,
    n: NGridFile,
    eps: Vec<f64>,
    delta: Option<Vec<f64>>,
    bounds: Option<Vec<String>>,
    out: Option<PathBuf>,
    #[serde(default)]
    bits: bool,
    p_y: Option<f64>,
    p_z: Option<f64>,
    sigma_y2: Option<f64>,
    sigma_z2: Option<f64>,
    #[serde(default)]
    p2_as_printed: bool,
}

/// Validated sweep request.
#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub task: TaskId,
    pub file: Option<PathBuf>,
    pub n: Vec<u64>,
    pub eps: Vec<f64>,
    pub delta: Vec<f64>,
    pub bounds: BTreeSet<BoundSet>,
    pub out: Option<PathBuf>,
    pub bits: bool,
    pub params: [Option<f64>; 4],
    pub p2: P2Variant,
}

fn geometric(start: u64, stop: u64, factor: f64) -> Result<Vec<u64>, CliError> {
    if start == 0 || stop < start || !(factor > 1.0) {
        return Err(CliError::Parse(
            "n range needs 1 ≤ start ≤ stop and factor > 1".into(),
        ));
    }
    let mut out = Vec::new();
    let mut x = start as f64;
    while x.round() <= stop as f64 {
        let v = x.round() as u64;
        if out.last() != Some(&v) {
            out.push(v);
        }
        x *= factor;
    }
    Ok(out)
}

fn unit_interval(name: &str, xs: &[f64]) -> Result<(), CliError> {
    if xs.is_empty() {
        return Err(CliError::Parse(format!("`{name}` grid is empty")));
    }
    if let Some(bad) = xs.iter().find(|x| !(**x > 0.0 && **x < 1.0)) {
        return Err(CliError::Parse(format!("{name} = {bad} outside (0, 1)")));
    }
    Ok(())
}

impl SweepSpec {
    /// Parses the TOML sweep file; a relative `file` or `out` is resolved against `base`.
    pub fn from_toml(text: &str, base: Option<&Path>) -> Result<SweepSpec, CliError> {
        let f: SweepFile = toml::from_str(text)?;
        let task = TaskId::parse(&f.task)?;
        let n = match f.n {
            NGridFile::List(v) => v,
            NGridFile::Range {
                start,
                stop,
                factor,
            } => geometric(start, stop, factor)?,
        };
        if n.is_empty() || n.contains(&0) {
            return Err(CliError::Parse(
                "n grid must be nonempty and positive".into(),
            ));
        }
        unit_interval("eps", &f.eps)?;
        let delta = f.delta.unwrap_or_else(|| vec![f.eps[0]]);
        unit_interval("delta", &delta)?;
        let bounds = match f.bounds {
            None => [BoundSet::Exact, BoundSet::Expansion].into_iter().collect(),
            Some(v) if v.is_empty() => return Err(CliError::Parse("`bounds` is empty".into())),
            Some(v) => v
                .iter()
                .map(|s| BoundSet::parse(s))
                .collect::<Result<_, _>>()?,
        };
        let resolve = |p: PathBuf| match base {
            Some(b) if p.is_relative() => b.join(p),
            _ => p,
        };
        let needs_file = !matches!(task, TaskId::WiretapBsc | TaskId::WiretapBpsk);
        if needs_file && f.file.is_none() {
            return Err(CliError::Parse(format!("task `{}` needs `file`", f.task)));
        }
        Ok(SweepSpec {
            task,
            file: f.file.map(resolve),
            n,
            eps: f.eps,
            delta,
            bounds,
            out: f.out.map(resolve),
            bits: f.bits,
            params: [f.p_y, f.p_z, f.sigma_y2, f.sigma_z2],
            p2: if f.p2_as_printed {
                P2Variant::AsPrinted
            } else {
                P2Variant::Corrected
            },
        })
    }
}

/// One evaluated quantity.
#[derive(Clone, Debug, PartialEq)]
pub struct Value {
    pub quantity: &'static str,
    pub direction: Direction,
    pub eps: f64,
    pub delta: Option<f64>,
    pub value: f64,
    pub coefficients: Option<[f64; 4]>,
}

enum Base {
    Pair(LlrSpectrum),
    Channel(ConditionalAdditiveChannel),
}

fn base_from_file(path: &Path) -> Result<Base, CliError> {
    let doc = parse_document(&std::fs::read_to_string(path)?)?;
    let req = doc
        .effective_requests()
        .into_iter()
        .next()
        .ok_or_else(|| CliError::Parse(format!("{} defines no pair", path.display())))?;
    let get = |name: &str| {
        doc.get(name)
            .ok_or_else(|| CliError::Parse(format!("no object named `{name}`")))
    };
    Ok(match req {
        Request::Pair { p, q } => Base::Pair(match (get(&p)?, get(&q)?) {
            (Object::Measure(a), Object::Measure(b)) => build_spectrum(a, b)?,
            (Object::Joint(a), Object::Joint(b)) => build_spectrum(a, b)?,
            _ => {
                return Err(CliError::Parse(format!(
                    "`pair {p} {q}` mixes object types"
                )))
            }
        }),
        Request::Cond { joint, reference } => {
            let Object::Joint(j) = get(&joint)? else {
                return Err(CliError::Parse(format!("`{joint}` is not a joint table")));
            };
            let r = match reference {
                None => j.marginal(Axis::Cols),
                Some(name) => match get(&name)? {
                    Object::Measure(m) => m.clone(),
                    _ => return Err(CliError::Parse(format!("`{name}` is not a measure"))),
                },
            };
            Base::Pair(build_spectrum(j, &j.lift_cols(&r)?)?)
        }
        Request::Channel { base, group } => Base::Channel(match get(&base)? {
            Object::Joint(j) => {
                let g = group.map_or_else(|| Group::cyclic(j.rows().len()), Ok)?;
                ConditionalAdditiveChannel::new(g, j)?
            }
            Object::Measure(m) => {
                let g = group.map_or_else(|| Group::cyclic(m.len()), Ok)?;
                ConditionalAdditiveChannel::additive(g, m)?
            }
            Object::Kernel(_) => return Err(CliError::Parse(format!("`{base}` is a kernel"))),
        }),
        Request::Bsc(p) => Base::Channel(ConditionalAdditiveChannel::bsc(p)?),
        Request::Bpsk { .. } => {
            return Err(CliError::Parse(
                "use task `wiretap-bpsk` for BPSK pairs".into(),
            ))
        }
    })
}

fn expansion_values(
    out: &mut Vec<Value>,
    sets: &BTreeSet<BoundSet>,
    n: u64,
    eps: f64,
    delta: Option<f64>,
    items: &[(&'static str, &'static str, Expansion)],
) {
    let nf = n as f64;
    for &(full, second, e) in items {
        let coefficients = Some([e.a1, e.a2, e.a3, e.a4]);
        if sets.contains(&BoundSet::Expansion) {
            out.push(Value {
                quantity: full,
                direction: e.direction,
                eps,
                delta,
                value: e.eval(nf),
                coefficients,
            });
        }
        if sets.contains(&BoundSet::SecondOrder) {
            out.push(Value {
                quantity: second,
                direction: e.direction,
                eps,
                delta,
                value: e.second_order(nf),
                coefficients,
            });
        }
    }
}

fn exact(quantity: &'static str, direction: Direction, eps: f64, value: f64) -> Value {
    Value {
        quantity,
        direction,
        eps,
        delta: None,
        value,
        coefficients: None,
    }
}

fn evaluate_n(spec: &SweepSpec, base: Option<&Base>, n: u64) -> Result<Vec<Value>, CliError> {
    let sets = &spec.bounds;
    let mut out = Vec::new();
    let want_exact = sets.contains(&BoundSet::Exact);
    let spectrum_n = |b: &Base| -> Result<LlrSpectrum, CliError> {
        let s = match b {
            Base::Pair(s) => s.clone(),
            Base::Channel(ch) => ch.noise_spectrum()?,
        };
        Ok(s.convolve_iid(n, &SpectrumOptions::default())?)
    };
    let stats = |b: &Base| -> Result<DivergenceStats, CliError> {
        Ok(match b {
            Base::Pair(s) => DivergenceStats::from_spectrum(s)?,
            Base::Channel(ch) => ch.stats()?,
        })
    };
    match spec.task {
        TaskId::Srng => {
            let b = base.expect("file-based task");
            let sn = spectrum_n(b)?;
            let prof = SrngProfile::new(&sn);
            let renyi = sets
                .contains(&BoundSet::Legacy)
                .then(|| RenyiProfile::new(&sn, Execution::Sequential));
            let st = stats(b)?;
            for &eps in &spec.eps {
                if want_exact {
                    out.push(exact(
                        "hmin_eps",
                        Direction::Upper,
                        eps,
                        prof.hmin_smooth_eps(eps)?,
                    ));
                    out.push(exact("ell_2", Direction::Lower, eps, prof.ell_2_eps(eps)?));
                    out.push(exact(
                        "ell_min",
                        Direction::Lower,
                        eps,
                        prof.ell_min_eps(eps)?,
                    ));
                }
                if let Some(r) = &renyi {
                    let w = legacy_bounds_with(&prof, r, eps, eps / 2.0, eps / 2.0)?;
                    out.push(exact("w1_upper", Direction::Upper, eps, w.w1_upper));
                    out.push(exact("w1_lower", Direction::Lower, eps, w.w1_lower));
                    out.push(exact("w2_lower", Direction::Lower, eps, w.w2_lower));
                    out.push(exact("w3_lower", Direction::Lower, eps, w.w3_lower));
                }
                let e = srng_from_stats(&st, eps)?;
                expansion_values(
                    &mut out,
                    sets,
                    n,
                    eps,
                    None,
                    &[
                        ("gs1", "gs1_second_order", e.gs1),
                        ("gs2", "gs2_second_order", e.gs2),
                        ("gs3", "gs3_second_order", e.gs3),
                    ],
                );
            }
        }
        TaskId::Ht | TaskId::Source | TaskId::SourceSide | TaskId::Channel => {
            let b = base.expect("file-based task");
            let prof = if want_exact {
                Some(TestingProfile::new(&spectrum_n(b)?))
            } else {
                None
            };
            let st = stats(b)?;
            for &eps in &spec.eps {
                if let Some(p) = &prof {
                    let dh = -p.ln_beta_eps(eps)?;
                    let ddt = p.d_dt_eps(eps)?;
                    match spec.task {
                        TaskId::Ht => {
                            out.push(exact("d_h", Direction::Exact, eps, dh));
                            out.push(exact("d_dt", Direction::Exact, eps, ddt));
                        }
                        TaskId::Source => out.push(exact("neg_d_h", Direction::Exact, eps, -dh)),
                        TaskId::SourceSide => {
                            out.push(exact("neg_d_h", Direction::Lower, eps, -dh));
                            out.push(exact("neg_d_dt", Direction::Upper, eps, -ddt));
                        }
                        _ => {
                            out.push(exact("d_dt", Direction::Lower, eps, ddt));
                            out.push(exact("d_h", Direction::Upper, eps, dh));
                        }
                    }
                }
                let items: Vec<(&'static str, &'static str, Expansion)> = match spec.task {
                    TaskId::Ht => {
                        let e = ht_from_stats(&st, eps)?;
                        vec![
                            ("dh", "dh_second_order", e.dh),
                            ("ddt", "ddt_second_order", e.ddt),
                        ]
                    }
                    TaskId::Source => {
                        let e = ht_from_stats(&st, eps)?;
                        vec![(
                            "source",
                            "source_second_order",
                            e.dh.negated(Direction::Approximation),
                        )]
                    }
                    TaskId::SourceSide => {
                        let e = ht_from_stats(&st, eps)?;
                        vec![
                            (
                                "source_side_lower",
                                "source_side_lower_second_order",
                                e.dh.negated(Direction::Lower),
                            ),
                            (
                                "source_side_upper",
                                "source_side_upper_second_order",
                                e.ddt.negated(Direction::Upper),
                            ),
                        ]
                    }
                    _ => {
                        let Base::Channel(ch) = b else {
                            return Err(CliError::Parse(
                                "task `channel` needs a `channel` or `bsc` request".into(),
                            ));
                        };
                        let e = expand_channel(ch, eps)?;
                        vec![
                            ("channel_lower", "channel_lower_second_order", e.lower),
                            ("channel_upper", "channel_upper_second_order", e.upper),
                        ]
                    }
                };
                expansion_values(&mut out, sets, n, eps, None, &items);
            }
        }
        TaskId::WiretapBsc | TaskId::WiretapBpsk => {
            let [p_y, p_z, sy, sz] = spec.params;
            let missing = |k: &str| CliError::Parse(format!("task needs `{k}`"));
            for &eps in &spec.eps {
                for &delta in &spec.delta {
                    let e = if spec.task == TaskId::WiretapBsc {
                        wiretap_bsc_expansions(
                            p_y.ok_or_else(|| missing("p_y"))?,
                            p_z.ok_or_else(|| missing("p_z"))?,
                            eps,
                            delta,
                            spec.p2,
                        )?
                    } else {
                        let pair = BpskPair::new(
                            sy.ok_or_else(|| missing("sigma_y2"))?,
                            sz.ok_or_else(|| missing("sigma_z2"))?,
                        )?;
                        bpsk_expansions(&pair, eps, delta)?
                    };
                    expansion_values(
                        &mut out,
                        sets,
                        n,
                        eps,
                        Some(delta),
                        &[
                            ("wiretap_lower", "wiretap_lower_second_order", e.lower),
                            ("wiretap_upper", "wiretap_upper_second_order", e.upper),
                        ],
                    );
                }
            }
        }
    }
    Ok(out)
}

/// Evaluates the sweep; grid points run in parallel, rows come out in grid order.
pub fn run_sweep(spec: &SweepSpec) -> Result<Table, CliError> {
    let base = match &spec.file {
        Some(p) => Some(base_from_file(p)?),
        None => None,
    };
    let per_n = map_slice(&spec.n, Execution::default(), |&n| {
        evaluate_n(spec, base.as_ref(), n)
    });
    let scale = if spec.bits {
        1.0 / std::f64::consts::LN_2
    } else {
        1.0
    };
    let mut t = Table::new(HEADER);
    for (&n, vals) in spec.n.iter().zip(per_n) {
        for v in vals? {
            let coeff = |i: usize| {
                v.coefficients
                    .map_or(String::new(), |c| fmt_g(c[i] * scale))
            };
            t.push(vec![
                spec.task.name().to_string(),
                v.quantity.to_string(),
                v.direction.tag().to_string(),
                n.to_string(),
                fmt_g(v.eps),
                v.delta.map_or(String::new(), fmt_g),
                fmt_g(v.value * scale),
                coeff(0),
                coeff(1),
                coeff(2),
                coeff(3),
            ]);
        }
    }
    Ok(t)
}

pub fn cmd_sweep(path: &Path) -> Result<(Table, Option<PathBuf>), CliError> {
    let text = std::fs::read_to_string(path)?;
    let spec = SweepSpec::from_toml(&text, path.parent())?;
    Ok((run_sweep(&spec)?, spec.out.clone()))
}
