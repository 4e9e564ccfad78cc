//! `flb quantities`: single-letter statistics and constant terms per request.

use std::path::Path;

use flb_core::measures::Axis;
use flb_core::quantities::{divergence_stats, f_constant, ConstantTerm, DivergenceStats};
use flb_core::tasks::{bpsk_joint_stats, bpsk_stats, BpskPair, ConditionalAdditiveChannel, Group};
use flb_core::text::{parse_document, Document, Object, Request};

use crate::error::CliError;
use crate::format::{fmt_g, Table};

pub const HEADER: [&str; 11] = [
    "request", "d", "v", "kappa", "span", "f1", "f2", "f3", "f4", "f5", "eps",
];

fn lookup<'a>(doc: &'a Document, name: &str) -> Result<&'a Object, CliError> {
    doc.get(name)
        .ok_or_else(|| CliError::Parse(format!("no object named `{name}`")))
}

fn request_stats(
    doc: &Document,
    req: &Request,
) -> Result<Vec<(String, DivergenceStats)>, CliError> {
    Ok(match req {
        Request::Pair { p, q } => {
            let s = match (lookup(doc, p)?, lookup(doc, q)?) {
                (Object::Measure(a), Object::Measure(b)) => divergence_stats(a, b)?,
                (Object::Joint(a), Object::Joint(b)) => divergence_stats(a, b)?,
                _ => {
                    return Err(CliError::Parse(format!(
                        "`pair {p} {q}` needs two measures or two joints"
                    )))
                }
            };
            vec![(format!("pair {p} {q}"), s)]
        }
        Request::Cond { joint, reference } => {
            let Object::Joint(j) = lookup(doc, joint)? else {
                return Err(CliError::Parse(format!("`{joint}` is not a joint table")));
            };
            let r = match reference {
                None => j.marginal(Axis::Cols),
                Some(name) => match lookup(doc, name)? {
                    Object::Measure(m) => m.clone(),
                    _ => return Err(CliError::Parse(format!("`{name}` is not a measure"))),
                },
            };
            let label = match reference {
                None => format!("cond {joint}"),
                Some(r) => format!("cond {joint} {r}"),
            };
            vec![(label, divergence_stats(j, &j.lift_cols(&r)?)?)]
        }
        Request::Channel { base, group } => {
            let ch = match lookup(doc, base)? {
                Object::Joint(j) => {
                    let g = match group {
                        Some(g) => g.clone(),
                        None => Group::cyclic(j.rows().len())?,
                    };
                    ConditionalAdditiveChannel::new(g, j)?
                }
                Object::Measure(m) => {
                    let g = match group {
                        Some(g) => g.clone(),
                        None => Group::cyclic(m.len())?,
                    };
                    ConditionalAdditiveChannel::additive(g, m)?
                }
                Object::Kernel(_) => {
                    return Err(CliError::Parse(format!(
                        "`{base}` is a kernel, not a noise law"
                    )))
                }
            };
            vec![(format!("channel {base}"), ch.stats()?)]
        }
        Request::Bsc(p) => vec![(
            format!("bsc {}", fmt_g(*p)),
            ConditionalAdditiveChannel::bsc(*p)?.stats()?,
        )],
        Request::Bpsk { sigma_y2, sigma_z2 } => {
            let pair = BpskPair::new(*sigma_y2, *sigma_z2)?;
            vec![
                (
                    format!("bpsk-y {}", fmt_g(*sigma_y2)),
                    bpsk_stats(*sigma_y2)?,
                ),
                (
                    format!("bpsk-z {}", fmt_g(*sigma_z2)),
                    bpsk_stats(*sigma_z2)?,
                ),
                (
                    format!("bpsk-joint {} {}", fmt_g(*sigma_y2), fmt_g(*sigma_z2)),
                    bpsk_joint_stats(&pair)?.stats,
                ),
            ]
        }
    })
}

fn row(label: String, s: &DivergenceStats, eps: f64) -> Vec<String> {
    let mut r = vec![label, fmt_g(s.d), fmt_g(s.v), fmt_g(s.kappa), fmt_g(s.span)];
    for i in 1..=5 {
        let term = ConstantTerm::from_index(i).expect("indices 1 to 5 are valid");
        // Constant terms are undefined when the variance vanishes.
        r.push(fmt_g(f_constant(term, s, eps).unwrap_or(f64::NAN)));
    }
    r.push(fmt_g(eps));
    r
}

pub fn quantities_from_text(text: &str) -> Result<Table, CliError> {
    let doc = parse_document(text)?;
    let mut t = Table::new(HEADER);
    for req in doc.effective_requests() {
        for (label, s) in request_stats(&doc, &req)? {
            t.push(row(label, &s, doc.eps));
        }
    }
    Ok(t)
}

pub fn cmd_quantities(path: &Path) -> Result<Table, CliError> {
    let text = std::fs::read_to_string(path)?;
    quantities_from_text(&text)
}
