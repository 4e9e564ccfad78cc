//! Line-oriented description files.
//!
//! ```text
//! # comment
//! name p
//! atom 0 0.89
//! atom 1 0.11
//! name i
//! counting 0 1
//! pair p i
//! eps 1e-3
//! ```
//!
//! `name <id>` opens a block filled by `atom <label> <w>`, `joint <row> <col> <w>`,
//! `kernel <in> <out> <prob>` or `counting <labels…>` lines, optionally with
//! `kind probability|subnormalized|generic`. Lines before the first `name` open an
//! anonymous block named `_1`, `_2`, …. Requests are `pair <p> <q>`,
//! `cond <joint> [<reference>]`, `channel <joint-or-measure>` (over the last
//! `group <d…>`, default ℤ_d with d the number of rows), `bsc <p>` and
//! `bpsk <σ_Y²> <σ_Z²>`.

use crate::error::{FlbError, Result};
use crate::measures::{ConditionalKernel, DiscreteMeasure, JointMeasure, MeasureKind};
use crate::tasks::Group;

#[derive(Clone, Debug, PartialEq)]
pub enum Object {
    Measure(DiscreteMeasure),
    Joint(JointMeasure),
    Kernel(ConditionalKernel),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Request {
    Pair {
        p: String,
        q: String,
    },
    Cond {
        joint: String,
        reference: Option<String>,
    },
    Channel {
        base: String,
        group: Option<Group>,
    },
    Bsc(f64),
    Bpsk {
        sigma_y2: f64,
        sigma_z2: f64,
    },
}

/// Parsed file: named objects in order of appearance, requests, and `ε`.
#[derive(Clone, Debug, PartialEq)]
pub struct Document {
    pub objects: Vec<(String, Object)>,
    pub requests: Vec<Request>,
    pub eps: f64,
}

impl Document {
    pub fn get(&self, name: &str) -> Option<&Object> {
        self.objects.iter().find(|(n, _)| n == name).map(|(_, o)| o)
    }

    /// The explicit requests, or defaults: every joint gets a `cond` row and,
    /// when the file holds exactly two measures, they form one `pair`.
    pub fn effective_requests(&self) -> Vec<Request> {
        if !self.requests.is_empty() {
            return self.requests.clone();
        }
        let mut out = Vec::new();
        let measures: Vec<&String> = self
            .objects
            .iter()
            .filter(|(_, o)| matches!(o, Object::Measure(_)))
            .map(|(n, _)| n)
            .collect();
        if measures.len() == 2 {
            out.push(Request::Pair {
                p: measures[0].clone(),
                q: measures[1].clone(),
            });
        }
        for (n, o) in &self.objects {
            if matches!(o, Object::Joint(_)) {
                out.push(Request::Cond {
                    joint: n.clone(),
                    reference: None,
                });
            }
        }
        out
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum BlockShape {
    Empty,
    Atoms,
    Joint,
    Kernel,
}

struct Block {
    name: String,
    line: usize,
    shape: BlockShape,
    kind: Option<MeasureKind>,
    atoms: Vec<(String, f64)>,
    cells: Vec<(String, String, f64)>,
}

impl Block {
    fn new(name: String, line: usize) -> Block {
        Block {
            name,
            line,
            shape: BlockShape::Empty,
            kind: None,
            atoms: Vec::new(),
            cells: Vec::new(),
        }
    }

    fn set_shape(&mut self, shape: BlockShape, line: usize) -> Result<()> {
        if self.shape != BlockShape::Empty && self.shape != shape {
            return Err(parse_err(
                line,
                format!("block `{}` mixes different line kinds", self.name),
            ));
        }
        self.shape = shape;
        Ok(())
    }

    fn finish(self) -> Result<Option<(String, Object)>> {
        let kind = self.kind.unwrap_or(MeasureKind::Probability);
        let at = |e: FlbError| parse_err(self.line, format!("block `{}`: {e}", self.name));
        let obj = match self.shape {
            BlockShape::Empty => return Ok(None),
            BlockShape::Atoms => {
                Object::Measure(DiscreteMeasure::new(self.atoms, kind).map_err(at)?)
            }
            BlockShape::Joint => {
                Object::Joint(JointMeasure::from_cells(self.cells, kind).map_err(at)?)
            }
            BlockShape::Kernel => {
                Object::Kernel(ConditionalKernel::from_entries(self.cells).map_err(at)?)
            }
        };
        Ok(Some((self.name, obj)))
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> FlbError {
    FlbError::Parse {
        line,
        msg: msg.into(),
    }
}

fn number(tok: &str, line: usize) -> Result<f64> {
    tok.parse::<f64>()
        .map_err(|_| parse_err(line, format!("`{tok}` is not a number")))
}

fn arity(toks: &[&str], want: usize, line: usize) -> Result<()> {
    if toks.len() != want + 1 {
        return Err(parse_err(
            line,
            format!(
                "`{}` takes {want} argument(s), got {}",
                toks[0],
                toks.len() - 1
            ),
        ));
    }
    Ok(())
}

pub fn parse_document(text: &str) -> Result<Document> {
    let mut objects: Vec<(String, Object)> = Vec::new();
    let mut requests = Vec::new();
    let mut eps = 1e-3;
    let mut group: Option<Group> = None;
    let mut block: Option<Block> = None;
    let mut anon = 0;

    let close = |block: &mut Option<Block>, objects: &mut Vec<(String, Object)>| -> Result<()> {
        if let Some(b) = block.take() {
            let line = b.line;
            if let Some((name, obj)) = b.finish()? {
                if objects.iter().any(|(n, _)| *n == name) {
                    return Err(parse_err(line, format!("duplicate name `{name}`")));
                }
                objects.push((name, obj));
            }
        }
        Ok(())
    };

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = content.split_whitespace().collect();
        let Some(&head) = toks.first() else { continue };
        match head {
            "name" => {
                arity(&toks, 1, line)?;
                close(&mut block, &mut objects)?;
                block = Some(Block::new(toks[1].to_string(), line));
            }
            "atom" | "joint" | "kernel" | "counting" | "kind" => {
                let b = block.get_or_insert_with(|| {
                    anon += 1;
                    Block::new(format!("_{anon}"), line)
                });
                match head {
                    "atom" => {
                        arity(&toks, 2, line)?;
                        b.set_shape(BlockShape::Atoms, line)?;
                        b.atoms.push((toks[1].to_string(), number(toks[2], line)?));
                    }
                    "counting" => {
                        if toks.len() < 2 {
                            return Err(parse_err(line, "`counting` needs at least one label"));
                        }
                        b.set_shape(BlockShape::Atoms, line)?;
                        b.kind.get_or_insert(MeasureKind::Generic);
                        b.atoms
                            .extend(toks[1..].iter().map(|l| (l.to_string(), 1.0)));
                    }
                    "kind" => {
                        arity(&toks, 1, line)?;
                        b.kind = Some(match toks[1] {
                            "probability" => MeasureKind::Probability,
                            "subnormalized" => MeasureKind::Subnormalized,
                            "generic" => MeasureKind::Generic,
                            other => {
                                return Err(parse_err(line, format!("unknown kind `{other}`")))
                            }
                        });
                    }
                    shape => {
                        arity(&toks, 3, line)?;
                        b.set_shape(
                            if shape == "joint" {
                                BlockShape::Joint
                            } else {
                                BlockShape::Kernel
                            },
                            line,
                        )?;
                        b.cells.push((
                            toks[1].to_string(),
                            toks[2].to_string(),
                            number(toks[3], line)?,
                        ));
                    }
                }
            }
            "pair" => {
                arity(&toks, 2, line)?;
                requests.push(Request::Pair {
                    p: toks[1].to_string(),
                    q: toks[2].to_string(),
                });
            }
            "cond" => {
                if !(toks.len() == 2 || toks.len() == 3) {
                    return Err(parse_err(
                        line,
                        "`cond` takes a joint and an optional reference",
                    ));
                }
                requests.push(Request::Cond {
                    joint: toks[1].to_string(),
                    reference: toks.get(2).map(|s| s.to_string()),
                });
            }
            "group" => {
                if toks.len() < 2 {
                    return Err(parse_err(line, "`group` needs at least one order"));
                }
                let radices = toks[1..]
                    .iter()
                    .map(|t| {
                        t.parse::<usize>()
                            .map_err(|_| parse_err(line, format!("`{t}` is not a group order")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                group = Some(Group::product(radices).map_err(|e| parse_err(line, e.to_string()))?);
            }
            "channel" => {
                arity(&toks, 1, line)?;
                requests.push(Request::Channel {
                    base: toks[1].to_string(),
                    group: group.clone(),
                });
            }
            "bsc" => {
                arity(&toks, 1, line)?;
                let p = number(toks[1], line)?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(parse_err(line, format!("crossover {p} outside [0, 1]")));
                }
                requests.push(Request::Bsc(p));
            }
            "bpsk" => {
                arity(&toks, 2, line)?;
                let sigma_y2 = number(toks[1], line)?;
                let sigma_z2 = number(toks[2], line)?;
                if !(sigma_y2 > 0.0 && sigma_z2 > sigma_y2) {
                    return Err(parse_err(line, "need 0 < σ_Y² < σ_Z²"));
                }
                requests.push(Request::Bpsk { sigma_y2, sigma_z2 });
            }
            "eps" => {
                arity(&toks, 1, line)?;
                eps = number(toks[1], line)?;
                if !(eps > 0.0 && eps < 1.0) {
                    return Err(parse_err(line, format!("ε = {eps} outside (0, 1)")));
                }
            }
            other => return Err(parse_err(line, format!("unknown directive `{other}`"))),
        }
    }
    close(&mut block, &mut objects)?;
    Ok(Document {
        objects,
        requests,
        eps,
    })
}
