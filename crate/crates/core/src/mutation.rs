//! BB tilting mutation σ_x and its dual σ'_x as local rewrites.
//!
//! Tilt at `x` (in-arrows `β`, out-arrows `α`):
//! - every `β: b → x` becomes `β: x → b`;
//! - every `α: x → a` becomes `α: b → a`, where `β: b → x` is its unique
//!   in-partner with `(β, α)` not a relation;
//! - every `γ: c → b` with `(γ, β)` a relation becomes `γ: c → x`.
//!
//! Relations touching a `β`, ending in an `α`, or starting with a moved `γ`
//! are dropped. The new ones are `(β, α)` for each partner pair and
//! `(γ_j, β_k)` for `k ≠ j`. No relation joins `γ_j` to its own `β_j`.
//! Cotilt is the same rewrite on the opposite quiver.
//!
//! Arrow ids are kept, so a trace can be replayed against any renaming-free copy.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gentle::validate_gentle;
use crate::quiver::{BoundQuiver, Ix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MutationKind {
    Tilt,
    Cotilt,
}

impl MutationKind {
    pub fn dual(self) -> Self {
        match self {
            MutationKind::Tilt => MutationKind::Cotilt,
            MutationKind::Cotilt => MutationKind::Tilt,
        }
    }
}

impl fmt::Display for MutationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MutationKind::Tilt => "tilt",
            MutationKind::Cotilt => "cotilt",
        })
    }
}

impl std::str::FromStr for MutationKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "tilt" => Ok(MutationKind::Tilt),
            "cotilt" => Ok(MutationKind::Cotilt),
            _ => Err(format!("unknown mutation kind {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MutationStep {
    pub vertex: String,
    pub kind: MutationKind,
}

impl MutationStep {
    pub fn tilt(v: &str) -> Self {
        MutationStep {
            vertex: v.to_string(),
            kind: MutationKind::Tilt,
        }
    }

    pub fn cotilt(v: &str) -> Self {
        MutationStep {
            vertex: v.to_string(),
            kind: MutationKind::Cotilt,
        }
    }

    pub fn inverse(&self) -> Self {
        MutationStep {
            vertex: self.vertex.clone(),
            kind: self.kind.dual(),
        }
    }
}

impl fmt::Display for MutationStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.kind, self.vertex)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MutationTrace(pub Vec<MutationStep>);

impl MutationTrace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, s: MutationStep) {
        self.0.push(s);
    }

    pub fn extend(&mut self, other: &MutationTrace) {
        self.0.extend(other.0.iter().cloned());
    }

    /// The trace undoing this one.
    pub fn inverse(&self) -> MutationTrace {
        MutationTrace(self.0.iter().rev().map(MutationStep::inverse).collect())
    }

    pub fn iter(&self) -> impl Iterator<Item = &MutationStep> {
        self.0.iter()
    }
}

impl FromIterator<MutationStep> for MutationTrace {
    fn from_iter<I: IntoIterator<Item = MutationStep>>(it: I) -> Self {
        MutationTrace(it.into_iter().collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
pub enum Ineligible {
    #[error("no vertex {0}")]
    UnknownVertex(String),
    #[error("loop at {0}")]
    Loop(String),
    #[error("{0} is a source: tilting needs an in-arrow")]
    Source(String),
    #[error("{0} is a sink: cotilting needs an out-arrow")]
    Sink(String),
    #[error("arrow {0} has no partner with a non-relation composition at {1}")]
    NoPartner(String, String),
    #[error("arrow {0} closes a 2-cycle through {1}; the rewrite is not defined there")]
    Degenerate(String, String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MutationError {
    #[error("input is not gentle: {0}")]
    NotGentle(String),
    #[error(transparent)]
    Ineligible(#[from] Ineligible),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("step {index} ({step}): {source}")]
pub struct TraceError {
    pub index: usize,
    pub step: MutationStep,
    pub source: MutationError,
}

type Rewrite = (Vec<(usize, usize)>, HashSet<(usize, usize)>);

/// The tilt rewrite on an indexed quiver; cotilt is handled by the caller via
/// the opposite quiver.
fn tilt_ix(ix: &Ix, x: usize) -> Result<Rewrite, Ineligible> {
    let name = || ix.vnames[x].clone();
    let ins = &ix.ins[x];
    let outs = &ix.outs[x];
    if ins.iter().any(|&b| ix.src[b] == x) {
        return Err(Ineligible::Loop(name()));
    }
    if ins.is_empty() {
        return Err(Ineligible::Source(name()));
    }
    let mut partner = Vec::with_capacity(outs.len());
    for &a in outs {
        match ins.iter().copied().find(|&b| !ix.is_rel(b, a)) {
            Some(b) => partner.push((a, b)),
            None => return Err(Ineligible::NoPartner(ix.anames[a].clone(), name())),
        }
    }
    let mut relpred = Vec::new();
    for &b in ins {
        if let Some(g) = ix.pred(b, true).next() {
            if outs.contains(&g) || ins.contains(&g) {
                return Err(Ineligible::Degenerate(ix.anames[g].clone(), name()));
            }
            relpred.push((b, g));
        }
    }

    let mut ends: Vec<(usize, usize)> = (0..ix.na()).map(|a| (ix.src[a], ix.tgt[a])).collect();
    for &b in ins {
        ends[b] = (x, ix.src[b]);
    }
    for &(a, b) in &partner {
        ends[a] = (ix.src[b], ix.tgt[a]);
    }
    for &(_, g) in &relpred {
        ends[g] = (ix.src[g], x);
    }

    let moved: HashSet<usize> = relpred.iter().map(|&(_, g)| g).collect();
    let mut rels = HashSet::new();
    for a in 0..ix.na() {
        for b in ix.succ(a, true) {
            if ins.contains(&a) || ins.contains(&b) || outs.contains(&b) || moved.contains(&a) {
                continue;
            }
            rels.insert((a, b));
        }
    }
    for &(bj, g) in &relpred {
        for &bk in ins {
            if bk != bj {
                rels.insert((g, bk));
            }
        }
    }
    for &(a, b) in &partner {
        rels.insert((b, a));
    }
    Ok((ends, rels))
}

fn rebuild(q: &BoundQuiver, ix: &Ix, (ends, rels): Rewrite) -> BoundQuiver {
    let vertices: BTreeSet<String> = ix.vnames.iter().cloned().collect();
    let arrows: BTreeMap<String, (String, String)> = ends
        .iter()
        .enumerate()
        .map(|(a, &(s, t))| (ix.anames[a].clone(), (ix.vnames[s].clone(), ix.vnames[t].clone())))
        .collect();
    let relations: BTreeSet<(String, String)> = rels
        .into_iter()
        .map(|(a, b)| (ix.anames[a].clone(), ix.anames[b].clone()))
        .collect();
    BoundQuiver::from_parts(q.m(), vertices, arrows, relations)
}

fn vertex_index(ix: &Ix, v: &str) -> Result<usize, Ineligible> {
    ix.vnames
        .binary_search_by(|n| n.as_str().cmp(v))
        .map_err(|_| Ineligible::UnknownVertex(v.to_string()))
}

/// Eligibility of a step on a gentle quiver (gentleness is not re-checked).
pub fn can_mutate(q: &BoundQuiver, s: &MutationStep) -> Result<(), Ineligible> {
    match s.kind {
        MutationKind::Tilt => {
            let ix = q.index();
            tilt_ix(&ix, vertex_index(&ix, &s.vertex)?).map(|_| ())
        }
        MutationKind::Cotilt => {
            let op = q.opposite();
            let ix = op.index();
            tilt_ix(&ix, vertex_index(&ix, &s.vertex)?)
                .map(|_| ())
                .map_err(|e| match e {
                    Ineligible::Source(v) => Ineligible::Sink(v),
                    e => e,
                })
        }
    }
}

/// Apply a step without re-validating gentleness. Used on hot paths where the
/// input is known to be gentle (mutation preserves gentleness).
pub(crate) fn mutate_unchecked(q: &BoundQuiver, s: &MutationStep) -> Result<BoundQuiver, Ineligible> {
    match s.kind {
        MutationKind::Tilt => {
            let ix = q.index();
            let rw = tilt_ix(&ix, vertex_index(&ix, &s.vertex)?)?;
            Ok(rebuild(q, &ix, rw))
        }
        MutationKind::Cotilt => {
            let op = q.opposite();
            let ix = op.index();
            let rw = tilt_ix(&ix, vertex_index(&ix, &s.vertex)?).map_err(|e| match e {
                Ineligible::Source(v) => Ineligible::Sink(v),
                e => e,
            })?;
            Ok(rebuild(&op, &ix, rw).opposite())
        }
    }
}

pub fn mutate(q: &BoundQuiver, s: &MutationStep) -> Result<BoundQuiver, MutationError> {
    if let Some(v) = validate_gentle(q).violations.first() {
        return Err(MutationError::NotGentle(v.to_string()));
    }
    Ok(mutate_unchecked(q, s)?)
}

/// Every eligible step, tilts before cotilts, vertices in order.
pub fn eligible_steps(q: &BoundQuiver) -> Vec<MutationStep> {
    let mut out = Vec::new();
    let ix = q.index();
    let op = q.opposite();
    let oix = op.index();
    for kind in [MutationKind::Tilt, MutationKind::Cotilt] {
        for v in 0..ix.nv() {
            let ok = match kind {
                MutationKind::Tilt => tilt_ix(&ix, v).is_ok(),
                MutationKind::Cotilt => tilt_ix(&oix, v).is_ok(),
            };
            if ok {
                out.push(MutationStep {
                    vertex: ix.vnames[v].clone(),
                    kind,
                });
            }
        }
    }
    out
}

pub fn apply_trace(q: &BoundQuiver, t: &MutationTrace) -> Result<BoundQuiver, TraceError> {
    apply_trace_with_intermediates(q, t).map(|mut v| v.pop().expect("at least the input"))
}

/// The input followed by the quiver after each step.
pub fn apply_trace_with_intermediates(q: &BoundQuiver, t: &MutationTrace) -> Result<Vec<BoundQuiver>, TraceError> {
    let mut out = vec![q.clone()];
    for (index, step) in t.iter().enumerate() {
        let cur = out.last().unwrap();
        let next = if index == 0 {
            mutate(cur, step)
        } else {
            mutate_unchecked(cur, step).map_err(MutationError::from)
        };
        out.push(next.map_err(|source| TraceError {
            index,
            step: step.clone(),
            source,
        })?);
    }
    Ok(out)
}
