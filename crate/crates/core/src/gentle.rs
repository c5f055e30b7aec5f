//! Gentleness: connected, loop-free, and the conditions G1–G3.

use std::fmt;

use serde::Serialize;

use crate::quiver::BoundQuiver;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Condition {
    Connected,
    NoLoops,
    G1,
    G2,
    G3,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub condition: Condition,
    /// Vertex or arrow the violation is anchored at (empty for connectivity).
    pub at: String,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.at.is_empty() {
            write!(f, "{:?}: {}", self.condition, self.detail)
        } else {
            write!(f, "{:?} at {}: {}", self.condition, self.at, self.detail)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct GentleReport {
    pub violations: Vec<Violation>,
}

impl GentleReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate_gentle(q: &BoundQuiver) -> GentleReport {
    let ix = q.index();
    let mut violations = Vec::new();
    let mut push = |condition, at: &str, detail: String| {
        violations.push(Violation {
            condition,
            at: at.to_string(),
            detail,
        })
    };

    if ix.nv() > 0 {
        let mut uf = UnionFind::new(ix.nv());
        for a in 0..ix.na() {
            uf.union(ix.src[a], ix.tgt[a]);
        }
        let comps = (0..ix.nv()).filter(|&v| uf.find(v) == v).count();
        if comps > 1 {
            push(
                Condition::Connected,
                "",
                format!("underlying graph has {comps} components"),
            );
        }
    }

    for v in 0..ix.nv() {
        let (i, o) = (ix.ins[v].len(), ix.outs[v].len());
        if i > 2 || o > 2 {
            push(
                Condition::G1,
                &ix.vnames[v],
                format!("{i} in-arrows and {o} out-arrows"),
            );
        }
    }

    for a in 0..ix.na() {
        let name = &ix.anames[a];
        if ix.src[a] == ix.tgt[a] {
            push(Condition::NoLoops, name, "arrow is a loop".into());
        }
        let count = |it: &mut dyn Iterator<Item = usize>| it.count();
        let checks = [
            (Condition::G2, count(&mut ix.succ(a, false)), "non-relation successors"),
            (
                Condition::G2,
                count(&mut ix.pred(a, false)),
                "non-relation predecessors",
            ),
            (Condition::G3, count(&mut ix.succ(a, true)), "relation successors"),
            (Condition::G3, count(&mut ix.pred(a, true)), "relation predecessors"),
        ];
        for (cond, n, what) in checks {
            if n > 1 {
                push(cond, name, format!("{n} {what}"));
            }
        }
    }
    GentleReport { violations }
}

pub fn is_gentle(q: &BoundQuiver) -> bool {
    validate_gentle(q).is_ok()
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        self.parent[a] = b;
        true
    }
}
