//! m-saturated cycles and root-cycle detection.
//!
//! Saturated cycles are the oriented cycles of length m+2 whose consecutive
//! compositions are all relations; on a gentle quiver they are pairwise
//! arrow-disjoint. The root cycle is found in the cycle space over GF(2): the
//! non-saturated part must have rank one, and among the simple cycles in
//! `f + span(saturated)` (with `f` any cycle outside the span) we take the one
//! using the fewest arrows of saturated cycles. A tie is reported as ambiguous.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::gentle::validate_gentle;
use crate::quiver::{BoundQuiver, Ix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("quiver is not gentle: {0}")]
    NotGentle(String),
    #[error("ambiguous root cycle: {0}")]
    AmbiguousRoot(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Clockwise,
    Counterclockwise,
    /// Shares no arrow with the root cycle (sits on a ray, or there is no root).
    Detached,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RootArrow {
    pub arrow: String,
    /// Traversed from source to target, i.e. clockwise.
    pub forward: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SaturatedCycle {
    /// Arrows in path order, starting from the least id.
    pub arrows: Vec<String>,
    pub orientation: Orientation,
    /// Number of arrows shared with the root cycle.
    pub shared: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleReport {
    pub root_cycle: Option<Vec<RootArrow>>,
    pub saturated_cycles: Vec<SaturatedCycle>,
    /// Oriented full-relation cycles whose length is not m+2.
    pub other_relation_cycles: Vec<Vec<String>>,
}

impl CycleReport {
    pub fn root_len(&self) -> usize {
        self.root_cycle.as_ref().map_or(0, Vec::len)
    }

    pub fn count(&self, o: Orientation) -> usize {
        self.saturated_cycles.iter().filter(|c| c.orientation == o).count()
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub(crate) struct Bits(Vec<u64>);

impl Bits {
    pub fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }

    pub fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn xor(&mut self, o: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&o.0) {
            *a ^= b;
        }
    }

    fn top(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .rev()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + 63 - w.leading_zeros() as usize)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(i, &w)| (0..64).filter(move |b| w >> b & 1 == 1).map(move |b| i * 64 + b))
    }
}

/// Row-echelon basis keyed by leading bit.
#[derive(Default)]
struct Basis(HashMap<usize, Bits>);

impl Basis {
    fn reduce(&self, mut v: Bits) -> Bits {
        while let Some(t) = v.top() {
            match self.0.get(&t) {
                Some(b) => v.xor(b),
                None => break,
            }
        }
        v
    }

    fn insert(&mut self, v: Bits) -> bool {
        let v = self.reduce(v);
        match v.top() {
            Some(t) => {
                self.0.insert(t, v);
                true
            }
            None => false,
        }
    }
}

/// The structural facts every later stage needs, on indices.
#[derive(Debug, Clone)]
pub(crate) struct Structure {
    /// Full-relation cycles of length m+2, arrows in path order.
    pub sats: Vec<Vec<usize>>,
    pub others: Vec<Vec<usize>>,
    /// Root cycle as (arrow, forward) in traversal order, starting at the least vertex.
    pub root: Option<Vec<(usize, bool)>>,
}

fn full_relation_cycles(ix: &Ix) -> Vec<Vec<usize>> {
    let next = ix.next_map(true);
    let mut has_prev = vec![false; ix.na()];
    for &b in next.iter().flatten() {
        has_prev[b] = true;
    }
    let mut seen = vec![false; ix.na()];
    // arrows on chains are not on cycles
    for a in (0..ix.na()).filter(|&a| !has_prev[a]) {
        let mut c = Some(a);
        while let Some(x) = c {
            seen[x] = true;
            c = next[x];
        }
    }
    let mut out = Vec::new();
    for a in 0..ix.na() {
        if seen[a] {
            continue;
        }
        let mut c = vec![a];
        seen[a] = true;
        let mut b = next[a].expect("cycle");
        while !seen[b] {
            seen[b] = true;
            c.push(b);
            b = next[b].expect("cycle");
        }
        out.push(c);
    }
    out
}

fn is_simple_cycle(ix: &Ix, c: &Bits) -> bool {
    let mut deg: HashMap<usize, usize> = HashMap::new();
    let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut n = 0;
    for a in c.ones() {
        n += 1;
        let (s, t) = (ix.src[a], ix.tgt[a]);
        *deg.entry(s).or_insert(0) += 1;
        *deg.entry(t).or_insert(0) += 1;
        adj.entry(s).or_default().push(t);
        adj.entry(t).or_default().push(s);
    }
    if n == 0 || deg.values().any(|&d| d != 2) {
        return false;
    }
    let start = *deg.keys().next().unwrap();
    let mut seen = vec![start];
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for &w in &adj[&v] {
            if !seen.contains(&w) {
                seen.push(w);
                stack.push(w);
            }
        }
    }
    seen.len() == deg.len()
}

fn walk_root(ix: &Ix, c: &Bits) -> Vec<(usize, bool)> {
    let arrows: Vec<usize> = c.ones().collect();
    let v0 = arrows.iter().flat_map(|&a| [ix.src[a], ix.tgt[a]]).min().unwrap();
    let mut used = vec![false; ix.na()];
    let mut out = Vec::with_capacity(arrows.len());
    let mut v = v0;
    let mut cur = *arrows.iter().find(|&&a| ix.src[a] == v0 || ix.tgt[a] == v0).unwrap();
    loop {
        used[cur] = true;
        let fwd = ix.src[cur] == v;
        out.push((cur, fwd));
        v = if fwd { ix.tgt[cur] } else { ix.src[cur] };
        match arrows.iter().find(|&&a| !used[a] && (ix.src[a] == v || ix.tgt[a] == v)) {
            Some(&a) => cur = a,
            None => break,
        }
    }
    out
}

const MAX_ENUMERATED: usize = 16;

pub(crate) fn structure(q: &BoundQuiver, ix: &Ix) -> Result<Structure, ClassifyError> {
    let m = q.m() as usize;
    let (sats, others): (Vec<_>, Vec<_>) = full_relation_cycles(ix).into_iter().partition(|c| c.len() == m + 2);

    let na = ix.na();
    let to_bits = |c: &[usize]| {
        let mut b = Bits::new(na);
        for &a in c {
            b.set(a);
        }
        b
    };
    let sat_bits: Vec<Bits> = sats.iter().map(|c| to_bits(c)).collect();
    let mut basis = Basis::default();
    for b in &sat_bits {
        basis.insert(b.clone());
    }

    // fundamental cycles from a BFS spanning forest
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; ix.nv()];
    let mut visited = vec![false; ix.nv()];
    let mut tree = vec![false; na];
    for r in 0..ix.nv() {
        if visited[r] {
            continue;
        }
        visited[r] = true;
        let mut queue = std::collections::VecDeque::from([r]);
        while let Some(v) = queue.pop_front() {
            for &a in ix.outs[v].iter().chain(&ix.ins[v]) {
                let w = if ix.src[a] == v { ix.tgt[a] } else { ix.src[a] };
                if !visited[w] {
                    visited[w] = true;
                    parent[w] = Some((a, v));
                    tree[a] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    let path_to_root = |mut v: usize, b: &mut Bits| {
        while let Some((a, p)) = parent[v] {
            b.0[a / 64] ^= 1 << (a % 64);
            v = p;
        }
    };
    let mut extra = Vec::new();
    let mut ext_basis = Basis(basis.0.clone());
    for a in (0..na).filter(|&a| !tree[a]) {
        let mut f = Bits::new(na);
        f.set(a);
        path_to_root(ix.src[a], &mut f);
        path_to_root(ix.tgt[a], &mut f);
        if ext_basis.insert(f.clone()) {
            extra.push(f);
        }
    }
    if extra.is_empty() {
        return Ok(Structure {
            sats,
            others,
            root: None,
        });
    }
    if extra.len() > 1 {
        return Err(ClassifyError::AmbiguousRoot(format!(
            "{} independent non-saturated cycles",
            extra.len()
        )));
    }
    let f = extra.pop().unwrap();

    let relevant: Vec<usize> = (0..sats.len()).filter(|&i| sats[i].iter().any(|&a| f.get(a))).collect();
    // per-cycle choice: keep f's part of s, or swap it for the complement
    let mut best: Option<(usize, Bits)> = None;
    let mut tie = false;
    let consider = |c: Bits, best: &mut Option<(usize, Bits)>, tie: &mut bool| {
        if !is_simple_cycle(ix, &c) {
            return;
        }
        let cost = sats.iter().flatten().filter(|&&a| c.get(a)).count();
        match best {
            Some((b, _)) if cost > *b => {}
            Some((b, bc)) if cost == *b => {
                if *bc != c {
                    *tie = true;
                }
            }
            _ => {
                *best = Some((cost, c));
                *tie = false;
            }
        }
    };
    // fast path: cycles are arrow-disjoint, so the cheapest side can be chosen per cycle
    let mut greedy = f.clone();
    let mut greedy_tie = false;
    for &i in &relevant {
        let inside = sats[i].iter().filter(|&&a| f.get(a)).count();
        let len = sats[i].len();
        if 2 * inside == len {
            greedy_tie = true;
        }
        if 2 * inside > len {
            greedy.xor(&sat_bits[i]);
        }
    }
    if !greedy_tie && is_simple_cycle(ix, &greedy) {
        best = Some((0, greedy));
    } else {
        if relevant.len() > MAX_ENUMERATED {
            return Err(ClassifyError::AmbiguousRoot(format!(
                "{} saturated cycles meet the root candidate",
                relevant.len()
            )));
        }
        for mask in 0u32..(1 << relevant.len()) {
            let mut c = f.clone();
            for (j, &i) in relevant.iter().enumerate() {
                if mask >> j & 1 == 1 {
                    c.xor(&sat_bits[i]);
                }
            }
            consider(c, &mut best, &mut tie);
        }
        if tie {
            return Err(ClassifyError::AmbiguousRoot(
                "two candidates use equally many saturated arrows".into(),
            ));
        }
    }
    let root = best.map(|(_, c)| walk_root(ix, &c));
    if root.is_none() {
        return Err(ClassifyError::AmbiguousRoot("no simple root candidate".into()));
    }
    Ok(Structure { sats, others, root })
}

fn rotate_to_least(c: &[usize]) -> Vec<usize> {
    let i = (0..c.len()).min_by_key(|&i| c[i]).unwrap_or(0);
    c[i..].iter().chain(&c[..i]).copied().collect()
}

pub fn classify_cycles(q: &BoundQuiver) -> Result<CycleReport, ClassifyError> {
    if let Some(v) = validate_gentle(q).violations.first() {
        return Err(ClassifyError::NotGentle(v.to_string()));
    }
    let ix = q.index();
    let st = structure(q, &ix)?;
    Ok(report(&ix, &st))
}

pub(crate) fn report(ix: &Ix, st: &Structure) -> CycleReport {
    let mut dir: HashMap<usize, bool> = HashMap::new();
    if let Some(r) = &st.root {
        for &(a, f) in r {
            dir.insert(a, f);
        }
    }
    let names = |c: &[usize]| -> Vec<String> { rotate_to_least(c).iter().map(|&a| ix.anames[a].clone()).collect() };
    CycleReport {
        root_cycle: st.root.as_ref().map(|r| {
            r.iter()
                .map(|&(a, f)| RootArrow {
                    arrow: ix.anames[a].clone(),
                    forward: f,
                })
                .collect()
        }),
        saturated_cycles: st
            .sats
            .iter()
            .map(|c| {
                let shared: Vec<bool> = c.iter().filter_map(|a| dir.get(a).copied()).collect();
                let orientation = match shared.first() {
                    None => Orientation::Detached,
                    Some(true) => Orientation::Clockwise,
                    Some(false) => Orientation::Counterclockwise,
                };
                SaturatedCycle {
                    arrows: names(c),
                    orientation,
                    shared: shared.len(),
                }
            })
            .collect(),
        other_relation_cycles: st.others.iter().map(|c| names(c)).collect(),
    }
}
