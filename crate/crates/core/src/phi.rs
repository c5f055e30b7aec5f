//! Permitted and forbidden threads, the σ/ε sign maps, and the
//! Avella-Alaminos–Geiss invariant φ.
//!
//! Trivial threads live at vertices with at most one in-arrow and at most one
//! out-arrow. With `β` the in-arrow and `γ` the out-arrow (when present):
//! - the trivial permitted thread `h_x` exists when `x` lacks `β` or `γ`, or when
//!   `(β, γ)` is not a relation;
//! - the trivial forbidden thread `p_x` exists when `x` lacks `β` or `γ`, or when
//!   `(β, γ)` is a relation.
//!
//! Signs of trivial threads: `h_x` gets `(σ, ε) = (−σ(γ), σ(γ))`, or
//! `(ε(β), −ε(β))` at a sink; `p_x` gets `σ = ε = −σ(γ)`, or `−ε(β)` at a sink.
//! An isolated vertex uses `h = (1, −1)` and `p = (−1, 1)`.
//!
//! With this convention `h_{t(β_0)}` pairs with the forbidden thread `β_0` on
//! Ñ, as in the normal-form thread tables.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gentle::validate_gentle;
use crate::quiver::{BoundQuiver, Ix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PhiError {
    #[error("quiver is not gentle: {0}")]
    NotGentle(String),
    #[error("relation-free oriented cycle through {0:?}: the algebra is not finite dimensional")]
    NotAdmissible(Vec<String>),
    #[error("inconsistent sign constraints at {0}")]
    Inconsistent(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ThreadKind {
    Permitted,
    Forbidden,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ThreadBody {
    Path(Vec<String>),
    Trivial(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Thread {
    pub kind: ThreadKind,
    pub body: ThreadBody,
    pub source: String,
    pub target: String,
}

impl Thread {
    pub fn len(&self) -> usize {
        match &self.body {
            ThreadBody::Path(p) => p.len(),
            ThreadBody::Trivial(_) => 0,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_trivial(&self) -> bool {
        matches!(self.body, ThreadBody::Trivial(_))
    }
}

impl fmt::Display for Thread {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match self.kind {
            ThreadKind::Permitted => "permitted",
            ThreadKind::Forbidden => "forbidden",
        };
        match &self.body {
            ThreadBody::Path(p) => write!(f, "{k} {}", p.join(" ")),
            ThreadBody::Trivial(v) => {
                let t = if self.kind == ThreadKind::Permitted { "h" } else { "p" };
                write!(f, "{k} {t}_{v} (trivial)")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Body {
    Path,
    Trivial(usize),
}

#[derive(Debug, Clone)]
struct IThread {
    arrows: Vec<usize>,
    body: Body,
    src: usize,
    tgt: usize,
}

struct Threads {
    permitted: Vec<IThread>,
    forbidden: Vec<IThread>,
    full_cycles: Vec<Vec<usize>>,
}

/// Maximal chains of a partial injection, plus the cycles it leaves over.
fn chains(next: &[Option<usize>]) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let n = next.len();
    let mut has_prev = vec![false; n];
    for &b in next.iter().flatten() {
        has_prev[b] = true;
    }
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for a in 0..n {
        if has_prev[a] {
            continue;
        }
        let mut c = vec![a];
        seen[a] = true;
        while let Some(b) = next[*c.last().unwrap()] {
            seen[b] = true;
            c.push(b);
        }
        out.push(c);
    }
    let mut cycles = Vec::new();
    for a in 0..n {
        if seen[a] {
            continue;
        }
        let mut c = vec![a];
        seen[a] = true;
        let mut b = next[a].expect("unseen arrow lies on a cycle");
        while !seen[b] {
            seen[b] = true;
            c.push(b);
            b = next[b].expect("unseen arrow lies on a cycle");
        }
        cycles.push(c);
    }
    (out, cycles)
}

fn threads_of(ix: &Ix) -> Result<Threads, PhiError> {
    let (perm, bad) = chains(&ix.next_map(false));
    if let Some(c) = bad.first() {
        return Err(PhiError::NotAdmissible(
            c.iter().map(|&a| ix.anames[a].clone()).collect(),
        ));
    }
    let (forb, full_cycles) = chains(&ix.next_map(true));
    let path = |c: Vec<usize>| IThread {
        src: ix.src[c[0]],
        tgt: ix.tgt[*c.last().unwrap()],
        arrows: c,
        body: Body::Path,
    };
    let mut permitted: Vec<IThread> = perm.into_iter().map(path).collect();
    let mut forbidden: Vec<IThread> = forb.into_iter().map(path).collect();
    for v in 0..ix.nv() {
        let (ins, outs) = (&ix.ins[v], &ix.outs[v]);
        if ins.len() > 1 || outs.len() > 1 {
            continue;
        }
        let passage = !ins.is_empty() && !outs.is_empty();
        let related = passage && ix.is_rel(ins[0], outs[0]);
        let trivial = IThread {
            arrows: Vec::new(),
            body: Body::Trivial(v),
            src: v,
            tgt: v,
        };
        // a passage through a relation is a trivial forbidden thread,
        // any other passage a trivial permitted one
        if !passage || !related {
            permitted.push(trivial.clone());
        }
        if !passage || related {
            forbidden.push(trivial);
        }
    }
    Ok(Threads {
        permitted,
        forbidden,
        full_cycles,
    })
}

fn export(ix: &Ix, t: &IThread, kind: ThreadKind) -> Thread {
    Thread {
        kind,
        body: match t.body {
            Body::Path => ThreadBody::Path(t.arrows.iter().map(|&a| ix.anames[a].clone()).collect()),
            Body::Trivial(v) => ThreadBody::Trivial(ix.vnames[v].clone()),
        },
        source: ix.vnames[t.src].clone(),
        target: ix.vnames[t.tgt].clone(),
    }
}

/// All threads of a gentle quiver.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ThreadSet {
    pub permitted: Vec<Thread>,
    pub forbidden: Vec<Thread>,
    /// Oriented cycles all of whose consecutive compositions are relations.
    /// Their arrows belong to no forbidden thread.
    pub full_relation_cycles: Vec<Vec<String>>,
}

impl ThreadSet {
    pub fn all(&self) -> impl Iterator<Item = &Thread> {
        self.permitted.iter().chain(self.forbidden.iter())
    }
}

pub fn enumerate_threads(q: &BoundQuiver) -> Result<ThreadSet, PhiError> {
    check_gentle(q)?;
    let ix = q.index();
    let th = threads_of(&ix)?;
    Ok(ThreadSet {
        permitted: th
            .permitted
            .iter()
            .map(|t| export(&ix, t, ThreadKind::Permitted))
            .collect(),
        forbidden: th
            .forbidden
            .iter()
            .map(|t| export(&ix, t, ThreadKind::Forbidden))
            .collect(),
        full_relation_cycles: th
            .full_cycles
            .iter()
            .map(|c| c.iter().map(|&a| ix.anames[a].clone()).collect())
            .collect(),
    })
}

fn check_gentle(q: &BoundQuiver) -> Result<(), PhiError> {
    let r = validate_gentle(q);
    match r.violations.first() {
        None => Ok(()),
        Some(v) => Err(PhiError::NotGentle(v.to_string())),
    }
}

/// σ and ε for every arrow.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SignAssignment {
    pub sigma: BTreeMap<String, i8>,
    pub epsilon: BTreeMap<String, i8>,
}

/// Variables are `2a` for σ(a) and `2a + 1` for ε(a); an edge `(y, -1)`
/// says "opposite signs", `(y, 1)` says "same sign".
fn sign_constraints(ix: &Ix) -> Vec<Vec<(usize, i8)>> {
    let mut adj = vec![Vec::new(); 2 * ix.na()];
    let mut comp: Vec<usize> = (0..adj.len()).collect();
    fn find(c: &mut [usize], mut x: usize) -> usize {
        while c[x] != x {
            c[x] = c[c[x]];
            x = c[x];
        }
        x
    }
    let mut link = |x: usize, y: usize, rel: i8, soft: bool| {
        let (rx, ry) = (find(&mut comp, x), find(&mut comp, y));
        if soft && rx == ry {
            return;
        }
        comp[rx] = ry;
        adj[x].push((y, rel));
        adj[y].push((x, rel));
    };
    let mut soft = Vec::new();
    for v in 0..ix.nv() {
        if let [a, b] = ix.outs[v][..] {
            link(2 * a, 2 * b, -1, false);
        }
        if let [a, b] = ix.ins[v][..] {
            link(2 * a + 1, 2 * b + 1, -1, false);
        }
        for &b in &ix.ins[v] {
            for &g in &ix.outs[v] {
                if !ix.is_rel(b, g) {
                    link(2 * b + 1, 2 * g, -1, false);
                }
            }
        }
        if let ([b], [g]) = (&ix.ins[v][..], &ix.outs[v][..]) {
            if ix.is_rel(*b, *g) {
                soft.push((2 * b + 1, 2 * g));
            }
        }
    }
    // The trivial permitted thread at a relation vertex reads its signs off
    // either neighbour. Where nothing else ties σ(g) and ε(b) together, give
    // them the same sign so that flipping one component never strands it.
    for (x, y) in soft {
        link(x, y, 1, true);
    }
    adj
}

fn solve_signs(ix: &Ix, seed: u64) -> Result<Vec<i8>, PhiError> {
    let adj = sign_constraints(ix);
    let mut val = vec![0i8; adj.len()];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for root in 0..adj.len() {
        if val[root] != 0 {
            continue;
        }
        // seed 0 keeps the documented default: +1 on the least variable
        val[root] = if seed == 0 || rng.random_bool(0.5) { 1 } else { -1 };
        let mut stack = vec![root];
        while let Some(x) = stack.pop() {
            for &(y, rel) in &adj[x] {
                if val[y] == 0 {
                    val[y] = rel * val[x];
                    stack.push(y);
                } else if val[y] != rel * val[x] {
                    return Err(PhiError::Inconsistent(ix.anames[y / 2].clone()));
                }
            }
        }
    }
    Ok(val)
}

/// Sign maps by constraint propagation; `seed = 0` is the canonical choice.
pub fn assign_signs(q: &BoundQuiver, seed: u64) -> Result<SignAssignment, PhiError> {
    check_gentle(q)?;
    let ix = q.index();
    let val = solve_signs(&ix, seed)?;
    let mut sigma = BTreeMap::new();
    let mut epsilon = BTreeMap::new();
    for a in 0..ix.na() {
        sigma.insert(ix.anames[a].clone(), val[2 * a]);
        epsilon.insert(ix.anames[a].clone(), val[2 * a + 1]);
    }
    Ok(SignAssignment { sigma, epsilon })
}

/// Finite multiset of pairs `(n, m)`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PhiInvariant(BTreeMap<(u32, u32), u32>);

impl PhiInvariant {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, n: u32, m: u32, count: u32) {
        if count > 0 {
            *self.0.entry((n, m)).or_insert(0) += count;
        }
    }

    pub fn from_triples(t: &[(u32, u32, u32)]) -> Self {
        let mut p = Self::new();
        for &(n, m, c) in t {
            p.add(n, m, c);
        }
        p
    }

    pub fn count(&self, n: u32, m: u32) -> u32 {
        self.0.get(&(n, m)).copied().unwrap_or(0)
    }

    /// Triples in descending order of `(n, m)`.
    pub fn triples(&self) -> Vec<(u32, u32, u32)> {
        self.0.iter().rev().map(|(&(n, m), &c)| (n, m, c)).collect()
    }

    pub fn pairs(&self) -> impl Iterator<Item = ((u32, u32), u32)> + '_ {
        self.0.iter().map(|(&k, &v)| (k, v))
    }

    /// Total multiplicity.
    pub fn size(&self) -> u32 {
        self.0.values().sum()
    }
}

impl fmt::Display for PhiInvariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, m, c) in self.triples() {
            writeln!(f, "{n} {m} {c}")?;
        }
        Ok(())
    }
}

impl Serialize for PhiInvariant {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.triples().serialize(s)
    }
}

impl<'de> Deserialize<'de> for PhiInvariant {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let t = Vec::<(u32, u32, u32)>::deserialize(d)?;
        Ok(Self::from_triples(&t))
    }
}

/// One closed loop of the algorithm: permitted threads visited in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhiLoop {
    pub permitted: Vec<Thread>,
    pub forbidden: Vec<Thread>,
    pub n: u32,
    pub m: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhiRun {
    pub loops: Vec<PhiLoop>,
    pub full_relation_cycles: Vec<Vec<String>>,
    pub phi: PhiInvariant,
}

pub fn compute_phi(q: &BoundQuiver) -> Result<PhiInvariant, PhiError> {
    compute_phi_with_seed(q, 0)
}

pub fn compute_phi_with_seed(q: &BoundQuiver, seed: u64) -> Result<PhiInvariant, PhiError> {
    run_phi(q, seed).map(|r| r.phi)
}

/// The pairing algorithm with its loops exposed.
pub fn run_phi(q: &BoundQuiver, seed: u64) -> Result<PhiRun, PhiError> {
    check_gentle(q)?;
    let ix = q.index();
    let th = threads_of(&ix)?;
    let val = solve_signs(&ix, seed)?;
    let sig = |a: usize| val[2 * a];
    let eps = |a: usize| val[2 * a + 1];

    let out_sign = |v: usize| ix.outs[v].first().map(|&g| sig(g));
    let in_sign = |v: usize| ix.ins[v].first().map(|&b| eps(b));

    // (σ, ε) of a thread
    let perm_signs = |t: &IThread| -> (i8, i8) {
        match t.body {
            Body::Path => (sig(t.arrows[0]), eps(*t.arrows.last().unwrap())),
            Body::Trivial(v) => match (out_sign(v), in_sign(v)) {
                (Some(s), _) => (-s, s),
                (None, Some(e)) => (e, -e),
                (None, None) => (1, -1),
            },
        }
    };
    let forb_signs = |t: &IThread| -> (i8, i8) {
        match t.body {
            Body::Path => (sig(t.arrows[0]), eps(*t.arrows.last().unwrap())),
            Body::Trivial(v) => {
                let s = match (out_sign(v), in_sign(v)) {
                    (Some(s), _) => -s,
                    (None, Some(e)) => -e,
                    (None, None) => return (-1, 1),
                };
                (s, s)
            }
        }
    };

    let psig: Vec<(i8, i8)> = th.permitted.iter().map(perm_signs).collect();
    let fsig: Vec<(i8, i8)> = th.forbidden.iter().map(forb_signs).collect();
    let mut forb_by_end: HashMap<(usize, i8), Vec<usize>> = HashMap::new();
    for (i, t) in th.forbidden.iter().enumerate() {
        forb_by_end.entry((t.tgt, fsig[i].1)).or_default().push(i);
    }
    let mut perm_by_start: HashMap<(usize, i8), Vec<usize>> = HashMap::new();
    for (i, t) in th.permitted.iter().enumerate() {
        perm_by_start.entry((t.src, psig[i].0)).or_default().push(i);
    }
    let unique = |v: Option<&Vec<usize>>, at: usize| -> Result<usize, PhiError> {
        match v.map(Vec::as_slice) {
            Some([x]) => Ok(*x),
            _ => Err(PhiError::Inconsistent(ix.vnames[at].clone())),
        }
    };

    let mut used = vec![false; th.permitted.len()];
    let mut loops = Vec::new();
    let mut phi = PhiInvariant::new();
    for start in 0..th.permitted.len() {
        if used[start] {
            continue;
        }
        let (mut h, mut n, mut len) = (start, 0u32, 0u32);
        let mut lp = PhiLoop {
            permitted: Vec::new(),
            forbidden: Vec::new(),
            n: 0,
            m: 0,
        };
        loop {
            used[h] = true;
            n += 1;
            let ht = &th.permitted[h];
            lp.permitted.push(export(&ix, ht, ThreadKind::Permitted));
            let p = unique(forb_by_end.get(&(ht.tgt, -psig[h].1)), ht.tgt)?;
            let pt = &th.forbidden[p];
            lp.forbidden.push(export(&ix, pt, ThreadKind::Forbidden));
            len += pt.arrows.len() as u32;
            h = unique(perm_by_start.get(&(pt.src, -fsig[p].0)), pt.src)?;
            if h == start {
                break;
            }
            if used[h] {
                return Err(PhiError::Inconsistent(ix.vnames[pt.src].clone()));
            }
        }
        lp.n = n;
        lp.m = len;
        phi.add(n, len, 1);
        loops.push(lp);
    }
    for c in &th.full_cycles {
        phi.add(0, c.len() as u32, 1);
    }
    Ok(PhiRun {
        loops,
        full_relation_cycles: th
            .full_cycles
            .iter()
            .map(|c| c.iter().map(|&a| ix.anames[a].clone()).collect())
            .collect(),
        phi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_quiver;

    fn q(text: &str) -> BoundQuiver {
        parse_quiver(text).unwrap()
    }

    #[test]
    fn single_arrow() {
        let a = q("m=1\nvertex a\nvertex b\narrow f : a -> b\n");
        let t = enumerate_threads(&a).unwrap();
        assert!(t.permitted.iter().any(|t| t.body == ThreadBody::Path(vec!["f".into()])));
        assert!(t.forbidden.iter().any(|t| t.body == ThreadBody::Path(vec!["f".into()])));
        let s = assign_signs(&a, 0).unwrap();
        assert_eq!((s.sigma["f"], s.epsilon["f"]), (1, 1));
        // A_2: a single loop through all three permitted threads
        assert_eq!(compute_phi(&a).unwrap(), PhiInvariant::from_triples(&[(3, 1, 1)]));
    }

    #[test]
    fn shared_source_has_opposite_sigma() {
        let a = q("m=1\nvertex x\nvertex a\nvertex b\narrow f : x -> a\narrow g : x -> b\n");
        let s = assign_signs(&a, 0).unwrap();
        assert_eq!(s.sigma["f"], -s.sigma["g"]);
    }

    #[test]
    fn lone_vertex() {
        let a = q("m=1\nvertex x\n");
        assert_eq!(compute_phi(&a).unwrap(), PhiInvariant::from_triples(&[(1, 0, 1)]));
    }

    #[test]
    fn relation_free_oriented_cycle_is_rejected() {
        let a = q("m=1\nvertex x\nvertex y\narrow f : x -> y\narrow g : y -> x\n");
        assert!(matches!(compute_phi(&a), Err(PhiError::NotAdmissible(_))));
    }

    #[test]
    fn saturated_triangle() {
        let a = q(
            "m=1\nvertex x\nvertex y\nvertex z\narrow f : x -> y\narrow g : y -> z\n\
                   arrow h : z -> x\nrel f g\nrel g h\nrel h f\n",
        );
        let t = enumerate_threads(&a).unwrap();
        assert_eq!(t.full_relation_cycles.len(), 1);
        let phi = compute_phi(&a).unwrap();
        assert_eq!(phi.count(0, 3), 1);
    }

    #[test]
    fn display_is_descending() {
        let p = PhiInvariant::from_triples(&[(0, 4, 7), (11, 2, 1), (7, 2, 1)]);
        assert_eq!(p.to_string(), "11 2 1\n7 2 1\n0 4 7\n");
        let j = serde_json::to_string(&p).unwrap();
        assert_eq!(j, "[[11,2,1],[7,2,1],[0,4,7]]");
        assert_eq!(serde_json::from_str::<PhiInvariant>(&j).unwrap(), p);
    }
}
