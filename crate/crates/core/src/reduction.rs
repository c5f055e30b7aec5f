//! Rewriting to normal form by tilting mutations.
//!
//! Every rewrite strictly decreases a lexicographic measure read off the root
//! anatomy:
//!
//! | component | meaning                                                   | steps |
//! |-----------|-----------------------------------------------------------|-------|
//! | `ray`     | arrows outside the root and the cycles sharing root arrows | 1–3   |
//! | `extra`   | root arrows shared by a saturated cycle, beyond the first | 4     |
//! | `turns`   | direction changes along the root                          | 6     |
//! | `cancel`  | min(clockwise, counterclockwise) internal relations       | 8     |
//! | `ci`      | cycle arrows preceding plain arrows, source to sink       | 5     |
//! | `ri`      | plain gaps preceding related gaps, source to sink         | 7     |
//!
//! A rewrite is found by a best-first search over short mutation sequences for a
//! strictly smaller measure, falling back to a bounded local search around the
//! last mutated vertex. The normal form is reached exactly when the measure is
//! `(0, 0, 0|2, 0, 0, 0)`.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet, VecDeque};
use std::fmt;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::anatomy::{anatomy, anatomy_of, Anatomy, Attachment};
use crate::families::{build_layout, epsilon, recognize_branched, FamilyError, NormalFormParams};
use crate::format::serialize_quiver;
use crate::gentle::validate_gentle;
use crate::iso::isomorphic;
use crate::mutation::{eligible_steps, mutate_unchecked, MutationStep, MutationTrace};
use crate::phi::compute_phi;
use crate::quiver::{BoundQuiver, Ix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("quiver is not gentle: {0}")]
    NotGentle(String),
    #[error("not in class: {0}")]
    NotInClass(String),
    #[error("not branched: {0}")]
    NotBranched(String),
    #[error("stuck at step {step} with measure {measure}")]
    Stuck {
        step: usize,
        measure: String,
        quiver: String,
    },
    #[error("invariant broken at step {step}: {what}")]
    Invariant { step: usize, what: String },
    #[error(transparent)]
    Family(#[from] FamilyError),
}

/// `(ray, extra, turns, cancel, ci, ri)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Measure(pub [usize; 6]);

impl Measure {
    pub fn is_final(&self) -> bool {
        let [ray, extra, turns, cancel, ci, ri] = self.0;
        ray == 0 && extra == 0 && cancel == 0 && ci == 0 && ri == 0 && (turns == 0 || turns == 2)
    }

    /// Index of the leading component that differs.
    fn decreased(&self, after: &Measure) -> usize {
        (0..6).find(|&i| self.0[i] != after.0[i]).unwrap_or(5)
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d, e, g] = self.0;
        write!(f, "(ray {a}, extra {b}, turns {c}, cancel {d}, ci {e}, ri {g})")
    }
}

/// The root read as a cyclic word: direction, cycle flag and related gap per arrow.
struct Word {
    d: Vec<bool>,
    c: Vec<bool>,
    rel: Vec<bool>,
}

fn word(an: &Anatomy) -> Word {
    Word {
        d: an.root.iter().map(|&(_, f)| f).collect(),
        c: an.root.iter().map(|&(a, _)| an.in_attached[a]).collect(),
        rel: an.rel.clone(),
    }
}

impl Word {
    fn len(&self) -> usize {
        self.d.len()
    }

    /// Runs of equal direction, each listed source to sink together with the
    /// related flags of its inner gaps.
    fn runs(&self) -> Vec<(bool, Vec<usize>, Vec<bool>)> {
        let l = self.len();
        let starts: Vec<usize> = (0..l).filter(|&i| self.d[i] != self.d[(i + l - 1) % l]).collect();
        starts
            .into_iter()
            .map(|s| {
                let mut seg = vec![s];
                let mut j = (s + 1) % l;
                while self.d[j] == self.d[s] {
                    seg.push(j);
                    j = (j + 1) % l;
                }
                self.oriented(seg)
            })
            .collect()
    }

    fn oriented(&self, mut seg: Vec<usize>) -> (bool, Vec<usize>, Vec<bool>) {
        let fwd = self.d[seg[0]];
        if !fwd {
            seg.reverse();
        }
        let gaps = (0..seg.len().saturating_sub(1))
            .map(|i| if fwd { self.rel[seg[i]] } else { self.rel[seg[i + 1]] })
            .collect();
        (fwd, seg, gaps)
    }
}

fn run_inversions(cycle: &[bool], gaps: &[bool]) -> (usize, usize) {
    let (mut ci, mut plain_after) = (0, 0);
    for &x in cycle.iter().rev() {
        if x {
            ci += plain_after;
        } else {
            plain_after += 1;
        }
    }
    let (mut ri, mut rel_after) = (0, 0);
    for &g in gaps.iter().rev() {
        if g {
            rel_after += 1;
        } else {
            ri += rel_after;
        }
    }
    (ci, ri)
}

fn word_measure(w: &Word) -> [usize; 4] {
    let l = w.len();
    let turns = (0..l).filter(|&i| w.d[i] != w.d[(i + 1) % l]).count();
    let rp = (0..l).filter(|&i| w.rel[i] && w.d[i]).count();
    let rm = (0..l).filter(|&i| w.rel[i] && !w.d[i]).count();
    let (mut ci, mut ri) = (0, 0);
    if turns == 0 {
        // oriented: best cut point, a related wrap gap costs the full length
        let mut best = None;
        for s in 0..l {
            let seg: Vec<usize> = (0..l).map(|i| (s + i) % l).collect();
            let (fwd, seg, gaps) = w.oriented(seg);
            let wrap = if fwd { w.rel[seg[l - 1]] } else { w.rel[seg[0]] };
            let cyc: Vec<bool> = seg.iter().map(|&i| w.c[i]).collect();
            let (a, b) = run_inversions(&cyc, &gaps);
            let v = (a, b + if wrap { l } else { 0 });
            if best.is_none_or(|x| v < x) {
                best = Some(v);
            }
        }
        (ci, ri) = best.unwrap_or((0, 0));
    } else {
        for (_, seg, gaps) in w.runs() {
            let cyc: Vec<bool> = seg.iter().map(|&i| w.c[i]).collect();
            let (a, b) = run_inversions(&cyc, &gaps);
            ci += a;
            ri += b;
        }
    }
    [turns, rp.min(rm), ci, ri]
}

fn measure_of(ix: &Ix, an: &Anatomy) -> Measure {
    let ray = (0..ix.na())
        .filter(|&a| !an.on_root.contains_key(&a) && !an.in_attached[a])
        .count();
    let extra = an
        .attached
        .iter()
        .map(|&(i, _)| an.st.sats[i].iter().filter(|a| an.on_root.contains_key(a)).count() - 1)
        .sum();
    let [turns, cancel, ci, ri] = word_measure(&word(an));
    Measure([ray, extra, turns, cancel, ci, ri])
}

/// The reduction measure of a gentle quiver with a root; `None` otherwise.
pub fn measure(q: &BoundQuiver) -> Option<Measure> {
    let ix = q.index();
    let an = anatomy_of(q, &ix).ok()??;
    Some(measure_of(&ix, &an))
}

fn neighbours(q: &BoundQuiver) -> impl Iterator<Item = (MutationStep, BoundQuiver)> + '_ {
    eligible_steps(q)
        .into_iter()
        .filter_map(move |s| mutate_unchecked(q, &s).ok().map(|r| (s, r)))
}

/// Best-first search for any state scoring below `target`.
fn best_first<S: Ord + Copy>(
    q: &BoundQuiver,
    target: S,
    score: impl Fn(&BoundQuiver) -> Option<S>,
    budget: usize,
    max_depth: usize,
) -> Option<(Vec<MutationStep>, BoundQuiver, S)> {
    let mut seen: HashSet<BoundQuiver> = HashSet::from([q.clone()]);
    let mut states: Vec<(Vec<MutationStep>, BoundQuiver)> = vec![(Vec::new(), q.clone())];
    let mut heap = BinaryHeap::from([Reverse((target, 0usize))]);
    let mut evaluated = 0;
    while let Some(Reverse((_, id))) = heap.pop() {
        let (path, cur) = states[id].clone();
        if path.len() >= max_depth {
            continue;
        }
        for (step, next) in neighbours(&cur) {
            if !seen.insert(next.clone()) {
                continue;
            }
            evaluated += 1;
            let Some(s) = score(&next) else { continue };
            let mut p = path.clone();
            p.push(step);
            if s < target {
                return Some((p, next, s));
            }
            states.push((p, next));
            heap.push(Reverse((s, states.len() - 1)));
            if evaluated > budget {
                return None;
            }
        }
    }
    None
}

fn near(q: &BoundQuiver, v: &str, radius: usize) -> HashSet<String> {
    let mut adj: HashMap<&str, Vec<&str>> = HashMap::new();
    for a in q.arrows() {
        let (s, t) = q.endpoints(&a.id).unwrap();
        adj.entry(s).or_default().push(t);
        adj.entry(t).or_default().push(s);
    }
    let mut dist: HashMap<String, usize> = HashMap::from([(v.to_string(), 0)]);
    let mut queue = VecDeque::from([v.to_string()]);
    while let Some(u) = queue.pop_front() {
        let d = dist[&u];
        if d >= radius {
            continue;
        }
        for &w in adj.get(u.as_str()).into_iter().flatten() {
            if !dist.contains_key(w) {
                dist.insert(w.to_string(), d + 1);
                queue.push_back(w.to_string());
            }
        }
    }
    dist.into_keys().collect()
}

/// Breadth-first over sequences whose consecutive mutations stay within
/// `radius` of each other.
fn local_search<S: Ord + Copy>(
    q: &BoundQuiver,
    target: S,
    score: impl Fn(&BoundQuiver) -> Option<S>,
    depth: usize,
    radius: usize,
    budget: usize,
) -> Option<(Vec<MutationStep>, BoundQuiver, S)> {
    let mut seen: HashSet<BoundQuiver> = HashSet::from([q.clone()]);
    let mut layer: Vec<(BoundQuiver, Vec<MutationStep>)> = vec![(q.clone(), Vec::new())];
    for _ in 0..depth {
        let mut next_layer = Vec::new();
        for (cur, path) in &layer {
            let allowed = path.last().map(|s| near(cur, &s.vertex, radius));
            for (step, next) in neighbours(cur) {
                if allowed.as_ref().is_some_and(|a| !a.contains(&step.vertex)) {
                    continue;
                }
                if !seen.insert(next.clone()) {
                    continue;
                }
                if seen.len() > budget {
                    return None;
                }
                let Some(s) = score(&next) else { continue };
                let mut p = path.clone();
                p.push(step);
                if s < target {
                    return Some((p, next, s));
                }
                next_layer.push((next, p));
            }
        }
        layer = next_layer;
    }
    None
}

fn improve<S: Ord + Copy>(
    q: &BoundQuiver,
    target: S,
    score: impl Fn(&BoundQuiver) -> Option<S> + Copy,
) -> Option<(Vec<MutationStep>, BoundQuiver, S)> {
    best_first(q, target, score, 3000, 8)
        .or_else(|| local_search(q, target, score, 6, 2, 400_000))
        .or_else(|| best_first(q, target, score, 60_000, 14))
        .or_else(|| kicked(q, target, score))
}

/// Random walks away from a plateau, each followed by a short best-first
/// search. Deterministic: the walks come from a fixed seed.
fn kicked<S: Ord + Copy>(
    q: &BoundQuiver,
    target: S,
    score: impl Fn(&BoundQuiver) -> Option<S> + Copy,
) -> Option<(Vec<MutationStep>, BoundQuiver, S)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for _ in 0..400 {
        let mut cur = q.clone();
        let mut path = Vec::new();
        for _ in 0..rng.random_range(2..=24) {
            let steps = eligible_steps(&cur);
            let Some(step) = steps.choose(&mut rng) else { break };
            let Ok(next) = mutate_unchecked(&cur, step) else {
                continue;
            };
            path.push(step.clone());
            cur = next;
        }
        if let Some((more, next, s)) = best_first(&cur, target, score, 3000, 8) {
            path.extend(more);
            return Some((path, next, s));
        }
    }
    None
}

// ------------------------------------------------------------------- solar

fn bfs_dist(adj: &HashMap<usize, Vec<usize>>, from: usize) -> HashMap<usize, usize> {
    let mut dist = HashMap::from([(from, 0)]);
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        for &w in adj.get(&u).into_iter().flatten() {
            if !dist.contains_key(&w) {
                dist.insert(w, dist[&u] + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// How far the rays are from the canonical shape: a linear tail from the
/// union vertex ending in a chain of saturated cycles glued at vertices.
fn ray_defect(ix: &Ix, an: &Anatomy) -> usize {
    let mut total = 0;
    for ray in &an.rays {
        let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
        for &a in &ray.free {
            adj.entry(ix.src[a]).or_default().push(ix.tgt[a]);
            adj.entry(ix.tgt[a]).or_default().push(ix.src[a]);
        }
        let dist = bfs_dist(&adj, ray.anchor);
        let nf = ray.free.len();
        if ray.cycles.is_empty() {
            let depth = dist.values().copied().max().unwrap_or(0);
            total += nf - depth.min(nf);
            continue;
        }
        let verts = |c: usize| -> HashSet<usize> { an.st.sats[c].iter().map(|&a| ix.src[a]).collect() };
        let cyc_verts: Vec<HashSet<usize>> = ray.cycles.iter().map(|&c| verts(c)).collect();
        let Some((z, d)) = dist
            .iter()
            .filter(|(v, _)| cyc_verts.iter().any(|s| s.contains(v)))
            .map(|(&v, &d)| (v, d))
            .min_by_key(|&(v, d)| (d, v))
        else {
            total += nf + ray.cycles.len();
            continue;
        };
        total += nf - d.min(nf);
        let k = cyc_verts.len();
        let starts: Vec<usize> = (0..k).filter(|&i| cyc_verts[i].contains(&z)).collect();
        if starts.len() > 1 {
            total += 1;
        }
        // longest chain of pairwise glued cycles from a start cycle
        fn longest(i: usize, used: &mut Vec<bool>, cv: &[HashSet<usize>]) -> usize {
            used[i] = true;
            let mut best = 0;
            for j in 0..cv.len() {
                if !used[j] && !cv[i].is_disjoint(&cv[j]) {
                    best = best.max(longest(j, used, cv));
                }
            }
            used[i] = false;
            best + 1
        }
        let chain = starts
            .iter()
            .map(|&s| longest(s, &mut vec![false; k], &cyc_verts))
            .max()
            .unwrap_or(0);
        total += k - chain;
    }
    total
}

fn defect(q: &BoundQuiver) -> Option<usize> {
    let ix = q.index();
    let an = anatomy_of(q, &ix).ok()??;
    if an
        .st
        .others
        .iter()
        .any(|c| !c.iter().all(|a| an.on_root.contains_key(a)))
    {
        return None;
    }
    Some(ray_defect(&ix, &an))
}

/// Whether every ray has the canonical shape. `false` without a root.
pub fn is_solar(q: &BoundQuiver, m: u32) -> bool {
    let q = with_m(q, m);
    validate_gentle(&q).is_ok() && defect(&q) == Some(0)
}

fn with_m(q: &BoundQuiver, m: u32) -> BoundQuiver {
    let mut q = q.clone();
    if m > 0 && q.m() != m {
        q.set_m(m).expect("m > 0");
    }
    q
}

fn check_gentle(q: &BoundQuiver) -> Result<(), ReductionError> {
    match validate_gentle(q).violations.first() {
        Some(v) => Err(ReductionError::NotGentle(v.to_string())),
        None => Ok(()),
    }
}

/// Bring every ray into the canonical shape. Requires the quiver to be
/// Ã-branched unless `generalized` is set.
pub fn solarize(q: &BoundQuiver, m: u32, generalized: bool) -> Result<(BoundQuiver, MutationTrace), ReductionError> {
    let q = with_m(q, m);
    check_gentle(&q)?;
    if !generalized {
        let rep = recognize_branched(&q, m);
        if let Some(c) = rep.first_failure() {
            return Err(ReductionError::NotBranched(format!("({}) {}", c.name, c.detail)));
        }
    }
    let Some(mut cur_defect) = defect(&q) else {
        return Err(ReductionError::NotInClass(
            "no root cycle, or a ray carries a non-saturated cycle".into(),
        ));
    };
    let mut cur = q;
    let mut trace = MutationTrace::new();
    while cur_defect > 0 {
        let Some((path, next, d)) = improve(&cur, cur_defect, defect) else {
            return Err(ReductionError::Stuck {
                step: trace.len(),
                measure: format!("ray defect {cur_defect}"),
                quiver: serialize_quiver(&cur),
            });
        };
        trace.0.extend(path);
        cur = next;
        cur_defect = d;
    }
    Ok((cur, trace))
}

// --------------------------------------------------------------- reduction

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReductionStep {
    /// Step of the eight-step algorithm (0 for ray normalization).
    pub step: u8,
    pub rule: &'static str,
    pub mutations: Vec<MutationStep>,
    pub before: Measure,
    pub after: Measure,
}

impl fmt::Display for ReductionStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ms: Vec<String> = self.mutations.iter().map(|s| s.to_string()).collect();
        write!(
            f,
            "step {} ({}): {} -> {}  [{}]",
            self.step,
            self.rule,
            self.before,
            self.after,
            ms.join(", ")
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Reduction {
    pub params: NormalFormParams,
    /// Solarization followed by the reduction proper.
    pub trace: MutationTrace,
    pub steps: Vec<ReductionStep>,
    #[serde(skip)]
    pub result: BoundQuiver,
}

fn rule_for(component: usize, before: &Anatomy) -> (u8, &'static str) {
    match component {
        0 => {
            let has = |f: fn(&Attachment) -> bool| before.rays.iter().any(|r| f(&r.attachment));
            if has(|a| matches!(a, Attachment::External(_))) {
                (1, "eliminate external union relation")
            } else if has(|a| matches!(a, Attachment::Internal(_))) {
                (2, "absorb ray at internal union relation")
            } else {
                (3, "absorb ray without union relation")
            }
        }
        1 => (4, "gather saturated cycles"),
        2 => (6, "group clockwise arrows"),
        3 => (8, "cancel opposite relations"),
        4 => (5, "group clockwise cycles"),
        _ => (7, "slide relations"),
    }
}

/// Normal-form parameters of a quiver whose measure is final.
fn params_of_final(an: &Anatomy) -> NormalFormParams {
    let w = word(an);
    let l = w.len();
    let count = |f: &dyn Fn(usize) -> bool| (0..l).filter(|&i| f(i)).count() as u32;
    let turns = (0..l).filter(|&i| w.d[i] != w.d[(i + 1) % l]).count();
    if turns == 0 {
        let k = count(&|i| w.c[i]);
        let n = count(&|i| w.rel[i]) + 1;
        NormalFormParams::Oriented {
            k,
            n,
            t: (l as u32).saturating_sub(n + k),
        }
    } else {
        let side = |fwd: bool| {
            (
                count(&|i| w.d[i] == fwd),
                count(&|i| w.d[i] == fwd && w.c[i]),
                count(&|i| w.d[i] == fwd && w.rel[i]) as i64,
            )
        };
        let (n2, k2, rp) = side(true);
        let (n1, k1, rm) = side(false);
        NormalFormParams::NonOriented {
            n1,
            k1,
            n2,
            k2,
            r: rp - rm,
        }
    }
}

fn standard_layout(p: &NormalFormParams) -> Vec<usize> {
    match *p {
        NormalFormParams::NonOriented { r, .. } => (0..r.unsigned_abs() as usize).collect(),
        NormalFormParams::Oriented { n, .. } => (0..n.saturating_sub(1) as usize).collect(),
    }
}

/// Reduce a quiver with a root to normal form. Non-solar input is solarized
/// first; inputs outside the class still reduce to a generalized normal form.
pub fn reduce(q: &BoundQuiver, m: u32) -> Result<Reduction, ReductionError> {
    let q = with_m(q, m);
    check_gentle(&q)?;
    let phi0 = compute_phi(&q).map_err(|e| ReductionError::NotInClass(e.to_string()))?;
    let counts = (q.vertex_count(), q.arrow_count());
    let start = measure(&q);
    let (mut cur, mut trace) = match defect(&q) {
        None => {
            return Err(ReductionError::NotInClass(
                "no root cycle, or a ray carries a non-saturated cycle".into(),
            ))
        }
        Some(0) => (q, MutationTrace::new()),
        Some(_) => solarize(&q, m, true)?,
    };
    let mut steps = Vec::new();
    if !trace.is_empty() {
        steps.push(ReductionStep {
            step: 0,
            rule: "normalize rays",
            mutations: trace.0.clone(),
            before: start.unwrap_or(Measure([0; 6])),
            after: measure(&cur).unwrap_or(Measure([0; 6])),
        });
    }
    loop {
        let ix = cur.index();
        let an = anatomy_of(&cur, &ix)
            .ok()
            .flatten()
            .ok_or_else(|| ReductionError::NotInClass("root lost during reduction".into()))?;
        let mu = measure_of(&ix, &an);
        if mu.is_final() {
            let params = params_of_final(&an);
            let expect = build_layout(&params, m, &standard_layout(&params))?;
            if isomorphic(&expect, &cur).is_none() {
                return Err(ReductionError::Invariant {
                    step: steps.len(),
                    what: format!("final quiver is not isomorphic to {params}"),
                });
            }
            return Ok(Reduction {
                params,
                trace,
                steps,
                result: cur,
            });
        }
        let Some((path, next, after)) = improve(&cur, mu, measure) else {
            return Err(ReductionError::Stuck {
                step: steps.len(),
                measure: mu.to_string(),
                quiver: serialize_quiver(&cur),
            });
        };
        let phi = compute_phi(&next).map_err(|e| ReductionError::Invariant {
            step: steps.len(),
            what: e.to_string(),
        })?;
        if phi != phi0 || (next.vertex_count(), next.arrow_count()) != counts {
            return Err(ReductionError::Invariant {
                step: steps.len(),
                what: "φ or vertex/arrow counts changed".into(),
            });
        }
        let (step, rule) = rule_for(mu.decreased(&after), &an);
        trace.0.extend(path.iter().cloned());
        steps.push(ReductionStep {
            step,
            rule,
            mutations: path,
            before: mu,
            after,
        });
        cur = next;
    }
}

/// Convenience: the root anatomy must exist for reduction to apply.
pub fn has_root(q: &BoundQuiver) -> bool {
    matches!(anatomy(q), Ok((_, Some(_))))
}

// ------------------------------------------------------ cluster-tilted layout

/// A representative with groups of at most m−1 consecutive relations, each
/// group separated from the next by one relation-free gap.
pub fn to_m_cluster_tilted_form(p: &NormalFormParams, m: u32) -> Result<BoundQuiver, FamilyError> {
    p.validate_generalized(m)?;
    let p = match (*p, m) {
        (NormalFormParams::NonOriented { r, .. }, 1) if r != 0 => crate::families::shift_cycles(p, r, 1)?,
        (NormalFormParams::Oriented { .. }, 1) => {
            return Err(FamilyError::NotInClass(format!(
                "{p} has relations outside saturated cycles at m = 1"
            )))
        }
        _ => *p,
    };
    let r = match p {
        NormalFormParams::NonOriented { r, .. } => r.unsigned_abs(),
        NormalFormParams::Oriented { n, .. } => n as u64 - 1,
    };
    if r % m as u64 != 0 {
        return Err(FamilyError::NotInClass(format!(
            "{r} internal relations, not divisible by m = {m}"
        )));
    }
    if r == 0 {
        return build_layout(&p, m, &[]);
    }
    debug_assert!(epsilon(r, m).is_some());
    let per = (m - 1) as usize;
    let mut rels = Vec::new();
    let mut pos = 0;
    let mut left = r as usize;
    while left > 0 {
        let g = left.min(per);
        rels.extend(pos..pos + g);
        pos += g + 1;
        left -= g;
    }
    build_layout(&p, m, &rels)
}
