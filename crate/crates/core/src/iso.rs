//! Isomorphism of bound quivers: colour refinement, then backtracking over arrows.
//! The parameter `m` is not compared.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, HashMap};
use std::hash::{Hash, Hasher};

use crate::quiver::{BoundQuiver, Ix};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Isomorphism {
    pub vertices: BTreeMap<String, String>,
    pub arrows: BTreeMap<String, String>,
}

fn h<T: Hash>(x: T) -> u64 {
    let mut s = DefaultHasher::new();
    x.hash(&mut s);
    s.finish()
}

struct Colours {
    v: Vec<u64>,
    a: Vec<u64>,
}

fn refine_step(ix: &Ix, c: &Colours) -> Colours {
    let rel_next = ix.next_map(true);
    let mut rel_prev = vec![None; ix.na()];
    for (a, n) in rel_next.iter().enumerate() {
        if let Some(b) = n {
            rel_prev[*b] = Some(a);
        }
    }
    let a: Vec<u64> = (0..ix.na())
        .map(|x| {
            h((
                c.a[x],
                c.v[ix.src[x]],
                c.v[ix.tgt[x]],
                rel_next[x].map(|y| c.a[y]),
                rel_prev[x].map(|y| c.a[y]),
            ))
        })
        .collect();
    let v: Vec<u64> = (0..ix.nv())
        .map(|x| {
            let mut o: Vec<u64> = ix.outs[x].iter().map(|&y| a[y]).collect();
            let mut i: Vec<u64> = ix.ins[x].iter().map(|&y| a[y]).collect();
            o.sort_unstable();
            i.sort_unstable();
            h((c.v[x], o, i))
        })
        .collect();
    Colours { v, a }
}

fn histogram(c: &Colours) -> (Vec<u64>, Vec<u64>) {
    let mut v = c.v.clone();
    let mut a = c.a.clone();
    v.sort_unstable();
    a.sort_unstable();
    (v, a)
}

fn classes(c: &Colours) -> usize {
    let mut v = c.v.clone();
    v.sort_unstable();
    v.dedup();
    let mut a = c.a.clone();
    a.sort_unstable();
    a.dedup();
    v.len() + a.len()
}

/// Refine both quivers in lockstep; `None` as soon as the histograms differ.
fn joint_colours(x: &Ix, y: &Ix) -> Option<(Colours, Colours)> {
    let init = |ix: &Ix| Colours {
        v: (0..ix.nv()).map(|v| h((ix.ins[v].len(), ix.outs[v].len()))).collect(),
        a: vec![0; ix.na()],
    };
    let (mut cx, mut cy) = (init(x), init(y));
    let mut prev = 0;
    loop {
        if histogram(&cx) != histogram(&cy) {
            return None;
        }
        let n = classes(&cx);
        if n == prev {
            return Some((cx, cy));
        }
        prev = n;
        cx = refine_step(x, &cx);
        cy = refine_step(y, &cy);
    }
}

struct Search<'a> {
    x: &'a Ix,
    y: &'a Ix,
    cx: &'a Colours,
    cy: &'a Colours,
    order: Vec<usize>,
    amap: Vec<Option<usize>>,
    aused: Vec<bool>,
    vmap: Vec<Option<usize>>,
    vused: Vec<bool>,
}

impl Search<'_> {
    fn compatible(&self, a: usize, b: usize) -> bool {
        if self.cx.a[a] != self.cy.a[b] || self.aused[b] {
            return false;
        }
        for (va, vb) in [(self.x.src[a], self.y.src[b]), (self.x.tgt[a], self.y.tgt[b])] {
            match self.vmap[va] {
                Some(w) if w != vb => return false,
                None if self.vused[vb] => return false,
                _ => {}
            }
        }
        if (self.x.src[a] == self.x.tgt[a]) != (self.y.src[b] == self.y.tgt[b]) {
            return false;
        }
        // relations with already mapped arrows
        for (c, img) in self.amap.iter().enumerate() {
            if let Some(d) = *img {
                if self.x.is_rel(a, c) != self.y.is_rel(b, d) || self.x.is_rel(c, a) != self.y.is_rel(d, b) {
                    return false;
                }
            }
        }
        true
    }

    fn go(&mut self, k: usize) -> bool {
        if k == self.order.len() {
            return true;
        }
        let a = self.order[k];
        for b in 0..self.y.na() {
            if !self.compatible(a, b) {
                continue;
            }
            let (s, t) = (self.x.src[a], self.x.tgt[a]);
            let fresh: Vec<usize> = [s, t].into_iter().filter(|&v| self.vmap[v].is_none()).collect();
            self.amap[a] = Some(b);
            self.aused[b] = true;
            self.vmap[s] = Some(self.y.src[b]);
            self.vused[self.y.src[b]] = true;
            self.vmap[t] = Some(self.y.tgt[b]);
            self.vused[self.y.tgt[b]] = true;
            if self.go(k + 1) {
                return true;
            }
            self.amap[a] = None;
            self.aused[b] = false;
            for v in fresh {
                let w = self.vmap[v].take().unwrap();
                self.vused[w] = false;
            }
        }
        false
    }
}

/// Arrows in BFS order over the line graph, so each arrow after the first of
/// a component touches an already placed vertex.
fn arrow_order(ix: &Ix) -> Vec<usize> {
    let mut placed = vec![false; ix.na()];
    let mut seen_v = vec![false; ix.nv()];
    let mut order = Vec::with_capacity(ix.na());
    for start in 0..ix.nv() {
        if seen_v[start] {
            continue;
        }
        seen_v[start] = true;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &a in ix.outs[v].iter().chain(&ix.ins[v]) {
                if placed[a] {
                    continue;
                }
                placed[a] = true;
                order.push(a);
                for w in [ix.src[a], ix.tgt[a]] {
                    if !seen_v[w] {
                        seen_v[w] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
    }
    order
}

pub fn isomorphic(q1: &BoundQuiver, q2: &BoundQuiver) -> Option<Isomorphism> {
    if q1.vertex_count() != q2.vertex_count()
        || q1.arrow_count() != q2.arrow_count()
        || q1.relation_count() != q2.relation_count()
    {
        return None;
    }
    let (x, y) = (q1.index(), q2.index());
    let (cx, cy) = joint_colours(&x, &y)?;
    let mut s = Search {
        x: &x,
        y: &y,
        cx: &cx,
        cy: &cy,
        order: arrow_order(&x),
        amap: vec![None; x.na()],
        aused: vec![false; y.na()],
        vmap: vec![None; x.nv()],
        vused: vec![false; y.nv()],
    };
    if !s.go(0) {
        return None;
    }
    // vertices without arrows: pair them up in order
    let mut spare: Vec<usize> = (0..y.nv()).filter(|&w| !s.vused[w]).collect();
    spare.reverse();
    let mut vertices = BTreeMap::new();
    for v in 0..x.nv() {
        let w = match s.vmap[v] {
            Some(w) => w,
            None => spare.pop()?,
        };
        vertices.insert(x.vnames[v].clone(), y.vnames[w].clone());
    }
    let arrows = (0..x.na())
        .map(|a| (x.anames[a].clone(), y.anames[s.amap[a].unwrap()].clone()))
        .collect();
    Some(Isomorphism { vertices, arrows })
}

/// Rename `q` with fresh names derived from a permutation seed; handy for tests.
pub fn shuffled_copy(q: &BoundQuiver, perm_seed: u64) -> BoundQuiver {
    let mut vnames: Vec<&str> = q.vertices().collect();
    let mut anames: Vec<&str> = q.arrow_ids().collect();
    let key = |s: &str| h((s, perm_seed));
    vnames.sort_by_key(|s| key(s));
    anames.sort_by_key(|s| key(s));
    let vmap: HashMap<String, String> = vnames
        .iter()
        .enumerate()
        .map(|(i, v)| (v.to_string(), format!("v{i}")))
        .collect();
    let amap: HashMap<String, String> = anames
        .iter()
        .enumerate()
        .map(|(i, a)| (a.to_string(), format!("x{i}")))
        .collect();
    q.renamed(&vmap, &amap).expect("fresh names are valid and distinct")
}
