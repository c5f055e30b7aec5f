//! Shared test helpers: parameter grids, a random gentle quiver source and a
//! second, sign-free computation of φ used as an oracle.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use quivertilt_core::*;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Valid non-oriented forms with n1+n2 ≤ 10, k1+k2 ≤ 3, |r| ≤ 4 and oriented
/// forms with n+t ≤ 10, k ≤ 3.
pub fn grid(m: u32) -> Vec<NormalFormParams> {
    let mut out = Vec::new();
    for n1 in 1..=9u32 {
        for n2 in 1..=10 - n1 {
            for k1 in 0..=3.min(n1) {
                for k2 in 0..=(3 - k1).min(n2) {
                    for r in -4..=4 {
                        let p = NormalFormParams::nonoriented(n1, k1, n2, k2, r);
                        if p.is_valid(m) {
                            out.push(p);
                        }
                    }
                }
            }
        }
    }
    out.extend(oriented_grid(m));
    out
}

pub fn oriented_grid(m: u32) -> Vec<NormalFormParams> {
    let mut out = Vec::new();
    for k in 0..=3 {
        for n in 0..=10u32 {
            for t in 0..=10 - n {
                let p = NormalFormParams::oriented(k, n, t);
                if p.is_valid(m) {
                    out.push(p);
                }
            }
        }
    }
    out
}

/// φ by the blossoming construction: complete every vertex to two in- and two
/// out-arrows with leaves, so that every thread runs leaf to leaf and each
/// permitted thread is paired with the forbidden thread leaving through the
/// same final arrow. No sign maps are involved.
pub fn oracle_phi(q: &BoundQuiver) -> Option<PhiInvariant> {
    #[derive(Clone)]
    struct A {
        src: usize,
        tgt: usize,
        real: bool,
    }
    let vs: Vec<&str> = q.vertices().collect();
    let vix: HashMap<&str, usize> = vs.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let mut arrows: Vec<A> = Vec::new();
    let mut aix: HashMap<String, usize> = HashMap::new();
    for a in q.arrows() {
        aix.insert(a.id.clone(), arrows.len());
        arrows.push(A {
            src: vix[a.source.as_str()],
            tgt: vix[a.target.as_str()],
            real: true,
        });
    }
    let mut nv = vs.len();
    let mut ins: Vec<Vec<usize>> = vec![Vec::new(); nv];
    let mut outs: Vec<Vec<usize>> = vec![Vec::new(); nv];
    for (i, a) in arrows.iter().enumerate() {
        outs[a.src].push(i);
        ins[a.tgt].push(i);
    }
    if ins.iter().chain(&outs).any(|x| x.len() > 2) {
        return None;
    }
    let rel: std::collections::HashSet<(usize, usize)> = q.relations().map(|(a, b)| (aix[a], aix[b])).collect();
    // relation successor and non-relation successor of every arrow
    let mut rel_next: HashMap<usize, usize> = HashMap::new();
    let mut free_next: HashMap<usize, usize> = HashMap::new();
    for v in 0..vs.len() {
        while ins[v].len() < 2 {
            let leaf = nv;
            nv += 1;
            ins[v].push(arrows.len());
            arrows.push(A {
                src: leaf,
                tgt: v,
                real: false,
            });
        }
        while outs[v].len() < 2 {
            let leaf = nv;
            nv += 1;
            outs[v].push(arrows.len());
            arrows.push(A {
                src: v,
                tgt: leaf,
                real: false,
            });
        }
        let (i, o) = (&ins[v], &outs[v]);
        let fits = |m: [(usize, usize); 2]| {
            let other = [(m[0].0, m[1].1), (m[1].0, m[0].1)];
            m.iter()
                .all(|&(x, y)| !(arrows[x].real && arrows[y].real) || rel.contains(&(x, y)))
                && other.iter().all(|&(x, y)| !rel.contains(&(x, y)))
        };
        let straight = [(i[0], o[0]), (i[1], o[1])];
        let crossed = [(i[0], o[1]), (i[1], o[0])];
        let m = if fits(straight) {
            straight
        } else if fits(crossed) {
            crossed
        } else {
            return None;
        };
        for &(x, y) in &m {
            rel_next.insert(x, y);
        }
        free_next.insert(m[0].0, m[1].1);
        free_next.insert(m[1].0, m[0].1);
    }
    let starts: Vec<usize> = (0..arrows.len())
        .filter(|&a| !arrows[a].real && arrows[a].tgt < vs.len())
        .collect();
    let walk = |start: usize, next: &HashMap<usize, usize>| -> Option<Vec<usize>> {
        let mut path = vec![start];
        let mut cur = start;
        while let Some(&n) = next.get(&cur) {
            path.push(n);
            cur = n;
            if path.len() > arrows.len() + 1 {
                return None;
            }
        }
        Some(path)
    };
    // threads keyed by their first and last (leaf) arrows
    let mut perm_by_first: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut forb_by_last: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut perm_by_last: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut covered_free = std::collections::HashSet::new();
    let mut covered_rel = std::collections::HashSet::new();
    for &s in &starts {
        let p = walk(s, &free_next)?;
        covered_free.extend(p.iter().copied());
        perm_by_first.insert(s, p.clone());
        perm_by_last.insert(*p.last().unwrap(), p);
        let f = walk(s, &rel_next)?;
        covered_rel.extend(f.iter().copied());
        forb_by_last.insert(*f.last().unwrap(), f);
    }
    // a real arrow on no leaf-to-leaf permitted thread lies on a relation-free cycle
    if (0..arrows.len()).any(|a| arrows[a].real && !covered_free.contains(&a)) {
        return None;
    }
    let real_len = |t: &[usize]| t.iter().filter(|&&a| arrows[a].real).count() as u32;

    let mut phi = PhiInvariant::new();
    let mut used = std::collections::HashSet::new();
    let mut keys: Vec<usize> = perm_by_last.keys().copied().collect();
    keys.sort_unstable();
    for k in keys {
        if used.contains(&k) {
            continue;
        }
        let (mut last, mut n, mut len) = (k, 0u32, 0u32);
        loop {
            used.insert(last);
            n += 1;
            let f = forb_by_last.get(&last)?;
            len += real_len(f);
            let h = perm_by_first.get(&f[0])?;
            last = *h.last().unwrap();
            if last == k {
                break;
            }
            if used.contains(&last) {
                return None;
            }
        }
        phi.add(n, len, 1);
    }
    // oriented cycles of relations among real arrows
    let mut seen = std::collections::HashSet::new();
    for a in 0..arrows.len() {
        if !arrows[a].real || covered_rel.contains(&a) || seen.contains(&a) {
            continue;
        }
        let mut c = vec![a];
        seen.insert(a);
        let mut b = rel_next[&a];
        while b != a {
            seen.insert(b);
            c.push(b);
            b = rel_next[&b];
        }
        phi.add(0, c.len() as u32, 1);
    }
    Some(phi)
}

/// A small random connected gentle quiver: a random tree plus a few extra
/// arrows, with relations picked at random among the gentle completions.
pub fn random_gentle(seed: u64, max_vertices: usize, m: u32) -> BoundQuiver {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        if let Some(q) = attempt_gentle(&mut rng, max_vertices, m) {
            return q;
        }
    }
}

fn attempt_gentle(rng: &mut ChaCha8Rng, max_vertices: usize, m: u32) -> Option<BoundQuiver> {
    let n = rng.random_range(2..=max_vertices.max(2));
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut deg_in = vec![0; n];
    let mut deg_out = vec![0; n];
    let mut add = |s: usize, t: usize, edges: &mut Vec<(usize, usize)>| {
        if s != t && deg_out[s] < 2 && deg_in[t] < 2 {
            deg_out[s] += 1;
            deg_in[t] += 1;
            edges.push((s, t));
            true
        } else {
            false
        }
    };
    for v in 1..n {
        let u = rng.random_range(0..v);
        let ok = if rng.random_bool(0.5) {
            add(u, v, &mut edges)
        } else {
            add(v, u, &mut edges)
        };
        if !ok && !add(u, v, &mut edges) && !add(v, u, &mut edges) {
            return None;
        }
    }
    for _ in 0..rng.random_range(0..=n / 2 + 1) {
        let (s, t) = (rng.random_range(0..n), rng.random_range(0..n));
        add(s, t, &mut edges);
    }
    let mut q = BoundQuiver::new(m).ok()?;
    for v in 0..n {
        q.add_vertex(&format!("v{v}")).ok()?;
    }
    for (i, &(s, t)) in edges.iter().enumerate() {
        q.add_arrow(&format!("a{i}"), &format!("v{s}"), &format!("v{t}")).ok()?;
    }
    for v in 0..n {
        let ins: Vec<usize> = (0..edges.len()).filter(|&i| edges[i].1 == v).collect();
        let mut outs: Vec<usize> = (0..edges.len()).filter(|&i| edges[i].0 == v).collect();
        outs.shuffle(rng);
        // a partial matching of ins to outs marks the relations; everything
        // unmatched then composes freely, which keeps G2 and G3
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        let choices: Vec<Vec<(usize, usize)>> = match (ins.len(), outs.len()) {
            (0, _) | (_, 0) => vec![vec![]],
            (1, 1) => vec![vec![], vec![(ins[0], outs[0])]],
            (1, 2) => vec![vec![(ins[0], outs[0])]],
            (2, 1) => vec![vec![(ins[0], outs[0])], vec![(ins[1], outs[0])]],
            _ => vec![
                vec![(ins[0], outs[0]), (ins[1], outs[1])],
                vec![(ins[0], outs[1]), (ins[1], outs[0])],
            ],
        };
        pairs.extend(choices.choose(rng)?.iter().copied());
        for (a, b) in pairs {
            q.add_relation(&format!("a{a}"), &format!("a{b}")).ok()?;
        }
    }
    (is_gentle(&q) && compute_phi(&q).is_ok()).then_some(q)
}

/// Quivers met along random mutation walks from `q`.
pub fn walk(q: &BoundQuiver, steps: usize, seed: u64) -> Vec<BoundQuiver> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![q.clone()];
    let mut cur = q.clone();
    for _ in 0..steps {
        let Some(s) = eligible_steps(&cur).choose(&mut rng).cloned() else {
            break;
        };
        cur = mutate(&cur, &s).expect("eligible step applies");
        out.push(cur.clone());
    }
    out
}

pub fn phi_map(p: &PhiInvariant) -> BTreeMap<(u32, u32), u32> {
    p.pairs().collect()
}
