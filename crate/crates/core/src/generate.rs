//! Random solar Ã-branched quivers, for exercising the reduction.

use std::collections::BTreeSet;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::families::recognize_branched;
use crate::gentle::validate_gentle;
use crate::phi::compute_phi;
use crate::quiver::BoundQuiver;
use crate::reduction::is_solar;

#[derive(Debug, Clone, Copy)]
pub struct SolarConfig {
    pub max_arrows: usize,
    pub max_cycles: usize,
    pub max_root: usize,
}

impl Default for SolarConfig {
    fn default() -> Self {
        SolarConfig {
            max_arrows: 40,
            max_cycles: 3,
            max_root: 7,
        }
    }
}

#[derive(Default)]
struct Draft {
    vertices: Vec<String>,
    arrows: Vec<(String, String, String)>,
    rels: BTreeSet<(String, String)>,
}

impl Draft {
    fn vertex(&mut self, v: String) -> String {
        self.vertices.push(v.clone());
        v
    }

    fn arrow(&mut self, id: String, s: &str, t: &str) -> String {
        self.arrows.push((id.clone(), s.to_string(), t.to_string()));
        id
    }

    fn ends(&self, a: &str) -> (String, String) {
        let (_, s, t) = self.arrows.iter().find(|x| x.0 == a).expect("arrow exists");
        (s.clone(), t.clone())
    }

    /// Saturated cycle closing arrow `e` from its target back to its source.
    fn cycle_on(&mut self, e: &str, tag: &str, m: usize) -> Vec<String> {
        let (u, v) = self.ends(e);
        let mut ids = vec![e.to_string()];
        let mut fresh = Vec::new();
        let mut prev = v;
        for i in 1..=m + 1 {
            let next = if i == m + 1 {
                u.clone()
            } else {
                let w = self.vertex(format!("q{tag}_{i}"));
                fresh.push(w.clone());
                w
            };
            ids.push(self.arrow(format!("g{tag}_{i}"), &prev, &next));
            prev = next;
        }
        self.close(&ids);
        fresh
    }

    /// Saturated cycle through vertex `z`, all arrows new.
    fn cycle_at(&mut self, z: &str, tag: &str, m: usize) -> Vec<String> {
        let mut ids = Vec::new();
        let mut fresh = Vec::new();
        let mut prev = z.to_string();
        for i in 1..=m + 2 {
            let next = if i == m + 2 {
                z.to_string()
            } else {
                let w = self.vertex(format!("z{tag}_{i}"));
                fresh.push(w.clone());
                w
            };
            ids.push(self.arrow(format!("h{tag}_{i}"), &prev, &next));
            prev = next;
        }
        self.close(&ids);
        fresh
    }

    fn close(&mut self, ids: &[String]) {
        for i in 0..ids.len() {
            self.rels.insert((ids[i].clone(), ids[(i + 1) % ids.len()].clone()));
        }
    }

    /// Add relations at every vertex so that the gentle conditions hold
    /// locally, picking at random among the valid completions.
    fn complete(&mut self, rng: &mut impl Rng, keep_linear: &BTreeSet<String>) -> bool {
        for v in self.vertices.clone() {
            let ins: Vec<&String> = self.arrows.iter().filter(|a| a.2 == v).map(|a| &a.0).collect();
            let outs: Vec<&String> = self.arrows.iter().filter(|a| a.1 == v).map(|a| &a.0).collect();
            if ins.len() > 2 || outs.len() > 2 {
                return false;
            }
            if ins.len() == 1 && outs.len() == 1 && keep_linear.contains(&v) {
                continue;
            }
            let pairs: Vec<(String, String)> = ins
                .iter()
                .flat_map(|a| outs.iter().map(move |b| ((*a).clone(), (*b).clone())))
                .collect();
            let fixed: Vec<bool> = pairs.iter().map(|p| self.rels.contains(p)).collect();
            let mut options = Vec::new();
            for mask in 0u32..(1 << pairs.len()) {
                if (0..pairs.len()).any(|i| fixed[i] && mask >> i & 1 == 0) {
                    continue;
                }
                let chosen = |i: usize| mask >> i & 1 == 1;
                let ok = ins.iter().all(|a| {
                    let r = (0..pairs.len()).filter(|&i| &pairs[i].0 == *a && chosen(i)).count();
                    r <= 1 && outs.len() - r <= 1
                }) && outs.iter().all(|b| {
                    let r = (0..pairs.len()).filter(|&i| &pairs[i].1 == *b && chosen(i)).count();
                    r <= 1 && ins.len() - r <= 1
                });
                if ok {
                    options.push(mask);
                }
            }
            let Some(&mask) = options.choose(rng) else {
                return false;
            };
            for (i, p) in pairs.into_iter().enumerate() {
                if mask >> i & 1 == 1 {
                    self.rels.insert(p);
                }
            }
        }
        true
    }

    fn build(&self, m: u32) -> Option<BoundQuiver> {
        let mut q = BoundQuiver::new(m).ok()?;
        for v in &self.vertices {
            q.add_vertex(v).ok()?;
        }
        for (id, s, t) in &self.arrows {
            q.add_arrow(id, s, t).ok()?;
        }
        for (a, b) in &self.rels {
            q.add_relation(a, b).ok()?;
        }
        Some(q)
    }
}

fn attempt(rng: &mut impl Rng, m: u32, cfg: &SolarConfig) -> Option<BoundQuiver> {
    let mu = m as usize;
    let mut d = Draft::default();
    let l = rng.random_range(2..=cfg.max_root.max(2));
    let dirs: Vec<bool> = (0..l).map(|_| rng.random_bool(0.6)).collect();
    let root_v: Vec<String> = (0..l).map(|i| d.vertex(format!("r{i}"))).collect();
    let root_a: Vec<String> = (0..l)
        .map(|i| {
            let (x, y) = (&root_v[i], &root_v[(i + 1) % l]);
            if dirs[i] {
                d.arrow(format!("e{i}"), x, y)
            } else {
                d.arrow(format!("e{i}"), y, x)
            }
        })
        .collect();
    let mut any = false;
    let oriented = dirs.iter().all(|&x| x == dirs[0]);
    for i in 0..l {
        let j = (i + 1) % l;
        if dirs[i] == dirs[j] && rng.random_bool(if oriented { 0.5 } else { 0.35 }) {
            let p = if dirs[i] { (i, j) } else { (j, i) };
            d.rels.insert((root_a[p.0].clone(), root_a[p.1].clone()));
            any = true;
        }
    }
    if oriented && !any {
        let i = rng.random_range(0..l);
        let j = (i + 1) % l;
        let p = if dirs[i] { (i, j) } else { (j, i) };
        d.rels.insert((root_a[p.0].clone(), root_a[p.1].clone()));
    }

    let cycles = rng.random_range(0..=cfg.max_cycles);
    let mut on_ray = 0;
    let mut anchors: Vec<String> = root_v.clone();
    let mut used_arrows = BTreeSet::new();
    for c in 0..cycles {
        if rng.random_bool(0.5) {
            let i = rng.random_range(0..l);
            if used_arrows.insert(i) {
                anchors.extend(d.cycle_on(&root_a[i], &format!("k{c}"), mu));
                continue;
            }
        }
        on_ray += 1;
    }

    let rays = if on_ray > 0 {
        rng.random_range(1..=2)
    } else {
        rng.random_range(0..=2)
    };
    let mut linear = BTreeSet::new();
    for j in 0..rays {
        let mine = if j + 1 == rays {
            on_ray
        } else {
            rng.random_range(0..=on_ray)
        };
        on_ray -= mine;
        let mut cur = anchors.choose(rng)?.clone();
        let tail = rng.random_range(if mine == 0 { 1 } else { 0 }..=3);
        for i in 0..tail {
            let w = d.vertex(format!("y{j}_{i}"));
            if rng.random_bool(0.5) {
                d.arrow(format!("t{j}_{i}"), &cur, &w);
            } else {
                d.arrow(format!("t{j}_{i}"), &w, &cur);
            }
            if i + 1 < tail {
                linear.insert(w.clone());
            }
            cur = w;
        }
        for c in 0..mine {
            let fresh = d.cycle_at(&cur, &format!("{j}_{c}"), mu);
            cur = fresh.choose(rng)?.clone();
        }
    }

    if d.arrows.len() > cfg.max_arrows || !d.complete(rng, &linear) {
        return None;
    }
    let q = d.build(m)?;
    if !validate_gentle(&q).is_ok() || compute_phi(&q).is_err() {
        return None;
    }
    if !recognize_branched(&q, m).accepted || !is_solar(&q, m) {
        return None;
    }
    Some(q)
}

/// A random solar Ã-branched quiver; deterministic in `seed`.
pub fn random_solar(m: u32, seed: u64) -> BoundQuiver {
    random_solar_with(m, seed, &SolarConfig::default())
}

pub fn random_solar_with(m: u32, seed: u64, cfg: &SolarConfig) -> BoundQuiver {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        if let Some(q) = attempt(&mut rng, m, cfg) {
            return q;
        }
    }
}
