//! Before/after pictures of the reduction lemmas, transcribed with relations
//! in path order: `(f, g)` means f then g.
#![allow(dead_code)]

use std::collections::BTreeSet;

use quivertilt_core::*;

pub struct Fixture {
    pub name: &'static str,
    pub before: BoundQuiver,
    pub trace: MutationTrace,
    pub after: BoundQuiver,
    /// The right-hand figure uses the same vertex names as the left.
    pub same_names: bool,
}

/// Small drawing kit: arrows are named `s_t`, vertices appear on first use.
pub struct Fig(pub BoundQuiver);

impl Fig {
    pub fn new(m: u32) -> Self {
        Fig(BoundQuiver::new(m).unwrap())
    }

    fn vertex(&mut self, v: &str) {
        if !self.0.has_vertex(v) {
            self.0.add_vertex(v).unwrap();
        }
    }

    pub fn arrow(&mut self, s: &str, t: &str) -> &mut Self {
        self.vertex(s);
        self.vertex(t);
        self.0.add_arrow(&format!("{s}_{t}"), s, t).unwrap();
        self
    }

    /// Arrows along `vs`, no relations.
    pub fn path(&mut self, vs: &[String]) -> &mut Self {
        for w in vs.windows(2) {
            self.arrow(&w[0], &w[1]);
        }
        self
    }

    /// The relation `x → y → z`.
    pub fn rel(&mut self, x: &str, y: &str, z: &str) -> &mut Self {
        self.0.add_relation(&format!("{x}_{y}"), &format!("{y}_{z}")).unwrap();
        self
    }

    /// Arrows along `vs` with every consecutive pair related.
    pub fn chain(&mut self, vs: &[String]) -> &mut Self {
        self.path(vs);
        for w in vs.windows(3) {
            self.rel(&w[0], &w[1], &w[2]);
        }
        self
    }

    /// The saturated cycle `vs[0] → … → vs[last] → vs[0]`.
    pub fn sat(&mut self, vs: &[String]) -> &mut Self {
        assert_eq!(vs.len() as u32, self.0.m() + 2, "saturated cycles have m+2 vertices");
        let mut c = vs.to_vec();
        c.push(vs[0].clone());
        c.push(vs[1].clone());
        self.path(&vs.iter().cloned().chain([vs[0].clone()]).collect::<Vec<_>>());
        for w in c.windows(3) {
            self.rel(&w[0], &w[1], &w[2]);
        }
        self
    }

    pub fn done(&mut self) -> BoundQuiver {
        self.0.clone()
    }
}

pub fn v(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// `p{lo}`, …, `p{hi}`, empty when `lo > hi`.
pub fn seq(p: &str, lo: u32, hi: u32) -> Vec<String> {
    (lo..=hi).map(|i| format!("{p}{i}")).collect()
}

pub fn cat(parts: &[Vec<String>]) -> Vec<String> {
    parts.concat()
}

fn tilts(vs: &[String]) -> Vec<MutationStep> {
    vs.iter().map(|x| MutationStep::tilt(x)).collect()
}

fn cotilts(vs: &[String]) -> Vec<MutationStep> {
    vs.iter().map(|x| MutationStep::cotilt(x)).collect()
}

pub type Labelled = (Vec<(String, String)>, BTreeSet<(String, String, String)>);

/// Arrows as (source, target) and relations as vertex triples.
pub fn labelled(q: &BoundQuiver) -> Labelled {
    let mut arrows: Vec<(String, String)> = q.arrows().map(|a| (a.source, a.target)).collect();
    arrows.sort();
    let rels = q
        .relations()
        .map(|(f, g)| {
            let (s, t) = q.endpoints(f).unwrap();
            (s.to_string(), t.to_string(), q.target(g).unwrap().to_string())
        })
        .collect();
    (arrows, rels)
}

/// Two saturated cycles glued at `c`; cotilting at `c` moves the gluing
/// vertex one step along the first cycle.
pub fn two_saturated_cycles(m: u32) -> Fixture {
    let b = seq("b", 2, m + 2);
    let c = seq("c", 2, m + 2);
    let before = Fig::new(m)
        .sat(&cat(&[v(&["c"]), b.clone()]))
        .sat(&cat(&[v(&["c"]), c.clone()]))
        .done();
    let after = Fig::new(m)
        .sat(&cat(&[v(&["c2", "c"]), b[1..].to_vec()]))
        .sat(&cat(&[v(&["c"]), c[1..].to_vec(), v(&["b2"])]))
        .done();
    Fixture {
        name: "two saturated cycles",
        before,
        trace: MutationTrace(cotilts(&v(&["c"]))),
        after,
        same_names: true,
    }
}

/// Two saturated cycles of a ray joined by the arrow `c → b`, the ray
/// continuing from `c1`. Cotilting at `c` glues the cycles at `b` and leaves
/// `c1 → c` as the start of the linear part.
pub fn ray_normal_form(m: u32) -> Fixture {
    let before = Fig::new(m)
        .sat(&cat(&[v(&["b"]), seq("b", 1, m + 1)]))
        .sat(&cat(&[v(&["c"]), seq("c", 1, m + 1)]))
        .arrow("c", "b")
        .arrow("z", "b1")
        .arrow("c1", "a")
        .done();
    let after = Fig::new(m)
        .sat(&cat(&[v(&["b"]), seq("b", 1, m + 1)]))
        .sat(&cat(&[v(&["b", "c"]), seq("c", 2, m + 1)]))
        .arrow("c1", "c")
        .arrow("z", "b1")
        .arrow("c1", "a")
        .done();
    Fixture {
        name: "ray normal form",
        before,
        trace: MutationTrace(cotilts(&v(&["c"]))),
        after,
        same_names: true,
    }
}

/// An outgoing ray under an external union relation `d → b → c` whose linear
/// part turns back at `γ: p → c1`.
pub fn reversed_arrow_external(m: u32, n: u32) -> Fixture {
    let cs = seq("c", 1, n);
    let mut down: Vec<String> = cs.iter().rev().cloned().collect();
    down.insert(0, "c".into());
    let before = Fig::new(m)
        .arrow("d", "b")
        .arrow("b", "a")
        .arrow("a", "r")
        .arrow("d", "r")
        .path(&cat(&[v(&["b"]), down.clone()]))
        .rel("d", "b", "c")
        .arrow("p", "c1")
        .arrow("p", "e")
        .done();
    let after = Fig::new(m)
        .path(&v(&["d", "c", "b", "a"]))
        .arrow("a", "r")
        .arrow("d", "r")
        .path(&cat(&[down.clone(), v(&["p", "e"])]))
        .rel("d", "c", &format!("c{n}"))
        .done();
    let mut steps = tilts(&cs);
    steps.push(MutationStep::tilt("c"));
    Fixture {
        name: "reversed arrow, external relation",
        before,
        trace: MutationTrace(steps),
        after,
        same_names: true,
    }
}

/// The dual situation: an incoming ray under an internal union relation
/// `x → c → z`, turning back at `γ: cn → p`.
pub fn reversed_arrow_internal(m: u32, n: u32) -> Fixture {
    let cs = seq("c", 1, n);
    let mut up: Vec<String> = cs.iter().rev().cloned().collect();
    up.push("c".into());
    let cn = format!("c{n}");
    let before = Fig::new(m)
        .arrow("r", "x")
        .arrow("r", "z")
        .chain(&v(&["x", "c", "z"]))
        .path(&up)
        .arrow(&cn, "p")
        .arrow("e", "p")
        .done();
    let mut up2: Vec<String> = cs.iter().rev().cloned().collect();
    up2.insert(0, "p".into());
    let after = Fig::new(m)
        .arrow("r", "x")
        .arrow("r", "z")
        .chain(&v(&["x", "c1", "c"]))
        .arrow("z", "c")
        .path(&up2)
        .arrow("e", "p")
        .done();
    let mut steps = cotilts(&up[..n as usize]);
    steps.push(MutationStep::cotilt("c"));
    Fixture {
        name: "reversed arrow, internal relation",
        before,
        trace: MutationTrace(steps),
        after,
        same_names: true,
    }
}

/// An outgoing ray `b → cn → … → c1` under the external relation
/// `a → b → cn` straightens into the root cycle.
pub fn external_without_cycles(m: u32, n: u32) -> Fixture {
    let cs = seq("c", 1, n);
    let down: Vec<String> = cs.iter().rev().cloned().collect();
    let cn = format!("c{n}");
    let before = Fig::new(m)
        .arrow("r", "a")
        .arrow("r", "b1")
        .path(&v(&["a", "b", "b1"]))
        .path(&cat(&[v(&["b"]), down.clone()]))
        .rel("a", "b", &cn)
        .done();
    let after = Fig::new(m)
        .arrow("r", "a")
        .arrow("r", "b1")
        .path(&cat(&[v(&["a"]), down.clone(), v(&["b", "b1"])]))
        .done();
    // cn first, down to c2, then c1
    let mut steps = tilts(&down[..down.len() - 1]);
    steps.push(MutationStep::tilt("c1"));
    Fixture {
        name: "external relation without saturated cycles",
        before,
        trace: MutationTrace(steps),
        after,
        same_names: true,
    }
}

/// The ray is a single saturated cycle through `c` hanging under the
/// external relation `a → b → c`.
pub fn external_with_cycle(m: u32) -> Fixture {
    let cm1 = format!("c{}", m + 1);
    let before = Fig::new(m)
        .arrow("r", "a")
        .arrow("r", "b1")
        .path(&v(&["a", "b", "b1"]))
        .arrow("b", "c")
        .rel("a", "b", "c")
        .sat(&cat(&[v(&["c"]), seq("c", 1, m + 1)]))
        .done();
    let after = Fig::new(m)
        .arrow("r", "a")
        .arrow("r", "b1")
        .path(&v(&["a", &cm1, "c"]))
        .arrow("b", "b1")
        .sat(&cat(&[v(&["c", "b"]), seq("c", 1, m)]))
        .done();
    Fixture {
        name: "external relation, ray with a saturated cycle",
        before,
        trace: MutationTrace(tilts(&v(&["c", &cm1]))),
        after,
        same_names: true,
    }
}

/// A ray with linear part `an → … → a1` and one saturated cycle at `an`,
/// hanging under the internal relation `x → a1 → z`.
pub fn internal_ray(m: u32, n: u32) -> Fixture {
    let a = seq("a", 1, n);
    let an = a[n as usize - 1].clone();
    let an1 = a[n as usize - 2].clone();
    let cm1 = format!("c{}", m + 1);
    let before = Fig::new(m)
        .arrow("r", "x")
        .arrow("r", "z")
        .chain(&v(&["x", "a1", "z"]))
        .path(&a.iter().rev().cloned().collect::<Vec<_>>())
        .sat(&cat(&[vec![an.clone()], seq("c", 1, m + 1)]))
        .done();
    let after = Fig::new(m)
        .arrow("r", "x")
        .arrow("r", "z")
        .arrow("a1", "x")
        .path(&a[..n as usize - 1].iter().rev().cloned().collect::<Vec<_>>())
        .sat(&cat(&[vec![an1.clone()], seq("c", 1, m), vec![an.clone()]]))
        .chain(&v(&[&an, &cm1, "z"]))
        .done();
    Fixture {
        name: "internal relation, ray moves into the root",
        before,
        trace: MutationTrace(tilts(&a)),
        after,
        same_names: true,
    }
}

/// The result of `internal_ray` (with n = 3) carrying a second saturated cycle
/// glued at `cm`; cotilting at `cm` makes it share an arrow with the root.
pub fn internal_second_cycle(m: u32) -> Fixture {
    let cm = format!("c{m}");
    let cm1 = format!("c{}", m + 1);
    let b = seq("b", 2, m + 2);
    let before = Fig::new(m)
        .arrow("r", "x")
        .arrow("r", "z")
        .arrow("a1", "x")
        .arrow("a2", "a1")
        .sat(&cat(&[v(&["a2"]), seq("c", 1, m), v(&["a3"])]))
        .chain(&v(&["a3", &cm1, "z"]))
        .sat(&cat(&[vec![cm.clone()], b.clone()]))
        .done();
    let after = Fig::new(m)
        .arrow("r", "x")
        .arrow("r", "z")
        .arrow("a1", "x")
        .arrow("a2", "a1")
        .sat(&cat(&[v(&["a2"]), seq("c", 1, m - 1), v(&["b2", &cm])]))
        .sat(&cat(&[vec![cm.clone()], b[1..].to_vec(), v(&["a3"])]))
        .chain(&v(&["a3", &cm1, "z"]))
        .done();
    Fixture {
        name: "internal relation, second cycle onto the root",
        before,
        trace: MutationTrace(cotilts(&[cm])),
        after,
        same_names: true,
    }
}

/// A saturated cycle sharing `c → a` with the root cycle carries the ray
/// arrow `b → bm`; cotilting at `b` pulls it into the cycle.
pub fn ray_without_union_relation(m: u32) -> Fixture {
    let bm = format!("b{m}");
    let before = Fig::new(m)
        .arrow("a", "r")
        .arrow("c", "r")
        .sat(&cat(&[v(&["a"]), seq("b", 1, m - 1), v(&["b", "c"])]))
        .arrow("b", &bm)
        .done();
    let after = Fig::new(m)
        .arrow("a", "r")
        .arrow("c", "r")
        .sat(&cat(&[v(&["a"]), seq("b", 1, m), v(&["b"])]))
        .arrow("c", "b")
        .done();
    Fixture {
        name: "ray without union relation",
        before,
        trace: MutationTrace(cotilts(&v(&["b"]))),
        after,
        same_names: true,
    }
}

/// A saturated cycle sharing `ck → … → c1` with the root, preceded by the
/// related path `b(k-1) → … → b1 → c1`; tilting at c1 then c2 moves one
/// shared arrow to the other side.
pub fn cycle_changes_sense(m: u32, k: u32) -> Fixture {
    let bk = format!("b{}", k - 1);
    let ck = format!("c{k}");
    let bs: Vec<String> = seq("b", 1, k - 1).into_iter().rev().collect();
    // ck → … → c1 → c(m+2) → … → c(k+1) → ck
    let mut cyc: Vec<String> = seq("c", 1, k).into_iter().rev().collect();
    cyc.extend(seq("c", k + 1, m + 2).into_iter().rev());
    let before = Fig::new(m)
        .arrow("r", &bk)
        .arrow("r", &ck)
        .chain(&cat(&[bs.clone(), v(&["c1"])]))
        .sat(&cyc)
        .done();
    let mut after_cyc: Vec<String> = seq("c", 3, k).into_iter().rev().collect();
    after_cyc.extend(v(&["c1", "b1"]));
    after_cyc.extend(seq("c", k + 1, m + 2).into_iter().rev());
    let after = Fig::new(m)
        .arrow("r", &bk)
        .arrow("r", &ck)
        .chain(&cat(&[bs[..bs.len() - 1].to_vec(), v(&["c2"])]))
        .arrow("c2", "c1")
        .sat(&after_cyc)
        .done();
    Fixture {
        name: "saturated cycle changes sense",
        before,
        trace: MutationTrace(tilts(&v(&["c1", "c2"]))),
        after,
        same_names: true,
    }
}

/// Two saturated cycles on the root, `C` at `e → c` and `B` at `b → b1`,
/// joined by the root path `c → d → q → b`. The pairs (σ'_{ci} σ'_c) walk the
/// cycle round, and a last σ'_c leaves it sharing `c → d` with the root.
pub fn join_cycles_free_first_arrow(m: u32) -> Fixture {
    let cs = seq("c", 1, m);
    let cm = format!("c{m}");
    let b = cat(&[v(&["b"]), seq("b", 1, m + 1)]);
    let before = Fig::new(m)
        .sat(&cat(&[v(&["e", "c"]), cs.clone()]))
        .path(&v(&["c", "d", "q", "b"]))
        .sat(&b)
        .arrow("e", "r")
        .arrow("b1", "r")
        .done();
    // cm has taken the place of e on the root
    let after = Fig::new(m)
        .arrow(&cm, "c")
        .sat(&cat(&[v(&["c", "d", "e"]), seq("c", 1, m - 1)]))
        .path(&v(&["d", "q", "b"]))
        .sat(&b)
        .arrow(&cm, "r")
        .arrow("b1", "r")
        .done();
    let mut steps = Vec::new();
    for ci in &cs {
        steps.push(MutationStep::cotilt("c"));
        steps.push(MutationStep::cotilt(ci));
    }
    steps.push(MutationStep::cotilt("c"));
    Fixture {
        name: "neighbouring cycles joined, first arrow free",
        before,
        trace: MutationTrace(steps),
        after,
        same_names: false,
    }
}

/// As above with `C` sharing `c → c1` with the root: one cotilt at `c`.
pub fn join_cycles_free_first_arrow_reversed(m: u32) -> Fixture {
    let b = cat(&[v(&["b"]), seq("b", 1, m + 1)]);
    let before = Fig::new(m)
        .sat(&cat(&[v(&["c"]), seq("c", 1, m + 1)]))
        .path(&v(&["c", "d", "b"]))
        .sat(&b)
        .arrow("c1", "r")
        .arrow("b1", "r")
        .done();
    let after = Fig::new(m)
        .arrow("c1", "c")
        .sat(&cat(&[v(&["c"]), seq("c", 2, m + 1), v(&["d"])]))
        .arrow("d", "b")
        .sat(&b)
        .arrow("c1", "r")
        .arrow("b1", "r")
        .done();
    Fixture {
        name: "neighbouring cycles joined, first arrow free (other sense)",
        before,
        trace: MutationTrace(cotilts(&v(&["c"]))),
        after,
        same_names: true,
    }
}

/// A saturated cycle hanging from `b` under the internal relation
/// `a → b → c`, no linear part.
fn bare_cycle_under_internal_relation(m: u32) -> BoundQuiver {
    Fig::new(m)
        .arrow("r", "a")
        .arrow("r", "c")
        .chain(&v(&["a", "b", "c"]))
        .sat(&cat(&[v(&["b"]), seq("b", 1, m + 1)]))
        .done()
}

/// Nothing else related at `a`: tilting at `b` makes the cycle share `b → a`.
pub fn bare_cycle_tilt(m: u32) -> Fixture {
    let bm1 = format!("b{}", m + 1);
    let after = Fig::new(m)
        .arrow("r", "a")
        .arrow("r", "c")
        .chain(&v(&["b", &bm1, "c"]))
        .sat(&cat(&[v(&["b", "a"]), seq("b", 1, m)]))
        .done();
    Fixture {
        name: "cycle without linear part, tilt",
        before: bare_cycle_under_internal_relation(m),
        trace: MutationTrace(tilts(&v(&["b"]))),
        after,
        same_names: true,
    }
}

/// Nothing else related at `c`: cotilting at `b` makes the cycle share `c → b`.
pub fn bare_cycle_cotilt(m: u32) -> Fixture {
    let after = Fig::new(m)
        .arrow("r", "a")
        .arrow("r", "c")
        .chain(&v(&["a", "b1", "b"]))
        .sat(&cat(&[v(&["b"]), seq("b", 2, m + 1), v(&["c"])]))
        .done();
    Fixture {
        name: "cycle without linear part, cotilt",
        before: bare_cycle_under_internal_relation(m),
        trace: MutationTrace(cotilts(&v(&["b"]))),
        after,
        same_names: true,
    }
}

pub fn all(m: u32) -> Vec<Fixture> {
    vec![
        two_saturated_cycles(m),
        ray_normal_form(m),
        reversed_arrow_external(m, 2),
        reversed_arrow_internal(m, 2),
        external_without_cycles(m, 3),
        external_with_cycle(m),
        internal_ray(m, 3),
        internal_second_cycle(m),
        ray_without_union_relation(m),
        cycle_changes_sense(m, m + 1),
        join_cycles_free_first_arrow(m),
        join_cycles_free_first_arrow_reversed(m),
        bare_cycle_tilt(m),
        bare_cycle_cotilt(m),
    ]
}
