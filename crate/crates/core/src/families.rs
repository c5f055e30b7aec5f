//! Normal forms Ñ_{n1,k1,n2,k2,r} and B_{k,n,t}, their closed-form φ,
//! the recognizers, the five classification parameters and the decision rule.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::anatomy::{anatomy, Anatomy, Attachment, Side};
use crate::cycles::ClassifyError;
use crate::iso::isomorphic;
use crate::phi::{compute_phi, PhiInvariant};
use crate::quiver::{BoundQuiver, Ix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("mismatched m: {0} vs {1}")]
    MismatchedM(u32, u32),
    #[error("not in class: {0}")]
    NotInClass(String),
    #[error("m must be positive")]
    ZeroM,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NormalFormParams {
    NonOriented { n1: u32, k1: u32, n2: u32, k2: u32, r: i64 },
    Oriented { k: u32, n: u32, t: u32 },
}

impl fmt::Display for NormalFormParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            NormalFormParams::NonOriented { n1, k1, n2, k2, r } => {
                write!(f, "Ñ_{{{n1},{k1},{n2},{k2},{r}}}")
            }
            NormalFormParams::Oriented { k, n, t } => write!(f, "B_{{{k},{n},{t}}}"),
        }
    }
}

/// ε of the free-arrow bound for `r = α(m−1) + β`; `None` when m = 1.
pub fn epsilon(r: u64, m: u32) -> Option<i64> {
    if m < 2 {
        return None;
    }
    let d = (m - 1) as u64;
    let (a, b) = ((r / d) as i64, r % d);
    Some(if b == 0 { a - 1 } else { a })
}

impl NormalFormParams {
    pub fn nonoriented(n1: u32, k1: u32, n2: u32, k2: u32, r: i64) -> Self {
        NormalFormParams::NonOriented { n1, k1, n2, k2, r }
    }

    pub fn oriented(k: u32, n: u32, t: u32) -> Self {
        NormalFormParams::Oriented { k, n, t }
    }

    /// Plain arrows beyond the relation chain on the side carrying relations.
    pub fn slack(&self) -> i64 {
        match *self {
            NormalFormParams::NonOriented { n1, k1, n2, k2, r } => {
                let side = if r >= 0 {
                    n2 as i64 - k2 as i64
                } else {
                    n1 as i64 - k1 as i64
                };
                side - 1 - r.abs()
            }
            NormalFormParams::Oriented { t, .. } => t as i64,
        }
    }

    pub fn validate(&self, m: u32) -> Result<(), FamilyError> {
        self.check(m, false)
    }

    /// Like [`validate`](Self::validate), but a side may consist of cycle
    /// arrows only (n_i = k_i ≥ 1). Such shapes are reached by reduction from
    /// quivers in class and carry φ entries (x, 0) that no standard form has.
    pub fn validate_generalized(&self, m: u32) -> Result<(), FamilyError> {
        self.check(m, true)
    }

    /// Valid in the generalized sense but not in the standard one.
    pub fn is_generalized(&self, m: u32) -> bool {
        self.validate(m).is_err() && self.validate_generalized(m).is_ok()
    }

    fn check(&self, m: u32, generalized: bool) -> Result<(), FamilyError> {
        if m == 0 {
            return Err(FamilyError::ZeroM);
        }
        let bad = |s: String| Err(FamilyError::InvalidParams(s));
        let least = |k: u32| if generalized { k.max(1) } else { k + 1 };
        match *self {
            NormalFormParams::NonOriented { n1, k1, n2, k2, r } => {
                if n1 < least(k1) {
                    return bad(format!("n1 ≥ {} fails: n1 = {n1}", least(k1)));
                }
                if n2 < least(k2) {
                    return bad(format!("n2 ≥ {} fails: n2 = {n2}", least(k2)));
                }
                let s = self.slack();
                if r != 0 && s < 0 {
                    return bad(format!(
                        "{} relations need {} plain arrows on their side",
                        r.abs(),
                        r.abs() + 1
                    ));
                }
                match epsilon(r.unsigned_abs(), m) {
                    Some(e) if s < e => bad(format!("free-arrow bound s ≥ ε fails: s = {s} < ε = {e}")),
                    Some(_) => Ok(()),
                    None if r < -(k1 as i64) || r > k2 as i64 => bad(format!(
                        "at m = 1 need −k1 ≤ r ≤ k2, got r = {r} with k1 = {k1}, k2 = {k2}"
                    )),
                    None => Ok(()),
                }
            }
            NormalFormParams::Oriented { k, n, t } => {
                if n < 2 {
                    return bad(format!("n ≥ 2 fails: n = {n} (the oriented root needs a relation)"));
                }
                match epsilon((n - 1) as u64, m) {
                    Some(e) if (t as i64) < e => bad(format!("free-arrow bound t ≥ ε fails: t = {t} < ε = {e}")),
                    Some(_) => Ok(()),
                    None if n > k + 1 => bad(format!("at m = 1 need n ≤ k+1, got n = {n}, k = {k}")),
                    None => Ok(()),
                }
            }
        }
    }

    pub fn is_valid(&self, m: u32) -> bool {
        self.validate(m).is_ok()
    }

    pub fn cycle_count(&self) -> u32 {
        match *self {
            NormalFormParams::NonOriented { k1, k2, .. } => k1 + k2,
            NormalFormParams::Oriented { k, .. } => k,
        }
    }

    /// (|Q0|, |Q1|, |I|) of the built quiver.
    pub fn counts(&self, m: u32) -> (usize, usize, usize) {
        let m = m as usize;
        match *self {
            NormalFormParams::NonOriented { n1, k1, n2, k2, r } => {
                let (n1, n2, k) = (n1 as usize, n2 as usize, (k1 + k2) as usize);
                (
                    n1 + n2 + k * m,
                    n1 + n2 + k * (m + 1),
                    r.unsigned_abs() as usize + k * (m + 2),
                )
            }
            NormalFormParams::Oriented { k, n, t } => {
                let (k, n, t) = (k as usize, n as usize, t as usize);
                (n + t + k + k * m, n + t + k * (m + 2), n - 1 + k * (m + 2))
            }
        }
    }
}

fn add(q: &mut BoundQuiver, f: impl FnOnce(&mut BoundQuiver) -> Result<(), crate::QuiverError>) {
    f(q).expect("builder names are fresh and valid");
}

/// Glue an m-saturated cycle onto arrow `e`: arrows `g{tag}_1..g{tag}_{m+1}`
/// through fresh vertices `q{tag}_1..q{tag}_m`, closing back at the source of `e`.
fn add_cycle(q: &mut BoundQuiver, e: &str, tag: &str) {
    let m = q.m() as usize;
    let (u, v) = {
        let (u, v) = q.endpoints(e).expect("arrow exists");
        (u.to_string(), v.to_string())
    };
    let mut prev = v;
    let mut arrows = vec![e.to_string()];
    for i in 1..=m + 1 {
        let next = if i == m + 1 {
            u.clone()
        } else {
            let w = format!("q{tag}_{i}");
            add(q, |q| q.add_vertex(&w));
            w
        };
        let name = format!("g{tag}_{i}");
        add(q, |q| q.add_arrow(&name, &prev, &next));
        arrows.push(name);
        prev = next;
    }
    for i in 0..arrows.len() {
        let (a, b) = (&arrows[i], &arrows[(i + 1) % arrows.len()]);
        add(q, |q| q.add_relation(a, b));
    }
}

/// Build the normal form. Ñ: source `p0`, sink `pT`, clockwise chain `a0..`,
/// counterclockwise chain `b0..`, relations from `p0` on the clockwise side
/// when r > 0 (counterclockwise when r < 0), cycles on the last arrows of each
/// side. B: cycle `a0..a{N-1}` on `p0..`, relations `(a{i-1}, a{i})` for
/// i < n, cycles on the last k arrows.
pub fn build_normal_form(p: &NormalFormParams, m: u32) -> Result<BoundQuiver, FamilyError> {
    p.validate(m)?;
    let rels: Vec<usize> = match *p {
        NormalFormParams::NonOriented { r, .. } => (0..r.unsigned_abs() as usize).collect(),
        NormalFormParams::Oriented { n, .. } => (0..n as usize - 1).collect(),
    };
    build_layout(p, m, &rels)
}

/// Same shape as the normal form, with the relation-carrying chain related at
/// the given positions: `i` stands for the relation between its arrows `i` and
/// `i + 1`. Only the structural bounds are checked.
pub(crate) fn build_layout(p: &NormalFormParams, m: u32, rels: &[usize]) -> Result<BoundQuiver, FamilyError> {
    if m == 0 {
        return Err(FamilyError::ZeroM);
    }
    let mut q = BoundQuiver::new(m).map_err(|_| FamilyError::ZeroM)?;
    let plain = match *p {
        NormalFormParams::NonOriented { n1, k1, n2, k2, r } => {
            if n1 < k1.max(1) || n2 < k2.max(1) {
                return Err(FamilyError::InvalidParams(format!(
                    "{p}: each side needs an arrow, n_i ≥ k_i"
                )));
            }
            if r >= 0 {
                n2 - k2
            } else {
                n1 - k1
            }
        }
        NormalFormParams::Oriented { n, t, .. } => {
            if n == 0 {
                return Err(FamilyError::InvalidParams(format!("{p}: n must be positive")));
            }
            n + t
        }
    };
    if rels.iter().any(|&i| i + 1 >= plain as usize) {
        return Err(FamilyError::InvalidParams(format!(
            "{p}: relations do not fit on {plain} plain arrows"
        )));
    }
    match *p {
        NormalFormParams::NonOriented { n1, k1, n2, k2, r } => {
            add(&mut q, |q| q.add_vertex("p0"));
            add(&mut q, |q| q.add_vertex("pT"));
            let mut fresh = 1;
            let mut chain = |q: &mut BoundQuiver, prefix: &str, n: u32, related: bool| -> Vec<String> {
                let mut cur = "p0".to_string();
                let mut ids = Vec::new();
                for i in 0..n {
                    let next = if i == n - 1 {
                        "pT".to_string()
                    } else {
                        let v = format!("p{fresh}");
                        fresh += 1;
                        add(q, |q| q.add_vertex(&v));
                        v
                    };
                    let id = format!("{prefix}{i}");
                    add(q, |q| q.add_arrow(&id, &cur, &next));
                    ids.push(id);
                    cur = next;
                }
                if related {
                    for &i in rels {
                        add(q, |q| q.add_relation(&ids[i], &ids[i + 1]));
                    }
                }
                ids
            };
            let a = chain(&mut q, "a", n2, r > 0);
            let b = chain(&mut q, "b", n1, r < 0);
            for j in 0..k2 {
                add_cycle(&mut q, &a[(n2 - k2 + j) as usize], &format!("a{j}"));
            }
            for j in 0..k1 {
                add_cycle(&mut q, &b[(n1 - k1 + j) as usize], &format!("b{j}"));
            }
        }
        NormalFormParams::Oriented { k, n, t } => {
            let big_n = n + t + k;
            for i in 0..big_n {
                add(&mut q, |q| q.add_vertex(&format!("p{i}")));
            }
            for i in 0..big_n {
                add(&mut q, |q| {
                    q.add_arrow(&format!("a{i}"), &format!("p{i}"), &format!("p{}", (i + 1) % big_n))
                });
            }
            for &i in rels {
                add(&mut q, |q| q.add_relation(&format!("a{i}"), &format!("a{}", i + 1)));
            }
            for j in 0..k {
                add_cycle(&mut q, &format!("a{}", big_n - 1 - j), &format!("c{j}"));
            }
        }
    }
    Ok(q)
}

/// Build a standard or generalized normal form.
pub fn build_generalized_normal_form(p: &NormalFormParams, m: u32) -> Result<BoundQuiver, FamilyError> {
    p.validate_generalized(m)?;
    let rels: Vec<usize> = match *p {
        NormalFormParams::NonOriented { r, .. } => (0..r.unsigned_abs() as usize).collect(),
        NormalFormParams::Oriented { n, .. } => (0..n as usize - 1).collect(),
    };
    build_layout(p, m, &rels)
}

/// Closed-form φ of a normal form.
pub fn phi_formula(p: &NormalFormParams, m: u32) -> PhiInvariant {
    let m = m as i64;
    let nat = |x: i64| u32::try_from(x.max(0)).unwrap_or(u32::MAX);
    let mut phi = PhiInvariant::new();
    match *p {
        NormalFormParams::NonOriented { n1, k1, n2, k2, r } => {
            let (n1, k1, n2, k2) = (n1 as i64, k1 as i64, n2 as i64, k2 as i64);
            phi.add(nat((m - 1) * k1 + n1 + r), nat(n1 - k1), 1);
            phi.add(nat((m - 1) * k2 + n2 - r), nat(n2 - k2), 1);
            if k1 + k2 > 0 {
                phi.add(0, nat(m + 2), nat(k1 + k2));
            }
        }
        NormalFormParams::Oriented { k, n, t } => {
            let (k, n, t) = (k as i64, n as i64, t as i64);
            phi.add(nat(n - 1), 0, 1);
            phi.add(nat(t + m * k + 1), nat(n + t), 1);
            if k > 0 {
                phi.add(0, nat(m + 2), nat(k));
            }
        }
    }
    phi
}

/// The five classification parameters (with m).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DerivedParams {
    pub s1: u32,
    pub s2: u32,
    pub k1: u32,
    pub k2: u32,
    pub r: i64,
    pub m: u32,
}

impl fmt::Display for DerivedParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "s1={} s2={} k1={} k2={} r={} (m={})",
            self.s1, self.s2, self.k1, self.k2, self.r, self.m
        )
    }
}

impl DerivedParams {
    /// The normal form these parameters describe. A side without any arrows
    /// means the root is oriented; a side with cycle arrows only gives a
    /// generalized form.
    pub fn normal_form(&self) -> NormalFormParams {
        if (self.s1 == 0 && self.k1 == 0) || (self.s2 == 0 && self.k2 == 0) {
            let s = self.s1 + self.s2;
            let n = self.r.unsigned_abs() as u32 + 1;
            NormalFormParams::Oriented {
                k: self.k1 + self.k2,
                n,
                t: s.saturating_sub(n),
            }
        } else {
            NormalFormParams::NonOriented {
                n1: self.s1 + self.k1,
                k1: self.k1,
                n2: self.s2 + self.k2,
                k2: self.k2,
                r: self.r,
            }
        }
    }

    pub fn mirrored(&self) -> Self {
        DerivedParams {
            s1: self.s2,
            s2: self.s1,
            k1: self.k2,
            k2: self.k1,
            r: -self.r,
            m: self.m,
        }
    }

    pub fn of_normal_form(p: &NormalFormParams, m: u32) -> Self {
        match *p {
            NormalFormParams::NonOriented { n1, k1, n2, k2, r } => DerivedParams {
                s1: n1 - k1,
                s2: n2 - k2,
                k1,
                k2,
                r,
                m,
            },
            NormalFormParams::Oriented { k, n, t } => DerivedParams {
                s1: 0,
                s2: n + t,
                k1: 0,
                k2: k,
                r: n as i64 - 1,
                m,
            },
        }
    }
}

/// The classification theorem's conditions, taken literally (no mirror matching).
pub fn decide_derived_equivalent(a: &DerivedParams, b: &DerivedParams) -> Result<bool, FamilyError> {
    if a.m != b.m {
        return Err(FamilyError::MismatchedM(a.m, b.m));
    }
    let m = a.m as i64;
    let dr = a.r - b.r;
    Ok(a.s1 == b.s1
        && a.s2 == b.s2
        && a.k1 + a.k2 == b.k1 + b.k2
        && dr == m * (b.k1 as i64 - a.k1 as i64)
        && dr == m * (a.k2 as i64 - b.k2 as i64))
}

/// Move `x` saturated cycles from the clockwise to the counterclockwise side
/// (negative `x` moves the other way), keeping s1 and s2.
pub fn shift_cycles(p: &NormalFormParams, x: i64, m: u32) -> Result<NormalFormParams, FamilyError> {
    let NormalFormParams::NonOriented { n1, k1, n2, k2, r } = *p else {
        return Err(FamilyError::InvalidParams(
            "shift_cycles needs a non-oriented form".into(),
        ));
    };
    if x > k2 as i64 || x < -(k1 as i64) {
        return Err(FamilyError::InvalidParams(format!(
            "shift {x} outside −k1..=k2 = {}..={k2}",
            -(k1 as i64)
        )));
    }
    let out = NormalFormParams::NonOriented {
        n1: (n1 as i64 + x) as u32,
        k1: (k1 as i64 + x) as u32,
        n2: (n2 as i64 - x) as u32,
        k2: (k2 as i64 - x) as u32,
        r: r - m as i64 * x,
    };
    out.validate(m)?;
    Ok(out)
}

/// Witness for the m = 1 shape (m1+m2)·(0,3) + (p+m1, p) + (q+m2, q).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Bb10Shape {
    pub m1: u32,
    pub m2: u32,
    pub p: u32,
    pub q: u32,
}

pub fn bb10_shape(phi: &PhiInvariant) -> Option<Bb10Shape> {
    let c = phi.count(0, 3);
    let mut rest: Vec<(u32, u32)> = Vec::new();
    for ((n, m), k) in phi.pairs() {
        if (n, m) == (0, 3) {
            continue;
        }
        rest.extend(std::iter::repeat_n((n, m), k as usize));
    }
    if rest.len() != 2 {
        return None;
    }
    rest.sort_unstable_by(|a, b| b.cmp(a));
    let [(x1, p), (x2, q)] = [rest[0], rest[1]];
    if x1 < p || x2 < q {
        return None;
    }
    let (m1, m2) = (x1 - p, x2 - q);
    (m1 + m2 == c && p + m1 > 0 && q + m2 > 0).then_some(Bb10Shape { m1, m2, p, q })
}

#[derive(Debug, Clone, Serialize)]
pub struct CollisionReport {
    pub m: u32,
    pub a: NormalFormParams,
    pub b: NormalFormParams,
    pub phi_a: PhiInvariant,
    pub phi_b: PhiInvariant,
    pub phi_equal: bool,
    pub arrows_a: usize,
    pub arrows_b: usize,
    pub isomorphic: bool,
    /// Whether the classification theorem's equalities hold for the pair.
    pub theorem_conditions_hold: bool,
    /// One shift of saturated cycles carries `a` to `b`.
    pub related_by_shift: bool,
    pub claim: &'static str,
}

impl fmt::Display for CollisionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let line = |p: &PhiInvariant| {
            p.triples()
                .iter()
                .map(|(n, m, c)| format!("({n},{m}):{c}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        writeln!(f, "m = {}", self.m)?;
        writeln!(
            f,
            "A = {}  arrows = {}  φ = {}",
            self.a,
            self.arrows_a,
            line(&self.phi_a)
        )?;
        writeln!(
            f,
            "B = {}  arrows = {}  φ = {}",
            self.b,
            self.arrows_b,
            line(&self.phi_b)
        )?;
        writeln!(f, "φ equal: {}", self.phi_equal)?;
        writeln!(f, "isomorphic: {}", self.isomorphic)?;
        writeln!(f, "classification conditions hold: {}", self.theorem_conditions_hold)?;
        writeln!(f, "related by one cycle shift: {}", self.related_by_shift)?;
        writeln!(f, "non-equivalence claim: {}", self.claim)
    }
}

pub fn phi_collision_demo(m: u32) -> Result<CollisionReport, FamilyError> {
    let a = NormalFormParams::nonoriented(6, 4, 5, 3, 1);
    let b = NormalFormParams::nonoriented(7, 5, 4, 2, -1);
    let qa = build_normal_form(&a, m)?;
    let qb = build_normal_form(&b, m)?;
    let phi_a = compute_phi(&qa).map_err(|e| FamilyError::NotInClass(e.to_string()))?;
    let phi_b = compute_phi(&qb).map_err(|e| FamilyError::NotInClass(e.to_string()))?;
    let da = DerivedParams::of_normal_form(&a, m);
    let db = DerivedParams::of_normal_form(&b, m);
    Ok(CollisionReport {
        m,
        phi_equal: phi_a == phi_b,
        phi_a,
        phi_b,
        arrows_a: qa.arrow_count(),
        arrows_b: qb.arrow_count(),
        isomorphic: isomorphic(&qa, &qb).is_some(),
        theorem_conditions_hold: decide_derived_equivalent(&da, &db)?,
        related_by_shift: shift_cycles(&a, 1, m).ok() == Some(b),
        claim: "asserted, not machine-checked",
        a,
        b,
    })
}

// ---------------------------------------------------------------- recognizers

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionResult {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RecognitionReport {
    pub accepted: bool,
    pub conditions: Vec<ConditionResult>,
}

impl RecognitionReport {
    pub fn first_failure(&self) -> Option<&ConditionResult> {
        self.conditions.iter().find(|c| !c.holds)
    }

    fn build(conds: Vec<(&str, bool, String)>) -> Self {
        let conditions: Vec<ConditionResult> = conds
            .into_iter()
            .map(|(n, h, d)| ConditionResult {
                name: n.to_string(),
                holds: h,
                detail: d,
            })
            .collect();
        RecognitionReport {
            accepted: conditions.iter().all(|c| c.holds),
            conditions,
        }
    }
}

impl fmt::Display for RecognitionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.conditions {
            writeln!(f, "({}) {}: {}", c.name, if c.holds { "ok" } else { "FAIL" }, c.detail)?;
        }
        Ok(())
    }
}

fn with_m(q: &BoundQuiver, m: u32) -> BoundQuiver {
    let mut q = q.clone();
    if m > 0 && q.m() != m {
        q.set_m(m).expect("m > 0");
    }
    q
}

/// (a) and the "other cycles are saturated" part, shared by both recognizers.
fn root_part(q: &BoundQuiver) -> Result<(Ix, Anatomy), String> {
    match anatomy(q) {
        Err(ClassifyError::NotGentle(s)) => Err(format!("not gentle: {s}")),
        Err(ClassifyError::AmbiguousRoot(s)) => Err(format!("no unique non-saturated cycle: {s}")),
        Ok((_, None)) => Err("no non-saturated cycle".into()),
        Ok((_, Some(a))) if a.rel.iter().all(|&r| r) => {
            Err(format!("root cycle of length {} is related all the way round", a.len()))
        }
        Ok((ix, Some(a))) => Ok((ix, a)),
    }
}

fn other_cycles(an: &Anatomy) -> usize {
    an.st
        .others
        .iter()
        .filter(|c| !c.iter().all(|a| an.on_root.contains_key(a)))
        .count()
}

/// Longest chain of consecutive relations not inside one saturated cycle.
fn longest_relation_chain(ix: &Ix, an: &Anatomy) -> Option<usize> {
    let mut sat_of = vec![usize::MAX; ix.na()];
    for (i, c) in an.st.sats.iter().enumerate() {
        for &a in c {
            sat_of[a] = i;
        }
    }
    let outside = |a: usize, b: usize| ix.is_rel(a, b) && !(sat_of[a] != usize::MAX && sat_of[a] == sat_of[b]);
    // relations as nodes; (a,b) -> (b,c)
    let rels: Vec<(usize, usize)> = (0..ix.na())
        .flat_map(|a| ix.succ(a, true).map(move |b| (a, b)))
        .filter(|&(a, b)| outside(a, b))
        .collect();
    let next = |&(_, b): &(usize, usize)| ix.succ(b, true).find(|&c| outside(b, c)).map(|c| (b, c));
    let mut best = 0;
    for r in &rels {
        let mut len = 1;
        let mut cur = *r;
        while let Some(n) = next(&cur) {
            len += 1;
            if len > rels.len() {
                return None;
            }
            cur = n;
        }
        best = best.max(len);
    }
    Some(best)
}

pub fn recognize_m_cluster_tilted(q: &BoundQuiver, m: u32) -> RecognitionReport {
    let q = with_m(q, m);
    let skip = |n: &str| (n.to_string(), false, "not evaluated".to_string());
    let (ix, an) = match root_part(&q) {
        Ok(x) => x,
        Err(e) => {
            let mut v = vec![("a".to_string(), false, e)];
            v.extend(["b", "c", "d", "e"].map(skip));
            return RecognitionReport::build(v.iter().map(|(n, h, d)| (n.as_str(), *h, d.clone())).collect());
        }
    };
    let others = other_cycles(&an);
    let chain = longest_relation_chain(&ix, &an);
    let (cw, ccw) = (an.internal(Side::Clockwise), an.internal(Side::Counterclockwise));
    let oriented = an.is_oriented();
    let mm = m.max(1) as usize;
    RecognitionReport::build(vec![
        ("a", true, format!("root cycle of length {}", an.len())),
        (
            "b",
            others == 0,
            if others == 0 {
                format!("{} further cycles, all {m}-saturated", an.st.sats.len())
            } else {
                format!("{others} full-relation cycles of length ≠ {}", m + 2)
            },
        ),
        (
            "c",
            matches!(chain, Some(c) if c < mm),
            match chain {
                Some(c) => format!(
                    "longest run of consecutive relations outside saturated cycles: {c} (max {})",
                    mm - 1
                ),
                None => "relations close up into a cycle".into(),
            },
        ),
        (
            "d",
            !oriented || cw + ccw > 0,
            if oriented {
                format!("oriented root with {} internal relations", cw + ccw)
            } else {
                "root is not oriented".into()
            },
        ),
        (
            "e",
            cw % mm == ccw % mm,
            format!("clockwise internal relations {cw}, counterclockwise {ccw}"),
        ),
    ])
}

/// Free arrows on one side, counted as in the definition of Ã-branched.
fn free_arrows(an: &Anatomy, side: Side) -> usize {
    let mut in_union_rel = vec![false; an.len()];
    let mut union_rels = 0;
    let mut seen = vec![false; an.len()];
    for ray in &an.rays {
        if let Some(p) = ray.union_internal {
            if Side::of(an.root[p].1) == side && !seen[p] {
                seen[p] = true;
                union_rels += 1;
            }
            in_union_rel[p] = true;
            in_union_rel[(p + 1) % an.len()] = true;
        }
    }
    let sat_arrow = |a: usize| an.st.sats.iter().any(|c| c.contains(&a));
    let root = (0..an.len())
        .filter(|&i| {
            let (a, f) = an.root[i];
            Side::of(f) == side && !in_union_rel[i] && !sat_arrow(a)
        })
        .count();
    let rays: usize = an
        .rays
        .iter()
        .filter(|r| match r.attachment {
            Attachment::Internal(s) => s.other() == side,
            Attachment::External(s) => s == side,
            Attachment::Free(_) => false,
        })
        .map(|r| r.free.len())
        .sum();
    root + union_rels + rays
}

pub fn recognize_branched(q: &BoundQuiver, m: u32) -> RecognitionReport {
    let q = with_m(q, m);
    let (_, an) = match root_part(&q) {
        Ok(x) => x,
        Err(e) => {
            return RecognitionReport::build(vec![
                ("a", false, e),
                ("b", false, "not evaluated".into()),
                ("c", false, "not evaluated".into()),
            ])
        }
    };
    let others = other_cycles(&an);
    let (rh, ra) = (an.internal(Side::Clockwise), an.internal(Side::Counterclockwise));
    let mm = m.max(1) as usize;
    let r = rh.abs_diff(ra);
    let side = if rh > ra {
        Side::Clockwise
    } else {
        Side::Counterclockwise
    };
    let (c_ok, c_detail) = match epsilon(r as u64, m) {
        _ if r == 0 => (true, "no excess of internal relations".to_string()),
        None => (true, "vacuous at m = 1".to_string()),
        Some(e) => {
            let need = r as i64 + 1 + e;
            let have = free_arrows(&an, side) as i64;
            (
                have >= need,
                format!("{have} free {side:?} arrows, need r+1+ε = {need}").to_lowercase(),
            )
        }
    };
    RecognitionReport::build(vec![
        (
            "a",
            others == 0,
            if others == 0 {
                format!("root cycle of length {}, rays carry only saturated cycles", an.len())
            } else {
                format!("{others} full-relation cycles of length ≠ {}", m + 2)
            },
        ),
        (
            "b",
            rh % mm == ra % mm,
            format!("clockwise internal relations {rh}, counterclockwise {ra}"),
        ),
        ("c", c_ok, c_detail),
    ])
}

/// The five parameters read off a quiver in class.
pub fn extract_params(q: &BoundQuiver, m: u32) -> Result<DerivedParams, FamilyError> {
    let q = with_m(q, m);
    let (_, an) = root_part(&q).map_err(FamilyError::NotInClass)?;
    if other_cycles(&an) > 0 {
        return Err(FamilyError::NotInClass("a ray carries a non-saturated cycle".into()));
    }
    let mut s = [0u32; 2];
    let mut k = [0u32; 2];
    let idx = |side: Side| match side {
        Side::Counterclockwise => 0,
        Side::Clockwise => 1,
    };
    let sat_arrow = |a: usize| an.st.sats.iter().any(|c| c.contains(&a));
    for &(a, f) in &an.root {
        if !sat_arrow(a) {
            s[idx(Side::of(f))] += 1;
        }
    }
    for &(_, side) in &an.attached {
        k[idx(side)] += 1;
    }
    for ray in &an.rays {
        let free = ray.free.len() as u32;
        let cycles = ray.cycles.len() as u32;
        match ray.attachment {
            Attachment::Internal(d) => {
                let side = d.other();
                s[idx(side)] += free;
                k[idx(d.other())] += cycles;
            }
            Attachment::External(d) | Attachment::Free(d) => {
                s[idx(d)] += free;
                k[idx(d)] += cycles;
            }
        }
    }
    let r = an.internal(Side::Clockwise) as i64 - an.internal(Side::Counterclockwise) as i64;
    Ok(DerivedParams {
        s1: s[0],
        s2: s[1],
        k1: k[0],
        k2: k[1],
        r,
        m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epsilon_values() {
        assert_eq!(epsilon(0, 2), Some(-1));
        assert_eq!(epsilon(1, 2), Some(0));
        assert_eq!(epsilon(2, 2), Some(1));
        assert_eq!(epsilon(2, 3), Some(0));
        assert_eq!(epsilon(3, 3), Some(1));
        assert_eq!(epsilon(3, 1), None);
    }

    #[test]
    fn counts_match_builder() {
        for (p, m) in [
            (NormalFormParams::nonoriented(6, 4, 5, 3, 1), 2),
            (NormalFormParams::nonoriented(1, 0, 1, 0, 0), 3),
            (NormalFormParams::oriented(1, 2, 3), 2),
        ] {
            let q = build_normal_form(&p, m).unwrap();
            assert_eq!((q.vertex_count(), q.arrow_count(), q.relation_count()), p.counts(m));
        }
        assert_eq!(NormalFormParams::nonoriented(6, 4, 5, 3, 1).counts(2), (25, 32, 29));
        assert_eq!(NormalFormParams::oriented(1, 2, 3).counts(2), (8, 9, 5));
    }

    #[test]
    fn shift_examples() {
        let p = NormalFormParams::nonoriented(6, 4, 5, 3, 1);
        assert_eq!(
            shift_cycles(&p, 1, 2).unwrap(),
            NormalFormParams::nonoriented(7, 5, 4, 2, -1)
        );
        assert_eq!(shift_cycles(&p, 0, 2).unwrap(), p);
        let p = NormalFormParams::nonoriented(2, 1, 2, 1, 3);
        assert_eq!(
            shift_cycles(&p, 1, 3).unwrap(),
            NormalFormParams::nonoriented(3, 2, 1, 0, 0)
        );
    }

    #[test]
    fn bb10_examples() {
        let phi = PhiInvariant::from_triples(&[(1, 1, 2)]);
        assert_eq!(
            bb10_shape(&phi),
            Some(Bb10Shape {
                m1: 0,
                m2: 0,
                p: 1,
                q: 1
            })
        );
        let phi = PhiInvariant::from_triples(&[(0, 3, 2), (3, 1, 1), (2, 2, 1)]);
        assert_eq!(
            bb10_shape(&phi),
            Some(Bb10Shape {
                m1: 2,
                m2: 0,
                p: 1,
                q: 2
            })
        );
        assert_eq!(bb10_shape(&PhiInvariant::from_triples(&[(2, 0, 1)])), None);
    }

    #[test]
    fn decide_examples() {
        let d = |s1, s2, k1, k2, r| DerivedParams {
            s1,
            s2,
            k1,
            k2,
            r,
            m: 2,
        };
        assert!(decide_derived_equivalent(&d(2, 2, 4, 3, 2), &d(2, 2, 4, 3, 2)).unwrap());
        assert!(decide_derived_equivalent(&d(2, 2, 4, 3, 2), &d(2, 2, 5, 2, 0)).unwrap());
        assert!(!decide_derived_equivalent(&d(1, 2, 1, 1, 0), &d(2, 1, 1, 1, 0)).unwrap());
        let mut e = d(1, 1, 0, 0, 0);
        e.m = 3;
        assert_eq!(
            decide_derived_equivalent(&d(1, 1, 0, 0, 0), &e),
            Err(FamilyError::MismatchedM(2, 3))
        );
    }
}
