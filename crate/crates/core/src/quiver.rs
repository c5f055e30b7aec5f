//! Bound quivers with quadratic monomial relations.
//!
//! A relation `(a, b)` always means the path "first `a`, then `b`"; it requires
//! `target(a) == source(b)`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuiverError {
    #[error("invalid identifier {0:?}")]
    BadIdent(String),
    #[error("m must be positive")]
    ZeroM,
    #[error("duplicate vertex {0}")]
    DuplicateVertex(String),
    #[error("duplicate arrow {0}")]
    DuplicateArrow(String),
    #[error("duplicate relation {0} {1}")]
    DuplicateRelation(String, String),
    #[error("undeclared vertex {0}")]
    UndeclaredVertex(String),
    #[error("undeclared arrow {0}")]
    UndeclaredArrow(String),
    #[error("relation path does not compose: target({0}) != source({1})")]
    NotComposable(String, String),
}

pub fn is_ident(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Arrow {
    pub id: String,
    pub source: String,
    pub target: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Relation {
    pub first: String,
    pub second: String,
}

/// Quiver, relations and the cluster parameter `m`.
///
/// Storage is ordered, so iteration (and therefore every derived computation)
/// is deterministic.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BoundQuiver {
    m: u32,
    vertices: BTreeSet<String>,
    arrows: BTreeMap<String, (String, String)>,
    relations: BTreeSet<(String, String)>,
}

impl BoundQuiver {
    pub fn new(m: u32) -> Result<Self, QuiverError> {
        if m == 0 {
            return Err(QuiverError::ZeroM);
        }
        Ok(BoundQuiver {
            m,
            vertices: BTreeSet::new(),
            arrows: BTreeMap::new(),
            relations: BTreeSet::new(),
        })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn set_m(&mut self, m: u32) -> Result<(), QuiverError> {
        if m == 0 {
            return Err(QuiverError::ZeroM);
        }
        self.m = m;
        Ok(())
    }

    pub fn add_vertex(&mut self, v: &str) -> Result<(), QuiverError> {
        if !is_ident(v) {
            return Err(QuiverError::BadIdent(v.to_string()));
        }
        if !self.vertices.insert(v.to_string()) {
            return Err(QuiverError::DuplicateVertex(v.to_string()));
        }
        Ok(())
    }

    pub fn add_arrow(&mut self, id: &str, source: &str, target: &str) -> Result<(), QuiverError> {
        if !is_ident(id) {
            return Err(QuiverError::BadIdent(id.to_string()));
        }
        for v in [source, target] {
            if !self.vertices.contains(v) {
                return Err(QuiverError::UndeclaredVertex(v.to_string()));
            }
        }
        if self.arrows.contains_key(id) {
            return Err(QuiverError::DuplicateArrow(id.to_string()));
        }
        self.arrows
            .insert(id.to_string(), (source.to_string(), target.to_string()));
        Ok(())
    }

    pub fn add_relation(&mut self, first: &str, second: &str) -> Result<(), QuiverError> {
        let (_, t) = self
            .arrows
            .get(first)
            .ok_or_else(|| QuiverError::UndeclaredArrow(first.to_string()))?;
        let (s, _) = self
            .arrows
            .get(second)
            .ok_or_else(|| QuiverError::UndeclaredArrow(second.to_string()))?;
        if t != s {
            return Err(QuiverError::NotComposable(first.to_string(), second.to_string()));
        }
        if !self.relations.insert((first.to_string(), second.to_string())) {
            return Err(QuiverError::DuplicateRelation(first.to_string(), second.to_string()));
        }
        Ok(())
    }

    pub fn vertices(&self) -> impl Iterator<Item = &str> {
        self.vertices.iter().map(String::as_str)
    }

    pub fn arrows(&self) -> impl Iterator<Item = Arrow> + '_ {
        self.arrows.iter().map(|(id, (s, t))| Arrow {
            id: id.clone(),
            source: s.clone(),
            target: t.clone(),
        })
    }

    pub fn arrow_ids(&self) -> impl Iterator<Item = &str> {
        self.arrows.keys().map(String::as_str)
    }

    pub fn relations(&self) -> impl Iterator<Item = (&str, &str)> {
        self.relations.iter().map(|(a, b)| (a.as_str(), b.as_str()))
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn relation_count(&self) -> usize {
        self.relations.len()
    }

    pub fn has_vertex(&self, v: &str) -> bool {
        self.vertices.contains(v)
    }

    pub fn endpoints(&self, arrow: &str) -> Option<(&str, &str)> {
        self.arrows.get(arrow).map(|(s, t)| (s.as_str(), t.as_str()))
    }

    pub fn source(&self, arrow: &str) -> Option<&str> {
        self.endpoints(arrow).map(|e| e.0)
    }

    pub fn target(&self, arrow: &str) -> Option<&str> {
        self.endpoints(arrow).map(|e| e.1)
    }

    pub fn is_relation(&self, first: &str, second: &str) -> bool {
        self.relations.contains(&(first.to_string(), second.to_string()))
    }

    /// Out-arrows of `v`, sorted by id.
    pub fn out_arrows(&self, v: &str) -> Vec<&str> {
        self.arrows
            .iter()
            .filter(|(_, (s, _))| s == v)
            .map(|(id, _)| id.as_str())
            .collect()
    }

    /// In-arrows of `v`, sorted by id.
    pub fn in_arrows(&self, v: &str) -> Vec<&str> {
        self.arrows
            .iter()
            .filter(|(_, (_, t))| t == v)
            .map(|(id, _)| id.as_str())
            .collect()
    }

    /// The opposite bound quiver: every arrow reversed, every relation read backwards.
    pub fn opposite(&self) -> BoundQuiver {
        BoundQuiver {
            m: self.m,
            vertices: self.vertices.clone(),
            arrows: self
                .arrows
                .iter()
                .map(|(id, (s, t))| (id.clone(), (t.clone(), s.clone())))
                .collect(),
            relations: self.relations.iter().map(|(a, b)| (b.clone(), a.clone())).collect(),
        }
    }

    /// Rename vertices and arrows. Names missing from the maps are kept.
    pub fn renamed(
        &self,
        vmap: &HashMap<String, String>,
        amap: &HashMap<String, String>,
    ) -> Result<BoundQuiver, QuiverError> {
        let v = |x: &String| vmap.get(x).unwrap_or(x).clone();
        let a = |x: &String| amap.get(x).unwrap_or(x).clone();
        let mut q = BoundQuiver::new(self.m)?;
        for x in &self.vertices {
            q.add_vertex(&v(x))?;
        }
        for (id, (s, t)) in &self.arrows {
            q.add_arrow(&a(id), &v(s), &v(t))?;
        }
        for (x, y) in &self.relations {
            q.add_relation(&a(x), &a(y))?;
        }
        Ok(q)
    }

    pub(crate) fn from_parts(
        m: u32,
        vertices: BTreeSet<String>,
        arrows: BTreeMap<String, (String, String)>,
        relations: BTreeSet<(String, String)>,
    ) -> BoundQuiver {
        BoundQuiver {
            m,
            vertices,
            arrows,
            relations,
        }
    }

    pub(crate) fn index(&self) -> Ix {
        Ix::new(self)
    }
}

/// Integer-indexed snapshot used by the algorithms. Vertex and arrow indices follow
/// the sorted order of their identifiers.
#[derive(Debug, Clone)]
pub(crate) struct Ix {
    pub vnames: Vec<String>,
    pub anames: Vec<String>,
    pub src: Vec<usize>,
    pub tgt: Vec<usize>,
    pub outs: Vec<Vec<usize>>,
    pub ins: Vec<Vec<usize>>,
    rel: std::collections::HashSet<(usize, usize)>,
}

impl Ix {
    fn new(q: &BoundQuiver) -> Ix {
        let vnames: Vec<String> = q.vertices.iter().cloned().collect();
        let vpos: HashMap<&str, usize> = vnames.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
        let anames: Vec<String> = q.arrows.keys().cloned().collect();
        let apos: HashMap<&str, usize> = anames.iter().enumerate().map(|(i, a)| (a.as_str(), i)).collect();
        let mut src = Vec::with_capacity(anames.len());
        let mut tgt = Vec::with_capacity(anames.len());
        let mut outs = vec![Vec::new(); vnames.len()];
        let mut ins = vec![Vec::new(); vnames.len()];
        for (i, (s, t)) in q.arrows.values().enumerate() {
            let (s, t) = (vpos[s.as_str()], vpos[t.as_str()]);
            src.push(s);
            tgt.push(t);
            outs[s].push(i);
            ins[t].push(i);
        }
        let rel = q
            .relations
            .iter()
            .map(|(a, b)| (apos[a.as_str()], apos[b.as_str()]))
            .collect();
        Ix {
            vnames,
            anames,
            src,
            tgt,
            outs,
            ins,
            rel,
        }
    }

    pub fn nv(&self) -> usize {
        self.vnames.len()
    }

    pub fn na(&self) -> usize {
        self.anames.len()
    }

    pub fn is_rel(&self, a: usize, b: usize) -> bool {
        self.rel.contains(&(a, b))
    }

    /// Arrows `b` leaving `target(a)` whose composition with `a` is (or is not) a relation.
    pub fn succ(&self, a: usize, related: bool) -> impl Iterator<Item = usize> + '_ {
        self.outs[self.tgt[a]]
            .iter()
            .copied()
            .filter(move |&b| self.is_rel(a, b) == related)
    }

    pub fn pred(&self, b: usize, related: bool) -> impl Iterator<Item = usize> + '_ {
        self.ins[self.src[b]]
            .iter()
            .copied()
            .filter(move |&a| self.is_rel(a, b) == related)
    }

    /// Successor partial map along (non-)relation compositions. Only meaningful on
    /// gentle input where it is injective; extra candidates are ignored.
    pub fn next_map(&self, related: bool) -> Vec<Option<usize>> {
        (0..self.na()).map(|a| self.succ(a, related).next()).collect()
    }
}

/// Wire form shared by the CLI and the HTTP service.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuiverJson {
    pub m: u32,
    pub vertices: Vec<String>,
    pub arrows: Vec<Arrow>,
    pub relations: Vec<Relation>,
}

impl From<&BoundQuiver> for QuiverJson {
    fn from(q: &BoundQuiver) -> Self {
        QuiverJson {
            m: q.m,
            vertices: q.vertices.iter().cloned().collect(),
            arrows: q.arrows().collect(),
            relations: q
                .relations
                .iter()
                .map(|(a, b)| Relation {
                    first: a.clone(),
                    second: b.clone(),
                })
                .collect(),
        }
    }
}

impl TryFrom<QuiverJson> for BoundQuiver {
    type Error = QuiverError;

    fn try_from(j: QuiverJson) -> Result<Self, QuiverError> {
        let mut q = BoundQuiver::new(j.m)?;
        for v in &j.vertices {
            q.add_vertex(v)?;
        }
        for a in &j.arrows {
            q.add_arrow(&a.id, &a.source, &a.target)?;
        }
        for r in &j.relations {
            q.add_relation(&r.first, &r.second)?;
        }
        Ok(q)
    }
}

impl Serialize for BoundQuiver {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        QuiverJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for BoundQuiver {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = QuiverJson::deserialize(d)?;
        BoundQuiver::try_from(j).map_err(serde::de::Error::custom)
    }
}
