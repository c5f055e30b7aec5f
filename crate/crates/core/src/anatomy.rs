//! Decomposition of an algebra with root: root cycle, internal relations,
//! saturated cycles sharing root arrows, and the rays hanging off the root.
//!
//! Directions follow the root traversal of [`crate::cycles`]: an arrow walked
//! forward is clockwise.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::cycles::{structure, ClassifyError, Structure};
use crate::gentle::{validate_gentle, UnionFind};
use crate::quiver::{BoundQuiver, Ix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Clockwise,
    Counterclockwise,
}

impl Side {
    pub(crate) fn of(forward: bool) -> Side {
        if forward {
            Side::Clockwise
        } else {
            Side::Counterclockwise
        }
    }

    pub fn other(self) -> Side {
        match self {
            Side::Clockwise => Side::Counterclockwise,
            Side::Counterclockwise => Side::Clockwise,
        }
    }
}

/// How a ray is tied to the root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Attachment {
    /// A root relation through the union vertex.
    Internal(Side),
    /// A relation between a ray arrow and the root arrow on this side.
    External(Side),
    /// No union relation; the ray hangs off a saturated cycle on this side.
    Free(Side),
}

impl Attachment {
    pub fn side(self) -> Side {
        match self {
            Attachment::Internal(s) | Attachment::External(s) | Attachment::Free(s) => s,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Ray {
    /// Arrows of the ray outside saturated cycles.
    pub free: Vec<usize>,
    /// Indices into `Structure::sats`.
    pub cycles: Vec<usize>,
    /// Vertex where the ray meets the root part.
    pub anchor: usize,
    pub attachment: Attachment,
    /// The internal relation at the union vertex, as a root position.
    pub union_internal: Option<usize>,
}

#[derive(Debug, Clone)]
pub(crate) struct Anatomy {
    pub st: Structure,
    /// Root arrows in traversal order with direction.
    pub root: Vec<(usize, bool)>,
    /// `rel[i]`: root arrows `i` and `i + 1` (cyclically) compose to a relation.
    pub rel: Vec<bool>,
    pub on_root: HashMap<usize, bool>,
    /// Saturated cycles sharing at least one arrow with the root, with the side
    /// of the first shared arrow.
    pub attached: Vec<(usize, Side)>,
    /// `in_attached[a]`: arrow `a` lies in a saturated cycle sharing a root arrow.
    pub in_attached: Vec<bool>,
    pub rays: Vec<Ray>,
}

impl Anatomy {
    pub fn len(&self) -> usize {
        self.root.len()
    }

    pub fn internal(&self, side: Side) -> usize {
        (0..self.len())
            .filter(|&i| self.rel[i] && Side::of(self.root[i].1) == side)
            .count()
    }

    pub fn is_oriented(&self) -> bool {
        let f = self.root[0].1;
        self.root.iter().all(|&(_, g)| g == f)
    }
}

pub(crate) fn anatomy_of(q: &BoundQuiver, ix: &Ix) -> Result<Option<Anatomy>, ClassifyError> {
    let st = structure(q, ix)?;
    let Some(root) = st.root.clone() else {
        return Ok(None);
    };
    let len = root.len();
    let on_root: HashMap<usize, bool> = root.iter().copied().collect();
    let root_vertices: Vec<usize> = root
        .iter()
        .map(|&(a, f)| if f { ix.src[a] } else { ix.tgt[a] })
        .collect();
    let rel: Vec<bool> = (0..len)
        .map(|i| {
            let (a, fa) = root[i];
            let (b, fb) = root[(i + 1) % len];
            fa == fb && if fa { ix.is_rel(a, b) } else { ix.is_rel(b, a) }
        })
        .collect();

    let mut in_attached = vec![false; ix.na()];
    let mut attached = Vec::new();
    let mut sat_of = vec![None; ix.na()];
    for (i, c) in st.sats.iter().enumerate() {
        for &a in c {
            sat_of[a] = Some(i);
        }
        let first = root.iter().find(|(a, _)| c.contains(a));
        if let Some(&(_, f)) = first {
            attached.push((i, Side::of(f)));
            for &a in c {
                in_attached[a] = true;
            }
        }
    }

    let root_vset: HashMap<usize, usize> = root_vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut anchor = vec![false; ix.nv()];
    for a in (0..ix.na()).filter(|&a| in_attached[a] || on_root.contains_key(&a)) {
        anchor[ix.src[a]] = true;
        anchor[ix.tgt[a]] = true;
    }
    let rest: Vec<usize> = (0..ix.na())
        .filter(|&a| !in_attached[a] && !on_root.contains_key(&a))
        .collect();
    // components of the remaining arrows, never joined through the root part
    let mut uf = UnionFind::new(ix.na());
    let mut by_vertex: HashMap<usize, usize> = HashMap::new();
    for &a in &rest {
        for v in [ix.src[a], ix.tgt[a]] {
            if anchor[v] {
                continue;
            }
            match by_vertex.get(&v) {
                Some(&b) => {
                    uf.union(a, b);
                }
                None => {
                    by_vertex.insert(v, a);
                }
            }
        }
    }
    let mut comps: HashMap<usize, Vec<usize>> = HashMap::new();
    for &a in &rest {
        comps.entry(uf.find(a)).or_default().push(a);
    }
    let mut comps: Vec<Vec<usize>> = comps.into_values().collect();
    comps.sort();

    let sat_side = |v: usize| -> Option<Side> {
        attached
            .iter()
            .find(|(i, _)| st.sats[*i].iter().any(|&a| ix.src[a] == v || ix.tgt[a] == v))
            .map(|&(_, s)| s)
    };

    let mut rays = Vec::new();
    for arrows in comps {
        let aset: BTreeSet<usize> = arrows.iter().copied().collect();
        let free: Vec<usize> = arrows.iter().copied().filter(|&a| sat_of[a].is_none()).collect();
        let mut cycles: Vec<usize> = arrows.iter().filter_map(|&a| sat_of[a]).collect();
        cycles.sort_unstable();
        cycles.dedup();
        let touched: BTreeSet<usize> = arrows
            .iter()
            .flat_map(|&a| [ix.src[a], ix.tgt[a]])
            .filter(|&v| anchor[v])
            .collect();
        let union_vertex = touched
            .iter()
            .filter(|v| root_vset.contains_key(v))
            .min_by_key(|v| root_vset[v])
            .copied();
        let anchor_v = union_vertex.or_else(|| touched.iter().next().copied()).unwrap_or(0);
        let mut attachment = None;
        let mut union_internal = None;
        if let Some(u) = union_vertex {
            let i = root_vset[&u];
            // root arrows i-1 and i meet at u
            let p = (i + len - 1) % len;
            if rel[p] {
                attachment = Some(Attachment::Internal(Side::of(root[p].1)));
                union_internal = Some(p);
            } else {
                for &(ra, f) in [root[p], root[i]].iter() {
                    let ext = ix.ins[u]
                        .iter()
                        .chain(&ix.outs[u])
                        .filter(|x| aset.contains(x))
                        .any(|&x| {
                            (ix.tgt[x] == u && ix.src[ra] == u && ix.is_rel(x, ra))
                                || (ix.tgt[ra] == u && ix.src[x] == u && ix.is_rel(ra, x))
                        });
                    if ext {
                        attachment = Some(Attachment::External(Side::of(f)));
                        break;
                    }
                }
            }
        }
        let attachment = attachment.unwrap_or_else(|| {
            Attachment::Free(
                touched
                    .iter()
                    .find_map(|&v| sat_side(v))
                    .or_else(|| union_vertex.map(|u| Side::of(root[root_vset[&u]].1)))
                    .unwrap_or(Side::Clockwise),
            )
        });
        rays.push(Ray {
            free,
            cycles,
            anchor: anchor_v,
            attachment,
            union_internal,
        });
    }

    Ok(Some(Anatomy {
        st,
        root,
        rel,
        on_root,
        attached,
        in_attached,
        rays,
    }))
}

/// Convenience wrapper that also checks gentleness.
pub(crate) fn anatomy(q: &BoundQuiver) -> Result<(Ix, Option<Anatomy>), ClassifyError> {
    if let Some(v) = validate_gentle(q).violations.first() {
        return Err(ClassifyError::NotGentle(v.to_string()));
    }
    let ix = q.index();
    let a = anatomy_of(q, &ix)?;
    Ok((ix, a))
}
