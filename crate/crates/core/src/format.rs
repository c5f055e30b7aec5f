//! Line-oriented text formats for quivers and mutation traces.
//!
//! ```text
//! m = 2
//! vertex a          # comments run to end of line
//! vertex b
//! arrow f : a -> b
//! rel f g           # f then g
//! ```

use std::fmt::Write as _;

use thiserror::Error;

use crate::mutation::{MutationKind, MutationStep, MutationTrace};
use crate::quiver::{is_ident, BoundQuiver, QuiverError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: syntax error: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Quiver { line: usize, source: QuiverError },
    #[error("missing `m = <positive int>` declaration")]
    MissingM,
}

impl ParseError {
    pub fn line(&self) -> Option<usize> {
        match self {
            ParseError::Syntax { line, .. } | ParseError::Quiver { line, .. } => Some(*line),
            ParseError::MissingM => None,
        }
    }
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, msg: msg.into() }
}

fn ident(line: usize, s: &str, what: &str) -> Result<String, ParseError> {
    let s = s.trim();
    if is_ident(s) {
        Ok(s.to_string())
    } else {
        Err(syntax(line, format!("bad {what} identifier {s:?}")))
    }
}

fn strip_comment(raw: &str) -> &str {
    raw.split('#').next().unwrap_or("").trim()
}

/// Parse quiver text. Declarations may come in any order; vertices are added
/// first, then arrows, then relations, and errors carry the offending line.
pub fn parse_quiver(text: &str) -> Result<BoundQuiver, ParseError> {
    let mut m: Option<(usize, u32)> = None;
    let mut vertices = Vec::new();
    let mut arrows = Vec::new();
    let mut rels = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = strip_comment(raw);
        if body.is_empty() {
            continue;
        }
        if let Some(rest) = body.strip_prefix('m') {
            if let Some(val) = rest.trim_start().strip_prefix('=') {
                let v: u32 = val
                    .trim()
                    .parse()
                    .map_err(|_| syntax(line, format!("bad value for m: {:?}", val.trim())))?;
                if v == 0 {
                    return Err(ParseError::Quiver {
                        line,
                        source: QuiverError::ZeroM,
                    });
                }
                if m.is_some() {
                    return Err(syntax(line, "m declared twice"));
                }
                m = Some((line, v));
                continue;
            }
        }
        let (kw, rest) = body
            .split_once(char::is_whitespace)
            .ok_or_else(|| syntax(line, format!("unrecognised line {body:?}")))?;
        match kw {
            "vertex" => vertices.push((line, ident(line, rest, "vertex")?)),
            "arrow" => {
                let (id, ends) = rest
                    .split_once(':')
                    .ok_or_else(|| syntax(line, "expected `arrow <id> : <src> -> <tgt>`"))?;
                let (s, t) = ends
                    .split_once("->")
                    .ok_or_else(|| syntax(line, "expected `->` in arrow declaration"))?;
                arrows.push((
                    line,
                    ident(line, id, "arrow")?,
                    ident(line, s, "vertex")?,
                    ident(line, t, "vertex")?,
                ));
            }
            "rel" => {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                if parts.len() != 2 {
                    return Err(syntax(line, "expected `rel <arrow> <arrow>`"));
                }
                rels.push((line, ident(line, parts[0], "arrow")?, ident(line, parts[1], "arrow")?));
            }
            _ => return Err(syntax(line, format!("unknown keyword {kw:?}"))),
        }
    }

    let (_, m) = m.ok_or(ParseError::MissingM)?;
    let wrap = |line| move |source| ParseError::Quiver { line, source };
    let mut q = BoundQuiver::new(m).expect("m checked positive");
    for (line, v) in &vertices {
        q.add_vertex(v).map_err(wrap(*line))?;
    }
    for (line, id, s, t) in &arrows {
        q.add_arrow(id, s, t).map_err(wrap(*line))?;
    }
    for (line, a, b) in &rels {
        q.add_relation(a, b).map_err(wrap(*line))?;
    }
    Ok(q)
}

/// Canonical text: vertices, arrows and relations each in sorted order.
pub fn serialize_quiver(q: &BoundQuiver) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "m = {}", q.m());
    for v in q.vertices() {
        let _ = writeln!(out, "vertex {v}");
    }
    for a in q.arrows() {
        let _ = writeln!(out, "arrow {} : {} -> {}", a.id, a.source, a.target);
    }
    for (a, b) in q.relations() {
        let _ = writeln!(out, "rel {a} {b}");
    }
    out
}

pub fn parse_trace(text: &str) -> Result<MutationTrace, ParseError> {
    let mut steps = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = strip_comment(raw);
        if body.is_empty() {
            continue;
        }
        let parts: Vec<&str> = body.split_whitespace().collect();
        let kind = match parts.first() {
            Some(&"tilt") => MutationKind::Tilt,
            Some(&"cotilt") => MutationKind::Cotilt,
            _ => return Err(syntax(line, "expected `tilt <vertex>` or `cotilt <vertex>`")),
        };
        if parts.len() != 2 {
            return Err(syntax(line, "expected exactly one vertex"));
        }
        steps.push(MutationStep {
            vertex: ident(line, parts[1], "vertex")?,
            kind,
        });
    }
    Ok(MutationTrace(steps))
}

pub fn serialize_trace(t: &MutationTrace) -> String {
    t.0.iter().map(|s| format!("{s}\n")).collect()
}
