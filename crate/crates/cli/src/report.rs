//! Command bodies shared by the binary and the service. Each returns the
//! text report, its JSON twin and an exit code; nothing here touches files.

use std::fmt::Write as _;

use quivertilt_core::{
    classify_cycles, compute_phi, decide_derived_equivalent, enumerate_threads, extract_params, is_solar,
    phi_collision_demo, recognize_branched, recognize_m_cluster_tilted, reduce, serialize_quiver, validate_gentle,
    BoundQuiver, CycleReport, DerivedParams, GentleReport, NormalFormParams, RecognitionReport, Reduction,
};
use serde::Serialize;
use serde_json::{json, Value};

/// Exit codes: 0 success, 1 domain failure, 2 usage error.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub code: u8,
    pub text: String,
    pub json: Value,
    /// Errors go to stderr; reports, failing or not, to stdout.
    pub is_error: bool,
}

impl Outcome {
    pub fn ok(text: String, json: Value) -> Self {
        Outcome {
            code: 0,
            text,
            json,
            is_error: false,
        }
    }

    pub fn fail(text: String, json: Value) -> Self {
        Outcome {
            code: 1,
            text,
            json,
            is_error: false,
        }
    }

    pub fn error(msg: impl std::fmt::Display) -> Self {
        let msg = msg.to_string();
        Outcome {
            code: 1,
            is_error: true,
            json: json!({ "error": msg }),
            text: format!("error: {msg}\n"),
        }
    }

    pub fn usage(msg: impl std::fmt::Display) -> Self {
        let msg = msg.to_string();
        Outcome {
            code: 2,
            is_error: true,
            json: json!({ "error": msg }),
            text: format!("usage error: {msg}\n"),
        }
    }
}

pub fn validate(q: &BoundQuiver) -> Outcome {
    let rep = validate_gentle(q);
    let json = json!({ "gentle": rep.is_ok(), "violations": rep.violations });
    if rep.is_ok() {
        return Outcome::ok("gentle\n".into(), json);
    }
    let mut text = String::from("not gentle\n");
    for v in &rep.violations {
        let _ = writeln!(text, "  {v}");
    }
    Outcome::fail(text, json)
}

pub fn phi(q: &BoundQuiver) -> Outcome {
    match compute_phi(q) {
        Ok(p) => Outcome::ok(p.to_string(), json!({ "phi": p })),
        Err(e) => Outcome::error(e),
    }
}

pub fn threads(q: &BoundQuiver) -> Outcome {
    let ts = match enumerate_threads(q) {
        Ok(t) => t,
        Err(e) => return Outcome::error(e),
    };
    let mut text = String::new();
    for t in &ts.permitted {
        let _ = writeln!(text, "permitted {t}");
    }
    for t in &ts.forbidden {
        let _ = writeln!(text, "forbidden {t}");
    }
    for c in &ts.full_relation_cycles {
        let _ = writeln!(text, "relation cycle {}", c.join(" "));
    }
    Outcome::ok(text, serde_json::to_value(&ts).unwrap_or(Value::Null))
}

/// Everything `classify` knows about a quiver; also the `classify` field of a
/// service session.
#[derive(Debug, Clone, Serialize)]
pub struct Classification {
    pub m: u32,
    pub gentle: GentleReport,
    pub cycles: Option<CycleReport>,
    pub cycles_error: Option<String>,
    pub m_cluster_tilted: RecognitionReport,
    pub branched: RecognitionReport,
    pub solar: bool,
    pub params: Option<DerivedParams>,
    pub params_error: Option<String>,
    pub normal_form: Option<NormalFormParams>,
}

pub fn classification(q: &BoundQuiver) -> Classification {
    let m = q.m();
    let gentle = validate_gentle(q);
    let (cycles, cycles_error) = match classify_cycles(q) {
        Ok(c) => (Some(c), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let (params, params_error) = match extract_params(q, m) {
        Ok(p) => (Some(p), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Classification {
        m,
        cycles,
        cycles_error,
        m_cluster_tilted: recognize_m_cluster_tilted(q, m),
        branched: recognize_branched(q, m),
        solar: gentle.is_ok() && is_solar(q, m),
        gentle,
        normal_form: params.map(|p| p.normal_form()),
        params,
        params_error,
    }
}

pub fn classify(q: &BoundQuiver) -> Outcome {
    let c = classification(q);
    let mut text = String::new();
    let _ = writeln!(text, "m = {}", c.m);
    if c.gentle.is_ok() {
        text.push_str("gentle: yes\n");
    } else {
        text.push_str("gentle: no\n");
        for v in &c.gentle.violations {
            let _ = writeln!(text, "  {v}");
        }
    }
    match (&c.cycles, &c.cycles_error) {
        (Some(r), _) => {
            match &r.root_cycle {
                Some(root) => {
                    let arrows: Vec<String> = root
                        .iter()
                        .map(|a| format!("{}{}", if a.forward { "+" } else { "-" }, a.arrow))
                        .collect();
                    let _ = writeln!(text, "root cycle ({}): {}", root.len(), arrows.join(" "));
                }
                None => text.push_str("root cycle: none\n"),
            }
            for s in &r.saturated_cycles {
                let _ = writeln!(text, "saturated ({:?}): {}", s.orientation, s.arrows.join(" "));
            }
            for o in &r.other_relation_cycles {
                let _ = writeln!(text, "other relation cycle: {}", o.join(" "));
            }
        }
        (None, Some(e)) => {
            let _ = writeln!(text, "cycles: {e}");
        }
        (None, None) => {}
    }
    let verdict = |b: bool| if b { "yes" } else { "no" };
    let _ = writeln!(text, "m-cluster tilted: {}", verdict(c.m_cluster_tilted.accepted));
    for l in c.m_cluster_tilted.to_string().lines() {
        let _ = writeln!(text, "  {l}");
    }
    let _ = writeln!(text, "branched: {}", verdict(c.branched.accepted));
    for l in c.branched.to_string().lines() {
        let _ = writeln!(text, "  {l}");
    }
    let _ = writeln!(text, "solar: {}", verdict(c.solar));
    match (&c.params, &c.params_error) {
        (Some(p), _) => {
            let _ = writeln!(text, "params: {p}");
            let _ = writeln!(text, "normal form: {}", p.normal_form());
        }
        (None, Some(e)) => {
            let _ = writeln!(text, "params: {e}");
        }
        (None, None) => {}
    }
    let json = serde_json::to_value(&c).unwrap_or(Value::Null);
    if c.gentle.is_ok() {
        Outcome::ok(text, json)
    } else {
        Outcome::fail(text, json)
    }
}

/// Text form is the quiver file, JSON form the quiver projection.
pub fn quiver(q: &BoundQuiver) -> Outcome {
    Outcome::ok(serialize_quiver(q), serde_json::to_value(q).unwrap_or(Value::Null))
}

pub fn reduction(q: &BoundQuiver) -> (Outcome, Option<Reduction>) {
    match reduce(q, q.m()) {
        Ok(r) => {
            let mut text = format!("normal form: {}\n", r.params);
            for s in &r.steps {
                let _ = writeln!(text, "{s}");
            }
            let _ = writeln!(text, "mutations: {}", r.trace.len());
            let json = json!({
                "params": r.params,
                "steps": r.steps,
                "trace": r.trace,
                "quiver": r.result,
            });
            (Outcome::ok(text, json), Some(r))
        }
        Err(e) => (Outcome::error(e), None),
    }
}

pub fn equivalent(a: &BoundQuiver, b: &BoundQuiver) -> Outcome {
    let pa = match extract_params(a, a.m()) {
        Ok(p) => p,
        Err(e) => return Outcome::error(format!("first quiver: {e}")),
    };
    let pb = match extract_params(b, b.m()) {
        Ok(p) => p,
        Err(e) => return Outcome::error(format!("second quiver: {e}")),
    };
    match decide_derived_equivalent(&pa, &pb) {
        Ok(eq) => {
            let text = format!(
                "{}\n  A: {pa}\n  B: {pb}\n",
                if eq { "equivalent" } else { "not equivalent" }
            );
            Outcome::ok(text, json!({ "equivalent": eq, "a": pa, "b": pb }))
        }
        Err(e) => Outcome::error(e),
    }
}

pub fn collision(m: u32) -> Outcome {
    match phi_collision_demo(m) {
        Ok(r) => Outcome::ok(r.to_string(), serde_json::to_value(&r).unwrap_or(Value::Null)),
        Err(e) => Outcome::error(e),
    }
}
