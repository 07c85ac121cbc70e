//! The JSON schema shared by every query, and its table rendering.
//!
//! ```text
//! {
//!   "query": "sufficient-cause",
//!   "candidate": "ML1=1 & ML2=1",        // omitted when not applicable
//!   "verdict": true,
//!   "clauses": { "SC1": true, ... },      // in definition order
//!   "witnesses": { ... },                 // query specific
//!   "achieved_goodness": { "alpha": "1/8", "beta": "9/10" } | null,
//!   "timing_ms": 0.42                     // wall clock for the whole command
//! }
//! ```
//!
//! Rationals are always strings in lowest terms; variable values are JSON
//! numbers for integers and strings for symbols.

use std::fmt::Write as _;
use std::io::Write as _;
use std::time::Instant;

use cex_core::explanation::GoodnessPair;
use cex_core::model::{CausalModel, Context, Value, ValueIdx, VarId};
use cex_core::rational::format_rational;
use serde::Serialize;
use serde_json::{json, Map};

#[derive(Clone, Debug, Serialize)]
pub struct QueryResult {
    pub query: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub candidate: Option<String>,
    pub verdict: bool,
    pub clauses: Map<String, serde_json::Value>,
    pub witnesses: serde_json::Value,
    pub achieved_goodness: Option<Goodness>,
    pub timing_ms: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Goodness {
    pub alpha: String,
    pub beta: String,
}

impl From<&GoodnessPair> for Goodness {
    fn from(g: &GoodnessPair) -> Self {
        Goodness {
            alpha: format_rational(&g.alpha),
            beta: format_rational(&g.beta),
        }
    }
}

impl QueryResult {
    pub fn new(query: &'static str, verdict: bool) -> Self {
        QueryResult {
            query,
            candidate: None,
            verdict,
            clauses: Map::new(),
            witnesses: json!({}),
            achieved_goodness: None,
            timing_ms: 0.0,
        }
    }

    pub fn clause(mut self, name: &str, holds: bool) -> Self {
        self.clauses.insert(name.to_string(), holds.into());
        self
    }

    pub fn timed(mut self, start: Instant) -> Self {
        self.timing_ms = elapsed_ms(start);
        self
    }
}

pub fn elapsed_ms(start: Instant) -> f64 {
    (start.elapsed().as_secs_f64() * 1e6).round() / 1e3
}

pub fn value_json(v: &Value) -> serde_json::Value {
    match v {
        Value::Int(i) => json!(i),
        Value::Sym(s) => json!(s),
    }
}

pub fn events_json(m: &CausalModel, events: &[(VarId, ValueIdx)]) -> serde_json::Value {
    let mut map = Map::new();
    for (v, x) in events {
        map.insert(m.name(*v).to_string(), value_json(m.value(*v, *x)));
    }
    map.into()
}

pub fn context_json(m: &CausalModel, u: &Context) -> serde_json::Value {
    let events: Vec<_> = m.exogenous().zip(u.values().iter().copied()).collect();
    events_json(m, &events)
}

/// Writes to standard output; a closed pipe is not an error.
pub fn write_out(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

pub fn print_json<T: Serialize>(value: &T) {
    write_out(&(serde_json::to_string_pretty(value).expect("serializable") + "\n"));
}

fn yes_no(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::Bool(true) => "yes".into(),
        serde_json::Value::Bool(false) => "no".into(),
        other => other.to_string(),
    }
}

pub fn table(r: &QueryResult) -> String {
    let mut out = String::new();
    match &r.candidate {
        Some(c) => writeln!(out, "{}: {c}", r.query),
        None => writeln!(out, "{}", r.query),
    }
    .ok();
    let _ = writeln!(out, "  {:<16} {}", "verdict", if r.verdict { "true" } else { "false" });
    for (name, v) in &r.clauses {
        let _ = writeln!(out, "  {name:<16} {}", yes_no(v));
    }
    if let Some(g) = &r.achieved_goodness {
        let _ = writeln!(out, "  {:<16} {}", "alpha", g.alpha);
        let _ = writeln!(out, "  {:<16} {}", "beta", g.beta);
    }
    if let serde_json::Value::Object(w) = &r.witnesses {
        for (k, v) in w {
            if !v.is_null() {
                let _ = writeln!(out, "  {k}: {v}");
            }
        }
    }
    let _ = writeln!(out, "  {:<16} {} ms", "time", r.timing_ms);
    out
}

pub fn emit(results: &[QueryResult], json: bool, as_list: bool) {
    if json {
        if as_list {
            print_json(&results);
        } else if let Some(r) = results.first() {
            print_json(r);
        }
        return;
    }
    if as_list && results.is_empty() {
        write_out("no results\n");
    }
    for r in results {
        write_out(&table(r));
    }
}
