use std::fmt::Write;

use super::ModelBundle;
use crate::explanation::ContextSet;
use crate::model::{CausalModel, Context, EquationBody, VarId};
use crate::rational::format_rational;

/// Canonical text: variables in model order, equations in variable order,
/// contexts by name, distribution entries in context order.
pub fn serialize_model(b: &ModelBundle) -> String {
    let m = &b.model;
    let mut out = String::new();
    let _ = writeln!(out, "model {} {{", b.name);
    for v in m.variables() {
        let kind = if m.is_endogenous(v) { "endo" } else { "exo" };
        let _ = writeln!(out, "  {kind} {}: {};", m.name(v), m.range(v));
    }
    if m.num_endogenous() > 0 {
        out.push('\n');
    }
    for v in m.endogenous() {
        let eq = m.equation(v).expect("endogenous variables have equations");
        match &eq.body {
            EquationBody::Expr(e) => {
                let _ = writeln!(out, "  eq {} := {e};", m.name(v));
            }
            EquationBody::Table(t) => {
                let parents: Vec<_> = t.parents.iter().map(|p| p.as_str()).collect();
                let _ = writeln!(out, "  table {} ({}) {{", m.name(v), parents.join(", "));
                for (inputs, output) in &t.rows {
                    let inputs: Vec<_> = inputs.iter().map(ToString::to_string).collect();
                    let _ = writeln!(out, "    {} -> {output};", inputs.join(" "));
                }
                let _ = writeln!(out, "    default -> {};", t.default);
                out.push_str("  }\n");
            }
        }
    }
    if !b.named_contexts.is_empty() {
        out.push('\n');
    }
    for (name, c) in &b.named_contexts {
        let _ = writeln!(out, "  context {name} {};", assignment(m, c));
    }
    if let Some(d) = &b.distribution {
        out.push_str("\n  prob {\n");
        let entries: Vec<String> = d
            .support()
            .map(|(i, w)| format!("    {}: {}", reference(b, &m.context(i)), format_rational(w)))
            .collect();
        out.push_str(&entries.join(",\n"));
        out.push_str("\n  };\n");
    }
    if b.k.is_some() || !b.named_k.is_empty() {
        out.push('\n');
    }
    if let Some(k) = &b.k {
        let _ = writeln!(out, "  K = {};", context_set(b, k));
    }
    for (name, k) in &b.named_k {
        let _ = writeln!(out, "  K {name} = {};", context_set(b, k));
    }
    out.push_str("}\n");
    out
}

fn assignment(m: &CausalModel, c: &Context) -> String {
    let parts: Vec<String> = c
        .values()
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let v = VarId(i as u32);
            format!("{} = {}", m.name(v), m.value(v, *x))
        })
        .collect();
    format!("{{ {} }}", parts.join(", "))
}

fn reference(b: &ModelBundle, c: &Context) -> String {
    match b.context_name(c) {
        Some(n) => n.to_string(),
        None => assignment(&b.model, c),
    }
}

fn context_set(b: &ModelBundle, k: &ContextSet) -> String {
    match k {
        ContextSet::All => "all".into(),
        ContextSet::Explicit(cs) => {
            let refs: Vec<String> = cs.iter().map(|c| reference(b, c)).collect();
            format!("{{ {} }}", refs.join(", "))
        }
    }
}
