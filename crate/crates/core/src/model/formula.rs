use std::collections::BTreeSet;
use std::fmt;

use super::{CausalModel, ValueIdx, VarId};
use crate::error::{Error, Result};

/// A non-empty setting of endogenous variables, sorted by variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Intervention {
    settings: Vec<(VarId, ValueIdx)>,
}

impl Intervention {
    pub fn new(mut settings: Vec<(VarId, ValueIdx)>) -> Result<Self> {
        if settings.is_empty() {
            return Err(Error::EmptyIntervention);
        }
        settings.sort();
        for w in settings.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::RepeatedVariable(format!("#{}", w[0].0 .0)));
            }
        }
        Ok(Intervention { settings })
    }

    /// Builds from names and values, validating against `model`.
    pub fn named(model: &CausalModel, pairs: &[(&str, super::Value)]) -> Result<Self> {
        let mut settings = Vec::with_capacity(pairs.len());
        for (name, value) in pairs {
            let var = model.endogenous_var(name)?;
            if settings.iter().any(|(v, _)| *v == var) {
                return Err(Error::RepeatedVariable(name.to_string()));
            }
            settings.push((var, model.value_index(var, value)?));
        }
        Self::new(settings)
    }

    pub fn settings(&self) -> &[(VarId, ValueIdx)] {
        &self.settings
    }
}

/// Boolean combinations of primitive events, optionally under one level of
/// intervention.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Event(VarId, ValueIdx),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Causal(Intervention, Box<Formula>),
}

impl Formula {
    pub fn event(var: VarId, value: ValueIdx) -> Self {
        Formula::Event(var, value)
    }

    /// Convenience for `name = value` against a model.
    pub fn eq(model: &CausalModel, name: &str, value: impl Into<super::Value>) -> Result<Self> {
        let var = model.var_checked(name)?;
        Ok(Formula::Event(var, model.value_index(var, &value.into())?))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    /// Conjunction of all events; `None` when `events` is empty.
    pub fn conjunction(events: &[(VarId, ValueIdx)]) -> Option<Self> {
        let mut it = events.iter().map(|(v, x)| Formula::Event(*v, *x));
        let first = it.next()?;
        Some(it.fold(first, Formula::and))
    }

    pub fn causal(iv: Intervention, body: Formula) -> Result<Self> {
        if body.contains_intervention() {
            return Err(Error::NestedIntervention);
        }
        Ok(Formula::Causal(iv, Box::new(body)))
    }

    pub fn contains_intervention(&self) -> bool {
        match self {
            Formula::Event(..) => false,
            Formula::Not(g) => g.contains_intervention(),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.contains_intervention() || b.contains_intervention()
            }
            Formula::Causal(..) => true,
        }
    }

    /// Variables mentioned in events (intervened variables are not included).
    pub fn variables(&self) -> BTreeSet<VarId> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<VarId>) {
        match self {
            Formula::Event(v, _) => {
                out.insert(*v);
            }
            Formula::Not(g) | Formula::Causal(_, g) => g.collect_vars(out),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// Validates variable ids, value indices and intervention nesting.
    pub fn check(&self, model: &CausalModel) -> Result<()> {
        self.check_at(model, false)
    }

    /// As [`Formula::check`], additionally rejecting any intervention.
    pub fn check_plain(&self, model: &CausalModel) -> Result<()> {
        if self.contains_intervention() {
            return Err(Error::FormulaContainsIntervention);
        }
        self.check(model)
    }

    fn check_at(&self, model: &CausalModel, nested: bool) -> Result<()> {
        match self {
            Formula::Event(v, x) => {
                if v.index() >= model.num_vars() {
                    return Err(Error::UnknownVariable(format!("#{}", v.0)));
                }
                if *x as usize >= model.range(*v).len() {
                    return Err(Error::ValueOutOfRange {
                        var: model.name(*v).to_string(),
                        value: format!("#{x}"),
                    });
                }
                Ok(())
            }
            Formula::Not(g) => g.check_at(model, nested),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.check_at(model, nested)?;
                b.check_at(model, nested)
            }
            Formula::Causal(iv, body) => {
                if nested {
                    return Err(Error::NestedIntervention);
                }
                for (v, x) in iv.settings() {
                    if v.index() >= model.num_vars() {
                        return Err(Error::UnknownVariable(format!("#{}", v.0)));
                    }
                    if !model.is_endogenous(*v) {
                        return Err(Error::NotEndogenous(model.name(*v).to_string()));
                    }
                    if *x as usize >= model.range(*v).len() {
                        return Err(Error::ValueOutOfRange {
                            var: model.name(*v).to_string(),
                            value: format!("#{x}"),
                        });
                    }
                }
                body.check_at(model, true)
            }
        }
    }

    /// Truth value of an intervention-free formula under a full assignment.
    #[inline]
    pub(crate) fn holds_in(&self, values: &[ValueIdx]) -> bool {
        match self {
            Formula::Event(v, x) => values[v.index()] == *x,
            Formula::Not(g) => !g.holds_in(values),
            Formula::And(a, b) => a.holds_in(values) && b.holds_in(values),
            Formula::Or(a, b) => a.holds_in(values) || b.holds_in(values),
            Formula::Causal(..) => panic!("holds_in called on a causal formula"),
        }
    }

    pub fn display<'a>(&'a self, model: &'a CausalModel) -> FormulaDisplay<'a> {
        FormulaDisplay { f: self, model }
    }
}

pub struct FormulaDisplay<'a> {
    f: &'a Formula,
    model: &'a CausalModel,
}

impl fmt::Display for FormulaDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(self.f, self.model, 0, f)
    }
}

// precedence: | = 1, & = 2, prefix = 3
fn write_formula(
    g: &Formula,
    m: &CausalModel,
    min_prec: u8,
    f: &mut fmt::Formatter<'_>,
) -> fmt::Result {
    match g {
        Formula::Event(v, x) => write!(f, "{}={}", m.name(*v), m.value(*v, *x)),
        Formula::Not(inner) => {
            if let Formula::Event(v, x) = **inner {
                return write!(f, "{}!={}", m.name(v), m.value(v, x));
            }
            f.write_str("~")?;
            write_formula(inner, m, 3, f)
        }
        Formula::And(a, b) | Formula::Or(a, b) => {
            let p = if matches!(g, Formula::And(..)) { 2 } else { 1 };
            if p < min_prec {
                f.write_str("(")?;
            }
            write_formula(a, m, p, f)?;
            f.write_str(if p == 2 { " & " } else { " | " })?;
            write_formula(b, m, p + 1, f)?;
            if p < min_prec {
                f.write_str(")")?;
            }
            Ok(())
        }
        Formula::Causal(iv, body) => {
            f.write_str("[")?;
            for (i, (v, x)) in iv.settings().iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}<-{}", m.name(*v), m.value(*v, *x))?;
            }
            f.write_str("](")?;
            write_formula(body, m, 0, f)?;
            f.write_str(")")
        }
    }
}
