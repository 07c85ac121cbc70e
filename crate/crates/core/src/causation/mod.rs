//! Actual, but-for and sufficient causes.
//!
//! A candidate cause is a [`Conjunction`] of primitive events over endogenous
//! variables. All decisions are exhaustive; witnesses are reported in a
//! canonical order (smallest fixed set first, ties broken by variable order,
//! then alternative settings in declared value order).

mod search;
mod structure;
mod sufficient;

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::model::{CausalModel, Context, Formula, Intervention, Value, ValueIdx, VarId};

pub use search::CauseFamily;
pub(crate) use search::{for_each_setting, PhiScope};
pub(crate) use sufficient::sc2_witness;
pub use structure::{
    is_causally_independent, is_determined_by_context, verify_theorem1, DeterminationVerdict,
    IndependenceCounterexample, IndependenceVerdict, Theorem1Report,
};
pub use sufficient::{
    is_sufficient_cause, SufficientCauseVerdict, SufficientCauseWitness, SufficientClause,
    SufficientSubsetCheck,
};

/// Non-empty conjunction of primitive events over distinct endogenous
/// variables, kept sorted by variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Conjunction {
    events: Vec<(VarId, ValueIdx)>,
}

impl Conjunction {
    pub fn new(model: &CausalModel, mut events: Vec<(VarId, ValueIdx)>) -> Result<Self> {
        if events.is_empty() {
            return Err(Error::EmptyCandidate);
        }
        events.sort();
        for (i, (v, x)) in events.iter().enumerate() {
            if v.index() >= model.num_vars() {
                return Err(Error::UnknownVariable(format!("#{}", v.index())));
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
            if i > 0 && events[i - 1].0 == *v {
                return Err(Error::RepeatedVariable(model.name(*v).to_string()));
            }
        }
        Ok(Conjunction { events })
    }

    /// Builds a conjunction from `(name, value)` pairs.
    pub fn named(model: &CausalModel, pairs: &[(&str, Value)]) -> Result<Self> {
        let mut events = Vec::with_capacity(pairs.len());
        for (name, value) in pairs {
            let var = model.endogenous_var(name)?;
            if events.iter().any(|(v, _)| *v == var) {
                return Err(Error::RepeatedVariable(name.to_string()));
            }
            events.push((var, model.value_index(var, value)?));
        }
        Self::new(model, events)
    }

    /// Caller guarantees the events are sorted, distinct and non-empty.
    pub(crate) fn from_sorted(events: Vec<(VarId, ValueIdx)>) -> Self {
        debug_assert!(!events.is_empty());
        debug_assert!(events.windows(2).all(|w| w[0].0 < w[1].0));
        Conjunction { events }
    }

    pub fn events(&self) -> &[(VarId, ValueIdx)] {
        &self.events
    }

    pub fn vars(&self) -> Vec<VarId> {
        self.events.iter().map(|(v, _)| *v).collect()
    }

    pub fn var_set(&self) -> BTreeSet<VarId> {
        self.events.iter().map(|(v, _)| *v).collect()
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// The sub-conjunction whose positions are set in `mask`; `None` if empty.
    pub fn restrict(&self, mask: u64) -> Option<Conjunction> {
        let events: Vec<_> = self
            .events
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, e)| *e)
            .collect();
        (!events.is_empty()).then_some(Conjunction { events })
    }

    /// All strict non-empty sub-conjunctions, smallest first.
    pub fn strict_subsets(&self) -> Vec<Conjunction> {
        let n = self.events.len();
        let mut out = Vec::new();
        for k in 1..n {
            for combo in itertools::Itertools::combinations(0..n, k) {
                out.push(Conjunction {
                    events: combo.iter().map(|&i| self.events[i]).collect(),
                });
            }
        }
        out
    }

    pub fn is_subset_of(&self, other: &Conjunction) -> bool {
        self.events.iter().all(|e| other.events.contains(e))
    }

    pub fn holds_in(&self, values: &[ValueIdx]) -> bool {
        self.events.iter().all(|(v, x)| values[v.index()] == *x)
    }

    pub fn intervention(&self) -> Intervention {
        Intervention::new(self.events.clone()).expect("conjunction is non-empty and distinct")
    }

    pub fn as_formula(&self) -> Formula {
        Formula::conjunction(&self.events).expect("conjunction is non-empty")
    }

    pub fn display(&self, model: &CausalModel) -> String {
        model.display_events(&self.events)
    }
}

/// How the variables held fixed in the counterfactual world may be set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum WitnessConstraint {
    /// Fixed variables keep their actual values.
    #[default]
    ActualValues,
    /// No variables may be held fixed.
    ButFor,
    /// Fixed variables may take any values.
    Unconstrained,
}

/// Counterfactual witness: setting the cause to `alt_setting` while holding
/// `fixed` falsifies the effect.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ActualCauseWitness {
    pub alt_setting: Vec<(VarId, ValueIdx)>,
    pub fixed: Vec<(VarId, ValueIdx)>,
}

impl ActualCauseWitness {
    /// Re-checks the witness from scratch against the model.
    pub fn verify(
        &self,
        model: &CausalModel,
        u: &Context,
        phi: &Formula,
        constraint: WitnessConstraint,
    ) -> bool {
        let actual = model.evaluate(u);
        let cause: BTreeSet<VarId> = self.alt_setting.iter().map(|(v, _)| *v).collect();
        if self.fixed.iter().any(|(v, _)| cause.contains(v)) {
            return false;
        }
        match constraint {
            WitnessConstraint::ActualValues => {
                if self.fixed.iter().any(|(v, x)| actual.get(*v) != *x) {
                    return false;
                }
            }
            WitnessConstraint::ButFor => {
                if !self.fixed.is_empty() {
                    return false;
                }
            }
            WitnessConstraint::Unconstrained => {}
        }
        let settings: Vec<_> = self.alt_setting.iter().chain(&self.fixed).copied().collect();
        let Ok(iv) = Intervention::new(settings) else {
            return false;
        };
        let Ok(f) = Formula::causal(iv, Formula::not(phi.clone())) else {
            return false;
        };
        model.satisfies(u, &f).unwrap_or(false)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CauseClause {
    Ac1,
    Ac2,
    Ac3,
}

impl CauseClause {
    pub fn label(self) -> &'static str {
        match self {
            CauseClause::Ac1 => "AC1",
            CauseClause::Ac2 => "AC2",
            CauseClause::Ac3 => "AC3",
        }
    }
}

/// Whether a maximal strict sub-conjunction satisfies AC2 on its own.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetCheck {
    pub subset: Conjunction,
    pub ac2: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActualCauseVerdict {
    pub holds: bool,
    pub ac1: bool,
    pub ac2: bool,
    pub ac3: bool,
    /// Canonical AC2 witness for the whole candidate, when AC2 holds.
    pub witness: Option<ActualCauseWitness>,
    pub failed: Option<CauseClause>,
    /// AC3 evidence. AC2 is upward closed, so checking the subsets that drop
    /// a single conjunct covers every strict subset.
    pub subset_checks: Vec<SubsetCheck>,
}

/// Modified-HP actual cause with witnesses fixed at actual values.
pub fn is_actual_cause(
    model: &CausalModel,
    u: &Context,
    cand: &Conjunction,
    phi: &Formula,
) -> Result<ActualCauseVerdict> {
    is_actual_cause_with(model, u, cand, phi, WitnessConstraint::ActualValues)
}

/// Actual cause whose AC2 witness holds nothing fixed. Minimality is still
/// judged against the full AC2, so every but-for cause is an actual cause.
pub fn is_but_for_cause(
    model: &CausalModel,
    u: &Context,
    cand: &Conjunction,
    phi: &Formula,
) -> Result<ActualCauseVerdict> {
    is_actual_cause_with(model, u, cand, phi, WitnessConstraint::ButFor)
}

pub fn is_actual_cause_with(
    model: &CausalModel,
    u: &Context,
    cand: &Conjunction,
    phi: &Formula,
    constraint: WitnessConstraint,
) -> Result<ActualCauseVerdict> {
    Conjunction::new(model, cand.events.clone())?;
    let scope = PhiScope::new(model, phi)?;
    let actual = model.evaluate(u);
    let ac1 = cand.holds_in(actual.values()) && phi.holds_in(actual.values());
    let vars = cand.vars();
    let witness = scope.ac2(u.values(), actual.values(), &vars, constraint, false);
    let ac2 = witness.is_some();
    let minimality = match constraint {
        WitnessConstraint::ButFor => WitnessConstraint::ActualValues,
        c => c,
    };
    let mut subset_checks = Vec::new();
    if cand.len() > 1 {
        let full = (1u64 << cand.len()) - 1;
        for drop in 0..cand.len() {
            let subset = cand.restrict(full & !(1 << drop)).expect("len > 1");
            let ac2 = scope
                .ac2(u.values(), actual.values(), &subset.vars(), minimality, false)
                .is_some();
            subset_checks.push(SubsetCheck { subset, ac2 });
        }
    }
    let ac3 = subset_checks.iter().all(|c| !c.ac2);
    let failed = if !ac1 {
        Some(CauseClause::Ac1)
    } else if !ac2 {
        Some(CauseClause::Ac2)
    } else if !ac3 {
        Some(CauseClause::Ac3)
    } else {
        None
    };
    Ok(ActualCauseVerdict {
        holds: failed.is_none(),
        ac1,
        ac2,
        ac3,
        witness,
        failed,
        subset_checks,
    })
}

/// Every actual cause of `phi` in `u`, smallest first, then in variable order.
pub fn find_actual_causes(
    model: &CausalModel,
    u: &Context,
    phi: &Formula,
) -> Result<Vec<(Conjunction, ActualCauseWitness)>> {
    find_actual_causes_with(model, u, phi, WitnessConstraint::ActualValues)
}

pub fn find_actual_causes_with(
    model: &CausalModel,
    u: &Context,
    phi: &Formula,
    constraint: WitnessConstraint,
) -> Result<Vec<(Conjunction, ActualCauseWitness)>> {
    Ok(CauseFamily::compute(model, u, phi, constraint)?.into_causes())
}
