use super::{ActualCauseWitness, CauseFamily, Conjunction, PhiScope, WitnessConstraint};
use crate::error::Result;
use crate::model::{CausalModel, Context, Formula, ValueIdx, VarId};

/// A conjunct of the candidate, plus an extension, forming an actual cause.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SufficientCauseWitness {
    pub chosen_conjunct: (VarId, ValueIdx),
    pub extension: Vec<(VarId, ValueIdx)>,
    pub inner: ActualCauseWitness,
}

impl SufficientCauseWitness {
    /// The actual cause `chosen_conjunct & extension`.
    pub fn cause(&self) -> Conjunction {
        let mut events = self.extension.clone();
        events.push(self.chosen_conjunct);
        events.sort();
        Conjunction::from_sorted(events)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SufficientClause {
    Sc1,
    Sc2,
    Sc3,
    Sc4,
}

impl SufficientClause {
    pub fn label(self) -> &'static str {
        match self {
            SufficientClause::Sc1 => "SC1",
            SufficientClause::Sc2 => "SC2",
            SufficientClause::Sc3 => "SC3",
            SufficientClause::Sc4 => "SC4",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SufficientSubsetCheck {
    pub subset: Conjunction,
    pub sc1: bool,
    pub sc2: bool,
    pub sc3: bool,
}

impl SufficientSubsetCheck {
    pub fn satisfies_sc123(&self) -> bool {
        self.sc1 && self.sc2 && self.sc3
    }
}

/// Every clause is evaluated independently, so a failed SC1 still reports
/// whether SC2 to SC4 would hold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SufficientCauseVerdict {
    pub holds: bool,
    pub sc1: bool,
    pub sc2: bool,
    pub sc3: bool,
    pub sc4: bool,
    pub witness: Option<SufficientCauseWitness>,
    /// A context where intervening on the candidate does not force the effect.
    pub sc3_counterexample: Option<Context>,
    /// Every strict non-empty sub-conjunction with its SC1 to SC3 results.
    pub subset_checks: Vec<SufficientSubsetCheck>,
    pub failed: Option<SufficientClause>,
}

impl SufficientCauseVerdict {
    pub fn sc134(&self) -> bool {
        self.sc1 && self.sc3 && self.sc4
    }
}

pub fn is_sufficient_cause(
    model: &CausalModel,
    u: &Context,
    cand: &Conjunction,
    phi: &Formula,
) -> Result<SufficientCauseVerdict> {
    Conjunction::new(model, cand.events().to_vec())?;
    let scope = PhiScope::new(model, phi)?;
    let family = scope.family(u.values(), WitnessConstraint::ActualValues)?;
    let actual = model.evaluate(u);
    let all: Vec<Context> = model.contexts().collect();
    let sc1_of = |c: &Conjunction| c.holds_in(actual.values()) && phi.holds_in(actual.values());

    let sc1 = sc1_of(cand);
    let witness = sc2_witness(&family, cand);
    let sc3_counterexample = forcing_counterexample(model, cand, phi, &all);
    let sc3 = sc3_counterexample.is_none();

    let subset_checks: Vec<SufficientSubsetCheck> = cand
        .strict_subsets()
        .into_iter()
        .map(|subset| SufficientSubsetCheck {
            sc1: sc1_of(&subset),
            sc2: sc2_witness(&family, &subset).is_some(),
            sc3: forcing_counterexample(model, &subset, phi, &all).is_none(),
            subset,
        })
        .collect();
    let sc4 = !subset_checks.iter().any(SufficientSubsetCheck::satisfies_sc123);
    let sc2 = witness.is_some();
    let failed = [
        (sc1, SufficientClause::Sc1),
        (sc2, SufficientClause::Sc2),
        (sc3, SufficientClause::Sc3),
        (sc4, SufficientClause::Sc4),
    ]
    .into_iter()
    .find(|(ok, _)| !ok)
    .map(|(_, c)| c);
    Ok(SufficientCauseVerdict {
        holds: failed.is_none(),
        sc1,
        sc2,
        sc3,
        sc4,
        witness,
        sc3_counterexample,
        subset_checks,
        failed,
    })
}

/// SC2 against a precomputed cause family: the first conjunct (in candidate
/// order) that belongs to some cause, extended by the rest of that cause.
pub(crate) fn sc2_witness(family: &CauseFamily, cand: &Conjunction) -> Option<SufficientCauseWitness> {
    cand.events().iter().find_map(|&(var, value)| {
        family.cause_containing(var, value).map(|(cause, w)| SufficientCauseWitness {
            chosen_conjunct: (var, value),
            extension: cause
                .events()
                .iter()
                .copied()
                .filter(|(v, _)| *v != var)
                .collect(),
            inner: w.clone(),
        })
    })
}

/// First context in `contexts` where `[cand]phi` fails.
pub(crate) fn forcing_counterexample(
    model: &CausalModel,
    cand: &Conjunction,
    phi: &Formula,
    contexts: &[Context],
) -> Option<Context> {
    let mut ov = model.no_overrides();
    for (v, x) in cand.events() {
        ov[v.index()] = Some(*x);
    }
    let mut buf = vec![0; model.num_vars()];
    contexts
        .iter()
        .find(|u| {
            model.solve_into(u.values(), &ov, &mut buf);
            !phi.holds_in(&buf)
        })
        .cloned()
}
