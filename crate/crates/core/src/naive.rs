//! Brute-force reference implementations of the definitions, written
//! directly against the public model API with no pruning. Exponential in
//! everything; meant for cross-checking the real engine on small models.

use itertools::Itertools;
use num_traits::Zero;

use crate::causation::{Conjunction, WitnessConstraint};
use crate::explanation::{ContextDistribution, ContextScope, DefinitionVariant, GoodnessPair, NecessityMode};
use crate::model::{CausalModel, Context, Formula, Intervention, ValueIdx, VarId};

type Events = Vec<(VarId, ValueIdx)>;

fn holds_after(m: &CausalModel, u: &Context, settings: &[(VarId, ValueIdx)], phi: &Formula) -> bool {
    if settings.is_empty() {
        return m.satisfies(u, phi).expect("plain formula");
    }
    let iv = Intervention::new(settings.to_vec()).expect("distinct variables");
    m.satisfies(u, &Formula::causal(iv, phi.clone()).expect("plain body"))
        .expect("valid intervention")
}

fn settings_of(m: &CausalModel, vars: &[VarId]) -> Vec<Events> {
    vars.iter()
        .map(|v| (0..m.range(*v).len() as ValueIdx).map(move |x| (*v, x)))
        .multi_cartesian_product()
        .collect()
}

fn subsets<T: Clone>(items: &[T]) -> impl Iterator<Item = Vec<T>> + '_ {
    (0..=items.len()).flat_map(move |k| items.iter().cloned().combinations(k))
}

/// Some alternative setting of the candidate's variables, together with a
/// permitted setting of other endogenous variables, falsifies `phi`.
pub fn ac2(m: &CausalModel, u: &Context, cand: &[(VarId, ValueIdx)], phi: &Formula, c: WitnessConstraint) -> bool {
    let actual = m.evaluate(u);
    let xs: Vec<VarId> = cand.iter().map(|(v, _)| *v).collect();
    let others: Vec<VarId> = m.endogenous().filter(|v| !xs.contains(v)).collect();
    let alts = settings_of(m, &xs);
    alts.iter().any(|alt| match c {
        WitnessConstraint::ButFor => !holds_after(m, u, alt, phi),
        WitnessConstraint::ActualValues => subsets(&others).any(|w| {
            let mut s = alt.clone();
            s.extend(w.iter().map(|v| (*v, actual.get(*v))));
            !holds_after(m, u, &s, phi)
        }),
        WitnessConstraint::Unconstrained => subsets(&others).any(|w| {
            settings_of(m, &w).into_iter().any(|ws| {
                let mut s = alt.clone();
                s.extend(ws);
                !holds_after(m, u, &s, phi)
            })
        }),
    })
}

/// Actual cause under the given witness constraint. Minimality compares
/// against sub-conjunctions satisfying the unrestricted-witness-set version
/// of the counterfactual clause, so a but-for cause is also an actual cause.
pub fn is_actual_cause(m: &CausalModel, u: &Context, cand: &Conjunction, phi: &Formula, c: WitnessConstraint) -> bool {
    let actual = m.evaluate(u);
    let events = cand.events();
    if !cand.holds_in(actual.values()) || !m.satisfies(u, phi).expect("plain formula") {
        return false;
    }
    if !ac2(m, u, events, phi, c) {
        return false;
    }
    let minimality = match c {
        WitnessConstraint::ButFor => WitnessConstraint::ActualValues,
        other => other,
    };
    (1..events.len()).all(|k| {
        events
            .iter()
            .copied()
            .combinations(k)
            .all(|sub| !ac2(m, u, &sub, phi, minimality))
    })
}

/// Every actual cause, as a set; order is unspecified.
pub fn actual_causes(m: &CausalModel, u: &Context, phi: &Formula, c: WitnessConstraint) -> Vec<Conjunction> {
    let actual = m.evaluate(u);
    let endo: Vec<VarId> = m.endogenous().collect();
    subsets(&endo)
        .filter(|s| !s.is_empty())
        .map(|s| Conjunction::new(m, s.iter().map(|v| (*v, actual.get(*v))).collect()).expect("distinct"))
        .filter(|cand| is_actual_cause(m, u, cand, phi, c))
        .collect()
}

fn forced_everywhere(m: &CausalModel, contexts: &[Context], cand: &Conjunction, phi: &Formula) -> bool {
    contexts.iter().all(|u| holds_after(m, u, cand.events(), phi))
}

fn conjunct_extends(m: &CausalModel, u: &Context, cand: &Conjunction, phi: &Formula, c: WitnessConstraint) -> bool {
    actual_causes(m, u, phi, c)
        .iter()
        .any(|cause| cand.events().iter().any(|e| cause.events().contains(e)))
}

pub fn is_sufficient_cause(m: &CausalModel, u: &Context, cand: &Conjunction, phi: &Formula) -> bool {
    let all: Vec<Context> = m.contexts().collect();
    let actual = m.evaluate(u);
    let phi_holds = m.satisfies(u, phi).expect("plain formula");
    let sc123 = |c: &Conjunction| {
        c.holds_in(actual.values())
            && phi_holds
            && conjunct_extends(m, u, c, phi, WitnessConstraint::ActualValues)
            && forced_everywhere(m, &all, c, phi)
    };
    sc123(cand) && cand.strict_subsets().iter().all(|s| !sc123(s))
}

fn necessity(m: &CausalModel, u: &Context, cand: &Conjunction, phi: &Formula, v: DefinitionVariant) -> bool {
    match v.necessity {
        NecessityMode::ConjunctExtendable => conjunct_extends(m, u, cand, phi, v.witness),
        NecessityMode::SubsetIsCause => subsets(cand.events())
            .filter(|s| !s.is_empty())
            .any(|s| is_actual_cause(m, u, &Conjunction::new(m, s).expect("distinct"), phi, v.witness)),
    }
}

fn scope(m: &CausalModel, k: &[Context], v: DefinitionVariant) -> Vec<Context> {
    match v.scope {
        ContextScope::GivenK => k.to_vec(),
        ContextScope::AllContexts => m.contexts().collect(),
    }
}

fn sat(m: &CausalModel, contexts: &[Context], cand: &Conjunction, phi: &Formula) -> Vec<Context> {
    contexts
        .iter()
        .filter(|u| cand.holds_in(m.evaluate(u).values()) && m.satisfies(u, phi).expect("plain formula"))
        .cloned()
        .collect()
}

fn ex1(m: &CausalModel, contexts: &[Context], cand: &Conjunction, phi: &Formula, v: DefinitionVariant) -> bool {
    forced_everywhere(m, contexts, cand, phi)
        && sat(m, contexts, cand, phi)
            .iter()
            .all(|u| necessity(m, u, cand, phi, v))
}

pub fn is_explanation(m: &CausalModel, k: &[Context], cand: &Conjunction, phi: &Formula, v: DefinitionVariant) -> bool {
    let contexts = scope(m, k, v);
    ex1(m, &contexts, cand, phi, v)
        && cand.strict_subsets().iter().all(|s| !ex1(m, &contexts, s, phi, v))
        && !sat(m, &contexts, cand, phi).is_empty()
}

/// Every explanation whose variables avoid those of `phi`, as a set.
pub fn explanations(m: &CausalModel, k: &[Context], phi: &Formula, v: DefinitionVariant) -> Vec<Conjunction> {
    let phi_vars = phi.variables();
    let endo: Vec<VarId> = m.endogenous().filter(|x| !phi_vars.contains(x)).collect();
    subsets(&endo)
        .filter(|s| !s.is_empty())
        .flat_map(|s| settings_of(m, &s))
        .map(|e| Conjunction::new(m, e).expect("distinct"))
        .filter(|c| is_explanation(m, k, c, phi, v))
        .collect()
}

/// Achieved goodness, or `None` when the conditioning event has weight zero.
pub fn goodness(
    m: &CausalModel,
    pr: &ContextDistribution,
    k: &[Context],
    cand: &Conjunction,
    phi: &Formula,
    v: DefinitionVariant,
) -> Option<GoodnessPair> {
    let contexts = scope(m, k, v);
    let sat = sat(m, &contexts, cand, phi);
    let den = pr.probability(m, &sat);
    if den.is_zero() {
        return None;
    }
    let good: Vec<Context> = sat.into_iter().filter(|u| necessity(m, u, cand, phi, v)).collect();
    let forced: Vec<Context> = contexts
        .iter()
        .filter(|u| holds_after(m, u, cand.events(), phi))
        .cloned()
        .collect();
    Some(GoodnessPair {
        alpha: pr.probability(m, &good) / den,
        beta: pr.probability(m, &forced),
    })
}
