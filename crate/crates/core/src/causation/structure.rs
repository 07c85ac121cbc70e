use std::collections::BTreeSet;

use itertools::Itertools;

use super::search::for_each_setting;
use super::{is_sufficient_cause, Conjunction, PhiScope};
use crate::error::{Error, Result};
use crate::model::{CausalModel, Context, Formula, ValueIdx, VarId};

/// Intervening on `intervened` in `context` changed `affected`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndependenceCounterexample {
    pub context: Context,
    pub intervened: Vec<(VarId, ValueIdx)>,
    pub affected: VarId,
    pub before: ValueIdx,
    pub after: ValueIdx,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndependenceVerdict {
    pub holds: bool,
    pub counterexample: Option<IndependenceCounterexample>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeterminationVerdict {
    pub holds: bool,
    /// First joint setting, in lexicographic order, that no context produces.
    pub missing: Option<Vec<(VarId, ValueIdx)>>,
}

fn check_vars(model: &CausalModel, vars: &[VarId]) -> Result<Vec<VarId>> {
    if vars.is_empty() {
        return Err(Error::Invalid("variable set is empty".into()));
    }
    let set: BTreeSet<VarId> = vars.iter().copied().collect();
    for v in &set {
        if v.index() >= model.num_vars() {
            return Err(Error::UnknownVariable(format!("#{}", v.index())));
        }
        if !model.is_endogenous(*v) {
            return Err(Error::NotEndogenous(model.name(*v).to_string()));
        }
    }
    if set.len() != vars.len() {
        return Err(Error::Invalid("variable set has repeats".into()));
    }
    Ok(set.into_iter().collect())
}

/// Setting any strict subset of `vars` never changes the others, in any context.
pub fn is_causally_independent(model: &CausalModel, vars: &[VarId]) -> Result<IndependenceVerdict> {
    let vars = check_vars(model, vars)?;
    let set: BTreeSet<VarId> = vars.iter().copied().collect();
    let downstream = model.descendants(&set);
    if vars.iter().all(|v| !downstream.contains(v)) {
        // no member lies on a path from another member
        return Ok(IndependenceVerdict {
            holds: true,
            counterexample: None,
        });
    }
    let n = vars.len();
    let mut ov = model.no_overrides();
    let mut buf = vec![0; model.num_vars()];
    for u in model.contexts() {
        let actual = model.evaluate(&u);
        for k in 1..n {
            for ys in (0..n).combinations(k) {
                let targets: Vec<VarId> = ys.iter().map(|&i| vars[i]).collect();
                let others: Vec<VarId> = vars.iter().copied().filter(|v| !targets.contains(v)).collect();
                let choices: Vec<Vec<ValueIdx>> = targets
                    .iter()
                    .map(|v| (0..model.range(*v).len() as ValueIdx).collect())
                    .collect();
                let mut found = None;
                for_each_setting(&choices, |xs| {
                    for (v, x) in targets.iter().zip(xs) {
                        ov[v.index()] = Some(*x);
                    }
                    model.solve_into(u.values(), &ov, &mut buf);
                    if let Some(z) = others.iter().find(|z| buf[z.index()] != actual.get(**z)) {
                        found = Some(IndependenceCounterexample {
                            context: u.clone(),
                            intervened: targets.iter().copied().zip(xs.iter().copied()).collect(),
                            affected: *z,
                            before: actual.get(*z),
                            after: buf[z.index()],
                        });
                        return true;
                    }
                    false
                });
                for v in &targets {
                    ov[v.index()] = None;
                }
                if found.is_some() {
                    return Ok(IndependenceVerdict {
                        holds: false,
                        counterexample: found,
                    });
                }
            }
        }
    }
    Ok(IndependenceVerdict {
        holds: true,
        counterexample: None,
    })
}

/// Every joint setting of `vars` arises in some context.
pub fn is_determined_by_context(model: &CausalModel, vars: &[VarId]) -> Result<DeterminationVerdict> {
    let vars = check_vars(model, vars)?;
    let radices: Vec<u128> = vars.iter().map(|v| model.range(*v).len() as u128).collect();
    let size: u128 = radices.iter().product();
    let limit = model.limits().max_table;
    if size > limit as u128 {
        return Err(Error::ScaleExceeded {
            what: "joint setting space".into(),
            size,
            limit,
        });
    }
    let mut seen = vec![false; size as usize];
    for u in model.contexts() {
        let a = model.evaluate(&u);
        let idx = vars
            .iter()
            .zip(&radices)
            .fold(0u128, |acc, (v, r)| acc * r + a.get(*v) as u128);
        seen[idx as usize] = true;
    }
    let missing = seen.iter().position(|s| !s).map(|mut idx| {
        let mut values = vec![0; vars.len()];
        for i in (0..vars.len()).rev() {
            values[i] = (idx % radices[i] as usize) as ValueIdx;
            idx /= radices[i] as usize;
        }
        vars.iter().copied().zip(values).collect()
    });
    Ok(DeterminationVerdict {
        holds: missing.is_none(),
        missing,
    })
}

/// The side conditions of the "SC2 comes for free" theorem, and whether its
/// conclusion holds for the given candidate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theorem1Report {
    /// The superset is causally independent.
    pub cond_a: bool,
    /// The superset is determined by the context.
    pub cond_b: bool,
    /// The superset contains every parent of the effect's variables.
    pub cond_c: bool,
    /// Some setting of the superset falsifies the effect in the context.
    pub cond_d: bool,
    /// The candidate's variables lie inside the superset.
    pub cond_e: bool,
    pub sc134: bool,
    pub sc2: bool,
    pub sufficient: bool,
    pub implication_holds: bool,
}

impl Theorem1Report {
    pub fn conditions_hold(&self) -> bool {
        self.cond_a && self.cond_b && self.cond_c && self.cond_d && self.cond_e
    }
}

pub fn verify_theorem1(
    model: &CausalModel,
    superset: &[VarId],
    cand: &Conjunction,
    phi: &Formula,
    u: &Context,
) -> Result<Theorem1Report> {
    let superset = check_vars(model, superset)?;
    let scope = PhiScope::new(model, phi)?;
    let cond_a = is_causally_independent(model, &superset)?.holds;
    let cond_b = is_determined_by_context(model, &superset)?.holds;
    // an exogenous variable in the effect has no parents to cover, but the
    // effect then depends on the context directly, so the condition fails
    let cond_c = phi.variables().iter().all(|v| {
        model.is_endogenous(*v) && model.parents(*v).iter().all(|p| superset.contains(p))
    });
    let cond_d = {
        let mut ov = model.no_overrides();
        let mut buf = vec![0; model.num_vars()];
        let choices: Vec<Vec<ValueIdx>> = superset
            .iter()
            .map(|v| (0..model.range(*v).len() as ValueIdx).collect())
            .collect();
        for_each_setting(&choices, |xs| {
            for (v, x) in superset.iter().zip(xs) {
                ov[v.index()] = Some(*x);
            }
            model.solve_into(u.values(), &ov, &mut buf);
            !scope.holds(&buf)
        })
    };
    let cond_e = cand.vars().iter().all(|v| superset.contains(v));
    let verdict = is_sufficient_cause(model, u, cand, phi)?;
    let sc134 = verdict.sc134();
    let all = cond_a && cond_b && cond_c && cond_d && cond_e;
    Ok(Theorem1Report {
        cond_a,
        cond_b,
        cond_c,
        cond_d,
        cond_e,
        sc134,
        sc2: verdict.sc2,
        sufficient: verdict.holds,
        implication_holds: !all || sc134 == verdict.holds,
    })
}
