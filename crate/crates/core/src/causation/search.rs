use std::collections::BTreeSet;

use itertools::Itertools;

use super::{ActualCauseWitness, Conjunction, WitnessConstraint};
use crate::error::{Error, Result};
use crate::model::{CausalModel, Context, Formula, ValueIdx, VarId};

/// Precomputed structure for queries about one effect formula.
///
/// Only endogenous ancestors-or-self of the formula's variables can matter
/// to it ("upstream" variables). A variable held fixed at its actual value
/// is redundant unless it is both upstream and a descendant of the
/// intervened set, so witness searches only range over those.
pub(crate) struct PhiScope<'m> {
    pub(crate) model: &'m CausalModel,
    pub(crate) phi: Formula,
    upstream: Vec<bool>,
    relevant: Vec<VarId>,
    phi_endo: Vec<VarId>,
    children: Vec<Vec<VarId>>,
}

impl<'m> PhiScope<'m> {
    pub(crate) fn new(model: &'m CausalModel, phi: &Formula) -> Result<Self> {
        phi.check_plain(model)?;
        let phi_vars = phi.variables();
        let mut upstream = vec![false; model.num_vars()];
        for v in phi_vars.iter().chain(model.ancestors(&phi_vars).iter()) {
            if model.is_endogenous(*v) {
                upstream[v.index()] = true;
            }
        }
        let relevant: Vec<VarId> = model.endogenous().filter(|v| upstream[v.index()]).collect();
        let phi_endo = phi_vars.into_iter().filter(|v| model.is_endogenous(*v)).collect();
        let mut children = vec![Vec::new(); model.num_vars()];
        for v in model.endogenous() {
            for p in model.parents(v) {
                children[p.index()].push(v);
            }
        }
        Ok(PhiScope {
            model,
            phi: phi.clone(),
            upstream,
            relevant,
            phi_endo,
            children,
        })
    }

    pub(crate) fn holds(&self, values: &[ValueIdx]) -> bool {
        self.phi.holds_in(values)
    }

    /// Upstream strict descendants of `set`, excluding `set`, in variable order.
    fn fixable(&self, set: &[VarId]) -> Vec<VarId> {
        let mut seen = vec![false; self.model.num_vars()];
        let mut stack: Vec<VarId> = set.to_vec();
        while let Some(v) = stack.pop() {
            for c in &self.children[v.index()] {
                if !seen[c.index()] {
                    seen[c.index()] = true;
                    stack.push(*c);
                }
            }
        }
        for v in set {
            seen[v.index()] = false;
        }
        self.model
            .endogenous()
            .filter(|v| seen[v.index()] && self.upstream[v.index()])
            .collect()
    }

    /// Whether some intervention on every endogenous variable falsifies the formula.
    pub(crate) fn negation_achievable(&self, ctx: &[ValueIdx]) -> bool {
        let m = self.model;
        let mut ov = m.no_overrides();
        let mut buf = vec![0; m.num_vars()];
        let choices: Vec<Vec<ValueIdx>> = self
            .phi_endo
            .iter()
            .map(|v| (0..m.range(*v).len() as ValueIdx).collect())
            .collect();
        for_each_setting(&choices, |xs| {
            for (v, x) in self.phi_endo.iter().zip(xs) {
                ov[v.index()] = Some(*x);
            }
            m.solve_into(ctx, &ov, &mut buf);
            !self.phi.holds_in(&buf)
        })
    }

    /// Canonical AC2 witness for intervening on `set`, or `None`.
    ///
    /// With `flips_only`, alternative settings must differ from the actual
    /// value on every variable; this is exact for minimal sets.
    pub(crate) fn ac2(
        &self,
        ctx: &[ValueIdx],
        actual: &[ValueIdx],
        set: &[VarId],
        constraint: WitnessConstraint,
        flips_only: bool,
    ) -> Option<ActualCauseWitness> {
        if set.is_empty() {
            return None;
        }
        let m = self.model;
        let alt_choices: Vec<Vec<ValueIdx>> = set
            .iter()
            .map(|v| {
                (0..m.range(*v).len() as ValueIdx)
                    .filter(|x| !flips_only || *x != actual[v.index()])
                    .collect()
            })
            .collect();
        let mut ov = m.no_overrides();
        let mut buf = vec![0; m.num_vars()];
        let mut found: Option<(Vec<ValueIdx>, Vec<(VarId, ValueIdx)>)> = None;

        let mut try_fixed = |fixed: &[(VarId, ValueIdx)], ov: &mut Vec<Option<ValueIdx>>| {
            for (v, x) in fixed {
                ov[v.index()] = Some(*x);
            }
            let mut hit = None;
            for_each_setting(&alt_choices, |xs| {
                for (v, x) in set.iter().zip(xs) {
                    ov[v.index()] = Some(*x);
                }
                m.solve_into(ctx, ov, &mut buf);
                if !self.phi.holds_in(&buf) {
                    hit = Some(xs.to_vec());
                    true
                } else {
                    false
                }
            });
            for (v, _) in fixed {
                ov[v.index()] = None;
            }
            hit
        };

        match constraint {
            WitnessConstraint::ButFor => {
                if let Some(xs) = try_fixed(&[], &mut ov) {
                    found = Some((xs, Vec::new()));
                }
            }
            WitnessConstraint::ActualValues => {
                let pool = self.fixable(set);
                'outer: for k in 0..=pool.len() {
                    for w in pool.iter().combinations(k) {
                        let fixed: Vec<_> = w.into_iter().map(|v| (*v, actual[v.index()])).collect();
                        if let Some(xs) = try_fixed(&fixed, &mut ov) {
                            found = Some((xs, fixed));
                            break 'outer;
                        }
                    }
                }
            }
            WitnessConstraint::Unconstrained => {
                if !self.negation_achievable(ctx) {
                    return None;
                }
                let pool: Vec<VarId> = self
                    .relevant
                    .iter()
                    .copied()
                    .filter(|v| !set.contains(v))
                    .collect();
                // terminates once the pool covers the formula's variables
                'outer: for k in 0..=pool.len() {
                    for w in pool.iter().combinations(k) {
                        let w_choices: Vec<Vec<ValueIdx>> = w
                            .iter()
                            .map(|v| (0..m.range(**v).len() as ValueIdx).collect())
                            .collect();
                        let mut hit = None;
                        for_each_setting(&w_choices, |ws| {
                            let fixed: Vec<_> = w.iter().map(|v| **v).zip(ws.iter().copied()).collect();
                            match try_fixed(&fixed, &mut ov) {
                                Some(xs) => {
                                    hit = Some((xs, fixed));
                                    true
                                }
                                None => false,
                            }
                        });
                        if hit.is_some() {
                            found = hit;
                            break 'outer;
                        }
                    }
                }
            }
        }
        found.map(|(xs, fixed)| ActualCauseWitness {
            alt_setting: set.iter().copied().zip(xs).collect(),
            fixed,
        })
    }

    /// All actual causes in the given context.
    pub(crate) fn family(&self, ctx: &[ValueIdx], constraint: WitnessConstraint) -> Result<CauseFamily> {
        let m = self.model;
        let actual = m.solve(ctx, &m.no_overrides());
        if !self.phi.holds_in(&actual) {
            return Ok(CauseFamily { causes: Vec::new() });
        }
        if constraint == WitnessConstraint::Unconstrained {
            let mut causes = Vec::new();
            for v in m.endogenous() {
                if let Some(w) = self.ac2(ctx, &actual, &[v], constraint, false) {
                    causes.push((Conjunction::from_sorted(vec![(v, actual[v.index()])]), w));
                }
            }
            return Ok(CauseFamily { causes });
        }
        let n = self.relevant.len();
        let limit = m.limits().max_contexts;
        if n >= 64 || (1u64 << n) > limit {
            return Err(Error::ScaleExceeded {
                what: "cause search space".into(),
                size: 1u128 << n.min(127),
                limit,
            });
        }
        let mut masks: Vec<u64> = Vec::new();
        let mut causes = Vec::new();
        for k in 1..=n {
            for combo in (0..n).combinations(k) {
                let mask = combo.iter().fold(0u64, |acc, &i| acc | 1 << i);
                if masks.iter().any(|c| c & !mask == 0) {
                    continue;
                }
                let set: Vec<VarId> = combo.iter().map(|&i| self.relevant[i]).collect();
                if let Some(w) = self.ac2(ctx, &actual, &set, WitnessConstraint::ActualValues, true) {
                    masks.push(mask);
                    let events = set.iter().map(|v| (*v, actual[v.index()])).collect();
                    causes.push((Conjunction::from_sorted(events), w));
                }
            }
        }
        if constraint == WitnessConstraint::ButFor {
            causes.retain(|(_, w)| w.fixed.is_empty());
        }
        Ok(CauseFamily { causes })
    }
}

/// Calls `f` on each joint choice, first position most significant, until
/// it returns `true`. Returns whether it did.
pub(crate) fn for_each_setting(
    choices: &[Vec<ValueIdx>],
    mut f: impl FnMut(&[ValueIdx]) -> bool,
) -> bool {
    if choices.iter().any(|c| c.is_empty()) {
        return false;
    }
    let mut idx = vec![0usize; choices.len()];
    let mut cur: Vec<ValueIdx> = choices.iter().map(|c| c[0]).collect();
    loop {
        if f(&cur) {
            return true;
        }
        let mut k = choices.len();
        loop {
            if k == 0 {
                return false;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < choices[k].len() {
                cur[k] = choices[k][idx[k]];
                break;
            }
            idx[k] = 0;
            cur[k] = choices[k][0];
        }
    }
}

/// The actual causes of a formula in one context, smallest first.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CauseFamily {
    causes: Vec<(Conjunction, ActualCauseWitness)>,
}

impl CauseFamily {
    pub fn compute(
        model: &CausalModel,
        u: &Context,
        phi: &Formula,
        constraint: WitnessConstraint,
    ) -> Result<Self> {
        PhiScope::new(model, phi)?.family(u.values(), constraint)
    }

    pub fn causes(&self) -> &[(Conjunction, ActualCauseWitness)] {
        &self.causes
    }

    pub fn into_causes(self) -> Vec<(Conjunction, ActualCauseWitness)> {
        self.causes
    }

    pub fn is_empty(&self) -> bool {
        self.causes.is_empty()
    }

    /// First cause containing the event `var = value`.
    pub fn cause_containing(&self, var: VarId, value: ValueIdx) -> Option<&(Conjunction, ActualCauseWitness)> {
        self.causes
            .iter()
            .find(|(c, _)| c.events().contains(&(var, value)))
    }

    /// First cause all of whose events appear in `events`.
    pub fn cause_within(&self, events: &[(VarId, ValueIdx)]) -> Option<&(Conjunction, ActualCauseWitness)> {
        self.causes
            .iter()
            .find(|(c, _)| c.events().iter().all(|e| events.contains(e)))
    }

    /// Variables appearing in at least one cause.
    pub fn members(&self) -> BTreeSet<VarId> {
        self.causes.iter().flat_map(|(c, _)| c.vars()).collect()
    }
}
