use std::collections::{BTreeSet, HashMap};
use std::sync::OnceLock;

use itertools::Itertools;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;

use super::{
    ContextDistribution, ContextScope, ContextSet, DefinitionVariant, ExplanationVerdict, GoodnessPair,
    NecessityMode, NecessityRecord, NecessityWitness,
};
use crate::causation::{sc2_witness, CauseFamily, Conjunction, PhiScope};
use crate::error::{Error, Result};
use crate::model::{CausalModel, Context, Formula, ValueIdx, VarId};

/// Answers explanation queries for one effect over one context set, caching
/// the actual causes found in each context.
pub struct Explainer<'m> {
    model: &'m CausalModel,
    scope: PhiScope<'m>,
    variant: DefinitionVariant,
    contexts: Vec<Context>,
    solutions: Vec<Vec<ValueIdx>>,
    phi_holds: Vec<bool>,
    families: Vec<OnceLock<Result<CauseFamily>>>,
}

impl<'m> Explainer<'m> {
    /// `k` is ignored when the variant quantifies over all contexts.
    pub fn new(model: &'m CausalModel, k: &ContextSet, phi: &Formula, variant: DefinitionVariant) -> Result<Self> {
        let scope = PhiScope::new(model, phi)?;
        let contexts = match variant.scope {
            ContextScope::AllContexts => model.contexts().collect(),
            ContextScope::GivenK => {
                let cs = k.contexts(model);
                for c in &cs {
                    Context::from_indices(model, c.values().to_vec())?;
                }
                cs
            }
        };
        let none = model.no_overrides();
        let solutions: Vec<Vec<ValueIdx>> = contexts.iter().map(|u| model.solve(u.values(), &none)).collect();
        let phi_holds = solutions.iter().map(|s| scope.holds(s)).collect();
        let families = (0..contexts.len()).map(|_| OnceLock::new()).collect();
        Ok(Explainer {
            model,
            scope,
            variant,
            contexts,
            solutions,
            phi_holds,
            families,
        })
    }

    /// The effective context set, in context order.
    pub fn contexts(&self) -> &[Context] {
        &self.contexts
    }

    pub fn variant(&self) -> DefinitionVariant {
        self.variant
    }

    fn family(&self, i: usize) -> Result<&CauseFamily> {
        self.families[i]
            .get_or_init(|| self.scope.family(self.contexts[i].values(), self.variant.witness))
            .as_ref()
            .map_err(Clone::clone)
    }

    fn check(&self, cand: &Conjunction) -> Result<()> {
        Conjunction::new(self.model, cand.events().to_vec()).map(|_| ())
    }

    /// Indices of contexts where the candidate and the effect both hold.
    fn sat(&self, cand: &Conjunction) -> Vec<usize> {
        (0..self.contexts.len())
            .filter(|&i| self.phi_holds[i] && cand.holds_in(&self.solutions[i]))
            .collect()
    }

    fn necessity(&self, i: usize, cand: &Conjunction) -> Result<Option<NecessityWitness>> {
        let family = self.family(i)?;
        Ok(match self.variant.necessity {
            NecessityMode::ConjunctExtendable => sc2_witness(family, cand).map(NecessityWitness::Extended),
            NecessityMode::SubsetIsCause => family.cause_within(cand.events()).map(|(c, w)| NecessityWitness::Subset {
                cause: c.clone(),
                witness: w.clone(),
            }),
        })
    }

    /// Indices of contexts where intervening on the candidate forces the effect.
    fn forced(&self, cand: &Conjunction) -> Vec<bool> {
        let m = self.model;
        let mut ov = m.no_overrides();
        for (v, x) in cand.events() {
            ov[v.index()] = Some(*x);
        }
        let mut buf = vec![0; m.num_vars()];
        self.contexts
            .iter()
            .map(|u| {
                m.solve_into(u.values(), &ov, &mut buf);
                self.scope.holds(&buf)
            })
            .collect()
    }

    fn first_unforced(&self, cand: &Conjunction) -> Option<usize> {
        let m = self.model;
        let mut ov = m.no_overrides();
        for (v, x) in cand.events() {
            ov[v.index()] = Some(*x);
        }
        let mut buf = vec![0; m.num_vars()];
        self.contexts.iter().position(|u| {
            m.solve_into(u.values(), &ov, &mut buf);
            !self.scope.holds(&buf)
        })
    }

    /// Both parts of the first explanation clause.
    fn ex1(&self, cand: &Conjunction) -> Result<bool> {
        if self.first_unforced(cand).is_some() {
            return Ok(false);
        }
        for i in self.sat(cand) {
            if self.necessity(i, cand)?.is_none() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Indices of contexts in K where the candidate and effect hold and the
    /// necessity clause succeeds.
    pub fn k_sc2(&self, cand: &Conjunction) -> Result<Vec<usize>> {
        self.check(cand)?;
        let mut out = Vec::new();
        for i in self.sat(cand) {
            if self.necessity(i, cand)?.is_some() {
                out.push(i);
            }
        }
        Ok(out)
    }

    pub fn verdict(&self, cand: &Conjunction) -> Result<ExplanationVerdict> {
        self.check(cand)?;
        self.verdict_with(cand, &|c| self.ex1(c))
    }

    fn verdict_with(
        &self,
        cand: &Conjunction,
        ex1_of: &(dyn Fn(&Conjunction) -> Result<bool> + Sync),
    ) -> Result<ExplanationVerdict> {
        let sat = self.sat(cand);
        let records = self.records(&sat, cand)?;
        let ex1_necessity = records.iter().all(|r| r.witness.is_some());
        let unforced = self.first_unforced(cand);
        let ex1_sufficiency = unforced.is_none();
        let mut blocking = None;
        for sub in cand.strict_subsets() {
            if ex1_of(&sub)? {
                blocking = Some(sub);
                break;
            }
        }
        let ex3_witness = sat.first().map(|&i| self.contexts[i].clone());
        Ok(ExplanationVerdict {
            holds: ex1_necessity && ex1_sufficiency && blocking.is_none() && ex3_witness.is_some(),
            ex1_necessity,
            ex1_necessity_contexts: records,
            ex1_sufficiency,
            sufficiency_counterexample: unforced.map(|i| self.contexts[i].clone()),
            ex2_minimal: blocking.is_none(),
            ex2_blocking_subset: blocking,
            ex3_witness,
            achieved: None,
        })
    }

    fn records(&self, sat: &[usize], cand: &Conjunction) -> Result<Vec<NecessityRecord>> {
        sat.iter()
            .map(|&i| {
                Ok(NecessityRecord {
                    context: self.contexts[i].clone(),
                    witness: self.necessity(i, cand)?,
                })
            })
            .collect()
    }

    fn weights(&self, pr: &ContextDistribution) -> Vec<BigRational> {
        self.contexts.iter().map(|u| pr.weight_of(self.model, u)).collect()
    }

    /// Exact achieved goodness.
    fn achieved(&self, weights: &[BigRational], cand: &Conjunction) -> Result<GoodnessPair> {
        let sat = self.sat(cand);
        let den = sat.iter().fold(BigRational::zero(), |a, &i| a + &weights[i]);
        if den.is_zero() {
            return Err(Error::ZeroProbabilityCondition(format!(
                "{} together with the effect",
                cand.display(self.model)
            )));
        }
        let mut num = BigRational::zero();
        for &i in &sat {
            if !weights[i].is_zero() && self.necessity(i, cand)?.is_some() {
                num += &weights[i];
            }
        }
        let beta = self
            .forced(cand)
            .iter()
            .zip(weights)
            .filter(|(f, _)| **f)
            .fold(BigRational::zero(), |a, (_, w)| a + w);
        Ok(GoodnessPair { alpha: num / den, beta })
    }

    /// Partial explanation at thresholds `g`; achieved goodness is exact.
    pub fn partial_verdict(
        &self,
        pr: &ContextDistribution,
        cand: &Conjunction,
        g: &GoodnessPair,
    ) -> Result<ExplanationVerdict> {
        self.check(cand)?;
        let weights = self.weights(pr);
        self.partial_verdict_with(&weights, cand, g, &|c| self.meets(&weights, c, g))
    }

    /// Whether a sub-candidate reaches both thresholds; an undefined
    /// conditional counts as not reaching them.
    fn meets(&self, weights: &[BigRational], cand: &Conjunction, g: &GoodnessPair) -> Result<bool> {
        match self.achieved(weights, cand) {
            Ok(a) => Ok(a.meets(g)),
            Err(Error::ZeroProbabilityCondition(_)) => Ok(false),
            Err(e) => Err(e),
        }
    }

    fn partial_verdict_with(
        &self,
        weights: &[BigRational],
        cand: &Conjunction,
        g: &GoodnessPair,
        meets_of: &(dyn Fn(&Conjunction) -> Result<bool> + Sync),
    ) -> Result<ExplanationVerdict> {
        let achieved = self.achieved(weights, cand)?;
        let sat = self.sat(cand);
        let records = self.records(&sat, cand)?;
        let mut blocking = None;
        for sub in cand.strict_subsets() {
            if meets_of(&sub)? {
                blocking = Some(sub);
                break;
            }
        }
        let ex1_necessity = achieved.alpha >= g.alpha;
        let ex1_sufficiency = achieved.beta >= g.beta;
        let ex3_witness = sat.first().map(|&i| self.contexts[i].clone());
        Ok(ExplanationVerdict {
            holds: ex1_necessity && ex1_sufficiency && blocking.is_none() && ex3_witness.is_some(),
            ex1_necessity,
            ex1_necessity_contexts: records,
            ex1_sufficiency,
            sufficiency_counterexample: self.first_unforced(cand).map(|i| self.contexts[i].clone()),
            ex2_minimal: blocking.is_none(),
            ex2_blocking_subset: blocking,
            ex3_witness,
            achieved: Some(achieved),
        })
    }

    /// Every conjunction over non-effect endogenous variables that holds
    /// together with the effect in some context, smallest first.
    fn candidates(&self, max_size: Option<usize>) -> Result<Vec<Conjunction>> {
        let m = self.model;
        let phi_vars = self.scope.phi.variables();
        let vars: Vec<VarId> = m.endogenous().filter(|v| !phi_vars.contains(v)).collect();
        let max = max_size
            .unwrap_or_else(|| m.num_endogenous().saturating_sub(1))
            .min(vars.len());
        let subsets: u128 = (1..=max).map(|k| binomial(vars.len(), k)).sum();
        let limit = m.limits().max_contexts;
        if subsets > limit as u128 {
            return Err(Error::ScaleExceeded {
                what: "candidate variable sets".into(),
                size: subsets,
                limit,
            });
        }
        let holding: Vec<usize> = (0..self.contexts.len()).filter(|&i| self.phi_holds[i]).collect();
        let mut out = Vec::new();
        for k in 1..=max {
            for combo in vars.iter().combinations(k) {
                let mut seen: BTreeSet<Vec<ValueIdx>> = BTreeSet::new();
                for &i in &holding {
                    seen.insert(combo.iter().map(|v| self.solutions[i][v.index()]).collect());
                }
                for values in seen {
                    let events = combo.iter().map(|v| **v).zip(values).collect();
                    out.push(Conjunction::from_sorted(events));
                }
            }
        }
        Ok(out)
    }

    fn warm_families(&self) -> Result<()> {
        (0..self.contexts.len())
            .into_par_iter()
            .filter(|&i| self.phi_holds[i])
            .try_for_each(|i| self.family(i).map(|_| ()))
    }

    /// All explanations with at most `max_size` conjuncts.
    pub fn find(&self, max_size: Option<usize>) -> Result<Vec<(Conjunction, ExplanationVerdict)>> {
        let cands = self.candidates(max_size)?;
        self.warm_families()?;
        let ex1: HashMap<Conjunction, bool> = cands
            .par_iter()
            .map(|c| self.ex1(c).map(|ok| (c.clone(), ok)))
            .collect::<Result<_>>()?;
        let lookup = |c: &Conjunction| Ok(ex1.get(c).copied().unwrap_or(false));
        let mut out = Vec::new();
        for c in &cands {
            if !ex1[c] || c.strict_subsets().iter().any(|s| ex1.get(s).copied().unwrap_or(false)) {
                continue;
            }
            let v = self.verdict_with(c, &lookup)?;
            debug_assert!(v.holds);
            out.push((c.clone(), v));
        }
        Ok(out)
    }

    /// All partial explanations at thresholds `g` with at most `max_size`
    /// conjuncts. Candidates whose conditioning event has probability zero
    /// are skipped.
    pub fn find_partial(
        &self,
        pr: &ContextDistribution,
        g: &GoodnessPair,
        max_size: Option<usize>,
    ) -> Result<Vec<(Conjunction, ExplanationVerdict)>> {
        let cands = self.candidates(max_size)?;
        self.warm_families()?;
        let weights = self.weights(pr);
        let meets: HashMap<Conjunction, bool> = cands
            .par_iter()
            .map(|c| self.meets(&weights, c, g).map(|ok| (c.clone(), ok)))
            .collect::<Result<_>>()?;
        let lookup = |c: &Conjunction| Ok(meets.get(c).copied().unwrap_or(false));
        let mut out = Vec::new();
        for c in &cands {
            if !meets[c] || c.strict_subsets().iter().any(|s| meets.get(s).copied().unwrap_or(false)) {
                continue;
            }
            let v = self.partial_verdict_with(&weights, c, g, &lookup)?;
            if v.holds {
                out.push((c.clone(), v));
            }
        }
        Ok(out)
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i as u128 + 1))
}
