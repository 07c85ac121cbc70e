//! Explanations relative to a set of contexts, and partial explanations
//! with exact goodness.

mod explainer;
mod theorem2;

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::causation::{ActualCauseWitness, Conjunction, SufficientCauseWitness, WitnessConstraint};
use crate::error::{Error, Result};
use crate::model::{CausalModel, Context, Formula};
use crate::rational::{format_rational, in_unit_interval};

pub use explainer::Explainer;
pub use theorem2::{theorem2_measures, verify_theorem2, Theorem2Measures, Theorem2Report};

/// A set of contexts: everything, or an explicit list kept in context order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ContextSet {
    All,
    Explicit(Vec<Context>),
}

impl ContextSet {
    /// Validates and sorts the contexts; duplicates are rejected.
    pub fn explicit(model: &CausalModel, contexts: Vec<Context>) -> Result<Self> {
        let mut indexed: Vec<(u64, Context)> = contexts
            .into_iter()
            .map(|c| {
                Context::from_indices(model, c.values().to_vec()).map(|c| (model.context_index(&c), c))
            })
            .collect::<Result<_>>()?;
        indexed.sort_by_key(|(i, _)| *i);
        if let Some(w) = indexed.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidContext(format!(
                "context ({}) listed twice",
                model.display_context(&w[0].1)
            )));
        }
        Ok(ContextSet::Explicit(indexed.into_iter().map(|(_, c)| c).collect()))
    }

    /// Members in context order.
    pub fn contexts(&self, model: &CausalModel) -> Vec<Context> {
        match self {
            ContextSet::All => model.contexts().collect(),
            ContextSet::Explicit(cs) => cs.clone(),
        }
    }

    pub fn len(&self, model: &CausalModel) -> u64 {
        match self {
            ContextSet::All => model.context_count(),
            ContextSet::Explicit(cs) => cs.len() as u64,
        }
    }

    pub fn is_all(&self) -> bool {
        matches!(self, ContextSet::All)
    }
}

/// Exact probability over contexts, keyed by context index. Weights are
/// non-negative and sum to exactly one; zero weights are not stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContextDistribution {
    weights: BTreeMap<u64, BigRational>,
}

impl ContextDistribution {
    pub fn new(model: &CausalModel, entries: Vec<(Context, BigRational)>) -> Result<Self> {
        let mut weights = BTreeMap::new();
        let mut total = BigRational::zero();
        for (c, w) in entries {
            let c = Context::from_indices(model, c.values().to_vec())?;
            if w.is_negative() {
                return Err(Error::NegativeWeight(format_rational(&w)));
            }
            total += &w;
            let idx = model.context_index(&c);
            if weights.contains_key(&idx) {
                return Err(Error::InvalidContext(format!(
                    "context ({}) weighted twice",
                    model.display_context(&c)
                )));
            }
            if !w.is_zero() {
                weights.insert(idx, w);
            }
        }
        if !total.is_one() {
            return Err(Error::WeightSumNotOne(format_rational(&total)));
        }
        Ok(ContextDistribution { weights })
    }

    /// Equal weight on every member of `k`.
    pub fn uniform(model: &CausalModel, k: &ContextSet) -> Result<Self> {
        let n = k.len(model);
        if n == 0 {
            return Err(Error::EmptyRestriction);
        }
        let w = BigRational::new(1.into(), n.into());
        let weights = match k {
            ContextSet::All => (0..n).map(|i| (i, w.clone())).collect(),
            ContextSet::Explicit(cs) => cs.iter().map(|c| (model.context_index(c), w.clone())).collect(),
        };
        Ok(ContextDistribution { weights })
    }

    pub fn weight(&self, index: u64) -> BigRational {
        self.weights.get(&index).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn weight_of(&self, model: &CausalModel, u: &Context) -> BigRational {
        self.weight(model.context_index(u))
    }

    /// Non-zero entries in context order.
    pub fn support(&self) -> impl Iterator<Item = (u64, &BigRational)> {
        self.weights.iter().map(|(i, w)| (*i, w))
    }

    pub fn probability<'a>(&self, model: &CausalModel, contexts: impl IntoIterator<Item = &'a Context>) -> BigRational {
        contexts
            .into_iter()
            .fold(BigRational::zero(), |acc, c| acc + self.weight_of(model, c))
    }

    /// Conditions on the contexts satisfying `keep`, renormalizing exactly.
    pub fn condition(&self, mut keep: impl FnMut(u64) -> bool, what: &str) -> Result<Self> {
        let kept: BTreeMap<u64, BigRational> = self
            .weights
            .iter()
            .filter(|(i, _)| keep(**i))
            .map(|(i, w)| (*i, w.clone()))
            .collect();
        let total = kept.values().fold(BigRational::zero(), |a, w| a + w);
        if total.is_zero() {
            return Err(Error::ZeroProbabilityCondition(what.to_string()));
        }
        Ok(ContextDistribution {
            weights: kept.into_iter().map(|(i, w)| (i, w / &total)).collect(),
        })
    }
}

/// Goodness thresholds or achieved values, both in `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoodnessPair {
    pub alpha: BigRational,
    pub beta: BigRational,
}

impl GoodnessPair {
    pub fn new(alpha: BigRational, beta: BigRational) -> Result<Self> {
        for v in [&alpha, &beta] {
            if !in_unit_interval(v) {
                return Err(Error::InvalidGoodness(format_rational(v)));
            }
        }
        Ok(GoodnessPair { alpha, beta })
    }

    pub fn one() -> Self {
        GoodnessPair {
            alpha: BigRational::one(),
            beta: BigRational::one(),
        }
    }

    /// Both components at least those of `threshold`.
    pub fn meets(&self, threshold: &GoodnessPair) -> bool {
        self.alpha >= threshold.alpha && self.beta >= threshold.beta
    }
}

/// How the per-context necessity clause is read.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NecessityMode {
    /// Some conjunct of the candidate extends to an actual cause.
    ConjunctExtendable,
    /// Some sub-conjunction of the candidate is itself an actual cause.
    SubsetIsCause,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ContextScope {
    GivenK,
    AllContexts,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DefinitionVariant {
    pub necessity: NecessityMode,
    pub witness: WitnessConstraint,
    pub scope: ContextScope,
}

impl DefinitionVariant {
    pub fn halpern() -> Self {
        DefinitionVariant {
            necessity: NecessityMode::ConjunctExtendable,
            witness: WitnessConstraint::ActualValues,
            scope: ContextScope::GivenK,
        }
    }

    /// Subset-is-cause over all contexts, with but-for causes. Leaving the
    /// fixed values free instead makes every single variable a cause as soon
    /// as the effect can be falsified at all; that reading is available
    /// through [`WitnessConstraint::Unconstrained`].
    pub fn mmts() -> Self {
        DefinitionVariant {
            necessity: NecessityMode::SubsetIsCause,
            witness: WitnessConstraint::ButFor,
            scope: ContextScope::AllContexts,
        }
    }
}

impl Default for DefinitionVariant {
    fn default() -> Self {
        Self::halpern()
    }
}

/// Why the necessity clause holds in one context.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NecessityWitness {
    Extended(SufficientCauseWitness),
    Subset {
        cause: Conjunction,
        witness: ActualCauseWitness,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NecessityRecord {
    pub context: Context,
    pub witness: Option<NecessityWitness>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplanationVerdict {
    pub holds: bool,
    /// In partial mode: achieved alpha reaches the threshold.
    pub ex1_necessity: bool,
    /// One record per context in K where the candidate and the effect hold.
    pub ex1_necessity_contexts: Vec<NecessityRecord>,
    /// In partial mode: achieved beta reaches the threshold.
    pub ex1_sufficiency: bool,
    pub sufficiency_counterexample: Option<Context>,
    pub ex2_minimal: bool,
    /// A strict sub-conjunction that already satisfies the first clause.
    pub ex2_blocking_subset: Option<Conjunction>,
    pub ex3_witness: Option<Context>,
    pub achieved: Option<GoodnessPair>,
}

/// The members of `k` satisfying `psi`.
pub fn k_sat(model: &CausalModel, k: &ContextSet, psi: &Formula) -> Result<ContextSet> {
    psi.check(model)?;
    let mut buf = vec![0; model.num_vars()];
    let kept = k
        .contexts(model)
        .into_iter()
        .filter(|u| model.satisfies_with(u.values(), psi, &mut buf))
        .collect();
    Ok(ContextSet::Explicit(kept))
}

/// Contexts in `k` where the candidate and the effect hold and the
/// necessity clause succeeds.
pub fn k_sc2(
    model: &CausalModel,
    k: &ContextSet,
    cand: &Conjunction,
    phi: &Formula,
    variant: DefinitionVariant,
) -> Result<ContextSet> {
    let ex = Explainer::new(model, k, phi, variant)?;
    let idx = ex.k_sc2(cand)?;
    Ok(ContextSet::Explicit(idx.into_iter().map(|i| ex.contexts()[i].clone()).collect()))
}

pub fn is_explanation(
    model: &CausalModel,
    k: &ContextSet,
    cand: &Conjunction,
    phi: &Formula,
    variant: DefinitionVariant,
) -> Result<ExplanationVerdict> {
    Explainer::new(model, k, phi, variant)?.verdict(cand)
}

pub fn is_partial_explanation(
    model: &CausalModel,
    pr: &ContextDistribution,
    k: &ContextSet,
    cand: &Conjunction,
    phi: &Formula,
    g: &GoodnessPair,
    variant: DefinitionVariant,
) -> Result<ExplanationVerdict> {
    Explainer::new(model, k, phi, variant)?.partial_verdict(pr, cand, g)
}

/// All explanations with at most `max_size` conjuncts (default: one less
/// than the number of endogenous variables), smallest first. Candidates
/// never mention the effect's own variables.
pub fn find_explanations(
    model: &CausalModel,
    k: &ContextSet,
    phi: &Formula,
    variant: DefinitionVariant,
    max_size: Option<usize>,
) -> Result<Vec<(Conjunction, ExplanationVerdict)>> {
    Explainer::new(model, k, phi, variant)?.find(max_size)
}

pub fn find_partial_explanations(
    model: &CausalModel,
    pr: &ContextDistribution,
    k: &ContextSet,
    phi: &Formula,
    g: &GoodnessPair,
    variant: DefinitionVariant,
    max_size: Option<usize>,
) -> Result<Vec<(Conjunction, ExplanationVerdict)>> {
    Explainer::new(model, k, phi, variant)?.find_partial(pr, g, max_size)
}

/// A causal model with a distribution over contexts and a default context set.
#[derive(Clone, Debug)]
pub struct ProbabilisticModel {
    pub model: CausalModel,
    pub distribution: ContextDistribution,
    pub k: ContextSet,
}
