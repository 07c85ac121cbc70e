use num_rational::BigRational;
use num_traits::Zero;

use super::{ContextDistribution, ContextSet, DefinitionVariant, Explainer, GoodnessPair};
use crate::causation::{for_each_setting, Conjunction};
use crate::classifier::depth_two_shape;
use crate::error::{Error, Result};
use crate::model::{CausalModel, Formula, ValueIdx};

/// The three sufficient conditions for a partial explanation of an output
/// value in a depth-two model, next to the direct verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theorem2Report {
    /// Intervening on the candidate forces the output with probability at least beta.
    pub cond1: bool,
    /// No non-empty strict sub-candidate forces it with probability at least beta.
    pub cond2: bool,
    /// Given the candidate and the output, the output can be flipped by
    /// resetting the candidate pixels with probability at least alpha.
    pub cond3: bool,
    pub forced_probability: BigRational,
    pub flippable_probability: BigRational,
    pub direct_verdict: bool,
    pub implication_holds: bool,
}

/// The probabilities the three conditions compare against.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theorem2Measures {
    /// Probability that intervening on the candidate yields the output value.
    pub forced: BigRational,
    /// Largest such probability over non-empty strict sub-candidates, if any.
    pub best_subset_forced: Option<BigRational>,
    /// Probability, given the candidate and the output, that some reset of
    /// the candidate pixels changes the output.
    pub flippable: BigRational,
}

pub fn theorem2_measures(
    model: &CausalModel,
    pr: &ContextDistribution,
    cand: &Conjunction,
    output_value: ValueIdx,
) -> Result<Theorem2Measures> {
    let shape = depth_two_shape(model)?;
    if let Some((v, _)) = cand.events().iter().find(|(v, _)| !shape.pixels.contains(v)) {
        return Err(Error::Invalid(format!("{} is not a pixel", model.name(*v))));
    }
    if output_value as usize >= model.range(shape.output).len() {
        return Err(Error::ValueOutOfRange {
            var: model.name(shape.output).to_string(),
            value: format!("#{output_value}"),
        });
    }
    let out = shape.output.index();
    let contexts: Vec<_> = model.contexts().collect();
    let weights: Vec<BigRational> = contexts.iter().map(|u| pr.weight_of(model, u)).collect();
    let mut buf = vec![0; model.num_vars()];

    let mut forced_prob = |c: &Conjunction| {
        let mut ov = model.no_overrides();
        for (v, x) in c.events() {
            ov[v.index()] = Some(*x);
        }
        contexts.iter().zip(&weights).fold(BigRational::zero(), |acc, (u, w)| {
            model.solve_into(u.values(), &ov, &mut buf);
            if buf[out] == output_value {
                acc + w
            } else {
                acc
            }
        })
    };
    let forced = forced_prob(cand);
    let best_subset_forced = cand.strict_subsets().iter().map(&mut forced_prob).max();

    let choices: Vec<Vec<ValueIdx>> = cand
        .vars()
        .iter()
        .map(|v| (0..model.range(*v).len() as ValueIdx).collect())
        .collect();
    let none = model.no_overrides();
    let mut den = BigRational::zero();
    let mut num = BigRational::zero();
    for (u, w) in contexts.iter().zip(&weights) {
        model.solve_into(u.values(), &none, &mut buf);
        if buf[out] != output_value || !cand.holds_in(&buf) {
            continue;
        }
        den += w;
        let mut ov = model.no_overrides();
        let flippable = for_each_setting(&choices, |xs| {
            for (v, x) in cand.vars().iter().zip(xs) {
                ov[v.index()] = Some(*x);
            }
            model.solve_into(u.values(), &ov, &mut buf);
            buf[out] != output_value
        });
        if flippable {
            num += w;
        }
    }
    if den.is_zero() {
        return Err(Error::ZeroProbabilityCondition(format!(
            "{} together with {}={}",
            cand.display(model),
            model.name(shape.output),
            model.value(shape.output, output_value)
        )));
    }
    Ok(Theorem2Measures {
        forced,
        best_subset_forced,
        flippable: num / den,
    })
}

pub fn verify_theorem2(
    model: &CausalModel,
    pr: &ContextDistribution,
    cand: &Conjunction,
    output_value: ValueIdx,
    g: &GoodnessPair,
) -> Result<Theorem2Report> {
    let cand = Conjunction::new(model, cand.events().to_vec())?;
    let m = theorem2_measures(model, pr, &cand, output_value)?;
    let cond1 = g.beta <= m.forced;
    let cond2 = m.best_subset_forced.as_ref().is_none_or(|p| *p < g.beta);
    let cond3 = g.alpha <= m.flippable;

    let output = depth_two_shape(model)?.output;
    let phi = Formula::event(output, output_value);
    let direct = Explainer::new(model, &ContextSet::All, &phi, DefinitionVariant::halpern())?
        .partial_verdict(pr, &cand, g)?
        .holds;
    Ok(Theorem2Report {
        cond1,
        cond2,
        cond3,
        forced_probability: m.forced,
        flippable_probability: m.flippable,
        direct_verdict: direct,
        implication_holds: !(cond1 && cond2 && cond3) || direct,
    })
}
