//! The engine against brute force on seeded random models.

use std::collections::BTreeSet;

use cex_core::causation::{find_actual_causes_with, is_sufficient_cause, Conjunction, WitnessConstraint};
use cex_core::explanation::{
    ContextDistribution, ContextScope, ContextSet, DefinitionVariant, Explainer, GoodnessPair, NecessityMode,
};
use cex_core::model::{CausalModel, Context, Formula};
use cex_core::naive;
use cex_core::rational::ratio;
use cex_core::verify::{random_conjunction, random_formula, random_model};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CONSTRAINTS: [WitnessConstraint; 3] = [
    WitnessConstraint::ActualValues,
    WitnessConstraint::ButFor,
    WitnessConstraint::Unconstrained,
];

fn model(rng: &mut ChaCha8Rng, max_bits: f64) -> CausalModel {
    loop {
        if let Ok(m) = random_model(rng, max_bits) {
            return m;
        }
    }
}

/// A context where `phi` holds when there is one, so causes exist.
fn interesting_context(rng: &mut ChaCha8Rng, m: &CausalModel, phi: &Formula) -> Context {
    let good: Vec<Context> = m.contexts().filter(|u| m.satisfies(u, phi).unwrap()).collect();
    if good.is_empty() || rng.gen_bool(0.1) {
        return m.context(rng.gen_range(0..m.context_count()));
    }
    good[rng.gen_range(0..good.len())].clone()
}

fn shown(m: &CausalModel, cs: impl IntoIterator<Item = Conjunction>) -> BTreeSet<String> {
    cs.into_iter().map(|c| c.display(m)).collect()
}

fn random_distribution(rng: &mut ChaCha8Rng, m: &CausalModel) -> ContextDistribution {
    let weights: Vec<u64> = m.contexts().map(|_| rng.gen_range(0..4)).collect();
    let total: u64 = weights.iter().sum::<u64>().max(1);
    let entries: Vec<_> = m
        .contexts()
        .zip(&weights)
        .filter(|(_, w)| **w > 0)
        .map(|(u, w)| (u, ratio(*w, total)))
        .collect();
    if entries.is_empty() {
        return ContextDistribution::uniform(m, &ContextSet::All).unwrap();
    }
    ContextDistribution::new(m, entries).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn actual_causes_match_brute_force(seed in any::<u64>(), bits in 4.0f64..=12.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = model(&mut rng, bits);
        let phi = random_formula(&mut rng, &m, 2);
        let u = interesting_context(&mut rng, &m, &phi);
        for c in CONSTRAINTS {
            if c == WitnessConstraint::Unconstrained && bits > 8.0 {
                continue;
            }
            let fast = find_actual_causes_with(&m, &u, &phi, c).unwrap();
            for (cause, w) in &fast {
                prop_assert!(w.verify(&m, &u, &phi, c), "witness for {}", cause.display(&m));
            }
            let fast = shown(&m, fast.into_iter().map(|(c, _)| c));
            let slow = shown(&m, naive::actual_causes(&m, &u, &phi, c));
            prop_assert_eq!(fast, slow, "{:?} effect {}", c, phi.display(&m));
        }
    }

    #[test]
    fn sufficient_causes_match_brute_force(seed in any::<u64>(), bits in 3.0f64..=9.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = model(&mut rng, bits);
        let phi = random_formula(&mut rng, &m, 2);
        let u = interesting_context(&mut rng, &m, &phi);
        let world = m.evaluate(&u);
        for _ in 0..4 {
            let cand = random_conjunction(&mut rng, &m, world.values(), 3, 0.8);
            let fast = is_sufficient_cause(&m, &u, &cand, &phi).unwrap();
            prop_assert_eq!(fast.holds, naive::is_sufficient_cause(&m, &u, &cand, &phi), "{}", cand.display(&m));
        }
    }

    #[test]
    fn explanations_match_brute_force(seed in any::<u64>(), bits in 3.0f64..=7.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = model(&mut rng, bits);
        let phi = random_formula(&mut rng, &m, 1);
        let all: Vec<_> = m.contexts().collect();
        let k: Vec<_> = all.iter().filter(|_| rng.gen_bool(0.6)).cloned().collect();
        let k = if k.is_empty() { all.clone() } else { k };
        let kset = ContextSet::explicit(&m, k.clone()).unwrap();
        let variant = DefinitionVariant {
            necessity: if rng.gen_bool(0.5) { NecessityMode::ConjunctExtendable } else { NecessityMode::SubsetIsCause },
            witness: CONSTRAINTS[rng.gen_range(0..3)],
            scope: if rng.gen_bool(0.5) { ContextScope::GivenK } else { ContextScope::AllContexts },
        };
        for v in [DefinitionVariant::halpern(), DefinitionVariant::mmts(), variant] {
            let ex = Explainer::new(&m, &kset, &phi, v).unwrap();
            let fast = shown(&m, ex.find(None).unwrap().into_iter().map(|(c, _)| c));
            let slow = shown(&m, naive::explanations(&m, &k, &phi, v));
            prop_assert_eq!(fast, slow, "{:?} effect {}", v, phi.display(&m));
        }
    }

    #[test]
    fn goodness_matches_brute_force(seed in any::<u64>(), bits in 3.0f64..=8.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = model(&mut rng, bits);
        let phi = random_formula(&mut rng, &m, 1);
        let pr = random_distribution(&mut rng, &m);
        let all: Vec<_> = m.contexts().collect();
        let u = interesting_context(&mut rng, &m, &phi);
        let world = m.evaluate(&u);
        let ex = Explainer::new(&m, &ContextSet::All, &phi, DefinitionVariant::halpern()).unwrap();
        for _ in 0..4 {
            let cand = random_conjunction(&mut rng, &m, world.values(), 2, 0.7);
            let slow = naive::goodness(&m, &pr, &all, &cand, &phi, DefinitionVariant::halpern());
            match ex.partial_verdict(&pr, &cand, &GoodnessPair::one()) {
                Ok(v) => prop_assert_eq!(v.achieved, slow),
                Err(e) => prop_assert!(slow.is_none(), "{e}"),
            }
        }
    }
}
