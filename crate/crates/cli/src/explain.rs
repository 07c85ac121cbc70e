use std::time::Instant;

use anyhow::{anyhow, Result};
use cex_core::causation::{Conjunction, WitnessConstraint};
use cex_core::explanation::{
    ContextScope, DefinitionVariant, ExplanationVerdict, Explainer, GoodnessPair, NecessityMode, NecessityWitness,
};
use cex_core::model::CausalModel;
use serde_json::json;

use crate::cause::witness_json;
use crate::input;
use crate::report::{context_json, emit, events_json, QueryResult};
use crate::{ExplainArgs, NecessityFlag, Preset, ScopeFlag, WitnessFlag};

pub fn variant(a: &ExplainArgs) -> DefinitionVariant {
    let mut v = match a.definition {
        Preset::Halpern => DefinitionVariant::halpern(),
        Preset::Mmts => DefinitionVariant::mmts(),
    };
    if let Some(n) = a.necessity {
        v.necessity = match n {
            NecessityFlag::Conjunct => NecessityMode::ConjunctExtendable,
            NecessityFlag::Subset => NecessityMode::SubsetIsCause,
        };
    }
    if let Some(w) = a.witness {
        v.witness = match w {
            WitnessFlag::Actual => WitnessConstraint::ActualValues,
            WitnessFlag::Butfor => WitnessConstraint::ButFor,
            WitnessFlag::Free => WitnessConstraint::Unconstrained,
        };
    }
    if let Some(s) = a.scope {
        v.scope = match s {
            ScopeFlag::K => ContextScope::GivenK,
            ScopeFlag::All => ContextScope::AllContexts,
        };
    }
    v
}

pub fn verdict_result(m: &CausalModel, cand: &Conjunction, v: &ExplanationVerdict, partial: bool) -> QueryResult {
    let (query, names) = if partial {
        ("partial-explanation", ["EX1'.alpha", "EX1'.beta", "EX2'", "EX3'"])
    } else {
        ("explanation", ["EX1.necessity", "EX1.sufficiency", "EX2", "EX3"])
    };
    let mut r = QueryResult::new(query, v.holds)
        .clause(names[0], v.ex1_necessity)
        .clause(names[1], v.ex1_sufficiency)
        .clause(names[2], v.ex2_minimal)
        .clause(names[3], v.ex3_witness.is_some());
    r.candidate = Some(cand.display(m));
    let necessity: Vec<_> = v
        .ex1_necessity_contexts
        .iter()
        .map(|rec| {
            let witness = rec.witness.as_ref().map(|w| match w {
                NecessityWitness::Extended(sc) => json!({
                    "conjunct": events_json(m, &[sc.chosen_conjunct]),
                    "cause": sc.cause().display(m),
                    "counterfactual": witness_json(m, &sc.inner),
                }),
                NecessityWitness::Subset { cause, witness } => json!({
                    "cause": cause.display(m),
                    "counterfactual": witness_json(m, witness),
                }),
            });
            json!({ "context": context_json(m, &rec.context), "witness": witness })
        })
        .collect();
    r.witnesses = json!({
        "necessity_contexts": necessity,
        "sufficiency_counterexample": v.sufficiency_counterexample.as_ref().map(|u| context_json(m, u)),
        "blocking_subset": v.ex2_blocking_subset.as_ref().map(|c| c.display(m)),
        "ex3_context": v.ex3_witness.as_ref().map(|u| context_json(m, u)),
    });
    r.achieved_goodness = v.achieved.as_ref().map(Into::into);
    r
}

pub fn run(a: &ExplainArgs, json: bool) -> Result<bool> {
    let start = Instant::now();
    let bundle = input::load_model(&a.model)?;
    let m = &bundle.model;
    let phi = input::formula(m, &a.phi)?;
    let k = input::context_set(&bundle, &a.k)?;
    let explainer = Explainer::new(m, &k, &phi, variant(a))?;
    let thresholds = match (&a.alpha, &a.beta) {
        (None, None) => None,
        (alpha, beta) => Some(input::goodness(
            alpha.as_deref().unwrap_or("1"),
            beta.as_deref().unwrap_or("1"),
        )?),
    };
    let partial = thresholds.is_some();
    let pr = match &thresholds {
        Some(_) => Some(
            bundle
                .distribution
                .as_ref()
                .ok_or_else(|| anyhow!("--alpha/--beta need a `prob` block in the model"))?,
        ),
        None => None,
    };
    let judge = |cand: &Conjunction, g: &Option<GoodnessPair>| match (pr, g) {
        (Some(pr), Some(g)) => explainer.partial_verdict(pr, cand, g),
        _ => explainer.verdict(cand),
    };

    if let Some(text) = &a.candidate {
        let cand = input::conjunction(m, text)?;
        let v = judge(&cand, &thresholds)?;
        let r = verdict_result(m, &cand, &v, partial).timed(start);
        let verdict = r.verdict;
        emit(&[r], json, false);
        return Ok(verdict);
    }

    let found = match (pr, &thresholds) {
        (Some(pr), Some(g)) => explainer.find_partial(pr, g, a.max_size)?,
        _ => explainer.find(a.max_size)?,
    };
    let elapsed = crate::report::elapsed_ms(start);
    let results: Vec<QueryResult> = found
        .iter()
        .map(|(c, v)| {
            let mut r = verdict_result(m, c, v, partial);
            r.timing_ms = elapsed;
            r
        })
        .collect();
    let any = !results.is_empty();
    emit(&results, json, true);
    Ok(any)
}
