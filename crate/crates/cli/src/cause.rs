use std::time::Instant;

use anyhow::{anyhow, Result};
use cex_core::causation::{
    is_actual_cause, is_but_for_cause, is_sufficient_cause, ActualCauseVerdict, ActualCauseWitness,
};
use cex_core::model::CausalModel;
use serde_json::json;

use crate::input;
use crate::report::{context_json, emit, events_json, QueryResult};
use crate::{CauseMode, CheckCauseArgs};

pub fn witness_json(m: &CausalModel, w: &ActualCauseWitness) -> serde_json::Value {
    json!({
        "alt_setting": events_json(m, &w.alt_setting),
        "fixed": events_json(m, &w.fixed),
    })
}

fn actual_result(m: &CausalModel, query: &'static str, v: &ActualCauseVerdict) -> QueryResult {
    let mut r = QueryResult::new(query, v.holds)
        .clause("AC1", v.ac1)
        .clause("AC2", v.ac2)
        .clause("AC3", v.ac3);
    let subsets: Vec<_> = v
        .subset_checks
        .iter()
        .map(|c| json!({ "subset": c.subset.display(m), "AC2": c.ac2 }))
        .collect();
    r.witnesses = json!({
        "failed": v.failed.map(|c| c.label()),
        "counterfactual": v.witness.as_ref().map(|w| witness_json(m, w)),
        "subset_checks": subsets,
    });
    r
}

pub fn run(a: &CheckCauseArgs, json: bool) -> Result<bool> {
    let start = Instant::now();
    let bundle = input::load_model(&a.model)?;
    let m = &bundle.model;
    let u = bundle
        .context(&a.context)
        .map_err(|e| anyhow!("context `{}`: {}", a.context, e.kind))?;
    let cand = input::conjunction(m, &a.cause)?;
    let phi = input::formula(m, &a.phi)?;
    let mut r = match a.mode {
        CauseMode::Actual => actual_result(m, "actual-cause", &is_actual_cause(m, &u, &cand, &phi)?),
        CauseMode::Butfor => actual_result(m, "but-for-cause", &is_but_for_cause(m, &u, &cand, &phi)?),
        CauseMode::Sufficient => {
            let v = is_sufficient_cause(m, &u, &cand, &phi)?;
            let mut r = QueryResult::new("sufficient-cause", v.holds)
                .clause("SC1", v.sc1)
                .clause("SC2", v.sc2)
                .clause("SC3", v.sc3)
                .clause("SC4", v.sc4);
            let subsets: Vec<_> = v
                .subset_checks
                .iter()
                .map(|c| json!({ "subset": c.subset.display(m), "SC1": c.sc1, "SC2": c.sc2, "SC3": c.sc3 }))
                .collect();
            r.witnesses = json!({
                "failed": v.failed.map(|c| c.label()),
                "sc2": v.witness.as_ref().map(|w| json!({
                    "conjunct": events_json(m, &[w.chosen_conjunct]),
                    "cause": w.cause().display(m),
                    "counterfactual": witness_json(m, &w.inner),
                })),
                "sc3_counterexample": v.sc3_counterexample.as_ref().map(|c| context_json(m, c)),
                "subset_checks": subsets,
            });
            r
        }
    };
    r.candidate = Some(cand.display(m));
    let r = r.timed(start);
    let verdict = r.verdict;
    emit(&[r], json, false);
    Ok(verdict)
}
