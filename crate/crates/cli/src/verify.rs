use std::fmt::Write as _;
use std::time::Instant;

use anyhow::{bail, Result};
use cex_core::explanation::{ContextDistribution, ContextSet};
use cex_core::verify::{theorem1_on_model, theorem1_random, theorem2_on_model, theorem2_random, EffectShape, VerifySummary};
use serde::Serialize;

use crate::input;
use crate::report::{elapsed_ms, print_json, write_out};
use crate::{Effects, Theorem, VerifyArgs};

#[derive(Serialize)]
struct VerifyReport {
    query: &'static str,
    theorem: u8,
    source: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    verdict: bool,
    checked: usize,
    conditions_met: usize,
    implication_failures: usize,
    skipped: usize,
    counterexample: Option<String>,
    timing_ms: f64,
}

pub fn run(a: &VerifyArgs, json: bool) -> Result<bool> {
    let start = Instant::now();
    let theorem = match a.theorem {
        Theorem::One => 1,
        Theorem::Two => 2,
    };
    let (source, seed, s): (String, Option<u64>, VerifySummary) = match (&a.model, a.trials) {
        (Some(path), _) => {
            let bundle = input::load_model(path)?;
            let s = match a.theorem {
                Theorem::One => theorem1_on_model(&bundle.model)?,
                Theorem::Two => {
                    let pr = match bundle.distribution {
                        Some(pr) => pr,
                        None => ContextDistribution::uniform(&bundle.model, &ContextSet::All)?,
                    };
                    theorem2_on_model(&bundle.model, &pr)?
                }
            };
            (path.display().to_string(), None, s)
        }
        (None, Some(trials)) => {
            let s = match a.theorem {
                Theorem::One => {
                    let shape = match a.effects {
                        Effects::One => EffectShape::OneVariable,
                        Effects::Any => EffectShape::AnyFormula,
                    };
                    theorem1_random(trials, a.seed, shape)?
                }
                Theorem::Two => theorem2_random(trials, a.seed)?,
            };
            ("random".to_string(), Some(a.seed), s)
        }
        (None, None) => bail!("give --model or --trials"),
    };
    let report = VerifyReport {
        query: "verify",
        theorem,
        source,
        seed,
        verdict: s.passed(),
        checked: s.checked,
        conditions_met: s.conditions_met,
        implication_failures: s.implication_failures,
        skipped: s.skipped,
        counterexample: s.counterexample.clone(),
        timing_ms: elapsed_ms(start),
    };
    if json {
        print_json(&report);
    } else {
        let mut out = String::new();
        let _ = writeln!(out, "theorem {theorem} on {}", report.source);
        let _ = writeln!(out, "  held         {}/{}", s.checked - s.implication_failures, s.checked);
        let _ = writeln!(out, "  conditions   {} met", s.conditions_met);
        if s.skipped > 0 {
            let _ = writeln!(out, "  skipped      {} (undefined conditional)", s.skipped);
        }
        if let Some(c) = &s.counterexample {
            let _ = writeln!(out, "  counterexample: {c}");
        }
        let _ = writeln!(out, "  time         {} ms", report.timing_ms);
        write_out(&out);
    }
    Ok(s.passed())
}
