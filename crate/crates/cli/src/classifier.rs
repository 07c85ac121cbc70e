use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use anyhow::{anyhow, bail, Context as _, Result};
use cex_core::classifier::{
    explain_absence, lift_classifier, net_covers, parity_distribution, pixel_net, rare_event_reweight, GridSpec,
    ImageDistribution, Labeler, LabelerKind,
};
use cex_core::dsl::{serialize_model, ModelBundle};
use cex_core::explanation::ProbabilisticModel;
use cex_core::model::{Value, ValueRange};
use serde_json::json;

use crate::input;
use crate::report::{elapsed_ms, emit, QueryResult};
use crate::{ClassifierCommand, GridArgs, LiftArgs};

fn grid(a: &GridArgs) -> Result<GridSpec> {
    let (w, h) = input::dimensions(&a.grid)?;
    Ok(GridSpec::new(w, h, input::value_range(&a.range)?)?)
}

/// Lines `v v .. -> label`, plus an optional `default -> label`.
fn table_labeler(path: &Path, grid: &GridSpec) -> Result<Labeler> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut rows = BTreeMap::new();
    let mut default = None;
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (lhs, rhs) = line
            .split_once("->")
            .ok_or_else(|| anyhow!("{}:{}: expected `pixels -> label`", path.display(), n + 1))?;
        let label = input::value(rhs)?;
        if lhs.trim() == "default" {
            default = Some(label);
            continue;
        }
        let image = lhs.split_whitespace().map(input::value).collect::<Result<Vec<_>>>()?;
        if image.len() != grid.pixel_count() {
            bail!("{}:{}: expected {} pixel values", path.display(), n + 1, grid.pixel_count());
        }
        rows.insert(image, label);
    }
    let mut labels: Vec<Value> = rows.values().chain(&default).cloned().collect();
    labels.sort();
    labels.dedup();
    Ok(Labeler {
        kind: LabelerKind::Table { rows, default },
        label_range: ValueRange::new(labels)?,
    })
}

fn labeler(spec: &str, grid: &GridSpec) -> Result<Labeler> {
    Ok(match spec.split_once(':') {
        None if spec == "any-on" => Labeler::any_on(),
        None if spec == "parity" => Labeler::parity_first_pixel(),
        Some(("threshold", k)) => Labeler::threshold(k.trim().parse().map_err(|_| anyhow!("bad threshold `{k}`"))?),
        Some(("table", file)) => table_labeler(Path::new(file), grid)?,
        _ => bail!("unknown labeler `{spec}`; use any-on, parity, threshold:K or table:FILE"),
    })
}

fn distribution(a: &LiftArgs, grid: &GridSpec) -> Result<ImageDistribution> {
    if a.uniform {
        return Ok(ImageDistribution::uniform(grid)?);
    }
    match a.dist.as_str() {
        "uniform" => Ok(ImageDistribution::uniform(grid)?),
        "parity" => {
            let n = grid.pixel_count();
            if grid.height() != 1 || n < 3 || n.is_multiple_of(2) {
                bail!("the parity distribution needs a single row of 2n+1 pixels");
            }
            Ok(parity_distribution((n as u32 - 1) / 2)?)
        }
        file => {
            let text = std::fs::read_to_string(file).with_context(|| format!("reading {file}"))?;
            Ok(ImageDistribution::parse(grid, &text)?)
        }
    }
}

fn lift(a: &LiftArgs) -> Result<(GridSpec, ImageDistribution, ProbabilisticModel)> {
    let grid = grid(&a.grid)?;
    let labeler = labeler(&a.labeler, &grid)?;
    let dist = distribution(a, &grid)?;
    let pm = lift_classifier(&grid, &labeler, &dist)?;
    Ok((grid, dist, pm))
}

fn write_or_print(out: &Option<std::path::PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            crate::report::write_out(text);
            Ok(())
        }
    }
}

pub fn run(c: &ClassifierCommand, json: bool) -> Result<bool> {
    let start = Instant::now();
    match c {
        ClassifierCommand::Lift { lift: a, name, out } => {
            let (_, _, pm) = lift(a)?;
            let mut bundle = ModelBundle::bare(name, pm.model);
            bundle.distribution = Some(pm.distribution);
            bundle.k = Some(pm.k);
            write_or_print(out, &serialize_model(&bundle))?;
            Ok(true)
        }
        ClassifierCommand::Reweight { lift: a, condition, out } => {
            let (grid, dist, pm) = lift(a)?;
            let cond = input::formula(&pm.model, condition)?;
            let reweighted = rare_event_reweight(&pm.model, &grid, &dist, &cond)?;
            write_or_print(out, &reweighted.to_text())?;
            Ok(true)
        }
        ClassifierCommand::Absence {
            model,
            label,
            alpha,
            beta,
            k,
            max_size,
        } => {
            let bundle = input::load_model(model)?;
            let k = input::context_set(&bundle, k)?;
            let distribution = bundle
                .distribution
                .clone()
                .ok_or_else(|| anyhow!("{} has no `prob` block", model.display()))?;
            let pm = ProbabilisticModel {
                model: bundle.model.clone(),
                distribution,
                k: k.clone(),
            };
            let g = input::goodness(alpha, beta)?;
            let found = explain_absence(&pm, &k, &input::value(label)?, &g, *max_size)?;
            let elapsed = elapsed_ms(start);
            let results: Vec<QueryResult> = found
                .iter()
                .map(|(cand, achieved)| {
                    let mut r = QueryResult::new("absence-explanation", true);
                    r.candidate = Some(cand.display(&pm.model));
                    r.achieved_goodness = Some(achieved.into());
                    r.timing_ms = elapsed;
                    r
                })
                .collect();
            let any = !results.is_empty();
            emit(&results, json, true);
            Ok(any)
        }
        ClassifierCommand::Net { grid: g, min_size } => {
            let grid = grid(g)?;
            let net = pixel_net(&grid, *min_size);
            let covers = net_covers(&grid, &net, *min_size);
            let mut r = QueryResult::new("pixel-net", covers).clause("covers", covers);
            let names: Vec<&str> = net.iter().map(|v| v.as_str()).collect();
            r.witnesses = json!({ "net": names });
            emit(&[r.timed(start)], json, false);
            Ok(covers)
        }
    }
}
