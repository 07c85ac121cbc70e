use std::path::Path;

use anyhow::{anyhow, bail, Context as _, Result};
use cex_core::causation::Conjunction;
use cex_core::dsl::{self, DslError, ModelBundle};
use cex_core::explanation::GoodnessPair;
use cex_core::model::{CausalModel, Formula, ValueRange, Value};
use cex_core::rational::{parse_rational, Prob};

/// Diagnostic with the offending line and a caret under the span.
fn located(what: &str, src: &str, e: &DslError) -> anyhow::Error {
    anyhow!("{what}:{}", e.render(src))
}

pub fn load_model(path: &Path) -> Result<ModelBundle> {
    let src = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    dsl::parse_model(&src).map_err(|e| located(&path.display().to_string(), &src, &e))
}

pub fn formula(model: &CausalModel, text: &str) -> Result<Formula> {
    dsl::parse_formula(model, text).map_err(|e| located("formula", text, &e))
}

pub fn conjunction(model: &CausalModel, text: &str) -> Result<Conjunction> {
    dsl::parse_conjunction(model, text).map_err(|e| located("conjunction", text, &e))
}

pub fn context_set(bundle: &ModelBundle, text: &str) -> Result<cex_core::explanation::ContextSet> {
    bundle.context_set(text).map_err(|e| anyhow!("context set `{text}`: {}", e.kind))
}

/// Thresholds as `p/q` or exact decimals; anything else, including
/// exponents, is rejected.
pub fn rational(text: &str) -> Result<Prob> {
    Ok(parse_rational(text)?)
}

pub fn goodness(alpha: &str, beta: &str) -> Result<GoodnessPair> {
    Ok(GoodnessPair::new(rational(alpha)?, rational(beta)?)?)
}

pub fn value(text: &str) -> Result<Value> {
    Ok(Value::parse_token(text.trim())?)
}

pub fn value_range(text: &str) -> Result<ValueRange> {
    let values = text.split(',').map(value).collect::<Result<Vec<_>>>()?;
    Ok(ValueRange::new(values)?)
}

/// `WxH`.
pub fn dimensions(text: &str) -> Result<(u32, u32)> {
    let (w, h) = text
        .split_once(['x', 'X'])
        .ok_or_else(|| anyhow!("grid must look like 3x3, got `{text}`"))?;
    let parse = |s: &str| s.trim().parse::<u32>().map_err(|_| anyhow!("bad grid dimension `{s}`"));
    let dims = (parse(w)?, parse(h)?);
    if dims.0 == 0 || dims.1 == 0 {
        bail!("grid dimensions must be positive");
    }
    Ok(dims)
}
