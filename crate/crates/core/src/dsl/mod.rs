//! The `.cm` text format for models, contexts, distributions and context
//! sets, plus the formula syntax used by queries.
//!
//! ```text
//! model voting {
//!   exo U_A: {0, 1};
//!   endo A: {0, 1};
//!   endo WIN: {0, 1};
//!   eq A := U_A;
//!   eq WIN := A || B || C;
//!   table T (A, B) { 0 0 -> 0; default -> 1; }
//!   context all_vote { U_A = 1, U_B = 1, U_C = 1 };
//!   prob { all_vote: 1/2, { U_A = 0, U_B = 0, U_C = 0 }: 0.5 };
//!   K = all;
//!   K voters = { all_vote };
//! }
//! ```

mod lexer;
mod parser;
mod serialize;

use std::collections::BTreeMap;
use std::fmt;

use crate::causation::Conjunction;
use crate::error::Error;
use crate::explanation::{ContextDistribution, ContextSet};
use crate::model::{CausalModel, Context, Formula};

pub use serialize::serialize_model;

/// Location of a token in the source: 1-based line and column (in
/// characters), and byte offsets.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
    pub start: usize,
    pub end: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DslErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("{0}")]
    RangeViolation(String),
    #[error("probabilities sum to {0}, not 1")]
    ProbSum(String),
    #[error(transparent)]
    Model(Error),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{span}: {kind}")]
pub struct DslError {
    pub kind: DslErrorKind,
    pub span: SourceSpan,
}

impl DslError {
    pub(crate) fn new(kind: DslErrorKind, span: SourceSpan) -> Self {
        DslError { kind, span }
    }

    /// The source text the span covers.
    pub fn excerpt<'a>(&self, src: &'a str) -> &'a str {
        src.get(self.span.start..self.span.end).unwrap_or("")
    }

    /// Message plus the offending line with a caret under the span.
    pub fn render(&self, src: &str) -> String {
        let line = src.lines().nth(self.span.line.saturating_sub(1)).unwrap_or("");
        let width = self.excerpt(src).chars().count().max(1);
        format!(
            "{self}\n  {line}\n  {}{}",
            " ".repeat(self.span.column.saturating_sub(1)),
            "^".repeat(width)
        )
    }
}

/// A parsed `.cm` file.
#[derive(Clone, Debug)]
pub struct ModelBundle {
    pub name: String,
    pub model: CausalModel,
    pub named_contexts: BTreeMap<String, Context>,
    pub distribution: Option<ContextDistribution>,
    /// The default context set, if declared.
    pub k: Option<ContextSet>,
    pub named_k: BTreeMap<String, ContextSet>,
}

impl ModelBundle {
    /// A bundle with no contexts, distribution or context sets.
    pub fn bare(name: &str, model: CausalModel) -> Self {
        ModelBundle {
            name: name.to_string(),
            model,
            named_contexts: BTreeMap::new(),
            distribution: None,
            k: None,
            named_k: BTreeMap::new(),
        }
    }

    /// A named context, or an inline assignment such as `U=1, V=0`.
    pub fn context(&self, text: &str) -> Result<Context, DslError> {
        if let Some(c) = self.named_contexts.get(text.trim()) {
            return Ok(c.clone());
        }
        parse_context(&self.model, text)
    }

    /// `all`, a named context set, or a comma-separated list of contexts.
    /// An empty string yields the declared default, or everything.
    pub fn context_set(&self, text: &str) -> Result<ContextSet, DslError> {
        let t = text.trim();
        if t.is_empty() {
            return Ok(self.k.clone().unwrap_or(ContextSet::All));
        }
        if t == "all" {
            return Ok(ContextSet::All);
        }
        if let Some(k) = self.named_k.get(t) {
            return Ok(k.clone());
        }
        let mut contexts = Vec::new();
        for part in t.split(',') {
            let name = part.trim();
            match self.named_contexts.get(name) {
                Some(c) => contexts.push(c.clone()),
                None => {
                    return Err(DslError::new(
                        DslErrorKind::UnknownIdentifier(name.to_string()),
                        SourceSpan::default(),
                    ))
                }
            }
        }
        ContextSet::explicit(&self.model, contexts)
            .map_err(|e| DslError::new(DslErrorKind::Model(e), SourceSpan::default()))
    }

    /// Name of a context if one was declared for it.
    pub fn context_name(&self, c: &Context) -> Option<&str> {
        self.named_contexts
            .iter()
            .find(|(_, v)| *v == c)
            .map(|(n, _)| n.as_str())
    }
}

pub fn parse_model(text: &str) -> Result<ModelBundle, DslError> {
    parser::parse_model(text)
}

/// Parses a formula and resolves its names against `model`.
pub fn parse_formula(model: &CausalModel, text: &str) -> Result<Formula, DslError> {
    parser::parse_formula(model, text)
}

/// Parses a conjunction of events such as `A=1 & B=0`.
pub fn parse_conjunction(model: &CausalModel, text: &str) -> Result<Conjunction, DslError> {
    parser::parse_conjunction(model, text)
}

/// Parses an assignment to every exogenous variable, such as `U=1, V=0`.
pub fn parse_context(model: &CausalModel, text: &str) -> Result<Context, DslError> {
    parser::parse_context(model, text)
}
