use std::fmt;

use crate::error::{Error, Result};

/// Position of a value inside its variable's declared range.
pub type ValueIdx = u32;

/// A discrete value: an integer or a symbolic token.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Int(i64),
    Sym(String),
}

impl Value {
    pub fn sym(s: impl Into<String>) -> Self {
        Value::Sym(s.into())
    }

    /// Reads an integer literal or a bare identifier.
    pub fn parse_token(s: &str) -> Result<Self> {
        if let Ok(i) = s.parse::<i64>() {
            return Ok(Value::Int(i));
        }
        if is_identifier(s) {
            return Ok(Value::Sym(s.to_string()));
        }
        Err(Error::Invalid(format!("not a value: {s:?}")))
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(i) => Some(*i),
            Value::Sym(_) => None,
        }
    }
}

impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::Int(v)
    }
}

impl From<i32> for Value {
    fn from(v: i32) -> Self {
        Value::Int(v as i64)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Int(v as i64)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Sym(s) => f.write_str(s),
        }
    }
}

/// Name of a variable, unique within a model.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VariableId(String);

impl VariableId {
    pub fn new(name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        if !is_identifier(&name) {
            return Err(Error::InvalidName(name));
        }
        Ok(VariableId(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for VariableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Finite, ordered, duplicate-free set of values a variable can take.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ValueRange(Vec<Value>);

impl ValueRange {
    pub fn new(values: Vec<Value>) -> Result<Self> {
        Self::named("<range>", values)
    }

    pub(crate) fn named(var: &str, values: Vec<Value>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyRange(var.to_string()));
        }
        for (i, v) in values.iter().enumerate() {
            if values[..i].contains(v) {
                return Err(Error::DuplicateValue {
                    var: var.to_string(),
                    value: v.to_string(),
                });
            }
            if let Value::Sym(s) = v {
                if !is_identifier(s) {
                    return Err(Error::Invalid(format!("symbolic value `{s}` is not an identifier")));
                }
            }
        }
        Ok(ValueRange(values))
    }

    /// `{0, 1}`.
    pub fn binary() -> Self {
        ValueRange(vec![Value::Int(0), Value::Int(1)])
    }

    pub fn ints(values: impl IntoIterator<Item = i64>) -> Result<Self> {
        Self::new(values.into_iter().map(Value::Int).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[Value] {
        &self.0
    }

    pub fn get(&self, idx: ValueIdx) -> &Value {
        &self.0[idx as usize]
    }

    pub fn index_of(&self, v: &Value) -> Option<ValueIdx> {
        self.0.iter().position(|x| x == v).map(|i| i as ValueIdx)
    }

    pub fn contains(&self, v: &Value) -> bool {
        self.0.contains(v)
    }
}

impl fmt::Display for ValueRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("}")
    }
}
