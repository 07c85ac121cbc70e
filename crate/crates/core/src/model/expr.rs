//! Expression bodies for structural equations.
//!
//! Integers double as booleans: `0` is false, any other integer is true, and
//! boolean operators return `0` or `1`. Symbols support only `==` and `!=`.

use std::collections::BTreeSet;
use std::fmt;

use super::value::{Value, VariableId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Not,
    Neg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Or,
    And,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Add,
    Sub,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Or => "||",
            BinaryOp::And => "&&",
            BinaryOp::Eq => "==",
            BinaryOp::Ne => "!=",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
        }
    }

    /// Binding strength; larger binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinaryOp::Or => 1,
            BinaryOp::And => 2,
            BinaryOp::Eq
            | BinaryOp::Ne
            | BinaryOp::Lt
            | BinaryOp::Le
            | BinaryOp::Gt
            | BinaryOp::Ge => 3,
            BinaryOp::Add | BinaryOp::Sub => 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(Value),
    Var(VariableId),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    Ite(Box<Expr>, Box<Expr>, Box<Expr>),
    Min(Box<Expr>, Box<Expr>),
    Max(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn var(name: &VariableId) -> Expr {
        Expr::Var(name.clone())
    }

    pub fn int(v: i64) -> Expr {
        Expr::Const(Value::Int(v))
    }

    pub fn binary(op: BinaryOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn not(e: Expr) -> Expr {
        Expr::Unary(UnaryOp::Not, Box::new(e))
    }

    pub fn ite(c: Expr, a: Expr, b: Expr) -> Expr {
        Expr::Ite(Box::new(c), Box::new(a), Box::new(b))
    }

    /// Variables the expression mentions syntactically.
    pub fn references(&self) -> BTreeSet<VariableId> {
        let mut out = BTreeSet::new();
        self.collect_refs(&mut out);
        out
    }

    fn collect_refs(&self, out: &mut BTreeSet<VariableId>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(v) => {
                out.insert(v.clone());
            }
            Expr::Unary(_, e) => e.collect_refs(out),
            Expr::Binary(_, a, b) | Expr::Min(a, b) | Expr::Max(a, b) => {
                a.collect_refs(out);
                b.collect_refs(out);
            }
            Expr::Ite(c, a, b) => {
                c.collect_refs(out);
                a.collect_refs(out);
                b.collect_refs(out);
            }
        }
    }

    /// Evaluates under `env`, which must bind every referenced variable.
    pub fn eval(&self, env: &dyn Fn(&VariableId) -> Option<Value>) -> Result<Value, String> {
        match self {
            Expr::Const(v) => Ok(v.clone()),
            Expr::Var(name) => env(name).ok_or_else(|| format!("unbound variable `{name}`")),
            Expr::Unary(op, e) => {
                let v = e.eval(env)?;
                match op {
                    UnaryOp::Not => Ok(Value::from(!truth(&v)?)),
                    UnaryOp::Neg => int(&v)?
                        .checked_neg()
                        .map(Value::Int)
                        .ok_or_else(|| "integer overflow".to_string()),
                }
            }
            Expr::Binary(op, a, b) => {
                // short-circuit so `ite`-style guards on symbols behave
                match op {
                    BinaryOp::Or => {
                        if truth(&a.eval(env)?)? {
                            return Ok(Value::Int(1));
                        }
                        return Ok(Value::from(truth(&b.eval(env)?)?));
                    }
                    BinaryOp::And => {
                        if !truth(&a.eval(env)?)? {
                            return Ok(Value::Int(0));
                        }
                        return Ok(Value::from(truth(&b.eval(env)?)?));
                    }
                    _ => {}
                }
                let x = a.eval(env)?;
                let y = b.eval(env)?;
                match op {
                    BinaryOp::Eq => Ok(Value::from(x == y)),
                    BinaryOp::Ne => Ok(Value::from(x != y)),
                    BinaryOp::Lt => Ok(Value::from(int(&x)? < int(&y)?)),
                    BinaryOp::Le => Ok(Value::from(int(&x)? <= int(&y)?)),
                    BinaryOp::Gt => Ok(Value::from(int(&x)? > int(&y)?)),
                    BinaryOp::Ge => Ok(Value::from(int(&x)? >= int(&y)?)),
                    BinaryOp::Add => int(&x)?
                        .checked_add(int(&y)?)
                        .map(Value::Int)
                        .ok_or_else(|| "integer overflow".to_string()),
                    BinaryOp::Sub => int(&x)?
                        .checked_sub(int(&y)?)
                        .map(Value::Int)
                        .ok_or_else(|| "integer overflow".to_string()),
                    BinaryOp::Or | BinaryOp::And => unreachable!(),
                }
            }
            Expr::Ite(c, a, b) => {
                if truth(&c.eval(env)?)? {
                    a.eval(env)
                } else {
                    b.eval(env)
                }
            }
            Expr::Min(a, b) => Ok(Value::Int(int(&a.eval(env)?)?.min(int(&b.eval(env)?)?))),
            Expr::Max(a, b) => Ok(Value::Int(int(&a.eval(env)?)?.max(int(&b.eval(env)?)?))),
        }
    }
}

fn int(v: &Value) -> Result<i64, String> {
    v.as_int()
        .ok_or_else(|| format!("symbol `{v}` used where an integer is required"))
}

fn truth(v: &Value) -> Result<bool, String> {
    Ok(int(v)? != 0)
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(self, 0, f)
    }
}

fn write_expr(e: &Expr, min_prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e {
        Expr::Const(Value::Int(i)) if *i < 0 => {
            if min_prec > 0 {
                write!(f, "({i})")
            } else {
                write!(f, "{i}")
            }
        }
        Expr::Const(v) => write!(f, "{v}"),
        Expr::Var(v) => write!(f, "{v}"),
        Expr::Unary(op, inner) => {
            f.write_str(match op {
                UnaryOp::Not => "!",
                UnaryOp::Neg => "-",
            })?;
            if matches!((op, inner.as_ref()), (UnaryOp::Neg, Expr::Const(Value::Int(_)))) {
                // `-0` would read back as a literal
                return write!(f, "({})", inner);
            }
            write_expr(inner, 5, f)
        }
        Expr::Binary(op, a, b) => {
            let p = op.precedence();
            let paren = p < min_prec;
            if paren {
                f.write_str("(")?;
            }
            // comparisons are non-associative; arithmetic and logic are left-associative
            let left_min = if p == 3 { p + 1 } else { p };
            write_expr(a, left_min, f)?;
            write!(f, " {} ", op.symbol())?;
            write_expr(b, p + 1, f)?;
            if paren {
                f.write_str(")")?;
            }
            Ok(())
        }
        Expr::Ite(c, a, b) => {
            f.write_str("ite(")?;
            write_expr(c, 0, f)?;
            f.write_str(", ")?;
            write_expr(a, 0, f)?;
            f.write_str(", ")?;
            write_expr(b, 0, f)?;
            f.write_str(")")
        }
        Expr::Min(a, b) | Expr::Max(a, b) => {
            f.write_str(if matches!(e, Expr::Min(..)) { "min(" } else { "max(" })?;
            write_expr(a, 0, f)?;
            f.write_str(", ")?;
            write_expr(b, 0, f)?;
            f.write_str(")")
        }
    }
}
