use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::lexer::{lex, Tok, Token};
use super::{DslError, DslErrorKind, ModelBundle, SourceSpan};
use crate::causation::Conjunction;
use crate::error::Error;
use crate::explanation::{ContextDistribution, ContextSet};
use crate::model::{
    BinaryOp, CausalModel, Context, Expr, Formula, Intervention, Limits, Signature, StructuralEquation,
    TableEquation, UnaryOp, Value, ValueIdx, ValueRange, VarId, VariableId,
};
use crate::rational::{format_rational, parse_rational};

type PResult<T> = Result<T, DslError>;

fn syntax(msg: impl Into<String>, span: SourceSpan) -> DslError {
    DslError::new(DslErrorKind::Syntax(msg.into()), span)
}

fn model_err(e: Error, span: SourceSpan) -> DslError {
    DslError::new(DslErrorKind::Model(e), span)
}

fn join(a: SourceSpan, b: SourceSpan) -> SourceSpan {
    SourceSpan { end: b.end, ..a }
}

struct Cursor {
    toks: Vec<Token>,
    pos: usize,
}

impl Cursor {
    fn new(src: &str) -> PResult<Self> {
        Ok(Cursor { toks: lex(src)?, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        &self.toks[(self.pos + n).min(self.toks.len() - 1)].tok
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].span
    }

    fn prev_span(&self) -> SourceSpan {
        self.toks[self.pos.saturating_sub(1)].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn unexpected(&self, expected: &str) -> DslError {
        syntax(format!("expected {expected}, found {}", self.peek().describe()), self.span())
    }

    fn expect(&mut self, t: Tok, expected: &str) -> PResult<SourceSpan> {
        if self.peek() == &t {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn ident(&mut self, expected: &str) -> PResult<(String, SourceSpan)> {
        match self.peek().clone() {
            Tok::Ident(s) => Ok((s, self.bump().span)),
            _ => Err(self.unexpected(expected)),
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn end(&self) -> PResult<()> {
        if self.peek() == &Tok::Eof {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    /// An integer (optionally negative) or a bare symbol.
    fn value(&mut self) -> PResult<Lit> {
        let start = self.span();
        let negative = self.eat(&Tok::Minus);
        match self.peek().clone() {
            Tok::Number(n) => {
                let span = join(start, self.bump().span);
                let text = if negative { format!("-{n}") } else { n };
                let v = text
                    .parse::<i64>()
                    .map_err(|_| syntax(format!("`{text}` is not an integer value"), span))?;
                Ok(Lit {
                    value: Value::Int(v),
                    span,
                })
            }
            Tok::Ident(s) if !negative => {
                let span = self.bump().span;
                Ok(Lit {
                    value: Value::Sym(s),
                    span,
                })
            }
            _ => Err(self.unexpected("a value")),
        }
    }

    /// `p/q`, an integer, or an exact decimal.
    fn rational(&mut self) -> PResult<(BigRational, SourceSpan)> {
        let Tok::Number(num) = self.peek().clone() else {
            return Err(self.unexpected("a probability"));
        };
        let start = self.bump().span;
        let (text, span) = if self.eat(&Tok::Slash) {
            let Tok::Number(den) = self.peek().clone() else {
                return Err(self.unexpected("a denominator"));
            };
            (format!("{num}/{den}"), join(start, self.bump().span))
        } else {
            (num, start)
        };
        let r = parse_rational(&text).map_err(|e| model_err(e, span))?;
        Ok((r, span))
    }

    /// `V = value` pairs separated by commas.
    fn assignments(&mut self, close: &Tok) -> PResult<Vec<Assign>> {
        let mut out = Vec::new();
        if self.peek() == close {
            return Ok(out);
        }
        loop {
            let (var, var_span) = self.ident("a variable name")?;
            self.expect(Tok::Eq, "`=`")?;
            let value = self.value()?;
            out.push(Assign { var, var_span, value });
            if !self.eat(&Tok::Comma) {
                return Ok(out);
            }
        }
    }
}

#[derive(Clone, Debug)]
struct Lit {
    value: Value,
    span: SourceSpan,
}

#[derive(Clone, Debug)]
struct Assign {
    var: String,
    var_span: SourceSpan,
    value: Lit,
}

#[derive(Clone, Debug)]
enum RawExpr {
    Int(i64),
    Ident(String, SourceSpan),
    Unary(UnaryOp, Box<RawExpr>),
    Binary(BinaryOp, Box<RawExpr>, Box<RawExpr>),
    Ite(Box<RawExpr>, Box<RawExpr>, Box<RawExpr>),
    Min(Box<RawExpr>, Box<RawExpr>),
    Max(Box<RawExpr>, Box<RawExpr>),
}

fn binary_op(t: &Tok) -> Option<BinaryOp> {
    Some(match t {
        Tok::OrOr => BinaryOp::Or,
        Tok::AndAnd => BinaryOp::And,
        Tok::EqEq => BinaryOp::Eq,
        Tok::Ne => BinaryOp::Ne,
        Tok::Lt => BinaryOp::Lt,
        Tok::Le => BinaryOp::Le,
        Tok::Gt => BinaryOp::Gt,
        Tok::Ge => BinaryOp::Ge,
        Tok::Plus => BinaryOp::Add,
        Tok::Minus => BinaryOp::Sub,
        _ => return None,
    })
}

impl Cursor {
    fn expr(&mut self) -> PResult<RawExpr> {
        self.binary(1)
    }

    fn binary(&mut self, min: u8) -> PResult<RawExpr> {
        let mut lhs = self.unary()?;
        while let Some(op) = binary_op(self.peek()) {
            let p = op.precedence();
            if p < min {
                break;
            }
            self.bump();
            let rhs = self.binary(p + 1)?;
            lhs = RawExpr::Binary(op, Box::new(lhs), Box::new(rhs));
            if p == 3 && binary_op(self.peek()).is_some_and(|o| o.precedence() == 3) {
                return Err(syntax("comparisons cannot be chained; add parentheses", self.span()));
            }
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<RawExpr> {
        if self.eat(&Tok::Bang) {
            return Ok(RawExpr::Unary(UnaryOp::Not, Box::new(self.unary()?)));
        }
        if self.peek() == &Tok::Minus {
            if let Tok::Number(_) = self.peek_at(1) {
                let lit = self.value()?;
                return Ok(RawExpr::Int(lit.value.as_int().expect("numeric literal")));
            }
            self.bump();
            return Ok(RawExpr::Unary(UnaryOp::Neg, Box::new(self.unary()?)));
        }
        self.primary()
    }

    fn primary(&mut self) -> PResult<RawExpr> {
        match self.peek().clone() {
            Tok::Number(_) => {
                let lit = self.value()?;
                Ok(RawExpr::Int(lit.value.as_int().expect("numeric literal")))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) if matches!(name.as_str(), "ite" | "min" | "max") && self.peek_at(1) == &Tok::LParen => {
                self.bump();
                self.bump();
                let a = self.expr()?;
                self.expect(Tok::Comma, "`,`")?;
                let b = self.expr()?;
                let e = if name == "ite" {
                    self.expect(Tok::Comma, "`,`")?;
                    let c = self.expr()?;
                    RawExpr::Ite(Box::new(a), Box::new(b), Box::new(c))
                } else if name == "min" {
                    RawExpr::Min(Box::new(a), Box::new(b))
                } else {
                    RawExpr::Max(Box::new(a), Box::new(b))
                };
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => Ok(RawExpr::Ident(name, self.bump().span)),
            _ => Err(self.unexpected("an expression")),
        }
    }
}

fn resolve_expr(raw: RawExpr, vars: &HashMap<String, VarDecl>, symbols: &BTreeSet<String>) -> PResult<Expr> {
    let r = |e: Box<RawExpr>| resolve_expr(*e, vars, symbols).map(Box::new);
    Ok(match raw {
        RawExpr::Int(i) => Expr::Const(Value::Int(i)),
        RawExpr::Ident(name, span) => {
            if vars.contains_key(&name) {
                Expr::Var(VariableId::new(name).map_err(|e| model_err(e, span))?)
            } else if symbols.contains(&name) {
                Expr::Const(Value::Sym(name))
            } else {
                return Err(DslError::new(DslErrorKind::UnknownIdentifier(name), span));
            }
        }
        RawExpr::Unary(op, e) => Expr::Unary(op, r(e)?),
        RawExpr::Binary(op, a, b) => Expr::Binary(op, r(a)?, r(b)?),
        RawExpr::Ite(c, a, b) => Expr::Ite(r(c)?, r(a)?, r(b)?),
        RawExpr::Min(a, b) => Expr::Min(r(a)?, r(b)?),
        RawExpr::Max(a, b) => Expr::Max(r(a)?, r(b)?),
    })
}

#[derive(Clone, Debug)]
struct VarDecl {
    exogenous: bool,
    range: ValueRange,
    span: SourceSpan,
}

struct TableAst {
    parents: Vec<(String, SourceSpan)>,
    rows: Vec<(Vec<Lit>, Lit, SourceSpan)>,
    default: Option<Lit>,
}

enum BodyAst {
    Expr(RawExpr),
    Table(TableAst),
}

struct EqAst {
    target: String,
    span: SourceSpan,
    body: BodyAst,
}

enum CtxRef {
    Named(String, SourceSpan),
    Inline(Vec<Assign>, SourceSpan),
}

struct KAst {
    name: Option<String>,
    span: SourceSpan,
    members: Option<Vec<CtxRef>>,
}

#[derive(Default)]
struct FileAst {
    name: String,
    decls: Vec<(String, bool, Vec<Lit>, SourceSpan, SourceSpan)>,
    eqs: Vec<EqAst>,
    contexts: Vec<(String, SourceSpan, Vec<Assign>)>,
    prob: Option<(SourceSpan, Vec<(CtxRef, BigRational, SourceSpan)>)>,
    ks: Vec<KAst>,
}

impl Cursor {
    fn file(&mut self) -> PResult<FileAst> {
        let mut ast = FileAst::default();
        if !self.at_keyword("model") {
            return Err(self.unexpected("`model`"));
        }
        self.bump();
        ast.name = self.ident("a model name")?.0;
        self.expect(Tok::LBrace, "`{`")?;
        while self.peek() != &Tok::RBrace {
            let (kw, kw_span) = self.ident("a declaration")?;
            match kw.as_str() {
                "exo" | "endo" => {
                    let (name, span) = self.ident("a variable name")?;
                    self.expect(Tok::Colon, "`:`")?;
                    let open = self.expect(Tok::LBrace, "`{`")?;
                    let mut values = Vec::new();
                    if self.peek() != &Tok::RBrace {
                        loop {
                            values.push(self.value()?);
                            if !self.eat(&Tok::Comma) {
                                break;
                            }
                        }
                    }
                    let close = self.expect(Tok::RBrace, "`,` or `}`")?;
                    self.expect(Tok::Semi, "`;`")?;
                    ast.decls.push((name, kw == "exo", values, span, join(open, close)));
                }
                "eq" => {
                    let (target, span) = self.ident("a variable name")?;
                    self.expect(Tok::Assign, "`:=`")?;
                    let body = self.expr()?;
                    self.expect(Tok::Semi, "`;`")?;
                    ast.eqs.push(EqAst {
                        target,
                        span,
                        body: BodyAst::Expr(body),
                    });
                }
                "table" => {
                    let (target, span) = self.ident("a variable name")?;
                    self.expect(Tok::LParen, "`(`")?;
                    let mut parents = Vec::new();
                    if self.peek() != &Tok::RParen {
                        loop {
                            parents.push(self.ident("a parent variable")?);
                            if !self.eat(&Tok::Comma) {
                                break;
                            }
                        }
                    }
                    self.expect(Tok::RParen, "`,` or `)`")?;
                    self.expect(Tok::LBrace, "`{`")?;
                    let mut table = TableAst {
                        parents,
                        rows: Vec::new(),
                        default: None,
                    };
                    while self.peek() != &Tok::RBrace {
                        let row_start = self.span();
                        if self.at_keyword("default") && self.peek_at(1) == &Tok::RArrow {
                            self.bump();
                            self.bump();
                            let v = self.value()?;
                            if table.default.is_some() {
                                return Err(syntax("second default row", row_start));
                            }
                            table.default = Some(v);
                        } else {
                            let mut inputs = Vec::new();
                            while self.peek() != &Tok::RArrow {
                                inputs.push(self.value()?);
                                self.eat(&Tok::Comma);
                            }
                            self.bump();
                            let out = self.value()?;
                            table.rows.push((inputs, out, join(row_start, self.prev_span())));
                        }
                        self.expect(Tok::Semi, "`;`")?;
                    }
                    self.bump();
                    self.eat(&Tok::Semi);
                    ast.eqs.push(EqAst {
                        target,
                        span,
                        body: BodyAst::Table(table),
                    });
                }
                "context" => {
                    let (name, span) = self.ident("a context name")?;
                    self.expect(Tok::LBrace, "`{`")?;
                    let assigns = self.assignments(&Tok::RBrace)?;
                    self.expect(Tok::RBrace, "`,` or `}`")?;
                    self.eat(&Tok::Semi);
                    ast.contexts.push((name, span, assigns));
                }
                "prob" => {
                    if ast.prob.is_some() {
                        return Err(syntax("second `prob` block", kw_span));
                    }
                    self.expect(Tok::LBrace, "`{`")?;
                    let mut entries = Vec::new();
                    while self.peek() != &Tok::RBrace {
                        let start = self.span();
                        let key = self.ctx_ref()?;
                        self.expect(Tok::Colon, "`:`")?;
                        let (w, wspan) = self.rational()?;
                        entries.push((key, w, join(start, wspan)));
                        if !self.eat(&Tok::Comma) {
                            break;
                        }
                    }
                    let close = self.expect(Tok::RBrace, "`,` or `}`")?;
                    self.eat(&Tok::Semi);
                    ast.prob = Some((join(kw_span, close), entries));
                }
                "K" => {
                    let name = match self.peek().clone() {
                        Tok::Ident(n) => {
                            self.bump();
                            Some(n)
                        }
                        _ => None,
                    };
                    self.expect(Tok::Eq, "`=`")?;
                    let members = if self.at_keyword("all") {
                        self.bump();
                        None
                    } else {
                        self.expect(Tok::LBrace, "`all` or `{`")?;
                        let mut refs = Vec::new();
                        if self.peek() != &Tok::RBrace {
                            loop {
                                refs.push(self.ctx_ref()?);
                                if !self.eat(&Tok::Comma) {
                                    break;
                                }
                            }
                        }
                        self.expect(Tok::RBrace, "`,` or `}`")?;
                        Some(refs)
                    };
                    let end = self.expect(Tok::Semi, "`;`")?;
                    ast.ks.push(KAst {
                        name,
                        span: join(kw_span, end),
                        members,
                    });
                }
                other => {
                    return Err(syntax(
                        format!("unknown declaration `{other}`; expected exo, endo, eq, table, context, prob or K"),
                        kw_span,
                    ))
                }
            }
        }
        self.bump();
        self.end()?;
        Ok(ast)
    }

    fn ctx_ref(&mut self) -> PResult<CtxRef> {
        match self.peek() {
            Tok::LBrace => {
                let open = self.bump().span;
                let assigns = self.assignments(&Tok::RBrace)?;
                let close = self.expect(Tok::RBrace, "`,` or `}`")?;
                Ok(CtxRef::Inline(assigns, join(open, close)))
            }
            _ => {
                let (n, s) = self.ident("a context name or `{`")?;
                Ok(CtxRef::Named(n, s))
            }
        }
    }
}

/// Resolves an assignment list into a context of `model`.
fn resolve_context(model: &CausalModel, assigns: &[Assign], span: SourceSpan) -> PResult<Context> {
    let mut values: Vec<Option<ValueIdx>> = vec![None; model.num_exogenous()];
    for a in assigns {
        let Some(v) = model.var(&a.var) else {
            return Err(DslError::new(DslErrorKind::UnknownIdentifier(a.var.clone()), a.var_span));
        };
        if model.is_endogenous(v) {
            return Err(syntax(
                format!("`{}` is endogenous; contexts assign exogenous variables only", a.var),
                a.var_span,
            ));
        }
        let x = range_index(model.range(v), &a.var, &a.value)?;
        if values[v.index()].replace(x).is_some() {
            return Err(model_err(Error::RepeatedVariable(a.var.clone()), a.var_span));
        }
    }
    let mut out = Vec::with_capacity(values.len());
    for (i, v) in values.into_iter().enumerate() {
        match v {
            Some(x) => out.push(x),
            None => {
                let name = model.name(VarId(i as u32));
                return Err(model_err(Error::InvalidContext(format!("no value for `{name}`")), span));
            }
        }
    }
    Context::from_indices(model, out).map_err(|e| model_err(e, span))
}

fn range_index(range: &ValueRange, var: &str, lit: &Lit) -> PResult<ValueIdx> {
    range.index_of(&lit.value).ok_or_else(|| {
        DslError::new(
            DslErrorKind::RangeViolation(format!("`{}` is not in the range {range} of `{var}`", lit.value)),
            lit.span,
        )
    })
}

/// Variable an error is about, for locating it in the source.
fn error_subject(e: &Error) -> Option<&str> {
    Some(match e {
        Error::DuplicateVariable(n)
        | Error::EmptyRange(n)
        | Error::MissingEquation(n)
        | Error::DuplicateEquation(n)
        | Error::EquationForExogenous(n)
        | Error::UnknownVariable(n)
        | Error::InvalidName(n) => n,
        Error::DuplicateValue { var, .. } | Error::ValueOutOfRange { var, .. } => var,
        Error::OutOfRangeEquationOutput { target, .. }
        | Error::EquationEval { target, .. }
        | Error::InvalidTable { target, .. } => target,
        Error::CyclicModel { cycle } => cycle.first()?,
        _ => return None,
    })
}

pub(crate) fn parse_model(src: &str) -> PResult<ModelBundle> {
    let mut cur = Cursor::new(src)?;
    let header = cur.span();
    let ast = cur.file()?;

    let mut vars: HashMap<String, VarDecl> = HashMap::new();
    let mut symbols = BTreeSet::new();
    let mut sig = Signature::new();
    for (name, exogenous, values, span, range_span) in &ast.decls {
        if vars.contains_key(name) {
            return Err(model_err(Error::DuplicateVariable(name.clone()), *span));
        }
        for (i, lit) in values.iter().enumerate() {
            if values[..i].iter().any(|l| l.value == lit.value) {
                return Err(model_err(
                    Error::DuplicateValue {
                        var: name.clone(),
                        value: lit.value.to_string(),
                    },
                    lit.span,
                ));
            }
            if let Value::Sym(s) = &lit.value {
                symbols.insert(s.clone());
            }
        }
        let range = ValueRange::named(name, values.iter().map(|l| l.value.clone()).collect())
            .map_err(|e| model_err(e, *range_span))?;
        sig = if *exogenous {
            sig.exo(name, range.clone())
        } else {
            sig.endo(name, range.clone())
        }
        .map_err(|e| model_err(e, *span))?;
        vars.insert(
            name.clone(),
            VarDecl {
                exogenous: *exogenous,
                range,
                span: *span,
            },
        );
    }

    let mut eq_spans: HashMap<String, SourceSpan> = HashMap::new();
    let mut equations = Vec::new();
    for eq in ast.eqs {
        let Some(decl) = vars.get(&eq.target) else {
            return Err(DslError::new(DslErrorKind::UnknownIdentifier(eq.target), eq.span));
        };
        if decl.exogenous {
            return Err(model_err(Error::EquationForExogenous(eq.target), eq.span));
        }
        if eq_spans.insert(eq.target.clone(), eq.span).is_some() {
            return Err(model_err(Error::DuplicateEquation(eq.target), eq.span));
        }
        let target_range = decl.range.clone();
        let se = match eq.body {
            BodyAst::Expr(raw) => StructuralEquation::expr(&eq.target, resolve_expr(raw, &vars, &symbols)?),
            BodyAst::Table(t) => {
                let table = resolve_table(&eq.target, &target_range, eq.span, t, &vars)?;
                StructuralEquation::table(&eq.target, table)
            }
        }
        .map_err(|e| model_err(e, eq.span))?;
        equations.push(se);
    }
    for (name, decl) in &vars {
        if !decl.exogenous && !eq_spans.contains_key(name) {
            return Err(model_err(Error::MissingEquation(name.clone()), decl.span));
        }
    }
    let model = CausalModel::build_with_limits(sig, equations, Limits::from_env()).map_err(|e| {
        let span = error_subject(&e)
            .and_then(|n| eq_spans.get(n).or_else(|| vars.get(n).map(|d| &d.span)))
            .copied()
            .unwrap_or(header);
        model_err(e, span)
    })?;

    let mut named_contexts = BTreeMap::new();
    for (name, span, assigns) in &ast.contexts {
        let c = resolve_context(&model, assigns, *span)?;
        if named_contexts.insert(name.clone(), c).is_some() {
            return Err(syntax(format!("context `{name}` is declared twice"), *span));
        }
    }
    let lookup = |r: &CtxRef| -> PResult<Context> {
        match r {
            CtxRef::Named(n, s) => named_contexts
                .get(n)
                .cloned()
                .ok_or_else(|| DslError::new(DslErrorKind::UnknownIdentifier(n.clone()), *s)),
            CtxRef::Inline(a, s) => resolve_context(&model, a, *s),
        }
    };

    let distribution = match &ast.prob {
        None => None,
        Some((span, entries)) => {
            let total = entries.iter().fold(BigRational::zero(), |acc, (_, w, _)| acc + w);
            if !total.is_one() {
                return Err(DslError::new(DslErrorKind::ProbSum(format_rational(&total)), *span));
            }
            let mut resolved = Vec::with_capacity(entries.len());
            let mut seen = BTreeSet::new();
            for (r, w, s) in entries {
                let c = lookup(r)?;
                if !seen.insert(model.context_index(&c)) {
                    return Err(model_err(
                        Error::InvalidContext(format!("context ({}) weighted twice", model.display_context(&c))),
                        *s,
                    ));
                }
                resolved.push((c, w.clone()));
            }
            Some(ContextDistribution::new(&model, resolved).map_err(|e| model_err(e, *span))?)
        }
    };

    let mut k = None;
    let mut named_k = BTreeMap::new();
    for kast in &ast.ks {
        let set = match &kast.members {
            None => ContextSet::All,
            Some(refs) => {
                let cs = refs.iter().map(&lookup).collect::<PResult<Vec<_>>>()?;
                ContextSet::explicit(&model, cs).map_err(|e| model_err(e, kast.span))?
            }
        };
        let dup = match &kast.name {
            None => k.replace(set).is_some(),
            Some(n) => named_k.insert(n.clone(), set).is_some(),
        };
        if dup {
            return Err(syntax("context set declared twice", kast.span));
        }
    }

    Ok(ModelBundle {
        name: ast.name,
        model,
        named_contexts,
        distribution,
        k,
        named_k,
    })
}

fn resolve_table(
    target: &str,
    target_range: &ValueRange,
    span: SourceSpan,
    t: TableAst,
    vars: &HashMap<String, VarDecl>,
) -> PResult<TableEquation> {
    let mut parents = Vec::with_capacity(t.parents.len());
    let mut ranges = Vec::with_capacity(t.parents.len());
    for (p, s) in &t.parents {
        let decl = vars
            .get(p)
            .ok_or_else(|| DslError::new(DslErrorKind::UnknownIdentifier(p.clone()), *s))?;
        parents.push(VariableId::new(p.clone()).map_err(|e| model_err(e, *s))?);
        ranges.push((p, &decl.range));
    }
    let mut rows = Vec::with_capacity(t.rows.len());
    for (inputs, out, row_span) in t.rows {
        if inputs.len() != parents.len() {
            return Err(syntax(
                format!("row has {} inputs, table reads {}", inputs.len(), parents.len()),
                row_span,
            ));
        }
        for (lit, (p, r)) in inputs.iter().zip(&ranges) {
            range_index(r, p, lit)?;
        }
        range_index(target_range, target, &out)?;
        rows.push((inputs.into_iter().map(|l| l.value).collect::<Vec<_>>(), out.value));
    }
    let default = match t.default {
        Some(d) => {
            range_index(target_range, target, &d)?;
            d.value
        }
        None => {
            let combos: u128 = ranges.iter().map(|(_, r)| r.len() as u128).product();
            let distinct: BTreeSet<&Vec<Value>> = rows.iter().map(|(i, _)| i).collect();
            if (distinct.len() as u128) < combos {
                return Err(syntax(
                    format!("table for `{target}` lists {} of {combos} rows and has no default", distinct.len()),
                    span,
                ));
            }
            target_range.values()[0].clone()
        }
    };
    Ok(TableEquation { parents, rows, default })
}

// ---- formulas ----

struct FormulaParser<'m> {
    cur: Cursor,
    model: &'m CausalModel,
}

impl FormulaParser<'_> {
    fn or(&mut self) -> PResult<Formula> {
        let mut f = self.and()?;
        while self.cur.eat(&Tok::Pipe) || self.cur.eat(&Tok::OrOr) {
            f = Formula::or(f, self.and()?);
        }
        Ok(f)
    }

    fn and(&mut self) -> PResult<Formula> {
        let mut f = self.prefix()?;
        while self.cur.eat(&Tok::Amp) || self.cur.eat(&Tok::AndAnd) {
            f = Formula::and(f, self.prefix()?);
        }
        Ok(f)
    }

    fn prefix(&mut self) -> PResult<Formula> {
        match self.cur.peek() {
            Tok::Tilde | Tok::Bang => {
                self.cur.bump();
                Ok(Formula::not(self.prefix()?))
            }
            Tok::LParen => {
                self.cur.bump();
                let f = self.or()?;
                self.cur.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::LBracket => {
                let open = self.cur.bump().span;
                let mut settings = Vec::new();
                loop {
                    let (v, span) = self.endogenous()?;
                    self.cur.expect(Tok::LArrow, "`<-`")?;
                    let lit = self.cur.value()?;
                    let x = range_index(self.model.range(v), self.model.name(v), &lit)?;
                    if settings.iter().any(|(w, _)| *w == v) {
                        return Err(model_err(Error::RepeatedVariable(self.model.name(v).to_string()), span));
                    }
                    settings.push((v, x));
                    if !self.cur.eat(&Tok::Comma) {
                        break;
                    }
                }
                let close = self.cur.expect(Tok::RBracket, "`,` or `]`")?;
                let iv = Intervention::new(settings).map_err(|e| model_err(e, join(open, close)))?;
                self.cur.expect(Tok::LParen, "`(`")?;
                let body = self.or()?;
                self.cur.expect(Tok::RParen, "`)`")?;
                Formula::causal(iv, body).map_err(|e| model_err(e, join(open, close)))
            }
            _ => self.event(),
        }
    }

    fn endogenous(&mut self) -> PResult<(VarId, SourceSpan)> {
        let (name, span) = self.cur.ident("a variable name")?;
        let v = self
            .model
            .var(&name)
            .ok_or_else(|| model_err(Error::UnknownVariable(name.clone()), span))?;
        if !self.model.is_endogenous(v) {
            return Err(model_err(Error::NotEndogenous(name), span));
        }
        Ok((v, span))
    }

    fn event(&mut self) -> PResult<Formula> {
        let (name, span) = self.cur.ident("a variable name")?;
        let v = self
            .model
            .var(&name)
            .ok_or_else(|| model_err(Error::UnknownVariable(name.clone()), span))?;
        let negated = match self.cur.peek() {
            Tok::Eq | Tok::EqEq => false,
            Tok::Ne => true,
            _ => return Err(self.cur.unexpected("`=` or `!=`")),
        };
        self.cur.bump();
        let lit = self.cur.value()?;
        let x = self.model.range(v).index_of(&lit.value).ok_or_else(|| {
            model_err(
                Error::ValueOutOfRange {
                    var: name.clone(),
                    value: lit.value.to_string(),
                },
                lit.span,
            )
        })?;
        let f = Formula::event(v, x);
        Ok(if negated { Formula::not(f) } else { f })
    }
}

pub(crate) fn parse_formula(model: &CausalModel, text: &str) -> PResult<Formula> {
    let mut p = FormulaParser {
        cur: Cursor::new(text)?,
        model,
    };
    let f = p.or()?;
    p.cur.end()?;
    Ok(f)
}

pub(crate) fn parse_conjunction(model: &CausalModel, text: &str) -> PResult<Conjunction> {
    let whole = SourceSpan {
        line: 1,
        column: 1,
        start: 0,
        end: text.len(),
    };
    let f = parse_formula(model, text)?;
    let mut events = Vec::new();
    if !flatten(&f, &mut events) {
        return Err(syntax("expected a conjunction of events such as `A=1 & B=0`", whole));
    }
    Conjunction::new(model, events).map_err(|e| model_err(e, whole))
}

fn flatten(f: &Formula, out: &mut Vec<(VarId, ValueIdx)>) -> bool {
    match f {
        Formula::Event(v, x) => {
            out.push((*v, *x));
            true
        }
        Formula::And(a, b) => flatten(a, out) && flatten(b, out),
        _ => false,
    }
}

pub(crate) fn parse_context(model: &CausalModel, text: &str) -> PResult<Context> {
    let mut cur = Cursor::new(text)?;
    let start = cur.span();
    let braced = cur.eat(&Tok::LBrace);
    let close = if braced { Tok::RBrace } else { Tok::Eof };
    let assigns = cur.assignments(&close)?;
    if braced {
        cur.expect(Tok::RBrace, "`,` or `}`")?;
    }
    cur.end()?;
    resolve_context(model, &assigns, join(start, cur.prev_span()))
}
