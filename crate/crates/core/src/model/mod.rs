//! Finite acyclic structural causal models.
//!
//! Every equation is compiled at build time into a dense lookup table over
//! the variables it actually depends on. Dependence is decided semantically,
//! by enumerating the equation's inputs, and the resulting graph must be
//! acyclic. Variables are ordered exogenous-first, each group sorted by name;
//! every enumeration in the crate follows that order.

mod expr;
mod formula;
mod graph;
mod value;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

pub use expr::{BinaryOp, Expr, UnaryOp};
pub use formula::{Formula, Intervention};
pub use graph::{CausalGraph, Edge, EdgeWitness};
pub use value::{Value, ValueIdx, ValueRange, VariableId};

use crate::error::{Error, Result};

/// Index of a variable inside a [`CausalModel`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub(crate) u32);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Enumeration caps. All algorithms are exhaustive, so models are rejected up
/// front when their context space or a single equation table is too large.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_contexts: u64,
    pub max_table: u64,
}

pub const DEFAULT_MAX_CONTEXTS: u64 = 1 << 22;

/// Environment variable overriding [`Limits::max_contexts`].
pub const MAX_CONTEXTS_ENV: &str = "CEX_MAX_CONTEXTS";

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_contexts: DEFAULT_MAX_CONTEXTS,
            max_table: DEFAULT_MAX_CONTEXTS,
        }
    }
}

impl Limits {
    /// Defaults, with `CEX_MAX_CONTEXTS` applied when it parses as an integer.
    pub fn from_env() -> Self {
        let mut limits = Limits::default();
        if let Some(n) = std::env::var(MAX_CONTEXTS_ENV)
            .ok()
            .and_then(|s| s.trim().parse::<u64>().ok())
        {
            limits.max_contexts = n;
        }
        limits
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    pub exogenous: Vec<(VariableId, ValueRange)>,
    pub endogenous: Vec<(VariableId, ValueRange)>,
}

impl Signature {
    pub fn new() -> Self {
        Signature {
            exogenous: Vec::new(),
            endogenous: Vec::new(),
        }
    }

    pub fn exo(mut self, name: &str, range: ValueRange) -> Result<Self> {
        self.exogenous.push((VariableId::new(name)?, range));
        Ok(self)
    }

    pub fn endo(mut self, name: &str, range: ValueRange) -> Result<Self> {
        self.endogenous.push((VariableId::new(name)?, range));
        Ok(self)
    }
}

impl Default for Signature {
    fn default() -> Self {
        Self::new()
    }
}

/// Explicit lookup table: rows keyed by parent values, plus one default row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableEquation {
    pub parents: Vec<VariableId>,
    pub rows: Vec<(Vec<Value>, Value)>,
    pub default: Value,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EquationBody {
    Expr(Expr),
    Table(TableEquation),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructuralEquation {
    pub target: VariableId,
    pub body: EquationBody,
}

impl StructuralEquation {
    pub fn expr(target: &str, body: Expr) -> Result<Self> {
        Ok(StructuralEquation {
            target: VariableId::new(target)?,
            body: EquationBody::Expr(body),
        })
    }

    pub fn table(target: &str, table: TableEquation) -> Result<Self> {
        Ok(StructuralEquation {
            target: VariableId::new(target)?,
            body: EquationBody::Table(table),
        })
    }

    /// Variables the body mentions (expression references or table parents).
    pub fn inputs(&self) -> Vec<VariableId> {
        match &self.body {
            EquationBody::Expr(e) => e.references().into_iter().collect(),
            EquationBody::Table(t) => t.parents.clone(),
        }
    }

    /// Evaluates the source body directly, without the compiled table.
    pub fn eval_body(&self, env: &dyn Fn(&VariableId) -> Option<Value>) -> Result<Value, String> {
        match &self.body {
            EquationBody::Expr(e) => e.eval(env),
            EquationBody::Table(t) => {
                let key = t
                    .parents
                    .iter()
                    .map(|p| env(p).ok_or_else(|| format!("unbound variable `{p}`")))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(t.rows
                    .iter()
                    .find(|(k, _)| *k == key)
                    .map(|(_, v)| v.clone())
                    .unwrap_or_else(|| t.default.clone()))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct Compiled {
    pub(crate) parents: Vec<VarId>,
    strides: Vec<usize>,
    table: Vec<ValueIdx>,
}

impl Compiled {
    fn constant(v: ValueIdx) -> Self {
        Compiled {
            parents: Vec::new(),
            strides: Vec::new(),
            table: vec![v],
        }
    }

    #[inline]
    fn eval(&self, values: &[ValueIdx]) -> ValueIdx {
        let mut idx = 0;
        for (p, s) in self.parents.iter().zip(&self.strides) {
            idx += values[p.index()] as usize * s;
        }
        self.table[idx]
    }

    pub(crate) fn lookup(&self, parent_values: &[ValueIdx]) -> ValueIdx {
        let idx: usize = parent_values
            .iter()
            .zip(&self.strides)
            .map(|(v, s)| *v as usize * s)
            .sum();
        self.table[idx]
    }
}

#[derive(Clone, Debug)]
struct VarInfo {
    name: VariableId,
    range: ValueRange,
}

/// A validated, acyclic causal model.
#[derive(Clone, Debug)]
pub struct CausalModel {
    vars: Vec<VarInfo>,
    n_exo: usize,
    index: HashMap<String, VarId>,
    equations: Vec<StructuralEquation>,
    compiled: Vec<Compiled>,
    order: Vec<usize>,
    context_count: u64,
    limits: Limits,
}

/// A setting of every exogenous variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Context {
    values: Vec<ValueIdx>,
}

impl Context {
    pub fn from_indices(model: &CausalModel, values: Vec<ValueIdx>) -> Result<Self> {
        if values.len() != model.n_exo {
            return Err(Error::InvalidContext(format!(
                "expected {} exogenous values, got {}",
                model.n_exo,
                values.len()
            )));
        }
        for (i, v) in values.iter().enumerate() {
            if *v as usize >= model.vars[i].range.len() {
                return Err(Error::InvalidContext(format!(
                    "value index {v} out of range for `{}`",
                    model.vars[i].name
                )));
            }
        }
        Ok(Context { values })
    }

    pub fn values(&self) -> &[ValueIdx] {
        &self.values
    }
}

/// The unique solution of a model in a context: one value per variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TotalAssignment {
    values: Vec<ValueIdx>,
}

impl TotalAssignment {
    pub fn get(&self, var: VarId) -> ValueIdx {
        self.values[var.index()]
    }

    pub fn values(&self) -> &[ValueIdx] {
        &self.values
    }
}

/// Builds and validates a model; see [`CausalModel::build`].
pub fn build_model(signature: Signature, equations: Vec<StructuralEquation>) -> Result<CausalModel> {
    CausalModel::build(signature, equations)
}

impl CausalModel {
    pub fn build(signature: Signature, equations: Vec<StructuralEquation>) -> Result<Self> {
        Self::build_with_limits(signature, equations, Limits::default())
    }

    pub fn build_with_limits(
        signature: Signature,
        equations: Vec<StructuralEquation>,
        limits: Limits,
    ) -> Result<Self> {
        let mut exo = signature.exogenous;
        let mut endo = signature.endogenous;
        exo.sort_by(|a, b| a.0.cmp(&b.0));
        endo.sort_by(|a, b| a.0.cmp(&b.0));
        let n_exo = exo.len();
        let mut vars = Vec::with_capacity(exo.len() + endo.len());
        let mut index = HashMap::new();
        for (name, range) in exo.into_iter().chain(endo) {
            let range = ValueRange::named(name.as_str(), range.values().to_vec())?;
            if index
                .insert(name.as_str().to_string(), VarId(vars.len() as u32))
                .is_some()
            {
                return Err(Error::DuplicateVariable(name.to_string()));
            }
            vars.push(VarInfo { name, range });
        }

        let mut by_target: BTreeMap<VarId, StructuralEquation> = BTreeMap::new();
        for eq in equations {
            let id = *index
                .get(eq.target.as_str())
                .ok_or_else(|| Error::UnknownVariable(eq.target.to_string()))?;
            if id.index() < n_exo {
                return Err(Error::EquationForExogenous(eq.target.to_string()));
            }
            if by_target.contains_key(&id) {
                return Err(Error::DuplicateEquation(eq.target.to_string()));
            }
            by_target.insert(id, eq);
        }
        for (i, v) in vars.iter().enumerate().skip(n_exo) {
            if !by_target.contains_key(&VarId(i as u32)) {
                return Err(Error::MissingEquation(v.name.to_string()));
            }
        }

        let context_space: u128 = vars[..n_exo].iter().map(|v| v.range.len() as u128).product();
        if context_space > limits.max_contexts as u128 {
            return Err(Error::ScaleExceeded {
                what: "context space".into(),
                size: context_space,
                limit: limits.max_contexts,
            });
        }

        let mut model = CausalModel {
            vars,
            n_exo,
            index,
            equations: Vec::new(),
            compiled: Vec::new(),
            order: Vec::new(),
            context_count: context_space as u64,
            limits,
        };
        let equations: Vec<StructuralEquation> = by_target.into_values().collect();
        let mut compiled = Vec::with_capacity(equations.len());
        for (pos, eq) in equations.iter().enumerate() {
            compiled.push(model.compile(VarId((n_exo + pos) as u32), eq)?);
        }
        model.equations = equations;
        model.compiled = compiled;
        model.order = model.topological_order()?;
        Ok(model)
    }

    /// Tabulates an equation over its syntactic inputs, checks outputs, and
    /// projects the table onto the inputs it semantically depends on.
    fn compile(&self, target: VarId, eq: &StructuralEquation) -> Result<Compiled> {
        let tname = eq.target.to_string();
        let mut inputs = Vec::new();
        for name in eq.inputs() {
            let id = self.var(name.as_str()).ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
            if inputs.contains(&id) {
                return Err(Error::InvalidTable {
                    target: tname.clone(),
                    reason: format!("parent `{name}` listed twice"),
                });
            }
            inputs.push(id);
        }
        if let EquationBody::Table(t) = &eq.body {
            self.check_table(&tname, t, &inputs)?;
        }
        let size: u128 = inputs.iter().map(|p| self.range(*p).len() as u128).product();
        if size > self.limits.max_table as u128 {
            return Err(Error::ScaleExceeded {
                what: format!("equation table for `{tname}`"),
                size,
                limit: self.limits.max_table,
            });
        }
        let size = size as usize;
        let radices: Vec<usize> = inputs.iter().map(|p| self.range(*p).len()).collect();
        let mut table = Vec::with_capacity(size);
        let mut digits = vec![0usize; inputs.len()];
        let target_range = self.range(target);
        for _ in 0..size {
            let lookup = |name: &VariableId| -> Option<Value> {
                let id = self.var(name.as_str())?;
                let pos = inputs.iter().position(|p| *p == id)?;
                Some(self.range(id).get(digits[pos] as ValueIdx).clone())
            };
            let describe = || self.describe_digits(&inputs, &digits);
            let out = eq.eval_body(&lookup).map_err(|reason| Error::EquationEval {
                target: tname.clone(),
                assignment: describe(),
                reason,
            })?;
            let idx = target_range
                .index_of(&out)
                .ok_or_else(|| Error::OutOfRangeEquationOutput {
                    target: tname.clone(),
                    assignment: describe(),
                    value: out.to_string(),
                })?;
            table.push(idx);
            increment(&mut digits, &radices);
        }
        let full = Compiled {
            strides: strides(&radices),
            parents: inputs,
            table,
        };
        let semantic: Vec<usize> = (0..full.parents.len())
            .filter(|&i| table_depends_on(&full, &radices, i))
            .collect();
        if semantic.iter().any(|&i| full.parents[i] == target) {
            return Err(Error::CyclicModel {
                cycle: vec![tname.clone(), tname],
            });
        }
        Ok(project(&full, &radices, &semantic))
    }

    fn check_table(&self, target: &str, t: &TableEquation, inputs: &[VarId]) -> Result<()> {
        for (key, _) in &t.rows {
            if key.len() != inputs.len() {
                return Err(Error::InvalidTable {
                    target: target.to_string(),
                    reason: format!("row has {} values, expected {}", key.len(), inputs.len()),
                });
            }
            for (v, p) in key.iter().zip(inputs) {
                if !self.range(*p).contains(v) {
                    return Err(Error::ValueOutOfRange {
                        var: self.name(*p).to_string(),
                        value: v.to_string(),
                    });
                }
            }
        }
        for (i, (key, _)) in t.rows.iter().enumerate() {
            if t.rows[..i].iter().any(|(k, _)| k == key) {
                return Err(Error::InvalidTable {
                    target: target.to_string(),
                    reason: "duplicate row".into(),
                });
            }
        }
        Ok(())
    }

    fn describe_digits(&self, vars: &[VarId], digits: &[usize]) -> String {
        if vars.is_empty() {
            return "(no inputs)".into();
        }
        let parts: Vec<String> = vars
            .iter()
            .zip(digits)
            .map(|(v, d)| format!("{}={}", self.name(*v), self.range(*v).get(*d as ValueIdx)))
            .collect();
        format!("({})", parts.join(", "))
    }

    fn topological_order(&self) -> Result<Vec<usize>> {
        let n = self.compiled.len();
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut state = vec![0u8; n];
        let mut order = Vec::with_capacity(n);
        let mut stack: Vec<usize> = Vec::new();
        fn visit(
            m: &CausalModel,
            e: usize,
            state: &mut [u8],
            stack: &mut Vec<usize>,
            order: &mut Vec<usize>,
        ) -> Result<()> {
            match state[e] {
                2 => return Ok(()),
                1 => {
                    let start = stack.iter().position(|&x| x == e).unwrap_or(0);
                    let mut cycle: Vec<String> = stack[start..]
                        .iter()
                        .map(|&x| m.vars[m.n_exo + x].name.to_string())
                        .collect();
                    cycle.push(m.vars[m.n_exo + e].name.to_string());
                    return Err(Error::CyclicModel { cycle });
                }
                _ => {}
            }
            state[e] = 1;
            stack.push(e);
            for p in &m.compiled[e].parents {
                if p.index() >= m.n_exo {
                    visit(m, p.index() - m.n_exo, state, stack, order)?;
                }
            }
            stack.pop();
            state[e] = 2;
            order.push(e);
            Ok(())
        }
        for e in 0..n {
            visit(self, e, &mut state, &mut stack, &mut order)?;
        }
        Ok(order)
    }

    // ---- lookups ----

    pub fn var(&self, name: &str) -> Option<VarId> {
        self.index.get(name).copied()
    }

    pub fn var_checked(&self, name: &str) -> Result<VarId> {
        self.var(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn endogenous_var(&self, name: &str) -> Result<VarId> {
        let id = self.var_checked(name)?;
        if !self.is_endogenous(id) {
            return Err(Error::NotEndogenous(name.to_string()));
        }
        Ok(id)
    }

    pub fn name(&self, var: VarId) -> &str {
        self.vars[var.index()].name.as_str()
    }

    pub fn range(&self, var: VarId) -> &ValueRange {
        &self.vars[var.index()].range
    }

    pub fn value(&self, var: VarId, idx: ValueIdx) -> &Value {
        self.range(var).get(idx)
    }

    pub fn value_index(&self, var: VarId, value: &Value) -> Result<ValueIdx> {
        self.range(var)
            .index_of(value)
            .ok_or_else(|| Error::ValueOutOfRange {
                var: self.name(var).to_string(),
                value: value.to_string(),
            })
    }

    pub fn is_endogenous(&self, var: VarId) -> bool {
        var.index() >= self.n_exo
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_exogenous(&self) -> usize {
        self.n_exo
    }

    pub fn num_endogenous(&self) -> usize {
        self.vars.len() - self.n_exo
    }

    pub fn variables(&self) -> impl Iterator<Item = VarId> {
        (0..self.vars.len() as u32).map(VarId)
    }

    pub fn exogenous(&self) -> impl Iterator<Item = VarId> {
        (0..self.n_exo as u32).map(VarId)
    }

    pub fn endogenous(&self) -> impl Iterator<Item = VarId> {
        (self.n_exo as u32..self.vars.len() as u32).map(VarId)
    }

    pub fn signature(&self) -> Signature {
        let pair = |v: &VarInfo| (v.name.clone(), v.range.clone());
        Signature {
            exogenous: self.vars[..self.n_exo].iter().map(pair).collect(),
            endogenous: self.vars[self.n_exo..].iter().map(pair).collect(),
        }
    }

    /// Source equations, one per endogenous variable, in variable order.
    pub fn equations(&self) -> &[StructuralEquation] {
        &self.equations
    }

    pub fn equation(&self, var: VarId) -> Option<&StructuralEquation> {
        var.index()
            .checked_sub(self.n_exo)
            .and_then(|i| self.equations.get(i))
    }

    /// Variables the equation of `var` semantically depends on.
    pub fn parents(&self, var: VarId) -> &[VarId] {
        match var.index().checked_sub(self.n_exo) {
            Some(i) => &self.compiled[i].parents,
            None => &[],
        }
    }

    pub(crate) fn compiled(&self, var: VarId) -> &Compiled {
        &self.compiled[var.index() - self.n_exo]
    }

    pub fn limits(&self) -> Limits {
        self.limits
    }

    // ---- contexts ----

    pub fn context_count(&self) -> u64 {
        self.context_count
    }

    /// The `index`-th context in mixed-radix order (first exogenous variable
    /// most significant).
    pub fn context(&self, mut index: u64) -> Context {
        let mut values = vec![0; self.n_exo];
        for i in (0..self.n_exo).rev() {
            let r = self.vars[i].range.len() as u64;
            values[i] = (index % r) as ValueIdx;
            index /= r;
        }
        Context { values }
    }

    pub fn context_index(&self, ctx: &Context) -> u64 {
        ctx.values
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, v)| acc * self.vars[i].range.len() as u64 + *v as u64)
    }

    pub fn contexts(&self) -> impl Iterator<Item = Context> + '_ {
        (0..self.context_count).map(move |i| self.context(i))
    }

    /// Builds a context from `(name, value)` pairs covering every exogenous variable.
    pub fn context_from_values(&self, pairs: &[(&str, Value)]) -> Result<Context> {
        let mut values: Vec<Option<ValueIdx>> = vec![None; self.n_exo];
        for (name, value) in pairs {
            let id = self.var_checked(name)?;
            if self.is_endogenous(id) {
                return Err(Error::InvalidContext(format!("`{name}` is endogenous")));
            }
            if values[id.index()].is_some() {
                return Err(Error::RepeatedVariable(name.to_string()));
            }
            values[id.index()] = Some(self.value_index(id, value)?);
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                v.ok_or_else(|| {
                    Error::InvalidContext(format!("no value for `{}`", self.vars[i].name))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Context { values })
    }

    pub fn display_context(&self, ctx: &Context) -> String {
        let parts: Vec<String> = ctx
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| format!("{}={}", self.vars[i].name, self.vars[i].range.get(*v)))
            .collect();
        parts.join(", ")
    }

    // ---- evaluation ----

    /// Solves the equations in `ctx`, with `overrides[v]` replacing the
    /// equation of endogenous variable `v` when set.
    #[inline]
    pub(crate) fn solve_into(
        &self,
        ctx: &[ValueIdx],
        overrides: &[Option<ValueIdx>],
        out: &mut [ValueIdx],
    ) {
        out[..self.n_exo].copy_from_slice(ctx);
        for &e in &self.order {
            let v = self.n_exo + e;
            out[v] = match overrides[v] {
                Some(x) => x,
                None => self.compiled[e].eval(out),
            };
        }
    }

    pub(crate) fn solve(&self, ctx: &[ValueIdx], overrides: &[Option<ValueIdx>]) -> Vec<ValueIdx> {
        let mut out = vec![0; self.vars.len()];
        self.solve_into(ctx, overrides, &mut out);
        out
    }

    pub(crate) fn no_overrides(&self) -> Vec<Option<ValueIdx>> {
        vec![None; self.vars.len()]
    }

    /// The unique solution of the model in context `u`.
    pub fn evaluate(&self, u: &Context) -> TotalAssignment {
        TotalAssignment {
            values: self.solve(&u.values, &self.no_overrides()),
        }
    }

    /// `M_{X <- x}`: the same model with each targeted equation replaced by a constant.
    pub fn intervene(&self, iv: &Intervention) -> Result<CausalModel> {
        let mut out = self.clone();
        for &(var, val) in iv.settings() {
            if !self.is_endogenous(var) || var.index() >= self.vars.len() {
                return Err(Error::NotEndogenous(self.name(var).to_string()));
            }
            if val as usize >= self.range(var).len() {
                return Err(Error::ValueOutOfRange {
                    var: self.name(var).to_string(),
                    value: format!("#{val}"),
                });
            }
            let pos = var.index() - self.n_exo;
            out.compiled[pos] = Compiled::constant(val);
            out.equations[pos].body = EquationBody::Expr(Expr::Const(self.value(var, val).clone()));
        }
        out.order = out.topological_order()?;
        Ok(out)
    }

    /// `(M, u) |= f`.
    pub fn satisfies(&self, u: &Context, f: &Formula) -> Result<bool> {
        f.check(self)?;
        let mut buf = vec![0; self.vars.len()];
        Ok(self.satisfies_with(&u.values, f, &mut buf))
    }

    pub(crate) fn satisfies_with(&self, ctx: &[ValueIdx], f: &Formula, buf: &mut [ValueIdx]) -> bool {
        let mut ov = self.no_overrides();
        self.satisfies_under(ctx, f, &mut ov, buf)
    }

    /// Evaluates `f` in `ctx` with the given base overrides; causal
    /// sub-formulas add their interventions on top.
    pub(crate) fn satisfies_under(
        &self,
        ctx: &[ValueIdx],
        f: &Formula,
        overrides: &mut [Option<ValueIdx>],
        buf: &mut [ValueIdx],
    ) -> bool {
        if !f.contains_intervention() {
            self.solve_into(ctx, overrides, buf);
            return f.holds_in(buf);
        }
        match f {
            Formula::Not(g) => !self.satisfies_under(ctx, g, overrides, buf),
            Formula::And(a, b) => {
                self.satisfies_under(ctx, a, overrides, buf) && self.satisfies_under(ctx, b, overrides, buf)
            }
            Formula::Or(a, b) => {
                self.satisfies_under(ctx, a, overrides, buf) || self.satisfies_under(ctx, b, overrides, buf)
            }
            Formula::Causal(iv, body) => {
                let saved: Vec<(VarId, Option<ValueIdx>)> = iv
                    .settings()
                    .iter()
                    .map(|(v, _)| (*v, overrides[v.index()]))
                    .collect();
                for (v, x) in iv.settings() {
                    overrides[v.index()] = Some(*x);
                }
                let r = self.satisfies_under(ctx, body, overrides, buf);
                for (v, old) in saved {
                    overrides[v.index()] = old;
                }
                r
            }
            Formula::Event(..) => unreachable!("plain formulas handled above"),
        }
    }

    /// The dependency graph, with a witness retained for every edge.
    pub fn causal_graph(&self) -> CausalGraph {
        CausalGraph::from_model(self)
    }

    /// Ancestors of `vars` (not including `vars` themselves unless reachable).
    pub fn ancestors(&self, vars: &BTreeSet<VarId>) -> BTreeSet<VarId> {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<VarId> = vars.iter().copied().collect();
        while let Some(v) = stack.pop() {
            for p in self.parents(v) {
                if seen.insert(*p) {
                    stack.push(*p);
                }
            }
        }
        seen
    }

    /// Strict descendants of `vars`.
    pub fn descendants(&self, vars: &BTreeSet<VarId>) -> BTreeSet<VarId> {
        let mut children: Vec<Vec<VarId>> = vec![Vec::new(); self.vars.len()];
        for v in self.endogenous() {
            for p in self.parents(v) {
                children[p.index()].push(v);
            }
        }
        let mut seen = BTreeSet::new();
        let mut stack: Vec<VarId> = vars.iter().copied().collect();
        while let Some(v) = stack.pop() {
            for c in &children[v.index()] {
                if seen.insert(*c) {
                    stack.push(*c);
                }
            }
        }
        seen
    }

    /// Renders `var=value` pairs joined by ` & `.
    pub fn display_events(&self, events: &[(VarId, ValueIdx)]) -> String {
        events
            .iter()
            .map(|(v, x)| format!("{}={}", self.name(*v), self.value(*v, *x)))
            .collect::<Vec<_>>()
            .join(" & ")
    }

    pub fn display_formula(&self, f: &Formula) -> String {
        f.display(self).to_string()
    }
}

impl fmt::Display for CausalModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in self.variables() {
            let kind = if self.is_endogenous(v) { "endo" } else { "exo" };
            writeln!(f, "{kind} {}: {}", self.name(v), self.range(v))?;
        }
        Ok(())
    }
}

fn strides(radices: &[usize]) -> Vec<usize> {
    // first input most significant
    let mut s = vec![1usize; radices.len()];
    for i in (0..radices.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * radices[i + 1];
    }
    s
}

fn increment(digits: &mut [usize], radices: &[usize]) {
    for i in (0..digits.len()).rev() {
        digits[i] += 1;
        if digits[i] < radices[i] {
            return;
        }
        digits[i] = 0;
    }
}

fn table_depends_on(c: &Compiled, radices: &[usize], i: usize) -> bool {
    let size = c.table.len();
    let stride = c.strides[i];
    (0..size).any(|idx| {
        let digit = (idx / stride) % radices[i];
        digit == 0 && (1..radices[i]).any(|d| c.table[idx + d * stride] != c.table[idx])
    })
}

fn project(full: &Compiled, radices: &[usize], keep: &[usize]) -> Compiled {
    let parents: Vec<VarId> = keep.iter().map(|&i| full.parents[i]).collect();
    let kept_radices: Vec<usize> = keep.iter().map(|&i| radices[i]).collect();
    let size: usize = kept_radices.iter().product();
    let mut table = Vec::with_capacity(size);
    let mut digits = vec![0usize; keep.len()];
    for _ in 0..size {
        let idx: usize = keep.iter().zip(&digits).map(|(&i, d)| d * full.strides[i]).sum();
        table.push(full.table[idx]);
        increment(&mut digits, &kept_radices);
    }
    Compiled {
        strides: strides(&kept_radices),
        parents,
        table,
    }
}

#[cfg(test)]
mod tests;
