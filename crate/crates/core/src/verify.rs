//! Exhaustive and seeded randomized checks of the two structural theorems:
//! sufficient causes need no separate check of their second clause under
//! conditions (a)-(e), and the three probability conditions on a
//! depth-two model imply a partial explanation.

use std::collections::BTreeMap;

use itertools::Itertools;
use num_rational::BigRational;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::causation::{
    is_causally_independent, is_determined_by_context, verify_theorem1, Conjunction, Theorem1Report,
};
use crate::classifier::{depth_two_shape, lift_classifier, GridSpec, ImageDistribution, Labeler, LabelerKind};
use crate::error::{Error, Result};
use crate::explanation::{
    theorem2_measures, verify_theorem2, ContextDistribution, GoodnessPair, ProbabilisticModel,
};
use crate::model::*;
use crate::rational::{format_rational, ratio};

/// Outcome of a batch of checks.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerifySummary {
    /// Instances evaluated.
    pub checked: usize,
    /// Instances where every side condition held, so the conclusion was at stake.
    pub conditions_met: usize,
    pub implication_failures: usize,
    /// Instances dropped because a conditional probability was undefined.
    pub skipped: usize,
    /// First failing instance, described in words.
    pub counterexample: Option<String>,
}

impl VerifySummary {
    pub fn passed(&self) -> bool {
        self.implication_failures == 0
    }

    fn record(&mut self, conditions: bool, holds: bool, describe: impl FnOnce() -> String) {
        self.checked += 1;
        if conditions {
            self.conditions_met += 1;
        }
        if !holds {
            self.implication_failures += 1;
            if self.counterexample.is_none() {
                self.counterexample = Some(describe());
            }
        }
    }
}

const MAX_SUPERSET: usize = 5;

/// Every superset of at most five endogenous variables that is causally
/// independent and determined by the context, every effect `Y=y` whose
/// parents it covers, every context, and every non-empty part of the
/// actual values of the superset as candidate.
pub fn theorem1_on_model(model: &CausalModel) -> Result<VerifySummary> {
    let endo: Vec<VarId> = model.endogenous().collect();
    let mut summary = VerifySummary::default();
    let contexts: Vec<Context> = model.contexts().collect();
    let worlds: Vec<TotalAssignment> = contexts.iter().map(|u| model.evaluate(u)).collect();
    for size in 1..=endo.len().min(MAX_SUPERSET) {
        for superset in endo.iter().copied().combinations(size) {
            if !is_causally_independent(model, &superset)?.holds
                || !is_determined_by_context(model, &superset)?.holds
            {
                continue;
            }
            let effects = endo.iter().copied().filter(|y| {
                !superset.contains(y)
                    && !model.parents(*y).is_empty()
                    && model.parents(*y).iter().all(|p| superset.contains(p))
            });
            for y in effects.collect::<Vec<_>>() {
                for value in 0..model.range(y).len() as ValueIdx {
                    let phi = Formula::event(y, value);
                    for (u, world) in contexts.iter().zip(&worlds) {
                        for mask in 1u64..(1 << superset.len()) {
                            let events: Vec<_> = superset
                                .iter()
                                .enumerate()
                                .filter(|(i, _)| mask >> i & 1 == 1)
                                .map(|(_, v)| (*v, world.get(*v)))
                                .collect();
                            let cand = Conjunction::new(model, events)?;
                            let r = verify_theorem1(model, &superset, &cand, &phi, u)?;
                            summary.record(r.conditions_hold(), r.implication_holds, || {
                                describe1(model, &superset, &cand, &phi, u, &r)
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(summary)
}

fn describe1(
    model: &CausalModel,
    superset: &[VarId],
    cand: &Conjunction,
    phi: &Formula,
    u: &Context,
    r: &Theorem1Report,
) -> String {
    let names: Vec<&str> = superset.iter().map(|v| model.name(*v)).collect();
    format!(
        "superset {{{}}}, candidate {}, effect {}, context {}: SC1,SC3,SC4 {} but sufficient {}",
        names.join(", "),
        cand.display(model),
        phi.display(model),
        model.display_context(u),
        r.sc134,
        r.sufficient
    )
}

/// A randomly generated instance of the first theorem's setting.
#[derive(Clone, Debug)]
pub struct Theorem1Instance {
    pub model: CausalModel,
    pub superset: Vec<VarId>,
    pub cand: Conjunction,
    pub phi: Formula,
    pub context: Context,
}

fn int_table(target: &str, parents: &[String], f: impl Fn(&[i64]) -> i64) -> StructuralEquation {
    let rows = (0..parents.len())
        .map(|_| [0i64, 1])
        .multi_cartesian_product()
        .filter_map(|xs| {
            let y = f(&xs);
            (y != 0).then(|| (xs.into_iter().map(Value::Int).collect(), Value::Int(y)))
        })
        .collect();
    let table = TableEquation {
        parents: parents.iter().map(|p| VariableId::new(p.as_str()).unwrap()).collect(),
        rows,
        default: Value::Int(0),
    };
    StructuralEquation::table(target, table).expect("generated names are valid")
}

fn random_truth_table<R: Rng>(rng: &mut R, arity: usize) -> Vec<i64> {
    (0..1 << arity).map(|_| rng.gen_range(0..2)).collect()
}

fn lookup(table: &[i64], xs: &[i64]) -> i64 {
    table[xs.iter().fold(0, |acc, x| acc * 2 + *x as usize)]
}

fn random_effect<R: Rng>(rng: &mut R, effects: &[VarId], depth: u32) -> Formula {
    let leaf = |rng: &mut R| Formula::event(*effects.choose(rng).unwrap(), rng.gen_range(0..2));
    if depth == 0 {
        return leaf(rng);
    }
    match rng.gen_range(0..5) {
        0 => Formula::not(random_effect(rng, effects, depth - 1)),
        1 => Formula::and(random_effect(rng, effects, depth - 1), random_effect(rng, effects, depth - 1)),
        2 => Formula::or(random_effect(rng, effects, depth - 1), random_effect(rng, effects, depth - 1)),
        _ => leaf(rng),
    }
}

/// Which effects the random first-theorem instances use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum EffectShape {
    /// Formulas over a single effect variable.
    OneVariable,
    /// Formulas over any of the effect variables. The theorem can fail
    /// here: a witness set holding one effect variable at its actual value
    /// can make a smaller part of the superset a cause on its own.
    #[default]
    AnyFormula,
}

/// Binary model of at most ten variables: exogenous `U_i` feed superset
/// variables `X_i` one to one, effects `Y_j` read random subsets of the
/// superset through random tables, and an optional `N` reads anything.
/// Conditions (a), (b), (c) and (e) hold by construction; (d) may not.
pub fn random_theorem1_instance<R: Rng>(rng: &mut R, shape: EffectShape) -> Result<Theorem1Instance> {
    let n_x = rng.gen_range(1..=3);
    let n_y = rng.gen_range(1..=2);
    let noise = rng.gen_bool(0.5);
    let xs: Vec<String> = (1..=n_x).map(|i| format!("X{i}")).collect();
    let ys: Vec<String> = (1..=n_y).map(|i| format!("Y{i}")).collect();

    let mut sig = Signature::new();
    for i in 1..=n_x {
        sig = sig.exo(&format!("U{i}"), ValueRange::binary())?;
    }
    for name in xs.iter().chain(&ys) {
        sig = sig.endo(name, ValueRange::binary())?;
    }
    let mut eqs = Vec::new();
    for (i, x) in xs.iter().enumerate() {
        let flip = rng.gen_bool(0.5) as i64;
        eqs.push(int_table(x, &[format!("U{}", i + 1)], move |v| v[0] ^ flip));
    }
    for y in &ys {
        let k = rng.gen_range(1..=n_x);
        let parents: Vec<String> = xs.choose_multiple(rng, k).cloned().sorted().collect();
        let t = random_truth_table(rng, parents.len());
        eqs.push(int_table(y, &parents, move |v| lookup(&t, v)));
    }
    if noise {
        sig = sig.endo("N", ValueRange::binary())?;
        let pool: Vec<String> = xs.iter().chain(&ys).cloned().collect();
        let k = rng.gen_range(1..=2.min(pool.len()));
        let parents: Vec<String> = pool.choose_multiple(rng, k).cloned().sorted().collect();
        let t = random_truth_table(rng, parents.len());
        eqs.push(int_table("N", &parents, move |v| lookup(&t, v)));
    }
    let model = build_model(sig, eqs)?;

    let superset: Vec<VarId> = xs.iter().map(|x| model.var(x).unwrap()).collect();
    let effects: Vec<VarId> = ys.iter().map(|y| model.var(y).unwrap()).collect();
    let phi = match shape {
        EffectShape::OneVariable => {
            let y = *effects.choose(rng).unwrap();
            random_effect(rng, &[y], 2)
        }
        EffectShape::AnyFormula => random_effect(rng, &effects, 2),
    };
    let context = model.context(rng.gen_range(0..model.context_count()));
    let world = model.evaluate(&context);
    let k = rng.gen_range(1..=superset.len());
    let events: Vec<_> = superset
        .choose_multiple(rng, k)
        .map(|v| {
            let x = if rng.gen_bool(0.8) { world.get(*v) } else { rng.gen_range(0..2) };
            (*v, x)
        })
        .collect();
    let cand = Conjunction::new(&model, events)?;
    Ok(Theorem1Instance {
        model,
        superset,
        cand,
        phi,
        context,
    })
}

const ATTEMPTS_PER_TRIAL: usize = 200;

/// `trials` random instances whose side conditions all hold.
pub fn theorem1_random(trials: usize, seed: u64, shape: EffectShape) -> Result<VerifySummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut summary = VerifySummary::default();
    for _ in 0..trials {
        let mut found = false;
        for _ in 0..ATTEMPTS_PER_TRIAL {
            let inst = random_theorem1_instance(&mut rng, shape)?;
            let r = verify_theorem1(&inst.model, &inst.superset, &inst.cand, &inst.phi, &inst.context)?;
            if !r.conditions_hold() {
                continue;
            }
            summary.record(true, r.implication_holds, || {
                describe1(&inst.model, &inst.superset, &inst.cand, &inst.phi, &inst.context, &r)
            });
            found = true;
            break;
        }
        if !found {
            return Err(Error::Invalid(format!(
                "no instance met the side conditions in {ATTEMPTS_PER_TRIAL} attempts"
            )));
        }
    }
    Ok(summary)
}

/// Thresholds tried against each candidate: the achieved probabilities
/// themselves, the largest possible pair, and the smallest.
fn thresholds(forced: &BigRational, flippable: &BigRational) -> Vec<GoodnessPair> {
    let mut out = vec![
        GoodnessPair::new(flippable.clone(), forced.clone()).expect("probabilities"),
        GoodnessPair::one(),
    ];
    if !forced.is_zero() {
        out.push(GoodnessPair::new(BigRational::zero(), forced.clone()).expect("probabilities"));
    }
    out.dedup();
    out
}

/// Every non-empty pixel candidate, every output value, and the thresholds
/// above. Candidates whose conditioning event has probability zero are
/// skipped.
pub fn theorem2_on_model(model: &CausalModel, pr: &ContextDistribution) -> Result<VerifySummary> {
    let shape = depth_two_shape(model)?;
    let mut summary = VerifySummary::default();
    let choices = shape
        .pixels
        .iter()
        .map(|v| std::iter::once(None).chain((0..model.range(*v).len() as ValueIdx).map(Some)))
        .multi_cartesian_product();
    for pick in choices {
        let events: Vec<_> = shape
            .pixels
            .iter()
            .zip(&pick)
            .filter_map(|(v, x)| x.map(|x| (*v, x)))
            .collect();
        if events.is_empty() {
            continue;
        }
        let cand = Conjunction::new(model, events)?;
        for o in 0..model.range(shape.output).len() as ValueIdx {
            check2(model, pr, &cand, o, None, &mut summary)?;
        }
    }
    Ok(summary)
}

fn check2(
    model: &CausalModel,
    pr: &ContextDistribution,
    cand: &Conjunction,
    o: ValueIdx,
    g: Option<GoodnessPair>,
    summary: &mut VerifySummary,
) -> Result<()> {
    let m = match theorem2_measures(model, pr, cand, o) {
        Ok(m) => m,
        Err(Error::ZeroProbabilityCondition(_)) => {
            summary.skipped += 1;
            return Ok(());
        }
        Err(e) => return Err(e),
    };
    let gs = match g {
        Some(g) => vec![g],
        None => thresholds(&m.forced, &m.flippable),
    };
    for g in gs {
        let r = verify_theorem2(model, pr, cand, o, &g)?;
        summary.record(r.cond1 && r.cond2 && r.cond3, r.implication_holds, || {
            let output = depth_two_shape(model).map(|s| s.output).ok();
            format!(
                "candidate {}, output value {}, thresholds ({}, {}): conditions hold but explanation fails",
                cand.display(model),
                output.map_or_else(|| o.to_string(), |v| model.value(v, o).to_string()),
                format_rational(&g.alpha),
                format_rational(&g.beta)
            )
        });
    }
    Ok(())
}

/// A random labeler on at most eight binary pixels (or five ternary ones)
/// lifted with a random distribution over a random support.
pub fn random_depth_two<R: Rng>(rng: &mut R) -> Result<ProbabilisticModel> {
    let ternary = rng.gen_bool(0.2);
    let max_pixels = if ternary { 5 } else { 8 };
    let width = rng.gen_range(1..=4);
    let height = rng.gen_range(1..=(max_pixels / width).min(2));
    let pixel_range = if ternary {
        ValueRange::ints(0..3)?
    } else {
        ValueRange::binary()
    };
    let grid = GridSpec::new(width, height, pixel_range)?;
    let labels = if rng.gen_bool(0.2) { 3 } else { 2 };
    let images: Vec<Vec<Value>> = grid.images().collect();
    let rows: BTreeMap<Vec<Value>, Value> = images
        .iter()
        .map(|img| (img.clone(), Value::Int(rng.gen_range(0..labels))))
        .collect();
    let labeler = Labeler {
        kind: LabelerKind::Table { rows, default: None },
        label_range: ValueRange::ints(0..labels)?,
    };
    let mut support: Vec<(Vec<Value>, u64)> = images
        .iter()
        .filter_map(|img| {
            if rng.gen_bool(0.7) {
                Some((img.clone(), rng.gen_range(1..=9)))
            } else {
                None
            }
        })
        .collect();
    if support.is_empty() {
        support.push((images.choose(rng).unwrap().clone(), 1));
    }
    let total: u64 = support.iter().map(|(_, w)| w).sum();
    let entries = support
        .into_iter()
        .map(|(img, w)| (img, ratio(w, total)))
        .collect();
    let dist = ImageDistribution::new(&grid, entries)?;
    lift_classifier(&grid, &labeler, &dist)
}

/// `trials` random lifts, each with a random candidate and output value.
/// Half the trials use thresholds read off the achieved probabilities so
/// the side conditions are often met; the rest use random thresholds.
pub fn theorem2_random(trials: usize, seed: u64) -> Result<VerifySummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut summary = VerifySummary::default();
    while summary.checked < trials {
        let pm = random_depth_two(&mut rng)?;
        let model = &pm.model;
        let shape = depth_two_shape(model)?;
        let k = rng.gen_range(1..=shape.pixels.len().min(3));
        let events: Vec<_> = shape
            .pixels
            .choose_multiple(&mut rng, k)
            .map(|v| (*v, rng.gen_range(0..model.range(*v).len() as ValueIdx)))
            .collect();
        let cand = Conjunction::new(model, events)?;
        let o = rng.gen_range(0..model.range(shape.output).len() as ValueIdx);
        let m = match theorem2_measures(model, &pm.distribution, &cand, o) {
            Ok(m) => m,
            Err(Error::ZeroProbabilityCondition(_)) => {
                summary.skipped += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let g = if rng.gen_bool(0.5) {
            GoodnessPair::new(m.flippable.clone(), m.forced.clone())?
        } else {
            let mut q = || ratio(rng.gen_range(0..=8u64), 8);
            GoodnessPair::new(q(), q())?
        };
        check2(model, &pm.distribution, &cand, o, Some(g), &mut summary)?;
    }
    Ok(summary)
}

/// A random acyclic model with ranges of two or three integers and at most
/// `max_bits` bits of state. One or two exogenous variables `U1..` come
/// first; each endogenous `V1..` reads up to three earlier variables as an
/// or-gate, an and-gate or a random table.
pub fn random_model<R: Rng>(rng: &mut R, max_bits: f64) -> Result<CausalModel> {
    let mut bits = 0.0;
    let take = |rng: &mut R, bits: &mut f64| -> Option<i64> {
        let size = if rng.gen_bool(0.25) { 3 } else { 2 };
        let cost = (size as f64).log2();
        if *bits + cost > max_bits + 1e-9 {
            return (*bits + 1.0 <= max_bits + 1e-9).then(|| {
                *bits += 1.0;
                2
            });
        }
        *bits += cost;
        Some(size)
    };
    let mut vars: Vec<(String, i64, bool)> = Vec::new();
    for i in 1..=rng.gen_range(1..=2) {
        match take(rng, &mut bits) {
            Some(size) => vars.push((format!("U{i}"), size, false)),
            None => break,
        }
    }
    let mut i = 1;
    while let Some(size) = take(rng, &mut bits) {
        vars.push((format!("V{i}"), size, true));
        i += 1;
        if rng.gen_bool(0.05) {
            break;
        }
    }
    if vars.iter().all(|v| !v.2) {
        return Err(Error::Invalid("bit budget leaves no endogenous variable".into()));
    }
    let mut sig = Signature::new();
    for (name, size, endo) in &vars {
        let range = ValueRange::ints(0..*size)?;
        sig = if *endo { sig.endo(name, range)? } else { sig.exo(name, range)? };
    }
    let mut eqs = Vec::new();
    for (idx, (name, size, endo)) in vars.iter().enumerate() {
        if !endo {
            continue;
        }
        let k = rng.gen_range(1..=idx.min(3));
        let mut parents: Vec<usize> = (0..idx).collect::<Vec<_>>().choose_multiple(rng, k).copied().collect();
        // lean towards chains through endogenous variables
        let endo_before: Vec<usize> = (0..idx).filter(|p| vars[*p].2).collect();
        if !endo_before.is_empty() && parents.iter().all(|p| !vars[*p].2) && rng.gen_bool(0.7) {
            parents[0] = *endo_before.choose(rng).unwrap();
            parents.dedup();
        }
        parents.sort();
        parents.dedup();
        // some-nonzero, all-nonzero, or a random table
        let shape = rng.gen_range(0..4);
        let rows = parents
            .iter()
            .map(|p| 0..vars[*p].1)
            .multi_cartesian_product()
            .filter_map(|xs| {
                let y = match shape {
                    0 => xs.iter().any(|x| *x != 0) as i64,
                    1 => xs.iter().all(|x| *x != 0) as i64,
                    _ => rng.gen_range(0..*size),
                };
                (y != 0).then(|| (xs.into_iter().map(Value::Int).collect(), Value::Int(y)))
            })
            .collect();
        let table = TableEquation {
            parents: parents
                .iter()
                .map(|p| VariableId::new(vars[*p].0.as_str()))
                .collect::<Result<_>>()?,
            rows,
            default: Value::Int(0),
        };
        eqs.push(StructuralEquation::table(name, table)?);
    }
    build_model(sig, eqs)
}

/// A random plain formula over endogenous variables: events combined with
/// negation, conjunction and disjunction up to the given depth.
pub fn random_formula<R: Rng>(rng: &mut R, model: &CausalModel, depth: u32) -> Formula {
    let endo: Vec<VarId> = model.endogenous().collect();
    let v = *endo.choose(rng).expect("models have endogenous variables");
    let leaf = Formula::event(v, rng.gen_range(0..model.range(v).len() as ValueIdx));
    if depth == 0 {
        return leaf;
    }
    match rng.gen_range(0..6) {
        0 => Formula::not(random_formula(rng, model, depth - 1)),
        1 => Formula::and(random_formula(rng, model, depth - 1), random_formula(rng, model, depth - 1)),
        2 => Formula::or(random_formula(rng, model, depth - 1), random_formula(rng, model, depth - 1)),
        _ => leaf,
    }
}

/// A random non-empty conjunction of endogenous events, with each value
/// taken from the given world with probability `actual_bias`.
pub fn random_conjunction<R: Rng>(
    rng: &mut R,
    model: &CausalModel,
    world: &[ValueIdx],
    max_len: usize,
    actual_bias: f64,
) -> Conjunction {
    let endo: Vec<VarId> = model.endogenous().collect();
    let k = rng.gen_range(1..=endo.len().min(max_len.max(1)));
    let events = endo
        .choose_multiple(rng, k)
        .map(|v| {
            let x = if rng.gen_bool(actual_bias) {
                world[v.index()]
            } else {
                rng.gen_range(0..model.range(*v).len() as ValueIdx)
            };
            (*v, x)
        })
        .collect();
    Conjunction::new(model, events).expect("distinct endogenous events")
}
