//! Depth-two models built from pixel labelers, image distributions over
//! them, and helpers for explaining the absence of a label.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::causation::{is_determined_by_context, Conjunction};
use crate::error::{Error, Result};
use crate::explanation::{
    find_partial_explanations, ContextDistribution, ContextSet, DefinitionVariant, GoodnessPair, ProbabilisticModel,
};
use crate::model::{
    build_model, CausalModel, Expr, Formula, Signature, StructuralEquation, TableEquation, Value, ValueRange, VarId,
    VariableId,
};
use crate::rational::{format_rational, parse_rational, ratio};

/// Name of the label variable in every lifted model.
pub const OUTPUT: &str = "O";

/// A `width` by `height` grid of pixels sharing one value range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridSpec {
    width: u32,
    height: u32,
    pixel_range: ValueRange,
}

impl GridSpec {
    pub fn new(width: u32, height: u32, pixel_range: ValueRange) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Invalid("grid dimensions must be positive".into()));
        }
        let grid = GridSpec {
            width,
            height,
            pixel_range,
        };
        let images = (grid.pixel_range.len() as u128).checked_pow(grid.pixel_count() as u32);
        let limit = crate::model::Limits::from_env().max_contexts;
        match images {
            Some(n) if n <= limit as u128 => Ok(grid),
            n => Err(Error::ScaleExceeded {
                what: "images".into(),
                size: n.unwrap_or(u128::MAX),
                limit,
            }),
        }
    }

    /// A single row of `n` binary pixels.
    pub fn binary_row(n: u32) -> Result<Self> {
        Self::new(n, 1, ValueRange::binary())
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixel_range(&self) -> &ValueRange {
        &self.pixel_range
    }

    pub fn pixel_count(&self) -> usize {
        (self.width * self.height) as usize
    }

    /// `X1..Xn` for a single row, `P{row}_{col}` otherwise; row-major.
    pub fn pixel_names(&self) -> Vec<String> {
        if self.height == 1 {
            (1..=self.width).map(|i| format!("X{i}")).collect()
        } else {
            (0..self.height)
                .flat_map(|r| (0..self.width).map(move |c| format!("P{r}_{c}")))
                .collect()
        }
    }

    pub fn pixel_name(&self, row: u32, col: u32) -> String {
        if self.height == 1 {
            format!("X{}", col + 1)
        } else {
            format!("P{row}_{col}")
        }
    }

    /// Every image in row-major mixed-radix order, first pixel most significant.
    pub fn images(&self) -> impl Iterator<Item = Vec<Value>> + '_ {
        let n = self.pixel_count();
        let r = self.pixel_range.len();
        let total = r.pow(n as u32);
        (0..total).map(move |mut idx| {
            let mut img = vec![Value::Int(0); n];
            for slot in img.iter_mut().rev() {
                *slot = self.pixel_range.values()[idx % r].clone();
                idx /= r;
            }
            img
        })
    }
}

fn exo_name(pixel: &str) -> String {
    format!("U_{pixel}")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LabelerKind {
    /// 1 if any pixel differs from the first value of the pixel range.
    AnyOn,
    /// 0 when the tail has an even number of zeros, which must be positive
    /// if the first pixel is 1; otherwise 1.
    ParityFirstPixel,
    /// 1 when at least this many pixels are on.
    Threshold(u32),
    /// Explicit labels; images not listed take the default, if any.
    Table {
        rows: BTreeMap<Vec<Value>, Value>,
        default: Option<Value>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Labeler {
    pub kind: LabelerKind,
    pub label_range: ValueRange,
}

impl Labeler {
    pub fn any_on() -> Self {
        Self::binary(LabelerKind::AnyOn)
    }

    pub fn parity_first_pixel() -> Self {
        Self::binary(LabelerKind::ParityFirstPixel)
    }

    pub fn threshold(k: u32) -> Self {
        Self::binary(LabelerKind::Threshold(k))
    }

    fn binary(kind: LabelerKind) -> Self {
        Labeler {
            kind,
            label_range: ValueRange::binary(),
        }
    }

    pub fn label(&self, grid: &GridSpec, image: &[Value]) -> Result<Value> {
        let off = &grid.pixel_range.values()[0];
        let on = image.iter().filter(|v| *v != off).count();
        let label = match &self.kind {
            LabelerKind::AnyOn => Value::from(on > 0),
            LabelerKind::Threshold(k) => Value::from(on >= *k as usize),
            LabelerKind::ParityFirstPixel => {
                let zeros = image[1..].iter().filter(|v| **v == Value::Int(0)).count();
                let first_zero = image[0] == Value::Int(0);
                Value::from(!(zeros % 2 == 0 && (first_zero || zeros > 0)))
            }
            LabelerKind::Table { rows, default } => match rows.get(image).or(default.as_ref()) {
                Some(v) => v.clone(),
                None => {
                    return Err(Error::Invalid(format!(
                        "labeler has no label for image [{}]",
                        join(image)
                    )))
                }
            },
        };
        if !self.label_range.contains(&label) {
            return Err(Error::ValueOutOfRange {
                var: OUTPUT.into(),
                value: label.to_string(),
            });
        }
        Ok(label)
    }
}

fn join(image: &[Value]) -> String {
    image.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

/// Exact weights over images; zero-weight images are omitted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImageDistribution {
    entries: Vec<(Vec<Value>, BigRational)>,
}

impl ImageDistribution {
    /// Weights must be positive, images distinct and within the grid, and
    /// the total exactly one. Entries are kept in image order.
    pub fn new(grid: &GridSpec, mut entries: Vec<(Vec<Value>, BigRational)>) -> Result<Self> {
        let mut total = BigRational::zero();
        for (img, w) in &entries {
            if img.len() != grid.pixel_count() {
                return Err(Error::Invalid(format!(
                    "image [{}] has {} pixels, expected {}",
                    join(img),
                    img.len(),
                    grid.pixel_count()
                )));
            }
            if let Some(v) = img.iter().find(|v| !grid.pixel_range.contains(v)) {
                return Err(Error::ValueOutOfRange {
                    var: "pixel".into(),
                    value: v.to_string(),
                });
            }
            if !w.is_positive() {
                return Err(Error::NegativeWeight(format_rational(w)));
            }
            total += w;
        }
        if !total.is_one() {
            return Err(Error::WeightSumNotOne(format_rational(&total)));
        }
        let order = |img: &[Value]| -> Vec<usize> {
            img.iter()
                .map(|v| grid.pixel_range.index_of(v).unwrap_or(0) as usize)
                .collect()
        };
        entries.sort_by_cached_key(|(img, _)| order(img));
        if let Some(w) = entries.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::Invalid(format!("image [{}] listed twice", join(&w[0].0))));
        }
        Ok(ImageDistribution { entries })
    }

    /// One image per line: pixel values in row-major order, then a weight.
    /// Blank lines and `#` comments are ignored.
    pub fn parse(grid: &GridSpec, text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            let at = |e: Error| Error::Invalid(format!("line {}: {e}", lineno + 1));
            let (weight, pixels) = tokens.split_last().expect("non-empty line");
            let weight = parse_rational(weight).map_err(at)?;
            let image = pixels
                .iter()
                .map(|t| Value::parse_token(t))
                .collect::<Result<Vec<_>>>()
                .map_err(at)?;
            entries.push((image, weight));
        }
        Self::new(grid, entries)
    }

    pub fn entries(&self) -> &[(Vec<Value>, BigRational)] {
        &self.entries
    }

    /// Uniform over every image of the grid.
    pub fn uniform(grid: &GridSpec) -> Result<Self> {
        let images: Vec<_> = grid.images().collect();
        let w = ratio(1, images.len() as u64);
        Self::new(grid, images.into_iter().map(|i| (i, w.clone())).collect())
    }

    /// Text form accepted by [`ImageDistribution::parse`].
    pub fn to_text(&self) -> String {
        self.entries
            .iter()
            .map(|(img, w)| format!("{} {}\n", join(img), format_rational(w)))
            .collect()
    }
}

/// Pixels forced to a neutral value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegionMask {
    pub pixels: Vec<VarId>,
    pub fill_value: Value,
}

/// The pixels and the output of a depth-two model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DepthTwoShape {
    pub pixels: Vec<VarId>,
    pub output: VarId,
}

/// Checks that each exogenous variable drives exactly one pixel, that each
/// pixel has that single exogenous parent, that one remaining endogenous
/// variable reads only pixels, and that every pixel combination occurs.
pub fn depth_two_shape(model: &CausalModel) -> Result<DepthTwoShape> {
    let bad = |why: String| Error::NotDepthTwoModel(why);
    let mut pixels = Vec::new();
    let mut others = Vec::new();
    for v in model.endogenous() {
        match model.parents(v) {
            [p] if !model.is_endogenous(*p) => pixels.push(v),
            _ => others.push(v),
        }
    }
    let output = match others[..] {
        [o] => o,
        [] => return Err(bad("no output variable".into())),
        _ => {
            let names: Vec<_> = others.iter().map(|v| model.name(*v)).collect();
            return Err(bad(format!("more than one non-pixel variable: {}", names.join(", "))));
        }
    };
    if let Some(p) = model.parents(output).iter().find(|p| !pixels.contains(p)) {
        return Err(bad(format!("{} reads non-pixel {}", model.name(output), model.name(*p))));
    }
    let mut driven = BTreeMap::new();
    for &p in &pixels {
        let u = model.parents(p)[0];
        if let Some(prev) = driven.insert(u, p) {
            return Err(bad(format!(
                "{} drives both {} and {}",
                model.name(u),
                model.name(prev),
                model.name(p)
            )));
        }
    }
    if let Some(u) = model.exogenous().find(|u| !driven.contains_key(u)) {
        return Err(bad(format!("{} drives no pixel", model.name(u))));
    }
    if let Some(missing) = is_determined_by_context(model, &pixels)?.missing {
        return Err(bad(format!(
            "pixel setting {} occurs in no context",
            model.display_events(&missing)
        )));
    }
    Ok(DepthTwoShape { pixels, output })
}

/// Builds the depth-two model of a labeler with the image distribution
/// carried over to contexts. The default context set is everything.
pub fn lift_classifier(grid: &GridSpec, labeler: &Labeler, dist: &ImageDistribution) -> Result<ProbabilisticModel> {
    let names = grid.pixel_names();
    let mut sig = Signature::new();
    for n in &names {
        sig = sig.exo(&exo_name(n), grid.pixel_range.clone())?;
    }
    for n in &names {
        sig = sig.endo(n, grid.pixel_range.clone())?;
    }
    sig = sig.endo(OUTPUT, labeler.label_range.clone())?;

    let mut equations = Vec::with_capacity(names.len() + 1);
    for n in &names {
        equations.push(StructuralEquation::expr(n, Expr::Var(VariableId::new(exo_name(n))?))?);
    }
    let default = labeler.label_range.values()[0].clone();
    let mut rows = Vec::new();
    for img in grid.images() {
        let label = labeler.label(grid, &img)?;
        if label != default {
            rows.push((img, label));
        }
    }
    let parents = names.iter().map(VariableId::new).collect::<Result<_>>()?;
    equations.push(StructuralEquation::table(
        OUTPUT,
        TableEquation {
            parents,
            rows,
            default,
        },
    )?);
    let model = build_model(sig, equations)?;
    let distribution = image_weights(&model, grid, dist)?;
    Ok(ProbabilisticModel {
        model,
        distribution,
        k: ContextSet::All,
    })
}

fn image_context(model: &CausalModel, grid: &GridSpec, image: &[Value]) -> Result<crate::model::Context> {
    let names: Vec<String> = grid.pixel_names().iter().map(|n| exo_name(n)).collect();
    let pairs: Vec<(&str, Value)> = names.iter().map(String::as_str).zip(image.iter().cloned()).collect();
    model.context_from_values(&pairs)
}

fn image_weights(model: &CausalModel, grid: &GridSpec, dist: &ImageDistribution) -> Result<ContextDistribution> {
    let entries = dist
        .entries
        .iter()
        .map(|(img, w)| Ok((image_context(model, grid, img)?, w.clone())))
        .collect::<Result<_>>()?;
    ContextDistribution::new(model, entries)
}

/// The skewed distribution over `2n + 1` binary pixels: the first pixel is
/// fair and independent of the rest, the tail has an even number of zeros
/// with probability 9/10, and tails are uniform within each parity class.
pub fn parity_distribution(n: u32) -> Result<ImageDistribution> {
    if n == 0 {
        return Err(Error::Invalid("parity size must be positive".into()));
    }
    let grid = GridSpec::binary_row(2 * n + 1)?;
    let class_size = 1u64 << (2 * n - 1);
    let even = ratio(9, 20 * class_size);
    let odd = ratio(1, 20 * class_size);
    let entries = grid
        .images()
        .map(|img| {
            let zeros = img[1..].iter().filter(|v| **v == Value::Int(0)).count();
            let w = if zeros % 2 == 0 { even.clone() } else { odd.clone() };
            (img, w)
        })
        .collect();
    ImageDistribution::new(&grid, entries)
}

/// The members of the model's context set whose masked pixels all show the
/// fill value.
pub fn restrict_contexts(pm: &ProbabilisticModel, mask: &RegionMask) -> Result<ContextSet> {
    if mask.pixels.is_empty() {
        return Ok(pm.k.clone());
    }
    let m = &pm.model;
    let shape = depth_two_shape(m)?;
    let mut fills = Vec::with_capacity(mask.pixels.len());
    for &p in &mask.pixels {
        if !shape.pixels.contains(&p) {
            return Err(Error::Invalid(format!("{} is not a pixel", m.name(p))));
        }
        fills.push((p, m.value_index(p, &mask.fill_value)?));
    }
    let kept: Vec<_> = pm
        .k
        .contexts(m)
        .into_iter()
        .filter(|u| {
            let sol = m.evaluate(u);
            fills.iter().all(|(p, x)| sol.get(*p) == *x)
        })
        .collect();
    if kept.is_empty() {
        return Err(Error::EmptyRestriction);
    }
    Ok(ContextSet::Explicit(kept))
}

/// Conditions an image distribution on a formula over the lifted model.
pub fn rare_event_reweight(
    model: &CausalModel,
    grid: &GridSpec,
    dist: &ImageDistribution,
    condition: &Formula,
) -> Result<ImageDistribution> {
    condition.check_plain(model)?;
    let mut kept = Vec::new();
    for (img, w) in &dist.entries {
        let u = image_context(model, grid, img)?;
        if model.satisfies(&u, condition)? {
            kept.push((img.clone(), w.clone()));
        }
    }
    let total = kept.iter().fold(BigRational::zero(), |a, (_, w)| a + w);
    if total.is_zero() {
        return Err(Error::ZeroProbabilityCondition(model.display_formula(condition)));
    }
    Ok(ImageDistribution {
        entries: kept.into_iter().map(|(i, w)| (i, w / &total)).collect(),
    })
}

/// Minimal partial explanations of the output taking `negative_label`,
/// relative to `k`, with the distribution conditioned on `k`.
pub fn explain_absence(
    pm: &ProbabilisticModel,
    k: &ContextSet,
    negative_label: &Value,
    g: &GoodnessPair,
    max_size: Option<usize>,
) -> Result<Vec<(Conjunction, GoodnessPair)>> {
    let m = &pm.model;
    let shape = depth_two_shape(m)?;
    let label = m.value_index(shape.output, negative_label)?;
    let pr = match k {
        ContextSet::All => pm.distribution.clone(),
        ContextSet::Explicit(cs) => {
            let members: BTreeSet<u64> = cs.iter().map(|u| m.context_index(u)).collect();
            pm.distribution
                .condition(|i| members.contains(&i), "the restricted context set")?
        }
    };
    let phi = Formula::event(shape.output, label);
    let found = find_partial_explanations(m, &pr, k, &phi, g, DefinitionVariant::halpern(), max_size)?;
    Ok(found
        .into_iter()
        .map(|(c, v)| (c, v.achieved.expect("partial verdicts carry goodness")))
        .collect())
}

/// Pixels on every row and column that is a multiple of `min_size`, so that
/// each `min_size` square inside the grid contains one. A size of zero is
/// treated as one.
pub fn pixel_net(grid: &GridSpec, min_size: u32) -> Vec<VariableId> {
    let step = min_size.max(1) as usize;
    let mut net = Vec::new();
    for r in (0..grid.height).step_by(step) {
        for c in (0..grid.width).step_by(step) {
            net.push(VariableId::new(grid.pixel_name(r, c)).expect("pixel names are identifiers"));
        }
    }
    net
}

/// Whether every `size` square fully inside the grid holds a net pixel.
pub fn net_covers(grid: &GridSpec, net: &[VariableId], size: u32) -> bool {
    let members: BTreeSet<&str> = net.iter().map(VariableId::as_str).collect();
    if size > grid.width || size > grid.height {
        return true;
    }
    (0..=grid.height - size).all(|r0| {
        (0..=grid.width - size).all(|c0| {
            (r0..r0 + size).any(|r| (c0..c0 + size).any(|c| members.contains(grid.pixel_name(r, c).as_str())))
        })
    })
}

/// Shorthand for lifting with the parity labeler and distribution.
pub fn parity_model(n: u32) -> Result<ProbabilisticModel> {
    let dist = parity_distribution(n)?;
    lift_classifier(&GridSpec::binary_row(2 * n + 1)?, &Labeler::parity_first_pixel(), &dist)
}
