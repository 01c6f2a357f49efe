//! Hypothesis families with exact consistent-ERM and exact robust-ERM solvers.
//!
//! The families are deliberately low-VC so that every optimization here can be
//! exact: thresholds on the line, intervals, axis-aligned rectangles in up to
//! two dimensions, and explicit label tables over finite spaces. The solvers
//! are deterministic; tie-breaking rules are documented on each function so
//! that encode/decode pipelines reproduce hypotheses bit for bit.

use std::fmt;
use std::str::FromStr;

use crate::loss::Perturbation;
use crate::metric::{MetricSpace, Point};
use crate::piecewise::{Interval as Iv, IntervalSet};
use crate::scalar::Real;
use crate::{Error, Result};

/// Binary label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Zero,
    One,
}

impl Label {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Label::One
        } else {
            Label::Zero
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            Label::Zero => 0,
            Label::One => 1,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Label::Zero => Label::One,
            Label::One => Label::Zero,
        }
    }

    pub fn as_real<R: Real>(self) -> R {
        match self {
            Label::Zero => R::zero(),
            Label::One => R::one(),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.bit())
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "0" => Ok(Label::Zero),
            "1" => Ok(Label::One),
            other => Err(Error::Parse(format!("bad label: {other}"))),
        }
    }
}

/// Which side of a threshold predicts label one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// `h(x) = 1` iff `x <= theta`.
    LeftIsOne,
    /// `h(x) = 1` iff `x >= theta`.
    RightIsOne,
}

/// A binary predictor.
#[derive(Debug, Clone, PartialEq)]
pub enum Hypothesis<R> {
    Threshold { theta: R, orientation: Orientation },
    Interval { lo: R, hi: R, inside: Label },
    AxisRectangle { lo: Vec<R>, hi: Vec<R>, inside: Label },
    Table { labels: Vec<Label> },
}

impl<R: Real> Hypothesis<R> {
    pub fn threshold(theta: R, orientation: Orientation) -> Self {
        Hypothesis::Threshold { theta, orientation }
    }

    pub fn interval(lo: R, hi: R, inside: Label) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidArgument(format!("interval needs lo <= hi, got {lo} > {hi}")));
        }
        Ok(Hypothesis::Interval { lo, hi, inside })
    }

    pub fn rectangle(lo: Vec<R>, hi: Vec<R>, inside: Label) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::InvalidArgument("rectangle bounds must have equal nonzero length".into()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| a > b) {
            return Err(Error::InvalidArgument("rectangle needs lo <= hi per axis".into()));
        }
        Ok(Hypothesis::AxisRectangle { lo, hi, inside })
    }

    pub fn table(labels: Vec<Label>) -> Self {
        Hypothesis::Table { labels }
    }

    /// Deterministic prediction. Panics when the point kind does not match
    /// the hypothesis (callers must pass points of the hypothesis's space).
    pub fn predict(&self, x: &Point<R>) -> Label {
        match self {
            Hypothesis::Threshold { theta, orientation } => {
                let v = x.scalar().expect("threshold hypothesis needs a 1-D point");
                match orientation {
                    Orientation::LeftIsOne => Label::from_bool(v <= *theta),
                    Orientation::RightIsOne => Label::from_bool(v >= *theta),
                }
            }
            Hypothesis::Interval { lo, hi, inside } => {
                let v = x.scalar().expect("interval hypothesis needs a 1-D point");
                if v >= *lo && v <= *hi {
                    *inside
                } else {
                    inside.flip()
                }
            }
            Hypothesis::AxisRectangle { lo, hi, inside } => {
                let c = x.as_coords().expect("rectangle hypothesis needs coordinates");
                assert_eq!(c.len(), lo.len(), "rectangle dimension mismatch");
                let in_box = c.iter().zip(lo.iter().zip(hi)).all(|(v, (a, b))| v >= a && v <= b);
                if in_box {
                    *inside
                } else {
                    inside.flip()
                }
            }
            Hypothesis::Table { labels } => {
                let i = x.as_index().expect("table hypothesis needs an index point");
                labels[i]
            }
        }
    }
}

/// Anything that assigns a binary label to points, with an optional exact
/// description of its 1-D decision region.
pub trait BinaryClassifier<R: Real> {
    fn classify(&self, x: &Point<R>) -> Label;

    /// The set `{x : classify(x) = 1}` for 1-D hypotheses, when available.
    fn one_region_1d(&self) -> Option<IntervalSet<R>> {
        None
    }
}

impl<R: Real> BinaryClassifier<R> for Hypothesis<R> {
    fn classify(&self, x: &Point<R>) -> Label {
        self.predict(x)
    }

    fn one_region_1d(&self) -> Option<IntervalSet<R>> {
        match self {
            Hypothesis::Threshold { theta, orientation } => Some(match orientation {
                Orientation::LeftIsOne => IntervalSet::of(vec![Iv::ray_below(*theta, true)]),
                Orientation::RightIsOne => IntervalSet::of(vec![Iv::ray_above(*theta, true)]),
            }),
            Hypothesis::Interval { lo, hi, inside } => {
                let base = IntervalSet::of(vec![Iv::closed(*lo, *hi)]);
                Some(match inside {
                    Label::One => base,
                    Label::Zero => base.complement(),
                })
            }
            Hypothesis::AxisRectangle { lo, hi, inside } if lo.len() == 1 => {
                let base = IntervalSet::of(vec![Iv::closed(lo[0], hi[0])]);
                Some(match inside {
                    Label::One => base,
                    Label::Zero => base.complement(),
                })
            }
            _ => None,
        }
    }
}

impl<R: Real> fmt::Display for Hypothesis<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Hypothesis::Threshold { theta, orientation } => {
                let o = match orientation {
                    Orientation::LeftIsOne => "L",
                    Orientation::RightIsOne => "R",
                };
                write!(f, "threshold {o} {theta}")
            }
            Hypothesis::Interval { lo, hi, inside } => {
                write!(f, "interval {lo} {hi} {inside}")
            }
            Hypothesis::AxisRectangle { lo, hi, inside } => {
                write!(f, "rect {}", lo.len())?;
                for v in lo {
                    write!(f, " {v}")?;
                }
                for v in hi {
                    write!(f, " {v}")?;
                }
                write!(f, " {inside}")
            }
            Hypothesis::Table { labels } => {
                write!(f, "table")?;
                for l in labels {
                    write!(f, " {l}")?;
                }
                Ok(())
            }
        }
    }
}

impl<R: Real> Hypothesis<R> {
    /// Parses the one-line text form produced by `Display`.
    pub fn from_text(s: &str) -> Result<Self> {
        fn num<R: Real>(tok: &mut std::str::SplitWhitespace<'_>, what: &str) -> Result<R> {
            let t = tok.next().ok_or_else(|| Error::Parse(format!("missing {what}")))?;
            t.parse::<R>().map_err(|_| Error::Parse(format!("bad {what}: {t}")))
        }
        let mut tok = s.split_whitespace();
        let kind = tok.next().ok_or_else(|| Error::Parse("empty hypothesis line".into()))?;
        match kind {
            "threshold" => {
                let o = match tok.next() {
                    Some("L") => Orientation::LeftIsOne,
                    Some("R") => Orientation::RightIsOne,
                    other => return Err(Error::Parse(format!("bad orientation: {other:?}"))),
                };
                let theta = num(&mut tok, "theta")?;
                Ok(Hypothesis::Threshold { theta, orientation: o })
            }
            "interval" => {
                let lo = num(&mut tok, "interval lo")?;
                let hi = num(&mut tok, "interval hi")?;
                let inside: Label =
                    tok.next().ok_or_else(|| Error::Parse("missing label".into()))?.parse()?;
                Hypothesis::interval(lo, hi, inside)
            }
            "rect" => {
                let dim: usize = tok
                    .next()
                    .ok_or_else(|| Error::Parse("missing rect dim".into()))?
                    .parse()
                    .map_err(|_| Error::Parse("bad rect dim".into()))?;
                let lo: Vec<R> =
                    (0..dim).map(|i| num(&mut tok, &format!("rect lo[{i}]"))).collect::<Result<_>>()?;
                let hi: Vec<R> =
                    (0..dim).map(|i| num(&mut tok, &format!("rect hi[{i}]"))).collect::<Result<_>>()?;
                let inside: Label =
                    tok.next().ok_or_else(|| Error::Parse("missing label".into()))?.parse()?;
                Hypothesis::rectangle(lo, hi, inside)
            }
            "table" => {
                let labels: Vec<Label> = tok.map(|t| t.parse()).collect::<Result<_>>()?;
                if labels.is_empty() {
                    return Err(Error::Parse("table needs at least one label".into()));
                }
                Ok(Hypothesis::table(labels))
            }
            other => Err(Error::Parse(format!("unknown hypothesis kind: {other}"))),
        }
    }
}

/// An ordered labeled sample. Order matters: the compression scheme labels
/// inflated points after the minimally-indexed covering sample point.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample<R> {
    entries: Vec<(Point<R>, Label)>,
}

impl<R: Real> LabeledSample<R> {
    pub fn new(entries: Vec<(Point<R>, Label)>) -> Self {
        LabeledSample { entries }
    }

    pub fn from_scalars(pairs: Vec<(R, Label)>) -> Self {
        LabeledSample {
            entries: pairs.into_iter().map(|(x, y)| (Point::one_d(x), y)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(Point<R>, Label)] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Point<R>, Label)> {
        self.entries.iter()
    }

    pub fn point(&self, i: usize) -> &Point<R> {
        &self.entries[i].0
    }

    pub fn label(&self, i: usize) -> Label {
        self.entries[i].1
    }

    /// Sub-sample at the given indices, preserving the given order.
    pub fn select(&self, indices: &[usize]) -> LabeledSample<R> {
        LabeledSample {
            entries: indices.iter().map(|&i| self.entries[i].clone()).collect(),
        }
    }

    /// One line per entry: coordinates (or `#index`), `;`, label.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (p, y) in &self.entries {
            match p {
                Point::Coords(c) => {
                    let coords: Vec<String> = c.iter().map(|v| v.to_string()).collect();
                    out.push_str(&coords.join(" "));
                }
                Point::Index(i) => out.push_str(&format!("#{i}")),
            }
            out.push_str(&format!(" ; {y}\n"));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (lhs, rhs) = line
                .split_once(';')
                .ok_or_else(|| Error::Parse(format!("missing ';' in sample line: {line}")))?;
            let label: Label = rhs.trim().parse()?;
            let lhs = lhs.trim();
            let point = if let Some(idx) = lhs.strip_prefix('#') {
                Point::Index(
                    idx.trim()
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad index: {idx}")))?,
                )
            } else {
                let coords: Vec<R> = lhs
                    .split_whitespace()
                    .map(|t| t.parse::<R>().map_err(|_| Error::Parse(format!("bad coordinate: {t}"))))
                    .collect::<Result<_>>()?;
                if coords.is_empty() {
                    return Err(Error::Parse(format!("empty point in line: {line}")));
                }
                Point::Coords(coords)
            };
            entries.push((point, label));
        }
        Ok(LabeledSample::new(entries))
    }
}

/// A hypothesis family with known VC dimension and exact solvers.
#[derive(Debug, Clone, PartialEq)]
pub enum HypothesisFamily {
    /// One-sided thresholds `h(x) = 1{x <= theta}`.
    Thresholds,
    /// Intervals predicting one inside `[lo, hi]`.
    Intervals,
    /// Axis-aligned boxes predicting one inside; exact robust ERM supports
    /// `dim <= 2`.
    AxisRectangles { dim: usize },
    /// An explicit list of label tables over a finite space.
    FiniteTable { tables: Vec<Vec<Label>> },
}

impl HypothesisFamily {
    /// All `2^n` label tables over an `n`-point finite space (`n <= 16`).
    pub fn all_tables(n: usize) -> Self {
        assert!(n <= 16, "all_tables is exponential in the point count");
        let tables = (0u32..(1 << n))
            .map(|mask| {
                (0..n)
                    .map(|i| Label::from_bool(mask >> i & 1 == 1))
                    .collect()
            })
            .collect();
        HypothesisFamily::FiniteTable { tables }
    }

    /// VC dimension: the stored constant for the parametric families, an
    /// exhaustive shattering search for finite-table families.
    pub fn vc_dimension(&self) -> usize {
        match self {
            HypothesisFamily::Thresholds => 1,
            HypothesisFamily::Intervals => 2,
            HypothesisFamily::AxisRectangles { dim } => 2 * dim,
            HypothesisFamily::FiniteTable { tables } => finite_table_vc(tables),
        }
    }
}

/// Advances `subset` to the next size-`k` combination of `0..n` in
/// lexicographic order; returns false when exhausted.
fn next_combination(subset: &mut [usize], n: usize) -> bool {
    let k = subset.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if subset[i] < i + n - k {
            subset[i] += 1;
            for j in i + 1..k {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Exhaustive shattering search over the tables' index set.
fn finite_table_vc(tables: &[Vec<Label>]) -> usize {
    let Some(first) = tables.first() else {
        return 0;
    };
    let n = first.len();
    let mut vc = 0;
    for size in 1..=n {
        let mut shattered = false;
        let mut subset: Vec<usize> = (0..size).collect();
        loop {
            let patterns: std::collections::HashSet<Vec<u8>> = tables
                .iter()
                .map(|t| subset.iter().map(|&i| t[i].bit()).collect())
                .collect();
            if patterns.len() == 1 << size {
                shattered = true;
                break;
            }
            if !next_combination(&mut subset, n) {
                break;
            }
        }
        if shattered {
            vc = size;
        } else {
            break;
        }
    }
    vc
}

fn scalar_of<R: Real>(p: &Point<R>) -> Result<R> {
    p.scalar()
        .ok_or_else(|| Error::InvalidPoint("expected a 1-D coordinate point".into()))
}

/// Empirical binary loss of a predictor on a sample; zero iff consistent.
pub(crate) fn mismatch_count<R: Real, C: BinaryClassifier<R>>(
    c: &C,
    s: &LabeledSample<R>,
) -> usize {
    s.iter().filter(|(x, y)| c.classify(x) != *y).count()
}

/// Exact consistent ERM.
///
/// Deterministic tie-breaking: thresholds take the midpoint of the maximal
/// consistent parameter interval; single-class samples put the boundary at
/// the extreme point (all-zero samples sit one unit below the leftmost zero);
/// intervals take the tightest fit expanded by midpoint margins toward the
/// nearest zeros, mirroring the margin when only one side has a zero;
/// rectangles take the tightest box; finite tables take the first consistent
/// table in family order.
pub fn erm_realizable<R: Real>(
    family: &HypothesisFamily,
    s: &LabeledSample<R>,
) -> Result<Hypothesis<R>> {
    if s.is_empty() {
        return default_member(family);
    }
    let h = match family {
        HypothesisFamily::Thresholds => {
            let mut max_one: Option<R> = None;
            let mut min_zero: Option<R> = None;
            for (p, y) in s.iter() {
                let v = scalar_of(p)?;
                match y {
                    Label::One => max_one = Some(max_one.map_or(v, |m| m.max(v))),
                    Label::Zero => min_zero = Some(min_zero.map_or(v, |m| m.min(v))),
                }
            }
            let theta = match (max_one, min_zero) {
                (Some(a), Some(b)) => {
                    if a < b {
                        (a + b) / R::of(2.0)
                    } else {
                        return Err(Error::NonRealizable(format!(
                            "rightmost one at {a} is not left of leftmost zero at {b}"
                        )));
                    }
                }
                (Some(a), None) => a,
                (None, Some(b)) => b - R::one(),
                (None, None) => unreachable!("sample is nonempty"),
            };
            Hypothesis::threshold(theta, Orientation::LeftIsOne)
        }
        HypothesisFamily::Intervals => {
            let ones: Vec<R> = s
                .iter()
                .filter(|(_, y)| *y == Label::One)
                .map(|(p, _)| scalar_of(p))
                .collect::<Result<_>>()?;
            let zeros: Vec<R> = s
                .iter()
                .filter(|(_, y)| *y == Label::Zero)
                .map(|(p, _)| scalar_of(p))
                .collect::<Result<_>>()?;
            if ones.is_empty() {
                let right = zeros.iter().cloned().fold(R::neg_infinity(), R::max);
                Hypothesis::interval(right + R::one(), right + R::of(2.0), Label::One)?
            } else {
                let lo0 = ones.iter().cloned().fold(R::infinity(), R::min);
                let hi0 = ones.iter().cloned().fold(R::neg_infinity(), R::max);
                if zeros.iter().any(|&z| z >= lo0 && z <= hi0) {
                    return Err(Error::NonRealizable(
                        "a zero-labeled point lies between one-labeled points".into(),
                    ));
                }
                let left_zero = zeros.iter().cloned().filter(|&z| z < lo0).fold(R::neg_infinity(), R::max);
                let right_zero = zeros.iter().cloned().filter(|&z| z > hi0).fold(R::infinity(), R::min);
                let half = R::of(0.5);
                let m_left = left_zero.is_finite().then(|| (lo0 - left_zero) * half);
                let m_right = right_zero.is_finite().then(|| (right_zero - hi0) * half);
                let (ml, mr) = match (m_left, m_right) {
                    (Some(a), Some(b)) => (a, b),
                    (Some(a), None) => (a, a),
                    (None, Some(b)) => (b, b),
                    (None, None) => (R::one(), R::one()),
                };
                Hypothesis::interval(lo0 - ml, hi0 + mr, Label::One)?
            }
        }
        HypothesisFamily::AxisRectangles { dim } => {
            let mut lo = vec![R::infinity(); *dim];
            let mut hi = vec![R::neg_infinity(); *dim];
            let mut any_one = false;
            for (p, y) in s.iter() {
                let c = p
                    .as_coords()
                    .ok_or_else(|| Error::InvalidPoint("rectangle family needs coordinates".into()))?;
                if c.len() != *dim {
                    return Err(Error::InvalidPoint(format!(
                        "expected dim {dim}, got {}",
                        c.len()
                    )));
                }
                if *y == Label::One {
                    any_one = true;
                    for a in 0..*dim {
                        lo[a] = lo[a].min(c[a]);
                        hi[a] = hi[a].max(c[a]);
                    }
                }
            }
            if !any_one {
                // A box strictly to the right of the data on every axis.
                let mut far = vec![R::neg_infinity(); *dim];
                for (p, _) in s.iter() {
                    let c = p.as_coords().unwrap();
                    for a in 0..*dim {
                        far[a] = far[a].max(c[a]);
                    }
                }
                let lo: Vec<R> = far.iter().map(|&v| v + R::one()).collect();
                let hi: Vec<R> = far.iter().map(|&v| v + R::of(2.0)).collect();
                return Hypothesis::rectangle(lo, hi, Label::One);
            }
            let boxed = Hypothesis::rectangle(lo, hi, Label::One)?;
            if mismatch_count(&boxed, s) > 0 {
                return Err(Error::NonRealizable(
                    "a zero-labeled point lies inside the tightest box around the ones".into(),
                ));
            }
            boxed
        }
        HypothesisFamily::FiniteTable { tables } => {
            let found = tables.iter().find(|t| {
                s.iter().all(|(p, y)| match p.as_index() {
                    Some(i) => i < t.len() && t[i] == *y,
                    None => false,
                })
            });
            match found {
                Some(t) => Hypothesis::table(t.clone()),
                None => {
                    return Err(Error::NonRealizable(
                        "no table in the family is consistent with the sample".into(),
                    ))
                }
            }
        }
    };
    debug_assert_eq!(mismatch_count(&h, s), 0);
    Ok(h)
}

fn default_member<R: Real>(family: &HypothesisFamily) -> Result<Hypothesis<R>> {
    Ok(match family {
        HypothesisFamily::Thresholds => Hypothesis::threshold(R::zero(), Orientation::LeftIsOne),
        HypothesisFamily::Intervals => Hypothesis::interval(R::zero(), R::one(), Label::One)?,
        HypothesisFamily::AxisRectangles { dim } => {
            Hypothesis::rectangle(vec![R::zero(); *dim], vec![R::one(); *dim], Label::One)?
        }
        HypothesisFamily::FiniteTable { tables } => match tables.first() {
            Some(t) => Hypothesis::table(t.clone()),
            None => return Err(Error::UnsupportedFamily("empty table family".into())),
        },
    })
}

/// Candidate boundary values for 1-D robust ERM: every inflated data boundary
/// `x_i ± r`, the midpoints between consecutive ones, and a value on each
/// side of the data. The adversarial loss is piecewise constant with
/// breakpoints exactly at the inflated boundaries, so scanning these
/// candidates minimizes it exactly.
fn boundary_candidates<R: Real>(xs: &[R], radius: R) -> Vec<R> {
    let mut breaks: Vec<R> = Vec::with_capacity(2 * xs.len());
    for &x in xs {
        breaks.push(x - radius);
        breaks.push(x + radius);
    }
    breaks.sort_by(|a, b| a.partial_cmp(b).expect("no NaN coordinates"));
    breaks.dedup();
    let mut cands = Vec::with_capacity(2 * breaks.len() + 2);
    cands.push(breaks[0] - R::one());
    for (i, &b) in breaks.iter().enumerate() {
        cands.push(b);
        if let Some(&next) = breaks.get(i + 1) {
            cands.push((b + next) / R::of(2.0));
        }
    }
    cands.push(*breaks.last().unwrap() + R::one());
    cands.dedup();
    cands
}

/// Exact robust empirical risk minimization: returns a hypothesis whose
/// empirical adversarial loss over `s` is minimal on the candidate set
/// induced by the inflated data boundaries (exact for the 1-D families and
/// finite tables). Ties go to the smallest boundary values in scan order.
pub fn robust_erm<R: Real>(
    family: &HypothesisFamily,
    s: &LabeledSample<R>,
    pert: &Perturbation<R>,
    space: &MetricSpace<R>,
) -> Result<Hypothesis<R>> {
    if s.is_empty() {
        return default_member(family);
    }
    match family {
        HypothesisFamily::Thresholds => {
            let xs: Vec<R> = s.iter().map(|(p, _)| scalar_of(p)).collect::<Result<_>>()?;
            let cands = boundary_candidates(&xs, pert.radius);
            let mut best: Option<(usize, R)> = None;
            for &theta in &cands {
                let h = Hypothesis::threshold(theta, Orientation::LeftIsOne);
                let errs = robust_mismatches(&h, s, pert, space)?;
                if best.is_none_or(|(b, _)| errs < b) {
                    best = Some((errs, theta));
                }
            }
            let (_, theta) = best.unwrap();
            Ok(Hypothesis::threshold(theta, Orientation::LeftIsOne))
        }
        HypothesisFamily::Intervals => {
            let xs: Vec<R> = s.iter().map(|(p, _)| scalar_of(p)).collect::<Result<_>>()?;
            let cands = boundary_candidates(&xs, pert.radius);
            let mut best: Option<(usize, (R, R))> = None;
            for (i, &lo) in cands.iter().enumerate() {
                for &hi in &cands[i..] {
                    let h = Hypothesis::interval(lo, hi, Label::One)?;
                    let errs = robust_mismatches(&h, s, pert, space)?;
                    if best.is_none_or(|(b, _)| errs < b) {
                        best = Some((errs, (lo, hi)));
                    }
                }
            }
            let (_, (lo, hi)) = best.unwrap();
            Hypothesis::interval(lo, hi, Label::One)
        }
        HypothesisFamily::AxisRectangles { dim } => {
            if *dim > 2 {
                return Err(Error::UnsupportedFamily(format!(
                    "exact robust ERM for rectangles supports dim <= 2, got {dim}"
                )));
            }
            let mut axis_cands = Vec::with_capacity(*dim);
            for a in 0..*dim {
                let xs: Vec<R> = s
                    .iter()
                    .map(|(p, _)| {
                        let c = p
                            .as_coords()
                            .ok_or_else(|| Error::InvalidPoint("rectangle family needs coordinates".into()))?;
                        Ok(c[a])
                    })
                    .collect::<Result<_>>()?;
                axis_cands.push(boundary_candidates(&xs, pert.radius));
            }
            type BestBox<R> = Option<(usize, (Vec<R>, Vec<R>))>;
            let mut best: BestBox<R> = None;
            let consider = |lo: Vec<R>, hi: Vec<R>, best: &mut BestBox<R>| -> Result<()> {
                let h = Hypothesis::rectangle(lo.clone(), hi.clone(), Label::One)?;
                let errs = robust_mismatches(&h, s, pert, space)?;
                if best.as_ref().is_none_or(|(b, _)| errs < *b) {
                    *best = Some((errs, (lo, hi)));
                }
                Ok(())
            };
            if *dim == 1 {
                for (i, &lo) in axis_cands[0].iter().enumerate() {
                    for &hi in &axis_cands[0][i..] {
                        consider(vec![lo], vec![hi], &mut best)?;
                    }
                }
            } else {
                for (i, &lo0) in axis_cands[0].iter().enumerate() {
                    for &hi0 in &axis_cands[0][i..] {
                        for (j, &lo1) in axis_cands[1].iter().enumerate() {
                            for &hi1 in &axis_cands[1][j..] {
                                consider(vec![lo0, lo1], vec![hi0, hi1], &mut best)?;
                            }
                        }
                    }
                }
            }
            let (_, (lo, hi)) = best.unwrap();
            Hypothesis::rectangle(lo, hi, Label::One)
        }
        HypothesisFamily::FiniteTable { tables } => {
            if tables.is_empty() {
                return Err(Error::UnsupportedFamily("empty table family".into()));
            }
            let mut best: Option<(usize, usize)> = None;
            for (ti, t) in tables.iter().enumerate() {
                let h = Hypothesis::table(t.clone());
                let errs = robust_mismatches(&h, s, pert, space)?;
                if best.is_none_or(|(b, _)| errs < b) {
                    best = Some((errs, ti));
                }
            }
            let (_, ti) = best.unwrap();
            Ok(Hypothesis::table(tables[ti].clone()))
        }
    }
}

/// Number of sample points whose whole perturbation ball is not classified
/// correctly (exact).
fn robust_mismatches<R: Real>(
    h: &Hypothesis<R>,
    s: &LabeledSample<R>,
    pert: &Perturbation<R>,
    space: &MetricSpace<R>,
) -> Result<usize> {
    let mut errs = 0;
    for (x, y) in s.iter() {
        if crate::loss::exact_point_loss(h, x, *y, pert, space)? > R::zero() {
            errs += 1;
        }
    }
    Ok(errs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loss::Perturbation;
    use crate::metric::Norm;

    fn line() -> MetricSpace<f64> {
        MetricSpace::line()
    }

    #[test]
    fn threshold_predictions() {
        let h = Hypothesis::threshold(0.0, Orientation::LeftIsOne);
        assert_eq!(h.predict(&Point::one_d(-1.0)), Label::One);
        assert_eq!(h.predict(&Point::one_d(0.0)), Label::One);
        assert_eq!(h.predict(&Point::one_d(0.5)), Label::Zero);
        let iv = Hypothesis::interval(0.0, 1.0, Label::One).unwrap();
        assert_eq!(iv.predict(&Point::one_d(2.0)), Label::Zero);
    }

    #[test]
    fn erm_midpoint_rule() {
        let s = LabeledSample::from_scalars(vec![(-1.0, Label::One), (1.0, Label::Zero)]);
        let h = erm_realizable(&HypothesisFamily::Thresholds, &s).unwrap();
        assert_eq!(h, Hypothesis::threshold(0.0, Orientation::LeftIsOne));
    }

    #[test]
    fn erm_single_point_rule() {
        let s = LabeledSample::from_scalars(vec![(5.0, Label::One)]);
        let h = erm_realizable(&HypothesisFamily::Thresholds, &s).unwrap();
        assert_eq!(h, Hypothesis::threshold(5.0, Orientation::LeftIsOne));
        // All-zero samples need the boundary strictly left of the data.
        let s0 = LabeledSample::from_scalars(vec![(5.0, Label::Zero)]);
        let h0 = erm_realizable(&HypothesisFamily::Thresholds, &s0).unwrap();
        assert_eq!(mismatch_count(&h0, &s0), 0);
    }

    #[test]
    fn erm_interval_margins() {
        let s = LabeledSample::from_scalars(vec![(0.0, Label::One), (2.0, Label::Zero)]);
        let h = erm_realizable(&HypothesisFamily::Intervals, &s).unwrap();
        assert_eq!(h, Hypothesis::interval(-1.0, 1.0, Label::One).unwrap());
    }

    #[test]
    fn erm_is_always_consistent_or_errors() {
        // Brute-force cross-check on a batch of seeded random 1-D samples: when
        // some threshold is consistent, the solver must return a consistent one.
        use rand::Rng;
        let mut rng = crate::random::RandomStream::new(17);
        for _ in 0..300 {
            let n = rng.random_range(1..8usize);
            let pairs: Vec<(f64, Label)> = (0..n)
                .map(|_| {
                    (
                        rng.random_range(-3.0..3.0),
                        Label::from_bool(rng.random_range(0..2u8) == 1),
                    )
                })
                .collect();
            let s = LabeledSample::from_scalars(pairs.clone());
            // An explicit feasibility oracle over candidate thresholds.
            let mut cands: Vec<f64> = pairs.iter().map(|(x, _)| *x).collect();
            cands.extend(pairs.iter().map(|(x, _)| x + 1e-6));
            cands.push(-10.0);
            cands.push(10.0);
            let feasible = cands.iter().any(|&t| {
                mismatch_count(&Hypothesis::threshold(t, Orientation::LeftIsOne), &s) == 0
            });
            match erm_realizable(&HypothesisFamily::Thresholds, &s) {
                Ok(h) => {
                    assert!(feasible);
                    assert_eq!(mismatch_count(&h, &s), 0);
                }
                Err(Error::NonRealizable(_)) => assert!(!feasible),
                Err(e) => panic!("unexpected error: {e}"),
            }
        }
    }

    #[test]
    fn erm_surfaces_conflicting_labels() {
        let s = LabeledSample::from_scalars(vec![(0.0, Label::One), (0.0, Label::Zero)]);
        assert!(matches!(
            erm_realizable(&HypothesisFamily::Thresholds, &s),
            Err(Error::NonRealizable(_))
        ));
    }

    #[test]
    fn robust_erm_separated_sample_has_zero_loss() {
        let s = LabeledSample::from_scalars(vec![(-1.0, Label::One), (1.0, Label::Zero)]);
        let pert = Perturbation::closed(0.5);
        let h = robust_erm(&HypothesisFamily::Thresholds, &s, &pert, &line()).unwrap();
        assert_eq!(robust_mismatches(&h, &s, &pert, &line()).unwrap(), 0);
    }

    #[test]
    fn robust_erm_overlapping_balls_cost_half() {
        let s = LabeledSample::from_scalars(vec![(-1.0, Label::One), (1.0, Label::Zero)]);
        let pert = Perturbation::closed(1.5);
        let h = robust_erm(&HypothesisFamily::Thresholds, &s, &pert, &line()).unwrap();
        // Balls [-2.5, 0.5] and [-0.5, 2.5] overlap: no threshold satisfies
        // both, and one mistake is achievable.
        assert_eq!(robust_mismatches(&h, &s, &pert, &line()).unwrap(), 1);
    }

    #[test]
    fn robust_erm_matches_brute_force_scan() {
        use rand::Rng;
        let mut rng = crate::random::RandomStream::new(23);
        let space = line();
        for trial in 0..120 {
            let n = rng.random_range(1..7usize);
            let pairs: Vec<(f64, Label)> = (0..n)
                .map(|_| {
                    (
                        rng.random_range(-2.0..2.0),
                        Label::from_bool(rng.random_range(0..2u8) == 1),
                    )
                })
                .collect();
            let s = LabeledSample::from_scalars(pairs);
            let r = rng.random_range(0.05..1.2);
            let pert = Perturbation::closed(r);
            let h = robust_erm(&HypothesisFamily::Thresholds, &s, &pert, &space).unwrap();
            let achieved = robust_mismatches(&h, &s, &pert, &space).unwrap();
            // Dense scan over thresholds as an independent lower-bound check.
            let mut best = usize::MAX;
            let mut t = -4.0;
            while t <= 4.0 {
                let cand = Hypothesis::threshold(t, Orientation::LeftIsOne);
                best = best.min(robust_mismatches(&cand, &s, &pert, &space).unwrap());
                t += 0.01;
            }
            assert!(achieved <= best, "trial {trial}: {achieved} > dense-scan best {best}");
        }
    }

    #[test]
    fn robust_erm_empty_sample_returns_a_member() {
        let h = robust_erm(
            &HypothesisFamily::Thresholds,
            &LabeledSample::from_scalars(vec![]),
            &Perturbation::closed(1.0),
            &line(),
        )
        .unwrap();
        assert!(matches!(h, Hypothesis::Threshold { .. }));
    }

    #[test]
    fn robust_erm_is_deterministic() {
        let s = LabeledSample::from_scalars(vec![
            (-1.2, Label::One),
            (0.4, Label::Zero),
            (1.7, Label::Zero),
        ]);
        let pert = Perturbation::closed(0.9);
        let a = robust_erm(&HypothesisFamily::Thresholds, &s, &pert, &line()).unwrap();
        let b = robust_erm(&HypothesisFamily::Thresholds, &s, &pert, &line()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn robust_erm_loss_is_monotone_in_radius() {
        let s = LabeledSample::from_scalars(vec![
            (-1.0, Label::One),
            (-0.2, Label::One),
            (0.6, Label::Zero),
            (1.4, Label::Zero),
        ]);
        let space = line();
        let mut prev = 0usize;
        for k in 1..18 {
            let pert = Perturbation::closed(0.1 * k as f64);
            let h = robust_erm(&HypothesisFamily::Thresholds, &s, &pert, &space).unwrap();
            let loss = robust_mismatches(&h, &s, &pert, &space).unwrap();
            assert!(loss >= prev);
            prev = loss;
        }
    }

    #[test]
    fn rectangle_robust_erm_2d() {
        let space = MetricSpace::<f64>::euclidean(2, Norm::Linf);
        let s = LabeledSample::new(vec![
            (Point::coords(vec![0.0, 0.0]), Label::One),
            (Point::coords(vec![3.0, 3.0]), Label::Zero),
        ]);
        let pert = Perturbation::closed(0.5);
        let h = robust_erm(&HypothesisFamily::AxisRectangles { dim: 2 }, &s, &pert, &space).unwrap();
        assert_eq!(robust_mismatches(&h, &s, &pert, &space).unwrap(), 0);
        assert!(matches!(
            robust_erm(&HypothesisFamily::AxisRectangles { dim: 3 }, &s, &pert, &space),
            Err(Error::UnsupportedFamily(_))
        ));
    }

    #[test]
    fn vc_constants() {
        assert_eq!(HypothesisFamily::Thresholds.vc_dimension(), 1);
        assert_eq!(HypothesisFamily::Intervals.vc_dimension(), 2);
        assert_eq!(HypothesisFamily::AxisRectangles { dim: 2 }.vc_dimension(), 4);
    }

    #[test]
    fn one_sided_thresholds_shatter_one_point_not_two() {
        // Through the candidate grid: {1{x <= t}} realizes both labels on a
        // single point but cannot produce the (0, 1) pattern on a pair.
        let cands = [-2.0, -0.5, 0.0, 0.5, 2.0];
        let patterns: std::collections::HashSet<(u8, u8)> = cands
            .iter()
            .map(|&t| {
                let h = Hypothesis::threshold(t, Orientation::LeftIsOne);
                (
                    h.predict(&Point::one_d(-1.0)).bit(),
                    h.predict(&Point::one_d(1.0)).bit(),
                )
            })
            .collect();
        assert!(!patterns.contains(&(0, 1)));
        assert!(patterns.contains(&(1, 0)));
        assert!(patterns.contains(&(0, 0)));
        assert!(patterns.contains(&(1, 1)));
    }

    #[test]
    fn intervals_shatter_two_points_not_three() {
        // Candidate intervals from the grid realize all four patterns on a
        // pair, but no interval can produce (1, 0, 1) on a triple.
        let grid = [-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0];
        let mut pair_patterns = std::collections::HashSet::new();
        let mut triple_patterns = std::collections::HashSet::new();
        for (i, &lo) in grid.iter().enumerate() {
            for &hi in &grid[i..] {
                let h = Hypothesis::interval(lo, hi, Label::One).unwrap();
                pair_patterns.insert((
                    h.predict(&Point::one_d(-1.0)).bit(),
                    h.predict(&Point::one_d(1.0)).bit(),
                ));
                triple_patterns.insert((
                    h.predict(&Point::one_d(-1.0)).bit(),
                    h.predict(&Point::one_d(0.0)).bit(),
                    h.predict(&Point::one_d(1.0)).bit(),
                ));
            }
        }
        assert_eq!(pair_patterns.len(), 4);
        assert!(!triple_patterns.contains(&(1, 0, 1)));
    }

    #[test]
    fn finite_table_vc_by_shattering() {
        assert_eq!(HypothesisFamily::all_tables(3).vc_dimension(), 3);
        let single = HypothesisFamily::FiniteTable {
            tables: vec![vec![Label::One, Label::Zero]],
        };
        assert_eq!(single.vc_dimension(), 0);
        let two = HypothesisFamily::FiniteTable {
            tables: vec![
                vec![Label::One, Label::Zero],
                vec![Label::Zero, Label::Zero],
            ],
        };
        assert_eq!(two.vc_dimension(), 1);
    }

    #[test]
    fn hypothesis_text_round_trip() {
        let hs: Vec<Hypothesis<f64>> = vec![
            Hypothesis::threshold(0.125, Orientation::LeftIsOne),
            Hypothesis::threshold(-2.5, Orientation::RightIsOne),
            Hypothesis::interval(0.0, 1.0, Label::One).unwrap(),
            Hypothesis::rectangle(vec![0.0, -1.0], vec![1.0, 2.0], Label::Zero).unwrap(),
            Hypothesis::table(vec![Label::One, Label::Zero, Label::Zero]),
        ];
        for h in hs {
            let line = h.to_string();
            let back = Hypothesis::<f64>::from_text(&line).unwrap();
            assert_eq!(back, h, "round trip failed for `{line}`");
        }
    }

    #[test]
    fn sample_text_round_trip() {
        let s = LabeledSample::new(vec![
            (Point::coords(vec![0.5, -1.25]), Label::One),
            (Point::index(3), Label::Zero),
        ]);
        let text = s.to_text();
        let back = LabeledSample::<f64>::from_text(&text).unwrap();
        assert_eq!(back, s);
    }
}
