//! Binary and adversarial losses with certifying exact, grid and Monte-Carlo
//! evaluation modes, plus synthetic data distributions.
//!
//! The adversarial loss of a point is the worst 0/1 loss over its
//! perturbation ball. Exact mode certifies the value: on the line it reduces
//! to ball containment in the classifier's decision region, on finite spaces
//! to exhaustive enumeration of ball members. Grid and Monte-Carlo modes are
//! one-sided: a max over a subset of the ball never exceeds the true loss.

use rand::Rng;

use crate::hypothesis::{BinaryClassifier, Hypothesis, Label, LabeledSample};
use crate::metric::{Ball, Boundary, MetricSpace, Norm, Point};
use crate::perturb_smooth::SmoothedClassifier;
use crate::random::RandomStream;
use crate::scalar::Real;
use crate::{Error, Result};

/// A perturbation type: metric balls of a fixed radius around each point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Perturbation<R> {
    pub radius: R,
    pub boundary: Boundary,
}

impl<R: Real> Perturbation<R> {
    pub fn closed(radius: R) -> Self {
        assert!(radius >= R::zero(), "perturbation radius must be nonnegative");
        Perturbation { radius, boundary: Boundary::Closed }
    }

    pub fn open(radius: R) -> Self {
        assert!(radius >= R::zero(), "perturbation radius must be nonnegative");
        Perturbation { radius, boundary: Boundary::Open }
    }

    pub fn ball_around(&self, center: Point<R>) -> Ball<R> {
        Ball { center, radius: self.radius, boundary: self.boundary }
    }
}

/// How to evaluate the max over a perturbation ball.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvaluationMode {
    /// Certifying evaluation; available for 1-D threshold/interval-shaped
    /// hypotheses and for finite spaces.
    Exact,
    /// Max over an axis-aligned grid of the ball's bounding box (`resolution`
    /// points per axis), membership-filtered. Deterministic, not certified.
    Grid { resolution: usize },
    /// Max over measure-uniform draws from the ball. A lower bound on the
    /// true adversarial loss; never certified.
    MonteCarlo { draws: usize },
}

/// An evaluated loss value with its certification status.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossReport<R> {
    pub value: R,
    pub certified: bool,
    pub mode: EvaluationMode,
    /// Standard error for sampled expectations, when one applies.
    pub std_error: Option<R>,
}

/// A synthetic data distribution over (point, label) pairs.
#[derive(Debug, Clone, PartialEq)]
pub enum DataDistribution<R> {
    /// Finitely many atoms with probabilities.
    DiscreteMixture(Vec<(Point<R>, Label, R)>),
    /// A mixture of measure-uniform balls with fixed labels.
    UniformOnBalls(Vec<(Ball<R>, Label, R)>),
}

impl<R: Real> DataDistribution<R> {
    pub fn validate(&self) -> Result<()> {
        let probs: Vec<R> = match self {
            DataDistribution::DiscreteMixture(v) => v.iter().map(|(_, _, p)| *p).collect(),
            DataDistribution::UniformOnBalls(v) => v.iter().map(|(_, _, p)| *p).collect(),
        };
        if probs.is_empty() {
            return Err(Error::InvalidArgument("distribution has no components".into()));
        }
        if probs.iter().any(|p| *p < R::zero()) {
            return Err(Error::InvalidArgument("negative component probability".into()));
        }
        let total = probs.iter().fold(R::zero(), |s, &p| s + p);
        if (total - R::one()).abs() > R::of(1e-9) {
            return Err(Error::InvalidArgument(format!(
                "component probabilities sum to {total}, expected 1"
            )));
        }
        Ok(())
    }

    pub fn sample_one(
        &self,
        space: &MetricSpace<R>,
        rng: &mut RandomStream,
    ) -> Result<(Point<R>, Label)> {
        self.validate()?;
        let pick = |probs: &[R], rng: &mut RandomStream| -> Result<usize> {
            let dist = rand::distr::weighted::WeightedIndex::new(probs)
                .map_err(|e| Error::InvalidArgument(format!("bad probabilities: {e}")))?;
            Ok(rng.sample(dist))
        };
        match self {
            DataDistribution::DiscreteMixture(v) => {
                let probs: Vec<R> = v.iter().map(|(_, _, p)| *p).collect();
                let i = pick(&probs, rng)?;
                Ok((v[i].0.clone(), v[i].1))
            }
            DataDistribution::UniformOnBalls(v) => {
                let probs: Vec<R> = v.iter().map(|(_, _, p)| *p).collect();
                let i = pick(&probs, rng)?;
                let z = space.sample_ball(&v[i].0, rng)?;
                Ok((z, v[i].1))
            }
        }
    }

    pub fn sample(
        &self,
        space: &MetricSpace<R>,
        m: usize,
        rng: &mut RandomStream,
    ) -> Result<LabeledSample<R>> {
        let entries = (0..m).map(|_| self.sample_one(space, rng)).collect::<Result<_>>()?;
        Ok(LabeledSample::new(entries))
    }
}

/// Average 0/1 mismatch of a classifier over a nonempty sample.
pub fn binary_loss<R: Real, C: BinaryClassifier<R>>(c: &C, s: &LabeledSample<R>) -> Result<R> {
    if s.is_empty() {
        return Err(Error::InvalidArgument("binary loss of an empty sample".into()));
    }
    let errs = crate::hypothesis::mismatch_count(c, s);
    Ok(R::of_usize(errs) / R::of_usize(s.len()))
}

/// Exact adversarial point loss, used by the certifying paths and by robust
/// ERM. Supports finite spaces (exhaustive), 1-D decision regions, and axis
/// rectangles in any Euclidean dimension.
pub(crate) fn exact_point_loss<R: Real>(
    h: &Hypothesis<R>,
    x: &Point<R>,
    y: Label,
    pert: &Perturbation<R>,
    space: &MetricSpace<R>,
) -> Result<R> {
    match space {
        MetricSpace::Finite(_) => {
            let members = finite_ball_points(x, pert, space)?;
            let hit = members.iter().any(|&i| h.predict(&Point::index(i)) != y);
            Ok(if hit { R::one() } else { R::zero() })
        }
        MetricSpace::Euclidean { dim: 1, .. } => {
            if let Some(region_one) = h.one_region_1d() {
                let v = x
                    .scalar()
                    .ok_or_else(|| Error::InvalidPoint("expected a 1-D point".into()))?;
                let region_y = match y {
                    Label::One => region_one,
                    Label::Zero => region_one.complement(),
                };
                let safe = region_y.contains_ball(v, pert.radius, pert.boundary);
                Ok(if safe { R::zero() } else { R::one() })
            } else {
                rect_exact_loss(h, x, y, pert, space)
            }
        }
        MetricSpace::Euclidean { .. } => rect_exact_loss(h, x, y, pert, space),
    }
}

/// Finite-space ball membership for loss evaluation. A radius-zero ball is
/// the singleton `{center}` regardless of boundary semantics.
fn finite_ball_points<R: Real>(
    x: &Point<R>,
    pert: &Perturbation<R>,
    space: &MetricSpace<R>,
) -> Result<Vec<usize>> {
    let c = x
        .as_index()
        .ok_or_else(|| Error::InvalidPoint("expected an index point".into()))?;
    if pert.radius == R::zero() {
        return Ok(vec![c]);
    }
    space.finite_ball_members(&pert.ball_around(x.clone()))
}

fn rect_exact_loss<R: Real>(
    h: &Hypothesis<R>,
    x: &Point<R>,
    y: Label,
    pert: &Perturbation<R>,
    space: &MetricSpace<R>,
) -> Result<R> {
    let Hypothesis::AxisRectangle { lo, hi, inside } = h else {
        return Err(Error::UnsupportedMode(
            "no exact evaluator for this hypothesis/space combination".into(),
        ));
    };
    let MetricSpace::Euclidean { dim, norm } = space else {
        return Err(Error::UnsupportedMode("rectangles need a Euclidean space".into()));
    };
    let c = x
        .as_coords()
        .ok_or_else(|| Error::InvalidPoint("expected coordinates".into()))?;
    if c.len() != *dim || lo.len() != *dim {
        return Err(Error::InvalidPoint("rectangle/point dimension mismatch".into()));
    }
    let r = pert.radius;
    let safe = if y == *inside {
        // The whole ball must lie in the box; projections decide this for
        // both norms, and open balls share the condition with closed ones.
        c.iter()
            .zip(lo.iter().zip(hi))
            .all(|(&v, (&a, &b))| v - r >= a && v + r <= b)
    } else {
        // The ball must avoid the box: compare the point-to-box distance
        // with the radius, strictly for closed balls.
        let gap = |v: R, a: R, b: R| (a - v).max(v - b).max(R::zero());
        let dist = match norm {
            Norm::L2 => c
                .iter()
                .zip(lo.iter().zip(hi))
                .map(|(&v, (&a, &b))| gap(v, a, b))
                .fold(R::zero(), |s, g| s + g * g)
                .sqrt(),
            Norm::Linf => c
                .iter()
                .zip(lo.iter().zip(hi))
                .map(|(&v, (&a, &b))| gap(v, a, b))
                .fold(R::zero(), R::max),
        };
        match pert.boundary {
            Boundary::Closed => dist > r,
            Boundary::Open => dist >= r,
        }
    };
    Ok(if safe { R::zero() } else { R::one() })
}

/// Whether Exact mode is available for this hypothesis on this space.
fn exact_supported<R: Real>(h: &Hypothesis<R>, space: &MetricSpace<R>) -> bool {
    match space {
        MetricSpace::Finite(_) => matches!(h, Hypothesis::Table { .. }),
        MetricSpace::Euclidean { dim: 1, .. } => h.one_region_1d().is_some(),
        MetricSpace::Euclidean { .. } => false,
    }
}

/// Grid evaluation: max mismatch over the membership-filtered bounding-box
/// grid of the ball.
fn grid_point_loss<R: Real>(
    h: &Hypothesis<R>,
    x: &Point<R>,
    y: Label,
    pert: &Perturbation<R>,
    space: &MetricSpace<R>,
    resolution: usize,
) -> Result<R> {
    if resolution == 0 {
        return Err(Error::InvalidArgument("grid resolution must be positive".into()));
    }
    let c = x
        .as_coords()
        .ok_or_else(|| Error::InvalidPoint("grid evaluation needs coordinates".into()))?;
    let dim = c.len();
    let r = pert.radius;
    let ball = pert.ball_around(x.clone());
    let axis = |i: usize, k: usize| {
        if resolution == 1 {
            c[i]
        } else {
            let t = R::of_usize(k) / R::of_usize(resolution - 1);
            (c[i] - r) + t * (R::of(2.0) * r)
        }
    };
    let mut idx = vec![0usize; dim];
    loop {
        let z = Point::Coords((0..dim).map(|i| axis(i, idx[i])).collect());
        if space.ball_contains(&ball, &z)? && h.predict(&z) != y {
            return Ok(R::one());
        }
        // Mixed-radix increment.
        let mut d = 0;
        loop {
            if d == dim {
                return Ok(R::zero());
            }
            idx[d] += 1;
            if idx[d] < resolution {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

fn mc_point_loss<R: Real>(
    h: &Hypothesis<R>,
    x: &Point<R>,
    y: Label,
    pert: &Perturbation<R>,
    space: &MetricSpace<R>,
    draws: usize,
    rng: &mut RandomStream,
) -> Result<R> {
    if draws == 0 {
        return Err(Error::InvalidArgument("Monte-Carlo draws must be positive".into()));
    }
    let ball = pert.ball_around(x.clone());
    for _ in 0..draws {
        let z = space.sample_ball(&ball, rng)?;
        if h.predict(&z) != y {
            return Ok(R::one());
        }
    }
    Ok(R::zero())
}

/// Worst-case 0/1 loss of `h` over the perturbation ball around `x`.
pub fn adversarial_point_loss<R: Real>(
    h: &Hypothesis<R>,
    x: &Point<R>,
    y: Label,
    pert: &Perturbation<R>,
    mode: EvaluationMode,
    space: &MetricSpace<R>,
    rng: &mut RandomStream,
) -> Result<LossReport<R>> {
    let (value, certified) = match mode {
        EvaluationMode::Exact => {
            if !exact_supported(h, space) {
                return Err(Error::UnsupportedMode(
                    "Exact mode needs a 1-D threshold/interval hypothesis or a finite space".into(),
                ));
            }
            (exact_point_loss(h, x, y, pert, space)?, true)
        }
        EvaluationMode::Grid { resolution } => match space {
            // Finite spaces are exhausted: the grid parameter is irrelevant.
            MetricSpace::Finite(_) => (exact_point_loss(h, x, y, pert, space)?, true),
            MetricSpace::Euclidean { .. } => {
                (grid_point_loss(h, x, y, pert, space, resolution)?, false)
            }
        },
        EvaluationMode::MonteCarlo { draws } => match space {
            MetricSpace::Finite(_) => {
                // Sampling can only miss members; still evaluate by sampling
                // to honor the requested mode, but never certify.
                (mc_point_loss(h, x, y, pert, space, draws, rng)?, false)
            }
            MetricSpace::Euclidean { .. } => {
                (mc_point_loss(h, x, y, pert, space, draws, rng)?, false)
            }
        },
    };
    Ok(LossReport { value, certified, mode, std_error: None })
}

/// Average adversarial point loss over a nonempty sample; certified iff every
/// point evaluation was certified. Monte-Carlo points get one substream each.
pub fn empirical_adversarial_loss<R: Real>(
    h: &Hypothesis<R>,
    s: &LabeledSample<R>,
    pert: &Perturbation<R>,
    mode: EvaluationMode,
    space: &MetricSpace<R>,
    rng: &mut RandomStream,
) -> Result<LossReport<R>> {
    if s.is_empty() {
        return Err(Error::InvalidArgument("adversarial loss of an empty sample".into()));
    }
    let mut total = R::zero();
    let mut certified = true;
    for (i, (x, y)) in s.iter().enumerate() {
        let mut sub = rng.substream(i as u64);
        let rep = adversarial_point_loss(h, x, *y, pert, mode, space, &mut sub)?;
        total = total + rep.value;
        certified &= rep.certified;
    }
    Ok(LossReport {
        value: total / R::of_usize(s.len()),
        certified,
        mode,
        std_error: None,
    })
}

/// Expected adversarial loss over a data distribution.
///
/// Discrete mixtures are exact weighted sums of point losses (certified when
/// every point is). Ball mixtures are estimated from `outer_draws` samples
/// and report a binomial standard error; the result is never certified.
pub fn expected_adversarial_loss<R: Real>(
    h: &Hypothesis<R>,
    dist: &DataDistribution<R>,
    pert: &Perturbation<R>,
    mode: EvaluationMode,
    space: &MetricSpace<R>,
    outer_draws: Option<usize>,
    rng: &mut RandomStream,
) -> Result<LossReport<R>> {
    dist.validate()?;
    match dist {
        DataDistribution::DiscreteMixture(atoms) => {
            let mut total = R::zero();
            let mut certified = true;
            for (i, (x, y, p)) in atoms.iter().enumerate() {
                let mut sub = rng.substream(i as u64);
                let rep = adversarial_point_loss(h, x, *y, pert, mode, space, &mut sub)?;
                total = total + *p * rep.value;
                certified &= rep.certified;
            }
            Ok(LossReport { value: total, certified, mode, std_error: None })
        }
        DataDistribution::UniformOnBalls(_) => {
            let n = outer_draws.ok_or_else(|| {
                Error::InvalidArgument("ball mixtures need an outer draw budget".into())
            })?;
            if n == 0 {
                return Err(Error::InvalidArgument("outer draw budget must be positive".into()));
            }
            let mut total = R::zero();
            for i in 0..n {
                let mut sub = rng.substream(i as u64);
                let (x, y) = dist.sample_one(space, &mut sub)?;
                let rep = adversarial_point_loss(h, &x, y, pert, mode, space, &mut sub)?;
                total = total + rep.value;
            }
            let mean = total / R::of_usize(n);
            let se = (mean * (R::one() - mean) / R::of_usize(n)).max(R::zero()).sqrt();
            Ok(LossReport { value: mean, certified: false, mode, std_error: Some(se) })
        }
    }
}

/// Exact adversarial point loss of a smoothed classifier (1-D decision-region
/// or finite-table path).
fn smoothed_exact_point_loss<R: Real, B: BinaryClassifier<R>>(
    c: &SmoothedClassifier<R, B>,
    x: &Point<R>,
    y: Label,
    pert: &Perturbation<R>,
    space: &MetricSpace<R>,
) -> Result<R> {
    match space {
        MetricSpace::Finite(_) => {
            let table = c.to_table(space)?;
            exact_point_loss(&table, x, y, pert, space)
        }
        MetricSpace::Euclidean { dim: 1, .. } => {
            let region_one = c.decision_region_1d().ok_or_else(|| {
                Error::UnsupportedMode("smoothed base has no exact 1-D region".into())
            })?;
            let v = x
                .scalar()
                .ok_or_else(|| Error::InvalidPoint("expected a 1-D point".into()))?;
            let region_y = match y {
                Label::One => region_one,
                Label::Zero => region_one.complement(),
            };
            let safe = region_y.contains_ball(v, pert.radius, pert.boundary);
            Ok(if safe { R::zero() } else { R::one() })
        }
        MetricSpace::Euclidean { .. } => Err(Error::UnsupportedMode(
            "exact smoothed evaluation needs a 1-D or finite space".into(),
        )),
    }
}

/// Adversarial point loss of a smoothed classifier.
pub fn smoothed_point_loss<R: Real, B: BinaryClassifier<R>>(
    c: &SmoothedClassifier<R, B>,
    x: &Point<R>,
    y: Label,
    pert: &Perturbation<R>,
    mode: EvaluationMode,
    space: &MetricSpace<R>,
    rng: &mut RandomStream,
) -> Result<LossReport<R>> {
    match mode {
        EvaluationMode::Exact => {
            let value = smoothed_exact_point_loss(c, x, y, pert, space)?;
            Ok(LossReport { value, certified: true, mode, std_error: None })
        }
        EvaluationMode::Grid { resolution } => {
            if space.is_finite_space() {
                let value = smoothed_exact_point_loss(c, x, y, pert, space)?;
                return Ok(LossReport { value, certified: true, mode, std_error: None });
            }
            if resolution == 0 {
                return Err(Error::InvalidArgument("grid resolution must be positive".into()));
            }
            // Grid over the ball with exact region membership when available,
            // Monte-Carlo votes otherwise.
            let region = c.decision_region_1d();
            let coords = x
                .as_coords()
                .ok_or_else(|| Error::InvalidPoint("grid evaluation needs coordinates".into()))?;
            if coords.len() != 1 || region.is_none() {
                return Err(Error::UnsupportedMode(
                    "grid smoothed evaluation supports 1-D regions only".into(),
                ));
            }
            let region = region.unwrap();
            let (v, r) = (coords[0], pert.radius);
            let mut value = R::zero();
            let ball = pert.ball_around(x.clone());
            for k in 0..resolution {
                let z = if resolution == 1 {
                    v
                } else {
                    (v - r) + R::of_usize(k) / R::of_usize(resolution - 1) * (R::of(2.0) * r)
                };
                if !space.ball_contains(&ball, &Point::one_d(z))? {
                    continue;
                }
                let predicted = Label::from_bool(region.contains(z));
                if predicted != y {
                    value = R::one();
                    break;
                }
            }
            Ok(LossReport { value, certified: false, mode, std_error: None })
        }
        EvaluationMode::MonteCarlo { draws } => {
            if draws == 0 {
                return Err(Error::InvalidArgument("Monte-Carlo draws must be positive".into()));
            }
            let ball = pert.ball_around(x.clone());
            let mut value = R::zero();
            for i in 0..draws {
                let mut sub = rng.substream(i as u64);
                let z = space.sample_ball(&ball, &mut sub)?;
                if c.predict(&z, space, &mut sub)? != y {
                    value = R::one();
                    break;
                }
            }
            Ok(LossReport { value, certified: false, mode, std_error: None })
        }
    }
}

/// Average smoothed adversarial loss over a nonempty sample.
pub fn smoothed_empirical_loss<R: Real, B: BinaryClassifier<R>>(
    c: &SmoothedClassifier<R, B>,
    s: &LabeledSample<R>,
    pert: &Perturbation<R>,
    mode: EvaluationMode,
    space: &MetricSpace<R>,
    rng: &mut RandomStream,
) -> Result<LossReport<R>> {
    if s.is_empty() {
        return Err(Error::InvalidArgument("adversarial loss of an empty sample".into()));
    }
    let mut total = R::zero();
    let mut certified = true;
    for (i, (x, y)) in s.iter().enumerate() {
        let mut sub = rng.substream(i as u64);
        let rep = smoothed_point_loss(c, x, *y, pert, mode, space, &mut sub)?;
        total = total + rep.value;
        certified &= rep.certified;
    }
    Ok(LossReport {
        value: total / R::of_usize(s.len()),
        certified,
        mode,
        std_error: None,
    })
}

/// Expected smoothed adversarial loss over a data distribution; discrete
/// mixtures are exact weighted sums.
pub fn smoothed_expected_loss<R: Real, B: BinaryClassifier<R>>(
    c: &SmoothedClassifier<R, B>,
    dist: &DataDistribution<R>,
    pert: &Perturbation<R>,
    mode: EvaluationMode,
    space: &MetricSpace<R>,
    outer_draws: Option<usize>,
    rng: &mut RandomStream,
) -> Result<LossReport<R>> {
    dist.validate()?;
    match dist {
        DataDistribution::DiscreteMixture(atoms) => {
            let mut total = R::zero();
            let mut certified = true;
            for (i, (x, y, p)) in atoms.iter().enumerate() {
                let mut sub = rng.substream(i as u64);
                let rep = smoothed_point_loss(c, x, *y, pert, mode, space, &mut sub)?;
                total = total + *p * rep.value;
                certified &= rep.certified;
            }
            Ok(LossReport { value: total, certified, mode, std_error: None })
        }
        DataDistribution::UniformOnBalls(_) => {
            let n = outer_draws.ok_or_else(|| {
                Error::InvalidArgument("ball mixtures need an outer draw budget".into())
            })?;
            let mut total = R::zero();
            for i in 0..n {
                let mut sub = rng.substream(i as u64);
                let (x, y) = dist.sample_one(space, &mut sub)?;
                let rep = smoothed_point_loss(c, &x, y, pert, mode, space, &mut sub)?;
                total = total + rep.value;
            }
            let mean = total / R::of_usize(n);
            let se = (mean * (R::one() - mean) / R::of_usize(n)).max(R::zero()).sqrt();
            Ok(LossReport { value: mean, certified: false, mode, std_error: Some(se) })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypothesis::Orientation;

    fn line() -> MetricSpace<f64> {
        MetricSpace::line()
    }

    fn rng() -> RandomStream {
        RandomStream::new(42)
    }

    #[test]
    fn binary_loss_examples() {
        let always_one = Hypothesis::threshold(f64::INFINITY, Orientation::LeftIsOne);
        let s = LabeledSample::from_scalars(vec![(0.0, Label::One), (1.0, Label::Zero)]);
        assert_eq!(binary_loss(&always_one, &s).unwrap(), 0.5);

        let always_zero = Hypothesis::threshold(f64::NEG_INFINITY, Orientation::LeftIsOne);
        let ones = LabeledSample::from_scalars(vec![(0.0, Label::One); 4]);
        assert_eq!(binary_loss(&always_zero, &ones).unwrap(), 1.0);

        let empty = LabeledSample::from_scalars(vec![]);
        assert!(matches!(binary_loss(&always_one, &empty), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn threshold_point_loss_certified() {
        let h = Hypothesis::threshold(0.0, Orientation::LeftIsOne);
        let x = Point::one_d(0.5);
        let mut r = rng();
        // Ball [0.1, 0.9] predicts zero throughout.
        let rep = adversarial_point_loss(
            &h, &x, Label::Zero, &Perturbation::closed(0.4),
            EvaluationMode::Exact, &line(), &mut r,
        )
        .unwrap();
        assert_eq!(rep.value, 0.0);
        assert!(rep.certified);
        // Ball [-0.1, 1.1] crosses the boundary.
        let rep = adversarial_point_loss(
            &h, &x, Label::Zero, &Perturbation::closed(0.6),
            EvaluationMode::Exact, &line(), &mut r,
        )
        .unwrap();
        assert_eq!(rep.value, 1.0);
        assert!(rep.certified);
    }

    #[test]
    fn radius_zero_reduces_to_binary_loss() {
        let h = Hypothesis::threshold(0.0, Orientation::LeftIsOne);
        let mut r = rng();
        for mode in [
            EvaluationMode::Exact,
            EvaluationMode::Grid { resolution: 5 },
            EvaluationMode::MonteCarlo { draws: 3 },
        ] {
            let rep = adversarial_point_loss(
                &h, &Point::one_d(0.5), Label::One, &Perturbation::closed(0.0),
                mode, &line(), &mut r,
            )
            .unwrap();
            assert_eq!(rep.value, 1.0, "mode {mode:?}");
        }
    }

    #[test]
    fn empirical_loss_averages_and_certifies() {
        let h = Hypothesis::threshold(0.0, Orientation::LeftIsOne);
        // One robustly safe point, one robust failure.
        let s = LabeledSample::from_scalars(vec![(-2.0, Label::One), (0.3, Label::Zero)]);
        let mut r = rng();
        let rep = empirical_adversarial_loss(
            &h, &s, &Perturbation::closed(0.5), EvaluationMode::Exact, &line(), &mut r,
        )
        .unwrap();
        assert_eq!(rep.value, 0.5);
        assert!(rep.certified);
    }

    #[test]
    fn monte_carlo_never_exceeds_exact() {
        let mut r = rng();
        let h = Hypothesis::interval(-0.4, 0.7, Label::One).unwrap();
        for i in 0..50 {
            let x = Point::one_d(-1.0 + 0.04 * i as f64);
            for y in [Label::Zero, Label::One] {
                let pert = Perturbation::closed(0.3);
                let exact = adversarial_point_loss(
                    &h, &x, y, &pert, EvaluationMode::Exact, &line(), &mut r,
                )
                .unwrap();
                let mc = adversarial_point_loss(
                    &h, &x, y, &pert, EvaluationMode::MonteCarlo { draws: 10 }, &line(), &mut r,
                )
                .unwrap();
                assert!(mc.value <= exact.value);
                assert!(!mc.certified);
                let grid = adversarial_point_loss(
                    &h, &x, y, &pert, EvaluationMode::Grid { resolution: 101 }, &line(), &mut r,
                )
                .unwrap();
                assert!(grid.value <= exact.value);
            }
        }
    }

    #[test]
    fn exact_mode_rejects_unsupported_combinations() {
        let h = Hypothesis::rectangle(vec![0.0, 0.0], vec![1.0, 1.0], Label::One).unwrap();
        let space = MetricSpace::<f64>::euclidean(2, Norm::L2);
        let mut r = rng();
        let err = adversarial_point_loss(
            &h,
            &Point::coords(vec![0.5, 0.5]),
            Label::One,
            &Perturbation::closed(0.1),
            EvaluationMode::Exact,
            &space,
            &mut r,
        )
        .unwrap_err();
        assert!(matches!(err, Error::UnsupportedMode(_)));
    }

    #[test]
    fn two_point_distribution_exact_expected_loss() {
        // Two atoms at -1 (one) and 1 (zero); open perturbation of radius 1.
        let dist = DataDistribution::DiscreteMixture(vec![
            (Point::one_d(-1.0), Label::One, 0.5),
            (Point::one_d(1.0), Label::Zero, 0.5),
        ]);
        let mut r = rng();
        let off_center = Hypothesis::threshold(0.3, Orientation::LeftIsOne);
        let rep = expected_adversarial_loss(
            &off_center, &dist, &Perturbation::open(1.0),
            EvaluationMode::Exact, &line(), None, &mut r,
        )
        .unwrap();
        assert_eq!(rep.value, 0.5);
        assert!(rep.certified);

        let centered = Hypothesis::threshold(0.0, Orientation::LeftIsOne);
        let rep = expected_adversarial_loss(
            &centered, &dist, &Perturbation::open(1.0),
            EvaluationMode::Exact, &line(), None, &mut r,
        )
        .unwrap();
        assert_eq!(rep.value, 0.0);
        assert!(rep.certified);
    }

    #[test]
    fn open_and_closed_differ_exactly_on_the_boundary() {
        let h = Hypothesis::threshold(0.0, Orientation::LeftIsOne);
        let mut r = rng();
        // Distance from x to the boundary equals the radius.
        let x = Point::one_d(0.5);
        let closed = adversarial_point_loss(
            &h, &x, Label::Zero, &Perturbation::closed(0.5),
            EvaluationMode::Exact, &line(), &mut r,
        )
        .unwrap();
        let open = adversarial_point_loss(
            &h, &x, Label::Zero, &Perturbation::open(0.5),
            EvaluationMode::Exact, &line(), &mut r,
        )
        .unwrap();
        // The closed ball reaches the one-side at 0; the open ball does not.
        assert_eq!(closed.value, 1.0);
        assert_eq!(open.value, 0.0);
    }

    #[test]
    fn ball_mixture_expectation_reports_standard_error() {
        let dist = DataDistribution::UniformOnBalls(vec![
            (Ball::closed(Point::one_d(-1.0), 0.2), Label::One, 0.5),
            (Ball::closed(Point::one_d(1.0), 0.2), Label::Zero, 0.5),
        ]);
        let h = Hypothesis::threshold(0.0, Orientation::LeftIsOne);
        let mut r = rng();
        let rep = expected_adversarial_loss(
            &h, &dist, &Perturbation::closed(0.1),
            EvaluationMode::Exact, &line(), Some(200), &mut r,
        )
        .unwrap();
        assert_eq!(rep.value, 0.0);
        assert!(!rep.certified);
        assert!(rep.std_error.is_some());
    }

    #[test]
    fn distribution_validation() {
        let bad = DataDistribution::DiscreteMixture(vec![
            (Point::one_d(0.0), Label::One, 0.7),
            (Point::one_d(1.0), Label::Zero, 0.7),
        ]);
        assert!(matches!(bad.validate(), Err(Error::InvalidArgument(_))));
    }
}
