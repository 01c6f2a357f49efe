//! The tolerant perturb-and-smooth learner.
//!
//! Training resamples each point from the reference ball of radius
//! `(1+gamma)*r` around it, runs a realizable learner once on the perturbed
//! sample, and wraps the result in a smoothed classifier that predicts the
//! majority label of the base hypothesis over the smoothing ball of radius
//! `gamma*r`. Ties (a vote of exactly one half) go to label one.
//!
//! The module also exposes the supporting calculators: the smoothing margin
//! `lambda = (1/3) * ((1+gamma)/gamma)^(-zeta*d)` below which a small
//! reference-ball error forces every smoothing ball inside the actual ball to
//! vote correctly, an exact checker for that implication, and the sample-size
//! scaling law of the learner.

use std::fmt::Write as _;

use crate::hypothesis::{
    erm_realizable, BinaryClassifier, Hypothesis, HypothesisFamily, Label, LabeledSample,
};
use crate::loss::Perturbation;
use crate::metric::{Ball, DoublingParameters, MetricSpace, Point, SamplingOracle};
use crate::piecewise::IntervalSet;
use crate::random::RandomStream;
use crate::scalar::Real;
use crate::{Error, Result};

/// Training configuration: actual radius, tolerance, prediction vote budget
/// and the master seed.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbSmoothConfig<R> {
    pub r: R,
    pub gamma: R,
    pub vote_budget: usize,
    pub seed: u64,
}

impl<R: Real> PerturbSmoothConfig<R> {
    pub fn new(r: R, gamma: R, vote_budget: usize, seed: u64) -> Result<Self> {
        if !(r > R::zero()) || !r.is_finite() {
            return Err(Error::InvalidArgument(format!("radius must be positive, got {r}")));
        }
        if !(gamma > R::zero()) || !gamma.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "tolerance gamma must be positive, got {gamma}"
            )));
        }
        if vote_budget == 0 {
            return Err(Error::InvalidArgument("vote budget must be positive".into()));
        }
        Ok(PerturbSmoothConfig { r, gamma, vote_budget, seed })
    }

    /// Reference radius `(1+gamma)*r`.
    pub fn reference_radius(&self) -> R {
        (R::one() + self.gamma) * self.r
    }

    /// Smoothing radius `gamma*r`.
    pub fn smoothing_radius(&self) -> R {
        self.gamma * self.r
    }
}

/// A realizable learner the trainer calls exactly once.
pub trait PacLearner<R: Real> {
    fn fit(&mut self, s: &LabeledSample<R>) -> Result<Hypothesis<R>>;
}

/// The exact consistent-ERM learner for a family.
#[derive(Debug, Clone)]
pub struct ErmLearner {
    pub family: HypothesisFamily,
}

impl<R: Real> PacLearner<R> for ErmLearner {
    fn fit(&mut self, s: &LabeledSample<R>) -> Result<Hypothesis<R>> {
        erm_realizable(&self.family, s)
    }
}

/// Wrapper that counts `fit` invocations.
#[derive(Debug, Clone)]
pub struct CountingLearner<L> {
    pub inner: L,
    pub calls: u64,
}

impl<L> CountingLearner<L> {
    pub fn new(inner: L) -> Self {
        CountingLearner { inner, calls: 0 }
    }
}

impl<R: Real, L: PacLearner<R>> PacLearner<R> for CountingLearner<L> {
    fn fit(&mut self, s: &LabeledSample<R>) -> Result<Hypothesis<R>> {
        self.calls += 1;
        self.inner.fit(s)
    }
}

/// A base predictor smoothed by the majority label over a metric ball.
///
/// Prediction is `1{ E_{x' ~ B_w(x)} base(x') >= 1/2 }`. On finite spaces the
/// vote is the exact weighted average; elsewhere it is estimated with
/// `vote_budget` oracle draws.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothedClassifier<R, B> {
    pub base: B,
    pub smoothing: Perturbation<R>,
    pub vote_budget: usize,
    pub seed: u64,
    /// Whether exact voting is available (finite spaces).
    pub exact: bool,
}

impl<R: Real, B: BinaryClassifier<R>> SmoothedClassifier<R, B> {
    pub fn new(base: B, smoothing_radius: R, vote_budget: usize, seed: u64, exact: bool) -> Self {
        SmoothedClassifier {
            base,
            smoothing: Perturbation::closed(smoothing_radius),
            vote_budget,
            seed,
            exact,
        }
    }

    /// Exact weighted vote fraction on a finite space.
    pub fn exact_vote_fraction(&self, x: &Point<R>, space: &MetricSpace<R>) -> Result<R> {
        let f = space
            .as_finite()
            .ok_or_else(|| Error::UnsupportedMode("exact votes need a finite space".into()))?;
        let members = space.finite_ball_members(&self.smoothing.ball_around(x.clone()))?;
        if members.is_empty() {
            return Err(Error::EmptySupport("empty smoothing ball".into()));
        }
        let mut total = R::zero();
        let mut ones = R::zero();
        for &i in &members {
            let w = f.weight(i);
            total = total + w;
            if self.base.classify(&Point::index(i)) == Label::One {
                ones = ones + w;
            }
        }
        Ok(ones / total)
    }

    /// Vote fraction: exact on finite spaces, Monte-Carlo elsewhere.
    pub fn vote_fraction(
        &self,
        x: &Point<R>,
        space: &MetricSpace<R>,
        rng: &mut RandomStream,
    ) -> Result<R> {
        if space.is_finite_space() {
            return self.exact_vote_fraction(x, space);
        }
        let ball = self.smoothing.ball_around(x.clone());
        let mut ones = 0usize;
        for _ in 0..self.vote_budget {
            let z = space.sample_ball(&ball, rng)?;
            if self.base.classify(&z) == Label::One {
                ones += 1;
            }
        }
        Ok(R::of_usize(ones) / R::of_usize(self.vote_budget))
    }

    /// Smoothed prediction; a vote of exactly one half yields label one.
    pub fn predict(
        &self,
        x: &Point<R>,
        space: &MetricSpace<R>,
        rng: &mut RandomStream,
    ) -> Result<Label> {
        let vote = self.vote_fraction(x, space, rng)?;
        Ok(Label::from_bool(vote >= R::of(0.5)))
    }

    /// Reproducible prediction: votes are drawn from the substream derived
    /// from the classifier seed and the query counter.
    pub fn predict_indexed(
        &self,
        x: &Point<R>,
        space: &MetricSpace<R>,
        query_counter: u64,
    ) -> Result<Label> {
        let mut rng = RandomStream::new(self.seed).substream(query_counter);
        self.predict(x, space, &mut rng)
    }

    /// Exact decision region `{x : smoothed vote >= 1/2}` on the line, when
    /// the base has an exact region.
    pub fn decision_region_1d(&self) -> Option<IntervalSet<R>> {
        self.base
            .one_region_1d()
            .map(|region| region.smooth(self.smoothing.radius))
    }

    /// Deterministic exact prediction on the line via the decision region.
    pub fn classify_exact_1d(&self, x: R) -> Result<Label> {
        let region = self.decision_region_1d().ok_or_else(|| {
            Error::UnsupportedMode("smoothed base has no exact 1-D region".into())
        })?;
        Ok(Label::from_bool(region.contains(x)))
    }

    /// Materializes the smoothed classifier as an exact label table over a
    /// finite space.
    pub fn to_table(&self, space: &MetricSpace<R>) -> Result<Hypothesis<R>> {
        let f = space
            .as_finite()
            .ok_or_else(|| Error::UnsupportedMode("tables need a finite space".into()))?;
        let labels = (0..f.len())
            .map(|i| {
                let vote = self.exact_vote_fraction(&Point::index(i), space)?;
                Ok(Label::from_bool(vote >= R::of(0.5)))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Hypothesis::table(labels))
    }
}

impl<R: Real> SmoothedClassifier<R, Hypothesis<R>> {
    /// Two-line text form: the base hypothesis, then
    /// `smooth <radius> <budget> <seed>`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.base);
        let _ = writeln!(out, "smooth {} {} {}", self.smoothing.radius, self.vote_budget, self.seed);
        out
    }

    pub fn from_text(text: &str, exact: bool) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let base_line = lines.next().ok_or_else(|| Error::Parse("missing base hypothesis".into()))?;
        let base = Hypothesis::from_text(base_line)?;
        let smooth_line = lines.next().ok_or_else(|| Error::Parse("missing smooth line".into()))?;
        let mut tok = smooth_line.split_whitespace();
        if tok.next() != Some("smooth") {
            return Err(Error::Parse("expected `smooth <radius> <budget> <seed>`".into()));
        }
        let radius: R = tok
            .next()
            .ok_or_else(|| Error::Parse("missing smoothing radius".into()))?
            .parse()
            .map_err(|_| Error::Parse("bad smoothing radius".into()))?;
        let budget: usize = tok
            .next()
            .ok_or_else(|| Error::Parse("missing vote budget".into()))?
            .parse()
            .map_err(|_| Error::Parse("bad vote budget".into()))?;
        let seed: u64 = tok
            .next()
            .ok_or_else(|| Error::Parse("missing seed".into()))?
            .parse()
            .map_err(|_| Error::Parse("bad seed".into()))?;
        Ok(SmoothedClassifier::new(base, radius, budget, seed, exact))
    }
}

/// Trains the perturb-and-smooth classifier: one reference-ball draw per
/// sample point (through the counting oracle), one learner call, then
/// smoothing at radius `gamma*r`. A non-realizable perturbed sample aborts
/// with the learner's error so callers can decide a retry policy.
pub fn train<R: Real, L: PacLearner<R>>(
    learner: &mut L,
    s: &LabeledSample<R>,
    cfg: &PerturbSmoothConfig<R>,
    oracle: &mut SamplingOracle<'_, R>,
) -> Result<SmoothedClassifier<R, Hypothesis<R>>> {
    if s.is_empty() {
        return Err(Error::InvalidArgument("cannot train on an empty sample".into()));
    }
    let reference = cfg.reference_radius();
    let mut rng = RandomStream::new(cfg.seed);
    let mut perturbed = Vec::with_capacity(s.len());
    for (x, y) in s.iter() {
        let z = oracle.draw(&Ball::closed(x.clone(), reference), &mut rng)?;
        perturbed.push((z, *y));
    }
    let base = learner.fit(&LabeledSample::new(perturbed))?;
    let exact = oracle.space().is_finite_space();
    Ok(SmoothedClassifier::new(
        base,
        cfg.smoothing_radius(),
        cfg.vote_budget,
        cfg.seed,
        exact,
    ))
}

/// Query counts observed during a training run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrainCounters {
    pub oracle_queries: u64,
    pub learner_calls: u64,
}

/// Trains with the family's exact ERM and reports the oracle/learner counts.
pub fn train_with_erm<R: Real>(
    family: &HypothesisFamily,
    s: &LabeledSample<R>,
    cfg: &PerturbSmoothConfig<R>,
    space: &MetricSpace<R>,
) -> Result<(SmoothedClassifier<R, Hypothesis<R>>, TrainCounters)> {
    let mut learner = CountingLearner::new(ErmLearner { family: family.clone() });
    let mut oracle = SamplingOracle::new(space);
    let classifier = train(&mut learner, s, cfg, &mut oracle)?;
    Ok((
        classifier,
        TrainCounters { oracle_queries: oracle.queries(), learner_calls: learner.calls },
    ))
}

/// The smoothing margin `lambda = (1/3) * ((1+gamma)/gamma)^(-zeta*d)`: if the
/// base classifier's error mass over the reference ball stays below it, every
/// smoothing ball centered in the actual ball votes for the right label.
pub fn smoothing_threshold<R: Real>(gamma: R, params: &DoublingParameters<R>) -> Result<R> {
    if !(gamma > R::zero()) || !gamma.is_finite() {
        return Err(Error::InvalidArgument(format!("gamma must be positive, got {gamma}")));
    }
    let ratio = (R::one() + gamma) / gamma;
    Ok(R::of(1.0 / 3.0) * ratio.powf(-params.zeta_d()))
}

/// How to probe the worst smoothing-ball error over the actual ball.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SigmaProbe {
    /// Exact: finite spaces by enumeration, 1-D regions by piecewise-linear
    /// maximization.
    Exact,
    /// A membership-filtered grid probe with the given per-axis resolution.
    Grid(usize),
}

/// Measured smoothing quantities around one labeled point.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothingCheck<R> {
    /// Error mass of the base classifier over the reference ball.
    pub reference_error: R,
    /// Worst error mass over a smoothing ball centered in the actual ball.
    pub worst_local_error: R,
    /// The margin the reference error is compared against.
    pub threshold: R,
    /// Whether `reference_error <= threshold` implies
    /// `worst_local_error <= 1/3` on this instance.
    pub implication_holds: bool,
    /// Whether both quantities were computed exactly.
    pub exact: bool,
}

/// Evaluates the smoothing implication for classifier `g` at `(x, y)`.
///
/// With `params` the margin comes from the growth-bound formula; without, it
/// is computed from the space's exact measure ratios (Euclidean volumes, or
/// exhaustive ratios on finite spaces).
#[allow(clippy::too_many_arguments)]
pub fn smoothing_check<R: Real, G: BinaryClassifier<R>>(
    g: &G,
    x: &Point<R>,
    y: Label,
    r: R,
    gamma: R,
    space: &MetricSpace<R>,
    probe: SigmaProbe,
    params: Option<&DoublingParameters<R>>,
) -> Result<SmoothingCheck<R>> {
    if !(r > R::zero()) || !(gamma > R::zero()) {
        return Err(Error::InvalidArgument("need r > 0 and gamma > 0".into()));
    }
    let reference = (R::one() + gamma) * r;
    let w = gamma * r;
    let third = R::of(1.0 / 3.0);

    let threshold = match params {
        Some(p) => smoothing_threshold(gamma, p)?,
        None => match space {
            MetricSpace::Euclidean { dim, .. } => {
                // Exact volume ratio: (reference/w)^dim.
                third * (w / reference).powi(*dim as i32)
            }
            MetricSpace::Finite(_) => {
                let big = space.measure_ball(&Ball::closed(x.clone(), reference))?;
                let members = space.finite_ball_members(&Ball::closed(x.clone(), r))?;
                let mut worst_ratio = R::zero();
                for &z in &members {
                    let small =
                        space.measure_ball(&Ball::closed(Point::index(z), w))?;
                    debug_assert!(small > R::zero(), "smoothing ball contains its center");
                    worst_ratio = worst_ratio.max(big / small);
                }
                if worst_ratio == R::zero() {
                    third
                } else {
                    third / worst_ratio
                }
            }
        },
    };

    let (reference_error, worst_local_error, exact) = match (space, probe) {
        (MetricSpace::Finite(f), _) => {
            // Everything by enumeration; any probe spec collapses to exact.
            let big_members = space.finite_ball_members(&Ball::closed(x.clone(), reference))?;
            let mut big_total = R::zero();
            let mut big_err = R::zero();
            for &i in &big_members {
                let wt = f.weight(i);
                big_total = big_total + wt;
                if g.classify(&Point::index(i)) != y {
                    big_err = big_err + wt;
                }
            }
            let sigma_big = if big_total > R::zero() { big_err / big_total } else { R::zero() };
            let centers = space.finite_ball_members(&Ball::closed(x.clone(), r))?;
            let mut worst = R::zero();
            for &z in &centers {
                let small_members =
                    space.finite_ball_members(&Ball::closed(Point::index(z), w))?;
                let mut total = R::zero();
                let mut err = R::zero();
                for &i in &small_members {
                    let wt = f.weight(i);
                    total = total + wt;
                    if g.classify(&Point::index(i)) != y {
                        err = err + wt;
                    }
                }
                if total > R::zero() {
                    worst = worst.max(err / total);
                }
            }
            (sigma_big, worst, true)
        }
        (MetricSpace::Euclidean { dim: 1, .. }, SigmaProbe::Exact) => {
            let region_one = g.one_region_1d().ok_or_else(|| {
                Error::UnsupportedMode("exact probe needs a 1-D decision region".into())
            })?;
            let err_region = match y {
                Label::One => region_one.complement(),
                Label::Zero => region_one,
            };
            let c = x
                .scalar()
                .ok_or_else(|| Error::InvalidPoint("expected a 1-D point".into()))?;
            let two = R::of(2.0);
            let sigma_big =
                err_region.measure_between(c - reference, c + reference) / (two * reference);
            // sigma(z) is piecewise linear with breakpoints at the error
            // region endpoints shifted by w; its max over [c-r, c+r] is
            // attained at a breakpoint or an endpoint.
            let mut probes = vec![c - r, c + r];
            for iv in err_region.intervals() {
                for e in [iv.lo, iv.hi] {
                    if e.is_finite() {
                        for candidate in [e - w, e + w, e] {
                            if candidate >= c - r && candidate <= c + r {
                                probes.push(candidate);
                            }
                        }
                    }
                }
            }
            let mut worst = R::zero();
            for z in probes {
                let sigma = err_region.measure_between(z - w, z + w) / (two * w);
                worst = worst.max(sigma);
            }
            (sigma_big, worst, true)
        }
        (MetricSpace::Euclidean { dim, .. }, probe) => {
            let resolution = match probe {
                SigmaProbe::Grid(n) if n >= 2 => n,
                SigmaProbe::Grid(_) => {
                    return Err(Error::InvalidArgument("grid resolution must be at least 2".into()))
                }
                SigmaProbe::Exact => {
                    return Err(Error::UnsupportedMode(
                        "exact probing needs a 1-D or finite space".into(),
                    ))
                }
            };
            let c = x
                .as_coords()
                .ok_or_else(|| Error::InvalidPoint("expected coordinates".into()))?;
            let grid_points = |center: &[R], radius: R| -> Vec<Point<R>> {
                let mut pts = Vec::new();
                let mut idx = vec![0usize; *dim];
                loop {
                    let coords: Vec<R> = (0..*dim)
                        .map(|a| {
                            let t = R::of_usize(idx[a]) / R::of_usize(resolution - 1);
                            (center[a] - radius) + t * (R::of(2.0) * radius)
                        })
                        .collect();
                    pts.push(Point::Coords(coords));
                    let mut d = 0;
                    loop {
                        if d == *dim {
                            return pts;
                        }
                        idx[d] += 1;
                        if idx[d] < resolution {
                            break;
                        }
                        idx[d] = 0;
                        d += 1;
                    }
                }
            };
            let in_ball = |center: &Point<R>, radius: R, z: &Point<R>| -> Result<bool> {
                space.ball_contains(&Ball::closed(center.clone(), radius), z)
            };
            // Reference-ball error by grid average.
            let big_pts = grid_points(c, reference);
            let mut count = 0usize;
            let mut errs = 0usize;
            for z in &big_pts {
                if in_ball(x, reference, z)? {
                    count += 1;
                    if g.classify(z) != y {
                        errs += 1;
                    }
                }
            }
            let sigma_big = if count > 0 {
                R::of_usize(errs) / R::of_usize(count)
            } else {
                R::zero()
            };
            // Worst smoothing-ball error across probe centers.
            let centers = grid_points(c, r);
            let mut worst = R::zero();
            for z in &centers {
                if !in_ball(x, r, z)? {
                    continue;
                }
                let zc = z.as_coords().unwrap().to_vec();
                let small_pts = grid_points(&zc, w);
                let mut total = 0usize;
                let mut bad = 0usize;
                for u in &small_pts {
                    if in_ball(z, w, u)? {
                        total += 1;
                        if g.classify(u) != y {
                            bad += 1;
                        }
                    }
                }
                if total > 0 {
                    worst = worst.max(R::of_usize(bad) / R::of_usize(total));
                }
            }
            (sigma_big, worst, false)
        }
    };

    let implication_holds = reference_error > threshold || worst_local_error <= third;
    Ok(SmoothingCheck {
        reference_error,
        worst_local_error,
        threshold,
        implication_holds,
        exact,
    })
}

/// Sample-size scaling law of the learner, with unit constant:
/// `((vc + ln(1/delta)) / epsilon) * (1 + 1/gamma)^(zeta*d)`.
pub fn sample_size_bound<R: Real>(
    epsilon: R,
    delta: R,
    gamma: R,
    params: &DoublingParameters<R>,
    vc: usize,
) -> Result<R> {
    if !(epsilon > R::zero() && epsilon < R::one()) {
        return Err(Error::InvalidArgument(format!("epsilon must be in (0,1), got {epsilon}")));
    }
    if !(delta > R::zero() && delta < R::one()) {
        return Err(Error::InvalidArgument(format!("delta must be in (0,1), got {delta}")));
    }
    if !(gamma > R::zero()) {
        return Err(Error::InvalidArgument(format!("gamma must be positive, got {gamma}")));
    }
    if vc == 0 {
        return Err(Error::InvalidArgument("vc must be positive".into()));
    }
    let base = (R::of_usize(vc) + (R::one() / delta).ln()) / epsilon;
    Ok(base * (R::one() + R::one() / gamma).powf(params.zeta_d()))
}
