//! A tolerant sample compression scheme.
//!
//! Encoding: inflate the sample into the union of reference balls with
//! minimal-index labeling, materialize a finite approximation of the inflated
//! distribution, and run boost-by-majority (edge 1/6) where each weak learner
//! is an exact robust-ERM hypothesis fitted on a small block of ORIGINAL
//! sample points (the provenance of the drawn approximation points). The
//! compressed form is the sequence of those blocks.
//!
//! Decoding: refit robust ERM on every block, take the unweighted majority
//! vote, and smooth it at the smoothing radius. On certifiable setups the
//! pipeline verifies that the decoded classifier has exactly zero adversarial
//! loss on the source sample at the actual radius, retrying with fresh
//! randomness and a doubled block budget otherwise.

use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;

use crate::hypothesis::{BinaryClassifier, Hypothesis, HypothesisFamily, Label, LabeledSample};
use crate::loss::{exact_point_loss, smoothed_point_loss, EvaluationMode, Perturbation};
use crate::metric::{Ball, DoublingParameters, MetricSpace, Point};
use crate::perturb_smooth::SmoothedClassifier;
use crate::piecewise::IntervalSet;
use crate::random::RandomStream;
use crate::scalar::Real;
use crate::{Error, Result};

/// Weak-learner edge used throughout the scheme; weak error must stay below
/// `1/2 - EDGE = 1/3`.
pub const BBM_EDGE: f64 = 1.0 / 6.0;

/// Vote budget given to decoded smoothed classifiers for Monte-Carlo
/// prediction.
pub const DECODE_VOTE_BUDGET: usize = 1000;

/// An unweighted majority vote; a tie goes to label one.
#[derive(Debug, Clone, PartialEq)]
pub struct MajorityVote<R> {
    pub hypotheses: Vec<Hypothesis<R>>,
}

impl<R: Real> MajorityVote<R> {
    pub fn new(hypotheses: Vec<Hypothesis<R>>) -> Self {
        MajorityVote { hypotheses }
    }

    pub fn len(&self) -> usize {
        self.hypotheses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hypotheses.is_empty()
    }
}

impl<R: Real> BinaryClassifier<R> for MajorityVote<R> {
    fn classify(&self, x: &Point<R>) -> Label {
        let ones = self.hypotheses.iter().filter(|h| h.predict(x) == Label::One).count();
        Label::from_bool(2 * ones >= self.hypotheses.len())
    }

    fn one_region_1d(&self) -> Option<IntervalSet<R>> {
        let regions: Option<Vec<IntervalSet<R>>> =
            self.hypotheses.iter().map(|h| h.one_region_1d()).collect();
        let regions = regions?;
        // ones/T >= 1/2 over T voters means at least ceil(T/2) ones.
        let need = self.hypotheses.len().div_ceil(2);
        Some(IntervalSet::vote_region(&regions, need))
    }
}

/// A point drawn from the inflated sample, with its minimal covering source
/// index and the label inherited from it.
#[derive(Debug, Clone, PartialEq)]
pub struct InflatedPoint<R> {
    pub point: Point<R>,
    pub label: Label,
    pub provenance: usize,
}

/// The distribution over the union of reference balls around the sample:
/// draw a source index uniformly, then a measure-uniform point of its ball;
/// the point is labeled by the minimally-indexed covering source entry.
#[derive(Debug)]
pub struct InflatedDistribution<'a, R> {
    source: &'a LabeledSample<R>,
    space: &'a MetricSpace<R>,
    v_radius: R,
}

impl<'a, R: Real> InflatedDistribution<'a, R> {
    pub fn new(
        source: &'a LabeledSample<R>,
        space: &'a MetricSpace<R>,
        v_radius: R,
    ) -> Result<Self> {
        if source.is_empty() {
            return Err(Error::InvalidArgument("inflated distribution needs a nonempty sample".into()));
        }
        if !(v_radius > R::zero()) {
            return Err(Error::InvalidRadius("reference radius must be positive".into()));
        }
        Ok(InflatedDistribution { source, space, v_radius })
    }

    pub fn source(&self) -> &LabeledSample<R> {
        self.source
    }

    pub fn v_radius(&self) -> R {
        self.v_radius
    }

    /// Minimal index whose reference ball covers `z`.
    pub fn covering_index(&self, z: &Point<R>) -> Result<Option<usize>> {
        for (i, (x, _)) in self.source.iter().enumerate() {
            if self.space.distance(x, z)? <= self.v_radius {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    pub fn sample(&self, rng: &mut RandomStream) -> Result<InflatedPoint<R>> {
        let j = rng.random_range(0..self.source.len());
        let z = self
            .space
            .sample_ball(&Ball::closed(self.source.point(j).clone(), self.v_radius), rng)?;
        // Provenance is recomputed as the minimal covering index, not the
        // drawn one.
        let i = self
            .covering_index(&z)?
            .expect("the drawn ball's center covers its own sample");
        Ok(InflatedPoint { point: z, label: self.source.label(i), provenance: i })
    }
}

/// An i.i.d. materialization of the inflated distribution with uniform base
/// weights.
#[derive(Debug, Clone)]
pub struct FiniteApproximation<R> {
    pub points: Vec<InflatedPoint<R>>,
    pub weights: Vec<R>,
}

impl<R: Real> FiniteApproximation<R> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Draws `target_size` points from the inflated distribution.
pub fn build_finite_approximation<R: Real>(
    dist: &InflatedDistribution<'_, R>,
    target_size: usize,
    rng: &mut RandomStream,
) -> Result<FiniteApproximation<R>> {
    if target_size == 0 {
        return Err(Error::InvalidArgument("approximation size must be positive".into()));
    }
    let points = (0..target_size).map(|_| dist.sample(rng)).collect::<Result<Vec<_>>>()?;
    let w = R::one() / R::of_usize(target_size);
    Ok(FiniteApproximation { points, weights: vec![w; target_size] })
}

/// The theory-faithful approximation size `4 m^2 C vc(G) / beta^2`; reported,
/// never materialized.
pub fn theoretical_approximation_size<R: Real>(m: usize, c: R, vc_g: usize, beta: R) -> R {
    R::of(4.0) * R::of_usize(m * m) * c * R::of_usize(vc_g) / (beta * beta)
}

/// Training-error bound of boost-by-majority after `rounds` rounds with the
/// fixed edge: `exp(-2 * edge^2 * rounds) = exp(-rounds/18)`.
pub fn boosting_error_bound<R: Real>(rounds: usize) -> R {
    (-R::of(2.0 * BBM_EDGE * BBM_EDGE) * R::of_usize(rounds)).exp()
}

/// Cumulative log-factorials `ln(0!), ln(1!), ..., ln(n!)`.
fn ln_factorials<R: Real>(n: usize) -> Vec<R> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = R::zero();
    out.push(acc);
    for i in 1..=n {
        acc = acc + R::of_usize(i).ln();
        out.push(acc);
    }
    out
}

/// Log of the boost-by-majority potential weight for an example that has been
/// classified correctly `s_correct` times after `t_done` of `t_total` rounds:
/// the probability that a (1/2+edge)-biased walk over the remaining rounds
/// lands exactly on the majority boundary. `None` encodes weight zero
/// (the example is already decided either way).
fn bbm_ln_weight<R: Real>(
    lf: &[R],
    t_total: usize,
    t_done: usize,
    s_correct: usize,
    edge: R,
) -> Option<R> {
    let need = t_total.div_ceil(2);
    let remaining = t_total.checked_sub(t_done + 1)?;
    if s_correct + 1 > need {
        return None; // already has a winning majority
    }
    let k = need - s_correct - 1;
    if k > remaining {
        return None; // cannot reach a majority any more
    }
    let half = R::of(0.5);
    let ln_choose = lf[remaining] - lf[k] - lf[remaining - k];
    Some(
        ln_choose
            + R::of_usize(k) * (half + edge).ln()
            + R::of_usize(remaining - k) * (half - edge).ln(),
    )
}

/// One weak-learning outcome: the fitted hypothesis, the source-index block
/// that encodes it, and its exact weighted error on the approximation.
#[derive(Debug, Clone)]
pub struct WeakOutcome<R> {
    pub hypothesis: Hypothesis<R>,
    pub block: Vec<usize>,
    pub weighted_error: R,
    pub retries: usize,
}

/// Draws a block of at most `n` source points from the weighted approximation
/// and fits robust ERM on it, retrying until the exact weighted error drops
/// to `1/2 - edge = 1/3`.
#[allow(clippy::too_many_arguments)]
pub fn weak_learn<R: Real>(
    approx: &FiniteApproximation<R>,
    round_weights: &[R],
    family: &HypothesisFamily,
    v_pert: &Perturbation<R>,
    source: &LabeledSample<R>,
    space: &MetricSpace<R>,
    n: usize,
    rng: &mut RandomStream,
    max_retries: usize,
) -> Result<WeakOutcome<R>> {
    if n == 0 {
        return Err(Error::InvalidArgument("block budget must be positive".into()));
    }
    if round_weights.len() != approx.len() {
        return Err(Error::InvalidArgument("weight vector length mismatch".into()));
    }
    let total = round_weights.iter().fold(R::zero(), |s, &w| s + w);
    if !(total > R::zero()) {
        return Err(Error::InvalidArgument("round weights must have positive mass".into()));
    }
    let third = R::of(1.0) / R::of(3.0);
    let sampler = rand::distr::weighted::WeightedIndex::new(round_weights)
        .map_err(|e| Error::InvalidArgument(format!("bad round weights: {e}")))?;
    let mut best = R::infinity();
    for attempt in 0..=max_retries {
        let mut picked: Vec<usize> = (0..n)
            .map(|_| approx.points[rng.sample(&sampler)].provenance)
            .collect();
        picked.sort_unstable();
        picked.dedup();
        let block_sample = source.select(&picked);
        let hypothesis = crate::hypothesis::robust_erm(family, &block_sample, v_pert, space)?;
        let mut err = R::zero();
        for (p, &w) in approx.points.iter().zip(round_weights) {
            if hypothesis.classify(&p.point) != p.label {
                err = err + w;
            }
        }
        let err = err / total;
        if err <= third {
            return Ok(WeakOutcome { hypothesis, block: picked, weighted_error: err, retries: attempt });
        }
        best = best.min(err);
    }
    Err(Error::WeakLearnerFailure(format!(
        "no block of size {n} reached weighted error 1/3 in {max_retries} retries (best {best})"
    )))
}

/// Per-round boosting accounting.
#[derive(Debug, Clone)]
pub struct BoostRound<R> {
    pub round: usize,
    pub weak_error: R,
    pub majority_error: R,
    pub block_size: usize,
}

/// Result of a boost-by-majority run.
#[derive(Debug, Clone)]
pub struct BoostOutcome<R> {
    pub vote: MajorityVote<R>,
    pub blocks: Vec<Vec<usize>>,
    pub rounds: Vec<BoostRound<R>>,
    pub final_error: R,
    pub stopped_early: bool,
}

/// Runs up to `t_max` rounds of boost-by-majority with edge 1/6 over the
/// approximation, one weak learner and one block per round. Stops early when
/// the exact base-weighted training error of the running majority reaches
/// `target`, or when no example carries potential weight any more.
#[allow(clippy::too_many_arguments)]
pub fn boost_by_majority<R: Real>(
    approx: &FiniteApproximation<R>,
    family: &HypothesisFamily,
    v_pert: &Perturbation<R>,
    source: &LabeledSample<R>,
    space: &MetricSpace<R>,
    t_max: usize,
    n: usize,
    target: Option<R>,
    rng: &mut RandomStream,
    weak_retries: usize,
) -> Result<BoostOutcome<R>> {
    if t_max == 0 {
        return Err(Error::InvalidArgument("need at least one boosting round".into()));
    }
    if approx.is_empty() {
        return Err(Error::InvalidArgument("empty approximation".into()));
    }
    let edge = R::of(BBM_EDGE);
    let lf = ln_factorials::<R>(t_max);
    let size = approx.len();
    let mut s_counts = vec![0usize; size];
    let mut hypotheses: Vec<Hypothesis<R>> = Vec::new();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut rounds: Vec<BoostRound<R>> = Vec::new();
    let mut final_error = R::one();
    let mut stopped_early = false;

    for t in 0..t_max {
        // Potential weights for this round, stabilized in log space.
        let ln_weights: Vec<Option<R>> = s_counts
            .iter()
            .map(|&s| bbm_ln_weight(&lf, t_max, t, s, edge))
            .collect();
        let max_ln = ln_weights
            .iter()
            .flatten()
            .cloned()
            .fold(R::neg_infinity(), R::max);
        if max_ln == R::neg_infinity() {
            // Every example is already decided relative to the horizon.
            break;
        }
        let round_weights: Vec<R> = ln_weights
            .iter()
            .zip(&approx.weights)
            .map(|(lw, &base)| match lw {
                Some(lw) => base * (*lw - max_ln).exp(),
                None => R::zero(),
            })
            .collect();

        let weak = weak_learn(
            approx, &round_weights, family, v_pert, source, space, n, rng, weak_retries,
        )?;
        for (i, p) in approx.points.iter().enumerate() {
            if weak.hypothesis.classify(&p.point) == p.label {
                s_counts[i] += 1;
            }
        }
        blocks.push(weak.block.clone());
        hypotheses.push(weak.hypothesis.clone());

        let vote = MajorityVote::new(hypotheses.clone());
        let mut err = R::zero();
        for (p, &w) in approx.points.iter().zip(&approx.weights) {
            if vote.classify(&p.point) != p.label {
                err = err + w;
            }
        }
        final_error = err;
        rounds.push(BoostRound {
            round: t + 1,
            weak_error: weak.weighted_error,
            majority_error: err,
            block_size: weak.block.len(),
        });
        if let Some(tgt) = target {
            if err <= tgt {
                stopped_early = t + 1 < t_max;
                break;
            }
        }
    }

    Ok(BoostOutcome {
        vote: MajorityVote::new(hypotheses),
        blocks,
        rounds,
        final_error,
        stopped_early,
    })
}

/// Compression pipeline configuration.
#[derive(Debug, Clone)]
pub struct CompressionConfig<R> {
    pub r: R,
    pub gamma: R,
    pub beta: R,
    /// Materialized approximation size; defaults to `10 * m * ceil(1/beta)`
    /// capped at 100_000.
    pub approx_size: Option<usize>,
    /// Per-round block budget; defaults to `3 * vc * ceil(ln(m+1))`, doubled
    /// on every pipeline retry.
    pub net_size: Option<usize>,
    pub pipeline_retries: usize,
    pub weak_retries: usize,
    pub seed: u64,
}

impl<R: Real> CompressionConfig<R> {
    pub fn new(r: R, gamma: R, beta: R, seed: u64) -> Result<Self> {
        if !(r > R::zero()) || !(gamma > R::zero()) {
            return Err(Error::InvalidArgument("need r > 0 and gamma > 0".into()));
        }
        if !(beta > R::zero() && beta < R::of(0.5)) {
            return Err(Error::InvalidArgument(format!("beta must be in (0, 1/2), got {beta}")));
        }
        Ok(CompressionConfig {
            r,
            gamma,
            beta,
            approx_size: None,
            net_size: None,
            pipeline_retries: 5,
            weak_retries: 20,
            seed,
        })
    }

    pub fn reference_radius(&self) -> R {
        (R::one() + self.gamma) * self.r
    }

    pub fn smoothing_radius(&self) -> R {
        self.gamma * self.r
    }

    /// Round budget `18 ln(2m/beta)`, rounded up and forced odd so the final
    /// unweighted majority cannot tie.
    pub fn rounds_for(&self, m: usize) -> usize {
        let raw = R::of(18.0) * (R::of_usize(2 * m) / self.beta).ln();
        let mut t = raw.ceil().to_usize().unwrap_or(1).max(1);
        if t.is_multiple_of(2) {
            t += 1;
        }
        t
    }

    pub fn net_size_for(&self, vc: usize, m: usize) -> usize {
        match self.net_size {
            Some(n) => n,
            None => {
                let ln_m = R::of_usize(m + 1).ln().ceil().to_usize().unwrap_or(1).max(1);
                (3 * vc * ln_m).max(1)
            }
        }
    }

    pub fn approx_size_for(&self, m: usize) -> usize {
        match self.approx_size {
            Some(n) => n,
            None => {
                let per = (R::one() / self.beta).ceil().to_usize().unwrap_or(1).max(1);
                (10 * m * per).clamp(1, 100_000)
            }
        }
    }

    /// Boosting stops once the exact training error reaches `beta / (2m)`.
    pub fn target_error(&self, m: usize) -> R {
        self.beta / R::of_usize(2 * m)
    }
}

/// Compression metadata carried in the block-file header.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressionMeta<R> {
    pub r: R,
    pub gamma: R,
    pub rounds: usize,
    pub net_size: usize,
    pub seed: u64,
}

/// The compressed form: ordered blocks of original sample points.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressionOutput<R> {
    pub meta: CompressionMeta<R>,
    pub blocks: Vec<Vec<(Point<R>, Label)>>,
}

impl<R: Real> CompressionOutput<R> {
    /// Total number of stored points `k`.
    pub fn total_points(&self) -> usize {
        self.blocks.iter().map(|b| b.len()).sum()
    }

    /// Text form. Header line, then one line per block: the block length
    /// followed by `(coords ; label)` tuples; finite-space points are written
    /// as `#index`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "tolerant-compression v1 r={} gamma={} T={} n={} seed={}",
            self.meta.r, self.meta.gamma, self.meta.rounds, self.meta.net_size, self.meta.seed
        );
        for block in &self.blocks {
            let mut line = format!("{}", block.len());
            for (p, y) in block {
                let coords = match p {
                    Point::Coords(c) => c
                        .iter()
                        .map(|v| v.to_string())
                        .collect::<Vec<_>>()
                        .join(" "),
                    Point::Index(i) => format!("#{i}"),
                };
                let _ = write!(line, " ({coords} ; {y})");
            }
            let _ = writeln!(out, "{line}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty block file".into()))?;
        let mut tok = header.split_whitespace();
        if tok.next() != Some("tolerant-compression") || tok.next() != Some("v1") {
            return Err(Error::Parse("bad block-file header".into()));
        }
        let mut r = None;
        let mut gamma = None;
        let mut rounds = None;
        let mut net_size = None;
        let mut seed = None;
        for kv in tok {
            let (key, value) = kv
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("bad header field: {kv}")))?;
            match key {
                "r" => r = Some(value.parse::<R>().map_err(|_| Error::Parse("bad r".into()))?),
                "gamma" => {
                    gamma = Some(value.parse::<R>().map_err(|_| Error::Parse("bad gamma".into()))?)
                }
                "T" => rounds = Some(value.parse().map_err(|_| Error::Parse("bad T".into()))?),
                "n" => net_size = Some(value.parse().map_err(|_| Error::Parse("bad n".into()))?),
                "seed" => seed = Some(value.parse().map_err(|_| Error::Parse("bad seed".into()))?),
                other => return Err(Error::Parse(format!("unknown header field: {other}"))),
            }
        }
        let meta = CompressionMeta {
            r: r.ok_or_else(|| Error::Parse("header misses r".into()))?,
            gamma: gamma.ok_or_else(|| Error::Parse("header misses gamma".into()))?,
            rounds: rounds.ok_or_else(|| Error::Parse("header misses T".into()))?,
            net_size: net_size.ok_or_else(|| Error::Parse("header misses n".into()))?,
            seed: seed.ok_or_else(|| Error::Parse("header misses seed".into()))?,
        };
        let mut blocks = Vec::new();
        for line in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (count_str, rest) = match line.split_once(' ') {
                Some((c, rest)) => (c, rest),
                None => (line, ""),
            };
            let count: usize = count_str
                .parse()
                .map_err(|_| Error::Parse(format!("bad block length: {count_str}")))?;
            let mut block = Vec::with_capacity(count);
            let mut rest = rest.trim_start();
            while !rest.is_empty() {
                if !rest.starts_with('(') {
                    return Err(Error::Parse(format!("expected '(' in block line near: {rest}")));
                }
                let close = rest
                    .find(')')
                    .ok_or_else(|| Error::Parse("unterminated tuple".into()))?;
                let tuple = &rest[1..close];
                let (coords_str, label_str) = tuple
                    .split_once(';')
                    .ok_or_else(|| Error::Parse(format!("missing ';' in tuple: {tuple}")))?;
                let label: Label = label_str.trim().parse()?;
                let coords_str = coords_str.trim();
                let point = if let Some(idx) = coords_str.strip_prefix('#') {
                    Point::Index(idx.parse().map_err(|_| Error::Parse(format!("bad index: {idx}")))?)
                } else {
                    let coords: Vec<R> = coords_str
                        .split_whitespace()
                        .map(|t| {
                            t.parse::<R>().map_err(|_| Error::Parse(format!("bad coordinate: {t}")))
                        })
                        .collect::<Result<_>>()?;
                    if coords.is_empty() {
                        return Err(Error::Parse("empty tuple".into()));
                    }
                    Point::Coords(coords)
                };
                block.push((point, label));
                rest = rest[close + 1..].trim_start();
            }
            if block.len() != count {
                return Err(Error::Parse(format!(
                    "block length {count} does not match {} tuples",
                    block.len()
                )));
            }
            blocks.push(block);
        }
        if blocks.len() != meta.rounds {
            return Err(Error::Parse(format!(
                "header T={} does not match {} block lines",
                meta.rounds,
                blocks.len()
            )));
        }
        Ok(CompressionOutput { meta, blocks })
    }

    pub fn write_file(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn read_file(path: &Path) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }
}

/// A completed compression run with its boosting trace.
#[derive(Debug, Clone)]
pub struct CompressionRun<R> {
    pub output: CompressionOutput<R>,
    pub rounds: Vec<BoostRound<R>>,
    pub final_error: R,
    pub target_error: R,
    pub attempts: usize,
    /// Certification outcome: `Some(true)` when the decoded classifier was
    /// proven to have zero adversarial loss on the source, `None` when the
    /// setup has no certifying evaluator.
    pub verified: Option<bool>,
    pub net_size: usize,
    pub approx_size: usize,
}

/// Exact reference-radius realizability check.
fn assert_v_realizable<R: Real>(
    s: &LabeledSample<R>,
    family: &HypothesisFamily,
    v_pert: &Perturbation<R>,
    space: &MetricSpace<R>,
) -> Result<()> {
    let h = crate::hypothesis::robust_erm(family, s, v_pert, space)?;
    for (x, y) in s.iter() {
        if exact_point_loss(&h, x, *y, v_pert, space)? > R::zero() {
            return Err(Error::NonRealizable(format!(
                "no hypothesis in the family is robustly consistent at radius {}",
                v_pert.radius
            )));
        }
    }
    Ok(())
}

/// Compresses a reference-radius realizable sample into weak-learner blocks.
pub fn compress<R: Real>(
    s: &LabeledSample<R>,
    family: &HypothesisFamily,
    space: &MetricSpace<R>,
    cfg: &CompressionConfig<R>,
) -> Result<CompressionRun<R>> {
    if s.is_empty() {
        return Err(Error::InvalidArgument("cannot compress an empty sample".into()));
    }
    let m = s.len();
    let v_pert = Perturbation::closed(cfg.reference_radius());
    assert_v_realizable(s, family, &v_pert, space)?;

    let vc = family.vc_dimension();
    let t_max = cfg.rounds_for(m);
    let approx_size = cfg.approx_size_for(m);
    let target = cfg.target_error(m);
    let base_n = cfg.net_size_for(vc, m);
    let dist = InflatedDistribution::new(s, space, cfg.reference_radius())?;
    let root = RandomStream::new(cfg.seed);

    let mut last_failure = String::new();
    for attempt in 0..cfg.pipeline_retries.max(1) {
        let n = base_n << attempt.min(16);
        let stream = root.substream(attempt as u64);
        let mut approx_rng = stream.substream(0);
        let approx = build_finite_approximation(&dist, approx_size, &mut approx_rng)?;
        let mut boost_rng = stream.substream(1);
        let boosted = match boost_by_majority(
            &approx,
            family,
            &v_pert,
            s,
            space,
            t_max,
            n,
            Some(target),
            &mut boost_rng,
            cfg.weak_retries,
        ) {
            Ok(b) => b,
            Err(Error::WeakLearnerFailure(msg)) => {
                last_failure = msg;
                continue;
            }
            Err(e) => return Err(e),
        };
        if boosted.final_error > target {
            last_failure = format!(
                "boosting stalled at training error {} (target {target})",
                boosted.final_error
            );
            continue;
        }
        let blocks: Vec<Vec<(Point<R>, Label)>> = boosted
            .blocks
            .iter()
            .map(|idxs| idxs.iter().map(|&i| (s.point(i).clone(), s.label(i))).collect())
            .collect();
        let output = CompressionOutput {
            meta: CompressionMeta {
                r: cfg.r,
                gamma: cfg.gamma,
                rounds: blocks.len(),
                net_size: n,
                seed: cfg.seed,
            },
            blocks,
        };
        let verified = match verify_tolerant_compression(s, &output, family, space) {
            Ok(ok) => Some(ok),
            Err(Error::UnsupportedMode(_)) => None,
            Err(e) => return Err(e),
        };
        if verified == Some(false) {
            last_failure = "decoded classifier failed certification".into();
            continue;
        }
        return Ok(CompressionRun {
            output,
            rounds: boosted.rounds,
            final_error: boosted.final_error,
            target_error: target,
            attempts: attempt + 1,
            verified,
            net_size: n,
            approx_size,
        });
    }
    Err(Error::CompressionFailure(format!(
        "no attempt out of {} succeeded; last failure: {last_failure}",
        cfg.pipeline_retries.max(1)
    )))
}

/// Decodes blocks into the smoothed majority vote: robust ERM per block at
/// the reference radius, unweighted majority, smoothing at `gamma*r`.
/// Deterministic given the block file.
pub fn decompress<R: Real>(
    out: &CompressionOutput<R>,
    family: &HypothesisFamily,
    space: &MetricSpace<R>,
) -> Result<SmoothedClassifier<R, MajorityVote<R>>> {
    if out.blocks.is_empty() {
        return Err(Error::InvalidArgument("no blocks to decode".into()));
    }
    let v_pert = Perturbation::closed((R::one() + out.meta.gamma) * out.meta.r);
    let hypotheses = out
        .blocks
        .iter()
        .map(|block| {
            let sample = LabeledSample::new(block.clone());
            crate::hypothesis::robust_erm(family, &sample, &v_pert, space)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SmoothedClassifier::new(
        MajorityVote::new(hypotheses),
        out.meta.gamma * out.meta.r,
        DECODE_VOTE_BUDGET,
        out.meta.seed,
        space.is_finite_space(),
    ))
}

/// Certified check that decoding reproduces zero adversarial loss on the
/// source sample at the actual radius.
pub fn verify_tolerant_compression<R: Real>(
    s: &LabeledSample<R>,
    out: &CompressionOutput<R>,
    family: &HypothesisFamily,
    space: &MetricSpace<R>,
) -> Result<bool> {
    let decoded = decompress(out, family, space)?;
    let u_pert = Perturbation::closed(out.meta.r);
    let mut rng = RandomStream::new(0);
    for (x, y) in s.iter() {
        let rep = smoothed_point_loss(
            &decoded, x, *y, &u_pert, EvaluationMode::Exact, space, &mut rng,
        )?;
        debug_assert!(rep.certified);
        if rep.value > R::zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Compression generalization bound `(k ln(m) + ln(1/delta)) / (m - k)`.
pub fn generalization_bound<R: Real>(m: usize, k: usize, delta: R) -> Result<R> {
    if k >= m {
        return Err(Error::InvalidArgument(format!(
            "bound needs k < m, got k={k}, m={m}"
        )));
    }
    if !(delta > R::zero() && delta < R::one()) {
        return Err(Error::InvalidArgument(format!("delta must be in (0,1), got {delta}")));
    }
    let kf = R::of_usize(k);
    let mf = R::of_usize(m);
    Ok((kf * mf.ln() + (R::one() / delta).ln()) / (mf - kf))
}

/// Realizable vs agnostic rate for the compression-based learner.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LearningSetting {
    Realizable,
    Agnostic,
}

/// Sample-size scaling law of the compression learner, with unit constants:
/// `(vc * zeta*d * ln(1 + 1/gamma) + ln(1/delta)) / epsilon^(1 or 2)`.
pub fn compression_sample_bound<R: Real>(
    epsilon: R,
    delta: R,
    gamma: R,
    params: &DoublingParameters<R>,
    vc: usize,
    setting: LearningSetting,
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
    let numerator = R::of_usize(vc) * params.zeta_d() * (R::one() + R::one() / gamma).ln()
        + (R::one() / delta).ln();
    Ok(match setting {
        LearningSetting::Realizable => numerator / epsilon,
        LearningSetting::Agnostic => numerator / (epsilon * epsilon),
    })
}

/// Checks the net property of a block: every family hypothesis that is
/// robustly consistent with the block at the reference radius must have
/// weighted binary error at most `epsilon` on the approximation. Exact via
/// candidate enumeration over the cells induced by the approximation points
/// and the block's inflated bounds.
pub fn epsnet_check<R: Real>(
    block: &LabeledSample<R>,
    v_pert: &Perturbation<R>,
    approx: &FiniteApproximation<R>,
    weights: &[R],
    epsilon: R,
    family: &HypothesisFamily,
) -> Result<bool> {
    if weights.len() != approx.len() {
        return Err(Error::InvalidArgument("weight vector length mismatch".into()));
    }
    let total = weights.iter().fold(R::zero(), |s, &w| s + w);
    if !(total > R::zero()) {
        return Err(Error::InvalidArgument("weights must have positive mass".into()));
    }
    let zs: Vec<R> = approx
        .points
        .iter()
        .map(|p| {
            p.point
                .scalar()
                .ok_or_else(|| Error::UnsupportedFamily("net check works on 1-D points".into()))
        })
        .collect::<Result<_>>()?;

    let weighted_error = |h: &Hypothesis<R>| -> R {
        let mut err = R::zero();
        for ((z, p), &w) in zs.iter().zip(&approx.points).zip(weights) {
            if h.predict(&Point::one_d(*z)) != p.label {
                err = err + w;
            }
        }
        err / total
    };

    match family {
        HypothesisFamily::Thresholds => {
            // Robust consistency pins theta into [above, below): label-one
            // points force theta >= x + rv, label-zero points force
            // theta < x - rv.
            let rv = v_pert.radius;
            let mut above = R::neg_infinity();
            let mut below = R::infinity();
            for (p, y) in block.iter() {
                let x = p
                    .scalar()
                    .ok_or_else(|| Error::UnsupportedFamily("net check works on 1-D points".into()))?;
                match y {
                    Label::One => above = above.max(x + rv),
                    Label::Zero => below = below.min(x - rv),
                }
            }
            if above >= below {
                return Ok(true); // no consistent hypothesis: vacuous
            }
            // Representatives of every constancy cell of the weighted error
            // inside [above, below).
            let mut events: Vec<R> = zs
                .iter()
                .cloned()
                .filter(|z| *z > above && *z < below)
                .collect();
            events.sort_by(|a, b| a.partial_cmp(b).expect("no NaN"));
            events.dedup();
            let mut cands: Vec<R> = Vec::new();
            let left = if above.is_finite() {
                above
            } else {
                let left_most = events
                    .first()
                    .cloned()
                    .unwrap_or(if below.is_finite() { below } else { R::zero() });
                left_most - R::one()
            };
            cands.push(left);
            for (i, &e) in events.iter().enumerate() {
                cands.push(e);
                let next = events.get(i + 1).cloned().unwrap_or_else(|| {
                    if below.is_finite() {
                        below
                    } else {
                        e + R::of(2.0)
                    }
                });
                cands.push((e + next) / R::of(2.0));
            }
            if events.is_empty() && below.is_finite() && left < below {
                cands.push((left + below) / R::of(2.0));
            }
            let mut worst = R::zero();
            for &theta in &cands {
                if theta < above || theta >= below {
                    continue;
                }
                let h = Hypothesis::threshold(theta, crate::hypothesis::Orientation::LeftIsOne);
                worst = worst.max(weighted_error(&h));
            }
            Ok(worst <= epsilon)
        }
        HypothesisFamily::Intervals => {
            // Candidate endpoints: approximation coordinates, the block's
            // inflated bounds, midpoints and outside sentinels.
            let rv = v_pert.radius;
            let mut coords: Vec<R> = zs.clone();
            for (p, _) in block.iter() {
                let x = p
                    .scalar()
                    .ok_or_else(|| Error::UnsupportedFamily("net check works on 1-D points".into()))?;
                coords.push(x - rv);
                coords.push(x + rv);
            }
            coords.sort_by(|a, b| a.partial_cmp(b).expect("no NaN"));
            coords.dedup();
            let mut cands: Vec<R> = Vec::new();
            cands.push(coords[0] - R::one());
            for (i, &c) in coords.iter().enumerate() {
                cands.push(c);
                if let Some(&next) = coords.get(i + 1) {
                    cands.push((c + next) / R::of(2.0));
                }
            }
            cands.push(*coords.last().unwrap() + R::one());

            let space = MetricSpace::line();
            let mut worst = R::zero();
            for (i, &lo) in cands.iter().enumerate() {
                'hi: for &hi in &cands[i..] {
                    let h = Hypothesis::interval(lo, hi, Label::One)?;
                    for (x, y) in block.iter() {
                        if exact_point_loss(&h, x, *y, v_pert, &space)? > R::zero() {
                            continue 'hi;
                        }
                    }
                    worst = worst.max(weighted_error(&h));
                }
            }
            Ok(worst <= epsilon)
        }
        other => Err(Error::UnsupportedFamily(format!(
            "net check supports thresholds and intervals, got {other:?}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypothesis::Orientation;
    use approx::assert_abs_diff_eq;

    fn line() -> MetricSpace<f64> {
        MetricSpace::line()
    }

    fn two_point_sample() -> LabeledSample<f64> {
        LabeledSample::from_scalars(vec![(-1.0, Label::One), (1.0, Label::Zero)])
    }

    fn separated_config(seed: u64) -> CompressionConfig<f64> {
        // V-radius 0.6: balls [-1.6, -0.4] and [0.4, 1.6] stay separated.
        CompressionConfig::new(0.4, 0.5, 1.0 / 9.0, seed).unwrap()
    }

    #[test]
    fn majority_vote_tie_goes_to_one() {
        let vote = MajorityVote::new(vec![
            Hypothesis::threshold(0.0, Orientation::LeftIsOne),
            Hypothesis::threshold(1.0, Orientation::RightIsOne),
        ]);
        // At -0.5 the two voters split 1-1; between the thresholds both say 0.
        assert_eq!(vote.classify(&Point::one_d(-0.5)), Label::One);
        assert_eq!(vote.classify(&Point::one_d(0.5)), Label::Zero);
    }

    #[test]
    fn majority_region_matches_pointwise_votes() {
        let vote = MajorityVote::new(vec![
            Hypothesis::threshold(-0.5, Orientation::LeftIsOne),
            Hypothesis::threshold(0.25, Orientation::LeftIsOne),
            Hypothesis::threshold(1.0, Orientation::LeftIsOne),
        ]);
        let region = vote.one_region_1d().unwrap();
        let mut x = -2.0;
        while x < 2.0 {
            assert_eq!(
                region.contains(x),
                vote.classify(&Point::one_d(x)) == Label::One,
                "mismatch at {x}"
            );
            x += 0.01;
        }
    }

    #[test]
    fn inflated_sampling_invariants() {
        let s = LabeledSample::from_scalars(vec![(0.0, Label::One), (0.5, Label::Zero)]);
        let space = line();
        let dist = InflatedDistribution::new(&s, &space, 1.0).unwrap();
        let mut rng = RandomStream::new(4);
        for _ in 0..2000 {
            let p = dist.sample(&mut rng).unwrap();
            let z = p.point.scalar().unwrap();
            // Containment in the provenance ball.
            assert!((z - s.point(p.provenance).scalar().unwrap()).abs() <= 1.0 + 1e-12);
            // Minimal-index labeling: anything in [-1, 1] belongs to index 0.
            if z <= 1.0 {
                assert_eq!(p.provenance, 0);
                assert_eq!(p.label, Label::One);
            } else {
                assert_eq!(p.provenance, 1);
                assert_eq!(p.label, Label::Zero);
            }
        }
    }

    #[test]
    fn singleton_source_always_self_covers() {
        let s = LabeledSample::from_scalars(vec![(2.0, Label::One)]);
        let space = line();
        let dist = InflatedDistribution::new(&s, &space, 0.5).unwrap();
        let mut rng = RandomStream::new(9);
        for _ in 0..100 {
            let p = dist.sample(&mut rng).unwrap();
            assert_eq!(p.provenance, 0);
            assert!((p.point.scalar().unwrap() - 2.0).abs() <= 0.5);
        }
    }

    #[test]
    fn index_marginal_is_uniform() {
        let s = LabeledSample::from_scalars(vec![
            (-10.0, Label::One),
            (0.0, Label::Zero),
            (10.0, Label::One),
        ]);
        let space = line();
        let dist = InflatedDistribution::new(&s, &space, 0.5).unwrap();
        let mut rng = RandomStream::new(6);
        let draws = 100_000;
        let mut counts = [0usize; 3];
        for _ in 0..draws {
            counts[dist.sample(&mut rng).unwrap().provenance] += 1;
        }
        let p = 1.0 / 3.0;
        let se = (p * (1.0 - p) / draws as f64).sqrt();
        for c in counts {
            assert!((c as f64 / draws as f64 - p).abs() <= 4.0 * se);
        }
    }

    #[test]
    fn approximation_has_requested_size_and_uniform_weights() {
        let s = two_point_sample();
        let space = line();
        let dist = InflatedDistribution::new(&s, &space, 0.6).unwrap();
        let mut rng = RandomStream::new(1);
        let approx = build_finite_approximation(&dist, 100, &mut rng).unwrap();
        assert_eq!(approx.len(), 100);
        assert!(approx.weights.iter().all(|&w| w == 0.01));
    }

    #[test]
    fn theoretical_size_formula() {
        let v: f64 = theoretical_approximation_size(20, 2.0, 10, 1.0 / 6.0);
        assert_abs_diff_eq!(v, 1_152_000.0, epsilon = 1e-6);
    }

    #[test]
    fn round_budget_formula() {
        let cfg = CompressionConfig::new(1.0, 0.5, 0.01, 0).unwrap();
        assert_eq!(cfg.rounds_for(100), 179);
        // Forced odd.
        let cfg2 = CompressionConfig::new(1.0, 0.5, 0.1, 0).unwrap();
        assert!(cfg2.rounds_for(10) % 2 == 1);
    }

    #[test]
    fn decay_bound_values() {
        assert_abs_diff_eq!(boosting_error_bound::<f64>(54), (-3.0f64).exp(), epsilon = 1e-12);
        assert_abs_diff_eq!(boosting_error_bound::<f64>(18), (-1.0f64).exp(), epsilon = 1e-12);
    }

    #[test]
    fn bbm_weights_vanish_outside_the_valid_range() {
        let lf = ln_factorials::<f64>(11);
        // Horizon 11, need 6 wins: an example with 6 correct is safe.
        assert!(bbm_ln_weight(&lf, 11, 6, 6, 1.0 / 6.0).is_none());
        // An example that cannot reach 6 wins any more is lost.
        assert!(bbm_ln_weight(&lf, 11, 9, 3, 1.0 / 6.0).is_none());
        // A live example carries weight.
        assert!(bbm_ln_weight(&lf, 11, 3, 2, 1.0 / 6.0).is_some());
    }

    #[test]
    fn weak_learner_handles_concentrated_weight() {
        let s = LabeledSample::from_scalars(vec![
            (-2.0, Label::One),
            (0.0, Label::One),
            (2.0, Label::Zero),
        ]);
        let space = line();
        let v = Perturbation::closed(0.5);
        let dist = InflatedDistribution::new(&s, &space, 0.5).unwrap();
        let mut rng = RandomStream::new(12);
        let approx = build_finite_approximation(&dist, 60, &mut rng).unwrap();
        // All weight on points covered by source index 2.
        let weights: Vec<f64> = approx
            .points
            .iter()
            .map(|p| if p.provenance == 2 { 1.0 } else { 0.0 })
            .collect();
        assert!(weights.iter().sum::<f64>() > 0.0);
        let out = weak_learn(
            &approx, &weights, &HypothesisFamily::Thresholds, &v, &s, &space, 5, &mut rng, 10,
        )
        .unwrap();
        assert!(out.block.contains(&2));
        assert_eq!(out.weighted_error, 0.0);
        assert!(out.block.len() <= 5);
    }

    #[test]
    fn single_round_boosting_is_one_weak_learner() {
        let s = two_point_sample();
        let space = line();
        let v = Perturbation::closed(0.6);
        let dist = InflatedDistribution::new(&s, &space, 0.6).unwrap();
        let mut rng = RandomStream::new(3);
        let approx = build_finite_approximation(&dist, 50, &mut rng).unwrap();
        let out = boost_by_majority(
            &approx, &HypothesisFamily::Thresholds, &v, &s, &space, 1, 4, None, &mut rng, 10,
        )
        .unwrap();
        assert_eq!(out.vote.len(), 1);
        assert!(out.rounds[0].weak_error <= 1.0 / 3.0);
    }

    #[test]
    fn compress_two_points_end_to_end() {
        let s = two_point_sample();
        let space = line();
        let run = compress(&s, &HypothesisFamily::Thresholds, &space, &separated_config(5)).unwrap();
        assert_eq!(run.verified, Some(true));
        assert!(run.final_error <= run.target_error);
        assert!(run.output.total_points() <= run.net_size * run.output.meta.rounds);
        // Decode and certify the adversarial loss on the source at radius r.
        let decoded = decompress(&run.output, &HypothesisFamily::Thresholds, &space).unwrap();
        let mut rng = RandomStream::new(0);
        let rep = crate::loss::smoothed_empirical_loss(
            &decoded,
            &s,
            &Perturbation::closed(0.4),
            EvaluationMode::Exact,
            &space,
            &mut rng,
        )
        .unwrap();
        assert_eq!(rep.value, 0.0);
        assert!(rep.certified);
    }

    #[test]
    fn compress_singleton_sample() {
        let s = LabeledSample::from_scalars(vec![(0.5, Label::One)]);
        let space = line();
        let run = compress(&s, &HypothesisFamily::Thresholds, &space, &separated_config(7)).unwrap();
        assert_eq!(run.verified, Some(true));
        let decoded = decompress(&run.output, &HypothesisFamily::Thresholds, &space).unwrap();
        // The decoded classifier is constant-correct on the actual ball.
        let region = decoded.decision_region_1d().unwrap();
        assert!(region.contains_ball(0.5, 0.4, crate::metric::Boundary::Closed));
    }

    #[test]
    fn compress_rejects_non_realizable_input() {
        // V-balls of the two labels overlap: [-1.6,-0.4]+[0.4,1.6] at radius
        // 1.5*(1+0.5) around +-1 collide.
        let s = two_point_sample();
        let space = line();
        let cfg = CompressionConfig::new(1.5, 0.5, 0.1, 0).unwrap();
        assert!(matches!(
            compress(&s, &HypothesisFamily::Thresholds, &space, &cfg),
            Err(Error::NonRealizable(_))
        ));
    }

    #[test]
    fn block_file_round_trip_is_bit_exact() {
        let s = two_point_sample();
        let space = line();
        let run = compress(&s, &HypothesisFamily::Thresholds, &space, &separated_config(11)).unwrap();
        let text = run.output.to_text();
        let parsed = CompressionOutput::<f64>::from_text(&text).unwrap();
        assert_eq!(parsed, run.output);
        assert_eq!(parsed.to_text(), text);
    }

    #[test]
    fn block_file_parses_finite_points() {
        let out = CompressionOutput::<f64> {
            meta: CompressionMeta { r: 1.0, gamma: 0.5, rounds: 1, net_size: 3, seed: 9 },
            blocks: vec![vec![(Point::index(3), Label::One), (Point::index(0), Label::Zero)]],
        };
        let text = out.to_text();
        let parsed = CompressionOutput::<f64>::from_text(&text).unwrap();
        assert_eq!(parsed, out);
    }

    #[test]
    fn encoder_and_decoder_hypotheses_agree() {
        // Decoding refits robust ERM on each block; determinism makes the
        // refit reproduce the encoder's weak learners exactly. The reference
        // radius must come through the same arithmetic as the decoder's
        // `(1 + gamma) * r` for the candidate grids to match bit for bit.
        let s = two_point_sample();
        let space = line();
        let (r, gamma) = (0.4, 0.5);
        let v = Perturbation::closed((1.0 + gamma) * r);
        for seed in 0..100u64 {
            let dist = InflatedDistribution::new(&s, &space, v.radius).unwrap();
            let mut rng = RandomStream::new(seed);
            let approx = build_finite_approximation(&dist, 40, &mut rng).unwrap();
            let boosted = boost_by_majority(
                &approx, &HypothesisFamily::Thresholds, &v, &s, &space, 5, 4, None, &mut rng, 10,
            )
            .unwrap();
            let blocks: Vec<Vec<(Point<f64>, Label)>> = boosted
                .blocks
                .iter()
                .map(|idxs| idxs.iter().map(|&i| (s.point(i).clone(), s.label(i))).collect())
                .collect();
            let output = CompressionOutput {
                meta: CompressionMeta {
                    r,
                    gamma,
                    rounds: blocks.len(),
                    net_size: 4,
                    seed,
                },
                blocks,
            };
            let decoded = decompress(&output, &HypothesisFamily::Thresholds, &space).unwrap();
            assert_eq!(decoded.base.hypotheses, boosted.vote.hypotheses, "seed {seed}");
        }
    }

    #[test]
    fn decoding_is_deterministic() {
        let s = two_point_sample();
        let space = line();
        let run = compress(&s, &HypothesisFamily::Thresholds, &space, &separated_config(13)).unwrap();
        let a = decompress(&run.output, &HypothesisFamily::Thresholds, &space).unwrap();
        let b = decompress(&run.output, &HypothesisFamily::Thresholds, &space).unwrap();
        assert_eq!(a.base, b.base);
    }

    #[test]
    fn generalization_bound_values() {
        let v = generalization_bound::<f64>(1000, 50, 0.1).unwrap();
        let expected = (50.0 * 1000f64.ln() + 10f64.ln()) / 950.0;
        assert_abs_diff_eq!(v, expected, epsilon = 1e-12);
        // k = 0 leaves only the confidence term.
        let v0 = generalization_bound::<f64>(1000, 0, 0.1).unwrap();
        assert_abs_diff_eq!(v0, 10f64.ln() / 1000.0, epsilon = 1e-15);
        // delta near 1 kills the confidence term.
        let v1 = generalization_bound::<f64>(1000, 50, 1.0 - 1e-12).unwrap();
        assert_abs_diff_eq!(v1, 50.0 * 1000f64.ln() / 950.0, epsilon = 1e-9);
        assert!(matches!(
            generalization_bound::<f64>(100, 100, 0.1),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn compression_bound_scaling() {
        let p = DoublingParameters::with_zeta(5.0, 1.0);
        let re = compression_sample_bound(0.1, 0.05, 0.5, &p, 3, LearningSetting::Realizable).unwrap();
        let ag = compression_sample_bound(0.1, 0.05, 0.5, &p, 3, LearningSetting::Agnostic).unwrap();
        assert_abs_diff_eq!(ag / re, 10.0, epsilon = 1e-9);
        // Doubling d doubles the VC term exactly.
        let p2 = DoublingParameters::with_zeta(10.0, 1.0);
        let re2 = compression_sample_bound(0.1, 0.05, 0.5, &p2, 3, LearningSetting::Realizable).unwrap();
        let vc_term = 3.0 * 5.0 * (1.0f64 + 2.0).ln() / 0.1;
        assert_abs_diff_eq!(re2 - re, vc_term, epsilon = 1e-9);
        // Large gamma sends the tolerance term to zero.
        let far = compression_sample_bound(0.1, 0.05, 1e12, &p, 3, LearningSetting::Realizable).unwrap();
        assert_abs_diff_eq!(far, 20f64.ln() / 0.1, epsilon = 1e-3);
    }

    #[test]
    fn net_check_accepts_a_pinning_block_and_rejects_an_empty_one() {
        let space = line();
        let s = two_point_sample();
        let v = Perturbation::closed(0.6);
        let dist = InflatedDistribution::new(&s, &space, 0.6).unwrap();
        let mut rng = RandomStream::new(15);
        let approx = build_finite_approximation(&dist, 200, &mut rng).unwrap();
        let weights = vec![1.0; approx.len()];
        // The full sample as block pins theta into a zero-error cell.
        let ok = epsnet_check(
            &s, &v, &approx, &weights, 1.0 / 3.0, &HypothesisFamily::Thresholds,
        )
        .unwrap();
        assert!(ok);
        // An empty block leaves every threshold consistent; some threshold
        // errs on about half the mass.
        let empty = LabeledSample::from_scalars(vec![]);
        let bad = epsnet_check(
            &empty, &v, &approx, &weights, 1.0 / 3.0, &HypothesisFamily::Thresholds,
        )
        .unwrap();
        assert!(!bad);
    }
}
