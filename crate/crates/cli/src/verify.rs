//! Brute-force oracle checks: doubling exactness, the smoothing implication
//! corpora, net-property cross-checks, the compression certification corpus,
//! and a handful of mutation-sensitive sanity checks.

use anyhow::Result;
use rand::Rng;

use tolerant_core::compression::{
    boosting_error_bound, compress, decompress, epsnet_check, CompressionConfig,
    CompressionOutput, InflatedDistribution, MajorityVote,
};
use tolerant_core::hypothesis::{
    erm_realizable, BinaryClassifier, Hypothesis, HypothesisFamily, Label, LabeledSample,
    Orientation,
};
use tolerant_core::loss::Perturbation;
use tolerant_core::metric::{
    verify_doubling_euclidean, Ball, DoublingParameters, FiniteSpace, MetricSpace, Norm, Point,
};
use tolerant_core::perturb_smooth::{
    smoothing_check, train_with_erm, PerturbSmoothConfig, SigmaProbe, SmoothedClassifier,
};
use tolerant_core::random::RandomStream;
use tolerant_core::Error;

use crate::config::Config;
use crate::scenarios::TAG_VERIFY;

/// One verification check result.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Check { name: name.into(), passed, detail }
    }
}

#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// A seeded reference-radius-realizable 1-D compression instance.
#[derive(Debug, Clone)]
pub struct CorpusInstance {
    pub sample: LabeledSample<f64>,
    pub r: f64,
    pub gamma: f64,
    pub family: HypothesisFamily,
    pub seed: u64,
}

/// Generates `count` seeded instances with well-separated clusters, sizes up
/// to 100 points, mixing threshold and interval families.
pub fn compression_corpus(seed: u64, count: usize) -> Vec<CorpusInstance> {
    let root = RandomStream::new(seed).substream(TAG_VERIFY).substream(100);
    (0..count)
        .map(|i| {
            let mut rng = root.substream(i as u64);
            let m: usize = rng.random_range(2..=100);
            let center: f64 = rng.random_range(0.8..1.5);
            let width: f64 = rng.random_range(0.05..0.3);
            let gamma: f64 = rng.random_range(0.2..1.5);
            let interval_family = i % 5 == 4;
            let gap = if interval_family {
                // Clusters at -2c, 0, 2c labeled 0, 1, 0.
                2.0 * center - 2.0 * width
            } else {
                2.0 * center - 2.0 * width
            };
            let r = rng.random_range(0.2..0.9) * (gap / 2.0) / (1.0 + gamma);
            let mut pairs = Vec::with_capacity(m);
            if interval_family {
                for _ in 0..m {
                    let which: u8 = rng.random_range(0..3);
                    let (c, label) = match which {
                        0 => (-2.0 * center, Label::Zero),
                        1 => (0.0, Label::One),
                        _ => (2.0 * center, Label::Zero),
                    };
                    pairs.push((c + rng.random_range(-width..width), label));
                }
            } else {
                for _ in 0..m {
                    let one: bool = rng.random_range(0..2u8) == 0;
                    let (c, label) = if one {
                        (-center, Label::One)
                    } else {
                        (center, Label::Zero)
                    };
                    pairs.push((c + rng.random_range(-width..width), label));
                }
            }
            CorpusInstance {
                sample: LabeledSample::from_scalars(pairs),
                r,
                gamma,
                family: if interval_family {
                    HypothesisFamily::Intervals
                } else {
                    HypothesisFamily::Thresholds
                },
                seed: rng.random_range(0..u64::MAX / 2),
            }
        })
        .collect()
}

fn check_doubling_exactness(rng: &mut RandomStream) -> Check {
    let mut worst: f64 = 0.0;
    let mut trials = 0;
    for norm in [Norm::L2, Norm::Linf] {
        for dim in [1usize, 2, 3] {
            let space = MetricSpace::<f64>::euclidean(dim, norm);
            for alpha in [1.1, 2.0, 5.0] {
                match verify_doubling_euclidean(&space, 0.7, alpha, 4, rng) {
                    Ok(report) => {
                        for t in &report.trials {
                            trials += 1;
                            worst = worst.max((t.ratio - t.expected).abs());
                            if !t.pass {
                                return Check::new(
                                    "doubling_exactness",
                                    false,
                                    format!(
                                        "dim {dim}, alpha {alpha}: ratio {} vs {}",
                                        t.ratio, t.expected
                                    ),
                                );
                            }
                        }
                    }
                    Err(e) => {
                        return Check::new("doubling_exactness", false, format!("error: {e}"))
                    }
                }
            }
        }
    }
    Check::new(
        "doubling_exactness",
        true,
        format!("{trials} trials, worst deviation {worst:.2e} (tolerance 1e-9)"),
    )
}

/// Random 1-D instances for the smoothing implication, including adversarial
/// mass-concentration constructions. Zero violations tolerated.
fn check_smoothing_implication_euclidean(rng: &mut RandomStream, instances: usize) -> Check {
    let space = MetricSpace::<f64>::line();
    let mut triggered = 0usize;
    for i in 0..instances {
        let x: f64 = rng.random_range(-1.0..1.0);
        let y = if rng.random_range(0..2u8) == 0 { Label::One } else { Label::Zero };
        let r: f64 = rng.random_range(0.1..1.0);
        let gamma: f64 = rng.random_range(0.1..2.0);
        let reference = (1.0 + gamma) * r;
        let lambda = gamma / (3.0 * (1.0 + gamma));
        let g: Hypothesis<f64> = match i % 3 {
            0 => {
                // Error interval of controlled mass somewhere in the
                // reference ball, often below the margin.
                let len = rng.random_range(0.0..2.0 * lambda * 2.0 * reference);
                let lo = x + rng.random_range(-reference..(reference - len).max(-reference));
                let wrong = y.flip();
                Hypothesis::interval(lo, lo + len, wrong).unwrap()
            }
            1 => {
                // Worst case: error mass packed inside one smoothing ball.
                let len = 0.99 * lambda * 2.0 * reference;
                let z = x + rng.random_range(-r..r);
                Hypothesis::interval(z - len / 2.0, z + len / 2.0, y.flip()).unwrap()
            }
            _ => {
                let theta = rng.random_range(-3.0..3.0);
                Hypothesis::threshold(theta, Orientation::LeftIsOne)
            }
        };
        let check = match smoothing_check(
            &g, &Point::one_d(x), y, r, gamma, &space, SigmaProbe::Exact, None,
        ) {
            Ok(c) => c,
            Err(e) => {
                return Check::new(
                    "smoothing_implication_euclidean",
                    false,
                    format!("instance {i}: error {e}"),
                )
            }
        };
        if check.reference_error <= check.threshold {
            triggered += 1;
            if !check.implication_holds {
                return Check::new(
                    "smoothing_implication_euclidean",
                    false,
                    format!(
                        "violation at instance {i}: reference error {} <= {} but local error {}",
                        check.reference_error, check.threshold, check.worst_local_error
                    ),
                );
            }
        }
    }
    Check::new(
        "smoothing_implication_euclidean",
        triggered > instances / 10,
        format!("{instances} instances, {triggered} with reference error below the margin, 0 violations"),
    )
}

/// Random finite spaces (metrics induced by random planar point sets) with
/// exact measure-ratio margins.
fn check_smoothing_implication_finite(rng: &mut RandomStream, instances: usize) -> Check {
    let mut triggered = 0usize;
    for i in 0..instances {
        let n: usize = rng.random_range(4..12);
        let coords: Vec<(f64, f64)> = (0..n)
            .map(|_| (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let mut distances = vec![vec![0.0; n]; n];
        for a in 0..n {
            for b in 0..n {
                let dx = coords[a].0 - coords[b].0;
                let dy = coords[a].1 - coords[b].1;
                distances[a][b] = (dx * dx + dy * dy).sqrt();
            }
        }
        let weights: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..2.0)).collect();
        let finite = match FiniteSpace::new(weights, distances) {
            Ok(f) => f,
            Err(_) => continue, // duplicate points; skip the draw
        };
        let space = MetricSpace::finite(finite);
        let labels: Vec<Label> =
            (0..n).map(|_| Label::from_bool(rng.random_range(0..4u8) == 0)).collect();
        let g = Hypothesis::table(labels);
        let x = Point::index(rng.random_range(0..n));
        let y = if rng.random_range(0..2u8) == 0 { Label::One } else { Label::Zero };
        let r: f64 = rng.random_range(0.1..1.0);
        let gamma: f64 = rng.random_range(0.2..2.0);
        let check = match smoothing_check(&g, &x, y, r, gamma, &space, SigmaProbe::Exact, None) {
            Ok(c) => c,
            Err(e) => {
                return Check::new(
                    "smoothing_implication_finite",
                    false,
                    format!("instance {i}: error {e}"),
                )
            }
        };
        if check.reference_error <= check.threshold {
            triggered += 1;
            if !check.implication_holds {
                return Check::new(
                    "smoothing_implication_finite",
                    false,
                    format!(
                        "violation at instance {i}: reference error {} <= {} but local error {}",
                        check.reference_error, check.threshold, check.worst_local_error
                    ),
                );
            }
        }
    }
    Check::new(
        "smoothing_implication_finite",
        triggered > 0,
        format!("{instances} instances, {triggered} with reference error below the margin, 0 violations"),
    )
}

/// The net-property checker against a dense brute-force scan.
fn check_epsnet_against_brute_force(rng: &mut RandomStream, instances: usize) -> Check {
    let space = MetricSpace::<f64>::line();
    for i in 0..instances {
        // Planted threshold geometry.
        let m: usize = rng.random_range(2..8);
        let gamma: f64 = rng.random_range(0.3..1.0);
        let r: f64 = rng.random_range(0.05..0.25);
        let rv = (1.0 + gamma) * r;
        let pairs: Vec<(f64, Label)> = (0..m)
            .map(|_| {
                let one: bool = rng.random_range(0..2u8) == 0;
                if one {
                    (rng.random_range(-2.0..-1.0), Label::One)
                } else {
                    (rng.random_range(1.0..2.0), Label::Zero)
                }
            })
            .collect();
        let source = LabeledSample::from_scalars(pairs);
        let dist = match InflatedDistribution::new(&source, &space, rv) {
            Ok(d) => d,
            Err(e) => return Check::new("epsnet_vs_brute_force", false, format!("{e}")),
        };
        let approx =
            match tolerant_core::compression::build_finite_approximation(&dist, 60, rng) {
                Ok(a) => a,
                Err(e) => return Check::new("epsnet_vs_brute_force", false, format!("{e}")),
            };
        let weights: Vec<f64> = (0..approx.len()).map(|_| rng.random_range(0.1..1.0)).collect();
        // A random sub-block of the source.
        let block_size = rng.random_range(0..=source.len());
        let indices: Vec<usize> = (0..block_size).collect();
        let block = source.select(&indices);
        let epsilon: f64 = rng.random_range(0.05..0.5);
        let v_pert = Perturbation::closed(rv);
        let fast = match epsnet_check(
            &block, &v_pert, &approx, &weights, epsilon, &HypothesisFamily::Thresholds,
        ) {
            Ok(ok) => ok,
            Err(e) => return Check::new("epsnet_vs_brute_force", false, format!("{e}")),
        };
        // Brute force: scan a dense grid of thresholds, keep the robustly
        // consistent ones, and take the worst weighted error.
        let total: f64 = weights.iter().sum();
        let mut worst: f64 = 0.0;
        let mut any_consistent = false;
        let mut theta = -4.0;
        while theta <= 4.0 {
            let consistent = block.iter().all(|(p, y)| {
                let x = p.scalar().unwrap();
                match y {
                    Label::One => theta >= x + rv,
                    Label::Zero => theta < x - rv,
                }
            });
            if consistent {
                any_consistent = true;
                let mut err = 0.0;
                for (p, &w) in approx.points.iter().zip(&weights) {
                    let z = p.point.scalar().unwrap();
                    let predicted = Label::from_bool(z <= theta);
                    if predicted != p.label {
                        err += w;
                    }
                }
                worst = worst.max(err / total);
            }
            theta += 0.002;
        }
        let brute = !any_consistent || worst <= epsilon;
        // The dense scan can only under-estimate the worst case, so a
        // disagreement in this direction is a real bug.
        if fast && !brute {
            return Check::new(
                "epsnet_vs_brute_force",
                false,
                format!("instance {i}: checker accepted but brute force found worst {worst} > {epsilon}"),
            );
        }
        if !fast && brute && worst < epsilon - 1e-6 {
            return Check::new(
                "epsnet_vs_brute_force",
                false,
                format!("instance {i}: checker rejected but brute force worst {worst} < {epsilon}"),
            );
        }
    }
    Check::new("epsnet_vs_brute_force", true, format!("{instances} instances agree"))
}

/// The full compression corpus: decay at every round, target reached,
/// certification, size accounting, bit-exact round trip, decode determinism.
fn check_compression_corpus(seed: u64, count: usize) -> Check {
    let corpus = compression_corpus(seed, count);
    let space = MetricSpace::<f64>::line();
    let mut total_rounds = 0usize;
    for (i, inst) in corpus.iter().enumerate() {
        let params = DoublingParameters::euclidean(1);
        let beta = match smoothing_threshold_for(inst.gamma, &params) {
            Ok(b) => b,
            Err(e) => return Check::new("compression_corpus", false, format!("{e}")),
        };
        let cfg = match CompressionConfig::new(inst.r, inst.gamma, beta, inst.seed) {
            Ok(c) => c,
            Err(e) => return Check::new("compression_corpus", false, format!("{e}")),
        };
        let run = match compress(&inst.sample, &inst.family, &space, &cfg) {
            Ok(r) => r,
            Err(e) => {
                return Check::new(
                    "compression_corpus",
                    false,
                    format!("instance {i} (m={}) failed: {e}", inst.sample.len()),
                )
            }
        };
        total_rounds += run.output.meta.rounds;
        // Boosting decay at every recorded round, weak soundness, and the
        // final target.
        for round in &run.rounds {
            if round.weak_error > 1.0 / 3.0 {
                return Check::new(
                    "compression_corpus",
                    false,
                    format!("instance {i}: weak error {} > 1/3", round.weak_error),
                );
            }
            let bound = boosting_error_bound::<f64>(round.round);
            if round.majority_error > bound {
                return Check::new(
                    "compression_corpus",
                    false,
                    format!(
                        "instance {i}: round {} error {} above decay bound {}",
                        round.round, round.majority_error, bound
                    ),
                );
            }
        }
        if run.final_error > run.target_error {
            return Check::new(
                "compression_corpus",
                false,
                format!("instance {i}: final error {} > target {}", run.final_error, run.target_error),
            );
        }
        if run.verified != Some(true) {
            return Check::new(
                "compression_corpus",
                false,
                format!("instance {i}: certification outcome {:?}", run.verified),
            );
        }
        // Size accounting.
        if run.output.total_points() > run.net_size * run.output.meta.rounds {
            return Check::new(
                "compression_corpus",
                false,
                format!("instance {i}: k exceeds n*T"),
            );
        }
        // Bit-exact round trip and decode determinism.
        let text = run.output.to_text();
        let parsed = match CompressionOutput::<f64>::from_text(&text) {
            Ok(p) => p,
            Err(e) => return Check::new("compression_corpus", false, format!("parse: {e}")),
        };
        if parsed != run.output || parsed.to_text() != text {
            return Check::new(
                "compression_corpus",
                false,
                format!("instance {i}: block file round trip not bit-exact"),
            );
        }
        let a = match decompress(&run.output, &inst.family, &space) {
            Ok(a) => a,
            Err(e) => return Check::new("compression_corpus", false, format!("decode: {e}")),
        };
        let b = decompress(&parsed, &inst.family, &space).unwrap();
        if a.base != b.base {
            return Check::new(
                "compression_corpus",
                false,
                format!("instance {i}: decode is not deterministic"),
            );
        }
    }
    Check::new(
        "compression_corpus",
        true,
        format!("{count} instances certified, {total_rounds} total boosting rounds"),
    )
}

fn smoothing_threshold_for(
    gamma: f64,
    params: &DoublingParameters<f64>,
) -> tolerant_core::Result<f64> {
    tolerant_core::perturb_smooth::smoothing_threshold(gamma, params)
}

/// The exact finite-space vote with the documented tie rule; a `> 1/2`
/// mutation of the smoothing rule fails here.
fn check_smoothing_tie_rule() -> Check {
    let d = vec![
        vec![0.0, 1.0, 2.0],
        vec![1.0, 0.0, 1.0],
        vec![2.0, 1.0, 0.0],
    ];
    let space = MetricSpace::finite(FiniteSpace::new(vec![1.0; 3], d).unwrap());
    let base = Hypothesis::table(vec![Label::One, Label::Zero, Label::Zero]);
    let c = SmoothedClassifier::new(base, 1.0, 16, 0, true);
    let vote = match c.exact_vote_fraction(&Point::index(0), &space) {
        Ok(v) => v,
        Err(e) => return Check::new("smoothing_tie_rule", false, format!("{e}")),
    };
    let mut rng = RandomStream::new(0);
    let label = c.predict(&Point::index(0), &space, &mut rng).unwrap();
    let passed = vote == 0.5 && label == Label::One;
    Check::new(
        "smoothing_tie_rule",
        passed,
        format!("vote {vote} resolves to {label}"),
    )
}

/// Non-realizable inputs surface errors rather than panics.
fn check_non_realizable_surfaced() -> Check {
    let conflicting = LabeledSample::from_scalars(vec![(0.0, Label::One), (0.0, Label::Zero)]);
    let erm_err = matches!(
        erm_realizable(&HypothesisFamily::Thresholds, &conflicting),
        Err(Error::NonRealizable(_))
    );
    // Overlapping reference balls around the two-point sample.
    let sample = LabeledSample::from_scalars(vec![(-1.0, Label::One), (1.0, Label::Zero)]);
    let cfg = CompressionConfig::new(1.0, 0.5, 0.1, 3).unwrap();
    let compress_err = matches!(
        compress(&sample, &HypothesisFamily::Thresholds, &MetricSpace::line(), &cfg),
        Err(Error::NonRealizable(_))
    );
    Check::new(
        "non_realizable_surfaced",
        erm_err && compress_err,
        format!("erm: {erm_err}, compression: {compress_err}"),
    )
}

/// Sampling statistics: weighted finite frequencies and Euclidean marginals.
fn check_sampling_statistics(rng: &mut RandomStream) -> Check {
    // Weighted 5-point space, frequencies within 3 standard errors.
    let weights = vec![1.0, 2.0, 3.0, 4.0, 5.0];
    let n = weights.len();
    let mut d = vec![vec![1.0; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    let space = MetricSpace::finite(FiniteSpace::new(weights.clone(), d).unwrap());
    let total: f64 = weights.iter().sum();
    let draws = 100_000usize;
    let ball = Ball::closed(Point::index(0), 2.0);
    let mut counts = vec![0usize; n];
    for _ in 0..draws {
        let z = space.sample_ball(&ball, rng).unwrap();
        counts[z.as_index().unwrap()] += 1;
    }
    for i in 0..n {
        let p = weights[i] / total;
        let se = (p * (1.0 - p) / draws as f64).sqrt();
        let freq = counts[i] as f64 / draws as f64;
        if (freq - p).abs() > 3.0 * se {
            return Check::new(
                "sampling_statistics",
                false,
                format!("finite point {i}: frequency {freq} vs weight share {p}"),
            );
        }
    }
    // Box marginal mean within 4 standard errors, plus containment.
    let euclid = MetricSpace::<f64>::euclidean(1, Norm::Linf);
    let (c, r) = (0.25, 0.8);
    let ball = Ball::closed(Point::one_d(c), r);
    let mut sum = 0.0;
    for _ in 0..draws {
        let z = euclid.sample_ball(&ball, rng).unwrap();
        let v = z.scalar().unwrap();
        if (v - c).abs() > r + 1e-12 {
            return Check::new("sampling_statistics", false, format!("escaped the ball: {v}"));
        }
        sum += v;
    }
    let se = (r / 3f64.sqrt()) / (draws as f64).sqrt();
    let mean = sum / draws as f64;
    if (mean - c).abs() > 4.0 * se {
        return Check::new(
            "sampling_statistics",
            false,
            format!("marginal mean {mean} vs center {c} (4 se = {})", 4.0 * se),
        );
    }
    Check::new("sampling_statistics", true, format!("{draws} draws per check"))
}

/// Exactly one learner call and exactly m oracle queries per training run.
fn check_training_query_counts(rng: &mut RandomStream) -> Check {
    let space = MetricSpace::<f64>::line();
    for m in [1usize, 7, 57] {
        let pairs: Vec<(f64, Label)> = (0..m)
            .map(|_| {
                let one: bool = rng.random_range(0..2u8) == 0;
                if one {
                    (rng.random_range(-3.0..-2.0), Label::One)
                } else {
                    (rng.random_range(2.0..3.0), Label::Zero)
                }
            })
            .collect();
        let s = LabeledSample::from_scalars(pairs);
        let cfg = PerturbSmoothConfig::new(0.2, 0.5, 64, rng.random_range(0..1u64 << 40)).unwrap();
        match train_with_erm(&HypothesisFamily::Thresholds, &s, &cfg, &space) {
            Ok((_, counters)) => {
                if counters.oracle_queries != m as u64 || counters.learner_calls != 1 {
                    return Check::new(
                        "training_query_counts",
                        false,
                        format!(
                            "m={m}: {} oracle queries, {} learner calls",
                            counters.oracle_queries, counters.learner_calls
                        ),
                    );
                }
            }
            Err(e) => return Check::new("training_query_counts", false, format!("{e}")),
        }
    }
    Check::new("training_query_counts", true, "m in {1, 7, 57}".into())
}

/// Majority regions versus direct voting on random ensembles.
fn check_majority_region_oracle(rng: &mut RandomStream) -> Check {
    for i in 0..200 {
        let t: usize = rng.random_range(1..7);
        let hyps: Vec<Hypothesis<f64>> = (0..t)
            .map(|_| {
                if rng.random_range(0..2u8) == 0 {
                    Hypothesis::threshold(rng.random_range(-2.0..2.0), Orientation::LeftIsOne)
                } else {
                    let lo = rng.random_range(-2.0..1.0);
                    let len = rng.random_range(0.0..2.0);
                    Hypothesis::interval(lo, lo + len, Label::One).unwrap()
                }
            })
            .collect();
        let vote = MajorityVote::new(hyps);
        let region = vote.one_region_1d().unwrap();
        for _ in 0..50 {
            let x = rng.random_range(-3.0..3.0);
            if region.contains(x) != (vote.classify(&Point::one_d(x)) == Label::One) {
                return Check::new(
                    "majority_region_oracle",
                    false,
                    format!("ensemble {i} disagrees at x={x}"),
                );
            }
        }
    }
    Check::new("majority_region_oracle", true, "200 random ensembles".into())
}

/// Runs every oracle check and returns the aggregated report.
pub fn run_verification_suite(cfg: &Config) -> Result<VerificationReport> {
    let seed = cfg.u64_or("seed", 42)?;
    let implication_euclidean = cfg.usize_or("implication_instances", 1000)?;
    let implication_finite = cfg.usize_or("implication_finite_instances", 100)?;
    let corpus_size = cfg.usize_or("corpus_size", 50)?;
    let root = RandomStream::new(seed).substream(TAG_VERIFY);
    let checks = vec![
        check_doubling_exactness(&mut root.substream(0)),
        check_smoothing_implication_euclidean(&mut root.substream(1), implication_euclidean),
        check_smoothing_implication_finite(&mut root.substream(2), implication_finite),
        check_epsnet_against_brute_force(&mut root.substream(3), 150),
        check_compression_corpus(seed, corpus_size),
        check_smoothing_tie_rule(),
        check_non_realizable_surfaced(),
        check_sampling_statistics(&mut root.substream(4)),
        check_training_query_counts(&mut root.substream(5)),
        check_majority_region_oracle(&mut root.substream(6)),
    ];
    Ok(VerificationReport { checks })
}
