//! Experiment scenarios: the counterexample demo, the learner comparison
//! grid, the bound tables, and the single-run train/compress/decompress
//! commands.
//!
//! Every scenario derives its randomness from the master seed through fixed
//! substream tags, so identical configurations produce identical CSV files
//! (up to the wall-time column).

use std::path::Path;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};

use tolerant_core::compression::{
    compress, decompress, CompressionConfig, CompressionOutput, CompressionRun,
};
use tolerant_core::hypothesis::{
    erm_realizable, Hypothesis, HypothesisFamily, Label, LabeledSample,
};
use tolerant_core::loss::{
    adversarial_point_loss, empirical_adversarial_loss, expected_adversarial_loss,
    smoothed_empirical_loss, smoothed_expected_loss, DataDistribution, EvaluationMode,
    Perturbation,
};
use tolerant_core::metric::{Ball, DoublingParameters, FiniteSpace, MetricSpace, Norm, Point};
use tolerant_core::perturb_smooth::{
    sample_size_bound, smoothing_threshold, train_with_erm, PerturbSmoothConfig, TrainCounters,
};
use tolerant_core::random::RandomStream;
use tolerant_core::compression::{compression_sample_bound, generalization_bound, LearningSetting};

use crate::config::Config;
use crate::report::{BoundRow, ResultRow};

pub const TAG_COUNTEREXAMPLE: u64 = 1;
pub const TAG_COMPARE: u64 = 2;
pub const TAG_TPAS_RUN: u64 = 3;
pub const TAG_COMPRESS_RUN: u64 = 4;
pub const TAG_VERIFY: u64 = 5;

/// The two-atom distribution of the failure demo: label one at -1, label
/// zero at +1, equal mass.
pub fn two_point_distribution() -> DataDistribution<f64> {
    DataDistribution::DiscreteMixture(vec![
        (Point::one_d(-1.0), Label::One, 0.5),
        (Point::one_d(1.0), Label::Zero, 0.5),
    ])
}

/// Two uniform clusters: label one on a ball around `-center`, label zero
/// around `+center`.
pub fn two_ball_distribution(center: f64, width: f64) -> DataDistribution<f64> {
    DataDistribution::UniformOnBalls(vec![
        (Ball::closed(Point::one_d(-center), width), Label::One, 0.5),
        (Ball::closed(Point::one_d(center), width), Label::Zero, 0.5),
    ])
}

pub fn space_from_config(cfg: &Config) -> Result<MetricSpace<f64>> {
    let spec = cfg.str_or("space", "euclidean");
    if let Some(path) = spec.strip_prefix("finite:") {
        let fs = FiniteSpace::from_path(Path::new(path.trim()))
            .with_context(|| format!("loading finite space from {path}"))?;
        return Ok(MetricSpace::finite(fs));
    }
    match spec.as_str() {
        "euclidean" => {
            let dim = cfg.usize_or("dim", 1)?;
            let norm = match cfg.str_or("norm", "l2").as_str() {
                "l2" => Norm::L2,
                "linf" => Norm::Linf,
                other => bail!("unknown norm `{other}` (expected l2 or linf)"),
            };
            Ok(MetricSpace::euclidean(dim, norm))
        }
        other => bail!("unknown space `{other}` (expected euclidean or finite:<path>)"),
    }
}

pub fn family_from_config(cfg: &Config) -> Result<HypothesisFamily> {
    match cfg.str_or("family", "thresholds").as_str() {
        "thresholds" => Ok(HypothesisFamily::Thresholds),
        "intervals" => Ok(HypothesisFamily::Intervals),
        other => bail!("unknown family `{other}` (expected thresholds or intervals)"),
    }
}

pub fn distribution_from_config(cfg: &Config) -> Result<DataDistribution<f64>> {
    match cfg.str_or("dist", "two_point").as_str() {
        "two_point" => Ok(two_point_distribution()),
        "two_balls" => Ok(two_ball_distribution(
            cfg.f64_or("ball_center", 1.0)?,
            cfg.f64_or("ball_width", 0.25)?,
        )),
        other => bail!("unknown dist `{other}` (expected two_point or two_balls)"),
    }
}

fn load_or_sample_data(
    cfg: &Config,
    space: &MetricSpace<f64>,
    m: usize,
    rng: &mut RandomStream,
) -> Result<LabeledSample<f64>> {
    if let Some(path) = cfg.path("data") {
        let text = std::fs::read_to_string(&path)
            .with_context(|| format!("reading data {}", path.display()))?;
        return Ok(LabeledSample::from_text(&text)?);
    }
    Ok(distribution_from_config(cfg)?.sample(space, m, rng)?)
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Counterexample demo outcome (per-replicate results aggregated).
#[derive(Debug, Clone)]
pub struct CounterexampleOutcome {
    pub rows: Vec<ResultRow>,
    pub replicates: usize,
    /// Replicates where tolerant training reached certified robust loss zero
    /// at the closed actual radius.
    pub tolerant_successes: usize,
    /// Replicates where the non-tolerant perturb-only arm had certified
    /// robust loss at least one half at the open radius.
    pub perturb_only_failures: usize,
    /// Whether both arms had zero binary loss in every replicate.
    pub binary_always_zero: bool,
    /// Whether every training run made exactly m oracle queries and one
    /// learner call.
    pub query_counts_ok: bool,
}

/// Runs the two arms of the failure demo: tolerant perturb-and-smooth with
/// `r = 0.9, gamma = 0.1` against non-tolerant perturb-only at radius one,
/// both evaluated exactly against the two-point distribution.
pub fn run_counterexample(cfg: &Config) -> Result<CounterexampleOutcome> {
    let seed = cfg.u64_or("seed", 42)?;
    let replicates = cfg.usize_or("replicates", 100)?;
    if replicates == 0 {
        bail!("replicates must be positive");
    }
    let m = cfg.usize_or("m", 200)?;
    let r = cfg.f64_or("r", 0.9)?;
    let gamma = cfg.f64_or("gamma", 0.1)?;
    let vote_budget = cfg.usize_or("vote_budget", 1000)?;
    let space = MetricSpace::line();
    let dist = two_point_distribution();
    let family = HypothesisFamily::Thresholds;

    let root = RandomStream::new(seed).substream(TAG_COUNTEREXAMPLE);
    let mut rows = Vec::with_capacity(2 * replicates);
    let mut tolerant_successes = 0;
    let mut perturb_only_failures = 0;
    let mut binary_always_zero = true;
    let mut query_counts_ok = true;

    for rep in 0..replicates {
        let rep_stream = root.substream(rep as u64);
        let rep_seed = rep_stream.seed();
        let mut data_rng = rep_stream.substream(0);
        let train = dist.sample(&space, m, &mut data_rng)?;

        // Arm (a): tolerant perturb-and-smooth.
        let start = Instant::now();
        let ps_cfg =
            PerturbSmoothConfig::new(r, gamma, vote_budget, rep_stream.substream(1).seed())?;
        let (classifier, counters) = train_with_erm(&family, &train, &ps_cfg, &space)?;
        query_counts_ok &=
            counters.oracle_queries == m as u64 && counters.learner_calls == 1;
        let mut eval_rng = rep_stream.substream(2);
        let robust = smoothed_expected_loss(
            &classifier,
            &dist,
            &Perturbation::closed(r),
            EvaluationMode::Exact,
            &space,
            None,
            &mut eval_rng,
        )?;
        let binary = smoothed_expected_loss(
            &classifier,
            &dist,
            &Perturbation::closed(0.0),
            EvaluationMode::Exact,
            &space,
            None,
            &mut eval_rng,
        )?;
        if robust.value == 0.0 {
            tolerant_successes += 1;
        }
        binary_always_zero &= binary.value == 0.0;
        rows.push(ResultRow {
            scenario: "counterexample".into(),
            seed: rep_seed,
            m: m as u64,
            gamma,
            learner: "tpas".into(),
            robust_loss: Some(robust.value),
            certified: robust.certified,
            binary_loss: Some(binary.value),
            wall_time_ms: ms(start),
            k: None,
            t_rounds: None,
            train_error: None,
        });

        // Arm (b): non-tolerant perturb-only (radius-one draws, plain ERM, no
        // smoothing), judged at the open unit radius.
        let start = Instant::now();
        let mut perturb_rng = rep_stream.substream(3);
        let perturbed: Vec<(Point<f64>, Label)> = train
            .iter()
            .map(|(x, y)| {
                let z = space.sample_ball(&Ball::closed(x.clone(), 1.0), &mut perturb_rng)?;
                Ok((z, *y))
            })
            .collect::<tolerant_core::Result<_>>()?;
        let h = erm_realizable(&family, &LabeledSample::new(perturbed))?;
        let robust_b = expected_adversarial_loss(
            &h,
            &dist,
            &Perturbation::open(1.0),
            EvaluationMode::Exact,
            &space,
            None,
            &mut eval_rng,
        )?;
        let binary_b = expected_adversarial_loss(
            &h,
            &dist,
            &Perturbation::closed(0.0),
            EvaluationMode::Exact,
            &space,
            None,
            &mut eval_rng,
        )?;
        if robust_b.value >= 0.5 {
            perturb_only_failures += 1;
        }
        binary_always_zero &= binary_b.value == 0.0;
        rows.push(ResultRow {
            scenario: "counterexample".into(),
            seed: rep_seed,
            m: m as u64,
            gamma: 0.0,
            learner: "perturb_only".into(),
            robust_loss: Some(robust_b.value),
            certified: robust_b.certified,
            binary_loss: Some(binary_b.value),
            wall_time_ms: ms(start),
            k: None,
            t_rounds: None,
            train_error: None,
        });
    }

    Ok(CounterexampleOutcome {
        rows,
        replicates,
        tolerant_successes,
        perturb_only_failures,
        binary_always_zero,
        query_counts_ok,
    })
}

/// One-sided trend check between the smallest and largest sample size of a
/// comparison cell.
#[derive(Debug, Clone)]
pub struct TrendCheck {
    pub learner: String,
    pub gamma: f64,
    pub mean_first: f64,
    pub mean_last: f64,
    pub z: f64,
    pub passed: bool,
}

#[derive(Debug, Clone)]
pub struct CompareOutcome {
    pub rows: Vec<ResultRow>,
    pub trends: Vec<TrendCheck>,
}

fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Compares tolerant perturb-and-smooth, the compression learner and plain
/// robust ERM over an `m x gamma` grid, reporting certified robust test
/// losses and the per-learner sample-size trend.
pub fn run_compare(cfg: &Config) -> Result<CompareOutcome> {
    let seed = cfg.u64_or("seed", 42)?;
    let replicates = cfg.usize_or("replicates", 20)?;
    let gammas = cfg.f64_list_or("gammas", &[0.5, 1.0])?;
    let m_values = cfg.usize_list_or("m_values", &[4, 16, 64])?;
    let r = cfg.f64_or("r", 0.3)?;
    let test_size = cfg.usize_or("test_size", 400)?;
    let vote_budget = cfg.usize_or("vote_budget", 1000)?;
    if m_values.is_empty() || gammas.is_empty() {
        bail!("m_values and gammas must be nonempty");
    }
    let space = MetricSpace::line();
    let family = HypothesisFamily::Thresholds;
    let dist = two_ball_distribution(
        cfg.f64_or("ball_center", 1.0)?,
        cfg.f64_or("ball_width", 0.25)?,
    );
    let params = DoublingParameters::euclidean(1);
    let u_pert = Perturbation::closed(r);
    let root = RandomStream::new(seed).substream(TAG_COMPARE);

    let mut rows: Vec<ResultRow> = Vec::new();
    for (gi, &gamma) in gammas.iter().enumerate() {
        for (mi, &m) in m_values.iter().enumerate() {
            let cell = (gi * m_values.len() + mi) as u64;
            for rep in 0..replicates {
                let stream = root.substream(cell).substream(rep as u64);
                let rep_seed = stream.seed();
                let mut data_rng = stream.substream(0);
                let train = dist.sample(&space, m, &mut data_rng)?;
                let test = dist.sample(&space, test_size, &mut data_rng)?;
                let mut eval_rng = stream.substream(1);

                // Tolerant perturb-and-smooth. Cells that violate a learner
                // precondition (for example gamma = 0) become failed rows
                // rather than aborting the grid.
                let start = Instant::now();
                let failed_row = |learner: &str, start: Instant| ResultRow {
                    scenario: "compare".into(),
                    seed: rep_seed,
                    m: m as u64,
                    gamma,
                    learner: learner.into(),
                    robust_loss: None,
                    certified: false,
                    binary_loss: None,
                    wall_time_ms: ms(start),
                    k: None,
                    t_rounds: None,
                    train_error: None,
                };
                let trained = PerturbSmoothConfig::new(
                    r, gamma, vote_budget, stream.substream(2).seed(),
                )
                .and_then(|ps_cfg| train_with_erm(&family, &train, &ps_cfg, &space));
                let row = match trained {
                    Ok((classifier, _)) => {
                        let robust = smoothed_empirical_loss(
                            &classifier, &test, &u_pert, EvaluationMode::Exact, &space,
                            &mut eval_rng,
                        )?;
                        let binary = smoothed_empirical_loss(
                            &classifier, &test, &Perturbation::closed(0.0),
                            EvaluationMode::Exact, &space, &mut eval_rng,
                        )?;
                        ResultRow {
                            scenario: "compare".into(),
                            seed: rep_seed,
                            m: m as u64,
                            gamma,
                            learner: "tpas".into(),
                            robust_loss: Some(robust.value),
                            certified: robust.certified,
                            binary_loss: Some(binary.value),
                            wall_time_ms: ms(start),
                            k: None,
                            t_rounds: None,
                            train_error: None,
                        }
                    }
                    Err(
                        tolerant_core::Error::NonRealizable(_)
                        | tolerant_core::Error::InvalidArgument(_),
                    ) => failed_row("tpas", start),
                    Err(e) => return Err(e.into()),
                };
                rows.push(row);

                // Compression learner.
                let start = Instant::now();
                let compressed = smoothing_threshold(gamma, &params)
                    .and_then(|beta| {
                        CompressionConfig::new(r, gamma, beta, stream.substream(3).seed())
                    })
                    .and_then(|mut comp_cfg| {
                        comp_cfg.pipeline_retries =
                            cfg.usize_or("pipeline_retries", 5).unwrap_or(5);
                        comp_cfg.weak_retries = cfg.usize_or("weak_retries", 20).unwrap_or(20);
                        compress(&train, &family, &space, &comp_cfg)
                    });
                let row = match compressed {
                    Ok(run) => {
                        let decoded = decompress(&run.output, &family, &space)?;
                        let robust = smoothed_empirical_loss(
                            &decoded, &test, &u_pert, EvaluationMode::Exact, &space,
                            &mut eval_rng,
                        )?;
                        let binary = smoothed_empirical_loss(
                            &decoded, &test, &Perturbation::closed(0.0),
                            EvaluationMode::Exact, &space, &mut eval_rng,
                        )?;
                        ResultRow {
                            scenario: "compare".into(),
                            seed: rep_seed,
                            m: m as u64,
                            gamma,
                            learner: "compression".into(),
                            robust_loss: Some(robust.value),
                            certified: robust.certified,
                            binary_loss: Some(binary.value),
                            wall_time_ms: ms(start),
                            k: Some(run.output.total_points() as u64),
                            t_rounds: Some(run.output.meta.rounds as u64),
                            train_error: Some(run.final_error),
                        }
                    }
                    Err(
                        tolerant_core::Error::NonRealizable(_)
                        | tolerant_core::Error::CompressionFailure(_)
                        | tolerant_core::Error::WeakLearnerFailure(_)
                        | tolerant_core::Error::InvalidArgument(_),
                    ) => failed_row("compression", start),
                    Err(e) => return Err(e.into()),
                };
                rows.push(row);

                // Plain robust ERM at the actual radius.
                let start = Instant::now();
                let h = tolerant_core::hypothesis::robust_erm(&family, &train, &u_pert, &space)?;
                let robust = empirical_adversarial_loss(
                    &h, &test, &u_pert, EvaluationMode::Exact, &space, &mut eval_rng,
                )?;
                let binary = empirical_adversarial_loss(
                    &h, &test, &Perturbation::closed(0.0), EvaluationMode::Exact, &space,
                    &mut eval_rng,
                )?;
                rows.push(ResultRow {
                    scenario: "compare".into(),
                    seed: rep_seed,
                    m: m as u64,
                    gamma,
                    learner: "robust_erm".into(),
                    robust_loss: Some(robust.value),
                    certified: robust.certified,
                    binary_loss: Some(binary.value),
                    wall_time_ms: ms(start),
                    k: None,
                    t_rounds: None,
                    train_error: None,
                });
            }
        }
    }

    // Trend: certified robust loss must not increase from the smallest to the
    // largest sample size (one-sided Welch comparison at the 5% level).
    let m_first = *m_values.first().unwrap() as u64;
    let m_last = *m_values.last().unwrap() as u64;
    let mut trends = Vec::new();
    for &gamma in &gammas {
        for learner in ["tpas", "compression", "robust_erm"] {
            let losses_at = |m: u64| -> Vec<f64> {
                rows.iter()
                    .filter(|row| {
                        row.learner == learner && row.gamma == gamma && row.m == m
                    })
                    .filter_map(|row| row.robust_loss)
                    .collect()
            };
            let first = losses_at(m_first);
            let last = losses_at(m_last);
            if first.is_empty() || last.is_empty() {
                trends.push(TrendCheck {
                    learner: learner.into(),
                    gamma,
                    mean_first: f64::NAN,
                    mean_last: f64::NAN,
                    z: f64::NAN,
                    passed: false,
                });
                continue;
            }
            let (mean_first, se_first) = mean_and_se(&first);
            let (mean_last, se_last) = mean_and_se(&last);
            let denom = (se_first * se_first + se_last * se_last).sqrt();
            let z = if denom > 0.0 {
                (mean_last - mean_first) / denom
            } else {
                0.0
            };
            let passed = mean_last <= mean_first || z <= 1.645;
            trends.push(TrendCheck {
                learner: learner.into(),
                gamma,
                mean_first,
                mean_last,
                z,
                passed,
            });
        }
    }

    Ok(CompareOutcome { rows, trends })
}

/// Evaluates the sample-size scaling laws and the compression generalization
/// bound over configuration grids.
pub fn run_bounds(cfg: &Config) -> Result<Vec<BoundRow>> {
    let zeta_ds = cfg.f64_list_or("zeta_d_values", &[0.0, 1.0, 2.0, 5.0])?;
    let gammas = cfg.f64_list_or("gamma_values", &[0.1, 0.5, 1.0])?;
    let epsilon = cfg.f64_or("epsilon", 0.1)?;
    let delta = cfg.f64_or("delta", 0.05)?;
    let vc = cfg.usize_or("vc", 1)?;

    let mut rows = Vec::new();
    for &zd in &zeta_ds {
        let params = DoublingParameters::with_zeta(zd, 1.0);
        for &gamma in &gammas {
            let tpas_factor = (1.0 + 1.0 / gamma).powf(zd);
            let compression_factor = zd * (1.0 + 1.0 / gamma).ln();
            let tpas_bound = sample_size_bound(epsilon, delta, gamma, &params, vc)?;
            let comp_real = compression_sample_bound(
                epsilon, delta, gamma, &params, vc, LearningSetting::Realizable,
            )?;
            let comp_agn = compression_sample_bound(
                epsilon, delta, gamma, &params, vc, LearningSetting::Agnostic,
            )?;
            let base = |kind: &str, value: f64| BoundRow {
                kind: kind.into(),
                zeta_d: Some(zd),
                gamma: Some(gamma),
                epsilon: Some(epsilon),
                delta: Some(delta),
                vc: Some(vc as u64),
                m: None,
                k: None,
                value,
            };
            rows.push(base("tpas_factor", tpas_factor));
            rows.push(base("compression_factor", compression_factor));
            rows.push(base("tpas_bound", tpas_bound));
            rows.push(base("compression_realizable", comp_real));
            rows.push(base("compression_agnostic", comp_agn));
        }
    }
    for &m in &[100usize, 1000] {
        for &k in &[0usize, 10, 50] {
            if k >= m {
                continue;
            }
            rows.push(BoundRow {
                kind: "generalization".into(),
                zeta_d: None,
                gamma: None,
                epsilon: None,
                delta: Some(0.1),
                vc: None,
                m: Some(m as u64),
                k: Some(k as u64),
                value: generalization_bound(m, k, 0.1)?,
            });
        }
    }
    Ok(rows)
}

/// Outcome of a single training run for the `tpas-run` command.
pub struct TpasRunOutcome {
    pub classifier_text: String,
    pub train_robust_loss: f64,
    pub train_binary_loss: f64,
    pub certified: bool,
    pub counters: TrainCounters,
}

pub fn run_tpas(cfg: &Config) -> Result<TpasRunOutcome> {
    let seed = cfg.u64_or("seed", 42)?;
    let m = cfg.usize_or("m", 200)?;
    let r = cfg.f64_or("r", 0.9)?;
    let gamma = cfg.f64_or("gamma", 0.1)?;
    let vote_budget = cfg.usize_or("vote_budget", 1000)?;
    let space = space_from_config(cfg)?;
    let family = family_from_config(cfg)?;
    let root = RandomStream::new(seed).substream(TAG_TPAS_RUN);
    let mut data_rng = root.substream(0);
    let train = load_or_sample_data(cfg, &space, m, &mut data_rng)?;
    let ps_cfg = PerturbSmoothConfig::new(r, gamma, vote_budget, root.substream(1).seed())?;
    let (classifier, counters) = train_with_erm(&family, &train, &ps_cfg, &space)?;
    let mut eval_rng = root.substream(2);
    let robust = smoothed_empirical_loss(
        &classifier,
        &train,
        &Perturbation::closed(r),
        EvaluationMode::Exact,
        &space,
        &mut eval_rng,
    )?;
    let binary = smoothed_empirical_loss(
        &classifier,
        &train,
        &Perturbation::closed(0.0),
        EvaluationMode::Exact,
        &space,
        &mut eval_rng,
    )?;
    Ok(TpasRunOutcome {
        classifier_text: classifier.to_text(),
        train_robust_loss: robust.value,
        train_binary_loss: binary.value,
        certified: robust.certified,
        counters,
    })
}

/// Outcome of a `compress-run` invocation.
pub struct CompressRunOutcome {
    pub run: CompressionRun<f64>,
    pub sample_text: String,
    /// The theory-faithful approximation size `4 m^2 C vc(G) / beta^2`,
    /// reported for contrast with the materialized size.
    pub theoretical_approx_size: f64,
}

pub fn run_compress(cfg: &Config) -> Result<CompressRunOutcome> {
    let seed = cfg.u64_or("seed", 42)?;
    let m = cfg.usize_or("m", 20)?;
    let r = cfg.f64_or("r", 0.3)?;
    let gamma = cfg.f64_or("gamma", 0.5)?;
    let space = space_from_config(cfg)?;
    let family = family_from_config(cfg)?;
    let root = RandomStream::new(seed).substream(TAG_COMPRESS_RUN);
    let mut data_rng = root.substream(0);
    let mut local = cfg.clone();
    if local.get_str("dist").is_none() {
        local.set("dist", "two_balls".into());
    }
    let train = load_or_sample_data(&local, &space, m, &mut data_rng)?;
    let beta = match cfg.str_or("beta", "auto").as_str() {
        "auto" => smoothing_threshold(gamma, &DoublingParameters::euclidean(1))?,
        v => v.parse().with_context(|| format!("bad beta `{v}`"))?,
    };
    let mut comp_cfg = CompressionConfig::new(r, gamma, beta, root.substream(1).seed())?;
    comp_cfg.pipeline_retries = cfg.usize_or("pipeline_retries", 5)?;
    comp_cfg.weak_retries = cfg.usize_or("weak_retries", 20)?;
    if let Some(n) = cfg.get_str("net_size") {
        comp_cfg.net_size = Some(n.parse().context("bad net_size")?);
    }
    if let Some(a) = cfg.get_str("approx_size") {
        comp_cfg.approx_size = Some(a.parse().context("bad approx_size")?);
    }
    let run = compress(&train, &family, &space, &comp_cfg)?;
    // Majority-vote VC bound with unit constants: T * vc * log2(T * vc).
    let vc = family.vc_dimension();
    let t = comp_cfg.rounds_for(train.len());
    let vc_majority = ((t * vc) as f64 * ((t * vc) as f64).log2().max(1.0)).ceil() as usize;
    let theoretical_approx_size = tolerant_core::compression::theoretical_approximation_size(
        train.len(),
        2.0,
        vc_majority,
        beta,
    );
    Ok(CompressRunOutcome { run, sample_text: train.to_text(), theoretical_approx_size })
}

/// Outcome of a `decompress` invocation.
pub struct DecompressOutcome {
    pub hypothesis_lines: Vec<String>,
    pub meta_line: String,
    pub data_robust_loss: Option<(f64, bool)>,
}

pub fn run_decompress(
    cfg: &Config,
    blocks_path: &Path,
    data_path: Option<&Path>,
) -> Result<DecompressOutcome> {
    let space = space_from_config(cfg)?;
    let family = family_from_config(cfg)?;
    let output = CompressionOutput::<f64>::read_file(blocks_path)
        .map_err(|e| anyhow!("reading blocks {}: {e}", blocks_path.display()))?;
    let decoded = decompress(&output, &family, &space)?;
    let hypothesis_lines = decoded.base.hypotheses.iter().map(|h| h.to_string()).collect();
    let meta_line = format!(
        "smooth {} {} {}",
        decoded.smoothing.radius, decoded.vote_budget, decoded.seed
    );
    let data_robust_loss = match data_path {
        None => None,
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading data {}", path.display()))?;
            let sample = LabeledSample::<f64>::from_text(&text)?;
            let mut rng = RandomStream::new(0);
            let rep = smoothed_empirical_loss(
                &decoded,
                &sample,
                &Perturbation::closed(output.meta.r),
                EvaluationMode::Exact,
                &space,
                &mut rng,
            )?;
            Some((rep.value, rep.certified))
        }
    };
    Ok(DecompressOutcome { hypothesis_lines, meta_line, data_robust_loss })
}

/// Exact certified point loss guard used in a few sanity paths.
pub fn certified_point_loss(
    h: &Hypothesis<f64>,
    x: f64,
    y: Label,
    pert: &Perturbation<f64>,
    space: &MetricSpace<f64>,
) -> Result<f64> {
    let mut rng = RandomStream::new(0);
    let rep = adversarial_point_loss(
        h,
        &Point::one_d(x),
        y,
        pert,
        EvaluationMode::Exact,
        space,
        &mut rng,
    )?;
    Ok(rep.value)
}
