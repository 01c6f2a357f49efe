//! Tolerant adversarially robust learning over metric perturbation sets.
//!
//! The library provides:
//!
//! - [`metric`]: metric spaces with measures, exact ball volumes and a
//!   measure-uniform ball-sampling oracle (Euclidean L2/Linf and finite
//!   brute-force spaces);
//! - [`hypothesis`]: low-VC hypothesis families (thresholds, intervals, axis
//!   rectangles, finite tables) with exact consistent ERM and exact robust ERM;
//! - [`loss`]: binary and adversarial losses with certifying exact, grid and
//!   Monte-Carlo evaluation modes;
//! - [`perturb_smooth`]: the tolerant perturb-and-smooth learner (perturb the
//!   training points into the reference balls, run a realizable learner once,
//!   smooth the output by a majority vote over the smoothing balls) together
//!   with its sample-size bound and the smoothing-margin diagnostics;
//! - [`compression`]: a tolerant sample compression scheme built on
//!   boost-by-majority over weak learners encoded by original sample points,
//!   with a certified decode-and-verify path and the compression
//!   generalization bound.
//!
//! All numeric code is generic over [`scalar::Real`] (`f32` or `f64`);
//! concrete `f64` aliases are exported at the crate root. Every stochastic
//! operation takes an explicit [`random::RandomStream`], and substreams are
//! derived deterministically, so whole experiments are reproducible from a
//! single seed.

// Validators use `!(x > 0)` on purpose: unlike `x <= 0` it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod compression;
pub mod hypothesis;
pub mod loss;
pub mod metric;
pub mod perturb_smooth;
pub mod piecewise;
pub mod random;
pub mod scalar;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("invalid radius: {0}")]
    InvalidRadius(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("empty support: {0}")]
    EmptySupport(String),
    #[error("sample not realizable: {0}")]
    NonRealizable(String),
    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),
    #[error("unsupported evaluation mode: {0}")]
    UnsupportedMode(String),
    #[error("weak learner failed: {0}")]
    WeakLearnerFailure(String),
    #[error("compression failed: {0}")]
    CompressionFailure(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

// Concrete f64 aliases for the main types.
pub type Point64 = metric::Point<f64>;
pub type Ball64 = metric::Ball<f64>;
pub type MetricSpace64 = metric::MetricSpace<f64>;
pub type FiniteSpace64 = metric::FiniteSpace<f64>;
pub type DoublingParameters64 = metric::DoublingParameters<f64>;
pub type LabeledSample64 = hypothesis::LabeledSample<f64>;
pub type Hypothesis64 = hypothesis::Hypothesis<f64>;
pub type MajorityVote64 = compression::MajorityVote<f64>;
pub type Perturbation64 = loss::Perturbation<f64>;
pub type LossReport64 = loss::LossReport<f64>;
pub type DataDistribution64 = loss::DataDistribution<f64>;
pub type SmoothedHypothesis64 = perturb_smooth::SmoothedClassifier<f64, Hypothesis64>;
pub type SmoothedMajority64 = perturb_smooth::SmoothedClassifier<f64, MajorityVote64>;
pub type CompressionOutput64 = compression::CompressionOutput<f64>;
