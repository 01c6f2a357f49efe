//! Property tests for the loss, sampling and solver invariants.

use proptest::prelude::*;

use tolerant_core::hypothesis::{
    erm_realizable, robust_erm, BinaryClassifier, Hypothesis, HypothesisFamily, Label,
    LabeledSample, Orientation,
};
use tolerant_core::loss::{
    adversarial_point_loss, binary_loss, empirical_adversarial_loss, EvaluationMode, Perturbation,
};
use tolerant_core::metric::{Ball, MetricSpace, Norm, Point};
use tolerant_core::random::RandomStream;

fn line() -> MetricSpace<f64> {
    MetricSpace::line()
}

fn arb_label() -> impl Strategy<Value = Label> {
    prop_oneof![Just(Label::Zero), Just(Label::One)]
}

fn arb_hypothesis() -> impl Strategy<Value = Hypothesis<f64>> {
    prop_oneof![
        (-2.0..2.0f64).prop_map(|t| Hypothesis::threshold(t, Orientation::LeftIsOne)),
        (-2.0..2.0f64, 0.0..2.5f64, arb_label())
            .prop_map(|(lo, len, inside)| Hypothesis::interval(lo, lo + len, inside).unwrap()),
    ]
}

fn arb_sample() -> impl Strategy<Value = LabeledSample<f64>> {
    proptest::collection::vec(((-3.0..3.0f64), arb_label()), 1..8)
        .prop_map(LabeledSample::from_scalars)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// Certified adversarial loss never decreases when the radius grows.
    #[test]
    fn radius_monotonicity(
        h in arb_hypothesis(),
        x in -3.0..3.0f64,
        y in arb_label(),
        r1 in 0.0..1.5f64,
        dr in 0.0..1.5f64,
    ) {
        let space = line();
        let mut rng = RandomStream::new(0);
        let small = adversarial_point_loss(
            &h, &Point::one_d(x), y, &Perturbation::closed(r1),
            EvaluationMode::Exact, &space, &mut rng,
        ).unwrap();
        let large = adversarial_point_loss(
            &h, &Point::one_d(x), y, &Perturbation::closed(r1 + dr),
            EvaluationMode::Exact, &space, &mut rng,
        ).unwrap();
        prop_assert!(small.value <= large.value);
    }

    /// Binary loss is a lower bound on any certified adversarial loss.
    #[test]
    fn sandwich(h in arb_hypothesis(), s in arb_sample(), r in 0.0..2.0f64) {
        let space = line();
        let mut rng = RandomStream::new(0);
        let binary = binary_loss(&h, &s).unwrap();
        let adv = empirical_adversarial_loss(
            &h, &s, &Perturbation::closed(r), EvaluationMode::Exact, &space, &mut rng,
        ).unwrap();
        prop_assert!(binary <= adv.value + 1e-15);
    }

    /// Sampled and gridded evaluations never exceed the certified value, and
    /// a fine grid agrees with it except within one cell of the boundary.
    #[test]
    fn mode_consistency(
        h in arb_hypothesis(),
        x in -3.0..3.0f64,
        y in arb_label(),
        r in 0.01..1.5f64,
        draws in 1usize..40,
    ) {
        let space = line();
        let mut rng = RandomStream::new(7);
        let pert = Perturbation::closed(r);
        let exact = adversarial_point_loss(
            &h, &Point::one_d(x), y, &pert, EvaluationMode::Exact, &space, &mut rng,
        ).unwrap();
        let mc = adversarial_point_loss(
            &h, &Point::one_d(x), y, &pert, EvaluationMode::MonteCarlo { draws }, &space, &mut rng,
        ).unwrap();
        prop_assert!(mc.value <= exact.value);
        prop_assert!(!mc.certified);
        let resolution = 4001usize;
        let grid = adversarial_point_loss(
            &h, &Point::one_d(x), y, &pert, EvaluationMode::Grid { resolution }, &space, &mut rng,
        ).unwrap();
        prop_assert!(grid.value <= exact.value);
        // Any disagreement must come from a decision boundary within one grid
        // cell of the ball, which the cell width bounds.
        if grid.value != exact.value {
            let cell = 2.0 * r / (resolution - 1) as f64;
            let boundaries: Vec<f64> = match &h {
                Hypothesis::Threshold { theta, .. } => vec![*theta],
                Hypothesis::Interval { lo, hi, .. } => vec![*lo, *hi],
                _ => vec![],
            };
            let near = boundaries.iter().any(|b| {
                let d = (b - x).abs();
                (d - r).abs() <= cell || d <= cell
            });
            prop_assert!(near, "grid missed a boundary farther than one cell");
        }
    }

    /// Open and closed evaluations agree unless a decision boundary sits at
    /// distance exactly r from the point.
    #[test]
    fn open_closed_agreement(
        h in arb_hypothesis(),
        x in -3.0..3.0f64,
        y in arb_label(),
        r in 0.01..1.5f64,
        pin_boundary in proptest::bool::ANY,
    ) {
        let space = line();
        let mut rng = RandomStream::new(0);
        let boundaries: Vec<f64> = match &h {
            Hypothesis::Threshold { theta, .. } => vec![*theta],
            Hypothesis::Interval { lo, hi, .. } => vec![*lo, *hi],
            _ => vec![],
        };
        // Half the cases pin the radius to a boundary distance to exercise
        // the knife edge; the rest are generic.
        let r = if pin_boundary && !boundaries.is_empty() {
            (boundaries[0] - x).abs()
        } else {
            r
        };
        prop_assume!(r > 0.0);
        let closed = adversarial_point_loss(
            &h, &Point::one_d(x), y, &Perturbation::closed(r),
            EvaluationMode::Exact, &space, &mut rng,
        ).unwrap();
        let open = adversarial_point_loss(
            &h, &Point::one_d(x), y, &Perturbation::open(r),
            EvaluationMode::Exact, &space, &mut rng,
        ).unwrap();
        prop_assert!(open.value <= closed.value);
        if open.value != closed.value {
            let touches = boundaries.iter().any(|b| (b - x).abs() == r);
            prop_assert!(touches, "open/closed disagree away from an exact boundary");
        }
    }

    /// Every consistent-ERM success is actually consistent.
    #[test]
    fn erm_output_is_consistent(s in arb_sample()) {
        for family in [HypothesisFamily::Thresholds, HypothesisFamily::Intervals] {
            if let Ok(h) = erm_realizable(&family, &s) {
                prop_assert_eq!(binary_loss(&h, &s).unwrap(), 0.0);
            }
        }
    }

    /// The minimum robust loss found by the solver never decreases with the
    /// radius.
    #[test]
    fn robust_erm_monotone_in_radius(s in arb_sample(), r in 0.05..1.0f64, dr in 0.0..1.0f64) {
        let space = line();
        let mut rng = RandomStream::new(0);
        let mut loss_at = |radius: f64| {
            let pert = Perturbation::closed(radius);
            let h = robust_erm(&HypothesisFamily::Thresholds, &s, &pert, &space).unwrap();
            empirical_adversarial_loss(&h, &s, &pert, EvaluationMode::Exact, &space, &mut rng)
                .unwrap()
                .value
        };
        prop_assert!(loss_at(r) <= loss_at(r + dr) + 1e-15);
    }

    /// Ball samples always land inside the queried ball.
    #[test]
    fn sample_containment(
        dim in 1usize..4,
        l2 in proptest::bool::ANY,
        cx in -2.0..2.0f64,
        r in 0.0..2.0f64,
        seed in 0u64..1000,
    ) {
        let norm = if l2 { Norm::L2 } else { Norm::Linf };
        let space = MetricSpace::<f64>::euclidean(dim, norm);
        let center = Point::coords(vec![cx; dim]);
        let ball = Ball::closed(center.clone(), r);
        let mut rng = RandomStream::new(seed);
        for _ in 0..20 {
            let z = space.sample_ball(&ball, &mut rng).unwrap();
            prop_assert!(space.distance(&center, &z).unwrap() <= r + 1e-12);
        }
    }

    /// The whole pipeline instantiates at f32 as well.
    #[test]
    fn f32_instantiation_works(seed in 0u64..100) {
        let space = MetricSpace::<f32>::euclidean(1, Norm::L2);
        let mut rng = RandomStream::new(seed);
        let ball = Ball::closed(Point::one_d(0.5f32), 0.25f32);
        let z = space.sample_ball(&ball, &mut rng).unwrap();
        prop_assert!(space.distance(&ball.center, &z).unwrap() <= 0.25 + 1e-6);
        let s = LabeledSample::<f32>::from_scalars(vec![
            (-1.0, Label::One),
            (1.0, Label::Zero),
        ]);
        let h = robust_erm(
            &HypothesisFamily::Thresholds,
            &s,
            &Perturbation::closed(0.25f32),
            &space,
        ).unwrap();
        let rep = empirical_adversarial_loss(
            &h, &s, &Perturbation::closed(0.25f32), EvaluationMode::Exact, &space, &mut rng,
        ).unwrap();
        prop_assert_eq!(rep.value, 0.0f32);
    }

    /// The majority-vote decision region matches pointwise voting.
    #[test]
    fn majority_region_matches_votes(
        thetas in proptest::collection::vec(-2.0..2.0f64, 1..6),
        probes in proptest::collection::vec(-3.0..3.0f64, 1..20),
    ) {
        let hyps: Vec<Hypothesis<f64>> = thetas
            .iter()
            .map(|&t| Hypothesis::threshold(t, Orientation::LeftIsOne))
            .collect();
        let vote = tolerant_core::compression::MajorityVote::new(hyps);
        let region = vote.one_region_1d().unwrap();
        for p in probes {
            prop_assert_eq!(
                region.contains(p),
                vote.classify(&Point::one_d(p)) == Label::One
            );
        }
    }
}
