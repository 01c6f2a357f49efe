//! Metric spaces equipped with a measure and a ball-sampling oracle.
//!
//! Two kinds of space are supported: Euclidean `R^d` under the L2 or Linf
//! norm with the translation-invariant volume, and finite spaces given by an
//! explicit distance matrix with strictly positive per-point weights. Finite
//! spaces double as brute-force oracles: every ball quantity on them is
//! computed by exhaustive enumeration.

use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;

use crate::random::RandomStream;
use crate::scalar::Real;
use crate::{Error, Result};

/// Norm for Euclidean spaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    L2,
    Linf,
}

/// Ball boundary semantics. `Closed` is the default everywhere; `Open` exists
/// for strict-inequality evaluations and finite-space membership tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Boundary {
    #[default]
    Closed,
    Open,
}

/// A domain element: coordinates in a Euclidean space, or an index into a
/// finite space.
#[derive(Debug, Clone, PartialEq)]
pub enum Point<R> {
    Coords(Vec<R>),
    Index(usize),
}

impl<R: Real> Point<R> {
    pub fn coords(coords: Vec<R>) -> Self {
        Point::Coords(coords)
    }

    pub fn one_d(x: R) -> Self {
        Point::Coords(vec![x])
    }

    pub fn index(i: usize) -> Self {
        Point::Index(i)
    }

    pub fn as_coords(&self) -> Option<&[R]> {
        match self {
            Point::Coords(c) => Some(c),
            Point::Index(_) => None,
        }
    }

    pub fn as_index(&self) -> Option<usize> {
        match self {
            Point::Coords(_) => None,
            Point::Index(i) => Some(*i),
        }
    }

    /// The single coordinate of a 1-D point.
    pub fn scalar(&self) -> Option<R> {
        match self {
            Point::Coords(c) if c.len() == 1 => Some(c[0]),
            _ => None,
        }
    }
}

/// A metric ball: center, radius and boundary semantics.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball<R> {
    pub center: Point<R>,
    pub radius: R,
    pub boundary: Boundary,
}

impl<R: Real> Ball<R> {
    pub fn closed(center: Point<R>, radius: R) -> Self {
        Ball { center, radius, boundary: Boundary::Closed }
    }

    pub fn open(center: Point<R>, radius: R) -> Self {
        Ball { center, radius, boundary: Boundary::Open }
    }
}

/// A finite metric space: a symmetric distance matrix with zero diagonal that
/// satisfies the triangle inequality, plus a strictly positive weight per
/// point acting as the measure.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteSpace<R> {
    weights: Vec<R>,
    distances: Vec<Vec<R>>,
}

impl<R: Real> FiniteSpace<R> {
    pub fn new(weights: Vec<R>, distances: Vec<Vec<R>>) -> Result<Self> {
        let n = weights.len();
        if n == 0 {
            return Err(Error::InvalidArgument("finite space needs at least one point".into()));
        }
        if distances.len() != n || distances.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidArgument(format!(
                "distance matrix must be {n}x{n}"
            )));
        }
        if weights.iter().any(|w| !(*w > R::zero()) || !w.is_finite()) {
            return Err(Error::InvalidArgument("weights must be strictly positive".into()));
        }
        for (i, row) in distances.iter().enumerate() {
            if row[i] != R::zero() {
                return Err(Error::InvalidArgument(format!("nonzero diagonal at {i}")));
            }
            for (j, &d) in row.iter().enumerate() {
                if !(d >= R::zero()) || !d.is_finite() {
                    return Err(Error::InvalidArgument(format!(
                        "distance [{i}][{j}] must be finite and nonnegative"
                    )));
                }
                if d != distances[j][i] {
                    return Err(Error::InvalidArgument(format!(
                        "distance matrix not symmetric at [{i}][{j}]"
                    )));
                }
                if i != j && d == R::zero() {
                    return Err(Error::InvalidArgument(format!(
                        "distinct points {i},{j} at distance zero"
                    )));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if distances[i][j] > distances[i][k] + distances[k][j] {
                        return Err(Error::InvalidArgument(format!(
                            "triangle inequality violated on ({i},{j},{k})"
                        )));
                    }
                }
            }
        }
        Ok(FiniteSpace { weights, distances })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weight(&self, i: usize) -> R {
        self.weights[i]
    }

    pub fn distance(&self, i: usize, j: usize) -> R {
        self.distances[i][j]
    }

    /// Parses the text form: first line `n`, then `n` weight values, then the
    /// `n x n` distance matrix, all whitespace-separated.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut tokens = text.split_whitespace();
        let n: usize = tokens
            .next()
            .ok_or_else(|| Error::Parse("missing point count".into()))?
            .parse()
            .map_err(|_| Error::Parse("point count must be an integer".into()))?;
        let mut take = |what: &str| -> Result<R> {
            let tok = tokens
                .next()
                .ok_or_else(|| Error::Parse(format!("missing {what}")))?;
            tok.parse::<R>()
                .map_err(|_| Error::Parse(format!("bad {what}: {tok}")))
        };
        let weights: Vec<R> = (0..n).map(|i| take(&format!("weight {i}"))).collect::<Result<_>>()?;
        let mut distances = Vec::with_capacity(n);
        for i in 0..n {
            let row: Vec<R> =
                (0..n).map(|j| take(&format!("distance [{i}][{j}]"))).collect::<Result<_>>()?;
            distances.push(row);
        }
        if tokens.next().is_some() {
            return Err(Error::Parse("trailing tokens after distance matrix".into()));
        }
        FiniteSpace::new(weights, distances)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_text(&text)
    }

    /// Writes the text form accepted by [`FiniteSpace::from_text`], one weight
    /// per line.
    pub fn to_text(&self) -> String {
        let n = self.len();
        let mut out = String::new();
        let _ = writeln!(out, "{n}");
        for w in &self.weights {
            let _ = writeln!(out, "{w}");
        }
        for row in &self.distances {
            let line: Vec<String> = row.iter().map(|d| d.to_string()).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }
}

/// A metric space with a measure and a sampling oracle.
#[derive(Debug, Clone, PartialEq)]
pub enum MetricSpace<R> {
    Euclidean { dim: usize, norm: Norm },
    Finite(FiniteSpace<R>),
}

impl<R: Real> MetricSpace<R> {
    pub fn euclidean(dim: usize, norm: Norm) -> Self {
        assert!(dim > 0, "Euclidean space needs dim >= 1");
        MetricSpace::Euclidean { dim, norm }
    }

    /// The real line. 1-D L2 and Linf coincide.
    pub fn line() -> Self {
        MetricSpace::Euclidean { dim: 1, norm: Norm::L2 }
    }

    pub fn finite(space: FiniteSpace<R>) -> Self {
        MetricSpace::Finite(space)
    }

    pub fn is_finite_space(&self) -> bool {
        matches!(self, MetricSpace::Finite(_))
    }

    pub fn as_finite(&self) -> Option<&FiniteSpace<R>> {
        match self {
            MetricSpace::Finite(f) => Some(f),
            _ => None,
        }
    }

    pub fn dim(&self) -> Option<usize> {
        match self {
            MetricSpace::Euclidean { dim, .. } => Some(*dim),
            MetricSpace::Finite(_) => None,
        }
    }

    fn check_point(&self, p: &Point<R>) -> Result<()> {
        match (self, p) {
            (MetricSpace::Euclidean { dim, .. }, Point::Coords(c)) => {
                if c.len() == *dim {
                    Ok(())
                } else {
                    Err(Error::InvalidPoint(format!(
                        "expected {dim} coordinates, got {}",
                        c.len()
                    )))
                }
            }
            (MetricSpace::Finite(f), Point::Index(i)) => {
                if *i < f.len() {
                    Ok(())
                } else {
                    Err(Error::InvalidPoint(format!(
                        "index {i} out of range for {}-point space",
                        f.len()
                    )))
                }
            }
            (MetricSpace::Euclidean { .. }, Point::Index(_)) => {
                Err(Error::InvalidPoint("index point in a Euclidean space".into()))
            }
            (MetricSpace::Finite(_), Point::Coords(_)) => {
                Err(Error::InvalidPoint("coordinate point in a finite space".into()))
            }
        }
    }

    /// Metric distance between two points of this space.
    pub fn distance(&self, p: &Point<R>, q: &Point<R>) -> Result<R> {
        self.check_point(p)?;
        self.check_point(q)?;
        match self {
            MetricSpace::Euclidean { norm, .. } => {
                let (a, b) = (p.as_coords().unwrap(), q.as_coords().unwrap());
                Ok(match norm {
                    Norm::L2 => a
                        .iter()
                        .zip(b)
                        .map(|(x, y)| (*x - *y) * (*x - *y))
                        .fold(R::zero(), |s, v| s + v)
                        .sqrt(),
                    Norm::Linf => a
                        .iter()
                        .zip(b)
                        .map(|(x, y)| (*x - *y).abs())
                        .fold(R::zero(), R::max),
                })
            }
            MetricSpace::Finite(f) => {
                Ok(f.distance(p.as_index().unwrap(), q.as_index().unwrap()))
            }
        }
    }

    /// Whether `p` lies in the ball, respecting boundary semantics.
    pub fn ball_contains(&self, ball: &Ball<R>, p: &Point<R>) -> Result<bool> {
        let d = self.distance(&ball.center, p)?;
        Ok(match ball.boundary {
            Boundary::Closed => d <= ball.radius,
            Boundary::Open => d < ball.radius,
        })
    }

    /// Indices of the finite-space points inside a ball.
    pub fn finite_ball_members(&self, ball: &Ball<R>) -> Result<Vec<usize>> {
        let f = self
            .as_finite()
            .ok_or_else(|| Error::InvalidArgument("not a finite space".into()))?;
        self.check_point(&ball.center)?;
        let c = ball.center.as_index().unwrap();
        Ok((0..f.len())
            .filter(|&i| match ball.boundary {
                Boundary::Closed => f.distance(c, i) <= ball.radius,
                Boundary::Open => f.distance(c, i) < ball.radius,
            })
            .collect())
    }

    /// Measure of a ball: `(2r)^dim` under Linf, the unit-ball volume times
    /// `r^dim` under L2, and the total weight of the member points in a
    /// finite space. Open and closed Euclidean balls have the same volume.
    pub fn measure_ball(&self, ball: &Ball<R>) -> Result<R> {
        if ball.radius < R::zero() {
            return Err(Error::InvalidRadius(format!("negative radius {}", ball.radius)));
        }
        self.check_point(&ball.center)?;
        match self {
            MetricSpace::Euclidean { dim, norm } => Ok(match norm {
                Norm::Linf => (R::of(2.0) * ball.radius).powi(*dim as i32),
                Norm::L2 => unit_ball_volume::<R>(*dim) * ball.radius.powi(*dim as i32),
            }),
            MetricSpace::Finite(f) => {
                let members = self.finite_ball_members(ball)?;
                Ok(members.iter().fold(R::zero(), |s, &i| s + f.weight(i)))
            }
        }
    }

    /// Draws a point from the measure-uniform distribution over the ball.
    ///
    /// Closed balls of radius zero return the center. Euclidean samplers
    /// ignore the boundary flag (open and closed balls differ by a null set);
    /// finite spaces respect it and report an empty support as an error.
    pub fn sample_ball(&self, ball: &Ball<R>, rng: &mut RandomStream) -> Result<Point<R>> {
        if ball.radius < R::zero() {
            return Err(Error::InvalidRadius(format!("negative radius {}", ball.radius)));
        }
        self.check_point(&ball.center)?;
        match self {
            MetricSpace::Euclidean { dim, norm } => {
                if ball.radius == R::zero() {
                    return Ok(ball.center.clone());
                }
                let c = ball.center.as_coords().unwrap();
                let coords = match norm {
                    Norm::Linf => c
                        .iter()
                        .map(|&ci| rng.random_range((ci - ball.radius)..(ci + ball.radius)))
                        .collect(),
                    Norm::L2 => {
                        // Direction from normalized Gaussians, radius scaled by
                        // U^(1/dim): exactly uniform on the ball.
                        let mut dir: Vec<R>;
                        let mut norm_sq;
                        loop {
                            dir = (0..*dim).map(|_| R::standard_normal(rng)).collect();
                            norm_sq = dir.iter().fold(R::zero(), |s, &x| s + x * x);
                            if norm_sq > R::zero() {
                                break;
                            }
                        }
                        let len = norm_sq.sqrt();
                        let u: R = rng.random_range(R::zero()..R::one());
                        let scale = ball.radius * u.powf(R::one() / R::of_usize(*dim));
                        c.iter().zip(&dir).map(|(&ci, &di)| ci + di / len * scale).collect()
                    }
                };
                Ok(Point::Coords(coords))
            }
            MetricSpace::Finite(f) => {
                let members = self.finite_ball_members(ball)?;
                if members.is_empty() {
                    return Err(Error::EmptySupport(format!(
                        "no points within radius {} of index {:?}",
                        ball.radius, ball.center
                    )));
                }
                let weights: Vec<R> = members.iter().map(|&i| f.weight(i)).collect();
                let dist = rand::distr::weighted::WeightedIndex::new(&weights)
                    .map_err(|e| Error::InvalidArgument(format!("bad weights: {e}")))?;
                let pick = rng.sample(dist);
                Ok(Point::Index(members[pick]))
            }
        }
    }
}

/// Volume of the L2 unit ball in `dim` dimensions, via the exact recurrence
/// `V_0 = 1`, `V_1 = 2`, `V_d = V_{d-2} * 2*pi/d`.
pub fn unit_ball_volume<R: Real>(dim: usize) -> R {
    let two_pi = R::of(2.0 * std::f64::consts::PI);
    match dim {
        0 => R::one(),
        1 => R::of(2.0),
        d => unit_ball_volume::<R>(d - 2) * two_pi / R::of_usize(d),
    }
}

/// Growth parameters of a measure: `mu(B_{alpha r}) <= (c1*alpha)^(c2*d) * mu(B_r)`,
/// simplifying to `alpha^(zeta*d)` once `alpha >= alpha0`.
#[derive(Debug, Clone, PartialEq)]
pub struct DoublingParameters<R> {
    /// Doubling dimension.
    pub d: R,
    /// Exponent coefficient of the simplified bound.
    pub zeta: R,
    pub c1: R,
    pub c2: R,
    /// Loose lower bound on the growth factor, below which the simplified
    /// form is not valid.
    pub alpha0: Option<R>,
    /// Optional loose upper bound on the tolerance parameter, recorded for
    /// reporting only.
    pub gamma_max: Option<R>,
}

/// Which form of the growth bound to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundForm {
    /// `alpha^(zeta*d)`, valid for `alpha >= alpha0`.
    Simplified,
    /// `(c1*alpha)^(c2*d)`, valid for every `alpha > 1`.
    General,
}

impl<R: Real> DoublingParameters<R> {
    /// Euclidean volume grows exactly like `alpha^dim`: `c1 = c2 = zeta = 1`
    /// and the simplified form holds for every `alpha > 1`.
    pub fn euclidean(dim: usize) -> Self {
        DoublingParameters {
            d: R::of_usize(dim),
            zeta: R::one(),
            c1: R::one(),
            c2: R::one(),
            alpha0: Some(R::one()),
            gamma_max: None,
        }
    }

    /// Builds parameters from the raw constants, deriving
    /// `zeta = c2 * (1 + log_{alpha0}(c1))`.
    pub fn from_constants(d: R, c1: R, c2: R, alpha0: R) -> Result<Self> {
        if !(c1 >= R::one()) {
            return Err(Error::InvalidArgument("c1 must be >= 1".into()));
        }
        if !(c2 > R::zero()) {
            return Err(Error::InvalidArgument("c2 must be > 0".into()));
        }
        if !(d >= R::zero()) {
            return Err(Error::InvalidArgument("d must be >= 0".into()));
        }
        if c1 > R::one() && !(alpha0 > R::one()) {
            return Err(Error::InvalidArgument("alpha0 must be > 1 when c1 > 1".into()));
        }
        let zeta = if c1 == R::one() {
            c2
        } else {
            c2 * (R::one() + c1.ln() / alpha0.ln())
        };
        Ok(DoublingParameters { d, zeta, c1, c2, alpha0: Some(alpha0), gamma_max: None })
    }

    /// Parameters with an explicit `zeta`.
    pub fn with_zeta(d: R, zeta: R) -> Self {
        DoublingParameters { d, zeta, c1: R::one(), c2: R::one(), alpha0: None, gamma_max: None }
    }

    /// The exponent `zeta * d` of the simplified bound.
    pub fn zeta_d(&self) -> R {
        self.zeta * self.d
    }

    /// Upper bound on the measure ratio `mu(B_{alpha r}) / mu(B_r)`.
    pub fn ratio_bound(&self, alpha: R, form: BoundForm) -> Result<R> {
        if !(alpha > R::one()) {
            return Err(Error::InvalidArgument(format!(
                "growth factor alpha must exceed 1, got {alpha}"
            )));
        }
        match form {
            BoundForm::Simplified => {
                if let Some(a0) = self.alpha0 {
                    if alpha < a0 {
                        return Err(Error::InvalidArgument(format!(
                            "simplified bound needs alpha >= {a0}, got {alpha}"
                        )));
                    }
                }
                Ok(alpha.powf(self.zeta_d()))
            }
            BoundForm::General => Ok((self.c1 * alpha).powf(self.c2 * self.d)),
        }
    }
}

/// Counting wrapper around a space's ball sampler. Training-time query
/// accounting goes through this type.
#[derive(Debug)]
pub struct SamplingOracle<'a, R> {
    space: &'a MetricSpace<R>,
    queries: u64,
}

impl<'a, R: Real> SamplingOracle<'a, R> {
    pub fn new(space: &'a MetricSpace<R>) -> Self {
        SamplingOracle { space, queries: 0 }
    }

    pub fn space(&self) -> &MetricSpace<R> {
        self.space
    }

    pub fn draw(&mut self, ball: &Ball<R>, rng: &mut RandomStream) -> Result<Point<R>> {
        self.queries += 1;
        self.space.sample_ball(ball, rng)
    }

    /// Number of draws made so far.
    pub fn queries(&self) -> u64 {
        self.queries
    }
}

/// One trial of the Euclidean measure-growth check.
#[derive(Debug, Clone)]
pub struct DoublingTrial<R> {
    pub center: Point<R>,
    pub base_radius: R,
    pub ratio: R,
    pub expected: R,
    pub pass: bool,
}

/// Result of [`verify_doubling_euclidean`].
#[derive(Debug, Clone)]
pub struct DoublingReport<R> {
    pub alpha: R,
    pub tolerance: R,
    pub trials: Vec<DoublingTrial<R>>,
}

impl<R: Real> DoublingReport<R> {
    pub fn all_passed(&self) -> bool {
        self.trials.iter().all(|t| t.pass)
    }
}

/// Empirically checks that Euclidean ball measures grow exactly like
/// `alpha^dim`: each trial draws a random center and radius scale, evaluates
/// `mu(B_{alpha r}) / mu(B_r)` and compares with `alpha^dim` to `1e-9`.
pub fn verify_doubling_euclidean<R: Real>(
    space: &MetricSpace<R>,
    r: R,
    alpha: R,
    trials: usize,
    rng: &mut RandomStream,
) -> Result<DoublingReport<R>> {
    let dim = match space {
        MetricSpace::Euclidean { dim, .. } => *dim,
        MetricSpace::Finite(_) => {
            return Err(Error::InvalidArgument(
                "doubling exactness check applies to Euclidean spaces".into(),
            ))
        }
    };
    if !(r > R::zero()) {
        return Err(Error::InvalidRadius("base radius must be positive".into()));
    }
    if !(alpha > R::one()) {
        return Err(Error::InvalidArgument("alpha must exceed 1".into()));
    }
    let tolerance = R::of(1e-9);
    let expected = alpha.powi(dim as i32);
    let mut out = Vec::with_capacity(trials);
    for _ in 0..trials {
        let center = Point::Coords(
            (0..dim).map(|_| rng.random_range(R::of(-1.0)..R::of(1.0))).collect(),
        );
        let scale: R = rng.random_range(R::of(0.5)..R::of(2.0));
        let base_radius = r * scale;
        let small = space.measure_ball(&Ball::closed(center.clone(), base_radius))?;
        let big = space.measure_ball(&Ball::closed(center.clone(), alpha * base_radius))?;
        let ratio = big / small;
        let pass = (ratio - expected).abs() <= tolerance;
        out.push(DoublingTrial { center, base_radius, ratio, expected, pass });
    }
    Ok(DoublingReport { alpha, tolerance, trials: out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn line_space() -> MetricSpace<f64> {
        MetricSpace::line()
    }

    /// Three points on a line at coordinates 0, 1, 2 with unit weights.
    pub(crate) fn three_point_line() -> MetricSpace<f64> {
        let d = vec![
            vec![0.0, 1.0, 2.0],
            vec![1.0, 0.0, 1.0],
            vec![2.0, 1.0, 0.0],
        ];
        MetricSpace::finite(FiniteSpace::new(vec![1.0; 3], d).unwrap())
    }

    #[test]
    fn distances_match_the_norms() {
        let l2 = MetricSpace::<f64>::euclidean(2, Norm::L2);
        let linf = MetricSpace::<f64>::euclidean(2, Norm::Linf);
        let p = Point::coords(vec![0.0, 0.0]);
        let q = Point::coords(vec![3.0, 4.0]);
        assert_eq!(l2.distance(&p, &q).unwrap(), 5.0);
        assert_eq!(linf.distance(&p, &q).unwrap(), 4.0);
    }

    #[test]
    fn finite_distance_is_a_matrix_lookup() {
        let d = vec![
            vec![0.0, 0.4, 0.7],
            vec![0.4, 0.0, 0.7],
            vec![0.7, 0.7, 0.0],
        ];
        let f = MetricSpace::finite(FiniteSpace::new(vec![1.0; 3], d).unwrap());
        assert_eq!(f.distance(&Point::index(1), &Point::index(2)).unwrap(), 0.7);
    }

    #[test]
    fn dimension_mismatch_is_an_invalid_point() {
        let l2 = line_space();
        let err = l2
            .distance(&Point::one_d(0.0), &Point::coords(vec![1.0, 2.0]))
            .unwrap_err();
        assert!(matches!(err, Error::InvalidPoint(_)));
    }

    #[test]
    fn triangle_violation_is_rejected() {
        let d = vec![
            vec![0.0, 1.0, 5.0],
            vec![1.0, 0.0, 1.0],
            vec![5.0, 1.0, 0.0],
        ];
        let err = FiniteSpace::new(vec![1.0; 3], d).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
    }

    #[test]
    fn linf_square_measure() {
        let s = MetricSpace::<f64>::euclidean(2, Norm::Linf);
        let b = Ball::closed(Point::coords(vec![0.3, -0.7]), 0.5);
        assert_abs_diff_eq!(s.measure_ball(&b).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn l2_disk_measure_is_pi() {
        let s = MetricSpace::<f64>::euclidean(2, Norm::L2);
        let b = Ball::closed(Point::coords(vec![0.0, 0.0]), 1.0);
        assert_abs_diff_eq!(s.measure_ball(&b).unwrap(), std::f64::consts::PI, epsilon = 1e-12);
    }

    #[test]
    fn finite_measure_counts_weights() {
        let s = three_point_line();
        let b = Ball::closed(Point::index(1), 1.0);
        assert_eq!(s.measure_ball(&b).unwrap(), 3.0);
        let open = Ball::open(Point::index(1), 1.0);
        assert_eq!(s.measure_ball(&open).unwrap(), 1.0);
    }

    #[test]
    fn negative_radius_is_rejected() {
        let s = line_space();
        let b = Ball::closed(Point::one_d(0.0), -0.5);
        assert!(matches!(s.measure_ball(&b), Err(Error::InvalidRadius(_))));
        let mut rng = RandomStream::new(0);
        assert!(matches!(s.sample_ball(&b, &mut rng), Err(Error::InvalidRadius(_))));
    }

    #[test]
    fn radius_zero_returns_the_center() {
        let s = MetricSpace::<f64>::euclidean(3, Norm::L2);
        let c = Point::coords(vec![0.1, 0.2, 0.3]);
        let mut rng = RandomStream::new(1);
        for _ in 0..10 {
            assert_eq!(s.sample_ball(&Ball::closed(c.clone(), 0.0), &mut rng).unwrap(), c);
        }
    }

    #[test]
    fn open_empty_finite_ball_is_an_error() {
        let s = three_point_line();
        let mut rng = RandomStream::new(1);
        let b = Ball::open(Point::index(0), 0.0);
        assert!(matches!(s.sample_ball(&b, &mut rng), Err(Error::EmptySupport(_))));
    }

    #[test]
    fn samples_stay_inside_the_ball() {
        let mut rng = RandomStream::new(7);
        for norm in [Norm::L2, Norm::Linf] {
            for dim in [1usize, 2, 3] {
                let s = MetricSpace::<f64>::euclidean(dim, norm);
                let center = Point::coords(vec![0.25; dim]);
                let b = Ball::closed(center.clone(), 0.8);
                for _ in 0..2000 {
                    let z = s.sample_ball(&b, &mut rng).unwrap();
                    assert!(s.distance(&center, &z).unwrap() <= 0.8 + 1e-12);
                }
            }
        }
    }

    #[test]
    fn linf_marginals_look_uniform() {
        // Mean of n uniform draws on [c-r, c+r] is within 4 standard errors
        // of c, per coordinate.
        let n = 100_000usize;
        let (c, r) = (0.25f64, 0.8f64);
        let s = MetricSpace::<f64>::euclidean(2, Norm::Linf);
        let ball = Ball::closed(Point::coords(vec![c, c]), r);
        let mut rng = RandomStream::new(11);
        let mut sums = [0.0f64; 2];
        for _ in 0..n {
            let z = s.sample_ball(&ball, &mut rng).unwrap();
            let coords = z.as_coords().unwrap();
            sums[0] += coords[0];
            sums[1] += coords[1];
        }
        let se = (r / 3f64.sqrt()) / (n as f64).sqrt();
        for sum in sums {
            assert!((sum / n as f64 - c).abs() <= 4.0 * se);
        }
    }

    #[test]
    fn finite_sampling_frequencies_match_weights() {
        let weights = vec![1.0, 2.0, 3.0, 4.0, 5.0];
        // Five points pairwise at distance 1 via coordinates on a tiny simplex:
        // use a matrix with all off-diagonal distances 1.
        let n = weights.len();
        let mut d = vec![vec![1.0; n]; n];
        for (i, row) in d.iter_mut().enumerate() {
            row[i] = 0.0;
        }
        let s = MetricSpace::finite(FiniteSpace::new(weights.clone(), d).unwrap());
        let total: f64 = weights.iter().sum();
        let draws = 100_000usize;
        let mut counts = vec![0usize; n];
        let mut rng = RandomStream::new(3);
        let ball = Ball::closed(Point::index(0), 2.0);
        for _ in 0..draws {
            let z = s.sample_ball(&ball, &mut rng).unwrap();
            counts[z.as_index().unwrap()] += 1;
        }
        for i in 0..n {
            let p = weights[i] / total;
            let se = (p * (1.0 - p) / draws as f64).sqrt();
            let freq = counts[i] as f64 / draws as f64;
            assert!(
                (freq - p).abs() <= 3.0 * se,
                "point {i}: freq {freq} vs weight share {p}"
            );
        }
    }

    #[test]
    fn growth_bound_examples() {
        let eu = DoublingParameters::<f64>::with_zeta(3.0, 1.0);
        assert_abs_diff_eq!(eu.ratio_bound(2.0, BoundForm::Simplified).unwrap(), 8.0);
        let flat = DoublingParameters::<f64>::with_zeta(5.0, 1.0);
        assert_abs_diff_eq!(
            flat.ratio_bound(1.0 + 1e-12, BoundForm::Simplified).unwrap(),
            1.0,
            epsilon = 1e-9
        );
        let gen = DoublingParameters::<f64>::from_constants(2.0, 2.0, 1.0, 2.0).unwrap();
        assert_abs_diff_eq!(gen.ratio_bound(4.0, BoundForm::General).unwrap(), 64.0);
        assert!(matches!(
            gen.ratio_bound(1.0, BoundForm::General),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            gen.ratio_bound(1.5, BoundForm::Simplified),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn zeta_derivation_matches_the_formula() {
        let p = DoublingParameters::<f64>::from_constants(3.0, 2.0, 1.5, 4.0).unwrap();
        assert_abs_diff_eq!(p.zeta, 1.5 * (1.0 + 2.0f64.ln() / 4.0f64.ln()), epsilon = 1e-12);
    }

    #[test]
    fn doubling_exactness_report() {
        let mut rng = RandomStream::new(5);
        let linf2 = MetricSpace::<f64>::euclidean(2, Norm::Linf);
        let rep = verify_doubling_euclidean(&linf2, 1.0, 3.0, 8, &mut rng).unwrap();
        assert!(rep.all_passed());
        assert_abs_diff_eq!(rep.trials[0].ratio, 9.0, epsilon = 1e-9);

        let l2_1 = MetricSpace::<f64>::euclidean(1, Norm::L2);
        let rep = verify_doubling_euclidean(&l2_1, 2.0, 2.0, 4, &mut rng).unwrap();
        assert!(rep.all_passed());
        assert_abs_diff_eq!(rep.trials[0].ratio, 2.0, epsilon = 1e-9);

        let l2_3 = MetricSpace::<f64>::euclidean(3, Norm::L2);
        let rep = verify_doubling_euclidean(&l2_3, 0.5, 1.5, 4, &mut rng).unwrap();
        assert!(rep.all_passed());
        assert_abs_diff_eq!(rep.trials[0].ratio, 3.375, epsilon = 1e-9);
    }

    #[test]
    fn oracle_counts_draws() {
        let s = line_space();
        let mut oracle = SamplingOracle::new(&s);
        let mut rng = RandomStream::new(2);
        let b = Ball::closed(Point::one_d(0.0), 1.0);
        for _ in 0..5 {
            oracle.draw(&b, &mut rng).unwrap();
        }
        assert_eq!(oracle.queries(), 5);
    }

    #[test]
    fn finite_space_text_round_trip() {
        let text = "3\n1\n2\n0.5\n0 1 2\n1 0 1\n2 1 0\n";
        let f = FiniteSpace::<f64>::from_text(text).unwrap();
        assert_eq!(f.len(), 3);
        assert_eq!(f.weight(2), 0.5);
        assert_eq!(f.distance(0, 2), 2.0);
        let again = FiniteSpace::<f64>::from_text(&f.to_text()).unwrap();
        assert_eq!(again, f);
    }
}
