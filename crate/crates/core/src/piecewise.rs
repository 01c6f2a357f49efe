//! Exact one-dimensional set arithmetic.
//!
//! An [`IntervalSet`] is a finite union of disjoint intervals on the real line
//! with explicit endpoint inclusion flags. It is the backbone of every
//! certified 1-D evaluation in the crate: decision regions of classifiers,
//! ball containment and intersection tests with open/closed semantics, exact
//! Lebesgue overlap measures, and the majority-smoothing sweep.

use crate::scalar::Real;
use crate::metric::Boundary;

/// One interval. Infinite endpoints are represented by `R::infinity()` /
/// `R::neg_infinity()` with the corresponding flag set to `false`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval<R> {
    pub lo: R,
    pub lo_closed: bool,
    pub hi: R,
    pub hi_closed: bool,
}

impl<R: Real> Interval<R> {
    pub fn closed(lo: R, hi: R) -> Self {
        Interval { lo, lo_closed: true, hi, hi_closed: true }
    }

    pub fn open(lo: R, hi: R) -> Self {
        Interval { lo, lo_closed: false, hi, hi_closed: false }
    }

    pub fn point(x: R) -> Self {
        Interval::closed(x, x)
    }

    /// Everything up to `hi` (inclusive when `closed`).
    pub fn ray_below(hi: R, closed: bool) -> Self {
        Interval { lo: R::neg_infinity(), lo_closed: false, hi, hi_closed: closed }
    }

    /// Everything from `lo` (inclusive when `closed`).
    pub fn ray_above(lo: R, closed: bool) -> Self {
        Interval { lo, lo_closed: closed, hi: R::infinity(), hi_closed: false }
    }

    pub fn all() -> Self {
        Interval {
            lo: R::neg_infinity(),
            lo_closed: false,
            hi: R::infinity(),
            hi_closed: false,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && !(self.lo_closed && self.hi_closed))
    }

    pub fn contains(&self, x: R) -> bool {
        (self.lo < x || (self.lo_closed && x == self.lo))
            && (x < self.hi || (self.hi_closed && x == self.hi))
    }

    /// Whether `self` contains `other` entirely.
    fn covers(&self, other: &Interval<R>) -> bool {
        let lo_ok = self.lo < other.lo
            || (self.lo == other.lo && (self.lo_closed || !other.lo_closed));
        let hi_ok = other.hi < self.hi
            || (other.hi == self.hi && (self.hi_closed || !other.hi_closed));
        lo_ok && hi_ok
    }

    /// Whether `self` and `other` share at least one point.
    fn overlaps(&self, other: &Interval<R>) -> bool {
        if self.is_empty() || other.is_empty() {
            return false;
        }
        let left_ok = self.lo < other.hi
            || (self.lo == other.hi && self.lo_closed && other.hi_closed);
        let right_ok = other.lo < self.hi
            || (other.lo == self.hi && other.lo_closed && self.hi_closed);
        left_ok && right_ok
    }

    /// Overlap or exact adjacency (a shared endpoint covered by either side),
    /// in which case the union is again an interval.
    fn touches(&self, other: &Interval<R>) -> bool {
        if self.overlaps(other) {
            return true;
        }
        (self.hi == other.lo && (self.hi_closed || other.lo_closed))
            || (other.hi == self.lo && (other.hi_closed || self.lo_closed))
    }

    fn merge(&self, other: &Interval<R>) -> Interval<R> {
        let (lo, lo_closed) = if self.lo < other.lo {
            (self.lo, self.lo_closed)
        } else if other.lo < self.lo {
            (other.lo, other.lo_closed)
        } else {
            (self.lo, self.lo_closed || other.lo_closed)
        };
        let (hi, hi_closed) = if self.hi > other.hi {
            (self.hi, self.hi_closed)
        } else if other.hi > self.hi {
            (other.hi, other.hi_closed)
        } else {
            (self.hi, self.hi_closed || other.hi_closed)
        };
        Interval { lo, lo_closed, hi, hi_closed }
    }

    /// Length of the intersection with `[a, b]`. Inclusion flags do not matter
    /// for Lebesgue measure.
    fn overlap_length(&self, a: R, b: R) -> R {
        let lo = self.lo.max(a);
        let hi = self.hi.min(b);
        (hi - lo).max(R::zero())
    }
}

/// A normalized finite union of disjoint, non-touching intervals, kept sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalSet<R> {
    intervals: Vec<Interval<R>>,
}

/// The closed/open ball `[c-r, c+r]` / `(c-r, c+r)` as an interval. An open
/// ball of radius zero is treated as the singleton `{c}`, matching the
/// convention used by the samplers.
pub fn ball_interval<R: Real>(center: R, radius: R, boundary: Boundary) -> Interval<R> {
    let closed = boundary == Boundary::Closed || radius == R::zero();
    Interval {
        lo: center - radius,
        lo_closed: closed,
        hi: center + radius,
        hi_closed: closed,
    }
}

impl<R: Real> IntervalSet<R> {
    pub fn empty() -> Self {
        IntervalSet { intervals: Vec::new() }
    }

    pub fn all() -> Self {
        IntervalSet { intervals: vec![Interval::all()] }
    }

    pub fn of(intervals: Vec<Interval<R>>) -> Self {
        let mut parts: Vec<Interval<R>> =
            intervals.into_iter().filter(|iv| !iv.is_empty()).collect();
        parts.sort_by(|a, b| {
            a.lo.partial_cmp(&b.lo)
                .expect("interval endpoints are not NaN")
                .then_with(|| b.lo_closed.cmp(&a.lo_closed))
        });
        let mut merged: Vec<Interval<R>> = Vec::with_capacity(parts.len());
        for iv in parts {
            match merged.last_mut() {
                Some(last) if last.touches(&iv) => *last = last.merge(&iv),
                _ => merged.push(iv),
            }
        }
        IntervalSet { intervals: merged }
    }

    pub fn intervals(&self) -> &[Interval<R>] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, x: R) -> bool {
        self.intervals.iter().any(|iv| iv.contains(x))
    }

    pub fn complement(&self) -> IntervalSet<R> {
        if self.intervals.is_empty() {
            return IntervalSet::all();
        }
        let mut out = Vec::new();
        let first = &self.intervals[0];
        if !(first.lo == R::neg_infinity()) {
            out.push(Interval {
                lo: R::neg_infinity(),
                lo_closed: false,
                hi: first.lo,
                hi_closed: !first.lo_closed,
            });
        }
        for pair in self.intervals.windows(2) {
            out.push(Interval {
                lo: pair[0].hi,
                lo_closed: !pair[0].hi_closed,
                hi: pair[1].lo,
                hi_closed: !pair[1].lo_closed,
            });
        }
        let last = self.intervals.last().unwrap();
        if !(last.hi == R::infinity()) {
            out.push(Interval {
                lo: last.hi,
                lo_closed: !last.hi_closed,
                hi: R::infinity(),
                hi_closed: false,
            });
        }
        IntervalSet::of(out)
    }

    /// Whether the ball around `center` is entirely inside the set.
    pub fn contains_ball(&self, center: R, radius: R, boundary: Boundary) -> bool {
        let ball = ball_interval(center, radius, boundary);
        self.intervals.iter().any(|iv| iv.covers(&ball))
    }

    /// Whether the ball around `center` meets the set.
    pub fn intersects_ball(&self, center: R, radius: R, boundary: Boundary) -> bool {
        let ball = ball_interval(center, radius, boundary);
        self.intervals.iter().any(|iv| iv.overlaps(&ball))
    }

    /// Lebesgue measure of the set restricted to `[a, b]`.
    pub fn measure_between(&self, a: R, b: R) -> R {
        self.intervals
            .iter()
            .fold(R::zero(), |acc, iv| acc + iv.overlap_length(a, b))
    }

    /// All finite endpoint values, in order.
    fn finite_endpoints(&self) -> Vec<R> {
        let mut out = Vec::new();
        for iv in &self.intervals {
            if iv.lo.is_finite() {
                out.push(iv.lo);
            }
            if iv.hi.is_finite() {
                out.push(iv.hi);
            }
        }
        out
    }

    /// The set `{x : m(S ∩ [x-w, x+w]) >= w}`, i.e. the region where the
    /// window-average of the indicator of `S` is at least one half.
    ///
    /// The window measure is continuous and piecewise linear in `x` with
    /// breakpoints at `endpoint ± w`; the result is a closed set assembled
    /// from per-segment linear crossings, exact up to float rounding of the
    /// crossing solve.
    pub fn smooth(&self, w: R) -> IntervalSet<R> {
        if w <= R::zero() {
            return self.clone();
        }
        if self.intervals.is_empty() {
            return IntervalSet::empty();
        }
        if self.intervals.len() == 1 && self.intervals[0] == Interval::all() {
            return IntervalSet::all();
        }

        let mut breaks: Vec<R> = Vec::new();
        for e in self.finite_endpoints() {
            breaks.push(e - w);
            breaks.push(e + w);
        }
        breaks.sort_by(|a, b| a.partial_cmp(b).expect("no NaN breakpoints"));
        breaks.dedup();

        let vote = |x: R| self.measure_between(x - w, x + w);

        let mut pieces: Vec<Interval<R>> = Vec::new();

        // Left ray: the window measure is constant left of the first breakpoint.
        let first = breaks[0];
        if vote(first) >= w {
            // Constant on (-inf, first]; include the ray when the constant wins.
            let probe = first - R::one();
            if vote(probe) >= w {
                pieces.push(Interval::ray_below(first, true));
            } else {
                pieces.push(Interval::point(first));
            }
        }

        for pair in breaks.windows(2) {
            let (p, q) = (pair[0], pair[1]);
            let (fp, fq) = (vote(p), vote(q));
            let p_ok = fp >= w;
            let q_ok = fq >= w;
            if p_ok && q_ok {
                pieces.push(Interval::closed(p, q));
            } else if p_ok != q_ok {
                // Linear segment crossing the threshold exactly once.
                let t = p + (w - fp) * (q - p) / (fq - fp);
                if p_ok {
                    pieces.push(Interval::closed(p, t));
                } else {
                    pieces.push(Interval::closed(t, q));
                }
            } else {
                // Both below: a linear function cannot exceed w strictly inside.
            }
        }

        let last = *breaks.last().unwrap();
        if vote(last) >= w {
            let probe = last + R::one();
            if vote(probe) >= w {
                pieces.push(Interval::ray_above(last, true));
            }
        }

        IntervalSet::of(pieces)
    }

    /// Region where at least `need` of the given sets contain the point.
    /// Exact: evaluates membership on the cell decomposition induced by all
    /// endpoints (each endpoint singleton and each open cell in between).
    pub fn vote_region(sets: &[IntervalSet<R>], need: usize) -> IntervalSet<R> {
        if need == 0 {
            return IntervalSet::all();
        }
        let count_at = |x: R| sets.iter().filter(|s| s.contains(x)).count();

        let mut values: Vec<R> = Vec::new();
        for s in sets {
            values.extend(s.finite_endpoints());
        }
        values.sort_by(|a, b| a.partial_cmp(b).expect("no NaN endpoints"));
        values.dedup();

        if values.is_empty() {
            // Every set is empty or the whole line.
            return if count_at(R::zero()) >= need {
                IntervalSet::all()
            } else {
                IntervalSet::empty()
            };
        }

        let mut pieces: Vec<Interval<R>> = Vec::new();
        if count_at(values[0] - R::one()) >= need {
            pieces.push(Interval::ray_below(values[0], false));
        }
        for (i, &v) in values.iter().enumerate() {
            if count_at(v) >= need {
                pieces.push(Interval::point(v));
            }
            let next = values.get(i + 1);
            let rep = match next {
                Some(&n) => (v + n) / two_of::<R>(),
                None => v + R::one(),
            };
            if count_at(rep) >= need {
                match next {
                    Some(&n) => pieces.push(Interval::open(v, n)),
                    None => pieces.push(Interval::ray_above(v, false)),
                }
            }
        }
        IntervalSet::of(pieces)
    }
}

fn two_of<R: Real>() -> R {
    R::of(2.0)
}
