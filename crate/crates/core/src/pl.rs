//! Continuous piecewise-linear functions on the whole real line.
//!
//! A [`PLFunction`] is stored as its ordered breakpoints plus the slopes of
//! the two unbounded rays. Every constructor returns the canonical form:
//! collinear breakpoints are merged, and a function without any kink is
//! anchored at `x = 0`. Two functions are therefore equal exactly when their
//! representations are equal.

use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::{format_rational, int, ExtendedInterval, ExtendedRational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PLFunction {
    points: Vec<(Rational, Rational)>,
    slope_left: Rational,
    slope_right: Rational,
}

impl PLFunction {
    /// Builds a function from breakpoints and tail slopes.
    ///
    /// Abscissas must be strictly increasing and the list nonempty.
    pub fn new(
        points: Vec<(Rational, Rational)>,
        slope_left: Rational,
        slope_right: Rational,
    ) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidFunction("no breakpoints".into()));
        }
        if let Some(w) = points.windows(2).find(|w| w[0].0 >= w[1].0) {
            return Err(Error::InvalidFunction(format!(
                "breakpoint abscissas not strictly increasing at {}",
                format_rational(&w[1].0)
            )));
        }
        Ok(Self::canonical(points, slope_left, slope_right))
    }

    pub fn constant(c: Rational) -> Self {
        Self::linear(Rational::zero(), c)
    }

    /// `p -> slope * p + intercept`.
    pub fn linear(slope: Rational, intercept: Rational) -> Self {
        PLFunction {
            points: vec![(Rational::zero(), intercept)],
            slope_left: slope.clone(),
            slope_right: slope,
        }
    }

    /// Removes breakpoints that are not kinks. Input must be strictly increasing.
    fn canonical(
        points: Vec<(Rational, Rational)>,
        slope_left: Rational,
        slope_right: Rational,
    ) -> Self {
        let n = points.len();
        let seg = |i: usize| -> Rational {
            let ((x0, y0), (x1, y1)) = (&points[i], &points[i + 1]);
            (y1 - y0) / (x1 - x0)
        };
        let mut slopes = Vec::with_capacity(n + 1);
        slopes.push(slope_left.clone());
        for i in 0..n.saturating_sub(1) {
            slopes.push(seg(i));
        }
        slopes.push(slope_right.clone());
        let kinks: Vec<(Rational, Rational)> = points
            .iter()
            .enumerate()
            .filter(|(i, _)| slopes[*i] != slopes[*i + 1])
            .map(|(_, p)| p.clone())
            .collect();
        if kinks.is_empty() {
            let (x0, y0) = &points[0];
            let intercept = y0 - &slope_left * x0;
            return Self::linear(slope_left, intercept);
        }
        PLFunction {
            points: kinks,
            slope_left,
            slope_right,
        }
    }

    /// Samples `f` on `candidates` and interpolates.
    ///
    /// Exact whenever `candidates` contains every breakpoint of the function
    /// `f` describes: the tails are read off one unit beyond the extreme
    /// candidates.
    pub fn from_pointwise<F>(candidates: impl IntoIterator<Item = Rational>, f: F) -> Self
    where
        F: Fn(&Rational) -> Rational,
    {
        let xs = sorted_unique(candidates);
        let points: Vec<(Rational, Rational)> = xs.iter().map(|x| (x.clone(), f(x))).collect();
        let (x0, y0) = &points[0];
        let (xl, yl) = &points[points.len() - 1];
        let one = int(1);
        let slope_left = y0 - f(&(x0 - &one));
        let slope_right = f(&(xl + &one)) - yl;
        Self::canonical(points, slope_left, slope_right)
    }

    /// As [`PLFunction::from_pointwise`], then re-samples `f` at two interior
    /// points of every gap and on both tails. Returns the mismatching probe
    /// abscissas if the interpolant disagrees with `f` anywhere.
    pub fn from_pointwise_verified<F>(
        candidates: impl IntoIterator<Item = Rational>,
        f: F,
    ) -> std::result::Result<Self, Vec<Rational>>
    where
        F: Fn(&Rational) -> Rational,
    {
        let xs = sorted_unique(candidates);
        let g = Self::from_pointwise(xs.iter().cloned(), &f);
        let mut probes = vec![&xs[0] - int(3), &xs[xs.len() - 1] + int(3)];
        for w in xs.windows(2) {
            let d = &w[1] - &w[0];
            probes.push(&w[0] + &d / int(3));
            probes.push(&w[0] + &d * int(2) / int(3));
        }
        let bad: Vec<Rational> = probes.into_iter().filter(|x| g.eval(x) != f(x)).collect();
        if bad.is_empty() {
            Ok(g)
        } else {
            Err(bad)
        }
    }

    pub fn breakpoints(&self) -> &[(Rational, Rational)] {
        &self.points
    }

    pub fn abscissas(&self) -> impl Iterator<Item = &Rational> + '_ {
        self.points.iter().map(|(x, _)| x)
    }

    pub fn slope_left(&self) -> &Rational {
        &self.slope_left
    }

    pub fn slope_right(&self) -> &Rational {
        &self.slope_right
    }

    /// Slopes of the interior segments, left to right.
    pub fn segment_slopes(&self) -> impl Iterator<Item = Rational> + '_ {
        self.points
            .windows(2)
            .map(|w| (&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0))
    }

    /// Every slope of the function: left tail, segments, right tail.
    pub fn all_slopes(&self) -> Vec<Rational> {
        let mut v = vec![self.slope_left.clone()];
        v.extend(self.segment_slopes());
        v.push(self.slope_right.clone());
        v
    }

    pub fn eval(&self, p: &Rational) -> Rational {
        let pts = &self.points;
        match pts.binary_search_by(|(x, _)| x.cmp(p)) {
            Ok(i) => pts[i].1.clone(),
            Err(0) => &pts[0].1 + &self.slope_left * (p - &pts[0].0),
            Err(i) if i == pts.len() => &pts[i - 1].1 + &self.slope_right * (p - &pts[i - 1].0),
            Err(i) => {
                let ((x0, y0), (x1, y1)) = (&pts[i - 1], &pts[i]);
                y0 + (y1 - y0) * (p - x0) / (x1 - x0)
            }
        }
    }

    /// Slope of the piece covering `(p, p + eps)`.
    pub fn slope_right_of(&self, p: &Rational) -> Rational {
        let pts = &self.points;
        match pts.binary_search_by(|(x, _)| x.cmp(p)) {
            Ok(i) if i + 1 == pts.len() => self.slope_right.clone(),
            Ok(i) => segment(pts, i),
            Err(0) => self.slope_left.clone(),
            Err(i) if i == pts.len() => self.slope_right.clone(),
            Err(i) => segment(pts, i - 1),
        }
    }

    /// Slope of the piece covering `(p - eps, p)`.
    pub fn slope_left_of(&self, p: &Rational) -> Rational {
        let pts = &self.points;
        match pts.binary_search_by(|(x, _)| x.cmp(p)) {
            Ok(0) | Err(0) => self.slope_left.clone(),
            Ok(i) => segment(pts, i - 1),
            Err(i) if i == pts.len() => self.slope_right.clone(),
            Err(i) => segment(pts, i - 1),
        }
    }

    pub fn neg(&self) -> Self {
        PLFunction {
            points: self.points.iter().map(|(x, y)| (x.clone(), -y)).collect(),
            slope_left: -&self.slope_left,
            slope_right: -&self.slope_right,
        }
    }

    /// `p -> f(-p)`.
    pub fn reflect(&self) -> Self {
        let points = self
            .points
            .iter()
            .rev()
            .map(|(x, y)| (-x, y.clone()))
            .collect();
        Self::canonical(points, -&self.slope_right, -&self.slope_left)
    }

    pub fn add(&self, other: &PLFunction) -> Self {
        self.zip_linear(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &PLFunction) -> Self {
        self.zip_linear(other, |a, b| a - b)
    }

    pub fn add_constant(&self, c: &Rational) -> Self {
        PLFunction {
            points: self
                .points
                .iter()
                .map(|(x, y)| (x.clone(), y + c))
                .collect(),
            slope_left: self.slope_left.clone(),
            slope_right: self.slope_right.clone(),
        }
    }

    fn zip_linear(
        &self,
        other: &PLFunction,
        op: impl Fn(&Rational, &Rational) -> Rational,
    ) -> Self {
        let xs = sorted_unique(self.abscissas().chain(other.abscissas()).cloned());
        let points = xs
            .into_iter()
            .map(|x| {
                let y = op(&self.eval(&x), &other.eval(&x));
                (x, y)
            })
            .collect();
        Self::canonical(
            points,
            op(&self.slope_left, &other.slope_left),
            op(&self.slope_right, &other.slope_right),
        )
    }

    /// Exact pointwise minimum, with crossings on bounded pieces and on the
    /// unbounded tails.
    pub fn min(&self, other: &PLFunction) -> Self {
        self.lattice(other, true)
    }

    pub fn max(&self, other: &PLFunction) -> Self {
        self.lattice(other, false)
    }

    fn lattice(&self, other: &PLFunction, take_min: bool) -> Self {
        let candidates = self
            .abscissas()
            .chain(other.abscissas())
            .cloned()
            .chain(self.sub(other).roots());
        Self::from_pointwise(candidates, |x| {
            let (a, b) = (self.eval(x), other.eval(x));
            if (a <= b) == take_min {
                a
            } else {
                b
            }
        })
    }

    /// Isolated zeros and endpoints of zero intervals, sorted.
    ///
    /// For the identically zero function this is the single anchor `0`.
    pub fn roots(&self) -> Vec<Rational> {
        let pts = &self.points;
        let mut out = Vec::new();
        let (x0, y0) = &pts[0];
        if !self.slope_left.is_zero() {
            let r = x0 - y0 / &self.slope_left;
            if r < *x0 {
                out.push(r);
            }
        }
        for (i, (x, y)) in pts.iter().enumerate() {
            if y.is_zero() {
                out.push(x.clone());
            }
            if let Some((x1, y1)) = pts.get(i + 1) {
                if (y.is_positive() && y1.is_negative()) || (y.is_negative() && y1.is_positive()) {
                    out.push(x + (x1 - x) * (-y) / (y1 - y));
                }
            }
        }
        let (xl, yl) = &pts[pts.len() - 1];
        if !self.slope_right.is_zero() {
            let r = xl - yl / &self.slope_right;
            if r > *xl {
                out.push(r);
            }
        }
        out
    }

    /// Abscissas where the function takes the value `level`.
    pub fn level_points(&self, level: &Rational) -> Vec<Rational> {
        self.add_constant(&-level).roots()
    }

    /// Connected components of `{f = 0}` in increasing order.
    pub fn zero_set(&self) -> Vec<ExtendedInterval> {
        use ExtendedRational::{Finite, NegInf, PosInf};
        let pts = &self.points;
        let n = pts.len();
        let mut comps = Vec::new();
        let mut open: Option<ExtendedRational> = None;
        let (x0, y0) = &pts[0];
        if y0.is_zero() && self.slope_left.is_zero() {
            open = Some(NegInf);
        } else if !self.slope_left.is_zero() {
            let r = x0 - y0 / &self.slope_left;
            if r < *x0 {
                comps.push(ExtendedInterval::point(Finite(r)));
            }
        }
        for i in 0..n {
            let (x, y) = &pts[i];
            if y.is_zero() && open.is_none() {
                open = Some(Finite(x.clone()));
            }
            if i + 1 < n {
                let (x1, y1) = &pts[i + 1];
                if !(y.is_zero() && y1.is_zero()) {
                    if let Some(lo) = open.take() {
                        comps.push(ExtendedInterval::new(lo, Finite(x.clone())).expect("ordered"));
                    }
                }
                if (y.is_positive() && y1.is_negative()) || (y.is_negative() && y1.is_positive()) {
                    let r = x + (x1 - x) * (-y) / (y1 - y);
                    comps.push(ExtendedInterval::point(Finite(r)));
                }
            }
        }
        let (xl, yl) = &pts[n - 1];
        if yl.is_zero() && self.slope_right.is_zero() {
            let lo = open.take().unwrap_or(Finite(xl.clone()));
            comps.push(ExtendedInterval::new(lo, PosInf).expect("ordered"));
        } else {
            if let Some(lo) = open.take() {
                comps.push(ExtendedInterval::new(lo, Finite(xl.clone())).expect("ordered"));
            }
            if !self.slope_right.is_zero() {
                let r = xl - yl / &self.slope_right;
                if r > *xl {
                    comps.push(ExtendedInterval::point(Finite(r)));
                }
            }
        }
        comps
    }

    /// Running minimum sweeping rightwards.
    ///
    /// With `anchor = None` this is `p -> inf over (-inf, p]`; with
    /// `Some(a)` it is `p -> min over [a, p]` for `p >= a` and `f(a)` for
    /// `p <= a`.
    fn sweep_min(&self, anchor: Option<&Rational>) -> Self {
        let mut seq: Vec<(Rational, Rational)> = Vec::with_capacity(self.points.len() + 1);
        let left_slope = match anchor {
            Some(a) => {
                seq.push((a.clone(), self.eval(a)));
                seq.extend(self.points.iter().filter(|(x, _)| x > a).cloned());
                Rational::zero()
            }
            None => {
                seq.extend(self.points.iter().cloned());
                self.slope_left.clone()
            }
        };
        let mut out = Vec::with_capacity(2 * seq.len());
        let mut m = seq[0].1.clone();
        out.push(seq[0].clone());
        for w in seq.windows(2) {
            let ((x0, y0), (x1, y1)) = (&w[0], &w[1]);
            if *y1 < m {
                if *y0 > m {
                    let s = (y1 - y0) / (x1 - x0);
                    out.push((x0 + (&m - y0) / s, m.clone()));
                }
                out.push((x1.clone(), y1.clone()));
                m = y1.clone();
            } else {
                out.push((x1.clone(), m.clone()));
            }
        }
        let (xl, yl) = seq[seq.len() - 1].clone();
        let sr = &self.slope_right;
        let tail = if sr.is_negative() {
            if yl > m {
                out.push((&xl + (&m - &yl) / sr, m.clone()));
            }
            sr.clone()
        } else {
            Rational::zero()
        };
        Self::canonical(out, left_slope, tail)
    }

    /// `p -> inf over (-inf, p] of f`. Requires `slope_left <= 0`.
    pub fn running_inf_left(&self) -> Result<Self> {
        if self.slope_left.is_positive() {
            return Err(Error::UnboundedBelow(format_rational(&self.slope_left)));
        }
        Ok(self.sweep_min(None))
    }

    /// `p -> sup over [p, +inf) of f`. Requires `slope_right <= 0`.
    pub fn running_sup_right(&self) -> Result<Self> {
        if self.slope_right.is_positive() {
            return Err(Error::UnboundedAbove(format_rational(&self.slope_right)));
        }
        Ok(self.reflect().neg().sweep_min(None).neg().reflect())
    }

    /// `q -> min over [a, q] of f` for `q >= a`, constant `f(a)` for `q <= a`.
    pub fn cumulative_min_from(&self, a: &Rational) -> Self {
        self.sweep_min(Some(a))
    }

    /// `q -> max over [a, q] of f` for `q >= a`, constant `f(a)` for `q <= a`.
    pub fn cumulative_max_from(&self, a: &Rational) -> Self {
        self.neg().sweep_min(Some(a)).neg()
    }

    /// `q -> min over [q, a] of f` for `q <= a`, constant `f(a)` for `q >= a`.
    pub fn cumulative_min_to(&self, a: &Rational) -> Self {
        self.reflect().sweep_min(Some(&-a)).reflect()
    }

    /// `q -> max over [q, a] of f` for `q <= a`, constant `f(a)` for `q >= a`.
    pub fn cumulative_max_to(&self, a: &Rational) -> Self {
        self.reflect().neg().sweep_min(Some(&-a)).neg().reflect()
    }

    /// Exact maximum over the closed interval `[a, b]`, `a <= b`.
    pub fn max_on(&self, a: &Rational, b: &Rational) -> Rational {
        self.values_on(a, b).max().expect("nonempty")
    }

    /// Exact minimum over the closed interval `[a, b]`, `a <= b`.
    pub fn min_on(&self, a: &Rational, b: &Rational) -> Rational {
        self.values_on(a, b).min().expect("nonempty")
    }

    fn values_on<'a>(
        &'a self,
        a: &'a Rational,
        b: &'a Rational,
    ) -> impl Iterator<Item = Rational> + 'a {
        debug_assert!(a <= b);
        [self.eval(a), self.eval(b)].into_iter().chain(
            self.points
                .iter()
                .filter(move |(x, _)| x > a && x < b)
                .map(|(_, y)| y.clone()),
        )
    }

    /// Largest `|slope|` among pieces meeting `[a, b]`.
    pub fn max_abs_slope_on(&self, a: &Rational, b: &Rational) -> Rational {
        let mut best = self
            .slope_right_of(a)
            .abs()
            .max(self.slope_left_of(b).abs());
        for (x, _) in self.points.iter().filter(|(x, _)| x > a && x < b) {
            best = best.max(self.slope_right_of(x).abs());
        }
        best
    }

    /// `slope_left < 0 < slope_right`.
    pub fn is_coercive(&self) -> bool {
        self.slope_left.is_negative() && self.slope_right.is_positive()
    }

    pub fn is_nonincreasing(&self) -> bool {
        !self.slope_left.is_positive()
            && !self.slope_right.is_positive()
            && self.segment_slopes().all(|s| !s.is_positive())
    }

    /// Non-increasing and blowing up as `p -> -inf`.
    pub fn is_semicoercive(&self) -> bool {
        self.is_nonincreasing() && self.slope_left.is_negative()
    }

    /// `self <= other` everywhere.
    pub fn le(&self, other: &PLFunction) -> bool {
        let d = other.sub(self);
        !d.slope_left.is_positive()
            && !d.slope_right.is_negative()
            && d.points.iter().all(|(_, y)| !y.is_negative())
    }
}

fn segment(pts: &[(Rational, Rational)], i: usize) -> Rational {
    (&pts[i + 1].1 - &pts[i].1) / (&pts[i + 1].0 - &pts[i].0)
}

/// Sorted, deduplicated copy; `[0]` when empty.
pub(crate) fn sorted_unique(items: impl IntoIterator<Item = Rational>) -> Vec<Rational> {
    let mut v: Vec<Rational> = items.into_iter().collect();
    v.sort();
    v.dedup();
    if v.is_empty() {
        v.push(Rational::zero());
    }
    v
}

impl fmt::Display for PLFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PL[{} |", format_rational(&self.slope_left))?;
        for (x, y) in &self.points {
            write!(f, " ({}, {})", format_rational(x), format_rational(y))?;
        }
        write!(f, " | {}]", format_rational(&self.slope_right))
    }
}
