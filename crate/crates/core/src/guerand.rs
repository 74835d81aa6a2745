//! Characteristic points, upper/lower points, limiter points and the
//! plateau operator built from limiter points.
//!
//! Everything here is exact. The "for all q" clause in the definition of a
//! limiter point is decided without sampling: on a piece where `H` is
//! strictly increasing the excursion intervals `(q-, q+)` of all admissible
//! `q` form a single open interval whose ends are the lower point of the
//! largest admissible `q` and the upper point of the smallest one. Pieces
//! where `H` is flat or decreasing only contribute empty intervals.

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::pl::{sorted_unique, PLFunction};
use crate::relaxation::{
    check_boundary, check_hamiltonian, prepare_boundary, relax, EnvelopePolicy,
};
use crate::scalar::{ExtendedInterval, ExtendedRational, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Negative,
    Positive,
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Sign::Negative => "negative",
            Sign::Positive => "positive",
        })
    }
}

/// A contact point of `H` and `F` with a one-sided strict excursion of `H`:
/// above `H(p)` just right of `p` (positive) or below `H(p)` just left (negative).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CharPoint {
    pub location: Rational,
    pub sign: Sign,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UpperLowerPair {
    pub p: Rational,
    pub p_minus: Rational,
    pub p_plus: ExtendedRational,
}

/// A limiter point with its plateau `[p-, p+]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LimiterPoint {
    pub p: Rational,
    pub sign: Sign,
    pub interval: ExtendedInterval,
}

impl LimiterPoint {
    pub fn char_point(&self) -> CharPoint {
        CharPoint {
            location: self.p.clone(),
            sign: self.sign,
        }
    }
}

/// First abscissa right of `p` where `f` comes back to `<= f(p)`, given that
/// `f > f(p)` immediately right of `p`. `+inf` if it never does.
fn first_return_right(f: &PLFunction, p: &Rational) -> ExtendedRational {
    let level = f.eval(p);
    let mut prev = (p.clone(), level.clone());
    for (x, y) in f.breakpoints().iter().filter(|(x, _)| x > p) {
        if *y <= level {
            let slope = (y - &prev.1) / (x - &prev.0);
            return ExtendedRational::Finite(&prev.0 + (&level - &prev.1) / slope);
        }
        prev = (x.clone(), y.clone());
    }
    let sr = f.slope_right();
    if sr.is_negative() {
        ExtendedRational::Finite(&prev.0 + (&level - &prev.1) / sr)
    } else {
        ExtendedRational::PosInf
    }
}

/// `p+`: `p` itself if `H(q) <= H(p)` for `q` arbitrarily close on the right,
/// otherwise the end of the strict excursion `{H > H(p)}` starting at `p`.
pub fn upper_point(h: &PLFunction, p: &Rational) -> Result<ExtendedRational> {
    check_hamiltonian(h)?;
    Ok(upper_point_unchecked(h, p))
}

/// `p-`: mirror image of [`upper_point`], always finite for coercive `H`.
pub fn lower_point(h: &PLFunction, p: &Rational) -> Result<Rational> {
    check_hamiltonian(h)?;
    Ok(lower_point_unchecked(h, p))
}

pub fn upper_lower(h: &PLFunction, p: &Rational) -> Result<UpperLowerPair> {
    check_hamiltonian(h)?;
    Ok(UpperLowerPair {
        p: p.clone(),
        p_minus: lower_point_unchecked(h, p),
        p_plus: upper_point_unchecked(h, p),
    })
}

fn upper_point_unchecked(h: &PLFunction, p: &Rational) -> ExtendedRational {
    if !h.slope_right_of(p).is_positive() {
        return ExtendedRational::Finite(p.clone());
    }
    first_return_right(h, p)
}

fn lower_point_unchecked(h: &PLFunction, p: &Rational) -> Rational {
    if !h.slope_left_of(p).is_positive() {
        return p.clone();
    }
    // q -> -H(-q) turns "first point left of p with H >= H(p)" into a first return.
    match first_return_right(&h.reflect().neg(), &-p) {
        ExtendedRational::Finite(r) => -r,
        // Coercivity makes the left tail of H climb above every level.
        _ => unreachable!("coercive Hamiltonian returns to every level on the left"),
    }
}

/// All characteristic points of `F` along `H`, sorted; a point that is both
/// positive and negative appears once per sign.
pub fn characteristic_points(h: &PLFunction, f: &PLFunction) -> Result<Vec<CharPoint>> {
    check_hamiltonian(h)?;
    check_boundary(f)?;
    let ends = f
        .sub(h)
        .zero_set()
        .into_iter()
        .flat_map(|c| [c.lo().clone(), c.hi().clone()])
        .filter_map(|e| e.finite().cloned());
    let mut out = Vec::new();
    for x in sorted_unique(ends) {
        if f.eval(&x) != h.eval(&x) {
            // sorted_unique pads an empty set with 0.
            continue;
        }
        if h.slope_left_of(&x).is_positive() {
            out.push(CharPoint {
                location: x.clone(),
                sign: Sign::Negative,
            });
        }
        if h.slope_right_of(&x).is_positive() {
            out.push(CharPoint {
                location: x,
                sign: Sign::Positive,
            });
        }
    }
    out.sort();
    Ok(out)
}

/// A closed piece `[lo, hi]` of the real line on which `H` is affine with
/// positive slope; `hi = None` for the right tail.
struct Rising {
    lo: Rational,
    hi: Option<Rational>,
    slope: Rational,
}

fn rising_pieces(h: &PLFunction) -> Vec<Rising> {
    let pts = h.breakpoints();
    let mut out = Vec::new();
    for (w, slope) in pts.windows(2).zip(h.segment_slopes()) {
        if slope.is_positive() {
            out.push(Rising {
                lo: w[0].0.clone(),
                hi: Some(w[1].0.clone()),
                slope,
            });
        }
    }
    if h.slope_right().is_positive() {
        out.push(Rising {
            lo: pts[pts.len() - 1].0.clone(),
            hi: None,
            slope: h.slope_right().clone(),
        });
    }
    out
}

/// Bound of a subset of a rising piece: the abscissa and whether it belongs to the set.
type Bound = (Rational, bool);

impl Rising {
    fn contains(&self, x: &Rational) -> bool {
        *x >= self.lo && self.hi.as_ref().is_none_or(|hi| x <= hi)
    }

    /// Abscissa inside the piece where `H` equals `level`, if any.
    fn level_crossing(&self, h: &PLFunction, level: &Rational) -> Option<Rational> {
        let x = &self.lo + (level - h.eval(&self.lo)) / &self.slope;
        self.contains(&x).then_some(x)
    }

    /// The unique zero of the strictly increasing `d = H - F0` on the piece.
    fn zero_of(&self, d: &PLFunction) -> Option<Rational> {
        d.roots().into_iter().find(|r| self.contains(r))
    }

    /// `{q in piece : H(q) < level, H(q) >= F0(q)}` as `(inf, sup)`.
    fn below_and_above_boundary(
        &self,
        h: &PLFunction,
        d: &PLFunction,
        level: &Rational,
    ) -> Option<(Bound, Bound)> {
        if h.eval(&self.lo) >= *level {
            return None;
        }
        let top: Bound = match &self.hi {
            Some(hi) if h.eval(hi) < *level => (hi.clone(), true),
            _ => (
                self.level_crossing(h, level)
                    .expect("H crosses level on piece"),
                false,
            ),
        };
        let bottom: Bound = if d.eval(&self.lo) >= Rational::from_integer(0.into()) {
            (self.lo.clone(), true)
        } else {
            (self.zero_of(d)?, true)
        };
        nonempty(bottom, top)
    }

    /// `{q in piece : H(q) > level, F0(q) >= H(q)}` as `(inf, sup)`.
    fn above_and_below_boundary(
        &self,
        h: &PLFunction,
        d: &PLFunction,
        level: &Rational,
    ) -> Option<(Bound, Bound)> {
        if let Some(hi) = &self.hi {
            if h.eval(hi) <= *level {
                return None;
            }
        }
        let bottom: Bound = if h.eval(&self.lo) > *level {
            (self.lo.clone(), true)
        } else {
            (
                self.level_crossing(h, level)
                    .expect("H crosses level on piece"),
                false,
            )
        };
        if d.eval(&self.lo) > Rational::from_integer(0.into()) {
            return None;
        }
        let top: Bound = match &self.hi {
            Some(hi) if d.eval(hi) <= Rational::from_integer(0.into()) => (hi.clone(), true),
            _ => (
                self.zero_of(d).expect("H - F0 rises through zero on piece"),
                true,
            ),
        };
        nonempty(bottom, top)
    }
}

fn nonempty(bottom: Bound, top: Bound) -> Option<(Bound, Bound)> {
    let ok = bottom.0 < top.0 || (bottom.0 == top.0 && bottom.1 && top.1);
    ok.then_some((bottom, top))
}

/// Union of `(q-, q+)` over an admissible set with the given bounds on a rising piece.
fn excursion_hull(
    h: &PLFunction,
    bottom: &Rational,
    top: &Rational,
) -> (ExtendedRational, ExtendedRational) {
    (
        ExtendedRational::Finite(lower_point_unchecked(h, top)),
        upper_point_unchecked(h, bottom),
    )
}

fn open_meet(
    a: &(ExtendedRational, ExtendedRational),
    lo: &ExtendedRational,
    hi: &ExtendedRational,
) -> bool {
    std::cmp::max(&a.0, lo) < std::cmp::min(&a.1, hi)
}

/// Limiter points straight from their definition, without any cross-check.
///
/// Candidates are the breakpoints of `H` and `F0` and the contact points of
/// the two graphs; away from those a point always fails the exclusion clause
/// against its immediate neighbours.
pub fn limiter_points_by_definition(h: &PLFunction, f0: &PLFunction) -> Result<Vec<LimiterPoint>> {
    check_hamiltonian(h)?;
    check_boundary(f0)?;
    let d = h.sub(f0);
    let pieces = rising_pieces(h);
    let candidates = sorted_unique(
        h.abscissas()
            .chain(f0.abscissas())
            .cloned()
            .chain(d.roots()),
    );
    let mut out = Vec::new();
    for p in candidates {
        let level = h.eval(&p);
        let boundary = f0.eval(&p);
        let p_plus = upper_point_unchecked(h, &p);
        let p_minus = lower_point_unchecked(h, &p);
        let interval =
            ExtendedInterval::new(ExtendedRational::Finite(p_minus.clone()), p_plus.clone())
                .expect("p- <= p <= p+");
        let here = ExtendedRational::Finite(p.clone());

        if p_plus > p && level >= boundary {
            let blocked = pieces.iter().any(|piece| {
                piece
                    .below_and_above_boundary(h, &d, &level)
                    .map(|((a, _), (b, _))| open_meet(&excursion_hull(h, &a, &b), &here, &p_plus))
                    .unwrap_or(false)
            });
            if !blocked {
                out.push(LimiterPoint {
                    p: p.clone(),
                    sign: Sign::Positive,
                    interval: interval.clone(),
                });
            }
        }
        if p_minus < p && level <= boundary {
            let lo = ExtendedRational::Finite(p_minus.clone());
            let blocked = pieces.iter().any(|piece| {
                piece
                    .above_and_below_boundary(h, &d, &level)
                    .map(|((a, _), (b, _))| open_meet(&excursion_hull(h, &a, &b), &lo, &here))
                    .unwrap_or(false)
            });
            if !blocked {
                out.push(LimiterPoint {
                    p: p.clone(),
                    sign: Sign::Negative,
                    interval,
                });
            }
        }
    }
    out.sort_by_key(|a| a.char_point());
    Ok(out)
}

/// Limiter points of `F0`, cross-checked against the characteristic points
/// of the relaxed function; any disagreement is [`Error::InternalMismatch`].
///
/// A non-semi-coercive `F0` is first replaced by `max(F0, H_-)` unless the
/// policy is strict.
pub fn limiter_points(
    h: &PLFunction,
    f0: &PLFunction,
    policy: EnvelopePolicy,
) -> Result<Vec<LimiterPoint>> {
    let f0 = prepare_boundary(h, f0, policy)?;
    let limiters = limiter_points_by_definition(h, &f0)?;
    let relaxed = relax(h, &f0)?;
    let chars = characteristic_points(h, &relaxed)?;
    let from_limiters: Vec<CharPoint> = limiters.iter().map(LimiterPoint::char_point).collect();
    if from_limiters != chars {
        return Err(Error::InternalMismatch(format!(
            "limiter points {from_limiters:?} differ from characteristic points {chars:?} of {relaxed}"
        )));
    }
    Ok(limiters)
}

/// `H(p_a)` on every plateau `[p_a-, p_a+]` of a limiter point `p_a`, `H` elsewhere.
pub fn guerand_operator(
    h: &PLFunction,
    f0: &PLFunction,
    policy: EnvelopePolicy,
) -> Result<PLFunction> {
    let limiters = limiter_points(h, f0, policy)?;
    plateau_function(h, &limiters)
}

/// Builds the plateau function from a list of limiter points.
pub fn plateau_function(h: &PLFunction, limiters: &[LimiterPoint]) -> Result<PLFunction> {
    let plateaus: Vec<(&ExtendedInterval, Rational)> = limiters
        .iter()
        .map(|l| (&l.interval, h.eval(&l.p)))
        .collect();
    let ends = limiters.iter().flat_map(|l| {
        [
            l.interval.lo().finite().cloned(),
            Some(l.p.clone()),
            l.interval.hi().finite().cloned(),
        ]
        .into_iter()
        .flatten()
    });
    let candidates: Vec<Rational> = h.abscissas().cloned().chain(ends).collect();
    let value = |x: &Rational| {
        plateaus
            .iter()
            .find(|(iv, _)| iv.contains(x))
            .map(|(_, v)| v.clone())
            .unwrap_or_else(|| h.eval(x))
    };
    PLFunction::from_pointwise_verified(candidates, value).map_err(|probes| {
        Error::InternalMismatch(format!(
            "plateau function is not piecewise linear near {probes:?}"
        ))
    })
}
