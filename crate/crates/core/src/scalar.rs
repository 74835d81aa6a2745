//! Exact scalars: arbitrary precision rationals, the extended line and closed
//! extended intervals.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Canonical arbitrary precision rational (reduced, positive denominator).
pub type Rational = num_rational::BigRational;

/// Builds `num / den` in canonical form. Panics on a zero denominator.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Builds the integer `n` as a rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Lossy conversion used at the boundary with the floating point solver.
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Ratios of huge integers can overflow the direct conversion.
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Exact conversion of a finite `f64`. Returns `None` for NaN or infinities.
pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

/// Error produced when a rational literal cannot be read.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseRationalError(pub String);

impl fmt::Display for ParseRationalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid rational literal `{}`", self.0)
    }
}

impl std::error::Error for ParseRationalError {}

/// Parses `"7"`, `"-3/4"`, `"0.125"`, `"1.5e-3"` exactly.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let s = text.trim();
    let err = || ParseRationalError(text.to_string());
    if s.is_empty() {
        return Err(err());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| err())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(n, d));
    }
    parse_decimal(s).ok_or_else(err)
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole
        .chars()
        .chain(frac.chars())
        .all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let all: String = format!("{whole}{frac}");
    let mut value =
        Rational::from_integer(BigInt::from_str(if all.is_empty() { "0" } else { &all }).ok()?);
    let shift = exponent - frac.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    let scale = num_traits::pow(ten, shift.unsigned_abs() as usize);
    if shift >= 0 {
        value *= scale;
    } else {
        value /= scale;
    }
    Some(if negative { -value } else { value })
}

/// Formats as `n` or `n/d`.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// A rational or one of the two infinities.
///
/// The derived order puts `NegInf` below every finite value and `PosInf` above.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtendedRational {
    NegInf,
    Finite(Rational),
    PosInf,
}

impl ExtendedRational {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            ExtendedRational::Finite(r) => Some(r),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtendedRational::Finite(_))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExtendedRational::NegInf => f64::NEG_INFINITY,
            ExtendedRational::Finite(r) => to_f64(r),
            ExtendedRational::PosInf => f64::INFINITY,
        }
    }

    /// Negation; swaps the infinities.
    pub fn neg(&self) -> Self {
        match self {
            ExtendedRational::NegInf => ExtendedRational::PosInf,
            ExtendedRational::Finite(r) => ExtendedRational::Finite(-r),
            ExtendedRational::PosInf => ExtendedRational::NegInf,
        }
    }
}

impl From<Rational> for ExtendedRational {
    fn from(r: Rational) -> Self {
        ExtendedRational::Finite(r)
    }
}

impl PartialEq<Rational> for ExtendedRational {
    fn eq(&self, other: &Rational) -> bool {
        matches!(self, ExtendedRational::Finite(r) if r == other)
    }
}

impl PartialOrd<Rational> for ExtendedRational {
    fn partial_cmp(&self, other: &Rational) -> Option<std::cmp::Ordering> {
        use std::cmp::Ordering;
        Some(match self {
            ExtendedRational::NegInf => Ordering::Less,
            ExtendedRational::Finite(r) => r.cmp(other),
            ExtendedRational::PosInf => Ordering::Greater,
        })
    }
}

impl fmt::Display for ExtendedRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedRational::NegInf => f.write_str("-inf"),
            ExtendedRational::Finite(r) => f.write_str(&format_rational(r)),
            ExtendedRational::PosInf => f.write_str("+inf"),
        }
    }
}

/// The closed set `[lo, hi]` of the extended line, `lo <= hi`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExtendedInterval {
    lo: ExtendedRational,
    hi: ExtendedRational,
}

impl ExtendedInterval {
    /// Returns `None` when `lo > hi`.
    pub fn new(lo: ExtendedRational, hi: ExtendedRational) -> Option<Self> {
        (lo <= hi).then_some(ExtendedInterval { lo, hi })
    }

    pub fn point(x: ExtendedRational) -> Self {
        ExtendedInterval {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn finite(lo: Rational, hi: Rational) -> Option<Self> {
        Self::new(lo.into(), hi.into())
    }

    pub fn lo(&self) -> &ExtendedRational {
        &self.lo
    }

    pub fn hi(&self) -> &ExtendedRational {
        &self.hi
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.lo <= *x && !(self.hi < *x)
    }

    pub fn contains_extended(&self, x: &ExtendedRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    /// Whether the open interiors `(lo, hi)` of the two intervals meet.
    pub fn interiors_meet(&self, other: &ExtendedInterval) -> bool {
        let lo = std::cmp::max(&self.lo, &other.lo);
        let hi = std::cmp::min(&self.hi, &other.hi);
        lo < hi
    }

    pub fn intersection(&self, other: &ExtendedInterval) -> Option<ExtendedInterval> {
        let lo = std::cmp::max(&self.lo, &other.lo).clone();
        let hi = std::cmp::min(&self.hi, &other.hi).clone();
        Self::new(lo, hi)
    }
}

impl fmt::Display for ExtendedInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Sign of a rational as -1, 0 or 1.
pub fn signum(r: &Rational) -> i32 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}
