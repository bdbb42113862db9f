//! Points on the s-dimensional torus.
//!
//! Coordinates carry their provenance: values constructed from integer data
//! (radical inverses, lattice nodes, rational or decimal literals) stay
//! exact rationals, while values that are inherently floating point
//! (irrational multiples) are stored as `f64`. Exactness is what makes the
//! digit extractors, interval counts, and lattice identities downstream
//! reproducible to the last bit, so it is preserved for as long as the data
//! allows.

use alloc::string::ToString;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A single coordinate in `[0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Coord {
    /// Exact rational value.
    Exact(BigRational),
    /// Floating-point value. The *exact* value represented is the binary
    /// rational the `f64` denotes; comparisons and digit extraction use that
    /// value with no tolerance.
    Approx(f64),
}

impl Coord {
    /// Exact rational from an integer fraction. Fails unless `0 <= p/q < 1`.
    pub fn from_ratio(p: i128, q: i128) -> Result<Self> {
        if q == 0 {
            return Err(Error::argument("zero denominator"));
        }
        let r = BigRational::new(BigInt::from(p), BigInt::from(q));
        Self::from_rational(r)
    }

    /// Exact rational coordinate. Fails unless `0 <= r < 1`.
    pub fn from_rational(r: BigRational) -> Result<Self> {
        if r.is_negative() || r >= BigRational::one() {
            return Err(Error::argument("coordinate outside [0,1)"));
        }
        Ok(Coord::Exact(r))
    }

    /// Floating-point coordinate. Fails unless `0 <= x < 1` and finite.
    pub fn from_f64(x: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&x) {
            return Err(Error::argument("coordinate outside [0,1)"));
        }
        Ok(Coord::Approx(x))
    }

    /// The coordinate as an exact rational: `Approx` values convert to the
    /// binary rational the float denotes.
    pub fn to_rational(&self) -> BigRational {
        match self {
            Coord::Exact(r) => r.clone(),
            Coord::Approx(x) => {
                BigRational::from_float(*x).expect("finite float has an exact rational value")
            }
        }
    }

    /// Nearest `f64` (exact rationals are rounded once, here).
    pub fn to_f64(&self) -> f64 {
        match self {
            Coord::Exact(r) => rational_to_f64(r),
            Coord::Approx(x) => *x,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Coord::Exact(_))
    }

    /// Total order on the exact values represented.
    pub fn cmp_value(&self, other: &Coord) -> Ordering {
        match (self, other) {
            (Coord::Approx(a), Coord::Approx(b)) => {
                a.partial_cmp(b).expect("coordinates are finite")
            }
            _ => self.to_rational().cmp(&other.to_rational()),
        }
    }

    /// Exact comparison against a rational bound.
    pub fn cmp_rational(&self, bound: &BigRational) -> Ordering {
        self.to_rational().cmp(bound)
    }

    /// Parses a coordinate token: a decimal literal (`0.25`, `.5`) or a
    /// rational `p/q`. Both forms are read exactly.
    pub fn parse(token: &str) -> Result<Self> {
        let token = token.trim();
        if token.is_empty() {
            return Err(Error::argument("empty coordinate token"));
        }
        if let Some((p, q)) = token.split_once('/') {
            let p: i128 = p
                .trim()
                .parse()
                .map_err(|_| Error::argument(format_parse(token)))?;
            let q: i128 = q
                .trim()
                .parse()
                .map_err(|_| Error::argument(format_parse(token)))?;
            return Coord::from_ratio(p, q);
        }
        let r = parse_decimal(token).ok_or_else(|| Error::argument(format_parse(token)))?;
        Coord::from_rational(r)
    }
}

fn format_parse(token: &str) -> alloc::string::String {
    let mut s = "cannot parse coordinate `".to_string();
    s.push_str(token);
    s.push('`');
    s
}

/// Exact decimal-literal parser: `d+.d*`, `.d+`, or `d+`.
fn parse_decimal(token: &str) -> Option<BigRational> {
    let (int_part, frac_part) = match token.split_once('.') {
        Some((i, f)) => (i, f),
        None => (token, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let digits_ok = |s: &str| s.bytes().all(|b| b.is_ascii_digit());
    if !digits_ok(int_part) || !digits_ok(frac_part) {
        return None;
    }
    let mut num = BigInt::zero();
    let ten = BigInt::from(10u32);
    for b in int_part.bytes().chain(frac_part.bytes()) {
        num = num * &ten + BigInt::from(b - b'0');
    }
    let mut den = BigInt::one();
    for _ in 0..frac_part.len() {
        den *= &ten;
    }
    Some(BigRational::new(num, den))
}

/// Correctly-rounded-enough `BigRational -> f64` conversion.
///
/// Works for arbitrary numerator/denominator sizes by scaling so the
/// quotient has at least 63 significant bits before a final float division.
/// The result is within one ulp of the true value, which every consumer
/// treats as a display/measurement rounding, never as an exactness source.
pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let neg = r.is_negative();
    let num = r.numer().magnitude().clone();
    let den = r.denom().magnitude().clone();
    let nb = num.bits() as i64;
    let db = den.bits() as i64;
    // Shift the numerator so num*2^shift / den has ~80 bits, then divide.
    let shift = (db - nb + 80).max(0) as u64;
    let scaled = num << shift;
    let (q, rem) = num_integer::Integer::div_rem(&scaled, &den);
    let mut x = q.to_f64().unwrap_or(f64::MAX);
    if !rem.is_zero() {
        // Nudge the quotient so ties cannot round the wrong way.
        x += 0.25;
    }
    // ldexp scales by the exact power of two with a single rounding, and
    // handles the subnormal range where a separate exp2 factor would
    // underflow to zero.
    let val = if shift > i32::MAX as u64 {
        0.0 // x < 2^81 shifted down by > 2^31 is far below the subnormals
    } else {
        libm::ldexp(x, -(shift as i32))
    };
    if neg {
        -val
    } else {
        val
    }
}

/// A point on the s-torus.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    coords: Vec<Coord>,
}

impl Point {
    pub fn new(coords: Vec<Coord>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::argument("points need at least one coordinate"));
        }
        Ok(Point { coords })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coord(&self, i: usize) -> &Coord {
        &self.coords[i]
    }

    pub fn coords(&self) -> &[Coord] {
        &self.coords
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        self.coords.iter().map(Coord::to_f64).collect()
    }
}
