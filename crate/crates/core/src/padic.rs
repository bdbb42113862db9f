//! b-adic integers, the Monna map, and the function systems built on them.
//!
//! For an integer base `b >= 2`, a b-adic integer is a digit sequence
//! `z = (z_0, z_1, …)` with `z_j` in `{0,…,b-1}`, thought of as
//! `sum z_j b^j`. Nonnegative integers have finitely many nonzero digits;
//! `-1` is the sequence of all `b-1` digits, and general negative integers
//! end in that repeating digit.
//!
//! The **Monna map** sends a b-adic integer into the unit interval by
//! reflecting digits across the radix point:
//!
//! ```text
//! phi_b(sum z_j b^j) = sum z_j b^{-j-1}   (mod 1)
//! ```
//!
//! On nonnegative integers this is the classical radical inverse. The
//! **pseudoinverse** `phi_b^+` maps `x` in `[0,1)` back to the b-adic
//! integer whose digits are the b-ary digits of `x`, always choosing the
//! *regular* expansion — the one that does not end in the repeating digit
//! `b-1`. Long division of an exact rational produces exactly that form,
//! which is why digit extraction here goes through exact arithmetic.
//!
//! Three families of functions on `[0,1)` share one evaluation scheme:
//! Walsh functions (digitwise character), b-adic functions (character of a
//! continuous-group translate, i.e. a character with carry), and the
//! trigonometric functions `x -> e(kx)`. All of them reduce to a root of
//! unity with an exactly computed rational exponent, so equal exponents
//! produce bitwise-equal complex values.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::points::{rational_to_f64, Coord, Point};

/// The eventually-repeating digit of a b-adic integer's expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tail {
    /// All further digits are `0` (nonnegative integers).
    Zero,
    /// All further digits are `b-1` (negative integers).
    Repeat,
}

/// A b-adic integer with an explicit finite head and a repeating tail.
///
/// The representation is canonical: the head never ends in the tail digit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BadicInteger {
    base: u64,
    head: Vec<u64>,
    tail: Tail,
}

impl BadicInteger {
    pub fn new(base: u64, head: Vec<u64>, tail: Tail) -> Result<Self> {
        check_base(base)?;
        if let Some(d) = head.iter().find(|&&d| d >= base) {
            return Err(Error::argument(format!("digit {d} not below base {base}")));
        }
        let mut z = BadicInteger { base, head, tail };
        z.canonicalize();
        Ok(z)
    }

    /// The nonnegative integer `k`.
    pub fn from_u64(base: u64, k: u64) -> Result<Self> {
        check_base(base)?;
        let mut head = Vec::new();
        let mut rest = k;
        while rest > 0 {
            head.push(rest % base);
            rest /= base;
        }
        Ok(BadicInteger {
            base,
            head,
            tail: Tail::Zero,
        })
    }

    /// The integer `n`, negative values taking the complement expansion
    /// ending in repeating `b-1` digits.
    pub fn from_i64(base: u64, n: i64) -> Result<Self> {
        if n >= 0 {
            return Self::from_u64(base, n as u64);
        }
        check_base(base)?;
        // -m  =  (b^P - m) + (-1) * b^P  for any P with b^P >= m: digits of
        // b^P - m followed by the all-(b-1) tail.
        let m = (n as i128).unsigned_abs();
        let mut p = 0u32;
        let mut pow: u128 = 1;
        while pow < m {
            pow *= base as u128;
            p += 1;
        }
        let mut head = Vec::with_capacity(p as usize);
        let mut rest = pow - m;
        for _ in 0..p {
            head.push((rest % base as u128) as u64);
            rest /= base as u128;
        }
        let mut z = BadicInteger {
            base,
            head,
            tail: Tail::Repeat,
        };
        z.canonicalize();
        Ok(z)
    }

    fn canonicalize(&mut self) {
        let tail_digit = match self.tail {
            Tail::Zero => 0,
            Tail::Repeat => self.base - 1,
        };
        while self.head.last() == Some(&tail_digit) {
            self.head.pop();
        }
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn head(&self) -> &[u64] {
        &self.head
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    /// Digit at position `j` (0 = least significant).
    pub fn digit(&self, j: usize) -> u64 {
        self.head.get(j).copied().unwrap_or(match self.tail {
            Tail::Zero => 0,
            Tail::Repeat => self.base - 1,
        })
    }

    /// Number of explicitly stored digits.
    pub fn head_len(&self) -> usize {
        self.head.len()
    }

    /// The integer value, for expansions with a zero tail.
    pub fn to_integer(&self) -> Option<u128> {
        if self.tail != Tail::Zero {
            return None;
        }
        let mut acc: u128 = 0;
        for &d in self.head.iter().rev() {
            acc = acc.checked_mul(self.base as u128)?.checked_add(d as u128)?;
        }
        Some(acc)
    }

    /// Value of the first `g` digits, `sum_{j<g} z_j b^j`, as a big integer.
    pub fn truncated_value(&self, g: usize) -> BigUint {
        let mut acc = BigUint::zero();
        for j in (0..g).rev() {
            acc = acc * self.base + self.digit(j);
        }
        acc
    }

    /// Monna map of the truncated expansion, exactly: the digits beyond
    /// position `precision` contribute `0` (zero tail) or exactly
    /// `b^-precision` (repeating tail), so the value is a rational with
    /// denominator `b^precision`, reduced mod 1.
    pub fn monna_map_rational(&self, precision: usize) -> BigRational {
        let p = precision.max(self.head.len());
        // Digit-reversed value of the first p digits.
        let mut rev = BigUint::zero();
        for j in 0..p {
            rev = rev * self.base + self.digit(j);
        }
        if self.tail == Tail::Repeat {
            rev += 1u32;
        }
        let den = BigUint::from(self.base).pow(p as u32);
        // The all-(b-1) expansion maps to 1, i.e. 0 mod 1.
        if rev == den {
            return BigRational::zero();
        }
        BigRational::new(BigInt::from(rev), BigInt::from(den))
    }

    /// Monna map as a float (one rounding of the exact rational).
    pub fn monna_map(&self, precision: usize) -> f64 {
        rational_to_f64(&self.monna_map_rational(precision))
    }
}

fn check_base(base: u64) -> Result<()> {
    if base < 2 {
        return Err(Error::argument("base must be >= 2"));
    }
    if base > 1 << 31 {
        return Err(Error::argument("base too large"));
    }
    Ok(())
}

/// Number of base-`b` digits of `k` (`0` has none).
pub fn digit_length(k: u64, b: u64) -> u32 {
    let mut len = 0;
    let mut rest = k;
    while rest > 0 {
        rest /= b;
        len += 1;
    }
    len
}

/// Base-`b` digits of `k`, least significant first.
pub fn digits_of(k: u64, b: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut rest = k;
    while rest > 0 {
        out.push(rest % b);
        rest /= b;
    }
    out
}

/// Exact radical inverse `phi_b(k)` of a nonnegative integer.
pub fn radical_inverse_rational(k: u64, b: u64) -> BigRational {
    let digits = digits_of(k, b);
    let mut rev = BigUint::zero();
    for &d in &digits {
        rev = rev * b + d;
    }
    let den = BigUint::from(b).pow(digits.len() as u32);
    BigRational::new(BigInt::from(rev), BigInt::from(den))
}

/// First `count` base-`b` digits of `x` in `[0,1)`, least significant
/// position of the *fractional* expansion first: `x = sum digits[j] b^{-j-1}`.
///
/// Digits come from exact long division of the rational value (floats are
/// read as the exact binary rational they denote), which always yields the
/// regular expansion — the one not ending in repeating `b-1` digits.
pub fn regular_digits(x: &Coord, b: u64, count: usize) -> Result<Vec<u64>> {
    check_base(b)?;
    let r = x.to_rational();
    if r.is_negative() || r >= BigRational::one() {
        return Err(Error::argument("coordinate outside [0,1)"));
    }
    let mut p = r.numer().magnitude().clone();
    let q = r.denom().magnitude().clone();
    let mut out = Vec::with_capacity(count);
    let base = BigUint::from(b);
    for _ in 0..count {
        p *= &base;
        let (d, rem) = num_integer::Integer::div_rem(&p, &q);
        out.push(d.to_u64().expect("digit is below the base"));
        p = rem;
    }
    Ok(out)
}

/// Monna pseudoinverse `phi_b^+`: the b-adic integer whose digits are the
/// regular b-ary digits of `x`, truncated at `precision` digits.
pub fn monna_pseudoinverse(x: &Coord, b: u64, precision: usize) -> Result<BadicInteger> {
    let head = regular_digits(x, b, precision)?;
    BadicInteger::new(b, head, Tail::Zero)
}

// ---------------------------------------------------------------------------
// Roots of unity with exact rational exponents.
// ---------------------------------------------------------------------------

/// `e(num/den) = exp(2*pi*i*num/den)`, with the exponent reduced to lowest
/// terms first so equal rationals give bitwise-equal results. Quarter turns
/// are returned exactly.
pub fn e_unit(num: i128, den: i128) -> Complex64 {
    debug_assert!(den > 0);
    let mut n = num.rem_euclid(den);
    let mut d = den;
    let g = gcd_i128(n, d);
    if g > 1 {
        n /= g;
        d /= g;
    }
    match d {
        1 => Complex64::new(1.0, 0.0),
        2 => Complex64::new(-1.0, 0.0),
        4 => {
            if n == 1 {
                Complex64::new(0.0, 1.0)
            } else {
                Complex64::new(0.0, -1.0)
            }
        }
        _ => {
            let theta = core::f64::consts::TAU * (n as f64 / d as f64);
            Complex64::new(libm::cos(theta), libm::sin(theta))
        }
    }
}

/// `e(t) = exp(2*pi*i*t)` for a real number of turns `t` in `[0,1)`.
pub fn e_turns(t: f64) -> Complex64 {
    let theta = core::f64::consts::TAU * t;
    Complex64::new(libm::cos(theta), libm::sin(theta))
}

fn gcd_i128(mut a: i128, mut b: i128) -> i128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.abs()
}

// ---------------------------------------------------------------------------
// Characters and the three base function families.
// ---------------------------------------------------------------------------

/// The continuous character `chi_k(z) = e(phi_b(k) * (z mod b^g))` of the
/// b-adic integers, where `g` is the digit length of `k`.
///
/// With `a` the digit reversal of `k` (so `phi_b(k) = a / b^g`) and
/// `m = sum_{j<g} z_j b^j`, the value is `e(a*m / b^g)`, computed in exact
/// integer arithmetic.
pub fn character(k: u64, z: &BadicInteger) -> Result<Complex64> {
    let b = z.base();
    let g = digit_length(k, b) as usize;
    if g == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    // b^g, a, and m all fit u128 whenever b^g <= 2^63; beyond that fall
    // back to big-integer arithmetic (the reduced exponent still does).
    if let Some(modulus) = checked_pow_u128(b, g as u32, 1 << 63) {
        let mut a: u128 = 0;
        let kd = digits_of(k, b);
        for &d in &kd {
            a = a * b as u128 + d as u128;
        }
        let mut m: u128 = 0;
        for j in (0..g).rev() {
            m = (m * b as u128 + z.digit(j) as u128) % modulus;
        }
        let num = (a % modulus) * m % modulus;
        Ok(e_unit(num as i128, modulus as i128))
    } else {
        let modulus = BigUint::from(b).pow(g as u32);
        let kd = digits_of(k, b);
        let mut a = BigUint::zero();
        for &d in &kd {
            a = a * b + d;
        }
        let m = z.truncated_value(g);
        let num = a * m % &modulus;
        let g2 = num_integer::Integer::gcd(&num, &modulus);
        let (num, modulus) = (num / &g2, modulus / &g2);
        let t = BigRational::new(BigInt::from(num), BigInt::from(modulus));
        Ok(e_turns(rational_to_f64(&t)))
    }
}

fn checked_pow_u128(b: u64, g: u32, cap: u128) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..g {
        acc = acc.checked_mul(b as u128)?;
        if acc > cap {
            return None;
        }
    }
    Some(acc)
}

/// The `k`-th base-`b` Walsh function at `x`:
/// `w_k(x) = e((sum_j k_j x_j) / b)` over the digits of `k` and of `x`.
pub fn walsh(k: u64, b: u64, x: &Coord) -> Result<Complex64> {
    check_base(b)?;
    let kd = digits_of(k, b);
    if kd.is_empty() {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let xd = regular_digits(x, b, kd.len())?;
    let mut acc: u128 = 0;
    for (kj, xj) in kd.iter().zip(&xd) {
        acc = (acc + (*kj as u128) * (*xj as u128)) % b as u128;
    }
    Ok(e_unit(acc as i128, b as i128))
}

/// The `k`-th base-`b` b-adic function at `x`:
/// `gamma_k(x) = chi_k(phi_b^+(x))` — a character evaluated on the digit
/// expansion of `x`, i.e. a Walsh-like function *with carry*.
pub fn badic_function(k: u64, b: u64, x: &Coord) -> Result<Complex64> {
    check_base(b)?;
    let g = digit_length(k, b) as usize;
    let z = monna_pseudoinverse(x, b, g)?;
    character(k, &z)
}

/// The trigonometric function `e_k(x) = e(kx)`.
///
/// Exact coordinates use exact exponent reduction (`k*p mod q` over `q`);
/// floats use an error-free two-product split of `k*x`, so the angle is
/// accurate to a few units in the last place either way.
pub fn trig(k: i64, x: &Coord) -> Complex64 {
    match x {
        Coord::Exact(r) => {
            let (num, den) = (r.numer(), r.denom());
            if let (Some(p), Some(q)) = (num.to_i128(), den.to_i128()) {
                if let Some(kp) = (k as i128).checked_mul(p) {
                    return e_unit(kp.rem_euclid(q), q);
                }
            }
            // Oversized rational: reduce k*p mod q in big arithmetic.
            let kp = BigInt::from(k) * num;
            let m = num_integer::Integer::mod_floor(&kp, den);
            let t = BigRational::new(m, den.clone());
            e_turns(rational_to_f64(&t))
        }
        Coord::Approx(x) => {
            let kf = k as f64;
            let hi = kf * x;
            let lo = libm::fma(kf, *x, -hi);
            let mut t = (hi - libm::floor(hi)) + lo;
            if t < 0.0 {
                t += 1.0;
            } else if t >= 1.0 {
                t -= 1.0;
            }
            e_turns(t)
        }
    }
}

// ---------------------------------------------------------------------------
// Mixed product systems.
// ---------------------------------------------------------------------------

/// Which one-dimensional family a coordinate uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemComponent {
    Walsh { base: u64 },
    Badic { base: u64 },
    Trig,
}

impl SystemComponent {
    /// Index domain for this component: nonnegative for digit systems,
    /// all integers for the trigonometric one.
    pub fn signature(&self) -> Signature {
        match self {
            SystemComponent::Walsh { .. } | SystemComponent::Badic { .. } => Signature::NonNeg,
            SystemComponent::Trig => Signature::Signed,
        }
    }
}

/// Per-coordinate index domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Signature {
    /// `0, 1, 2, …`
    NonNeg,
    /// `1, 2, 3, …`
    Positive,
    /// `…, -1, 0, 1, …`
    Signed,
}

/// A product system on the `s`-torus: each slot pairs a one-dimensional
/// family with the point coordinate it reads.
///
/// Slots are kept in canonical block order — Walsh components first, then
/// b-adic, then trigonometric — matching the index-vector layout
/// `(k_walsh | k_badic | k_trig)`. The `assignment` permutation decouples
/// that layout from the coordinate order of the points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HybridSystemConfig {
    components: Vec<SystemComponent>,
    assignment: Vec<usize>,
}

impl HybridSystemConfig {
    /// Builds a system from block data: `walsh_bases` and `badic_bases`
    /// give the digit components, `trig_dim` the number of trigonometric
    /// slots, and `assignment[slot]` the point coordinate slot reads.
    pub fn new(
        walsh_bases: &[u64],
        badic_bases: &[u64],
        trig_dim: usize,
        assignment: Vec<usize>,
    ) -> Result<Self> {
        let mut components = Vec::new();
        for &b in walsh_bases {
            check_base(b)?;
            components.push(SystemComponent::Walsh { base: b });
        }
        for &b in badic_bases {
            check_base(b)?;
            components.push(SystemComponent::Badic { base: b });
        }
        for _ in 0..trig_dim {
            components.push(SystemComponent::Trig);
        }
        if components.is_empty() {
            return Err(Error::argument("system needs at least one component"));
        }
        let s = components.len();
        if assignment.len() != s {
            return Err(Error::argument("assignment length must equal dimension"));
        }
        let mut seen = vec![false; s];
        for &c in &assignment {
            if c >= s || seen[c] {
                return Err(Error::argument("assignment must be a permutation"));
            }
            seen[c] = true;
        }
        Ok(HybridSystemConfig {
            components,
            assignment,
        })
    }

    /// Identity-assignment constructor from block data.
    pub fn blocks(walsh_bases: &[u64], badic_bases: &[u64], trig_dim: usize) -> Result<Self> {
        let s = walsh_bases.len() + badic_bases.len() + trig_dim;
        Self::new(walsh_bases, badic_bases, trig_dim, (0..s).collect())
    }

    /// Builds a system listed coordinate by coordinate: `per_coord[i]` is
    /// the family evaluated on coordinate `i`. Slots are re-sorted into
    /// canonical block order with the matching assignment.
    pub fn per_coordinate(per_coord: &[SystemComponent]) -> Result<Self> {
        let mut walsh = Vec::new();
        let mut badic = Vec::new();
        let mut trig = 0usize;
        let mut assignment = Vec::new();
        for rank in 0..3 {
            for (i, c) in per_coord.iter().enumerate() {
                match (rank, c) {
                    (0, SystemComponent::Walsh { base }) => {
                        walsh.push(*base);
                        assignment.push(i);
                    }
                    (1, SystemComponent::Badic { base }) => {
                        badic.push(*base);
                        assignment.push(i);
                    }
                    (2, SystemComponent::Trig) => {
                        trig += 1;
                        assignment.push(i);
                    }
                    _ => {}
                }
            }
        }
        Self::new(&walsh, &badic, trig, assignment)
    }

    /// A pure trigonometric system in dimension `s`.
    pub fn pure_trig(s: usize) -> Result<Self> {
        Self::blocks(&[], &[], s)
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[SystemComponent] {
        &self.components
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Index domain, slot by slot.
    pub fn signature(&self) -> Vec<Signature> {
        self.components.iter().map(|c| c.signature()).collect()
    }

    /// Evaluates the product function `xi_k` at a point.
    pub fn eval(&self, k: &[i64], x: &Point) -> Result<Complex64> {
        if k.len() != self.dim() {
            return Err(Error::argument("index length must equal dimension"));
        }
        if x.dim() != self.dim() {
            return Err(Error::argument(
                "point dimension must equal system dimension",
            ));
        }
        let mut acc = Complex64::new(1.0, 0.0);
        for (slot, comp) in self.components.iter().enumerate() {
            let coord = x.coord(self.assignment[slot]);
            let ki = k[slot];
            let factor = match comp {
                SystemComponent::Walsh { base } => {
                    let ki = u64::try_from(ki)
                        .map_err(|_| Error::argument("Walsh indices must be nonnegative"))?;
                    walsh(ki, *base, coord)?
                }
                SystemComponent::Badic { base } => {
                    let ki = u64::try_from(ki)
                        .map_err(|_| Error::argument("b-adic indices must be nonnegative"))?;
                    badic_function(ki, *base, coord)?
                }
                SystemComponent::Trig => trig(ki, coord),
            };
            acc *= factor;
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coord_ratio(p: i128, q: i128) -> Coord {
        Coord::from_ratio(p, q).unwrap()
    }

    fn approx_eq(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm_sqr() <= tol * tol
    }

    #[test]
    fn monna_map_radical_inverse_values() {
        // phi_2(6) = 0.011_2 = 3/8.
        let z = BadicInteger::from_u64(2, 6).unwrap();
        assert_eq!(
            z.monna_map_rational(0),
            BigRational::new(BigInt::from(3), BigInt::from(8))
        );
        // phi_2(5) = 0.101_2 = 5/8,  phi_3(5) = (2,1) digits -> 2/3 + 1/9 = 7/9.
        assert_eq!(
            radical_inverse_rational(5, 2),
            BigRational::new(BigInt::from(5), BigInt::from(8))
        );
        assert_eq!(
            radical_inverse_rational(5, 3),
            BigRational::new(BigInt::from(7), BigInt::from(9))
        );
    }

    #[test]
    fn monna_map_of_minus_one_wraps_to_zero() {
        // -1 has the all-(b-1) expansion; its image telescopes to 1 = 0 mod 1.
        for b in [2u64, 3, 10] {
            let z = BadicInteger::from_i64(b, -1).unwrap();
            assert_eq!(z.head_len(), 0);
            assert_eq!(z.tail(), Tail::Repeat);
            assert!(z.monna_map_rational(8).is_zero());
        }
    }

    #[test]
    fn negative_integers_have_complement_digits() {
        // -3 base 2: ...11101 -> digits 1,0,1,1,1,... head (1,0), tail repeat.
        let z = BadicInteger::from_i64(2, -3).unwrap();
        assert_eq!(z.head(), &[1, 0]);
        assert_eq!(z.tail(), Tail::Repeat);
        assert_eq!(z.digit(2), 1);
        assert_eq!(z.digit(17), 1);
        // Adding 3 digitwise with carry gives 0: check value mod 2^6.
        let v = z.truncated_value(6);
        assert_eq!((v + 3u32) % BigUint::from(64u32), BigUint::zero());
    }

    #[test]
    fn pseudoinverse_extracts_regular_digits() {
        // 0.75 = 0.11_2 -> head (1,1); value 3.
        let z = monna_pseudoinverse(&coord_ratio(3, 4), 2, 8).unwrap();
        assert_eq!(z.to_integer(), Some(3));
        // 1/3 base 2: 0.010101... -> digits 0,1,0,1,0,1.
        assert_eq!(
            regular_digits(&coord_ratio(1, 3), 2, 6).unwrap(),
            vec![0, 1, 0, 1, 0, 1]
        );
        // 1/10 in base 10 terminates: regular form is (1,0,0), never (0,9,9).
        assert_eq!(
            regular_digits(&coord_ratio(1, 10), 10, 3).unwrap(),
            vec![1, 0, 0]
        );
        // The float 0.1 is slightly above 1/10; its first digits agree.
        assert_eq!(
            regular_digits(&Coord::from_f64(0.1).unwrap(), 10, 3).unwrap(),
            vec![1, 0, 0]
        );
    }

    #[test]
    fn round_trip_monna_then_pseudoinverse_on_integers() {
        for b in [2u64, 3, 10] {
            for k in 0..200u64 {
                let z = BadicInteger::from_u64(b, k).unwrap();
                let x = Coord::from_rational(z.monna_map_rational(0)).unwrap();
                let p = digit_length(k, b) as usize;
                let back = monna_pseudoinverse(&x, b, p + 4).unwrap();
                assert_eq!(back.to_integer(), Some(k as u128));
            }
        }
    }

    #[test]
    fn round_trip_pseudoinverse_then_monna_on_badic_rationals() {
        // x = a / b^g round-trips exactly once precision reaches g.
        for b in [2u64, 3, 10] {
            let g = 5u32;
            let den = (b as i128).pow(g);
            for a in (0..den).step_by((den / 37).max(1) as usize) {
                let x = coord_ratio(a, den);
                let z = monna_pseudoinverse(&x, b, g as usize).unwrap();
                assert_eq!(z.monna_map_rational(g as usize), x.to_rational());
            }
        }
    }

    #[test]
    fn character_example_quarter_turn() {
        // b=2, k=2 (digits 01 -> phi(2)=1/4), z=3: e(3/4) = -i exactly.
        let z = BadicInteger::from_u64(2, 3).unwrap();
        let v = character(2, &z).unwrap();
        assert_eq!(v, Complex64::new(0.0, -1.0));
    }

    #[test]
    fn character_is_additive_under_carry_addition() {
        // chi_k(z + z') = chi_k(z) chi_k(z'), addition with carry.
        for b in [2u64, 3] {
            for k in 1..20u64 {
                let g = digit_length(k, b) as usize;
                let modulus = (b as u128).pow(g as u32);
                for z1 in 0..modulus.min(30) {
                    for z2 in 0..modulus.min(30) {
                        let a1 = BadicInteger::from_u64(b, z1 as u64).unwrap();
                        let a2 = BadicInteger::from_u64(b, z2 as u64).unwrap();
                        let sum = BadicInteger::from_u64(b, ((z1 + z2) % modulus) as u64).unwrap();
                        let lhs = character(k, &sum).unwrap();
                        let rhs = character(k, &a1).unwrap() * character(k, &a2).unwrap();
                        assert!(approx_eq(lhs, rhs, 1e-12), "b={b} k={k} z={z1},{z2}");
                    }
                }
            }
        }
    }

    #[test]
    fn walsh_examples() {
        // b=2, k=3, x=1/4: digits x=(0,1), k=(1,1): e(1/2) = -1.
        let v = walsh(3, 2, &coord_ratio(1, 4)).unwrap();
        assert_eq!(v, Complex64::new(-1.0, 0.0));
        // k=0 is constant 1.
        let v = walsh(0, 2, &coord_ratio(1, 3)).unwrap();
        assert_eq!(v, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn walsh_is_multiplicative_in_k() {
        // w_k(x) w_l(x) = w_{k xor l}(x) with digitwise mod-b index addition.
        use crate::digits::DigitVector;
        for b in [2u64, 3] {
            for k in 0..15u64 {
                for l in 0..15u64 {
                    let len = digit_length(k.max(l).max(1), b) as usize + 1;
                    let kd = {
                        let mut d = digits_of(k, b);
                        d.resize(len, 0);
                        DigitVector::new(b, d).unwrap()
                    };
                    let ld = {
                        let mut d = digits_of(l, b);
                        d.resize(len, 0);
                        DigitVector::new(b, d).unwrap()
                    };
                    let kxl = kd.xor_add(&ld).unwrap();
                    let mut m = 0u64;
                    for &d in kxl.digits().iter().rev() {
                        m = m * b + d;
                    }
                    for x in [coord_ratio(1, 3), coord_ratio(3, 7), coord_ratio(5, 8)] {
                        let lhs = walsh(k, b, &x).unwrap() * walsh(l, b, &x).unwrap();
                        let rhs = walsh(m, b, &x).unwrap();
                        assert!(approx_eq(lhs, rhs, 1e-12), "b={b} k={k} l={l}");
                    }
                }
            }
        }
    }

    #[test]
    fn walsh_and_badic_agree_for_single_digit_indices() {
        for b in [2u64, 3, 5] {
            for k in 0..b.min(5) {
                for x in [coord_ratio(1, 7), coord_ratio(2, 9), coord_ratio(11, 16)] {
                    let w = walsh(k, b, &x).unwrap();
                    let g = badic_function(k, b, &x).unwrap();
                    assert!(approx_eq(w, g, 1e-12));
                }
            }
        }
    }

    #[test]
    fn walsh_and_badic_differ_for_multi_digit_indices() {
        // k = 3 base 2 (two nonzero digits): the carry shows up on a
        // resolution-3 grid.
        let mut found = false;
        for j in 0..8 {
            let x = coord_ratio(j, 8);
            let w = walsh(3, 2, &x).unwrap();
            let g = badic_function(3, 2, &x).unwrap();
            if (w - g).norm_sqr() > 0.01 {
                found = true;
                break;
            }
        }
        assert!(found, "carry must separate the systems for k=3");
    }

    #[test]
    fn trig_examples() {
        // e(-2 * 1/4) = e(-1/2) = -1.
        let v = trig(-2, &coord_ratio(1, 4));
        assert_eq!(v, Complex64::new(-1.0, 0.0));
        // e(1 * 1/4) = i.
        let v = trig(1, &coord_ratio(1, 4));
        assert_eq!(v, Complex64::new(0.0, 1.0));
        // Float path stays within a few ulps of the exact path.
        let exact = trig(7, &coord_ratio(1, 3));
        let float = trig(7, &Coord::from_f64(1.0 / 3.0).unwrap());
        assert!(approx_eq(exact, float, 1e-14));
    }

    #[test]
    fn hybrid_product_example() {
        // walsh(2) on coord 0, trig on coord 1; k=(1,-1), x=(1/2, 1/4):
        // w_1(1/2) = -1, e(-1/4) = -i, product = i.
        let sys = HybridSystemConfig::blocks(&[2], &[], 1).unwrap();
        let x = Point::new(vec![coord_ratio(1, 2), coord_ratio(1, 4)]).unwrap();
        let v = sys.eval(&[1, -1], &x).unwrap();
        assert_eq!(v, Complex64::new(0.0, 1.0));
    }

    #[test]
    fn hybrid_assignment_permutes_coordinates() {
        // Same system, coordinates swapped via assignment.
        let sys = HybridSystemConfig::new(&[2], &[], 1, vec![1, 0]).unwrap();
        let x = Point::new(vec![coord_ratio(1, 4), coord_ratio(1, 2)]).unwrap();
        let v = sys.eval(&[1, -1], &x).unwrap();
        assert_eq!(v, Complex64::new(0.0, 1.0));
    }

    #[test]
    fn per_coordinate_constructor_matches_blocks() {
        let a = HybridSystemConfig::per_coordinate(&[
            SystemComponent::Trig,
            SystemComponent::Walsh { base: 2 },
        ])
        .unwrap();
        // Canonical block order: walsh slot first reading coord 1, trig
        // slot second reading coord 0.
        assert_eq!(a.assignment(), &[1, 0]);
        let x = Point::new(vec![coord_ratio(1, 4), coord_ratio(1, 2)]).unwrap();
        assert_eq!(a.eval(&[1, -1], &x).unwrap(), Complex64::new(0.0, 1.0));
    }

    #[test]
    fn orthonormality_on_product_grids() {
        // Exact quadrature: digit systems over the full resolution-4 grid,
        // trigonometric over an equispaced grid finer than any |k-l|.
        // Per-coordinate Gram matrices multiply into the product system's.
        let b2: Vec<u64> = (0..4).collect(); // walsh base 2, digit length <= 2
        let mut gram_w = vec![vec![Complex64::default(); 4]; 4];
        let grid: Vec<Coord> = (0..16).map(|j| coord_ratio(j, 16)).collect();
        for (i, &k) in b2.iter().enumerate() {
            for (j, &l) in b2.iter().enumerate() {
                let mut acc = Complex64::default();
                for x in &grid {
                    acc += walsh(k, 2, x).unwrap() * walsh(l, 2, x).unwrap().conj();
                }
                gram_w[i][j] = acc / 16.0;
            }
        }
        for (i, row) in gram_w.iter().enumerate() {
            for (j, &entry) in row.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (entry - expect).norm_sqr() < 1e-18,
                    "walsh gram ({i},{j}) = {:?}",
                    entry
                );
            }
        }
        // b-adic base 3, indices of digit length <= 2 on the 3^4 grid.
        let grid3: Vec<Coord> = (0..81).map(|j| coord_ratio(j, 81)).collect();
        for k in 0..9u64 {
            for l in 0..9u64 {
                let mut acc = Complex64::default();
                for x in &grid3 {
                    acc +=
                        badic_function(k, 3, x).unwrap() * badic_function(l, 3, x).unwrap().conj();
                }
                acc /= 81.0;
                let expect = if k == l { 1.0 } else { 0.0 };
                assert!(
                    (acc - expect).norm_sqr() < 1e-18,
                    "badic gram ({k},{l}) = {acc:?}"
                );
            }
        }
        // trig indices |k| <= 3 on a 28-point grid (>= 4*max|k-l| + 4).
        let gridt: Vec<Coord> = (0..28).map(|j| coord_ratio(j, 28)).collect();
        for k in -3i64..=3 {
            for l in -3i64..=3 {
                let mut acc = Complex64::default();
                for x in &gridt {
                    acc += trig(k, x) * trig(l, x).conj();
                }
                acc /= 28.0;
                let expect = if k == l { 1.0 } else { 0.0 };
                assert!(
                    (acc - expect).norm_sqr() < 1e-24,
                    "trig gram ({k},{l}) = {acc:?}"
                );
            }
        }
    }

    #[test]
    fn e_unit_reduces_before_evaluating() {
        // Equal angles in different representations are bitwise equal.
        assert_eq!(e_unit(1, 4), e_unit(25, 100));
        assert_eq!(e_unit(3, 12), e_unit(1, 4));
        assert_eq!(e_unit(-1, 4), e_unit(3, 4));
        assert_eq!(e_unit(0, 7), Complex64::new(1.0, 0.0));
        assert_eq!(e_unit(7, 14), Complex64::new(-1.0, 0.0));
    }
}
