//! Digit vectors and the finite abelian groups their addition laws generate.
//!
//! A digit vector of length `m` over base `b` is an element of
//! `{0,…,b-1}^m`. Several group structures live on this set; they are all
//! described by a partition of `m`:
//!
//! * the partition `(1,1,…,1)` adds digits componentwise mod `b`
//!   (digitwise or "xor" addition), giving `(Z/bZ)^m`;
//! * the partition `(m)` adds the integer values with carry propagation,
//!   giving `Z/b^m Z`;
//! * a general partition `(t_1 >= t_2 >= … >= t_r)` with `t_1+…+t_r = m`
//!   splits the positions into consecutive blocks (least significant block
//!   first) and carries *within* each block only, giving the direct product
//!   `Z/b^{t_1} Z × … × Z/b^{t_r} Z`.
//!
//! For prime power orders these products exhaust the abelian groups of
//! order `b^m` up to isomorphism, and distinct partitions give
//! non-isomorphic groups; the multiset of element orders separates them,
//! and the maximal element order is `b^{t_1}`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// A digit vector: `digits[j]` is the digit at position `j`, least
/// significant first, each in `0..base`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DigitVector {
    base: u64,
    digits: Vec<u64>,
}

impl DigitVector {
    pub fn new(base: u64, digits: Vec<u64>) -> Result<Self> {
        check_base(base)?;
        if digits.is_empty() {
            return Err(Error::argument("digit vector must have length >= 1"));
        }
        if let Some(d) = digits.iter().find(|&&d| d >= base) {
            return Err(Error::argument(format!("digit {d} not below base {base}")));
        }
        Ok(DigitVector { base, digits })
    }

    /// The zero vector of length `m`.
    pub fn zero(base: u64, m: usize) -> Result<Self> {
        check_base(base)?;
        if m == 0 {
            return Err(Error::argument("digit vector must have length >= 1"));
        }
        Ok(DigitVector {
            base,
            digits: vec![0; m],
        })
    }

    /// The base-`b` expansion of `value mod b^m`, least significant first.
    pub fn from_value(base: u64, m: usize, value: u128) -> Result<Self> {
        let mut v = Self::zero(base, m)?;
        let mut rest = value;
        for d in v.digits.iter_mut() {
            *d = (rest % base as u128) as u64;
            rest /= base as u128;
        }
        Ok(v)
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    pub fn is_zero(&self) -> bool {
        self.digits.iter().all(|&d| d == 0)
    }

    /// Integer value `sum_j digits[j] * b^j`. Fails if it does not fit
    /// into `u128`.
    pub fn value(&self) -> Result<u128> {
        let mut acc: u128 = 0;
        for &d in self.digits.iter().rev() {
            acc = acc
                .checked_mul(self.base as u128)
                .and_then(|a| a.checked_add(d as u128))
                .ok_or_else(|| Error::resource("digit vector value exceeds u128", None))?;
        }
        Ok(acc)
    }

    /// Digitwise addition mod `b` — the carry-free law.
    pub fn xor_add(&self, other: &DigitVector) -> Result<DigitVector> {
        self.check_compatible(other)?;
        let digits = self
            .digits
            .iter()
            .zip(&other.digits)
            .map(|(&a, &b)| (a + b) % self.base)
            .collect();
        Ok(DigitVector {
            base: self.base,
            digits,
        })
    }

    /// Digitwise subtraction mod `b` (inverse of [`Self::xor_add`]).
    pub fn xor_sub(&self, other: &DigitVector) -> Result<DigitVector> {
        self.check_compatible(other)?;
        let digits = self
            .digits
            .iter()
            .zip(&other.digits)
            .map(|(&a, &b)| (a + self.base - b) % self.base)
            .collect();
        Ok(DigitVector {
            base: self.base,
            digits,
        })
    }

    /// Addition with full carry propagation: the digit expansion of
    /// `(value(self) + value(other)) mod b^m`.
    pub fn carry_add(&self, other: &DigitVector) -> Result<DigitVector> {
        let spec = AdditionSpec::new(self.base, Partition::single(self.len())?)?;
        self.partition_add(other, &spec)
    }

    /// Blockwise carry addition under an [`AdditionSpec`]: schoolbook
    /// addition inside each block, with the carry out of a block dropped.
    #[allow(clippy::needless_range_loop)] // positional digit arithmetic
    pub fn partition_add(&self, other: &DigitVector, spec: &AdditionSpec) -> Result<DigitVector> {
        self.check_compatible(other)?;
        if spec.base != self.base || spec.len() != self.len() {
            return Err(Error::argument("addition spec does not match vectors"));
        }
        let mut digits = vec![0u64; self.len()];
        for &(start, end) in &spec.blocks {
            let mut carry = 0u64;
            for j in start..end {
                // a + b + carry < 2b <= 2^64 for base <= 2^63.
                let t = self.digits[j] + other.digits[j] + carry;
                digits[j] = t % self.base;
                carry = t / self.base;
            }
            // carry out of the block is discarded: arithmetic is mod b^t.
        }
        Ok(DigitVector {
            base: self.base,
            digits,
        })
    }

    /// Additive inverse under the same blockwise law.
    #[allow(clippy::needless_range_loop)] // positional digit arithmetic
    pub fn partition_neg(&self, spec: &AdditionSpec) -> Result<DigitVector> {
        if spec.base != self.base || spec.len() != self.len() {
            return Err(Error::argument("addition spec does not match vector"));
        }
        let mut digits = vec![0u64; self.len()];
        for &(start, end) in &spec.blocks {
            // Negate the block value mod b^t by schoolbook complement.
            let mut borrow = 0u64;
            for j in start..end {
                let d = self.digits[j] + borrow;
                if d == 0 {
                    digits[j] = 0;
                } else {
                    digits[j] = self.base - d;
                    borrow = 1;
                }
            }
        }
        Ok(DigitVector {
            base: self.base,
            digits,
        })
    }

    fn check_compatible(&self, other: &DigitVector) -> Result<()> {
        if self.base != other.base {
            return Err(Error::argument("digit vectors have different bases"));
        }
        if self.len() != other.len() {
            return Err(Error::argument("digit vectors have different lengths"));
        }
        Ok(())
    }
}

fn check_base(base: u64) -> Result<()> {
    if base < 2 {
        return Err(Error::argument("base must be >= 2"));
    }
    if base > 1 << 62 {
        return Err(Error::argument("base too large"));
    }
    Ok(())
}

/// A partition of `m`: parts in non-increasing order, all positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::argument("partition must have at least one part"));
        }
        if parts.contains(&0) {
            return Err(Error::argument("partition parts must be positive"));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::argument("partition parts must be non-increasing"));
        }
        Ok(Partition { parts })
    }

    /// The one-part partition `(m)`.
    pub fn single(m: usize) -> Result<Self> {
        Partition::new(vec![
            u32::try_from(m).map_err(|_| Error::argument("partition length too large"))?
        ])
    }

    /// The all-ones partition `(1,…,1)` of `m`.
    pub fn ones(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::argument("partition of 0 is empty"));
        }
        Ok(Partition { parts: vec![1; m] })
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn sum(&self) -> usize {
        self.parts.iter().map(|&p| p as usize).sum()
    }
}

/// All partitions of `m` in lexicographically decreasing order,
/// `(m)` first and `(1,…,1)` last.
pub fn enumerate_partitions(m: u32) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(remaining: u32, max_part: u32, current: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if remaining == 0 {
            out.push(Partition {
                parts: current.clone(),
            });
            return;
        }
        let mut part = remaining.min(max_part);
        while part >= 1 {
            current.push(part);
            rec(remaining - part, part, current, out);
            current.pop();
            part -= 1;
        }
    }
    if m > 0 {
        rec(m, m, &mut current, &mut out);
    }
    out
}

/// A base plus a partition of the vector length: fully determines the
/// blockwise addition law and hence the group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdditionSpec {
    base: u64,
    partition: Partition,
    /// Half-open digit ranges of the blocks, least significant block first.
    blocks: Vec<(usize, usize)>,
}

impl AdditionSpec {
    pub fn new(base: u64, partition: Partition) -> Result<Self> {
        check_base(base)?;
        let mut blocks = Vec::with_capacity(partition.parts.len());
        let mut start = 0usize;
        for &t in &partition.parts {
            let end = start + t as usize;
            blocks.push((start, end));
            start = end;
        }
        Ok(AdditionSpec {
            base,
            partition,
            blocks,
        })
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    /// Total vector length `m`.
    pub fn len(&self) -> usize {
        self.blocks.last().map_or(0, |&(_, end)| end)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Group order `b^m`, if it fits `u128`.
    pub fn group_order(&self) -> Result<u128> {
        checked_pow(self.base, self.len() as u32)
    }

    /// Order of `v` in the group: the lcm over blocks of
    /// `b^t / gcd(block value, b^t)`.
    pub fn element_order(&self, v: &DigitVector) -> Result<u128> {
        if v.base() != self.base || v.len() != self.len() {
            return Err(Error::argument("vector does not match addition spec"));
        }
        let mut order: u128 = 1;
        for &(start, end) in &self.blocks {
            let t = (end - start) as u32;
            let modulus = checked_pow(self.base, t)?;
            let mut value: u128 = 0;
            for j in (start..end).rev() {
                value = value * self.base as u128 + v.digits()[j] as u128;
            }
            let block_order = modulus / gcd_u128(value, modulus);
            order = lcm_u128(order, block_order)
                .ok_or_else(|| Error::resource("element order exceeds u128", None))?;
        }
        Ok(order)
    }

    /// Multiset of element orders over the whole group, as a map
    /// `order -> count`. Requires exhaustive enumeration, so the group
    /// order must not exceed `limit`.
    pub fn order_multiset(&self, limit: u64) -> Result<BTreeMap<u128, u64>> {
        let order = self.group_order()?;
        if order > limit as u128 {
            return Err(Error::resource(
                format!("group order {order} exceeds enumeration limit {limit}"),
                None,
            ));
        }
        let mut counts = BTreeMap::new();
        for v in self.iter_elements() {
            *counts.entry(self.element_order(&v)?).or_insert(0u64) += 1;
        }
        Ok(counts)
    }

    /// Iterates all `b^m` digit vectors in mixed-radix counting order.
    /// Only sensible for small groups; pair with [`Self::group_order`].
    pub fn iter_elements(&self) -> impl Iterator<Item = DigitVector> + '_ {
        let m = self.len();
        let base = self.base;
        let mut digits = vec![0u64; m];
        let mut done = false;
        core::iter::from_fn(move || {
            if done {
                return None;
            }
            let out = DigitVector {
                base,
                digits: digits.clone(),
            };
            // Increment the mixed-radix counter.
            let mut j = 0;
            loop {
                if j == m {
                    done = true;
                    break;
                }
                digits[j] += 1;
                if digits[j] < base {
                    break;
                }
                digits[j] = 0;
                j += 1;
            }
            Some(out)
        })
    }
}

fn checked_pow(base: u64, exp: u32) -> Result<u128> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc
            .checked_mul(base as u128)
            .ok_or_else(|| Error::resource("group order exceeds u128", None))?;
    }
    Ok(acc)
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn lcm_u128(a: u128, b: u128) -> Option<u128> {
    if a == 0 || b == 0 {
        return Some(0);
    }
    (a / gcd_u128(a, b)).checked_mul(b)
}

/// One concrete axiom failure found by [`verify_group_axioms`].
#[derive(Debug, Clone, PartialEq)]
pub enum AxiomViolation {
    Closure(DigitVector, DigitVector),
    Associativity(DigitVector, DigitVector, DigitVector),
    Identity(DigitVector),
    Inverse(DigitVector),
    Commutativity(DigitVector, DigitVector),
}

/// Outcome of an axiom check.
#[derive(Debug, Clone)]
pub struct GroupAxiomReport {
    /// Whether every element (pair/triple) was checked, as opposed to a
    /// random sample.
    pub exhaustive: bool,
    /// Number of triples inspected for associativity.
    pub triples_checked: u64,
    pub violations: Vec<AxiomViolation>,
}

impl GroupAxiomReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the abelian-group axioms for the blockwise addition law.
///
/// If the group order is at most `exhaustive_limit`, every pair and triple
/// is checked; otherwise `samples` random triples drawn from a stream
/// seeded with `seed` are checked. Violations are collected rather than
/// short-circuited so a report can show them all (capped at 32).
pub fn verify_group_axioms(
    spec: &AdditionSpec,
    exhaustive_limit: u64,
    samples: u64,
    seed: u64,
) -> Result<GroupAxiomReport> {
    let order = spec.group_order()?;
    let exhaustive = order <= exhaustive_limit as u128;
    let mut violations = Vec::new();
    let mut triples = 0u64;
    let zero = DigitVector::zero(spec.base(), spec.len())?;

    let mut check_triple = |x: &DigitVector,
                            y: &DigitVector,
                            z: &DigitVector,
                            violations: &mut Vec<AxiomViolation>| {
        triples += 1;
        if violations.len() >= 32 {
            return;
        }
        let xy = spec_add(spec, x, y);
        if xy.digits().iter().any(|&d| d >= spec.base()) {
            violations.push(AxiomViolation::Closure(x.clone(), y.clone()));
        }
        let a = spec_add(spec, &xy, z);
        let b = spec_add(spec, x, &spec_add(spec, y, z));
        if a != b {
            violations.push(AxiomViolation::Associativity(
                x.clone(),
                y.clone(),
                z.clone(),
            ));
        }
        if xy != spec_add(spec, y, x) {
            violations.push(AxiomViolation::Commutativity(x.clone(), y.clone()));
        }
    };

    if exhaustive {
        let elements: Vec<DigitVector> = spec.iter_elements().collect();
        for x in &elements {
            if spec_add(spec, x, &zero) != *x {
                violations.push(AxiomViolation::Identity(x.clone()));
            }
            let neg = x.partition_neg(spec)?;
            if !spec_add(spec, x, &neg).is_zero() {
                violations.push(AxiomViolation::Inverse(x.clone()));
            }
        }
        for x in &elements {
            for y in &elements {
                for z in &elements {
                    check_triple(x, y, z, &mut violations);
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = spec.len();
        let random_vec = |rng: &mut ChaCha8Rng| -> DigitVector {
            let digits = (0..m).map(|_| rng.gen_range(0..spec.base())).collect();
            DigitVector {
                base: spec.base(),
                digits,
            }
        };
        for _ in 0..samples {
            let x = random_vec(&mut rng);
            let y = random_vec(&mut rng);
            let z = random_vec(&mut rng);
            if spec_add(spec, &x, &zero) != x {
                violations.push(AxiomViolation::Identity(x.clone()));
            }
            let neg = x.partition_neg(spec)?;
            if !spec_add(spec, &x, &neg).is_zero() {
                violations.push(AxiomViolation::Inverse(x.clone()));
            }
            check_triple(&x, &y, &z, &mut violations);
        }
    }

    Ok(GroupAxiomReport {
        exhaustive,
        triples_checked: triples,
        violations,
    })
}

fn spec_add(spec: &AdditionSpec, x: &DigitVector, y: &DigitVector) -> DigitVector {
    x.partition_add(y, spec)
        .expect("vectors constructed for this spec")
}
