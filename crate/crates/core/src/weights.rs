//! Index weights and their tail bounds.
//!
//! A weight assigns every nonzero index vector `k` a positive number
//! `rho(k) <= rho_max` that decays as `k` grows. The spectral test and the
//! diaphony need two analytic facts about a weight to terminate honestly:
//!
//! * `tail_sup(K)` — an upper bound for `rho(k)` over every index *outside*
//!   the closed max-norm box of radius `K`. Shell enumeration stops once
//!   this falls below the maximum already found, making the result exact.
//! * `tail_power_sum(K, alpha)` — an upper bound for
//!   `sum rho(k)^alpha` over the same outside region, used to bound
//!   diaphony truncation error. Not every weight has a closed form; those
//!   without return `None` and the diaphony reports a capability error.
//!
//! Three built-in weights cover the classical measures: the reciprocal
//! Euclidean norm, the reciprocal Zaremba product `r(k)`, and the digit
//! length weight `prod b_i^{-v_{b_i}(k_i)}`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::padic::{digit_length, Signature};

/// A positive, decaying weight on nonzero index vectors.
pub trait Weight: Sync {
    /// `rho(k)`; `k` must be nonzero.
    fn eval(&self, k: &[i64]) -> f64;

    /// `sup_k rho(k)` over all nonzero indices (the normalizer of the
    /// spectral test). Built-in weights attain this supremum.
    fn normalizer(&self) -> f64;

    /// Upper bound for `rho(k)` over indices with `max_i |k_i| > K`.
    fn tail_sup(&self, k: u64) -> f64;

    /// Upper bound for `sum rho(k)^alpha` over indices with
    /// `max_i |k_i| > K`, when a closed form exists. `K = 0` bounds the sum
    /// over the entire nonzero index set.
    fn tail_power_sum(&self, k: u64, alpha: f64) -> Option<f64>;

    /// Short self-description, embedded in results so they are
    /// reproducible from the output alone.
    fn describe(&self) -> String;

    /// The per-coordinate factors when the weight is a coordinatewise
    /// product, `None` otherwise. Exposing the structure (rather than just
    /// point evaluation) lets measures pick closed-form routes that exist
    /// only for product weights.
    fn product_factors(&self) -> Option<&[CoordFactor]> {
        None
    }
}

/// `rho(k) = 1 / ||k||_2`.
///
/// `tail_sup(K) = 1/sqrt(K^2+1)`: any integer vector outside the max-norm
/// box of radius `K` has some `|k_i| >= K+1`, hence Euclidean norm at least
/// `sqrt(K^2+1)`.
#[derive(Debug, Clone)]
pub struct EuclideanWeight;

impl Weight for EuclideanWeight {
    fn eval(&self, k: &[i64]) -> f64 {
        let norm_sq: f64 = k.iter().map(|&ki| (ki as f64) * (ki as f64)).sum();
        debug_assert!(norm_sq > 0.0);
        1.0 / libm::sqrt(norm_sq)
    }

    fn normalizer(&self) -> f64 {
        1.0 // attained at unit vectors
    }

    fn tail_sup(&self, k: u64) -> f64 {
        1.0 / libm::sqrt((k as f64) * (k as f64) + 1.0)
    }

    fn tail_power_sum(&self, _k: u64, _alpha: f64) -> Option<f64> {
        None
    }

    fn describe(&self) -> String {
        String::from("euclidean")
    }
}

/// One coordinate's factor of a product weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoordFactor {
    /// `1 / max(1, |k_i|)` — the Zaremba product factor.
    Reciprocal,
    /// `b^{-v_b(k_i)}` with `v_b` the digit length (`v_b(0) = 0`).
    DigitLength { base: u64 },
}

impl CoordFactor {
    fn eval(&self, ki: i64) -> f64 {
        match self {
            CoordFactor::Reciprocal => 1.0 / (ki.unsigned_abs().max(1) as f64),
            CoordFactor::DigitLength { base } => {
                let v = digit_length(ki.unsigned_abs(), *base);
                libm::pow(*base as f64, -(v as f64))
            }
        }
    }

    /// Largest factor value over *nonzero* `k_i`.
    fn max_nonzero(&self) -> f64 {
        match self {
            CoordFactor::Reciprocal => 1.0,
            CoordFactor::DigitLength { base } => 1.0 / *base as f64,
        }
    }

    /// Upper bound over `|k_i| > K`.
    fn tail_sup(&self, k: u64) -> f64 {
        match self {
            CoordFactor::Reciprocal => {
                if k == 0 {
                    1.0
                } else {
                    1.0 / k as f64
                }
            }
            CoordFactor::DigitLength { base } => {
                // v_b is monotone, so |k_i| >= K+1 forces v >= v_b(K+1).
                let v = digit_length(k + 1, *base);
                libm::pow(*base as f64, -(v as f64))
            }
        }
    }

    /// `sum_{k_i in domain} factor(k_i)^alpha`, including `k_i = 0` where
    /// the domain allows it (the factor there is 1).
    fn full_power_sum(&self, alpha: f64, sig: Signature) -> f64 {
        match self {
            CoordFactor::Reciprocal => {
                let z = zeta(alpha);
                match sig {
                    Signature::Signed => 1.0 + 2.0 * z,
                    Signature::NonNeg => 1.0 + z,
                    Signature::Positive => z,
                }
            }
            CoordFactor::DigitLength { base } => {
                // sum_{k>=1} b^{-alpha v(k)}: the b^{j-1}(b-1) integers of
                // digit length j contribute b^{j-1}(b-1) b^{-alpha j}.
                let b = *base as f64;
                let ratio = libm::pow(b, 1.0 - alpha);
                debug_assert!(ratio < 1.0);
                let positive = (b - 1.0) / b * ratio / (1.0 - ratio);
                match sig {
                    Signature::Signed => 1.0 + 2.0 * positive,
                    Signature::NonNeg => 1.0 + positive,
                    Signature::Positive => positive,
                }
            }
        }
    }

    /// `sum_{|k_i| <= K, k_i in domain} factor(k_i)^alpha`.
    fn box_power_sum(&self, k: u64, alpha: f64, sig: Signature) -> f64 {
        let positive: f64 = match self {
            CoordFactor::Reciprocal => {
                let mut acc = 0.0;
                for j in 1..=k {
                    acc += libm::pow(j as f64, -alpha);
                }
                acc
            }
            CoordFactor::DigitLength { base } => {
                let mut acc = 0.0;
                for j in 1..=k {
                    let v = digit_length(j, *base);
                    acc += libm::pow(*base as f64, -alpha * v as f64);
                }
                acc
            }
        };
        match sig {
            Signature::Signed => 1.0 + 2.0 * positive,
            Signature::NonNeg => 1.0 + positive,
            Signature::Positive => positive,
        }
    }

    fn describe(&self) -> String {
        match self {
            CoordFactor::Reciprocal => String::from("r"),
            CoordFactor::DigitLength { base } => format!("digit@{base}"),
        }
    }
}

/// A coordinatewise product weight `rho(k) = prod_i factor_i(k_i)`,
/// bound to the index signature it will be enumerated over.
#[derive(Debug, Clone)]
pub struct ProductWeight {
    factors: Vec<CoordFactor>,
    signature: Vec<Signature>,
}

impl ProductWeight {
    pub fn new(factors: Vec<CoordFactor>, signature: Vec<Signature>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::argument("weight needs at least one factor"));
        }
        if factors.len() != signature.len() {
            return Err(Error::argument(
                "weight factors and signature must have equal length",
            ));
        }
        for f in &factors {
            if let CoordFactor::DigitLength { base } = f {
                if *base < 2 {
                    return Err(Error::argument("digit-length weight base must be >= 2"));
                }
            }
        }
        Ok(ProductWeight { factors, signature })
    }

    /// The Zaremba weight `1/r(k)` in dimension `s` over signed indices.
    pub fn zaremba(signature: Vec<Signature>) -> Result<Self> {
        let factors = signature.iter().map(|_| CoordFactor::Reciprocal).collect();
        Self::new(factors, signature)
    }

    /// The digit-length weight with per-coordinate bases.
    pub fn digit_length(bases: &[u64], signature: Vec<Signature>) -> Result<Self> {
        let factors = bases
            .iter()
            .map(|&base| CoordFactor::DigitLength { base })
            .collect();
        Self::new(factors, signature)
    }

    pub fn factors(&self) -> &[CoordFactor] {
        &self.factors
    }
}

impl Weight for ProductWeight {
    fn eval(&self, k: &[i64]) -> f64 {
        debug_assert_eq!(k.len(), self.factors.len());
        let mut acc = 1.0;
        for (f, &ki) in self.factors.iter().zip(k) {
            acc *= f.eval(ki);
        }
        acc
    }

    fn normalizer(&self) -> f64 {
        // Exactly one coordinate must be nonzero to exclude k = 0; every
        // other factor is 1 at zero (or its max if zero is not allowed).
        let mut best = 0.0f64;
        for i in 0..self.factors.len() {
            let mut prod = 1.0;
            for (j, f) in self.factors.iter().enumerate() {
                let fj = if j == i {
                    f.max_nonzero()
                } else {
                    match self.signature[j] {
                        Signature::Positive => f.max_nonzero(),
                        _ => 1.0,
                    }
                };
                prod *= fj;
            }
            best = best.max(prod);
        }
        best
    }

    fn tail_sup(&self, k: u64) -> f64 {
        // Outside the box some coordinate exceeds K; its factor is bounded
        // by its tail and the rest by their maxima (1 at zero).
        let mut best = 0.0f64;
        for i in 0..self.factors.len() {
            let mut prod = self.factors[i].tail_sup(k);
            for (j, f) in self.factors.iter().enumerate() {
                if j != i {
                    if let Signature::Positive = self.signature[j] {
                        prod *= f.max_nonzero();
                    }
                }
            }
            best = best.max(prod);
        }
        best
    }

    fn tail_power_sum(&self, k: u64, alpha: f64) -> Option<f64> {
        if alpha <= 1.0 {
            return None;
        }
        // Power sums factorize coordinatewise: the tail over the box
        // complement is (full product) - (box product), both relative to
        // the full index set minus the origin.
        let mut full = 1.0f64;
        let mut boxed = 1.0f64;
        for (f, &sig) in self.factors.iter().zip(&self.signature) {
            full *= f.full_power_sum(alpha, sig);
            boxed *= f.box_power_sum(k, alpha, sig);
        }
        Some((full - boxed).max(0.0))
    }

    fn describe(&self) -> String {
        let parts: Vec<String> = self.factors.iter().map(|f| f.describe()).collect();
        parts.join(",")
    }

    fn product_factors(&self) -> Option<&[CoordFactor]> {
        Some(&self.factors)
    }
}

/// Riemann zeta for real `alpha > 1`, by Euler–Maclaurin: partial sum
/// through `M` plus the tail
/// `M^{1-a}/(a-1) - M^{-a}/2 + a M^{-a-1}/12 - a(a+1)(a+2) M^{-a-3}/720`
/// (the `-M^{-a}/2` because `j = M` is already in the partial sum), whose
/// truncation error is below the next term, well under 1e-15 at
/// `M = 2000` for every `alpha >= 1.05`.
pub fn zeta(alpha: f64) -> f64 {
    debug_assert!(alpha > 1.0);
    const M: u64 = 2000;
    let mut acc = crate::exec::Compensated::new();
    for j in 1..=M {
        acc.add(libm::pow(j as f64, -alpha));
    }
    let m = M as f64;
    let tail = libm::pow(m, 1.0 - alpha) / (alpha - 1.0) - 0.5 * libm::pow(m, -alpha)
        + alpha / 12.0 * libm::pow(m, -alpha - 1.0)
        - alpha * (alpha + 1.0) * (alpha + 2.0) / 720.0 * libm::pow(m, -alpha - 3.0);
    acc.add(tail);
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn zeta_matches_known_values() {
        let pi = core::f64::consts::PI;
        assert!((zeta(2.0) - pi * pi / 6.0).abs() < 1e-14);
        assert!((zeta(4.0) - pi.powi(4) / 90.0).abs() < 1e-14);
        // zeta(3) = 1.2020569031595942854...
        assert!((zeta(3.0) - 1.2020569031595942).abs() < 1e-14);
    }

    #[test]
    fn euclidean_weight_values() {
        let w = EuclideanWeight;
        assert_eq!(w.eval(&[1, 0]), 1.0);
        assert!((w.eval(&[3, 4]) - 0.2).abs() < 1e-15);
        assert_eq!(w.normalizer(), 1.0);
        // At K=1 the nearest outside vector has norm sqrt(2).
        assert!((w.tail_sup(1) - 1.0 / 2f64.sqrt()).abs() < 1e-15);
        assert!(w.tail_power_sum(1, 2.0).is_none());
    }

    #[test]
    fn zaremba_weight_values() {
        let w = ProductWeight::zaremba(vec![Signature::Signed; 2]).unwrap();
        assert_eq!(w.eval(&[1, 0]), 1.0);
        assert_eq!(w.eval(&[2, -3]), 1.0 / 6.0);
        assert_eq!(w.eval(&[0, 5]), 0.2);
        assert_eq!(w.normalizer(), 1.0);
        assert_eq!(w.tail_sup(4), 0.25);
    }

    #[test]
    fn zaremba_full_power_sum_closed_form() {
        // sum over nonzero k in Z^s of r(k)^-2 = (1 + 2 zeta(2))^s - 1
        //                                      = (1 + pi^2/3)^s - 1.
        let pi = core::f64::consts::PI;
        for s in 1..=3usize {
            let w = ProductWeight::zaremba(vec![Signature::Signed; s]).unwrap();
            let total = w.tail_power_sum(0, 2.0).unwrap();
            let expect = libm::pow(1.0 + pi * pi / 3.0, s as f64) - 1.0;
            assert!(
                (total - expect).abs() < 1e-12 * expect,
                "s={s}: {total} vs {expect}"
            );
        }
    }

    #[test]
    fn tail_power_sum_brackets_true_tail() {
        // The closed-form tail must dominate an explicit outside sum and
        // approach it from above as the inner box grows.
        let w = ProductWeight::zaremba(vec![Signature::Signed; 2]).unwrap();
        let k_in = 8u64;
        let bound = w.tail_power_sum(k_in, 2.0).unwrap();
        // Explicit sum over 8 < max|k| <= 400.
        let mut explicit = 0.0;
        let big = 400i64;
        for k1 in -big..=big {
            for k2 in -big..=big {
                let m = k1.abs().max(k2.abs());
                if m > k_in as i64 {
                    let r = (k1.abs().max(1) * k2.abs().max(1)) as f64;
                    explicit += 1.0 / (r * r);
                }
            }
        }
        assert!(explicit <= bound, "{explicit} > {bound}");
        assert!(bound - explicit < 0.06 * bound);
    }

    #[test]
    fn digit_length_weight_values() {
        let w = ProductWeight::digit_length(&[2, 3], vec![Signature::NonNeg; 2]).unwrap();
        // v_2(6) = 3 digits, v_3(6) = 2 digits.
        assert_eq!(w.eval(&[6, 6]), (1.0 / 8.0) * (1.0 / 9.0));
        assert_eq!(w.eval(&[0, 1]), 1.0 / 3.0);
        // Normalizer: one forced-nonzero coordinate, best is base 2.
        assert_eq!(w.normalizer(), 0.5);
        // Tail: beyond K=3, v_2(4)=3 and v_3(4)=2.
        assert_eq!(w.tail_sup(3), (1.0f64 / 8.0).max(1.0 / 9.0));
    }

    #[test]
    fn digit_length_power_sums_are_geometric() {
        // Base b, alpha=2: sum_{k>=1} b^{-2 v(k)} = (b-1)/b * b^{-1}/(1-b^{-1})
        // = 1/b exactly; check the closed form against direct summation.
        for base in [2u64, 3, 5] {
            let f = CoordFactor::DigitLength { base };
            let closed = f.full_power_sum(2.0, Signature::NonNeg) - 1.0;
            assert!((closed - 1.0 / base as f64).abs() < 1e-14);
            let mut direct = 0.0;
            for k in 1..100000u64 {
                direct += libm::pow(base as f64, -2.0 * digit_length(k, base) as f64);
            }
            assert!((closed - direct).abs() < 1e-4, "base {base}");
            assert!(closed >= direct);
        }
    }

    #[test]
    fn mixed_product_weight() {
        let w = ProductWeight::new(
            vec![
                CoordFactor::DigitLength { base: 2 },
                CoordFactor::Reciprocal,
            ],
            vec![Signature::NonNeg, Signature::Signed],
        )
        .unwrap();
        assert_eq!(w.eval(&[3, -4]), 0.25 * 0.25);
        // A reciprocal coordinate can be +-1 with the rest zero.
        assert_eq!(w.normalizer(), 1.0);
        assert_eq!(w.describe(), "digit@2,r");
    }
}
