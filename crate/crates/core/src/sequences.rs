//! Point sequence generators: Halton (radical inverse), Kronecker
//! (irrational rotation), good-lattice-point node sets, and hybrid
//! concatenations of the three.
//!
//! Halton and lattice points are produced as exact rationals, so digit
//! extraction and interval counting downstream are reproducible bit for
//! bit. Kronecker points are floats, but the rotation is evaluated in
//! double-double arithmetic — the generator carries `alpha` to ~105 bits
//! and reduces `n * alpha` with an exact two-product — so the returned
//! coordinate is the correctly rounded fractional part for every index
//! up to 2^53, not the drifting result of repeated addition.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lattice::LatticeRule;
use crate::padic::radical_inverse_rational;
use crate::points::{Coord, Point};

/// Largest index at which `n as f64` is still exact.
const MAX_INDEX: u64 = 1 << 53;

/// An irrational rotation number, kept in a form the generator can
/// resolve to more than f64 precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaSpec {
    /// `sqrt(m)` for an integer `m <= 2^53`. Perfect squares are legal
    /// (the rotation is then rational and every point is 0).
    Sqrt(u64),
    /// `(sqrt(5) - 1) / 2`, the inverse golden ratio.
    Golden,
    /// A literal double, taken at face value (no hidden low word).
    Literal(f64),
}

/// `hi + lo` with `|lo| <= ulp(hi)/2`: roughly 105 significant bits.
#[derive(Debug, Clone, Copy)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl AlphaSpec {
    fn resolve(&self) -> Result<DoubleDouble> {
        match *self {
            AlphaSpec::Sqrt(m) => {
                if m > MAX_INDEX {
                    return Err(Error::argument("sqrt argument must be <= 2^53"));
                }
                let mf = m as f64;
                let hi = libm::sqrt(mf);
                // Newton correction: sqrt(m) = hi + (m - hi^2) / (2 hi),
                // with the residual computed exactly by fma.
                let lo = if hi == 0.0 {
                    0.0
                } else {
                    libm::fma(-hi, hi, mf) / (2.0 * hi)
                };
                Ok(DoubleDouble { hi, lo })
            }
            AlphaSpec::Golden => {
                let hi5 = libm::sqrt(5.0);
                let lo5 = libm::fma(-hi5, hi5, 5.0) / (2.0 * hi5);
                // Subtracting 1 and halving are both exact in binary.
                Ok(DoubleDouble {
                    hi: (hi5 - 1.0) / 2.0,
                    lo: lo5 / 2.0,
                })
            }
            AlphaSpec::Literal(x) => {
                if !x.is_finite() {
                    return Err(Error::argument("literal alpha must be finite"));
                }
                Ok(DoubleDouble { hi: x, lo: 0.0 })
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            AlphaSpec::Sqrt(m) => format!("sqrt({m})"),
            AlphaSpec::Golden => String::from("golden"),
            AlphaSpec::Literal(x) => format!("{x}"),
        }
    }
}

/// `frac(n * alpha)` with `alpha` in double-double: the product error is
/// recovered by fma, folded into the low word, and the integer part is
/// removed exactly before the single final rounding.
fn rotation_coord(n: u64, alpha: DoubleDouble) -> f64 {
    let nf = n as f64;
    let p = nf * alpha.hi;
    let e = libm::fma(nf, alpha.hi, -p);
    let slo = libm::fma(nf, alpha.lo, e);
    // p - floor(p) is exact (Sterbenz), so the fractional information
    // lost to p's magnitude lives entirely in slo.
    let f = p - libm::floor(p);
    let mut r = f + slo;
    r -= libm::floor(r);
    debug_assert!(r >= 0.0);
    if r >= 1.0 {
        r = 0.0;
    }
    r
}

enum Kind {
    Halton {
        bases: Vec<u64>,
    },
    Kronecker {
        alphas: Vec<(AlphaSpec, DoubleDouble)>,
    },
    Glp {
        rule: LatticeRule,
    },
    Hybrid {
        parts: Vec<Sequence>,
    },
}

/// A point sequence with a generator per coordinate block.
pub struct Sequence {
    kind: Kind,
    dim: usize,
}

impl Sequence {
    /// Halton sequence in the given bases (each >= 2). Pairwise
    /// coprimality is the classical uniformity condition but is *not*
    /// enforced — measuring what a bad base choice produces is a use
    /// case, not an error.
    pub fn halton(bases: Vec<u64>) -> Result<Self> {
        if bases.is_empty() {
            return Err(Error::argument("halton needs at least one base"));
        }
        if bases.iter().any(|&b| b < 2) {
            return Err(Error::argument("halton bases must be >= 2"));
        }
        let dim = bases.len();
        Ok(Sequence {
            kind: Kind::Halton { bases },
            dim,
        })
    }

    /// Kronecker sequence `x_n = ({n a_1}, ..., {n a_s})`.
    pub fn kronecker(alphas: Vec<AlphaSpec>) -> Result<Self> {
        if alphas.is_empty() {
            return Err(Error::argument("kronecker needs at least one alpha"));
        }
        let resolved = alphas
            .into_iter()
            .map(|a| Ok((a, a.resolve()?)))
            .collect::<Result<Vec<_>>>()?;
        let dim = resolved.len();
        Ok(Sequence {
            kind: Kind::Kronecker { alphas: resolved },
            dim,
        })
    }

    /// The node set of a lattice rule: finite, `N` points.
    pub fn glp(rule: LatticeRule) -> Self {
        let dim = rule.dim();
        Sequence {
            kind: Kind::Glp { rule },
            dim,
        }
    }

    /// Coordinate-wise concatenation of the parts: point `n` is
    /// `(x_n^{(1)}, ..., x_n^{(m)})`. Parts may not themselves be hybrid.
    pub fn hybrid(parts: Vec<Sequence>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::argument("hybrid needs at least one part"));
        }
        if parts.iter().any(|p| matches!(p.kind, Kind::Hybrid { .. })) {
            return Err(Error::argument("hybrid parts cannot be nested hybrids"));
        }
        let dim = parts.iter().map(|p| p.dim).sum();
        Ok(Sequence {
            kind: Kind::Hybrid { parts },
            dim,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of points for finite sequences (lattice node sets, and
    /// hybrids containing one); `None` when unbounded.
    #[allow(clippy::len_without_is_empty)] // Option-valued: no emptiness notion
    pub fn len(&self) -> Option<u64> {
        match &self.kind {
            Kind::Glp { rule } => Some(rule.modulus()),
            Kind::Hybrid { parts } => parts.iter().filter_map(Sequence::len).min(),
            _ => None,
        }
    }

    /// The `n`-th point (0-based).
    pub fn point_at(&self, n: u64) -> Result<Point> {
        let mut coords = Vec::with_capacity(self.dim);
        self.push_coords(n, &mut coords)?;
        Point::new(coords)
    }

    fn push_coords(&self, n: u64, out: &mut Vec<Coord>) -> Result<()> {
        match &self.kind {
            Kind::Halton { bases } => {
                for &b in bases {
                    out.push(Coord::from_rational(radical_inverse_rational(n, b))?);
                }
            }
            Kind::Kronecker { alphas } => {
                if n > MAX_INDEX {
                    return Err(Error::argument("kronecker index must be <= 2^53"));
                }
                for &(_, dd) in alphas {
                    out.push(Coord::from_f64(rotation_coord(n, dd))?);
                }
            }
            Kind::Glp { rule } => {
                if n >= rule.modulus() {
                    return Err(Error::argument(format!(
                        "lattice node index {n} is out of range (N = {})",
                        rule.modulus()
                    )));
                }
                out.extend(rule.node(n).coords().iter().cloned());
            }
            Kind::Hybrid { parts } => {
                for part in parts {
                    part.push_coords(n, out)?;
                }
            }
        }
        Ok(())
    }

    /// The first `count` points.
    pub fn points(&self, count: u64) -> Result<Vec<Point>> {
        if let Some(limit) = self.len() {
            if count > limit {
                return Err(Error::argument(format!(
                    "sequence has only {limit} points, {count} requested"
                )));
            }
        }
        (0..count).map(|n| self.point_at(n)).collect()
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            Kind::Halton { bases } => {
                let list: Vec<String> = bases.iter().map(|b| format!("{b}")).collect();
                format!("halton({})", list.join(","))
            }
            Kind::Kronecker { alphas } => {
                let list: Vec<String> = alphas.iter().map(|(a, _)| a.describe()).collect();
                format!("kronecker({})", list.join(","))
            }
            Kind::Glp { rule } => {
                let list: Vec<String> = rule.generator().iter().map(|a| format!("{a}")).collect();
                format!("glp({}@{})", list.join(","), rule.modulus())
            }
            Kind::Hybrid { parts } => {
                let list: Vec<String> = parts.iter().map(Sequence::describe).collect();
                format!("hybrid({})", list.join(" + "))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn ratio(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn van_der_corput_base_2_first_eight() {
        let seq = Sequence::halton(vec![2]).unwrap();
        let expected = [
            (0, 1),
            (1, 2),
            (1, 4),
            (3, 4),
            (1, 8),
            (5, 8),
            (3, 8),
            (7, 8),
        ];
        for (n, (p, q)) in expected.iter().enumerate() {
            let pt = seq.point_at(n as u64).unwrap();
            assert!(pt.coord(0).is_exact());
            assert_eq!(pt.coord(0).to_rational(), ratio(*p, *q), "index {n}");
        }
    }

    #[test]
    fn halton_base_3_index_5() {
        // 5 = (1 2)_3, reflected: 2/3 + 1/9 = 7/9.
        let seq = Sequence::halton(vec![3]).unwrap();
        assert_eq!(seq.point_at(5).unwrap().coord(0).to_rational(), ratio(7, 9));
    }

    #[test]
    fn halton_validation() {
        assert!(Sequence::halton(vec![]).is_err());
        assert!(Sequence::halton(vec![2, 1]).is_err());
        // Non-coprime bases are allowed by design.
        let seq = Sequence::halton(vec![2, 4]).unwrap();
        assert_eq!(seq.dim(), 2);
        assert_eq!(seq.len(), None);
    }

    #[test]
    fn golden_rotation_first_point() {
        let seq = Sequence::kronecker(vec![AlphaSpec::Golden]).unwrap();
        let x1 = seq.point_at(1).unwrap().coord(0).to_f64();
        assert_eq!(x1, 0.6180339887498949);
    }

    #[test]
    fn golden_rotation_fibonacci_identity() {
        // F_n * (sqrt(5)-1)/2 = F_{n-1} - (1-phi)^n, and for even n the
        // fractional part is exactly 1 - phi^{-n} with phi the golden
        // ratio. At n = 20, F_20 = 6765: an independent closed form the
        // double-double reduction must reproduce.
        let seq = Sequence::kronecker(vec![AlphaSpec::Golden]).unwrap();
        let x = seq.point_at(6765).unwrap().coord(0).to_f64();
        let alpha = (libm::sqrt(5.0) - 1.0) / 2.0;
        let expected = 1.0 - libm::pow(alpha, 20.0);
        assert!(
            (x - expected).abs() < 1e-11,
            "frac(F_20 alpha) = {x}, closed form {expected}"
        );
    }

    #[test]
    fn sqrt_two_rotation() {
        let seq = Sequence::kronecker(vec![AlphaSpec::Sqrt(2)]).unwrap();
        let x2 = seq.point_at(2).unwrap().coord(0).to_f64();
        // frac(2 sqrt(2)) correctly rounded; the naive single product
        // 2 * round(sqrt(2)) - 2 would give ...1903 instead.
        assert_eq!(x2, 0.8284271247461901);
    }

    #[test]
    fn perfect_square_sqrt_is_degenerate_not_an_error() {
        let seq = Sequence::kronecker(vec![AlphaSpec::Sqrt(4)]).unwrap();
        for n in [0u64, 1, 2, 97] {
            assert_eq!(seq.point_at(n).unwrap().coord(0).to_f64(), 0.0);
        }
    }

    #[test]
    fn kronecker_validation() {
        assert!(Sequence::kronecker(vec![]).is_err());
        assert!(Sequence::kronecker(vec![AlphaSpec::Literal(f64::NAN)]).is_err());
        assert!(Sequence::kronecker(vec![AlphaSpec::Sqrt((1 << 53) + 1)]).is_err());
        let seq = Sequence::kronecker(vec![AlphaSpec::Literal(0.25)]).unwrap();
        assert_eq!(seq.point_at(3).unwrap().coord(0).to_f64(), 0.75);
        assert!(seq.point_at((1 << 53) + 1).is_err());
    }

    #[test]
    fn glp_nodes_and_bounds() {
        let rule = LatticeRule::new(5, vec![1, 2]).unwrap();
        let seq = Sequence::glp(rule.clone());
        assert_eq!(seq.len(), Some(5));
        let pts = seq.points(5).unwrap();
        assert_eq!(pts, rule.nodes());
        assert!(seq.point_at(5).is_err());
        assert!(seq.points(6).is_err());
    }

    #[test]
    fn hybrid_concatenates_coordinates() {
        let h = Sequence::halton(vec![2]).unwrap();
        let k = Sequence::kronecker(vec![AlphaSpec::Golden]).unwrap();
        let hy = Sequence::hybrid(vec![h, k]).unwrap();
        assert_eq!(hy.dim(), 2);
        let p = hy.point_at(3).unwrap();
        assert_eq!(p.coord(0).to_rational(), ratio(3, 4));
        let k_alone = Sequence::kronecker(vec![AlphaSpec::Golden]).unwrap();
        assert_eq!(
            p.coord(1).to_f64(),
            k_alone.point_at(3).unwrap().coord(0).to_f64()
        );
        assert_eq!(hy.describe(), "hybrid(halton(2) + kronecker(golden))");
    }

    #[test]
    fn hybrid_rejects_nesting_and_tracks_finite_len() {
        let h = Sequence::halton(vec![2]).unwrap();
        let k = Sequence::kronecker(vec![AlphaSpec::Sqrt(2)]).unwrap();
        let inner = Sequence::hybrid(vec![h]).unwrap();
        assert!(Sequence::hybrid(vec![inner, k]).is_err());
        assert!(Sequence::hybrid(vec![]).is_err());

        let rule = LatticeRule::new(7, vec![1, 3]).unwrap();
        let h = Sequence::halton(vec![2]).unwrap();
        let hy = Sequence::hybrid(vec![h, Sequence::glp(rule)]).unwrap();
        assert_eq!(hy.len(), Some(7));
        assert!(hy.points(8).is_err());
        assert_eq!(hy.points(7).unwrap().len(), 7);
    }
}
