//! Rank-1 lattice rules and their figures of merit.
//!
//! A good-lattice-point rule with modulus `N` and generator
//! `a = (a_1, …, a_s)`, `gcd(a_i, N) = 1`, is the node set
//! `x_n = ({n a_1 / N}, …, {n a_s / N})` for `n = 0, …, N-1`. Its dual
//! lattice is `Lambda* = { k : k . a == 0 (mod N) }`, and the classical
//! quality measures are functions of the nonzero dual vectors:
//!
//! * `sigma = 1 / min ||k||_2` — the spectral figure of merit (the
//!   coarsest family of parallel hyperplanes covering the nodes),
//! * `kappa = 1 / min r(k)` with `r(k) = prod max(1, |k_i|)` — the
//!   Babenko–Zaremba index,
//! * `P_alpha = sum_{k in Lambda*, k != 0} r(k)^-alpha` — the worst-case
//!   integration error over the dominated Korobov class.
//!
//! Both minima are found exactly by integer search: fixing the first
//! `s - 1` coordinates of `k` determines the last one modulo `N` (the
//! generator components are units), so each prefix contributes at most
//! three candidates within the provably sufficient box `max |k_i| <= N`.
//! Branches whose partial objective already reaches the incumbent are
//! pruned, which never changes the minimum. `P_alpha` for even `alpha`
//! is evaluated in closed form over the nodes via Bernoulli polynomials —
//! an exact finite sum, no truncation.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::exec::{Compensated, Executor};
use crate::measures::System;
use crate::padic::HybridSystemConfig;
use crate::points::{Coord, Point};

/// A rank-1 lattice rule `(a, N)` with all generator components coprime
/// to the modulus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeRule {
    n: u64,
    a: Vec<u64>,
}

impl LatticeRule {
    pub fn new(n: u64, a: Vec<u64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::argument("lattice modulus N must be >= 1"));
        }
        if n > 1 << 32 {
            return Err(Error::argument("lattice modulus N must be <= 2^32"));
        }
        if a.is_empty() {
            return Err(Error::argument("lattice generator must be nonempty"));
        }
        for &ai in &a {
            if (ai % n.max(1)).gcd(&n) != 1 {
                return Err(Error::argument(format!(
                    "generator component {ai} is not a unit modulo {n}"
                )));
            }
        }
        Ok(LatticeRule { n, a })
    }

    pub fn modulus(&self) -> u64 {
        self.n
    }

    pub fn generator(&self) -> &[u64] {
        &self.a
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    /// The `idx`-th node, with exact rational coordinates.
    pub fn node(&self, idx: u64) -> Point {
        let coords = self
            .a
            .iter()
            .map(|&ai| {
                let num = ((idx as u128 * ai as u128) % self.n as u128) as i128;
                Coord::from_ratio(num, self.n as i128).expect("residue is in [0, N)")
            })
            .collect();
        Point::new(coords).expect("generator is nonempty")
    }

    /// All `N` nodes in index order.
    pub fn nodes(&self) -> Vec<Point> {
        (0..self.n).map(|i| self.node(i)).collect()
    }

    /// Whether `k` lies in the dual lattice (`k . a == 0 mod N`).
    pub fn is_dual(&self, k: &[i64]) -> bool {
        assert_eq!(k.len(), self.a.len(), "index dimension mismatch");
        let mut acc: i128 = 0;
        for (&ki, &ai) in k.iter().zip(&self.a) {
            acc = (acc + ki as i128 * ai as i128).rem_euclid(self.n as i128);
        }
        acc == 0
    }
}

/// Budget for the dual-lattice searches.
#[derive(Debug, Clone)]
pub struct SearchOptions {
    /// Cap on the number of coordinate prefixes visited; the full scan
    /// costs `(2N - 1)^(s-1)` prefixes before pruning.
    pub max_prefixes: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            max_prefixes: 1 << 26,
        }
    }
}

/// Exact minimizer over the nonzero dual vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct DualMinimum {
    /// The minimizing vector (first in scan order among minimizers).
    pub argmin: Vec<i64>,
    /// Exact integer objective at the minimum: `||k||_2^2` for the
    /// spectral figure, `r(k)` for the Babenko–Zaremba index.
    pub objective: u128,
}

/// Spectral figure of merit `sigma(a, N) = 1 / min ||k||_2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaResult {
    pub sigma: f64,
    pub min_norm_sq: u128,
    pub argmin: Vec<i64>,
}

pub fn sigma_merit(rule: &LatticeRule, opts: &SearchOptions) -> Result<SigmaResult> {
    let m = dual_minimum(rule, opts, Objective::NormSq)?;
    Ok(SigmaResult {
        sigma: 1.0 / libm::sqrt(m.objective as f64),
        min_norm_sq: m.objective,
        argmin: m.argmin,
    })
}

/// Babenko–Zaremba index `kappa(a, N) = 1 / min r(k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BabenkoZarembaResult {
    pub kappa: f64,
    pub r_min: u128,
    pub argmin: Vec<i64>,
}

pub fn babenko_zaremba(rule: &LatticeRule, opts: &SearchOptions) -> Result<BabenkoZarembaResult> {
    let m = dual_minimum(rule, opts, Objective::RProduct)?;
    Ok(BabenkoZarembaResult {
        kappa: 1.0 / m.objective as f64,
        r_min: m.objective,
        argmin: m.argmin,
    })
}

#[derive(Clone, Copy, PartialEq)]
enum Objective {
    /// `||k||_2^2`: extend by `k^2`, combine additively.
    NormSq,
    /// `r(k) = prod max(1, |k|)`: extend multiplicatively.
    RProduct,
}

impl Objective {
    fn extend(self, partial: u128, ki: i64) -> u128 {
        let v = ki.unsigned_abs() as u128;
        match self {
            Objective::NormSq => partial + v * v,
            Objective::RProduct => partial * v.max(1),
        }
    }

    fn identity(self) -> u128 {
        match self {
            Objective::NormSq => 0,
            Objective::RProduct => 1,
        }
    }
}

/// Minimizes `objective(k)` over nonzero dual vectors by prefix search:
/// the congruence `k_s a_s == -(k_1 a_1 + … + k_{s-1} a_{s-1}) (mod N)`
/// pins the last coordinate to one residue class, of which only the three
/// representatives closest to zero can matter.
fn dual_minimum(rule: &LatticeRule, opts: &SearchOptions, obj: Objective) -> Result<DualMinimum> {
    let s = rule.dim();
    let n = rule.n as i128;
    // (0, …, 0, N) is always dual, so the minimum objective is at most
    // N^2 (norm) or N (product); prefix coordinates beyond N-1 in absolute
    // value can never win.
    let b = rule.n.saturating_sub(1) as i128;
    let prefixes = (2 * b as u128 + 1).checked_pow(s as u32 - 1);
    if prefixes.is_none_or(|p| p > opts.max_prefixes as u128) {
        return Err(Error::resource(
            format!(
                "dual search needs {} prefixes, over the budget of {} \
                 (raise max_prefixes to force)",
                prefixes.map_or(alloc::string::String::from("> 2^128"), |p| format!("{p}")),
                opts.max_prefixes
            ),
            None,
        ));
    }
    // Modular inverse of the last generator component.
    let a_last = rule.a[s - 1] as i128;
    let inv = mod_inverse(a_last, n);

    let seed = match obj {
        Objective::NormSq => (rule.n as u128) * (rule.n as u128),
        Objective::RProduct => rule.n as u128,
    };
    let mut argmin: Vec<i64> = {
        let mut k = vec![0i64; s];
        k[s - 1] = rule.n as i64;
        k
    };
    let mut best = seed;

    let mut prefix = vec![0i64; s];
    scan_prefixes(
        rule,
        obj,
        0,
        obj.identity(),
        b,
        n,
        inv,
        &mut prefix,
        &mut best,
        &mut argmin,
    );
    Ok(DualMinimum {
        argmin,
        objective: best,
    })
}

#[allow(clippy::too_many_arguments)]
fn scan_prefixes(
    rule: &LatticeRule,
    obj: Objective,
    depth: usize,
    partial: u128,
    b: i128,
    n: i128,
    inv: i128,
    prefix: &mut [i64],
    best: &mut u128,
    argmin: &mut Vec<i64>,
) {
    let s = rule.dim();
    if depth == s - 1 {
        // Residue forced on the last coordinate.
        let mut dot: i128 = 0;
        for (&p, &a) in prefix[..s - 1].iter().zip(&rule.a) {
            dot = (dot + p as i128 * a as i128).rem_euclid(n);
        }
        let k0 = ((-dot).rem_euclid(n) * inv).rem_euclid(n);
        for cand in [k0 - n, k0, k0 + n] {
            if cand == 0 && prefix[..s - 1].iter().all(|&x| x == 0) {
                continue; // the zero vector
            }
            let total = obj.extend(partial, cand as i64);
            if total < *best {
                *best = total;
                prefix[s - 1] = cand as i64;
                argmin.copy_from_slice(prefix);
            }
        }
        return;
    }
    for ki64 in -b..=b {
        let ki = ki64 as i64;
        let next = obj.extend(partial, ki);
        if next >= *best {
            // Both objectives only grow under extension (squares add,
            // unit-clamped factors multiply), so this branch cannot win.
            continue;
        }
        prefix[depth] = ki;
        scan_prefixes(rule, obj, depth + 1, next, b, n, inv, prefix, best, argmin);
    }
    prefix[depth] = 0;
}

/// Inverse of `a` modulo `n` (`gcd(a, n) = 1` guaranteed by construction).
fn mod_inverse(a: i128, n: i128) -> i128 {
    if n == 1 {
        return 0;
    }
    let e = i128::extended_gcd(&a.rem_euclid(n), &n);
    debug_assert_eq!(e.gcd, 1);
    e.x.rem_euclid(n)
}

// ---------------------------------------------------------------------------
// P_alpha.
// ---------------------------------------------------------------------------

/// `P_alpha(a, N)` for even `alpha` in {2, 4, 6}, via the exact node-sum
/// identity
///
/// ```text
/// P_alpha = -1 + (1/N) sum_n prod_i ( 1 + c_alpha B_alpha({n a_i / N}) ),
/// c_alpha = (-1)^(alpha/2 + 1) (2 pi)^alpha / alpha!
/// ```
///
/// a finite sum over the nodes, so the only error is floating-point
/// rounding (compensated summation keeps it near machine precision).
pub fn p_alpha(rule: &LatticeRule, alpha: u32) -> Result<f64> {
    let pi2 = PI * PI;
    let (c, poly): (f64, fn(f64) -> f64) = match alpha {
        2 => (2.0 * pi2, |x| (x * x - x) + 1.0 / 6.0),
        4 => (-2.0 * pi2 * pi2 / 3.0, |x| {
            ((x - 2.0) * x + 1.0) * x * x - 1.0 / 30.0
        }),
        6 => (4.0 * pi2 * pi2 * pi2 / 45.0, |x| {
            (((x - 3.0) * x + 2.5) * x * x - 0.5) * x * x + 1.0 / 42.0
        }),
        _ => {
            return Err(Error::capability(
                "P_alpha has closed node form for alpha in {2, 4, 6} only",
            ))
        }
    };
    let n = rule.n;
    let mut acc = Compensated::new();
    for idx in 0..n {
        let mut prod = 1.0f64;
        for &ai in &rule.a {
            let x = ((idx as u128 * ai as u128) % n as u128) as f64 / n as f64;
            prod *= 1.0 + c * poly(x);
        }
        acc.add(prod);
    }
    Ok(acc.value() / n as f64 - 1.0)
}

const PI: f64 = core::f64::consts::PI;

// ---------------------------------------------------------------------------
// Sloan–Kachoyan verification.
// ---------------------------------------------------------------------------

/// Result of checking the character identity `S_N(e_k) = [k in Lambda*]`
/// over the box `max |k_i| <= box_bound`.
#[derive(Debug, Clone, PartialEq)]
pub struct SloanKachoyanReport {
    /// Largest observed `| |S_N(e_k)| - [k dual] |`.
    pub max_error: f64,
    /// Index attaining it.
    pub worst_k: Vec<i64>,
    /// Number of index vectors checked.
    pub checked: u64,
    /// How many of them were dual.
    pub duals: u64,
}

/// For a lattice rule the exponential sums collapse: `S_N(e_k)` is exactly
/// 1 on the dual lattice and 0 off it. This check recomputes the sums
/// numerically over the exact rational nodes and reports the largest
/// deviation from that 0/1 pattern.
pub fn sloan_kachoyan_check<E: Executor>(
    rule: &LatticeRule,
    box_bound: u64,
    exec: &E,
) -> Result<SloanKachoyanReport> {
    if box_bound == 0 {
        return Err(Error::argument("box bound must be >= 1"));
    }
    let s = rule.dim();
    let side = 2 * box_bound + 1;
    let total = (side as u128).pow(s as u32);
    if total > 1 << 32 {
        return Err(Error::resource("index box too large to enumerate", None));
    }
    let nodes = rule.nodes();
    let sys = HybridSystemConfig::pure_trig(s)?;
    let prep = System::prepare(&sys, &nodes, nodes.len(), box_bound)?;

    let total = total as u64;
    let jobs = crate::exec::chunk_count(total);
    let results: Vec<(f64, Vec<i64>, u64)> = exec.run_chunks(jobs, |c| {
        let (start, end) = crate::exec::chunk_range(c, total);
        let mut worst = 0.0f64;
        let mut worst_k = vec![0i64; s];
        let mut duals = 0u64;
        let mut k = vec![0i64; s];
        for idx in start..end {
            let mut rem = idx;
            for i in (0..s).rev() {
                k[i] = (rem % side) as i64 - box_bound as i64;
                rem /= side;
            }
            let dual = rule.is_dual(&k);
            if dual {
                duals += 1;
            }
            let sum = System::weyl_sum(&sys, &prep, nodes.len(), &k);
            let expected = if dual { 1.0 } else { 0.0 };
            let err = libm::fabs(libm::sqrt(sum.norm_sqr()) - expected);
            if err > worst {
                worst = err;
                worst_k.copy_from_slice(&k);
            }
        }
        (worst, worst_k, duals)
    });
    let mut report = SloanKachoyanReport {
        max_error: 0.0,
        worst_k: vec![0i64; s],
        checked: total,
        duals: 0,
    };
    for (err, k, duals) in results {
        report.duals += duals;
        if err > report.max_error {
            report.max_error = err;
            report.worst_k = k;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Sequential;

    #[test]
    fn rejects_non_unit_generators() {
        assert!(LatticeRule::new(8, vec![1, 2]).is_err());
        assert!(LatticeRule::new(9, vec![3]).is_err());
        assert!(LatticeRule::new(0, vec![1]).is_err());
        assert!(LatticeRule::new(8, vec![]).is_err());
        assert!(LatticeRule::new(8, vec![1, 5]).is_ok());
    }

    #[test]
    fn nodes_are_exact_rationals() {
        let rule = LatticeRule::new(5, vec![1, 2]).unwrap();
        let p = rule.node(3);
        assert_eq!(p.coord(0), &Coord::from_ratio(3, 5).unwrap());
        assert_eq!(p.coord(1), &Coord::from_ratio(1, 5).unwrap()); // {6/5}
        assert_eq!(rule.nodes().len(), 5);
    }

    #[test]
    fn dual_membership() {
        let rule = LatticeRule::new(5, vec![1, 2]).unwrap();
        assert!(rule.is_dual(&[5, 0]));
        assert!(rule.is_dual(&[1, 2]));
        assert!(rule.is_dual(&[2, -1]));
        assert!(rule.is_dual(&[-1, 3]));
        assert!(!rule.is_dual(&[1, 1]));
        assert!(!rule.is_dual(&[0, 1]));
    }

    #[test]
    fn sigma_fibonacci_five() {
        // (a, N) = ((1, 2), 5): shortest dual vectors are (1, 2) and
        // (2, -1), both of squared length 5.
        let rule = LatticeRule::new(5, vec![1, 2]).unwrap();
        let r = sigma_merit(&rule, &SearchOptions::default()).unwrap();
        assert_eq!(r.min_norm_sq, 5);
        assert!((r.sigma - 1.0 / 5f64.sqrt()).abs() < 1e-16);
        assert!(rule.is_dual(&r.argmin));
        let n2: i128 = r.argmin.iter().map(|&k| (k as i128) * (k as i128)).sum();
        assert_eq!(n2 as u128, r.min_norm_sq);
    }

    #[test]
    fn sigma_fibonacci_eight() {
        // ((1, 5), 8): shortest dual vector is (2, -2) (or (-2, 2)),
        // squared length 8.
        let rule = LatticeRule::new(8, vec![1, 5]).unwrap();
        let r = sigma_merit(&rule, &SearchOptions::default()).unwrap();
        assert_eq!(r.min_norm_sq, 8);
        assert!(rule.is_dual(&r.argmin));
    }

    #[test]
    fn babenko_zaremba_frozen_examples() {
        // ((1, 5), 8): no dual vector has r <= 2; (3, 1) and (1, 3) have
        // r = 3, so kappa = 1/3.
        let rule = LatticeRule::new(8, vec![1, 5]).unwrap();
        let r = babenko_zaremba(&rule, &SearchOptions::default()).unwrap();
        assert_eq!(r.r_min, 3);
        assert!((r.kappa - 1.0 / 3.0).abs() < 1e-16);
        assert!(rule.is_dual(&r.argmin));
        // ((1, 2), 5): (1, 2) is dual with r = 2.
        let rule = LatticeRule::new(5, vec![1, 2]).unwrap();
        let r = babenko_zaremba(&rule, &SearchOptions::default()).unwrap();
        assert_eq!(r.r_min, 2);
        assert_eq!(r.kappa, 0.5);
    }

    #[test]
    fn minima_match_brute_force() {
        // Exhaustive reference over the full box |k_i| <= N for small rules.
        for (n, a) in [
            (5u64, vec![1u64, 2]),
            (8, vec![1, 5]),
            (7, vec![1, 3]),
            (6, vec![1, 5]),
        ] {
            let rule = LatticeRule::new(n, a).unwrap();
            let mut best_norm = u128::MAX;
            let mut best_r = u128::MAX;
            let bn = n as i64;
            for k1 in -bn..=bn {
                for k2 in -bn..=bn {
                    if (k1, k2) == (0, 0) || !rule.is_dual(&[k1, k2]) {
                        continue;
                    }
                    let nsq = (k1 as i128 * k1 as i128 + k2 as i128 * k2 as i128) as u128;
                    let r = (k1.unsigned_abs().max(1) as u128) * (k2.unsigned_abs().max(1) as u128);
                    best_norm = best_norm.min(nsq);
                    best_r = best_r.min(r);
                }
            }
            let opts = SearchOptions::default();
            assert_eq!(
                sigma_merit(&rule, &opts).unwrap().min_norm_sq,
                best_norm,
                "N={n}"
            );
            assert_eq!(
                babenko_zaremba(&rule, &opts).unwrap().r_min,
                best_r,
                "N={n}"
            );
        }
    }

    #[test]
    fn degenerate_rules() {
        // N = 1: every integer vector is dual; minimum norm 1.
        let rule = LatticeRule::new(1, vec![1, 1]).unwrap();
        let r = sigma_merit(&rule, &SearchOptions::default()).unwrap();
        assert_eq!(r.min_norm_sq, 1);
        assert_eq!(
            babenko_zaremba(&rule, &SearchOptions::default())
                .unwrap()
                .r_min,
            1
        );
        // s = 1: dual = N Z, so sigma = 1/N.
        let rule = LatticeRule::new(4, vec![3]).unwrap();
        let r = sigma_merit(&rule, &SearchOptions::default()).unwrap();
        assert_eq!(r.min_norm_sq, 16);
        assert_eq!(r.argmin, vec![4]);
        assert!((r.sigma - 0.25).abs() < 1e-16);
    }

    #[test]
    fn three_dimensional_search_matches_brute_force() {
        let rule = LatticeRule::new(7, vec![1, 2, 3]).unwrap();
        let mut best = u128::MAX;
        for k1 in -7i64..=7 {
            for k2 in -7i64..=7 {
                for k3 in -7i64..=7 {
                    if (k1, k2, k3) == (0, 0, 0) || !rule.is_dual(&[k1, k2, k3]) {
                        continue;
                    }
                    let nsq = [k1, k2, k3]
                        .iter()
                        .map(|&k| (k as i128 * k as i128) as u128)
                        .sum::<u128>();
                    best = best.min(nsq);
                }
            }
        }
        let r = sigma_merit(&rule, &SearchOptions::default()).unwrap();
        assert_eq!(r.min_norm_sq, best);
    }

    #[test]
    fn search_budget_is_enforced() {
        let rule = LatticeRule::new(101, vec![1, 3, 7, 11]).unwrap();
        let opts = SearchOptions {
            max_prefixes: 1 << 10,
        };
        let err = sigma_merit(&rule, &opts).unwrap_err();
        assert!(matches!(err, Error::ResourceLimit { .. }));
    }

    #[test]
    fn p2_closed_form_small_cases() {
        // s = 1, a = 1, N = 2: duals are the even integers, so
        // P_2 = 2 sum_{j>=1} (2j)^-2 = zeta(2)/2 = pi^2/12.
        let rule = LatticeRule::new(2, vec![1]).unwrap();
        let p2 = p_alpha(&rule, 2).unwrap();
        assert!((p2 - PI * PI / 12.0).abs() < 1e-14, "{p2}");
        // N = 1: every k is dual; P_2 = (1 + 2 zeta(2))^s - 1.
        let rule = LatticeRule::new(1, vec![1, 1]).unwrap();
        let p2 = p_alpha(&rule, 2).unwrap();
        let full = 1.0 + PI * PI / 3.0;
        assert!((p2 - (full * full - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn p_alpha_matches_truncated_dual_sum() {
        // Direct dual-lattice sum over a big box converges to the node
        // form from below; the leftover tail is bounded by the product
        // tail over all (not just dual) indices.
        let rule = LatticeRule::new(5, vec![1, 2]).unwrap();
        for alpha in [2u32, 4, 6] {
            let closed = p_alpha(&rule, alpha).unwrap();
            let kmax = 400i64;
            let mut direct = Compensated::new();
            for k1 in -kmax..=kmax {
                for k2 in -kmax..=kmax {
                    if (k1, k2) == (0, 0) || !rule.is_dual(&[k1, k2]) {
                        continue;
                    }
                    let r = (k1.unsigned_abs().max(1) * k2.unsigned_abs().max(1)) as f64;
                    direct.add(libm::pow(r, -(alpha as f64)));
                }
            }
            let direct = direct.value();
            assert!(direct <= closed + 1e-12, "alpha={alpha}");
            // Tail bound: sum over ALL k outside the box.
            let zeta = crate::weights::zeta(alpha as f64);
            let box_sum: f64 = 1.0
                + 2.0
                    * (1..=kmax)
                        .map(|k| libm::pow(k as f64, -(alpha as f64)))
                        .sum::<f64>();
            let full: f64 = 1.0 + 2.0 * zeta;
            let tail = full * full - box_sum * box_sum;
            assert!(
                closed - direct <= tail + 1e-12,
                "alpha={alpha}: gap {} > tail {tail}",
                closed - direct
            );
        }
    }

    #[test]
    fn p_alpha_rejects_odd_orders() {
        let rule = LatticeRule::new(5, vec![1, 2]).unwrap();
        assert!(matches!(p_alpha(&rule, 3), Err(Error::Capability(_))));
        assert!(matches!(p_alpha(&rule, 8), Err(Error::Capability(_))));
    }

    #[test]
    fn sloan_kachoyan_identity_holds() {
        let rule = LatticeRule::new(8, vec![1, 5]).unwrap();
        let rep = sloan_kachoyan_check(&rule, 12, &Sequential).unwrap();
        assert!(rep.max_error < 1e-12, "max error {}", rep.max_error);
        assert_eq!(rep.checked, 25 * 25);
        // Count duals independently.
        let mut duals = 0u64;
        for k1 in -12i64..=12 {
            for k2 in -12i64..=12 {
                if rule.is_dual(&[k1, k2]) {
                    duals += 1;
                }
            }
        }
        assert_eq!(rep.duals, duals);
    }

    #[test]
    fn spectral_test_on_nodes_matches_sigma_reciprocal_structure() {
        // The spectral test with the Euclidean weight over exact lattice
        // nodes attains its maximum on a shortest dual vector, where
        // |S_N| = 1: value = 1 / min ||k||_2 = sigma.
        let rule = LatticeRule::new(8, vec![1, 5]).unwrap();
        let nodes = rule.nodes();
        let sys = HybridSystemConfig::pure_trig(2).unwrap();
        let r = crate::measures::spectral_test(
            &nodes,
            nodes.len(),
            &sys,
            &crate::weights::EuclideanWeight,
            &crate::measures::SpectralOptions::default(),
            &Sequential,
        )
        .unwrap();
        let sig = sigma_merit(&rule, &SearchOptions::default()).unwrap();
        assert!(
            (r.value - sig.sigma).abs() < 1e-14,
            "spectral {} vs sigma {}",
            r.value,
            sig.sigma
        );
    }
}
