//! Weyl sums, the weighted spectral test, and the L^alpha diaphony.
//!
//! For a function system `(xi_k)` indexed by integer vectors and a point
//! set `omega = (x_0, …, x_{N-1})`, the Weyl sums are
//!
//! ```text
//! S_N(xi_k, omega) = (1/N) sum_n xi_k(x_n).
//! ```
//!
//! The **spectral test** is the weighted supremum
//! `sigma_N = sup_k rho(k) |S_N(xi_k)| / sup_k rho(k)` over all nonzero
//! indices. Although the index set is infinite, the supremum is computed
//! *exactly*: index shells `K = 1, 2, 4, …` are enumerated while a running
//! maximum `A` is maintained, and since every unseen index has
//! `rho(k) |S_N| <= rho(k) <= tail_sup(K)`, the scan stops the moment
//! `tail_sup(K) <= A`. The returned value is then the true supremum, not an
//! approximation.
//!
//! The **diaphony** replaces the supremum by an `alpha`-power mean:
//!
//! ```text
//! F_N^(alpha) = ( sum_k rho(k)^alpha |S_N(xi_k)|^alpha / sum_k rho(k)^alpha )^(1/alpha)
//! ```
//!
//! Shell truncation bounds its error by the weight's closed-form tail power
//! sum. For `alpha = 2` and the classical weight/system pairings the sum
//! collapses to an exact N x N pair kernel (quadratic reciprocity of the
//! Fourier side into a closed form on the point side), which is both faster
//! and exact; the shell route remains as the general fallback and as an
//! independent cross-check.
//!
//! All enumeration is chunked deterministically (see [`crate::exec`]), so
//! results are bit-identical no matter how many threads execute them.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::exec::{chunk_count, chunk_range, Compensated, Executor};
use crate::padic::{
    digit_length, digits_of, e_turns, e_unit, regular_digits, HybridSystemConfig, Signature,
    SystemComponent,
};
use crate::points::Point;
use crate::weights::{CoordFactor, Weight};

/// A function system the spectral machinery can drive: an indexed family
/// `xi_k` with a per-coordinate index domain and a point-set preparation
/// step that caches whatever digit expansions or tables evaluation needs.
pub trait System: Sync {
    type Prepared: Sync;

    /// Number of index coordinates.
    fn dim(&self) -> usize;

    /// Index domain, coordinate by coordinate.
    fn signature(&self) -> Vec<Signature>;

    /// Precomputes per-point data sufficient for any index with
    /// `max_i |k_i| <= max_index`.
    fn prepare(&self, pts: &[Point], n: usize, max_index: u64) -> Result<Self::Prepared>;

    /// Evaluates `xi_k(x_i)`.
    fn eval(&self, prep: &Self::Prepared, i: usize, k: &[i64]) -> Complex64;

    /// `S_N(xi_k)` over the prepared points, compensated. Systems override
    /// this to hoist per-index work out of the point loop.
    fn weyl_sum(&self, prep: &Self::Prepared, n: usize, k: &[i64]) -> Complex64 {
        let mut re = Compensated::new();
        let mut im = Compensated::new();
        for i in 0..n {
            let v = self.eval(prep, i, k);
            re.add(v.re);
            im.add(v.im);
        }
        Complex64::new(re.value() / n as f64, im.value() / n as f64)
    }

    /// Short self-description for result metadata.
    fn describe(&self) -> String;
}

/// Compensated Weyl sum `S_N(f, omega)` of an arbitrary function.
///
/// The mean of `N` values of modulus at most `M` has modulus at most `M`
/// up to one final rounding; summation is error-free-transformed so no
/// intermediate cancellation is lost.
pub fn weyl_sum<F>(f: F, pts: &[Point], n: usize) -> Result<Complex64>
where
    F: Fn(&Point) -> Complex64,
{
    if n == 0 || n > pts.len() {
        return Err(Error::argument("need 1 <= N <= number of points"));
    }
    let mut re = Compensated::new();
    let mut im = Compensated::new();
    for p in &pts[..n] {
        let v = f(p);
        re.add(v.re);
        im.add(v.im);
    }
    Ok(Complex64::new(re.value() / n as f64, im.value() / n as f64))
}

// ---------------------------------------------------------------------------
// Index-box enumeration.
// ---------------------------------------------------------------------------

/// Mixed-radix description of the integer box `max_i |k_i| <= K`
/// intersected with the signature's per-coordinate domains.
pub(crate) struct IndexBox {
    sizes: Vec<u64>,
    offsets: Vec<i64>,
    pub(crate) total: u128,
}

impl IndexBox {
    pub(crate) fn new(sig: &[Signature], k: u64) -> Self {
        let mut sizes = Vec::with_capacity(sig.len());
        let mut offsets = Vec::with_capacity(sig.len());
        let mut total: u128 = 1;
        for &s in sig {
            let (size, off) = match s {
                Signature::NonNeg => (k + 1, 0i64),
                Signature::Positive => (k, 1i64),
                Signature::Signed => (2 * k + 1, -(k as i64)),
            };
            sizes.push(size);
            offsets.push(off);
            total = total.saturating_mul(size as u128);
        }
        IndexBox {
            sizes,
            offsets,
            total,
        }
    }

    /// Writes the `idx`-th lattice point (row-major, coordinate 0 slowest)
    /// into `out` and returns its max-norm.
    pub(crate) fn unrank(&self, mut idx: u64, out: &mut [i64]) -> u64 {
        let mut norm = 0u64;
        for i in (0..self.sizes.len()).rev() {
            let r = idx % self.sizes[i];
            idx /= self.sizes[i];
            let v = self.offsets[i] + r as i64;
            out[i] = v;
            norm = norm.max(v.unsigned_abs());
        }
        norm
    }
}

/// Scan budget and shell schedule for the spectral test and the shell-route
/// diaphony.
#[derive(Debug, Clone)]
pub struct SpectralOptions {
    /// Hard cap on the shell radius `K`.
    pub max_shell: u64,
    /// Hard cap on the number of enumerated indices.
    pub max_indices: u64,
    /// Enumerate at least out to this radius even if the exactness
    /// criterion is already met (useful for convergence studies).
    pub min_shell: u64,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        SpectralOptions {
            max_shell: 1 << 22,
            max_indices: 1 << 27,
            min_shell: 1,
        }
    }
}

/// Outcome of the spectral test. `value` is the exact supremum: the scan
/// only stops once every unenumerated index is provably dominated.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralResult {
    pub value: f64,
    /// First index attaining the supremum, in scan order.
    pub argmax: Vec<i64>,
    /// Shell radius at which the tail bound closed the search.
    pub shell_bound: u64,
    /// `sup_k rho(k)`, the denominator of the normalized value.
    pub normalizer: f64,
    /// Number of index vectors whose Weyl sum was evaluated or pruned.
    pub indices_scanned: u64,
}

struct ShellBest {
    score: f64,
    argmax: Vec<i64>,
}

/// The weighted spectral test `sigma_N(omega)`.
pub fn spectral_test<S, W, E>(
    pts: &[Point],
    n: usize,
    system: &S,
    weight: &W,
    opts: &SpectralOptions,
    exec: &E,
) -> Result<SpectralResult>
where
    S: System,
    W: Weight,
    E: Executor,
{
    if n == 0 || n > pts.len() {
        return Err(Error::argument("need 1 <= N <= number of points"));
    }
    let sig = system.signature();
    let s = sig.len();
    let normalizer = weight.normalizer();
    if normalizer.is_nan() || normalizer <= 0.0 {
        return Err(Error::argument("weight normalizer must be positive"));
    }

    let mut best: Option<ShellBest> = None;
    let mut scanned: u64 = 0;
    let mut k_prev: u64 = 0;
    let mut k: u64 = 1;

    loop {
        let prep = system.prepare(pts, n, k)?;
        let outer = IndexBox::new(&sig, k);
        let inner_total = if k_prev == 0 {
            1 // just the origin
        } else {
            IndexBox::new(&sig, k_prev).total.min(u64::MAX as u128) as u64
        };
        let shell_size = outer.total.saturating_sub(inner_total as u128);
        if scanned as u128 + shell_size > opts.max_indices as u128 {
            let a = best.as_ref().map_or(0.0, |b| b.score);
            let hi = a.max(weight.tail_sup(k_prev.max(1)));
            return Err(Error::resource(
                format!("index budget {} exhausted at shell {k}", opts.max_indices),
                Some((a / normalizer, hi / normalizer)),
            ));
        }
        // Prune threshold: fixed for the whole shell so chunk boundaries
        // cannot influence which sums are computed.
        let prune = best.as_ref().map_or(0.0, |b| b.score);

        let total = outer.total as u64;
        let jobs = chunk_count(total);
        let chunk_results: Vec<Option<ShellBest>> = exec.run_chunks(jobs, |c| {
            let (start, end) = chunk_range(c, total);
            let mut buf = vec![0i64; s];
            let mut local: Option<ShellBest> = None;
            for idx in start..end {
                let norm = outer.unrank(idx, &mut buf);
                if norm <= k_prev || norm == 0 {
                    continue;
                }
                let rho = weight.eval(&buf);
                if rho <= prune {
                    continue;
                }
                let sum = system.weyl_sum(&prep, n, &buf);
                let score = rho * libm::sqrt(sum.norm_sqr());
                if local.as_ref().is_none_or(|b| score > b.score) {
                    local = Some(ShellBest {
                        score,
                        argmax: buf.clone(),
                    });
                }
            }
            local
        });
        for cb in chunk_results.into_iter().flatten() {
            if best.as_ref().is_none_or(|b| cb.score > b.score) {
                best = Some(cb);
            }
        }
        scanned += shell_size as u64;

        let a = best.as_ref().map_or(0.0, |b| b.score);
        if a > 0.0 && weight.tail_sup(k) <= a && k >= opts.min_shell {
            let b = best.expect("positive maximum implies a witness");
            let mut value = b.score / normalizer;
            debug_assert!(value <= 1.0 + 1e-9, "normalized spectral value {value} > 1");
            if value > 1.0 {
                value = 1.0;
            }
            return Ok(SpectralResult {
                value,
                argmax: b.argmax,
                shell_bound: k,
                normalizer,
                indices_scanned: scanned,
            });
        }
        if k >= opts.max_shell {
            let hi = a.max(weight.tail_sup(k));
            return Err(Error::resource(
                format!(
                    "shell bound {} reached without tail domination",
                    opts.max_shell
                ),
                Some((a / normalizer, hi / normalizer)),
            ));
        }
        k_prev = k;
        k *= 2;
    }
}

/// One-shot two-branch bound: enumerate the box `max|k_i| <= K` for the
/// attained branch `A`, bound everything outside by `tail_sup(K)`, and
/// return `max(A, tail) / normalizer`. An upper bound for the spectral
/// test at any `K`, and equal to it once the tail branch is dominated.
#[derive(Debug, Clone, PartialEq)]
pub struct EtkResult {
    pub value: f64,
    /// Maximum of `rho(k) |S_N|` inside the box.
    pub box_max: f64,
    /// Index attaining `box_max` (empty if the box maximum is zero).
    pub argmax: Vec<i64>,
    /// The tail branch `tail_sup(K)`.
    pub tail_branch: f64,
    pub normalizer: f64,
}

pub fn etk_bound<S, W, E>(
    pts: &[Point],
    n: usize,
    system: &S,
    weight: &W,
    box_bound: u64,
    exec: &E,
) -> Result<EtkResult>
where
    S: System,
    W: Weight,
    E: Executor,
{
    if n == 0 || n > pts.len() {
        return Err(Error::argument("need 1 <= N <= number of points"));
    }
    if box_bound == 0 {
        return Err(Error::argument("box bound must be >= 1"));
    }
    let sig = system.signature();
    let s = sig.len();
    let normalizer = weight.normalizer();
    let prep = system.prepare(pts, n, box_bound)?;
    let outer = IndexBox::new(&sig, box_bound);
    if outer.total > (1u128 << 40) {
        return Err(Error::resource("box too large to enumerate", None));
    }
    let total = outer.total as u64;
    let jobs = chunk_count(total);
    let chunk_results: Vec<Option<ShellBest>> = exec.run_chunks(jobs, |c| {
        let (start, end) = chunk_range(c, total);
        let mut buf = vec![0i64; s];
        let mut local: Option<ShellBest> = None;
        for idx in start..end {
            let norm = outer.unrank(idx, &mut buf);
            if norm == 0 {
                continue;
            }
            let rho = weight.eval(&buf);
            let sum = system.weyl_sum(&prep, n, &buf);
            let score = rho * libm::sqrt(sum.norm_sqr());
            if local.as_ref().is_none_or(|b| score > b.score) {
                local = Some(ShellBest {
                    score,
                    argmax: buf.clone(),
                });
            }
        }
        local
    });
    let mut best: Option<ShellBest> = None;
    for cb in chunk_results.into_iter().flatten() {
        if best.as_ref().is_none_or(|b| cb.score > b.score) {
            best = Some(cb);
        }
    }
    let tail = weight.tail_sup(box_bound);
    let (box_max, argmax) = best.map_or((0.0, Vec::new()), |b| (b.score, b.argmax));
    Ok(EtkResult {
        value: box_max.max(tail) / normalizer,
        box_max,
        argmax,
        tail_branch: tail,
        normalizer,
    })
}

// ---------------------------------------------------------------------------
// Diaphony.
// ---------------------------------------------------------------------------

/// Outcome of a diaphony computation.
#[derive(Debug, Clone, PartialEq)]
pub struct DiaphonyResult {
    pub value: f64,
    pub alpha: f64,
    /// Shell radius the sum was truncated at; `None` when the exact pair
    /// kernel was used (no truncation).
    pub truncation: Option<u64>,
    /// Upper bound on the difference to the untruncated value (for the
    /// kernel route, a bound on accumulated floating-point rounding).
    pub tail_error_bound: f64,
    /// `sum_k rho(k)^alpha`, the normalizing denominator.
    pub denominator: f64,
}

/// The L^alpha diaphony `F_N^(alpha)(omega)`.
///
/// Requires a weight with a closed-form tail power sum (the denominator is
/// its `K = 0` case). For `alpha = 2` with coordinatewise product weights
/// matching the system — reciprocal factors on trigonometric coordinates,
/// digit-length factors on Walsh/b-adic coordinates — the infinite sum is
/// evaluated exactly through a closed-form pair kernel. Otherwise shells
/// are accumulated until the tail is below `rel_tol` times the running
/// power mean.
#[allow(clippy::too_many_arguments)]
pub fn diaphony<W, E>(
    pts: &[Point],
    n: usize,
    system: &HybridSystemConfig,
    weight: &W,
    alpha: f64,
    rel_tol: f64,
    opts: &SpectralOptions,
    exec: &E,
) -> Result<DiaphonyResult>
where
    W: Weight,
    E: Executor,
{
    if n == 0 || n > pts.len() {
        return Err(Error::argument("need 1 <= N <= number of points"));
    }
    if alpha.is_nan() || alpha <= 1.0 {
        return Err(Error::argument("diaphony needs alpha > 1"));
    }
    if rel_tol.is_nan() || rel_tol <= 0.0 {
        return Err(Error::argument("relative tolerance must be positive"));
    }
    let denominator = weight.tail_power_sum(0, alpha).ok_or_else(|| {
        Error::capability("this weight has no closed-form power sum; diaphony needs one")
    })?;

    if alpha == 2.0 {
        if let Some(kernels) = pair_kernels(system, weight) {
            return kernel_diaphony(pts, n, system, &kernels, denominator, exec);
        }
    }
    shell_diaphony(
        pts,
        n,
        system,
        weight,
        alpha,
        rel_tol,
        denominator,
        opts,
        exec,
    )
}

#[allow(clippy::too_many_arguments)]
fn shell_diaphony<W, E>(
    pts: &[Point],
    n: usize,
    system: &HybridSystemConfig,
    weight: &W,
    alpha: f64,
    rel_tol: f64,
    denominator: f64,
    opts: &SpectralOptions,
    exec: &E,
) -> Result<DiaphonyResult>
where
    W: Weight,
    E: Executor,
{
    let sig = system.signature();
    let s = sig.len();
    let mut num = Compensated::new();
    let mut scanned: u64 = 0;
    let mut k_prev: u64 = 0;
    let mut k: u64 = 1;
    loop {
        let prep = system.prepare(pts, n, k)?;
        let outer = IndexBox::new(&sig, k);
        let shell_size = outer.total.saturating_sub(if k_prev == 0 {
            1
        } else {
            IndexBox::new(&sig, k_prev).total
        });
        let value_at = |num: f64, tail: f64| -> (f64, f64) {
            let v = libm::pow((num / denominator).max(0.0), 1.0 / alpha);
            let hi = libm::pow(((num + tail) / denominator).max(0.0), 1.0 / alpha);
            (v, hi)
        };
        let tail_now = weight
            .tail_power_sum(k_prev, alpha)
            .expect("checked before the scan");
        if scanned as u128 + shell_size > opts.max_indices as u128 {
            let (lo, hi) = value_at(num.value(), tail_now);
            return Err(Error::resource(
                format!("index budget {} exhausted at shell {k}", opts.max_indices),
                Some((lo, hi)),
            ));
        }
        let total = outer.total as u64;
        let jobs = chunk_count(total);
        let parts: Vec<Compensated> = exec.run_chunks(jobs, |c| {
            let (start, end) = chunk_range(c, total);
            let mut buf = vec![0i64; s];
            let mut acc = Compensated::new();
            for idx in start..end {
                let norm = outer.unrank(idx, &mut buf);
                if norm <= k_prev || norm == 0 {
                    continue;
                }
                let rho = weight.eval(&buf);
                let sum = system.weyl_sum(&prep, n, &buf);
                let mag_sq = sum.norm_sqr();
                let term = if alpha == 2.0 {
                    rho * rho * mag_sq
                } else {
                    libm::pow(rho, alpha) * libm::pow(mag_sq, alpha / 2.0)
                };
                acc.add(term);
            }
            acc
        });
        for p in &parts {
            num.merge(p);
        }
        scanned += shell_size as u64;

        let tail = weight
            .tail_power_sum(k, alpha)
            .expect("checked before the scan");
        let total_num = num.value();
        if total_num > 0.0 && tail <= rel_tol * total_num && k >= opts.min_shell {
            let (value, hi) = value_at(total_num, tail);
            return Ok(DiaphonyResult {
                value,
                alpha,
                truncation: Some(k),
                tail_error_bound: hi - value,
                denominator,
            });
        }
        if k >= opts.max_shell {
            let (lo, hi) = value_at(total_num, tail);
            return Err(Error::resource(
                format!("shell bound {} reached before tolerance", opts.max_shell),
                Some((lo, hi)),
            ));
        }
        k_prev = k;
        k *= 2;
    }
}

// ---------------------------------------------------------------------------
// Exact pair kernels for alpha = 2.
// ---------------------------------------------------------------------------

/// Per-slot closed forms of `sum_{k != 0} factor(k)^2 xi_k(x) conj(xi_k(y))`.
enum SlotKernel {
    /// Trigonometric slot with reciprocal factor:
    /// `sum_{k!=0} e(k(x-y))/k^2 = 2 pi^2 B_2({x-y})`.
    Bernoulli,
    /// Digit slot (Walsh or b-adic) with digit-length factor: with `p` the
    /// first position where the digits of `x` and `y` differ,
    /// `(1 - b^-p)/b - b^-(p+2)`; `1/b` when all compared digits agree.
    Digit { base: u64 },
}

struct PairKernels {
    slots: Vec<SlotKernel>,
}

/// Matches system components to weight factors slot by slot; `None` when
/// any slot lacks a closed form.
fn pair_kernels<W: Weight>(system: &HybridSystemConfig, weight: &W) -> Option<PairKernels> {
    let factors = weight.product_factors()?;
    if factors.len() != system.dim() {
        return None;
    }
    let mut slots = Vec::with_capacity(factors.len());
    for (comp, factor) in system.components().iter().zip(factors) {
        let k = match (*comp, *factor) {
            (SystemComponent::Trig, CoordFactor::Reciprocal) => SlotKernel::Bernoulli,
            (SystemComponent::Walsh { base }, CoordFactor::DigitLength { base: wb })
            | (SystemComponent::Badic { base }, CoordFactor::DigitLength { base: wb })
                if base == wb =>
            {
                SlotKernel::Digit { base }
            }
            _ => return None,
        };
        slots.push(k);
    }
    Some(PairKernels { slots })
}

/// Digits compared per coordinate when locating the first mismatch; beyond
/// this depth two coordinates are treated as equal (their kernel values
/// differ by less than `b^-64`).
const KERNEL_DIGITS: usize = 64;

struct KernelPrepared {
    /// Per slot: either the coordinate values (Bernoulli) or the digit
    /// strings (Digit).
    slots: Vec<KernelSlotData>,
}

enum KernelSlotData {
    Values(Vec<f64>),
    Digits { base: u64, digits: Vec<Vec<u32>> },
}

fn kernel_prepare(
    pts: &[Point],
    n: usize,
    system: &HybridSystemConfig,
    kernels: &PairKernels,
) -> Result<KernelPrepared> {
    let mut slots = Vec::with_capacity(kernels.slots.len());
    for (slot, kind) in kernels.slots.iter().enumerate() {
        let coord = system.assignment()[slot];
        match kind {
            SlotKernel::Bernoulli => {
                let values = pts[..n].iter().map(|p| p.coord(coord).to_f64()).collect();
                slots.push(KernelSlotData::Values(values));
            }
            SlotKernel::Digit { base } => {
                let mut digits = Vec::with_capacity(n);
                for p in &pts[..n] {
                    let d = regular_digits(p.coord(coord), *base, KERNEL_DIGITS)?;
                    digits.push(d.into_iter().map(|x| x as u32).collect());
                }
                slots.push(KernelSlotData::Digits {
                    base: *base,
                    digits,
                });
            }
        }
    }
    Ok(KernelPrepared { slots })
}

/// `sum_slot log`-free product kernel for one point pair:
/// `prod_i (1 + K_i(x_m, x_n)) - 1`.
fn kernel_pair(prep: &KernelPrepared, m: usize, n: usize) -> f64 {
    let mut prod = 1.0f64;
    for slot in &prep.slots {
        let k = match slot {
            KernelSlotData::Values(v) => {
                let mut t = v[m] - v[n];
                if t < 0.0 {
                    t += 1.0;
                }
                // 2 pi^2 B_2(t), B_2(t) = t^2 - t + 1/6.
                2.0 * core::f64::consts::PI * core::f64::consts::PI * ((t * t - t) + 1.0 / 6.0)
            }
            KernelSlotData::Digits { base, digits } => {
                let (a, b) = (&digits[m], &digits[n]);
                let mut p = KERNEL_DIGITS;
                for j in 0..KERNEL_DIGITS {
                    if a[j] != b[j] {
                        p = j;
                        break;
                    }
                }
                let bf = *base as f64;
                if p >= KERNEL_DIGITS {
                    1.0 / bf
                } else {
                    let bp = libm::pow(bf, -(p as f64));
                    (1.0 - bp) / bf - bp / (bf * bf)
                }
            }
        };
        prod *= 1.0 + k;
    }
    prod - 1.0
}

fn kernel_diaphony<E: Executor>(
    pts: &[Point],
    n: usize,
    system: &HybridSystemConfig,
    kernels: &PairKernels,
    denominator: f64,
    exec: &E,
) -> Result<DiaphonyResult> {
    let prep = kernel_prepare(pts, n, system, kernels)?;
    let total = (n as u64) * (n as u64);
    let jobs = chunk_count(total);
    let parts: Vec<Compensated> = exec.run_chunks(jobs, |c| {
        let (start, end) = chunk_range(c, total);
        let mut acc = Compensated::new();
        for idx in start..end {
            let m = (idx / n as u64) as usize;
            let nn = (idx % n as u64) as usize;
            acc.add(kernel_pair(&prep, m, nn));
        }
        acc
    });
    let mut sum = Compensated::new();
    for p in &parts {
        sum.merge(p);
    }
    let mean = sum.value() / (n as f64 * n as f64);
    let f_sq = (mean / denominator).max(0.0);
    let value = libm::sqrt(f_sq);
    // Rounding budget: each pair term is produced by O(s) multiplies of
    // factors bounded by prod(1 + K_max); compensated summation keeps the
    // mean's error at that per-term level.
    let s = system.dim() as f64;
    let kernel_cap = libm::pow(
        1.0 + 2.0 * core::f64::consts::PI * core::f64::consts::PI / 6.0,
        s,
    );
    let err_f_sq = 8.0 * (s + 2.0) * f64::EPSILON * (kernel_cap / denominator + f_sq.max(1e-300));
    let tail_error_bound = libm::sqrt(f_sq + err_f_sq) - value;
    Ok(DiaphonyResult {
        value,
        alpha: 2.0,
        truncation: None,
        tail_error_bound,
        denominator,
    })
}

// ---------------------------------------------------------------------------
// The mixed product system as a `System`.
// ---------------------------------------------------------------------------

/// Prepared evaluation state for [`HybridSystemConfig`].
pub struct HybridPrepared {
    slots: Vec<SlotPrepared>,
}

enum SlotPrepared {
    Walsh {
        base: u64,
        /// `digits[i][j]` = j-th digit of point i's coordinate.
        digits: Vec<Vec<u32>>,
    },
    Badic {
        base: u64,
        /// Truncated digit value `sum_{j < L} x_j b^j` per point.
        trunc: Vec<u64>,
        /// `pows[g] = b^g` for `g <= L`.
        pows: Vec<u64>,
    },
    Trig {
        points: Vec<TrigPoint>,
        tables: Vec<Vec<Complex64>>,
    },
}

enum TrigPoint {
    /// Exact rational `p/q` with a shared root-of-unity table for `q`.
    Table { table: usize, p: u64, q: u64 },
    /// Exact rational too large for a table.
    Exact { p: i128, q: i128 },
    /// Floating-point coordinate.
    Float(f64),
}

/// Largest denominator for which per-denominator root tables are built.
const TRIG_TABLE_MAX: u64 = 1 << 16;

impl System for HybridSystemConfig {
    type Prepared = HybridPrepared;

    fn dim(&self) -> usize {
        HybridSystemConfig::dim(self)
    }

    fn signature(&self) -> Vec<Signature> {
        HybridSystemConfig::signature(self)
    }

    fn prepare(&self, pts: &[Point], n: usize, max_index: u64) -> Result<HybridPrepared> {
        if n > pts.len() {
            return Err(Error::argument("fewer points than requested"));
        }
        for p in &pts[..n] {
            if p.dim() != self.dim() {
                return Err(Error::argument(
                    "point dimension must equal system dimension",
                ));
            }
        }
        let mut slots = Vec::with_capacity(self.components().len());
        for (slot, comp) in self.components().iter().enumerate() {
            let coord = self.assignment()[slot];
            match comp {
                SystemComponent::Walsh { base } => {
                    let len = digit_length(max_index, *base).max(1) as usize;
                    let mut digits = Vec::with_capacity(n);
                    for p in &pts[..n] {
                        let d = regular_digits(p.coord(coord), *base, len)?;
                        digits.push(d.into_iter().map(|x| x as u32).collect());
                    }
                    slots.push(SlotPrepared::Walsh {
                        base: *base,
                        digits,
                    });
                }
                SystemComponent::Badic { base } => {
                    let len = digit_length(max_index, *base).max(1) as usize;
                    // b^len <= b * max_index <= 2^63 by the base cap.
                    let mut pows = Vec::with_capacity(len + 1);
                    let mut acc: u64 = 1;
                    pows.push(acc);
                    for _ in 0..len {
                        acc = acc
                            .checked_mul(*base)
                            .ok_or_else(|| Error::resource("digit modulus exceeds u64", None))?;
                        pows.push(acc);
                    }
                    let mut trunc = Vec::with_capacity(n);
                    for p in &pts[..n] {
                        let d = regular_digits(p.coord(coord), *base, len)?;
                        let mut m: u64 = 0;
                        for &dj in d.iter().rev() {
                            m = m * *base + dj;
                        }
                        trunc.push(m);
                    }
                    slots.push(SlotPrepared::Badic {
                        base: *base,
                        trunc,
                        pows,
                    });
                }
                SystemComponent::Trig => {
                    let mut tables: Vec<Vec<Complex64>> = Vec::new();
                    let mut table_of_q: alloc::collections::BTreeMap<u64, usize> =
                        alloc::collections::BTreeMap::new();
                    let mut points = Vec::with_capacity(n);
                    for pt in &pts[..n] {
                        match pt.coord(coord) {
                            crate::points::Coord::Exact(r) => {
                                let p = r.numer().to_i128();
                                let q = r.denom().to_i128();
                                match (p, q) {
                                    (Some(p), Some(q)) if q as u128 <= TRIG_TABLE_MAX as u128 => {
                                        let q = q as u64;
                                        let id = *table_of_q.entry(q).or_insert_with(|| {
                                            let t: Vec<Complex64> = (0..q)
                                                .map(|j| e_unit(j as i128, q as i128))
                                                .collect();
                                            tables.push(t);
                                            tables.len() - 1
                                        });
                                        points.push(TrigPoint::Table {
                                            table: id,
                                            p: p as u64,
                                            q,
                                        });
                                    }
                                    (Some(p), Some(q)) => points.push(TrigPoint::Exact { p, q }),
                                    _ => points.push(TrigPoint::Float(pt.coord(coord).to_f64())),
                                }
                            }
                            crate::points::Coord::Approx(x) => points.push(TrigPoint::Float(*x)),
                        }
                    }
                    slots.push(SlotPrepared::Trig { points, tables });
                }
            }
        }
        Ok(HybridPrepared { slots })
    }

    fn eval(&self, prep: &HybridPrepared, i: usize, k: &[i64]) -> Complex64 {
        let mut acc = Complex64::new(1.0, 0.0);
        for (slot, data) in prep.slots.iter().enumerate() {
            acc *= eval_slot(data, i, k[slot]);
        }
        acc
    }

    fn weyl_sum(&self, prep: &HybridPrepared, n: usize, k: &[i64]) -> Complex64 {
        // Hoist the per-index digit expansions out of the point loop.
        let idx: Vec<SlotIndex> = prep
            .slots
            .iter()
            .zip(k)
            .map(|(slot, &ki)| SlotIndex::new(slot, ki))
            .collect();
        let mut re = Compensated::new();
        let mut im = Compensated::new();
        for i in 0..n {
            let mut v = Complex64::new(1.0, 0.0);
            for (slot, si) in prep.slots.iter().zip(&idx) {
                v *= eval_slot_indexed(slot, si, i);
            }
            re.add(v.re);
            im.add(v.im);
        }
        Complex64::new(re.value() / n as f64, im.value() / n as f64)
    }

    fn describe(&self) -> String {
        let mut per_coord: Vec<String> = vec![String::new(); self.dim()];
        for (slot, comp) in self.components().iter().enumerate() {
            let coord = self.assignment()[slot];
            per_coord[coord] = match comp {
                SystemComponent::Walsh { base } => format!("walsh@{base}"),
                SystemComponent::Badic { base } => format!("badic@{base}"),
                SystemComponent::Trig => String::from("trig"),
            };
        }
        per_coord.join(",")
    }
}

/// Per-index data hoisted out of the point loop.
enum SlotIndex {
    Walsh { kd: Vec<u32> },
    Badic { a: u64, g: usize },
    Trig { k: i64 },
}

impl SlotIndex {
    fn new(slot: &SlotPrepared, ki: i64) -> Self {
        match slot {
            SlotPrepared::Walsh { base, .. } => {
                let kd = digits_of(ki.unsigned_abs(), *base)
                    .into_iter()
                    .map(|d| d as u32)
                    .collect();
                SlotIndex::Walsh { kd }
            }
            SlotPrepared::Badic { base, .. } => {
                let kd = digits_of(ki.unsigned_abs(), *base);
                let mut a: u64 = 0;
                for &d in &kd {
                    a = a * *base + d;
                }
                SlotIndex::Badic { a, g: kd.len() }
            }
            SlotPrepared::Trig { .. } => SlotIndex::Trig { k: ki },
        }
    }
}

fn eval_slot_indexed(slot: &SlotPrepared, si: &SlotIndex, i: usize) -> Complex64 {
    match (slot, si) {
        (SlotPrepared::Walsh { base, digits }, SlotIndex::Walsh { kd }) => {
            let xd = &digits[i];
            let b = *base as u128;
            let mut acc: u128 = 0;
            for (j, &kj) in kd.iter().enumerate() {
                acc = (acc + kj as u128 * xd[j] as u128) % b;
            }
            e_unit(acc as i128, b as i128)
        }
        (SlotPrepared::Badic { trunc, pows, .. }, SlotIndex::Badic { a, g }) => {
            if *g == 0 {
                return Complex64::new(1.0, 0.0);
            }
            let modulus = pows[*g];
            let m = trunc[i] % modulus;
            let num = (*a as u128 * m as u128) % modulus as u128;
            e_unit(num as i128, modulus as i128)
        }
        (SlotPrepared::Trig { points, tables }, SlotIndex::Trig { k }) => match &points[i] {
            TrigPoint::Table { table, p, q } => {
                let num = (*k as i128 * *p as i128).rem_euclid(*q as i128) as u64;
                tables[*table][num as usize]
            }
            TrigPoint::Exact { p, q } => match (*k as i128).checked_mul(*p) {
                Some(kp) => e_unit(kp.rem_euclid(*q), *q),
                None => {
                    // Exponent overflow: reduce p mod q first (p < q, so
                    // this only triggers for enormous k; split the product).
                    let km = (*k as i128).rem_euclid(*q);
                    e_unit(mul_mod_i128(km, p.rem_euclid(*q), *q), *q)
                }
            },
            TrigPoint::Float(x) => {
                let kf = *k as f64;
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
        },
        _ => unreachable!("slot and index kinds are built together"),
    }
}

fn eval_slot(slot: &SlotPrepared, i: usize, ki: i64) -> Complex64 {
    eval_slot_indexed(slot, &SlotIndex::new(slot, ki), i)
}

/// `(a * b) mod m` without overflow, for `0 <= a, b < m <= i128::MAX`.
fn mul_mod_i128(a: i128, b: i128, m: i128) -> i128 {
    // Russian-peasant multiplication; loop length <= 127.
    let (mut a, mut b) = (a.rem_euclid(m), b.rem_euclid(m));
    let mut acc: i128 = 0;
    while b > 0 {
        if b & 1 == 1 {
            acc = (acc + a) % m;
        }
        a = (a + a) % m;
        b >>= 1;
    }
    acc
}
