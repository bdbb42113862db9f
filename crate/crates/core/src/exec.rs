//! Deterministic work splitting.
//!
//! Heavy loops (index-shell scans, pairwise kernel sums) are divided into
//! chunks whose boundaries depend only on the problem size, never on the
//! number of workers. Each chunk produces an independent partial result and
//! the partials are merged in chunk order. Any `Executor` therefore yields
//! bit-identical results, whether it runs chunks sequentially or on a thread
//! pool.

use alloc::vec::Vec;

/// Fixed chunk length used by all shell scans and pair sums.
///
/// This is a tuning constant, not a correctness knob, but it must stay
/// constant for a given input to keep summation groupings reproducible.
pub const CHUNK: usize = 4096;

/// Strategy for running independent, indexed jobs.
///
/// `run_chunks(n, job)` must return `[job(0), job(1), …, job(n-1)]` in order.
/// Implementations may evaluate the jobs concurrently; each `job(i)` is pure
/// with respect to the shared references it captures.
pub trait Executor: Sync {
    fn run_chunks<T, F>(&self, n_chunks: usize, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync;
}

/// Runs every chunk on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn run_chunks<T, F>(&self, n_chunks: usize, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync,
    {
        (0..n_chunks).map(job).collect()
    }
}

/// Number of `CHUNK`-sized chunks needed to cover `len` items.
pub fn chunk_count(len: u64) -> usize {
    (len.div_ceil(CHUNK as u64)) as usize
}

/// Half-open item range `[start, end)` covered by chunk `c`.
pub fn chunk_range(c: usize, len: u64) -> (u64, u64) {
    let start = (c as u64) * (CHUNK as u64);
    let end = (start + CHUNK as u64).min(len);
    (start, end)
}

/// Neumaier compensated accumulator: a running sum with a carry term that
/// captures what ordinary addition rounds away.
#[derive(Debug, Clone, Copy, Default)]
pub struct Compensated {
    sum: f64,
    carry: f64,
}

impl Compensated {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if libm::fabs(self.sum) >= libm::fabs(x) {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    /// Folds another accumulator in, preserving its carry.
    pub fn merge(&mut self, other: &Compensated) {
        self.add(other.sum);
        self.add(other.carry);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}
