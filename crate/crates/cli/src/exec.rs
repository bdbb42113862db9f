//! Scoped-thread executor for the fixed-chunk work grid.
//!
//! The core's [`Executor`] contract fixes the chunk boundaries and requires
//! the results back in chunk order; parallelism may only change *who*
//! computes each chunk, never *what* is computed or how the pieces are
//! combined. This executor therefore produces bit-identical results for
//! any thread count, which the determinism tests rely on.

use equilens_core::exec::Executor;

/// Runs chunk jobs on up to a fixed number of OS threads via
/// [`std::thread::scope`]. Each worker takes a contiguous block of chunk
/// indices and the blocks are concatenated in worker order, so the output
/// is `[job(0), ..., job(n-1)]` exactly as the contract demands.
#[derive(Debug, Clone)]
pub struct ThreadExecutor {
    threads: usize,
}

/// Environment variable capping the worker count (a positive integer).
pub const THREADS_ENV: &str = "EQUILENS_THREADS";

impl ThreadExecutor {
    /// An executor with exactly `threads` workers (clamped to at least 1).
    pub fn new(threads: usize) -> Self {
        ThreadExecutor {
            threads: threads.max(1),
        }
    }

    /// Reads the worker count from `EQUILENS_THREADS`, falling back to the
    /// machine's available parallelism. An unparsable or zero value falls
    /// back as well rather than erroring: the variable is a cap, not a
    /// required argument.
    pub fn from_env() -> Self {
        let from_var = std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&t| t > 0);
        let threads = from_var.unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        });
        ThreadExecutor::new(threads)
    }

    /// The configured worker count.
    pub fn threads(&self) -> usize {
        self.threads
    }
}

impl Executor for ThreadExecutor {
    fn run_chunks<T, F>(&self, n_chunks: usize, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync,
    {
        let workers = self.threads.min(n_chunks);
        if workers <= 1 {
            return (0..n_chunks).map(job).collect();
        }
        let per_worker = n_chunks.div_ceil(workers);
        let job = &job;
        let mut out: Vec<T> = Vec::with_capacity(n_chunks);
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    let lo = w * per_worker;
                    let hi = ((w + 1) * per_worker).min(n_chunks);
                    scope.spawn(move || (lo..hi).map(job).collect::<Vec<T>>())
                })
                .collect();
            for handle in handles {
                out.extend(handle.join().expect("worker thread panicked"));
            }
        });
        out
    }
}
