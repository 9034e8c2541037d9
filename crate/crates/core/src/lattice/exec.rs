//! Row-parallel map with a sequential fallback.
//!
//! Results are collected in index order, so the output never depends on
//! how rows were scheduled.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Number of worker threads to use when none is requested.
pub fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Runs per-index work either inline or on a dedicated rayon pool.
pub struct Executor {
    threads: usize,
    #[cfg(feature = "parallel")]
    pool: Option<rayon::ThreadPool>,
}

impl Executor {
    /// `threads == 0` means [`default_threads`]. Without the `parallel`
    /// feature every executor is sequential.
    pub fn new(threads: usize) -> Self {
        let threads = if threads == 0 { default_threads() } else { threads };
        #[cfg(feature = "parallel")]
        {
            let pool = (threads > 1)
                .then(|| rayon::ThreadPoolBuilder::new().num_threads(threads).build().ok())
                .flatten();
            Executor { threads, pool }
        }
        #[cfg(not(feature = "parallel"))]
        {
            Executor { threads }
        }
    }

    pub fn threads(&self) -> usize {
        self.threads
    }

    pub fn is_parallel(&self) -> bool {
        #[cfg(feature = "parallel")]
        {
            self.pool.is_some()
        }
        #[cfg(not(feature = "parallel"))]
        {
            false
        }
    }

    /// `[f(0), f(1), ..., f(n-1)]`.
    pub fn map<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if let Some(pool) = &self.pool {
            return pool.install(|| (0..n).into_par_iter().map(&f).collect());
        }
        (0..n).map(f).collect()
    }

    /// `true` if `f(i)` holds for some `i < n`.
    pub fn any<F>(&self, n: usize, f: F) -> bool
    where
        F: Fn(usize) -> bool + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if let Some(pool) = &self.pool {
            return pool.install(|| (0..n).into_par_iter().any(&f));
        }
        (0..n).any(f)
    }
}

impl std::fmt::Debug for Executor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Executor")
            .field("threads", &self.threads)
            .field("parallel", &self.is_parallel())
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_preserves_order() {
        for threads in [1, 2, 8] {
            let ex = Executor::new(threads);
            assert_eq!(ex.map(100, |i| i * i), (0..100).map(|i| i * i).collect::<Vec<_>>());
            assert!(ex.any(50, |i| i == 37));
            assert!(!ex.any(50, |i| i == 50));
        }
    }

    #[test]
    fn zero_means_default() {
        assert_eq!(Executor::new(0).threads(), default_threads());
    }
}
