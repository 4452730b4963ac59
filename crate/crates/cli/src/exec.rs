use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};

use torus_census_core::census::Executor;

pub const THREADS_VAR: &str = "TORUS_CENSUS_THREADS";

/// Work-stealing executor; results come back in input order so census
/// output does not depend on scheduling.
pub struct RayonExecutor {
    pool: ThreadPool,
}

impl RayonExecutor {
    pub fn new(threads: Option<usize>) -> Self {
        let mut b = ThreadPoolBuilder::new();
        if let Some(n) = threads.filter(|&n| n > 0) {
            b = b.num_threads(n);
        }
        RayonExecutor { pool: b.build().expect("thread pool") }
    }

    /// Honours `TORUS_CENSUS_THREADS`; unset or unparsable means rayon's default.
    pub fn from_env() -> Self {
        Self::new(std::env::var(THREADS_VAR).ok().and_then(|s| s.trim().parse().ok()))
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl Executor for RayonExecutor {
    fn map<T, R, F>(&self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        self.pool.install(|| items.par_iter().map(&f).collect())
    }
}
