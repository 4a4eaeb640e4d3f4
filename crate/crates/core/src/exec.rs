//! Parallel or sequential evaluation of independent work items.
//!
//! Results are always returned in input order, so the choice of strategy never
//! changes an output.

use serde::{Deserialize, Serialize};

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "CPNSURF_THREADS";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Execution {
    #[default]
    Parallel,
    Sequential,
}

impl Execution {
    /// Sequential when `CPNSURF_THREADS=1` or the `parallel` feature is off.
    pub fn from_env() -> Self {
        match threads_from_env() {
            Some(1) => Execution::Sequential,
            _ if cfg!(feature = "parallel") => Execution::Parallel,
            _ => Execution::Sequential,
        }
    }

    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                items.par_iter().map(f).collect()
            }
            _ => items.iter().map(f).collect(),
        }
    }
}

/// Positive integer value of `CPNSURF_THREADS`, if set.
pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&n| n > 0)
}

/// Size the global worker pool from `CPNSURF_THREADS`.
///
/// Does nothing when the variable is unset or the pool was already built.
pub fn init_thread_pool() {
    #[cfg(feature = "parallel")]
    if let Some(n) = threads_from_env() {
        if rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            log::debug!("global thread pool already initialised");
        }
    }
}
