//! Data-parallel map over independent work items.
//!
//! With the `parallel` feature (default) work runs on a rayon pool sized by
//! [`Parallelism::Parallel`]; without it every call is sequential. Output
//! order always matches input order, so results do not depend on the
//! thread count.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Parallelism {
    Sequential,
    /// `jobs = 0` means one thread per available core.
    Parallel { jobs: usize },
    #[default]
    Auto,
}

impl Parallelism {
    pub fn from_jobs(jobs: Option<usize>) -> Self {
        match jobs {
            None => Parallelism::Auto,
            Some(1) => Parallelism::Sequential,
            Some(j) => Parallelism::Parallel { jobs: j },
        }
    }

    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && !matches!(self, Parallelism::Sequential)
    }
}

/// Maps `f` over `items`, preserving order.
pub fn map<T, U, F>(items: &[T], mode: Parallelism, f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    if !mode.is_parallel() || items.len() < 2 {
        return items.iter().map(f).collect();
    }
    parallel_map(items, mode, f)
}

#[cfg(feature = "parallel")]
fn parallel_map<T, U, F>(items: &[T], mode: Parallelism, f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    let jobs = match mode {
        Parallelism::Parallel { jobs } => jobs,
        _ => 0,
    };
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(|| items.par_iter().map(&f).collect()),
        Err(_) => items.iter().map(f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
fn parallel_map<T, U, F>(items: &[T], _mode: Parallelism, f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.iter().map(f).collect()
}
