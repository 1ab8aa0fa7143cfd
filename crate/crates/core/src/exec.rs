//! Strip-level data parallelism.
//!
//! Every hot loop in this crate iterates over a contiguous range of strip
//! indices and reduces the per-strip results. [`Execution`] selects whether
//! that happens on the rayon pool or on the calling thread. Without the
//! `parallel` feature both variants run sequentially.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How a strip range is traversed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether this build can actually run strips concurrently.
    pub const fn parallel_available() -> bool {
        cfg!(feature = "parallel")
    }

    /// Maps every index in `lo..=hi` and folds the results with `reduce`.
    ///
    /// `reduce` must be associative; with integer payloads the result is
    /// independent of the schedule.
    pub fn map_reduce<T, M, R>(self, lo: i64, hi: i64, identity: T, map: M, reduce: R) -> T
    where
        T: Send + Sync + Clone,
        M: Fn(i64) -> T + Sync + Send,
        R: Fn(T, T) -> T + Sync + Send,
    {
        if lo > hi {
            return identity;
        }
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => (lo..=hi)
                .into_par_iter()
                .map(&map)
                .reduce(|| identity.clone(), &reduce),
            _ => (lo..=hi).map(map).fold(identity, reduce),
        }
    }

    /// Maps every index in `lo..=hi` to a batch and concatenates the batches
    /// in index order.
    pub fn flat_collect<T, M>(self, lo: i64, hi: i64, map: M) -> Vec<T>
    where
        T: Send,
        M: Fn(i64) -> Vec<T> + Sync + Send,
    {
        if lo > hi {
            return Vec::new();
        }
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => (lo..=hi).into_par_iter().flat_map_iter(map).collect(),
            _ => (lo..=hi).flat_map(map).collect(),
        }
    }

    /// Applies `f` to each item, preserving input order in the output.
    pub fn map_items<I, T, F>(self, items: &[I], f: F) -> Vec<T>
    where
        I: Sync,
        T: Send,
        F: Fn(&I) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => items.par_iter().map(f).collect(),
            _ => items.iter().map(f).collect(),
        }
    }
}
