//! Data-parallel helpers.
//!
//! With the `parallel` feature (on by default) the maps below run on the rayon
//! global pool; without it they are plain sequential loops. Results are always
//! returned in input order and every element is computed by the same
//! sequential code, so the two modes produce bitwise-identical output.

/// How a batch of independent work items is executed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Uses rayon when the `parallel` feature is enabled, otherwise falls back
    /// to [`Execution::Sequential`].
    #[default]
    Parallel,
}

impl Execution {
    /// Whether this mode actually runs on more than one thread.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }

    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Execution::Parallel {
            use rayon::prelude::*;
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }

    /// Maps `f` over `items` in chunks of `chunk` elements, concatenating the
    /// per-chunk outputs in order.
    pub fn map_chunks<T, R, F>(self, items: &[T], chunk: usize, f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&[T]) -> Vec<R> + Sync + Send,
    {
        let chunk = chunk.max(1);
        #[cfg(feature = "parallel")]
        if self == Execution::Parallel && items.len() > chunk {
            use rayon::prelude::*;
            let parts: Vec<Vec<R>> = items.par_chunks(chunk).map(&f).collect();
            return parts.into_iter().flatten().collect();
        }
        items.chunks(chunk).flat_map(f).collect()
    }
}
