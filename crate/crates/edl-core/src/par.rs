//! Order-preserving map over work items, fanned out across a thread pool
//! when the `parallel` feature is enabled and requested; the sequential path
//! produces identical results.

pub(crate) fn map_vec<T, U, F>(items: Vec<T>, parallel: bool, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if parallel {
            use rayon::prelude::*;
            return items.into_par_iter().map(&f).collect();
        }
    }
    let _ = parallel;
    items.into_iter().map(f).collect()
}
