//! Replication scheduling.
//!
//! With the `parallel` feature, tasks run on a dedicated rayon pool of the
//! requested size; without it, or with a single worker, they run in order on
//! the calling thread. Either way the returned vector is in task order.

/// Evaluates `f(0..tasks)` on up to `workers` threads, preserving order.
#[cfg(feature = "parallel")]
pub fn map_tasks<T, F>(tasks: usize, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    if workers <= 1 || tasks <= 1 {
        return (0..tasks).map(f).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(|| (0..tasks).into_par_iter().map(&f).collect()),
        Err(_) => (0..tasks).map(f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map_tasks<T, F>(tasks: usize, _workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..tasks).map(f).collect()
}

/// Whether this build can run replications concurrently.
pub const PARALLEL: bool = cfg!(feature = "parallel");

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        for workers in [1, 3] {
            assert_eq!(map_tasks(50, workers, |i| i * i), (0..50).map(|i| i * i).collect::<Vec<_>>());
        }
        assert!(map_tasks(0, 4, |i| i).is_empty());
    }
}
