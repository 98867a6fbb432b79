//! Execution strategy for the data-parallel loops.
//!
//! With the `parallel` feature (default) the hot loops run on the current
//! rayon pool when [`Execution::Parallel`] is selected. Without the feature
//! every strategy degrades to the sequential code path, so results never
//! depend on which one was chosen.

/// How a data-parallel loop should be executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    /// True when this build will actually fan out work.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Maps `f` over `0..len` and collects results in index order.
pub(crate) fn map_indexed<R, F>(exec: Execution, len: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (0..len).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..len).map(f).collect()
}

/// Like [`map_indexed`] but each worker owns a scratch value created by `init`.
pub(crate) fn map_indexed_with<S, R, I, F>(exec: Execution, len: usize, init: I, f: F) -> Vec<R>
where
    R: Send,
    I: Fn() -> S + Sync + Send,
    F: Fn(&mut S, usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (0..len).into_par_iter().map_init(&init, |s, i| f(s, i)).collect();
    }
    let _ = exec;
    let mut scratch = init();
    (0..len).map(|i| f(&mut scratch, i)).collect()
}

/// Fills `out[i] = f(i)` for every index.
pub(crate) fn fill_indexed<F>(exec: Execution, out: &mut [f64], f: F)
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        out.par_iter_mut().enumerate().for_each(|(i, o)| *o = f(i));
        return;
    }
    let _ = exec;
    for (i, o) in out.iter_mut().enumerate() {
        *o = f(i);
    }
}
