//! Execution strategy for the data-parallel inner loops: batch term products,
//! tuple sweeps and corpus checks.
//!
//! With the `parallel` feature (on by default) the default mode fans work out
//! over rayon; without it the crate is fully sequential. Results are collected
//! in input order, so both modes produce identical output.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Which strategy to run a batch with. `Mode::default()` picks `Parallel`
/// when the crate is built with the `parallel` feature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[cfg_attr(not(feature = "parallel"), default)]
    Sequential,
    #[cfg(feature = "parallel")]
    #[cfg_attr(feature = "parallel", default)]
    Parallel,
}

/// Below this many work items a batch always runs sequentially; the spawn
/// overhead dominates on desk-scale operands.
pub(crate) const PAR_THRESHOLD: usize = 64;

#[cfg(feature = "parallel")]
pub fn map<T, R, F>(mode: Mode, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match mode {
        Mode::Parallel if items.len() >= PAR_THRESHOLD => items.par_iter().map(f).collect(),
        _ => items.iter().map(f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map<T, R, F>(_mode: Mode, items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn map_default<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    map(Mode::default(), items, f)
}

#[cfg(not(feature = "parallel"))]
pub fn map_default<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    map(Mode::default(), items, f)
}
