//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (on by default) [`Mode::Parallel`] runs on the
//! rayon global pool; without it every mode runs sequentially. Results are
//! always collected in index order, so outputs never depend on scheduling.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Sequential,
    Parallel,
}

impl Default for Mode {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Mode::Parallel
        } else {
            Mode::Sequential
        }
    }
}

/// `(0..n).map(f)` collected in order.
pub fn map_range<T, F>(mode: Mode, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match mode {
        #[cfg(feature = "parallel")]
        Mode::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
        _ => (0..n).map(f).collect(),
    }
}

/// Applies `f` to each item, preserving order.
pub fn map_slice<S, T, F>(mode: Mode, items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    match mode {
        #[cfg(feature = "parallel")]
        Mode::Parallel => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
        _ => items.iter().map(f).collect(),
    }
}

/// True when `pred` holds for every index in `0..n`.
pub fn all_range<F>(mode: Mode, n: usize, pred: F) -> bool
where
    F: Fn(usize) -> bool + Sync + Send,
{
    match mode {
        #[cfg(feature = "parallel")]
        Mode::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().all(pred)
        }
        _ => (0..n).all(pred),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let a = map_range(Mode::Sequential, 1000, |i| i * i);
        let b = map_range(Mode::Parallel, 1000, |i| i * i);
        assert_eq!(a, b);
        assert!(all_range(Mode::Parallel, 100, |i| i < 100));
        assert!(!all_range(Mode::Sequential, 100, |i| i < 99));
    }
}
