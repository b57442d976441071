//! Parallel evaluation helpers.
//!
//! All core operations are pure functions over immutable values, so batch
//! work (integration of independent densities, evaluation over automorphism
//! lists, lattice saturation rounds) is data-parallel. With the `parallel`
//! feature enabled the helpers fan out through rayon; the sequential path is
//! kept both as the no-feature fallback and as a runtime switch so the two
//! modes can be compared in one build.

use std::sync::atomic::{AtomicBool, Ordering};

static FORCE_SEQUENTIAL: AtomicBool = AtomicBool::new(false);

/// Forces the sequential path even when the `parallel` feature is compiled in.
pub fn force_sequential(on: bool) {
    FORCE_SEQUENTIAL.store(on, Ordering::SeqCst);
}

pub fn sequential_forced() -> bool {
    FORCE_SEQUENTIAL.load(Ordering::SeqCst)
}

/// Maps `f` over `items`, in parallel when available. Output order matches
/// input order, so results are deterministic in either mode.
pub fn par_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if !sequential_forced() {
            use rayon::prelude::*;
            return items.par_iter().map(f).collect();
        }
    }
    items.iter().map(f).collect()
}

/// Maps `f` over index range `0..n` with ordered output.
pub fn par_map_range<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if !sequential_forced() {
            use rayon::prelude::*;
            return (0..n).into_par_iter().map(f).collect();
        }
    }
    (0..n).map(f).collect()
}
