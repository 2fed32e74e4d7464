//! Trial-loop execution, parallel or sequential.
//!
//! Monte Carlo experiments in this crate (sparsifier seeds, blockmodel
//! trials, sampled metric checks, perturbation searches) are independent per
//! trial and derive their randomness from `base_seed + trial_index`, so the
//! result is identical whichever backend runs the loop.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Runs `f(0), f(1), ..., f(n - 1)` and collects the results in index order.
///
/// Uses the rayon pool when the `parallel` feature is enabled.
pub fn run_trials<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Sequential reference loop with the same contract as [`run_trials`].
///
/// Kept unconditionally so benchmarks can compare backends in one build.
pub fn run_trials_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}
