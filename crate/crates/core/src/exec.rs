//! Batch execution helpers.
//!
//! Per-sample work (critic targets, loss gradients, evaluation episodes) goes
//! through [`map`] and [`chunked_sum`]. With the `parallel` feature they run on
//! the rayon pool, otherwise sequentially. Reductions always happen over
//! fixed-size chunks combined left to right, so both builds produce
//! bit-identical sums regardless of thread count.

use std::ops::Range;

/// Samples per reduction chunk.
pub const CHUNK: usize = 16;

pub mod seq {
    use super::*;

    pub fn map<T, F>(n: usize, f: F) -> Vec<T>
    where
        F: Fn(usize) -> T,
    {
        (0..n).map(f).collect()
    }

    pub fn chunked_sum<F>(n: usize, dim: usize, f: F) -> (f64, Vec<f64>)
    where
        F: Fn(Range<usize>, &mut [f64]) -> f64,
    {
        let partials: Vec<(f64, Vec<f64>)> = chunk_ranges(n)
            .map(|r| {
                let mut g = vec![0.0; dim];
                let s = f(r, &mut g);
                (s, g)
            })
            .collect();
        combine(partials, dim)
    }
}

#[cfg(feature = "parallel")]
pub mod par {
    use super::*;
    use rayon::prelude::*;

    pub fn map<T, F>(n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..n).into_par_iter().map(f).collect()
    }

    pub fn chunked_sum<F>(n: usize, dim: usize, f: F) -> (f64, Vec<f64>)
    where
        F: Fn(Range<usize>, &mut [f64]) -> f64 + Sync + Send,
    {
        let ranges: Vec<Range<usize>> = chunk_ranges(n).collect();
        let partials: Vec<(f64, Vec<f64>)> = ranges
            .into_par_iter()
            .map(|r| {
                let mut g = vec![0.0; dim];
                let s = f(r, &mut g);
                (s, g)
            })
            .collect();
        combine(partials, dim)
    }
}

fn chunk_ranges(n: usize) -> impl Iterator<Item = Range<usize>> {
    (0..n.div_ceil(CHUNK)).map(move |c| c * CHUNK..((c + 1) * CHUNK).min(n))
}

fn combine(partials: Vec<(f64, Vec<f64>)>, dim: usize) -> (f64, Vec<f64>) {
    let mut total = 0.0;
    let mut grad = vec![0.0; dim];
    for (s, g) in partials {
        total += s;
        grad.iter_mut().zip(&g).for_each(|(a, b)| *a += b);
    }
    (total, grad)
}

/// Maps `f` over `0..n`, preserving index order in the result.
#[cfg(feature = "parallel")]
pub fn map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    par::map(n, f)
}

#[cfg(not(feature = "parallel"))]
pub fn map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    seq::map(n, f)
}

/// Sums a scalar and a `dim`-wide gradient over `0..n`. `f` handles one chunk:
/// it accumulates into the zeroed buffer and returns the chunk's scalar sum.
#[cfg(feature = "parallel")]
pub fn chunked_sum<F>(n: usize, dim: usize, f: F) -> (f64, Vec<f64>)
where
    F: Fn(Range<usize>, &mut [f64]) -> f64 + Sync + Send,
{
    par::chunked_sum(n, dim, f)
}

#[cfg(not(feature = "parallel"))]
pub fn chunked_sum<F>(n: usize, dim: usize, f: F) -> (f64, Vec<f64>)
where
    F: Fn(Range<usize>, &mut [f64]) -> f64 + Sync + Send,
{
    seq::chunked_sum(n, dim, f)
}
