//! Amplitude-array loops with a rayon path and a sequential fallback.
//!
//! Every reduction is summed over fixed 4096-element chunks and the partial
//! sums are combined in order, so results are bit-identical across
//! [`ExecPolicy`] choices and thread counts.

use std::iter::Sum;

use num_complex::Complex64;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

const REDUCE_CHUNK: usize = 4096;
/// Arrays shorter than this are always processed sequentially.
#[cfg_attr(not(feature = "parallel"), allow(dead_code))]
const PAR_MIN_LEN: usize = 1 << 12;

/// How amplitude loops are executed.
///
/// `Parallel` silently degrades to `Sequential` when the crate is built
/// without the `parallel` feature.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExecPolicy {
    Sequential,
    Parallel,
}

impl Default for ExecPolicy {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            ExecPolicy::Parallel
        } else {
            ExecPolicy::Sequential
        }
    }
}

impl ExecPolicy {
    #[inline]
    #[cfg_attr(not(feature = "parallel"), allow(dead_code))]
    pub(crate) fn parallel_for(self, len: usize) -> bool {
        cfg!(feature = "parallel") && self == ExecPolicy::Parallel && len >= PAR_MIN_LEN
    }
}

/// Calls `f(lo_index, lo, hi)` for every amplitude pair differing only in
/// bit `target`.
pub(crate) fn for_each_pair<F>(amps: &mut [Complex64], target: usize, policy: ExecPolicy, f: F)
where
    F: Fn(usize, &mut Complex64, &mut Complex64) + Sync + Send,
{
    let half = 1usize << target;
    let block = half << 1;
    let run_block = |b: usize, chunk: &mut [Complex64]| {
        let (lo, hi) = chunk.split_at_mut(half);
        let base = b * block;
        for (j, (a, c)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
            f(base + j, a, c);
        }
    };
    #[cfg(feature = "parallel")]
    if policy.parallel_for(amps.len()) {
        let blocks = amps.len() / block;
        if blocks >= 64 {
            amps.par_chunks_mut(block)
                .enumerate()
                .for_each(|(b, chunk)| run_block(b, chunk));
        } else {
            for (b, chunk) in amps.chunks_mut(block).enumerate() {
                let base = b * block;
                let (lo, hi) = chunk.split_at_mut(half);
                lo.par_iter_mut()
                    .zip(hi.par_iter_mut())
                    .enumerate()
                    .for_each(|(j, (a, c))| f(base + j, a, c));
            }
        }
        return;
    }
    let _ = policy;
    for (b, chunk) in amps.chunks_mut(block).enumerate() {
        run_block(b, chunk);
    }
}

pub(crate) fn for_each_indexed<F>(amps: &mut [Complex64], policy: ExecPolicy, f: F)
where
    F: Fn(usize, &mut Complex64) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if policy.parallel_for(amps.len()) {
        amps.par_iter_mut().enumerate().for_each(|(i, a)| f(i, a));
        return;
    }
    let _ = policy;
    amps.iter_mut().enumerate().for_each(|(i, a)| f(i, a));
}

/// Calls `f(block_index, block)` on consecutive blocks of `block_len`.
pub(crate) fn for_each_block<F>(amps: &mut [Complex64], block_len: usize, policy: ExecPolicy, f: F)
where
    F: Fn(usize, &mut [Complex64]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if policy.parallel_for(amps.len()) && amps.len() / block_len >= 2 {
        amps.par_chunks_mut(block_len)
            .enumerate()
            .for_each(|(b, chunk)| f(b, chunk));
        return;
    }
    let _ = policy;
    amps.chunks_mut(block_len)
        .enumerate()
        .for_each(|(b, chunk)| f(b, chunk));
}

/// Builds `out[i] = src[source_of(i)]`.
pub(crate) fn gather<F>(src: &[Complex64], policy: ExecPolicy, source_of: F) -> Vec<Complex64>
where
    F: Fn(usize) -> usize + Sync + Send,
{
    let mut out = vec![Complex64::new(0.0, 0.0); src.len()];
    for_each_indexed(&mut out, policy, |i, a| *a = src[source_of(i)]);
    out
}

/// Deterministic chunked sum of `term(i)` for `i in 0..len`.
pub(crate) fn chunked_sum<T, F>(len: usize, policy: ExecPolicy, term: F) -> T
where
    T: Send + Sum<T>,
    F: Fn(usize) -> T + Sync + Send,
{
    let chunks = len.div_ceil(REDUCE_CHUNK);
    let partial = |c: usize| {
        let lo = c * REDUCE_CHUNK;
        let hi = (lo + REDUCE_CHUNK).min(len);
        (lo..hi).map(&term).sum::<T>()
    };
    #[cfg(feature = "parallel")]
    if policy.parallel_for(len) {
        let partials: Vec<T> = (0..chunks).into_par_iter().map(partial).collect();
        return partials.into_iter().sum();
    }
    let _ = policy;
    let partials: Vec<T> = (0..chunks).map(partial).collect();
    partials.into_iter().sum()
}
