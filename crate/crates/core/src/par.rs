//! Execution strategy for the data-parallel kernels.
//!
//! With the `parallel` feature (on by default) the kernels fan out over a
//! rayon pool; without it every strategy runs sequentially. Results never
//! depend on the strategy: every reduction used here is commutative and
//! associative and chunk boundaries are fixed by the input size alone.

use std::ops::Range;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    Sequential,
    #[default]
    Parallel,
}

impl Strategy {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Strategy::Parallel
    }
}

/// Split `0..len` into at most `parts` contiguous ranges of near-equal size.
pub fn chunks(len: u64, parts: u64) -> Vec<Range<u64>> {
    let parts = parts.max(1).min(len.max(1));
    let base = len / parts;
    let extra = len % parts;
    let mut out = Vec::with_capacity(parts as usize);
    let mut start = 0;
    for i in 0..parts {
        let size = base + u64::from(i < extra);
        out.push(start..start + size);
        start += size;
    }
    out
}

/// Map every chunk and fold the partial results with `merge`.
pub fn map_reduce<T, M, R>(strategy: Strategy, ranges: Vec<Range<u64>>, map: M, merge: R) -> Option<T>
where
    T: Send,
    M: Fn(Range<u64>) -> T + Sync + Send,
    R: Fn(T, T) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if strategy.is_parallel() {
        use rayon::prelude::*;
        return ranges.into_par_iter().map(&map).reduce_with(&merge);
    }
    let _ = strategy;
    ranges.into_iter().map(map).reduce(merge)
}

/// Map over indices, collecting results in order.
pub fn map_collect<T, M>(strategy: Strategy, len: usize, map: M) -> Vec<T>
where
    T: Send,
    M: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if strategy.is_parallel() {
        use rayon::prelude::*;
        return (0..len).into_par_iter().map(&map).collect();
    }
    let _ = strategy;
    (0..len).map(map).collect()
}

/// Number of chunks to cut an enumeration into.
pub fn default_parts(strategy: Strategy) -> u64 {
    #[cfg(feature = "parallel")]
    if strategy.is_parallel() {
        return (rayon::current_num_threads() as u64 * 4).max(1);
    }
    let _ = strategy;
    1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunks_cover_range() {
        for len in [0u64, 1, 7, 100] {
            for parts in [1u64, 3, 16] {
                let c = chunks(len, parts);
                let total: u64 = c.iter().map(|r| r.end - r.start).sum();
                assert_eq!(total, len);
                assert_eq!(c.first().unwrap().start, 0);
            }
        }
    }

    #[test]
    fn strategies_agree() {
        let f = |r: Range<u64>| r.map(|x| x * x).sum::<u64>();
        let a = map_reduce(Strategy::Sequential, chunks(1000, 7), f, |x, y| x + y);
        let b = map_reduce(Strategy::Parallel, chunks(1000, 7), f, |x, y| x + y);
        assert_eq!(a, b);
    }
}
