//! Deterministic parallel reduction over index pairs `i < j`.
//!
//! Rows are grouped into fixed tiles. Each tile is summed sequentially and the
//! tile partials are combined in tile order, so the result does not depend on
//! how many worker threads rayon happens to use.

use rayon::prelude::*;

/// Rows per tile. Part of the summation order, so changing it changes the last bits.
pub const TILE_ROWS: usize = 32;

/// Sum `term(i, j)` over all `0 <= i < j < n`.
pub fn sum_upper<F>(n: usize, term: F) -> f64
where
    F: Fn(usize, usize) -> f64 + Sync,
{
    let tiles = n.div_ceil(TILE_ROWS);
    let partials: Vec<f64> = (0..tiles)
        .into_par_iter()
        .map(|t| {
            let rows = (t * TILE_ROWS)..((t + 1) * TILE_ROWS).min(n);
            let mut tile = 0.0;
            for i in rows {
                let mut row = 0.0;
                for j in (i + 1)..n {
                    row += term(i, j);
                }
                tile += row;
            }
            tile
        })
        .collect();
    neumaier_sum(&partials)
}

/// Compensated summation in slice order.
pub fn neumaier_sum(values: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for &v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Circular index gap between `i` and `j` on a loop of length `n`.
#[inline]
pub fn circular_gap(i: usize, j: usize, n: usize) -> usize {
    let d = i.abs_diff(j);
    d.min(n - d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_every_pair_once() {
        let n = 101;
        let total = sum_upper(n, |_, _| 1.0);
        assert_eq!(total, (n * (n - 1) / 2) as f64);
    }

    #[test]
    fn independent_of_thread_count() {
        let term = |i: usize, j: usize| ((i * 7 + j * 13) as f64).sin() / (1.0 + j as f64);
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| sum_upper(777, term));
        let four = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| sum_upper(777, term));
        assert_eq!(one.to_bits(), four.to_bits());
    }

    #[test]
    fn gap_wraps() {
        assert_eq!(circular_gap(0, 9, 10), 1);
        assert_eq!(circular_gap(2, 5, 10), 3);
    }
}
