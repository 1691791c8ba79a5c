//! Shapley values of set functions on small player sets.
//!
//! Coalitions are bitmasks: player `i` is bit `i`.

use rand::seq::SliceRandom;
use rand::Rng;

/// Largest player count for full permutation enumeration.
pub const MAX_PERMUTATION_PLAYERS: usize = 9;

/// Exact Shapley values by averaging marginal contributions over all `n!`
/// orders. `table[mask]` is the value of the coalition `mask`.
pub fn shapley_by_permutations(n: usize, table: &[f64]) -> Vec<f64> {
    assert!(n <= MAX_PERMUTATION_PLAYERS, "{n} players is too many to enumerate");
    assert_eq!(table.len(), 1 << n);
    let mut phi = vec![0.0; n];
    if n == 0 {
        return phi;
    }
    let mut order: Vec<usize> = (0..n).collect();
    let visit = |order: &[usize], phi: &mut [f64]| {
        let mut mask = 0usize;
        let mut prev = table[0];
        for &p in order {
            mask |= 1 << p;
            let cur = table[mask];
            phi[p] += cur - prev;
            prev = cur;
        }
    };
    // Heap's algorithm, iterative form
    let mut c = vec![0usize; n];
    let mut count: u64 = 1;
    visit(&order, &mut phi);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                order.swap(0, i);
            } else {
                order.swap(c[i], i);
            }
            visit(&order, &mut phi);
            count += 1;
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    phi.iter_mut().for_each(|x| *x /= count as f64);
    phi
}

/// Monte Carlo Shapley values over `samples` uniform random orders.
/// Returns the means and their standard errors.
pub fn shapley_by_sampling<F, R>(n: usize, mut value: F, samples: usize, rng: &mut R) -> (Vec<f64>, Vec<f64>)
where
    F: FnMut(u64) -> f64,
    R: Rng + ?Sized,
{
    assert!(n <= 64, "coalitions are 64-bit masks");
    let mut sum = vec![0.0; n];
    let mut sum_sq = vec![0.0; n];
    let mut order: Vec<usize> = (0..n).collect();
    let empty = value(0);
    for _ in 0..samples {
        order.shuffle(rng);
        let mut mask = 0u64;
        let mut prev = empty;
        for &p in &order {
            mask |= 1 << p;
            let cur = value(mask);
            let m = cur - prev;
            sum[p] += m;
            sum_sq[p] += m * m;
            prev = cur;
        }
    }
    let k = samples.max(1) as f64;
    let mean: Vec<f64> = sum.iter().map(|s| s / k).collect();
    let se = mean
        .iter()
        .zip(&sum_sq)
        .map(|(m, sq)| {
            if samples < 2 {
                f64::NAN
            } else {
                ((sq / k - m * m).max(0.0) * k / (k - 1.0) / k).sqrt()
            }
        })
        .collect();
    (mean, se)
}
