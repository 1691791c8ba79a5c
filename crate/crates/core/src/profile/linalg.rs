//! Rank by Gaussian elimination, modulo a prime and over the rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

pub const RANK_PRIME: u64 = 1_000_000_007;

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// Rank of an integer matrix over `GF(p)`. A full rank here implies full
/// rank over the rationals.
pub fn rank_mod_prime(rows: &[Vec<i64>], p: u64) -> usize {
    assert!(p < 1 << 32, "products must fit in u64");
    let mut a: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x.rem_euclid(p as i64) as u64).collect())
        .collect();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..a.len()).find(|&r| a[r][c] != 0) else { continue };
        a.swap(rank, piv);
        let inv = pow_mod(a[rank][c], p - 2, p);
        let pivot_row = std::mem::take(&mut a[rank]);
        for (r, row) in a.iter_mut().enumerate() {
            if r == rank || row.is_empty() || row[c] == 0 {
                continue;
            }
            let factor = row[c] * inv % p;
            for (x, &y) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                *x = (*x + p - factor * y % p) % p;
            }
        }
        a[rank] = pivot_row;
        rank += 1;
    }
    rank
}

/// Exact rank over the rationals.
pub fn rank_rational(rows: &[Vec<BigRational>]) -> usize {
    let mut a = rows.to_vec();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..a.len()).find(|&r| !a[r][c].is_zero()) else { continue };
        a.swap(rank, piv);
        let pivot_row = std::mem::take(&mut a[rank]);
        for row in a.iter_mut().skip(rank + 1) {
            if row[c].is_zero() {
                continue;
            }
            let factor = &row[c] / &pivot_row[c];
            for (x, y) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                *x -= &factor * y;
            }
        }
        a[rank] = pivot_row;
        rank += 1;
    }
    rank
}

pub fn to_rational(rows: &[Vec<i64>]) -> Vec<Vec<BigRational>> {
    rows.iter()
        .map(|r| r.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect())
        .collect()
}
